//! Sign-labeled multigraphs of virtual links, graph reduction, and the
//! deletion/contraction engine for the reduced relative Tutte polynomial.
//!
//! Edges carry `+` (classical crossing) or `0` (virtual crossing) labels.
//! The recursion runs over `+` edges only: a bridge contributes X and is
//! contracted, a loop contributes Y and is deleted, and otherwise
//! T = y*T(G-e) + x*T(G/e). A residual with only 0-edges evaluates to
//! d^(c-1), c its number of connected components. Disconnected graphs that
//! still carry `+` edges factor multiplicatively over components.

use std::collections::HashMap;

use crate::conway::ConwayExpr;
use crate::error::{Error, Result};
use crate::laurent::{bracket_map, jones_map, LaurentPolynomial, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Plus,
    Zero,
}

/// A multigraph with {+, 0} edge labels; loops and parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, EdgeLabel)>,
}

impl LabeledGraph {
    pub fn new(vertex_count: usize) -> LabeledGraph {
        LabeledGraph {
            vertex_count,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: EdgeLabel) {
        assert!(u < self.vertex_count && v < self.vertex_count);
        self.edges.push((u.min(v), u.max(v), label));
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, EdgeLabel)] {
        &self.edges
    }

    pub fn zero_edge_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|(_, _, l)| *l == EdgeLabel::Zero)
            .count()
    }

    /// Cycle of length p, all edges labeled `label`.
    pub fn cycle(p: usize, label: EdgeLabel) -> LabeledGraph {
        let mut g = LabeledGraph::new(p.max(1));
        for i in 0..p {
            g.add_edge(i, (i + 1) % p.max(1), label);
        }
        g
    }

    /// Two vertices joined by p parallel edges, all labeled `label`.
    pub fn parallel(p: usize, label: EdgeLabel) -> LabeledGraph {
        let mut g = LabeledGraph::new(2);
        for _ in 0..p {
            g.add_edge(0, 1, label);
        }
        g
    }

    fn component_ids(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for (u, v, _) in &self.edges {
            adj[*u].push(*v);
            adj[*v].push(*u);
        }
        let mut next = 0;
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = next;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    fn component_count(&self) -> usize {
        let ids = self.component_ids();
        ids.iter().max().map_or(0, |m| m + 1)
    }

    /// Is edge index `i` a bridge? Connectivity counts 0-edges.
    fn is_bridge(&self, i: usize) -> bool {
        let (u, v, _) = self.edges[i];
        if u == v {
            return false;
        }
        let mut g = self.clone();
        g.edges.swap_remove(i);
        g.component_count() > self.component_count()
    }

    fn delete(&self, i: usize) -> LabeledGraph {
        let mut g = self.clone();
        g.edges.swap_remove(i);
        g
    }

    fn contract(&self, i: usize) -> LabeledGraph {
        let (u, v, _) = self.edges[i];
        let mut g = self.clone();
        g.edges.swap_remove(i);
        if u != v {
            let (keep, gone) = (u.min(v), u.max(v));
            for e in &mut g.edges {
                for end in [&mut e.0, &mut e.1] {
                    if *end == gone {
                        *end = keep;
                    } else if *end > gone {
                        *end -= 1;
                    }
                }
                if e.1 < e.0 {
                    std::mem::swap(&mut e.0, &mut e.1);
                }
            }
            g.vertex_count -= 1;
        }
        g
    }

    fn split_components(&self) -> Vec<LabeledGraph> {
        let ids = self.component_ids();
        let n = ids.iter().max().map_or(0, |m| m + 1);
        (0..n)
            .map(|c| {
                let verts: Vec<usize> = (0..self.vertex_count).filter(|v| ids[*v] == c).collect();
                let remap: HashMap<usize, usize> =
                    verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
                let mut g = LabeledGraph::new(verts.len());
                for (u, v, l) in &self.edges {
                    if ids[*u] == c {
                        g.add_edge(remap[u], remap[v], *l);
                    }
                }
                g
            })
            .collect()
    }

    fn normalized_edges(&self, perm: &[usize]) -> Vec<(usize, usize, EdgeLabel)> {
        let mut es: Vec<_> = self
            .edges
            .iter()
            .map(|(u, v, l)| {
                let (a, b) = (perm[*u], perm[*v]);
                (a.min(b), a.max(b), *l)
            })
            .collect();
        es.sort();
        es
    }

    /// Canonical form under vertex relabeling: degree-refined classes, then
    /// exhaustive search over class-preserving labelings (small graphs).
    fn canonical_key(&self) -> Option<(usize, Vec<(usize, usize, EdgeLabel)>)> {
        if self.vertex_count > 10 {
            return None;
        }
        // refine by (plus-degree, zero-degree, loop count)
        let mut sig = vec![(0usize, 0usize, 0usize); self.vertex_count];
        for (u, v, l) in &self.edges {
            if u == v {
                sig[*u].2 += 1;
            }
            for end in [*u, *v] {
                match l {
                    EdgeLabel::Plus => sig[end].0 += 1,
                    EdgeLabel::Zero => sig[end].1 += 1,
                }
            }
        }
        let mut order: Vec<usize> = (0..self.vertex_count).collect();
        order.sort_by_key(|v| sig[*v]);
        // group vertices with identical signatures; permute within groups
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match groups.last() {
                Some(g) if sig[g[0]] == sig[v] => groups.last_mut().unwrap().push(v),
                _ => groups.push(vec![v]),
            }
        }
        let mut best: Option<Vec<(usize, usize, EdgeLabel)>> = None;
        let mut perm = vec![0usize; self.vertex_count];
        self.search_labelings(&groups, 0, &mut perm, &mut 0, &mut best);
        best.map(|es| (self.vertex_count, es))
    }

    fn search_labelings(
        &self,
        groups: &[Vec<usize>],
        gi: usize,
        perm: &mut Vec<usize>,
        next_label: &mut usize,
        best: &mut Option<Vec<(usize, usize, EdgeLabel)>>,
    ) {
        if gi == groups.len() {
            let es = self.normalized_edges(perm);
            if best.as_ref().is_none_or(|b| es < *b) {
                *best = Some(es);
            }
            return;
        }
        let group = &groups[gi];
        let base = *next_label;
        let mut idx: Vec<usize> = (0..group.len()).collect();
        // Heap's-algorithm-free permutation by recursion over positions
        fn rec(
            this: &LabeledGraph,
            group: &[usize],
            idx: &mut Vec<usize>,
            pos: usize,
            base: usize,
            groups: &[Vec<usize>],
            gi: usize,
            perm: &mut Vec<usize>,
            next_label: &mut usize,
            best: &mut Option<Vec<(usize, usize, EdgeLabel)>>,
        ) {
            if pos == group.len() {
                for (k, &i) in idx.iter().enumerate() {
                    perm[group[i]] = base + k;
                }
                *next_label = base + group.len();
                this.search_labelings(groups, gi + 1, perm, next_label, best);
                return;
            }
            for i in pos..group.len() {
                idx.swap(pos, i);
                rec(
                    this, group, idx, pos + 1, base, groups, gi, perm, next_label, best,
                );
                idx.swap(pos, i);
            }
        }
        rec(
            self, group, &mut idx, 0, base, groups, gi, perm, next_label, best,
        );
        *next_label = base + group.len();
    }
}

/// Two-terminal series-parallel term: the intermediate form of the graph
/// construction from Conway expressions.
#[derive(Debug, Clone)]
enum SpTerm {
    Edge(EdgeLabel),
    Series(Vec<SpTerm>),
    Parallel(Vec<SpTerm>),
}

impl SpTerm {
    fn dual(self) -> SpTerm {
        match self {
            SpTerm::Edge(l) => SpTerm::Edge(l),
            SpTerm::Series(ts) => SpTerm::Parallel(ts.into_iter().map(SpTerm::dual).collect()),
            SpTerm::Parallel(ts) => SpTerm::Series(ts.into_iter().map(SpTerm::dual).collect()),
        }
    }

    /// Realize between terminal vertices `s` and `t` of `g`.
    fn realize(&self, g: &mut LabeledGraph, s: usize, t: usize) {
        match self {
            SpTerm::Edge(l) => g.add_edge(s, t, *l),
            SpTerm::Parallel(ts) => {
                for term in ts {
                    term.realize(g, s, t);
                }
            }
            SpTerm::Series(ts) => {
                let mut prev = s;
                for (i, term) in ts.iter().enumerate() {
                    let next = if i + 1 == ts.len() {
                        t
                    } else {
                        g.vertex_count += 1;
                        g.vertex_count - 1
                    };
                    term.realize(g, prev, next);
                    prev = next;
                }
            }
        }
    }
}

fn sp_of(e: &ConwayExpr) -> Result<SpTerm> {
    match e {
        ConwayExpr::Integer(n) if *n > 0 => Ok(SpTerm::Series(
            (0..*n).map(|_| SpTerm::Edge(EdgeLabel::Plus)).collect(),
        )),
        ConwayExpr::Integer(_) => Err(Error::UnsupportedGraph),
        ConwayExpr::Virtual => Ok(SpTerm::Edge(EdgeLabel::Zero)),
        ConwayExpr::Ramification(parts) => Ok(SpTerm::Series(
            parts
                .iter()
                .map(|p| sp_of(p).map(SpTerm::dual))
                .collect::<Result<_>>()?,
        )),
        ConwayExpr::Product(factors) => {
            let mut acc = sp_of(&factors[0])?;
            for f in &factors[1..] {
                acc = SpTerm::Series(vec![acc.dual(), sp_of(f)?]);
            }
            Ok(acc)
        }
    }
}

/// Checkerboard-style graph of a Conway expression: twist regions become
/// edge paths, virtual crossings 0-edges, composition series/parallel
/// blocks; closure merges the two terminals.
pub fn graph_from_conway(e: &ConwayExpr) -> Result<LabeledGraph> {
    let term = sp_of(e)?;
    let mut g = LabeledGraph::new(1);
    term.realize(&mut g, 0, 0);
    // Shapes whose reduced graph keeps two or more 0-edges (e.g. two
    // virtual twist regions in separated blocks) are outside what plain
    // deletion/contraction over this graph can express; the state sum
    // disagrees with any such graph, so refuse rather than mislead.
    if reduce_graph(&g).zero_edge_count() > 1 {
        return Err(Error::UnsupportedGraph);
    }
    Ok(g)
}

/// Reduce to fixpoint: parallel 0-edge pairs cancel (endpoints merged) and
/// 0-loops drop. Classical-pair and Z-move cancellations need a `-` label
/// to fire and are vacuous over the {+, 0} alphabet.
pub fn reduce_graph(g: &LabeledGraph) -> LabeledGraph {
    let mut g = g.clone();
    loop {
        if let Some(i) = g
            .edges
            .iter()
            .position(|(u, v, l)| u == v && *l == EdgeLabel::Zero)
        {
            g.edges.swap_remove(i);
            continue;
        }
        let mut pair = None;
        'outer: for i in 0..g.edges.len() {
            let (u1, v1, l1) = g.edges[i];
            if l1 != EdgeLabel::Zero {
                continue;
            }
            for j in i + 1..g.edges.len() {
                let (u2, v2, l2) = g.edges[j];
                if l2 == EdgeLabel::Zero && u1 == u2 && v1 == v2 {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        match pair {
            Some((i, j)) => {
                let (u, v, _) = g.edges[i];
                g.edges.swap_remove(j);
                g.edges.swap_remove(i);
                // merge v into u
                let mut h = LabeledGraph::new(g.vertex_count);
                for (a, b, l) in &g.edges {
                    let m = |x: usize| if x == v { u } else { x };
                    h.add_edge(m(*a), m(*b), *l);
                }
                g = compact(&h);
            }
            None => break,
        }
    }
    compact(&g)
}

/// Drop unused vertex ids (keeps isolated vertices that were terminals of
/// merges out of the picture; component counting happens on edges).
fn compact(g: &LabeledGraph) -> LabeledGraph {
    let mut used = vec![false; g.vertex_count];
    for (u, v, _) in &g.edges {
        used[*u] = true;
        used[*v] = true;
    }
    let mut remap = vec![usize::MAX; g.vertex_count];
    let mut next = 0;
    for v in 0..g.vertex_count {
        if used[v] {
            remap[v] = next;
            next += 1;
        }
    }
    if next == 0 {
        // keep a single vertex so the empty residual is one component
        let mut h = LabeledGraph::new(1);
        h.edges.clear();
        return h;
    }
    let mut h = LabeledGraph::new(next);
    for (u, v, l) in &g.edges {
        h.add_edge(remap[*u], remap[*v], *l);
    }
    h
}

type Memo = HashMap<(usize, Vec<(usize, usize, EdgeLabel)>), LaurentPolynomial>;

/// Reduced relative Tutte polynomial, memoized on canonical graph forms.
pub fn relative_tutte(g: &LabeledGraph) -> LaurentPolynomial {
    let mut memo = Memo::new();
    tutte_rec(g, Some(&mut memo))
}

/// Same recursion with no memo table; used to cross-check the memoizer.
pub fn relative_tutte_plain(g: &LabeledGraph) -> LaurentPolynomial {
    tutte_rec(g, None)
}

fn tutte_rec(g: &LabeledGraph, mut memo: Option<&mut Memo>) -> LaurentPolynomial {
    // all-0 residual: d^(c-1) over its connected components
    let plus_edges: Vec<usize> = (0..g.edges.len())
        .filter(|&i| g.edges[i].2 == EdgeLabel::Plus)
        .collect();
    if plus_edges.is_empty() {
        let c = g.component_count().max(1);
        return LaurentPolynomial::monomial(Variable::D, (c - 1) as i32, 1);
    }
    let key = g.canonical_key();
    if let (Some(k), Some(m)) = (&key, memo.as_deref_mut()) {
        if let Some(p) = m.get(k) {
            return p.clone();
        }
    }
    // multiplicative over components once any + edge exists
    let result = if g.component_count() > 1 {
        let mut acc = LaurentPolynomial::one();
        for comp in g.split_components() {
            acc = &acc * &tutte_rec(&comp, memo.as_deref_mut());
        }
        acc
    } else {
        // prefer loops, then bridges (closed-form multipliers), then an
        // arbitrary + edge
        let pick_loop = plus_edges.iter().copied().find(|&i| {
            let (u, v, _) = g.edges[i];
            u == v
        });
        if let Some(i) = pick_loop {
            let y_big = LaurentPolynomial::monomial(Variable::Y1, 1, 1);
            &y_big * &tutte_rec(&g.delete(i), memo.as_deref_mut())
        } else if let Some(i) = plus_edges.iter().copied().find(|&i| g.is_bridge(i)) {
            let x_big = LaurentPolynomial::monomial(Variable::X1, 1, 1);
            &x_big * &tutte_rec(&g.contract(i), memo.as_deref_mut())
        } else {
            let i = plus_edges[0];
            let y = LaurentPolynomial::monomial(Variable::Y0, 1, 1);
            let x = LaurentPolynomial::monomial(Variable::X0, 1, 1);
            let del = &y * &tutte_rec(&g.delete(i), memo.as_deref_mut());
            let con = &x * &tutte_rec(&g.contract(i), memo.as_deref_mut());
            &del + &con
        }
    };
    if let (Some(k), Some(m)) = (key, memo) {
        m.insert(k, result.clone());
    }
    result
}

#[derive(Debug, Clone)]
pub struct TutteImage {
    pub bracket: LaurentPolynomial,
    pub jones: LaurentPolynomial,
}

/// Substitute a Tutte polynomial in x, y, X, Y, d down to the bracket in A
/// and the (writhe-normalized, quarter-unit) Jones polynomial in t.
pub fn tutte_to_jones(t: &LaurentPolynomial, writhe: i64) -> Result<TutteImage> {
    if let Err(v) = t.uses_only(&[
        Variable::X0,
        Variable::Y0,
        Variable::X1,
        Variable::Y1,
        Variable::D,
    ]) {
        return Err(Error::StrayVariable { var: v.name() });
    }
    let bracket = t.substitute(&bracket_map())?;
    let sign = if writhe % 2 == 0 { 1 } else { -1 };
    let unit = LaurentPolynomial::monomial(Variable::A, (-3 * writhe) as i32, sign);
    let jones = (&bracket * &unit).substitute(&jones_map())?;
    Ok(TutteImage { bracket, jones })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conway::parse_conway;
    use crate::laurent::Monomial;
    use num_bigint::BigInt;

    fn var(v: Variable) -> LaurentPolynomial {
        LaurentPolynomial::monomial(v, 1, 1)
    }

    fn parse_graph(s: &str) -> LabeledGraph {
        graph_from_conway(&parse_conway(s).unwrap()).unwrap()
    }

    #[test]
    fn single_edges() {
        let mut bridge = LabeledGraph::new(2);
        bridge.add_edge(0, 1, EdgeLabel::Plus);
        assert_eq!(relative_tutte(&bridge), var(Variable::X1));
        let mut lp = LabeledGraph::new(1);
        lp.add_edge(0, 0, EdgeLabel::Plus);
        assert_eq!(relative_tutte(&lp), var(Variable::Y1));
        let mut zero = LabeledGraph::new(2);
        zero.add_edge(0, 1, EdgeLabel::Zero);
        assert_eq!(relative_tutte(&zero), LaurentPolynomial::one());
    }

    #[test]
    fn printed_small_cycles() {
        // 2-cycle of + edges
        let g = LabeledGraph::cycle(2, EdgeLabel::Plus);
        let expect = &(&var(Variable::Y0) * &var(Variable::X1))
            + &(&var(Variable::X0) * &var(Variable::Y1));
        assert_eq!(relative_tutte(&g), expect);
        // 2-cycle {+, 0}
        let mut g = LabeledGraph::new(2);
        g.add_edge(0, 1, EdgeLabel::Plus);
        g.add_edge(0, 1, EdgeLabel::Zero);
        assert_eq!(
            relative_tutte(&g),
            &var(Variable::X0) + &var(Variable::Y0)
        );
        // 3-cycle {+, +, 0} -> x^2 + xy + Xy
        let mut g = LabeledGraph::new(3);
        g.add_edge(0, 1, EdgeLabel::Plus);
        g.add_edge(1, 2, EdgeLabel::Plus);
        g.add_edge(2, 0, EdgeLabel::Zero);
        let x = var(Variable::X0);
        let y = var(Variable::Y0);
        let xx = var(Variable::X1);
        let expect = &(&(&x * &x) + &(&x * &y)) + &(&xx * &y);
        assert_eq!(relative_tutte(&g), expect);
    }

    #[test]
    fn conway_graph_shapes() {
        let g = parse_graph("(1^3)");
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.zero_edge_count(), 0);
        assert_eq!(relative_tutte(&g), relative_tutte(&LabeledGraph::cycle(3, EdgeLabel::Plus)));

        let g = parse_graph("(i,1^2)");
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.zero_edge_count(), 1);
    }

    #[test]
    fn reduce_parallel_zero_pair() {
        let mut g = LabeledGraph::new(2);
        g.add_edge(0, 1, EdgeLabel::Zero);
        g.add_edge(0, 1, EdgeLabel::Zero);
        let r = reduce_graph(&g);
        assert_eq!(r.edges().len(), 0);
        // reduced cycle with one 0-edge is a fixpoint
        let g = parse_graph("(i,1^2)");
        assert_eq!(reduce_graph(&g), compact(&g));
    }

    #[test]
    fn duality_spot_check() {
        for p in 2..=6 {
            let cyc = relative_tutte(&LabeledGraph::cycle(p, EdgeLabel::Plus));
            let par = relative_tutte(&LabeledGraph::parallel(p, EdgeLabel::Plus));
            let swapped = cyc
                .substitute(&[
                    (Variable::X0, var(Variable::Y0)),
                    (Variable::Y0, var(Variable::X0)),
                    (Variable::X1, var(Variable::Y1)),
                    (Variable::Y1, var(Variable::X1)),
                ])
                .unwrap();
            assert_eq!(swapped, par, "p = {p}");
        }
    }

    #[test]
    fn memoized_equals_plain_on_random_graphs() {
        let mut seed: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..200 {
            let nv = (next() % 5 + 2) as usize;
            let ne = (next() % 9 + 2) as usize;
            let mut g = LabeledGraph::new(nv);
            for _ in 0..ne {
                let u = (next() % nv as u64) as usize;
                let v = (next() % nv as u64) as usize;
                let l = if next() % 4 == 0 {
                    EdgeLabel::Zero
                } else {
                    EdgeLabel::Plus
                };
                g.add_edge(u, v, l);
            }
            assert_eq!(relative_tutte(&g), relative_tutte_plain(&g));
        }
    }

    #[test]
    fn substitution_chain() {
        let x = var(Variable::X0);
        let y = var(Variable::Y0);
        let img = tutte_to_jones(&(&x + &y), 0).unwrap();
        let expect = &LaurentPolynomial::monomial(Variable::A, 1, 1)
            + &LaurentPolynomial::monomial(Variable::A, -1, 1);
        assert_eq!(img.bracket, expect);
        let img = tutte_to_jones(&LaurentPolynomial::one(), 0).unwrap();
        assert_eq!(img.jones, LaurentPolynomial::one());
        let stray = LaurentPolynomial::from_term(Monomial::var(Variable::A, 1), BigInt::from(1));
        assert!(tutte_to_jones(&stray, 0).is_err());
    }

    #[test]
    fn oracle_equivalence_small_families() {
        for s in ["(1^3)", "(i,1,1)", "(i,1^2)(1^2)", "(i,1) 1", "1 i 1"] {
            let e = parse_conway(s).unwrap();
            let g = reduce_graph(&graph_from_conway(&e).unwrap());
            let t = relative_tutte(&g);
            let d = crate::diagram::VirtualDiagram::from_conway(&e);
            let img = tutte_to_jones(&t, d.writhe()).unwrap();
            let oracle = d.kauffman_bracket().unwrap();
            assert_eq!(img.bracket, oracle, "family member {s}");
        }
    }
}
