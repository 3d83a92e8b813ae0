//! Virtual link diagrams, the Kauffman bracket state sum (the system's
//! ground-truth oracle), Jones polynomials, and diagram moves.
//!
//! A diagram is a 4-regular port graph: each crossing has four ports in the
//! local frame NW(0), NE(1), SE(2), SW(3); a strand entering a port exits at
//! the opposite port. Arcs pair up ports. Zero-crossing components are kept
//! in a free-loop counter. Planarity is never used: a virtual diagram is an
//! abstract Gauss code and virtual crossings are transparent to loop
//! counting.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::conway::ConwayExpr;
use crate::error::{Error, Result};
use crate::laurent::{jones_map, LaurentPolynomial, Variable};

/// Default cap on the number of classical crossings in a state sum.
pub const DEFAULT_STATE_LIMIT: usize = 24;

/// Tangle composition conventions, fixed by the calibration contract:
/// "3" closes to a one-component 3-crossing diagram, "2" to a two-component
/// link, "2 2" to a 4-crossing knot with t <-> 1/t symmetric Jones, and the
/// graph engine triangulation pins the chirality. See README. The quarter
/// turn used in products must be the reflected turn (tangle inversion,
/// F -> 1/F): an unreflected turn leaves rational tangles unchanged up to
/// half-turn symmetry and would close "2 2" to a trefoil.
const POS_OVER_NWSE: bool = false;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingKind {
    /// Classical crossing; `over_nwse` tells which diagonal strand is over.
    Classical { over_nwse: bool },
    Virtual,
}

impl CrossingKind {
    pub fn is_classical(&self) -> bool {
        matches!(self, CrossingKind::Classical { .. })
    }
}

/// A port of a crossing: slot 0=NW, 1=NE, 2=SE, 3=SW; the strand through a
/// crossing connects each slot to `slot ^ 2`.
pub type Port = (usize, u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum End {
    Port(usize, u8),
    Bnd(u32),
}

/// A 4-ended tangle under construction. Boundary endpoints are NW=0, NE=1,
/// SE=2, SW=3, carried as `Bnd` markers in the arc list.
#[derive(Debug, Clone)]
pub struct Tangle {
    crossings: Vec<CrossingKind>,
    arcs: Vec<(End, End)>,
    /// Markers of the four boundary endpoints, NW, NE, SE, SW.
    boundary: [u32; 4],
    next_marker: u32,
    free_loops: usize,
}

impl Tangle {
    fn with_boundary() -> Tangle {
        Tangle {
            crossings: Vec::new(),
            arcs: Vec::new(),
            boundary: [0, 1, 2, 3],
            next_marker: 4,
            free_loops: 0,
        }
    }

    /// The `n`-twist horizontal tangle (|n| crossings, sign of n), `n != 0`.
    fn integer(n: i32) -> Tangle {
        let mut t = Tangle::with_boundary();
        let count = n.unsigned_abs() as usize;
        let over_nwse = if n > 0 { POS_OVER_NWSE } else { !POS_OVER_NWSE };
        for c in 0..count {
            t.crossings.push(CrossingKind::Classical { over_nwse });
            if c > 0 {
                t.arcs.push((End::Port(c - 1, 1), End::Port(c, 0)));
                t.arcs.push((End::Port(c - 1, 2), End::Port(c, 3)));
            }
        }
        t.arcs.push((End::Bnd(0), End::Port(0, 0)));
        t.arcs.push((End::Bnd(3), End::Port(0, 3)));
        t.arcs.push((End::Bnd(1), End::Port(count - 1, 1)));
        t.arcs.push((End::Bnd(2), End::Port(count - 1, 2)));
        t
    }

    /// Single virtual crossing tangle.
    fn virtual_one() -> Tangle {
        let mut t = Tangle::with_boundary();
        t.crossings.push(CrossingKind::Virtual);
        t.arcs.push((End::Bnd(0), End::Port(0, 0)));
        t.arcs.push((End::Bnd(1), End::Port(0, 1)));
        t.arcs.push((End::Bnd(2), End::Port(0, 2)));
        t.arcs.push((End::Bnd(3), End::Port(0, 3)));
        t
    }

    /// The 0-tangle: two horizontal strands, no crossings.
    fn zero() -> Tangle {
        let mut t = Tangle::with_boundary();
        t.arcs.push((End::Bnd(0), End::Bnd(1)));
        t.arcs.push((End::Bnd(3), End::Bnd(2)));
        t
    }

    /// Reflected quarter turn (tangle inversion): reflect in the NW-SE
    /// diagonal. Port slots NE and SW swap at every crossing and on the
    /// boundary; over/under is untouched by a reflection.
    fn turn(mut self) -> Tangle {
        let sigma = |e: End| match e {
            End::Port(c, 1) => End::Port(c, 3),
            End::Port(c, 3) => End::Port(c, 1),
            other => other,
        };
        for arc in &mut self.arcs {
            arc.0 = sigma(arc.0);
            arc.1 = sigma(arc.1);
        }
        let b = self.boundary;
        self.boundary = [b[0], b[3], b[2], b[1]];
        self
    }

    fn offset_end(e: End, crossing_offset: usize, marker_offset: u32) -> End {
        match e {
            End::Port(c, s) => End::Port(c + crossing_offset, s),
            End::Bnd(m) => End::Bnd(m + marker_offset),
        }
    }

    /// Horizontal sum: `self` on the left, `rhs` on the right; join
    /// NE(self)-NW(rhs) and SE(self)-SW(rhs).
    fn hsum(mut self, rhs: Tangle) -> Tangle {
        let co = self.crossings.len();
        let mo = self.next_marker;
        self.crossings.extend(rhs.crossings.iter().copied());
        for (a, b) in &rhs.arcs {
            self.arcs
                .push((Self::offset_end(*a, co, mo), Self::offset_end(*b, co, mo)));
        }
        let rb = [
            rhs.boundary[0] + mo,
            rhs.boundary[1] + mo,
            rhs.boundary[2] + mo,
            rhs.boundary[3] + mo,
        ];
        self.next_marker += rhs.next_marker;
        self.free_loops += rhs.free_loops;
        self.connect(End::Bnd(self.boundary[1]), End::Bnd(rb[0]));
        self.connect(End::Bnd(self.boundary[2]), End::Bnd(rb[3]));
        self.boundary = [self.boundary[0], rb[1], rb[2], self.boundary[3]];
        self
    }

    /// Splice the two arcs incident to the endpoint markers `e1`, `e2`.
    fn connect(&mut self, e1: End, e2: End) {
        // The arc that directly joins e1 and e2 closes into a free loop.
        if let Some(i) = self
            .arcs
            .iter()
            .position(|(a, b)| (*a == e1 && *b == e2) || (*a == e2 && *b == e1))
        {
            self.arcs.swap_remove(i);
            self.free_loops += 1;
            return;
        }
        let i1 = self
            .arcs
            .iter()
            .position(|(a, b)| *a == e1 || *b == e1)
            .expect("dangling endpoint");
        let (a1, b1) = self.arcs.swap_remove(i1);
        let other1 = if a1 == e1 { b1 } else { a1 };
        let i2 = self
            .arcs
            .iter()
            .position(|(a, b)| *a == e2 || *b == e2)
            .expect("dangling endpoint");
        let (a2, b2) = self.arcs.swap_remove(i2);
        let other2 = if a2 == e2 { b2 } else { a2 };
        if other1 == other2 {
            // Both arcs ran between e1/e2 and the same third marker: this
            // can only be another pair of endpoint markers forming a loop.
            self.free_loops += 1;
            return;
        }
        self.arcs.push((other1, other2));
    }

    /// Numerator closure: NW-NE and SW-SE arcs.
    fn close(mut self) -> VirtualDiagram {
        let b = self.boundary;
        self.connect(End::Bnd(b[0]), End::Bnd(b[1]));
        self.connect(End::Bnd(b[3]), End::Bnd(b[2]));
        let arcs = self
            .arcs
            .iter()
            .map(|(a, b)| match (a, b) {
                (End::Port(c1, s1), End::Port(c2, s2)) => ((*c1, *s1), (*c2, *s2)),
                _ => unreachable!("boundary marker survived closure"),
            })
            .collect();
        let mut d = VirtualDiagram {
            crossings: self.crossings,
            arcs,
            free_loops: self.free_loops,
        };
        d.normalize_arcs();
        d
    }
}

fn assemble(e: &ConwayExpr) -> Tangle {
    match e {
        ConwayExpr::Integer(0) => Tangle::zero(),
        ConwayExpr::Integer(n) => Tangle::integer(*n),
        ConwayExpr::Virtual => Tangle::virtual_one(),
        ConwayExpr::Product(factors) => {
            let mut acc = assemble(&factors[0]);
            for f in &factors[1..] {
                acc = acc.turn().hsum(assemble(f));
            }
            acc
        }
        ConwayExpr::Ramification(parts) => {
            let mut acc = assemble(&parts[0]).turn();
            for p in &parts[1..] {
                acc = acc.hsum(assemble(p).turn());
            }
            acc
        }
    }
}

/// Smoothing choice at a classical crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    A,
    B,
}

/// A full smoothing state over the classical crossings of a diagram.
#[derive(Debug, Clone, Default)]
pub struct SmoothingState {
    pub choice: HashMap<usize, Smoothing>,
}

impl SmoothingState {
    pub fn counts(&self) -> (usize, usize) {
        let a = self
            .choice
            .values()
            .filter(|s| **s == Smoothing::A)
            .count();
        (a, self.choice.len() - a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualDiagram {
    crossings: Vec<CrossingKind>,
    arcs: Vec<(Port, Port)>,
    free_loops: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DiagramStats {
    pub components: usize,
    pub writhe: i64,
    pub classical_count: usize,
    pub virtual_count: usize,
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }
    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let p = self.parent[i as usize];
            self.parent[i as usize] = self.parent[p as usize];
            i = p;
        }
        i
    }
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra as usize] = rb;
        }
    }
}

/// Smoothing port pairings: `H` joins NW-NE and SW-SE, `V` joins NW-SW and
/// NE-SE. For an over strand on the NW-SE diagonal, the A-smoothing opens
/// the channels swept by rotating the over strand counterclockwise, which
/// is the vertical pairing.
pub(crate) fn smoothing_pairs(over_nwse: bool, s: Smoothing) -> [(u8, u8); 2] {
    const H: [(u8, u8); 2] = [(0, 1), (3, 2)];
    const V: [(u8, u8); 2] = [(0, 3), (1, 2)];
    match (over_nwse, s) {
        (true, Smoothing::A) | (false, Smoothing::B) => V,
        (true, Smoothing::B) | (false, Smoothing::A) => H,
    }
}

fn slot_pos(s: u8) -> (i32, i32) {
    match s {
        0 => (-1, 1),
        1 => (1, 1),
        2 => (1, -1),
        _ => (-1, -1),
    }
}

impl VirtualDiagram {
    /// Build the diagram of an extended Conway expression by tangle
    /// assembly with numerator closure.
    pub fn from_conway(e: &ConwayExpr) -> VirtualDiagram {
        if matches!(e, ConwayExpr::Integer(0)) {
            // The 0 expression is the unknot by convention.
            return VirtualDiagram {
                crossings: Vec::new(),
                arcs: Vec::new(),
                free_loops: 1,
            };
        }
        assemble(e).close()
    }

    pub fn parse(text: &str) -> Result<VirtualDiagram> {
        Ok(Self::from_conway(&crate::conway::parse_conway(text)?))
    }

    fn normalize_arcs(&mut self) {
        for arc in &mut self.arcs {
            if arc.1 < arc.0 {
                std::mem::swap(&mut arc.0, &mut arc.1);
            }
        }
        self.arcs.sort();
    }

    pub fn classical_ids(&self) -> Vec<usize> {
        (0..self.crossings.len())
            .filter(|&i| self.crossings[i].is_classical())
            .collect()
    }

    pub fn classical_count(&self) -> usize {
        self.classical_ids().len()
    }

    pub fn virtual_count(&self) -> usize {
        self.crossings.len() - self.classical_count()
    }

    pub fn arcs(&self) -> &[(Port, Port)] {
        &self.arcs
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    fn arc_map(&self) -> HashMap<Port, Port> {
        let mut m = HashMap::new();
        for (a, b) in &self.arcs {
            m.insert(*a, *b);
            m.insert(*b, *a);
        }
        m
    }

    /// Traverse all components. Returns, per component, the sequence of
    /// (crossing, entry slot) passages; free loops are not included.
    pub fn traverse(&self) -> Vec<Vec<(usize, u8)>> {
        let arc_map = self.arc_map();
        let mut seen = vec![false; self.crossings.len() * 4];
        let mut components = Vec::new();
        for c0 in 0..self.crossings.len() {
            for s0 in 0..4u8 {
                let idx = c0 * 4 + s0 as usize;
                if seen[idx] {
                    continue;
                }
                let mut comp = Vec::new();
                let (mut c, mut s) = (c0, s0);
                loop {
                    // passage through (c, s) -> (c, s^2)
                    seen[c * 4 + s as usize] = true;
                    seen[c * 4 + (s ^ 2) as usize] = true;
                    comp.push((c, s));
                    let exit = (c, s ^ 2);
                    let (nc, ns) = *arc_map.get(&exit).expect("open strand in closed diagram");
                    c = nc;
                    s = ns;
                    if c == c0 && (s == s0 || s == (s0 ^ 2)) && seen[c * 4 + s as usize] {
                        if s == s0 {
                            break;
                        }
                        // Re-entering the start passage from the other side
                        // cannot happen on a closed traversal.
                        break;
                    }
                    if seen[c * 4 + s as usize] {
                        break;
                    }
                }
                components.push(comp);
            }
        }
        components
    }

    pub fn components(&self) -> usize {
        self.traverse().len() + self.free_loops
    }

    /// Signs of the classical crossings under the traversal orientation.
    pub fn crossing_signs(&self) -> HashMap<usize, i64> {
        let mut entry_slots: HashMap<usize, Vec<u8>> = HashMap::new();
        for comp in self.traverse() {
            for (c, s) in comp {
                entry_slots.entry(c).or_default().push(s);
            }
        }
        let mut signs = HashMap::new();
        for (c, kind) in self.crossings.iter().enumerate() {
            let CrossingKind::Classical { over_nwse } = kind else {
                continue;
            };
            let slots = &entry_slots[&c];
            debug_assert_eq!(slots.len(), 2);
            let dir = |s: u8| {
                let (x1, y1) = slot_pos(s);
                let (x2, y2) = slot_pos(s ^ 2);
                (x2 - x1, y2 - y1)
            };
            let on_nwse = |s: u8| s == 0 || s == 2;
            let (over_entry, under_entry) = if on_nwse(slots[0]) == *over_nwse {
                (slots[0], slots[1])
            } else {
                (slots[1], slots[0])
            };
            let (ox, oy) = dir(over_entry);
            let (ux, uy) = dir(under_entry);
            // positive when rotating the over direction 90 degrees CW
            // yields the under direction
            let rot = (oy, -ox);
            signs.insert(c, if rot == (ux, uy) { 1 } else { -1 });
        }
        signs
    }

    pub fn writhe(&self) -> i64 {
        self.crossing_signs().values().sum()
    }

    pub fn stats(&self) -> DiagramStats {
        DiagramStats {
            components: self.components(),
            writhe: self.writhe(),
            classical_count: self.classical_count(),
            virtual_count: self.virtual_count(),
        }
    }

    pub fn mirror(&self) -> VirtualDiagram {
        let mut d = self.clone();
        for c in &mut d.crossings {
            if let CrossingKind::Classical { over_nwse } = c {
                *over_nwse = !*over_nwse;
            }
        }
        d
    }

    /// Loop count of a complete smoothing state; virtual crossings are
    /// transparent.
    pub fn state_loops(&self, state: &SmoothingState) -> Result<usize> {
        let mut pairings: Vec<[(u8, u8); 2]> = Vec::with_capacity(self.crossings.len());
        for (c, kind) in self.crossings.iter().enumerate() {
            match kind {
                CrossingKind::Virtual => pairings.push([(0, 2), (1, 3)]),
                CrossingKind::Classical { over_nwse } => {
                    let s = state
                        .choice
                        .get(&c)
                        .copied()
                        .ok_or(Error::IncompleteState { id: c })?;
                    pairings.push(smoothing_pairs(*over_nwse, s));
                }
            }
        }
        Ok(self.count_loops(&pairings))
    }

    fn count_loops(&self, pairings: &[[(u8, u8); 2]]) -> usize {
        let n = self.crossings.len();
        if n == 0 {
            return self.free_loops;
        }
        let mut uf = UnionFind::new(n * 4);
        for ((c1, s1), (c2, s2)) in &self.arcs {
            uf.union((*c1 * 4 + *s1 as usize) as u32, (*c2 * 4 + *s2 as usize) as u32);
        }
        for (c, pairs) in pairings.iter().enumerate() {
            for (a, b) in pairs {
                uf.union((c * 4 + *a as usize) as u32, (c * 4 + *b as usize) as u32);
            }
        }
        let mut roots = std::collections::HashSet::new();
        for i in 0..(n * 4) as u32 {
            roots.insert(uf.find(i));
        }
        roots.len() + self.free_loops
    }

    pub fn kauffman_bracket(&self) -> Result<LaurentPolynomial> {
        self.kauffman_bracket_with_limit(DEFAULT_STATE_LIMIT)
    }

    /// The state sum over all 2^n smoothings:
    /// `<d> = sum A^(a-b) (-A^2 - A^-2)^(loops - 1)`.
    pub fn kauffman_bracket_with_limit(&self, limit: usize) -> Result<LaurentPolynomial> {
        let classical = self.classical_ids();
        let n = classical.len();
        if n > limit {
            return Err(Error::StateSumTooLarge {
                crossings: n,
                limit,
            });
        }
        // Histogram over (a - b, loops); merging histograms is associative,
        // so worker partitioning cannot change the result.
        let total: u64 = 1u64 << n;
        let chunk = 1u64 << n.saturating_sub(6).min(16);
        let ranges: Vec<(u64, u64)> = (0..total)
            .step_by(chunk.max(1) as usize)
            .map(|lo| (lo, (lo + chunk.max(1)).min(total)))
            .collect();
        let hists: Vec<HashMap<(i64, usize), u64>> = ranges
            .par_iter()
            .map(|(lo, hi)| {
                let mut hist: HashMap<(i64, usize), u64> = HashMap::new();
                let mut pairings: Vec<[(u8, u8); 2]> = self
                    .crossings
                    .iter()
                    .map(|k| match k {
                        CrossingKind::Virtual => [(0, 2), (1, 3)],
                        CrossingKind::Classical { .. } => [(0, 0); 2],
                    })
                    .collect();
                for mask in *lo..*hi {
                    let mut a_minus_b: i64 = 0;
                    for (bit, &c) in classical.iter().enumerate() {
                        let CrossingKind::Classical { over_nwse } = self.crossings[c] else {
                            unreachable!()
                        };
                        let s = if mask >> bit & 1 == 0 {
                            a_minus_b += 1;
                            Smoothing::A
                        } else {
                            a_minus_b -= 1;
                            Smoothing::B
                        };
                        pairings[c] = smoothing_pairs(over_nwse, s);
                    }
                    let loops = self.count_loops(&pairings);
                    *hist.entry((a_minus_b, loops)).or_insert(0) += 1;
                }
                hist
            })
            .collect();
        let mut hist: HashMap<(i64, usize), u64> = HashMap::new();
        for h in hists {
            for (k, v) in h {
                *hist.entry(k).or_insert(0) += v;
            }
        }

        let d_poly = &LaurentPolynomial::monomial(Variable::A, 2, -1)
            + &LaurentPolynomial::monomial(Variable::A, -2, -1);
        let max_loops = hist.keys().map(|(_, l)| *l).max().unwrap_or(1);
        let mut d_pows = Vec::with_capacity(max_loops);
        d_pows.push(LaurentPolynomial::one());
        for i in 1..max_loops {
            let prev = &d_pows[i - 1];
            d_pows.push(prev * &d_poly);
        }
        let mut keys: Vec<_> = hist.keys().copied().collect();
        keys.sort();
        let mut bracket = LaurentPolynomial::zero();
        for (aexp, loops) in keys {
            let count = hist[&(aexp, loops)];
            let term = LaurentPolynomial::from_term(
                crate::laurent::Monomial::var(Variable::A, aexp as i32),
                BigInt::from(count),
            );
            bracket = &bracket + &(&term * &d_pows[loops - 1]);
        }
        Ok(bracket)
    }

    pub fn jones(&self) -> Result<LaurentPolynomial> {
        self.jones_with(DEFAULT_STATE_LIMIT, true)
    }

    /// Jones polynomial in quarter-unit t exponents. With `normalize`, the
    /// bracket is first multiplied by the writhe unit `(-A^3)^(-w)`.
    pub fn jones_with(&self, limit: usize, normalize: bool) -> Result<LaurentPolynomial> {
        let bracket = self.kauffman_bracket_with_limit(limit)?;
        let adjusted = if normalize {
            let w = self.writhe();
            let sign = if w % 2 == 0 { 1 } else { -1 };
            let unit =
                LaurentPolynomial::monomial(Variable::A, (-3 * w) as i32, sign);
            &bracket * &unit
        } else {
            bracket
        };
        adjusted.substitute(&jones_map())
    }

    /// Replace classical crossing `c` by a sign-switched crossing flanked
    /// by two virtual crossings (the virtualization / Z-move).
    pub fn virtualize(&self, c: usize) -> Result<VirtualDiagram> {
        let Some(CrossingKind::Classical { over_nwse }) = self.crossings.get(c).copied() else {
            return Err(Error::NoSuchClassicalCrossing { id: c });
        };
        let mut d = self.clone();
        d.crossings[c] = CrossingKind::Classical {
            over_nwse: !over_nwse,
        };
        let v1 = d.crossings.len();
        d.crossings.push(CrossingKind::Virtual);
        let v2 = d.crossings.len();
        d.crossings.push(CrossingKind::Virtual);
        // Detour one strand across the other's NW and SE legs: with the
        // switched sign, the two smoothings trade connectivity exactly
        // against the traded weights, so the bracket is unchanged.
        for arc in &mut d.arcs {
            for end in [&mut arc.0, &mut arc.1] {
                if end.0 == c {
                    *end = match end.1 {
                        0 => (v1, 0),
                        3 => (v1, 3),
                        1 => (v2, 1),
                        _ => (v2, 2),
                    };
                }
            }
        }
        d.arcs.push(((v1, 2), (c, 0)));
        d.arcs.push(((v1, 1), (c, 1)));
        d.arcs.push(((c, 2), (v2, 0)));
        d.arcs.push(((c, 3), (v2, 3)));
        d.normalize_arcs();
        Ok(d)
    }

    /// Insert a Reidemeister-I kink on arc `arc_idx`.
    pub fn insert_kink(&self, arc_idx: usize, over_nwse: bool) -> VirtualDiagram {
        let mut d = self.clone();
        let (p, q) = d.arcs.remove(arc_idx % d.arcs.len().max(1));
        let k = d.crossings.len();
        d.crossings.push(CrossingKind::Classical { over_nwse });
        d.arcs.push((p, (k, 0)));
        d.arcs.push(((k, 2), (k, 1)));
        d.arcs.push(((k, 3), q));
        d.normalize_arcs();
        d
    }

    /// Insert a Reidemeister-II "fold" on a single arc: the strand pokes
    /// through itself with two cancelling crossings. With `virtual_pair`
    /// the two inserted crossings are virtual.
    pub fn insert_r2_fold(&self, arc_idx: usize, virtual_pair: bool) -> VirtualDiagram {
        let mut d = self.clone();
        if d.arcs.is_empty() {
            // Fold on a free loop: lift one loop into a two-crossing curl.
            debug_assert!(d.free_loops > 0);
            d.free_loops -= 1;
            let (a, b) = (d.crossings.len(), d.crossings.len() + 1);
            d.crossings.extend(Self::r2_kinds(virtual_pair));
            d.arcs.push(((a, 0), (a, 3)));
            d.arcs.push(((a, 2), (b, 3)));
            d.arcs.push(((b, 1), (b, 2)));
            d.arcs.push(((b, 0), (a, 1)));
            d.normalize_arcs();
            return d;
        }
        let (p, q) = d.arcs.remove(arc_idx % d.arcs.len());
        let (a, b) = (d.crossings.len(), d.crossings.len() + 1);
        d.crossings.extend(Self::r2_kinds(virtual_pair));
        d.arcs.push((p, (a, 0)));
        d.arcs.push(((a, 2), (b, 3)));
        d.arcs.push(((b, 1), (b, 2)));
        d.arcs.push(((b, 0), (a, 1)));
        d.arcs.push(((a, 3), q));
        d.normalize_arcs();
        d
    }

    fn r2_kinds(virtual_pair: bool) -> [CrossingKind; 2] {
        if virtual_pair {
            [CrossingKind::Virtual, CrossingKind::Virtual]
        } else {
            [
                CrossingKind::Classical { over_nwse: true },
                CrossingKind::Classical { over_nwse: false },
            ]
        }
    }

    /// Insert two adjacent virtual crossings in the middle of an arc
    /// crossing another arc (a virtual R2 between two strands).
    pub fn insert_virtual_r2_pair(&self, arc1: usize, arc2: usize) -> VirtualDiagram {
        let mut d = self.clone();
        if d.arcs.len() < 2 || arc1 % d.arcs.len() == arc2 % d.arcs.len() {
            return d.insert_r2_fold(arc1, true);
        }
        let n = d.arcs.len();
        let (i, j) = (arc1 % n, arc2 % n);
        let (hi, lo) = (i.max(j), i.min(j));
        let (p1, q1) = d.arcs.remove(hi);
        let (p2, q2) = d.arcs.remove(lo);
        let (a, b) = (d.crossings.len(), d.crossings.len() + 1);
        d.crossings
            .extend([CrossingKind::Virtual, CrossingKind::Virtual]);
        d.arcs.push((p1, (a, 0)));
        d.arcs.push(((a, 2), (b, 3)));
        d.arcs.push(((b, 1), q1));
        d.arcs.push((p2, (a, 3)));
        d.arcs.push(((a, 1), (b, 0)));
        d.arcs.push(((b, 2), q2));
        d.normalize_arcs();
        d
    }

    /// Gauss-code-style listing for a single-component diagram: the
    /// sequence of classical crossings with over/under marks.
    pub fn gauss_sequence(&self) -> Result<Vec<(usize, bool)>> {
        let comps = self.traverse();
        if comps.len() != 1 || self.free_loops > 0 {
            return Err(Error::ParityKnotsOnly);
        }
        let mut seq = Vec::new();
        for (c, s) in &comps[0] {
            match self.crossings[*c] {
                CrossingKind::Virtual => {}
                CrossingKind::Classical { over_nwse } => {
                    let on_nwse = *s == 0 || *s == 2;
                    seq.push((*c, on_nwse == over_nwse));
                }
            }
        }
        Ok(seq)
    }

    pub fn crossings(&self) -> &[CrossingKind] {
        &self.crossings
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(s: &str) -> VirtualDiagram {
        VirtualDiagram::parse(s).unwrap()
    }

    #[test]
    fn calibration_contract_component_counts() {
        let d3 = diagram("3");
        assert_eq!(d3.classical_count(), 3);
        assert_eq!(d3.virtual_count(), 0);
        assert_eq!(d3.components(), 1, "3 closes to a knot");

        let d2 = diagram("2");
        assert_eq!(d2.components(), 2, "2 closes to a 2-component link");

        let d22 = diagram("2 2");
        assert_eq!(d22.classical_count(), 4);
        assert_eq!(d22.components(), 1, "2 2 closes to a knot");
    }

    #[test]
    fn virtual_trefoil_counts() {
        let d = diagram("(i,1,1)");
        assert_eq!(d.classical_count(), 2);
        assert_eq!(d.virtual_count(), 1);
        assert_eq!(d.components(), 1);
    }

    #[test]
    fn torus_family_components() {
        for p in 1..=8 {
            let s = format!("1^{p}");
            let d = diagram(&s);
            assert_eq!(d.classical_count(), p);
            let expect = if p % 2 == 0 { 2 } else { 1 };
            assert_eq!(d.components(), expect, "1^{p}");
        }
    }

    #[test]
    fn unknot_bracket() {
        let d = diagram("0");
        assert_eq!(d.kauffman_bracket().unwrap(), LaurentPolynomial::one());
        assert_eq!(d.jones().unwrap(), LaurentPolynomial::one());
    }

    #[test]
    fn hopf_bracket() {
        let d = diagram("2");
        let b = d.kauffman_bracket().unwrap();
        // -A^4 - A^-4 up to mirror
        let expect = &LaurentPolynomial::monomial(Variable::A, 4, -1)
            + &LaurentPolynomial::monomial(Variable::A, -4, -1);
        assert_eq!(b, expect);
    }

    #[test]
    fn mirror_involution() {
        let d = diagram("(i,1,1)");
        assert_eq!(d.mirror().mirror(), d);
    }

    #[test]
    fn virtualize_unknot_errors() {
        let d = diagram("0");
        assert!(d.virtualize(0).is_err());
    }
}
