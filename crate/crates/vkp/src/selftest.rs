//! End-to-end checks driven by `vkp selftest` and the acceptance tests.
//!
//! Each item returns a pass/fail verdict with a short report; items never
//! panic, so one failure does not hide the others.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;

use crate::conway::parse_conway;
use crate::diagram::VirtualDiagram;
use crate::families::{
    candidate_knots, compare_forms, eval_ipq_printed, eval_piq, family_diagram_text, family_eval,
    FamilyId,
};
use crate::laurent::{LaurentPolynomial, Monomial, Variable};
use crate::parity::{gauss_parity, nontriviality_certificate, parity_bracket, Certificate, Parity};
use crate::portrait::{jones_roots, portrait_grid, to_csv};
use crate::tuttegraph::{graph_from_conway, reduce_graph, relative_tutte, tutte_to_jones};

#[derive(Debug, Clone)]
pub struct Item {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl Item {
    fn new(name: &'static str) -> Item {
        Item {
            name,
            passed: true,
            details: String::new(),
        }
    }

    fn fail(&mut self, msg: &str) {
        self.passed = false;
        if !self.details.is_empty() {
            self.details.push_str("; ");
        }
        self.details.push_str(msg);
    }

    fn note(&mut self, msg: &str) {
        if !self.details.is_empty() {
            self.details.push_str("; ");
        }
        self.details.push_str(msg);
    }
}

/// Run every item; `quick` trims the crossing bounds and grid sizes.
pub fn run(quick: bool) -> Vec<Item> {
    vec![
        golden_formulas(),
        recursion_vs_closed(),
        oracle_triangulation(if quick { 14 } else { 20 }),
        unit_jones(),
        torus_coincidence(),
        move_invariance(if quick { 25 } else { 100 }),
        parity_certificates(),
        portraits(quick),
        determinism(),
    ]
}

fn term(c: i64, exps: &[(Variable, i32)]) -> LaurentPolynomial {
    let mut m = Monomial::default();
    for &(v, e) in exps {
        m.0[v as usize] += e;
    }
    LaurentPolynomial::from_term(m, BigInt::from(c))
}

fn sum(ts: &[LaurentPolynomial]) -> LaurentPolynomial {
    ts.iter().fold(LaurentPolynomial::zero(), |a, b| &a + b)
}

use Variable::{X0 as x, X1 as xx, Y0 as y, Y1 as yy};

pub fn golden_formulas() -> Item {
    let mut item = Item::new("golden formulas");
    let mut check = |label: &str, got: crate::error::Result<LaurentPolynomial>, want: LaurentPolynomial| match got {
        Ok(got) if got == want => {}
        Ok(got) => item.fail(&format!("{label}: got {got}, want {want}")),
        Err(e) => item.fail(&format!("{label}: {e}")),
    };

    check(
        "(1^2)",
        family_eval(FamilyId::P, &[2]),
        sum(&[term(1, &[(y, 1), (xx, 1)]), term(1, &[(x, 1), (yy, 1)])]),
    );
    check(
        "(i,1)",
        family_eval(FamilyId::Ip, &[1]),
        sum(&[term(1, &[(x, 1)]), term(1, &[(y, 1)])]),
    );
    check(
        "(i,1^2)",
        family_eval(FamilyId::Ip, &[2]),
        sum(&[
            term(1, &[(x, 2)]),
            term(1, &[(x, 1), (y, 1)]),
            term(1, &[(xx, 1), (y, 1)]),
        ]),
    );
    check(
        "(i,(-1)^2)",
        family_eval(FamilyId::Ip, &[-2]),
        sum(&[
            term(1, &[(x, -2)]),
            term(-1, &[(y, 1), (x, -1), (xx, -2)]),
            term(-1, &[(y, 1), (x, -2), (xx, -1)]),
        ]),
    );
    check(
        "(i,1)(1)",
        family_eval(FamilyId::IpQ, &[1, 1]),
        sum(&[
            term(1, &[(x, 1), (y, 1)]),
            term(1, &[(x, 2), (y, 1)]),
            term(1, &[(x, 3)]),
        ]),
    );
    check("(1^4) i ((-1)^3)", eval_piq(4, -3), printed_4_m3());
    check("((-1)^4) i (1^3)", eval_piq(-4, 3), printed_m4_3());
    item
}

// The two published two-parameter Laurent polynomials, transcribed verbatim.
fn printed_4_m3() -> LaurentPolynomial {
    sum(&[
        term(-1, &[(x, 3), (y, 1), (xx, -3)]),
        term(-1, &[(x, 2), (y, 1), (xx, -2)]),
        term(-1, &[(x, 1), (y, 1), (xx, -1)]),
        term(1, &[(xx, 1), (y, 1), (x, -1)]),
        term(1, &[(xx, 2), (y, 1), (x, -2)]),
        term(1, &[(xx, 3), (y, 1), (x, -3)]),
        term(-3, &[(y, 2), (x, -1)]),
        term(-1, &[(x, 2), (y, 2), (xx, -3)]),
        term(-2, &[(x, 1), (y, 2), (xx, -2)]),
        term(-3, &[(y, 2), (xx, -1)]),
        term(-2, &[(xx, 1), (y, 2), (x, -2)]),
        term(-1, &[(xx, 2), (y, 2), (x, -3)]),
        term(1, &[(yy, 1)]),
    ])
}

fn printed_m4_3() -> LaurentPolynomial {
    sum(&[
        term(1, &[(x, 2), (y, 1), (xx, -4)]),
        term(-1, &[(x, 1), (y, 1), (xx, -3)]),
        term(-1, &[(y, 1), (xx, -2)]),
        term(-1, &[(y, 1), (x, -1), (xx, -1)]),
        term(1, &[(xx, 1), (y, 1), (x, -3)]),
        term(1, &[(xx, 2), (y, 1), (x, -4)]),
        term(-2, &[(y, 2), (x, -3)]),
        term(-1, &[(x, 1), (y, 2), (xx, -4)]),
        term(-2, &[(y, 2), (xx, -3)]),
        term(-3, &[(y, 2), (x, -1), (xx, -2)]),
        term(-3, &[(y, 2), (x, -2), (xx, -1)]),
        term(-1, &[(xx, 1), (y, 2), (x, -4)]),
        term(1, &[(yy, 1), (x, -2)]),
    ])
}

pub fn recursion_vs_closed() -> Item {
    let mut item = Item::new("recursion vs closed form");
    let one_param = [FamilyId::P, FamilyId::Ip];
    let two_param = [FamilyId::Ip1Q, FamilyId::Ip1Iq, FamilyId::PIQ];
    for id in one_param {
        for p in 1..=8 {
            match compare_forms(id, &[p]) {
                Ok(c) if c.matches() => {}
                Ok(_) => item.fail(&format!("{} p={p}: closed != recursive", id.name())),
                Err(e) => item.fail(&format!("{} p={p}: {e}", id.name())),
            }
        }
    }
    for id in two_param {
        for p in 1..=8 {
            for q in 1..=8 {
                match compare_forms(id, &[p, q]) {
                    Ok(c) if c.matches() => {}
                    Ok(_) => item.fail(&format!("{} p={p} q={q}: closed != recursive", id.name())),
                    Err(e) => item.fail(&format!("{} p={p} q={q}: {e}", id.name())),
                }
            }
        }
    }
    // the published ip_q recursion (kept verbatim in the recursive form,
    // printed base value included) contradicts both its own one-line
    // closed form and the state-sum oracle; the corrected closed form is
    // the one that matches the oracle, so the mismatch is reported rather
    // than asserted away
    let mut rec_mismatch = 0;
    let mut printed_mismatch = 0;
    let mut closed_vs_engine_bad = 0;
    for p in 1..=8 {
        for q in 1..=8 {
            if let Ok(c) = compare_forms(FamilyId::IpQ, &[p, q]) {
                if !c.matches() {
                    rec_mismatch += 1;
                }
            }
            if let (Ok(printed), Ok(closed)) =
                (eval_ipq_printed(p, q), family_eval(FamilyId::IpQ, &[p, q]))
            {
                if printed != closed {
                    printed_mismatch += 1;
                }
            }
            if p + q <= 12 {
                let engine = || -> crate::error::Result<LaurentPolynomial> {
                    let e = parse_conway(&family_diagram_text(FamilyId::IpQ, &[p, q])?)?;
                    Ok(relative_tutte(&reduce_graph(&graph_from_conway(&e)?)))
                };
                if engine().ok() != family_eval(FamilyId::IpQ, &[p, q]).ok() {
                    closed_vs_engine_bad += 1;
                }
            }
        }
    }
    if closed_vs_engine_bad > 0 {
        item.fail(&format!(
            "ip_q closed form disagrees with the graph engine on {closed_vs_engine_bad} points"
        ));
    }
    item.note(&format!(
        "ip_q published recursion disagrees with the corrected closed form on \
         {rec_mismatch}/64 points and the published one-line form on \
         {printed_mismatch}/64; the closed form matches the graph engine, \
         so it is the value under test"
    ));
    item
}

pub fn oracle_triangulation(max_crossings: i32) -> Item {
    let mut item = Item::new("oracle triangulation");
    let mut members: Vec<(FamilyId, Vec<i32>)> = Vec::new();
    for p in 1..=max_crossings {
        members.push((FamilyId::P, vec![p]));
        members.push((FamilyId::Ip, vec![p]));
    }
    for p in 1..=max_crossings {
        for q in 1..=max_crossings {
            if p + q <= max_crossings {
                members.push((FamilyId::IpQ, vec![p, q]));
                members.push((FamilyId::PIQ, vec![p, q]));
            }
            if p + q + 1 <= max_crossings {
                members.push((FamilyId::Ip1Q, vec![p, q]));
            }
        }
    }
    let mut checked = 0usize;
    for (id, params) in &members {
        let run = || -> crate::error::Result<bool> {
            let e = parse_conway(&family_diagram_text(*id, params)?)?;
            let g = reduce_graph(&graph_from_conway(&e)?);
            let d = VirtualDiagram::from_conway(&e);
            let img = tutte_to_jones(&relative_tutte(&g), d.writhe())?;
            Ok(img.bracket == d.kauffman_bracket()?)
        };
        match run() {
            Ok(true) => checked += 1,
            Ok(false) => item.fail(&format!(
                "{} {:?}: engine bracket != state sum",
                id.name(),
                params
            )),
            Err(e) => item.fail(&format!("{} {:?}: {e}", id.name(), params)),
        }
    }
    item.note(&format!(
        "{checked} members up to {max_crossings} classical crossings, \
         engine equals state sum with unit factor 1"
    ));
    item
}

fn jones_of(text: &str) -> crate::error::Result<LaurentPolynomial> {
    VirtualDiagram::parse(text)?.jones()
}

pub fn unit_jones() -> Item {
    let mut item = Item::new("unit Jones members");
    let one = LaurentPolynomial::one();
    match jones_of("1,1,i,-1,i") {
        Ok(j) if j == one => {}
        Ok(j) => item.fail(&format!("1,1,i,-1,i: jones {j}")),
        Err(e) => item.fail(&format!("1,1,i,-1,i: {e}")),
    }
    for p in 2..=6 {
        let q = p - 1;
        let run = || -> crate::error::Result<LaurentPolynomial> {
            jones_of(&family_diagram_text(FamilyId::UnitJones, &[p, q])?)
        };
        match run() {
            Ok(j) if j == one => {}
            Ok(j) => item.fail(&format!("unit_jones p={p} q={q}: jones {j}")),
            Err(e) => item.fail(&format!("unit_jones p={p} q={q}: {e}")),
        }
    }
    for k in 1..=3 {
        let run = || -> crate::error::Result<LaurentPolynomial> {
            jones_of(&family_diagram_text(FamilyId::ZFamily, &[k])?)
        };
        match run() {
            Ok(j) if j == one => {}
            Ok(j) => item.fail(&format!("zfamily k={k}: jones {j}")),
            Err(e) => item.fail(&format!("zfamily k={k}: {e}")),
        }
    }
    item
}

pub fn torus_coincidence() -> Item {
    let mut item = Item::new("torus Jones coincidence");
    for k in 1..=2i32 {
        let torus = match jones_of(&format!("1^{}", 2 * k + 1)) {
            Ok(j) => j,
            Err(e) => {
                item.fail(&format!("1^{}: {e}", 2 * k + 1));
                continue;
            }
        };
        for q in 1..=3 {
            let p = q + 2 * k + 1;
            let run = || -> crate::error::Result<LaurentPolynomial> {
                jones_of(&family_diagram_text(FamilyId::UnitJones, &[p, q])?)
            };
            match run() {
                Ok(j) if j == torus => {}
                Ok(j) => item.fail(&format!("p={p} q={q}: jones {j} != torus")),
                Err(e) => item.fail(&format!("p={p} q={q}: {e}")),
            }
        }
    }
    item
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

// Random small Conway expression with at most 8 classical crossings.
fn random_conway(rng: &mut XorShift) -> String {
    let atoms = ["1", "-1", "2", "-2", "i"];
    let atom = |rng: &mut XorShift| atoms[rng.below(atoms.len())].to_string();
    let part = |rng: &mut XorShift| {
        if rng.below(2) == 0 {
            atom(rng)
        } else {
            format!("({},{})", atom(rng), atom(rng))
        }
    };
    match rng.below(3) {
        0 => format!("({},{})", part(rng), part(rng)),
        1 => format!("{} {}", part(rng), part(rng)),
        _ => format!("({},{},{})", atom(rng), atom(rng), part(rng)),
    }
}

pub fn move_invariance(count: usize) -> Item {
    let mut item = Item::new("move invariance");
    let mut rng = XorShift(0x0dd5_eed5_1234_5678);
    let a_cubed = term(-1, &[(Variable::A, 3)]);
    let a_cubed_inv = term(-1, &[(Variable::A, -3)]);
    let mirror_map = [(
        Variable::A,
        LaurentPolynomial::monomial(Variable::A, -1, 1),
    )];
    let mut done = 0usize;
    while done < count {
        let text = random_conway(&mut rng);
        let d = match VirtualDiagram::parse(&text) {
            Ok(d) if d.classical_count() <= 8 && d.classical_count() >= 1 => d,
            _ => continue,
        };
        done += 1;
        let mut run = || -> crate::error::Result<Vec<(String, bool)>> {
            let b = d.kauffman_bracket()?;
            let arc = rng.below(d.arcs().len().max(1));
            let classical = d.classical_ids();
            let c = classical[rng.below(classical.len())];
            let mut outcomes = Vec::new();
            outcomes.push((
                "classical r2".into(),
                d.insert_r2_fold(arc, false).kauffman_bracket()? == b,
            ));
            outcomes.push((
                "virtual r2".into(),
                d.insert_r2_fold(arc, true).kauffman_bracket()? == b,
            ));
            outcomes.push(("z-move".into(), d.virtualize(c)?.kauffman_bracket()? == b));
            let kinked = d.insert_kink(arc, true).kauffman_bracket()?;
            outcomes.push((
                "r1 kink".into(),
                kinked == &b * &a_cubed || kinked == &b * &a_cubed_inv,
            ));
            outcomes.push((
                "mirror".into(),
                d.mirror().kauffman_bracket()? == b.substitute(&mirror_map)?,
            ));
            Ok(outcomes)
        };
        match run() {
            Ok(outcomes) => {
                for (which, ok) in outcomes {
                    if !ok {
                        item.fail(&format!("{text}: {which} changed the bracket"));
                    }
                }
            }
            Err(e) => item.fail(&format!("{text}: {e}")),
        }
    }
    item.note(&format!("{done} random diagrams"));
    item
}

pub fn parity_certificates() -> Item {
    let mut item = Item::new("parity certificates");
    let catalog: std::collections::HashMap<&str, &str> = candidate_knots().into_iter().collect();

    // four-crossing knot: a single irreducible 4-node term, gone once
    // per-node reflections are allowed
    let run = |item: &mut Item| -> crate::error::Result<()> {
        let kd = VirtualDiagram::parse(catalog["kishino"])?;
        let pb = parity_bracket(&kd, false)?;
        if pb.nodal_terms.len() != 1 {
            item.fail(&format!("kishino: {} nodal terms", pb.nodal_terms.len()));
        }
        if let Some((g, c)) = pb.nodal_terms.iter().next() {
            if g.node_count() != 4 {
                item.fail(&format!("kishino: surviving graph has {} nodes", g.node_count()));
            }
            if c != &LaurentPolynomial::one() {
                item.fail(&format!("kishino: term coefficient {c}"));
            }
        }
        if !parity_bracket(&kd, true)?.nodal_terms.is_empty() {
            item.fail("kishino: term survives per-node reflections");
        }

        let ks = VirtualDiagram::parse(catalog["KS"])?;
        let pb = parity_bracket(&ks, true)?;
        if pb.nodal_terms.len() != 1 {
            item.fail(&format!("KS: {} nodal terms with reflections", pb.nodal_terms.len()));
        }
        if pb.normalized_scalar() != LaurentPolynomial::monomial(Variable::A, -1, 1) {
            item.fail(&format!("KS: loop-state scalar {}", pb.normalized_scalar()));
        }
        if nontriviality_certificate(&pb) != Certificate::NonClassicalNotZEquivalent {
            item.fail("KS: wrong certificate");
        }
        if ks.jones()? != LaurentPolynomial::one() {
            item.fail(&format!("KS: jones {}", ks.jones()?));
        }

        let tref = VirtualDiagram::parse("3")?;
        let parity = gauss_parity(&tref)?;
        if parity.values().any(|p| *p == Parity::Odd) {
            item.fail("trefoil: odd crossing found");
        }
        let pb = parity_bracket(&tref, false)?;
        if !pb.nodal_terms.is_empty() {
            item.fail("trefoil: nodal terms present");
        }
        // one loop factor above the plain bracket, compared with the loop
        // variable expanded to its bracket value
        let loop_value = sum(&[term(-1, &[(Variable::A, 2)]), term(-1, &[(Variable::A, -2)])]);
        let expand = [(Variable::D, loop_value.clone())];
        if pb.scalar.substitute(&expand)? != &loop_value * &tref.kauffman_bracket()? {
            item.fail("trefoil: scalar != d * bracket");
        }
        Ok(())
    };
    if let Err(e) = run(&mut item) {
        item.fail(&format!("error: {e}"));
    }
    item
}

pub fn portraits(quick: bool) -> Item {
    let mut item = Item::new("portrait grids");
    let (p_span, q_span) = if quick { ((1, 6), (2, 6)) } else { ((1, 20), (2, 20)) };
    let t0 = Instant::now();
    let records = match portrait_grid(FamilyId::IpQ, p_span, q_span) {
        Ok(r) => r,
        Err(e) => {
            item.fail(&format!("grid: {e}"));
            return item;
        }
    };
    let elapsed = t0.elapsed();
    if elapsed.as_secs_f64() >= 60.0 {
        item.fail(&format!("grid took {elapsed:?}"));
    }
    let cells: BTreeSet<(i32, i32)> = records.iter().map(|r| (r.p, r.q)).collect();
    let want_cells = ((p_span.1 - p_span.0 + 1) * (q_span.1 - q_span.0 + 1)) as usize;
    if cells.len() != want_cells {
        item.fail(&format!("{} cells with roots, want {want_cells}", cells.len()));
    }
    let worst = records.iter().map(|r| r.residual).fold(0.0f64, f64::max);
    if worst >= 1e-8 {
        item.fail(&format!("worst residual {worst:.3e}"));
    }
    let cross_check = || -> crate::error::Result<bool> {
        let direct = jones_roots(
            &VirtualDiagram::parse("(i,1) (1 1)")?.jones_with(24, false)?,
        )?;
        let cell: Vec<&crate::portrait::PortraitRecord> = records
            .iter()
            .filter(|r| (r.p, r.q) == (1, 2))
            .collect();
        Ok(cell.len() == direct.len()
            && cell
                .iter()
                .zip(&direct)
                .all(|(r, z)| {
                    (num_complex::Complex64::new(r.root_re, r.root_im) - z).norm() < 1e-8
                }))
    };
    match cross_check() {
        Ok(true) => {}
        Ok(false) => item.fail("cell (1,2) disagrees with state-sum roots"),
        Err(e) => item.fail(&format!("cell (1,2): {e}")),
    }
    let mut note = String::new();
    let _ = write!(
        note,
        "{} records over {} cells in {:.2?}, worst residual {worst:.2e}",
        records.len(),
        cells.len(),
        elapsed
    );
    item.note(&note);
    item
}

pub fn determinism() -> Item {
    let mut item = Item::new("determinism across workers");
    let sample = |item: &mut Item| -> crate::error::Result<Vec<String>> {
        let mut out = Vec::new();
        out.push(to_csv(&portrait_grid(FamilyId::IpQ, (1, 4), (2, 5))?));
        out.push(VirtualDiagram::parse("(i,1^3) (1^4)")?.jones()?.to_string());
        let pb = parity_bracket(&VirtualDiagram::parse("(-1,1 i,-1) (i,1,i)")?, false)?;
        let mut s = format!("scalar {}", pb.scalar);
        for (g, c) in &pb.nodal_terms {
            let _ = write!(s, " | {g} * {c}");
        }
        out.push(s);
        let _ = item;
        Ok(out)
    };
    let mut runs = Vec::new();
    for workers in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        match pool.install(|| sample(&mut item)) {
            Ok(v) => runs.push((workers, v)),
            Err(e) => item.fail(&format!("workers={workers}: {e}")),
        }
    }
    for pair in runs.windows(2) {
        if pair[0].1 != pair[1].1 {
            item.fail(&format!(
                "outputs differ between workers={} and workers={}",
                pair[0].0, pair[1].0
            ));
        }
    }
    item
}
