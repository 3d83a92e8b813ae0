//! Closed-form and recursive evaluators for the named link families, their
//! Conway-expression generators, and the comparison harness between the
//! two evaluation routes.

use crate::conway::{parse_conway, ConwayExpr};
use crate::error::{Error, Result};
use crate::laurent::{geom_sum, geom_sum_in, LaurentPolynomial, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// 1^p — classical torus knots/links.
    P,
    /// (i,1^p).
    Ip,
    /// (i,1^p) (1^q).
    IpQ,
    /// (i,1^p) 1 (1^q).
    Ip1Q,
    /// (i,1^p) 1 (i,1^q).
    Ip1Iq,
    /// (1^p) i (1^q).
    PIQ,
    /// 1^p,i,(-1)^q,i — unit Jones when p - q = 1.
    UnitJones,
    /// (1^k,i,(-1)^k) i (1^k,i,(-1)^k).
    ZFamily,
    /// Fixed catalog of single knots, see `candidate_knots`.
    CandidateKnots,
}

impl FamilyId {
    pub fn parse(s: &str) -> Option<FamilyId> {
        Some(match s {
            "p" => FamilyId::P,
            "i_p" => FamilyId::Ip,
            "ip_q" => FamilyId::IpQ,
            "ip1q" => FamilyId::Ip1Q,
            "ip1iq" => FamilyId::Ip1Iq,
            "p_i_q" => FamilyId::PIQ,
            "unit_jones" => FamilyId::UnitJones,
            "zfamily" => FamilyId::ZFamily,
            "candidate_knots" => FamilyId::CandidateKnots,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::P => "p",
            FamilyId::Ip => "i_p",
            FamilyId::IpQ => "ip_q",
            FamilyId::Ip1Q => "ip1q",
            FamilyId::Ip1Iq => "ip1iq",
            FamilyId::PIQ => "p_i_q",
            FamilyId::UnitJones => "unit_jones",
            FamilyId::ZFamily => "zfamily",
            FamilyId::CandidateKnots => "candidate_knots",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            FamilyId::P | FamilyId::Ip | FamilyId::ZFamily => 1,
            FamilyId::CandidateKnots => 1,
            _ => 2,
        }
    }
}

fn var(v: Variable) -> LaurentPolynomial {
    LaurentPolynomial::monomial(v, 1, 1)
}

fn xpow(k: i32) -> LaurentPolynomial {
    LaurentPolynomial::monomial(Variable::X0, k, 1)
}

fn ypow(k: i32) -> LaurentPolynomial {
    LaurentPolynomial::monomial(Variable::Y0, k, 1)
}

/// (y^m - Y^m) / (y - Y) as a Laurent polynomial, any integer m.
fn gy(m: i32) -> LaurentPolynomial {
    geom_sum_in(Variable::Y0, Variable::Y1, m)
}

fn check_param(name: &str, v: i32) -> Result<()> {
    if v == 0 {
        return Err(Error::BadFamilyParameter {
            msg: format!("{name} must be nonzero"),
        });
    }
    Ok(())
}

/// T(G(1^p)) = gx(p) y + (Y - y) x^(p-1).
pub fn eval_p(p: i32) -> Result<LaurentPolynomial> {
    check_param("p", p)?;
    let y = var(Variable::Y0);
    let yy = var(Variable::Y1);
    Ok(&(&geom_sum(p) * &y) + &(&(&yy - &y) * &xpow(p - 1)))
}

/// T(G(i,1^p)) = x^p + gx(p) y.
pub fn eval_ip(p: i32) -> Result<LaurentPolynomial> {
    check_param("p", p)?;
    let y = var(Variable::Y0);
    Ok(&xpow(p) + &(&geom_sum(p) * &y))
}

/// Corrected closed form validated against both the graph engine and the
/// state sum (see README on the printed variant):
/// T = x^(q-1) (y^(p+1) + x gy(p+1)) + y X gx(q-1) (y^p + x gy(p)).
pub fn eval_ipq(p: i32, q: i32) -> Result<LaurentPolynomial> {
    check_param("p", p)?;
    check_param("q", q)?;
    let x = var(Variable::X0);
    let y = var(Variable::Y0);
    let xx = var(Variable::X1);
    let t1 = &xpow(q - 1) * &(&ypow(p + 1) + &(&x * &gy(p + 1)));
    let t2 = &(&(&y * &xx) * &geom_sum(q - 1)) * &(&ypow(p) + &(&x * &gy(p)));
    Ok(&t1 + &t2)
}

/// The closed form as printed for family p q, under the reading n := p.
/// Kept for the comparison harness only: it disagrees with its own base
/// value and with the state sum, so it is never used for evaluation.
pub fn eval_ipq_printed(p: i32, q: i32) -> Result<LaurentPolynomial> {
    check_param("p", p)?;
    check_param("q", q)?;
    let n = p;
    let big_t1 = &geom_sum(q + 1) * &gy(p + 1);
    let t2 = &gy(p + 1) * &LaurentPolynomial::monomial(Variable::X1, q, 1);
    let t3 = &geom_sum(q + 1) * &LaurentPolynomial::monomial(Variable::Y1, n, 1);
    let t4 = &geom_sum(q) * &ypow(n + 1);
    let t5 = &LaurentPolynomial::monomial(Variable::X1, q, 1)
        * &LaurentPolynomial::monomial(Variable::Y1, n, 1);
    let t6 = &xpow(q) * &LaurentPolynomial::monomial(Variable::Y1, n, 1);
    Ok(&(&(&(&(&big_t1 - &t2) - &t3) + &t4) + &t5) - &t6)
}

/// Relation for (i,1^p) 1 (1^q): y T(G(i,1^(p+q))) + x T(G(i,1^p)) T(G(1^q)).
pub fn eval_ip1q(p: i32, q: i32) -> Result<LaurentPolynomial> {
    check_param("p", p)?;
    check_param("q", q)?;
    let x = var(Variable::X0);
    let y = var(Variable::Y0);
    Ok(&(&y * &eval_ip(p + q)?) + &(&x * &(&eval_ip(p)? * &eval_p(q)?)))
}

/// Relation for (i,1^p) 1 (i,1^q): y T(G(1^(p+q))) + x T(G(i,1^p)) T(G(i,1^q)).
pub fn eval_ip1iq(p: i32, q: i32) -> Result<LaurentPolynomial> {
    check_param("p", p)?;
    check_param("q", q)?;
    let x = var(Variable::X0);
    let y = var(Variable::Y0);
    Ok(&(&y * &eval_p(p + q)?) + &(&x * &(&eval_ip(p)? * &eval_ip(q)?)))
}

/// Closed form for (1^p) i (1^q).
pub fn eval_piq(p: i32, q: i32) -> Result<LaurentPolynomial> {
    check_param("p", p)?;
    check_param("q", q)?;
    let x = var(Variable::X0);
    let y = var(Variable::Y0);
    let xx = var(Variable::X1);
    let y2 = &y * &y;
    let xbigpow = |k: i32| LaurentPolynomial::monomial(Variable::X1, k, 1);
    let ybig = var(Variable::Y1);
    let t1 = &(&(&geom_sum(p) * &(&x + &xx)) * &xpow(q - 1)) * &y;
    let t2 = &(&(&geom_sum(q - p - 1) * &xpow(p)) * &xbigpow(p + 1)) * &y;
    let t3 = &(&(&geom_sum(p - 2) * &geom_sum(q)) * &xpow(2)) * &y2;
    let t4 = &(&(&geom_sum(q) * &(&x + &xx)) * &xbigpow(p - 2)) * &y2;
    let t5 = &xpow(p + q - 1) * &ybig;
    Ok(&(&(&(&t1 + &t2) + &t3) + &t4) + &t5)
}

/// Closed-form evaluation; negative parameters allowed everywhere.
pub fn family_eval(id: FamilyId, params: &[i32]) -> Result<LaurentPolynomial> {
    match (id, params) {
        (FamilyId::P, [p]) => eval_p(*p),
        (FamilyId::Ip, [p]) => eval_ip(*p),
        (FamilyId::IpQ, [p, q]) => eval_ipq(*p, *q),
        (FamilyId::Ip1Q, [p, q]) => eval_ip1q(*p, *q),
        (FamilyId::Ip1Iq, [p, q]) => eval_ip1iq(*p, *q),
        (FamilyId::PIQ, [p, q]) => eval_piq(*p, *q),
        _ => Err(Error::UnsupportedFamily {
            id: id.name().into(),
        }),
    }
}

fn positive(name: &str, v: i32) -> Result<()> {
    if v <= 0 {
        return Err(Error::BadFamilyParameter {
            msg: format!("{name} must be positive for the recursive form"),
        });
    }
    Ok(())
}

fn rec_p(p: i32) -> LaurentPolynomial {
    // T(1^p) = y X^(p-1) + x T(1^(p-1)); a single crossing closes to a
    // one-edge cycle, i.e. a loop, value Y
    if p == 1 {
        return var(Variable::Y1);
    }
    let t = &var(Variable::Y0) * &LaurentPolynomial::monomial(Variable::X1, p - 1, 1);
    &t + &(&var(Variable::X0) * &rec_p(p - 1))
}

fn rec_ip(p: i32) -> LaurentPolynomial {
    if p == 1 {
        return &var(Variable::X0) + &var(Variable::Y0);
    }
    let t = &var(Variable::Y0) * &LaurentPolynomial::monomial(Variable::X1, p - 1, 1);
    &t + &(&var(Variable::X0) * &rec_ip(p - 1))
}

/// Dual of T(G(1^q)): x <-> y and X <-> Y swapped.
fn rec_p_dual(q: i32) -> LaurentPolynomial {
    rec_p(q)
        .substitute(&[
            (Variable::X0, var(Variable::Y0)),
            (Variable::Y0, var(Variable::X0)),
            (Variable::X1, var(Variable::Y1)),
            (Variable::Y1, var(Variable::X1)),
        ])
        .expect("monomial images")
}

fn rec_ipq(p: i32, q: i32) -> LaurentPolynomial {
    // printed recursion, left side read as T(G((i,1^p)(1^q))), with the
    // printed base at (1,1); base rows at q > 1 from the graph engine
    if p == 1 {
        if q == 1 {
            let x = var(Variable::X0);
            let y = var(Variable::Y0);
            let x2 = &x * &x;
            // xy + x^2 y + x^3, exactly as printed
            return &(&(&x * &y) + &(&x2 * &y)) + &(&x2 * &x);
        }
        let e = parse_conway(&format!("(i,1)(1^{q})")).expect("family expression");
        let g = crate::tuttegraph::graph_from_conway(&e).expect("supported family graph");
        return crate::tuttegraph::relative_tutte(&crate::tuttegraph::reduce_graph(&g));
    }
    let t = &(&var(Variable::Y0) * &LaurentPolynomial::monomial(Variable::X1, p - 1, 1))
        * &rec_p_dual(q);
    &t + &(&var(Variable::X0) * &rec_ipq(p - 1, q))
}

fn rec_piq(p: i32, q: i32) -> LaurentPolynomial {
    // T((1^p) i (1^q)) = y X^(q-1) T(G(i,1^p)) + x T((1^p) i (1^(q-1))).
    // The printed base claims T((1^p) i 1) = T(G((i,1^p) 1)), but that
    // equality fails beyond p = 1 (both sides disagree as brackets of
    // their own diagrams), so the base row comes from the graph engine.
    if q == 1 {
        let e = parse_conway(&format!("(1^{p}) i 1")).expect("family expression");
        let g = crate::tuttegraph::graph_from_conway(&e).expect("supported family graph");
        return crate::tuttegraph::relative_tutte(&crate::tuttegraph::reduce_graph(&g));
    }
    let t = &(&var(Variable::Y0) * &LaurentPolynomial::monomial(Variable::X1, q - 1, 1))
        * &rec_ip(p);
    &t + &(&var(Variable::X0) * &rec_piq(p, q - 1))
}

/// Recursive evaluation, positive parameters only.
pub fn family_recursive(id: FamilyId, params: &[i32]) -> Result<LaurentPolynomial> {
    for v in params {
        positive("parameter", *v)?;
    }
    match (id, params) {
        (FamilyId::P, [p]) => Ok(rec_p(*p)),
        (FamilyId::Ip, [p]) => Ok(rec_ip(*p)),
        (FamilyId::IpQ, [p, q]) => Ok(rec_ipq(*p, *q)),
        (FamilyId::Ip1Q, [p, q]) => {
            let y = var(Variable::Y0);
            let x = var(Variable::X0);
            Ok(&(&y * &rec_ip(p + q)) + &(&x * &(&rec_ip(*p) * &rec_p(*q))))
        }
        (FamilyId::Ip1Iq, [p, q]) => {
            let y = var(Variable::Y0);
            let x = var(Variable::X0);
            Ok(&(&y * &rec_p(p + q)) + &(&x * &(&rec_ip(*p) * &rec_ip(*q))))
        }
        (FamilyId::PIQ, [p, q]) => Ok(rec_piq(*p, *q)),
        _ => Err(Error::UnsupportedFamily {
            id: id.name().into(),
        }),
    }
}

/// Report of closed-form versus recursive evaluation.
#[derive(Debug, Clone)]
pub struct FormComparison {
    pub id: FamilyId,
    pub params: Vec<i32>,
    pub closed: LaurentPolynomial,
    pub recursive: LaurentPolynomial,
}

impl FormComparison {
    pub fn matches(&self) -> bool {
        self.closed == self.recursive
    }
}

pub fn compare_forms(id: FamilyId, params: &[i32]) -> Result<FormComparison> {
    Ok(FormComparison {
        id,
        params: params.to_vec(),
        closed: family_eval(id, params)?,
        recursive: family_recursive(id, params)?,
    })
}

fn twist_run(n: i32, reps: i32) -> String {
    // 1^k or (-1)^k with the sign of n
    let unit = if n > 0 { "1" } else { "-1" };
    if reps == 1 {
        unit.to_string()
    } else if n > 0 {
        format!("1^{reps}")
    } else {
        format!("(-1)^{reps}")
    }
}

/// Conway expression of a family member.
pub fn family_diagram(id: FamilyId, params: &[i32]) -> Result<ConwayExpr> {
    let text = family_diagram_text(id, params)?;
    parse_conway(&text)
}

pub fn family_diagram_text(id: FamilyId, params: &[i32]) -> Result<String> {
    let two = |params: &[i32]| -> Result<(i32, i32)> {
        match params {
            [p, q] => Ok((*p, *q)),
            _ => Err(Error::BadFamilyParameter {
                msg: format!("{} takes two parameters", id.name()),
            }),
        }
    };
    let one = |params: &[i32]| -> Result<i32> {
        match params {
            [p] => Ok(*p),
            _ => Err(Error::BadFamilyParameter {
                msg: format!("{} takes one parameter", id.name()),
            }),
        }
    };
    match id {
        FamilyId::P => {
            let p = one(params)?;
            check_param("p", p)?;
            Ok(twist_run(p, p.abs()))
        }
        FamilyId::Ip => {
            let p = one(params)?;
            check_param("p", p)?;
            Ok(format!("(i,{})", twist_run(p, p.abs())))
        }
        FamilyId::IpQ => {
            let (p, q) = two(params)?;
            check_param("p", p)?;
            check_param("q", q)?;
            Ok(format!(
                "(i,{}) ({})",
                twist_run(p, p.abs()),
                twist_run(q, q.abs())
            ))
        }
        FamilyId::Ip1Q => {
            let (p, q) = two(params)?;
            check_param("p", p)?;
            check_param("q", q)?;
            Ok(format!(
                "(i,{}) 1 ({})",
                twist_run(p, p.abs()),
                twist_run(q, q.abs())
            ))
        }
        FamilyId::Ip1Iq => {
            let (p, q) = two(params)?;
            check_param("p", p)?;
            check_param("q", q)?;
            Ok(format!(
                "(i,{}) 1 (i,{})",
                twist_run(p, p.abs()),
                twist_run(q, q.abs())
            ))
        }
        FamilyId::PIQ => {
            let (p, q) = two(params)?;
            check_param("p", p)?;
            check_param("q", q)?;
            Ok(format!(
                "({}) i ({})",
                twist_run(p, p.abs()),
                twist_run(q, q.abs())
            ))
        }
        FamilyId::UnitJones => {
            let (p, q) = two(params)?;
            if p <= 0 || q <= 0 {
                return Err(Error::BadFamilyParameter {
                    msg: "unit_jones takes positive p, q".into(),
                });
            }
            Ok(format!("{},i,{},i", twist_run(1, p), twist_run(-1, q)))
        }
        FamilyId::ZFamily => {
            let k = one(params)?;
            positive("k", k)?;
            let half = format!("({},i,{})", twist_run(1, k), twist_run(-1, k));
            Ok(format!("{half} i {half}"))
        }
        FamilyId::CandidateKnots => {
            let i = one(params)?;
            candidate_knots()
                .get(i as usize)
                .map(|(_, s)| s.to_string())
                .ok_or(Error::UnsupportedFamily {
                    id: "candidate_knots index".into(),
                })
        }
    }
}

/// Named single-knot catalog used by the parity machinery.
pub fn candidate_knots() -> Vec<(&'static str, &'static str)> {
    vec![
        ("KS", "(((1,(i,1),-1),-1),i,1)"),
        ("S7", "(i,1) 1,(i,-1) -1,(i,1)"),
        ("fig10_knot", "(i,1) (1,i) 1 (-1,i)"),
        // 4-crossing knot with unit Jones, all crossings odd, and a parity
        // state that survives node reduction; found by searching small
        // expressions for exactly that combination
        ("kishino", "(-1,1 i,-1) (i,1,i)"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::VirtualDiagram;
    use crate::tuttegraph::tutte_to_jones;

    #[test]
    fn golden_small_values() {
        // T(G(1^2)) = yX + xY
        let expect = &(&var(Variable::Y0) * &var(Variable::X1))
            + &(&var(Variable::X0) * &var(Variable::Y1));
        assert_eq!(eval_p(2).unwrap(), expect);
        // T(G(i,1)) = x + y
        assert_eq!(
            eval_ip(1).unwrap(),
            &var(Variable::X0) + &var(Variable::Y0)
        );
        // T(G(i,1^2)) = x^2 + xy + Xy
        let x = var(Variable::X0);
        let y = var(Variable::Y0);
        let expect = &(&(&x * &x) + &(&x * &y)) + &(&var(Variable::X1) * &y);
        assert_eq!(eval_ip(2).unwrap(), expect);
    }

    #[test]
    fn negative_parameter_value() {
        // T(G(i,(-1)^2)) = x^-2 - y x^-1 X^-2 - y x^-2 X^-1
        let m = |xe: i32, ye: i32, xxe: i32, c: i64| {
            let mut mono = crate::laurent::Monomial::default();
            mono.0[Variable::X0 as usize] = xe;
            mono.0[Variable::Y0 as usize] = ye;
            mono.0[Variable::X1 as usize] = xxe;
            LaurentPolynomial::from_term(mono, num_bigint::BigInt::from(c))
        };
        let expect = &(&m(-2, 0, 0, 1) + &m(-1, 1, -2, -1)) + &m(-2, 1, -1, -1);
        assert_eq!(eval_ip(-2).unwrap(), expect);
    }

    #[test]
    fn recursion_matches_closed_forms() {
        for p in 1..=8 {
            assert_eq!(rec_p(p), eval_p(p).unwrap(), "p family p={p}");
            assert_eq!(rec_ip(p), eval_ip(p).unwrap(), "i_p family p={p}");
        }
        for p in 1..=6 {
            for q in 1..=6 {
                assert_eq!(
                    family_recursive(FamilyId::PIQ, &[p, q]).unwrap(),
                    eval_piq(p, q).unwrap(),
                    "p_i_q ({p},{q})"
                );
                assert_eq!(
                    family_recursive(FamilyId::Ip1Q, &[p, q]).unwrap(),
                    eval_ip1q(p, q).unwrap()
                );
                assert_eq!(
                    family_recursive(FamilyId::Ip1Iq, &[p, q]).unwrap(),
                    eval_ip1iq(p, q).unwrap()
                );
            }
        }
    }

    #[test]
    fn ipq_printed_base_is_reproduced_and_reported() {
        // the printed base value survives in the recursive form
        let x = var(Variable::X0);
        let y = var(Variable::Y0);
        let x2 = &x * &x;
        let base = &(&(&x * &y) + &(&x2 * &y)) + &(&x2 * &x);
        assert_eq!(family_recursive(FamilyId::IpQ, &[1, 1]).unwrap(), base);
        // and the harness reports the discrepancy against the validated
        // closed form instead of hiding it
        let cmp = compare_forms(FamilyId::IpQ, &[1, 1]).unwrap();
        assert!(!cmp.matches());
        assert_eq!(cmp.closed, eval_ipq(1, 1).unwrap());
    }

    #[test]
    fn closed_forms_match_state_sum() {
        for (id, params) in [
            (FamilyId::P, vec![3]),
            (FamilyId::Ip, vec![2]),
            (FamilyId::Ip, vec![-2]),
            (FamilyId::IpQ, vec![2, 3]),
            (FamilyId::IpQ, vec![-2, 2]),
            (FamilyId::Ip1Q, vec![2, 2]),
            (FamilyId::Ip1Iq, vec![2, 2]),
            (FamilyId::PIQ, vec![3, 2]),
            (FamilyId::PIQ, vec![2, -2]),
        ] {
            let t = family_eval(id, &params).unwrap();
            let d = VirtualDiagram::from_conway(&family_diagram(id, &params).unwrap());
            let img = tutte_to_jones(&t, d.writhe()).unwrap();
            assert_eq!(
                img.bracket,
                d.kauffman_bracket().unwrap(),
                "{} {params:?}",
                id.name()
            );
        }
    }

    #[test]
    fn diagram_texts() {
        assert_eq!(
            family_diagram_text(FamilyId::UnitJones, &[2, 1]).unwrap(),
            "1^2,i,-1,i"
        );
        assert_eq!(
            family_diagram_text(FamilyId::ZFamily, &[1]).unwrap(),
            "(1,i,-1) i (1,i,-1)"
        );
        assert_eq!(
            family_diagram_text(FamilyId::Ip, &[-2]).unwrap(),
            "(i,(-1)^2)"
        );
        for (_, s) in candidate_knots() {
            parse_conway(s).unwrap();
        }
    }
}
