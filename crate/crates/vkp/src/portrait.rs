//! Zero sets of family Jones polynomials, rendered as CSV tables and SVG
//! scatter plots. Roots are found on the quarter-power scale u = t^(1/4),
//! where every Jones polynomial becomes an ordinary polynomial.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::{family_eval, FamilyId};
use crate::laurent::{bracket_map, jones_map, LaurentPolynomial, Variable};

pub const SOLVER_TOLERANCE: f64 = 1e-12;
pub const DEDUP_TOLERANCE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, serde::Serialize)]
pub struct PortraitRecord {
    pub family: &'static str,
    pub p: i32,
    pub q: i32,
    pub root_re: f64,
    pub root_im: f64,
    pub residual: f64,
}

/// Ascending coefficients of the u-polynomial t^(-min/4) * J, where the
/// exponent gap between slots is a quarter power of t.
fn u_coefficients(j: &LaurentPolynomial) -> Result<Vec<f64>> {
    if j.is_zero() {
        return Err(Error::ZeroPolynomialRoots);
    }
    if let Err(v) = j.uses_only(&[Variable::T]) {
        return Err(Error::StrayVariable { var: v.name() });
    }
    let exps: Vec<i32> = j
        .terms()
        .map(|(m, _)| m.0[Variable::T as usize])
        .collect();
    let min = *exps.iter().min().unwrap();
    let max = *exps.iter().max().unwrap();
    let mut coeffs = vec![0.0; (max - min + 1) as usize];
    for (m, c) in j.terms() {
        let e = m.0[Variable::T as usize];
        coeffs[(e - min) as usize] = big_to_f64(c);
    }
    Ok(coeffs)
}

fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().expect("coefficient fits in f64 range")
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn horner_deriv(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * k as f64;
    }
    acc
}

fn xorshift(seed: &mut u64) -> f64 {
    *seed ^= *seed << 13;
    *seed ^= *seed >> 7;
    *seed ^= *seed << 17;
    (*seed >> 11) as f64 / (1u64 << 53) as f64
}

/// All complex roots of the polynomial with the given ascending real
/// coefficients, by simultaneous Aberth iteration from a fixed, slightly
/// jittered starting circle.
pub fn aberth_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    debug_assert!(lead != 0.0);
    // Cauchy bound keeps all roots inside the starting circle
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let mut seed = 0x5eed_5eed_5eedu64;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64
                + 1e-3 * xorshift(&mut seed);
            let r = bound.min(2.0) * (1.0 + 1e-3 * xorshift(&mut seed));
            Complex64::from_polar(r, angle)
        })
        .collect();
    let mut converged = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut moved = false;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let p = horner(coeffs, z[i]);
            let grow = scale * z[i].norm().max(1.0).powi(n as i32);
            if p.norm() <= SOLVER_TOLERANCE * grow {
                converged[i] = true;
                continue;
            }
            let dp = horner_deriv(coeffs, z[i]);
            let newton = if dp.norm() == 0.0 {
                Complex64::new(SOLVER_TOLERANCE, SOLVER_TOLERANCE)
            } else {
                p / dp
            };
            let mut repulse = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        repulse += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulse;
            let step = if denom.norm() == 0.0 { newton } else { newton / denom };
            z[i] -= step;
            moved = true;
        }
        if !moved {
            break;
        }
    }
    // final Newton polish, accepted only while it shrinks the value
    for zi in &mut z {
        for _ in 0..3 {
            let p = horner(coeffs, *zi);
            let dp = horner_deriv(coeffs, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *zi - p / dp;
            if horner(coeffs, next).norm() < p.norm() {
                *zi = next;
            } else {
                break;
            }
        }
    }
    Ok(z)
}


/// Distinct nonzero roots in t of a Jones polynomial, with the residual of
/// the quarter-stretched polynomial at the found u-root. Sorted by
/// argument, then magnitude.
pub fn jones_roots_detailed(j: &LaurentPolynomial) -> Result<Vec<(Complex64, f64)>> {
    let coeffs = u_coefficients(j)?;
    let u_roots = aberth_roots(&coeffs)?;
    let mut cands: Vec<(Complex64, f64)> = u_roots
        .iter()
        .map(|u| (u.powu(4), horner(&coeffs, *u).norm()))
        .filter(|(t, _)| t.norm() > SOLVER_TOLERANCE)
        .collect();
    cands.sort_by(|a, b| root_order(a.0, b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(Complex64, f64)> = Vec::new();
    for (t, res) in cands {
        match out.iter_mut().find(|(s, _)| (*s - t).norm() < DEDUP_TOLERANCE) {
            Some(hit) => hit.1 = hit.1.min(res),
            None => out.push((t, res)),
        }
    }
    out.sort_by(|a, b| root_order(a.0, b.0));
    Ok(out)
}

pub fn jones_roots(j: &LaurentPolynomial) -> Result<Vec<Complex64>> {
    Ok(jones_roots_detailed(j)?.into_iter().map(|(t, _)| t).collect())
}

fn root_order(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.arg()
        .total_cmp(&b.arg())
        .then(a.norm().total_cmp(&b.norm()))
}

/// Roots of the closed-form Jones polynomial for every cell of a
/// two-parameter family grid. Ranges are inclusive.
pub fn portrait_grid(
    id: FamilyId,
    p_range: (i32, i32),
    q_range: (i32, i32),
) -> Result<Vec<PortraitRecord>> {
    if !matches!(id, FamilyId::IpQ | FamilyId::PIQ) {
        return Err(Error::UnsupportedFamily {
            id: id.name().to_string(),
        });
    }
    let span = |(a, b): (i32, i32)| a.min(b)..=a.max(b);
    let mut cells = Vec::new();
    for p in span(p_range) {
        for q in span(q_range) {
            cells.push((p, q));
        }
    }
    let per_cell: Result<Vec<Vec<PortraitRecord>>> = cells
        .par_iter()
        .map(|&(p, q)| {
            let tutte = family_eval(id, &[p, q])?;
            let jones = tutte.substitute(&bracket_map())?.substitute(&jones_map())?;
            let roots = jones_roots_detailed(&jones)?;
            Ok(roots
                .into_iter()
                .map(|(t, res)| PortraitRecord {
                    family: id.name(),
                    p,
                    q,
                    root_re: t.re,
                    root_im: t.im,
                    residual: res,
                })
                .collect())
        })
        .collect();
    let mut records: Vec<PortraitRecord> = per_cell?.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.p, a.q)
            .cmp(&(b.p, b.q))
            .then_with(|| root_order(c64(a), c64(b)))
    });
    Ok(records)
}

fn c64(r: &PortraitRecord) -> Complex64 {
    Complex64::new(r.root_re, r.root_im)
}

/// RFC-4180 CSV with LF line endings and 17 significant digits.
pub fn to_csv(records: &[PortraitRecord]) -> String {
    let mut out = String::from("family,p,q,root_re,root_im,residual\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{:.16e},{:.16e},{:.16e}\n",
            r.family, r.p, r.q, r.root_re, r.root_im, r.residual
        ));
    }
    out
}

/// 800x800 scatter plot with axes through the origin and the unit circle
/// for reference.
pub fn to_svg(records: &[PortraitRecord]) -> String {
    const SIZE: f64 = 800.0;
    const HALF: f64 = SIZE / 2.0;
    let extent = records
        .iter()
        .flat_map(|r| [r.root_re.abs(), r.root_im.abs()])
        .fold(1.0f64, f64::max)
        * 1.1;
    let scale = HALF / extent;
    let x = |re: f64| HALF + re * scale;
    let y = |im: f64| HALF - im * scale;
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    s.push_str(&format!(
        "  <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));
    s.push_str(&format!(
        "  <line x1=\"0\" y1=\"{HALF}\" x2=\"{SIZE}\" y2=\"{HALF}\" stroke=\"#999\"/>\n"
    ));
    s.push_str(&format!(
        "  <line x1=\"{HALF}\" y1=\"0\" x2=\"{HALF}\" y2=\"{SIZE}\" stroke=\"#999\"/>\n"
    ));
    s.push_str(&format!(
        "  <circle cx=\"{HALF}\" cy=\"{HALF}\" r=\"{:.4}\" fill=\"none\" stroke=\"#bbb\"/>\n",
        scale
    ));
    for r in records {
        s.push_str(&format!(
            "  <circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"2\" fill=\"black\"/>\n",
            x(r.root_re),
            y(r.root_im)
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::VirtualDiagram;

    fn t_poly(pairs: &[(i32, i64)]) -> LaurentPolynomial {
        pairs
            .iter()
            .map(|(e, c)| LaurentPolynomial::monomial(Variable::T, e * 4, *c))
            .fold(LaurentPolynomial::zero(), |a, b| &a + &b)
    }

    #[test]
    fn linear_and_constant() {
        let roots = jones_roots(&t_poly(&[(1, 1), (0, -1)])).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(jones_roots(&t_poly(&[(0, 1)])).unwrap().is_empty());
        assert!(matches!(
            jones_roots(&LaurentPolynomial::zero()),
            Err(Error::ZeroPolynomialRoots)
        ));
    }

    #[test]
    fn trefoil_roots() {
        let j = VirtualDiagram::parse("3").unwrap().jones().unwrap();
        let roots = jones_roots_detailed(&j).unwrap();
        assert_eq!(roots.len(), 3);
        for (_, res) in &roots {
            assert!(*res < 1e-8, "residual {res}");
        }
    }

    #[test]
    fn grid_cell_matches_state_sum() {
        let recs = portrait_grid(FamilyId::IpQ, (1, 1), (2, 2)).unwrap();
        let d = VirtualDiagram::parse("(i,1) (1 1)").unwrap();
        let j = d.jones_with(24, false).unwrap();
        let direct = jones_roots(&j).unwrap();
        assert_eq!(recs.len(), direct.len());
        for (r, t) in recs.iter().zip(&direct) {
            assert!((c64(r) - t).norm() < 1e-8);
            assert!(r.residual < 1e-8);
        }
    }

    #[test]
    fn mirror_roots_invert() {
        for (p, q) in [(2, 3), (3, 5), (4, 2)] {
            let j = family_eval(FamilyId::PIQ, &[p, q])
                .unwrap()
                .substitute(&bracket_map())
                .unwrap()
                .substitute(&jones_map())
                .unwrap();
            let jm = family_eval(FamilyId::PIQ, &[-p, -q])
                .unwrap()
                .substitute(&bracket_map())
                .unwrap()
                .substitute(&jones_map())
                .unwrap();
            let a = jones_roots(&j).unwrap();
            let mut b: Vec<Complex64> = jones_roots(&jm).unwrap().iter().map(|z| z.inv()).collect();
            b.sort_by(|x, y| root_order(*x, *y));
            let mut a = a;
            a.sort_by(|x, y| root_order(*x, *y));
            assert_eq!(a.len(), b.len(), "({p},{q})");
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-6, "({p},{q}): {x} vs {y}");
            }
        }
    }

    #[test]
    fn csv_shape_and_determinism() {
        let recs = portrait_grid(FamilyId::IpQ, (1, 2), (2, 3)).unwrap();
        let csv = to_csv(&recs);
        let again = to_csv(&portrait_grid(FamilyId::IpQ, (1, 2), (2, 3)).unwrap());
        assert_eq!(csv, again);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "family,p,q,root_re,root_im,residual");
        for line in lines {
            assert_eq!(line.split(',').count(), 6);
        }
        let svg = to_svg(&recs);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg, to_svg(&recs));
    }
}
