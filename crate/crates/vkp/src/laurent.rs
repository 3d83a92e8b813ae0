//! Exact multivariate Laurent polynomials over the fixed alphabet
//! {x, y, X, Y, d, A, t} with arbitrary-precision integer coefficients.
//!
//! Exponents of `t` are stored in quarter units: the stored integer is four
//! times the mathematical exponent, so `A -> t^(-1/4)` stays in integer
//! arithmetic. Printing renders `t^(k/4)` reduced to lowest terms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// The closed variable alphabet. No other variables exist in the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Variable {
    X0, // x
    Y0, // y
    X1, // X
    Y1, // Y
    D,  // d
    A,  // A
    T,  // t
}

pub const VARIABLES: [Variable; 7] = [
    Variable::X0,
    Variable::Y0,
    Variable::X1,
    Variable::Y1,
    Variable::D,
    Variable::A,
    Variable::T,
];

impl Variable {
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Variable::X0 => "x",
            Variable::Y0 => "y",
            Variable::X1 => "X",
            Variable::Y1 => "Y",
            Variable::D => "d",
            Variable::A => "A",
            Variable::T => "t",
        }
    }
}

/// Exponent vector over the fixed alphabet; index order is the canonical
/// term order. Entry 0 means the variable is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub [i32; 7]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; 7])
    }

    pub fn var(v: Variable, exp: i32) -> Self {
        let mut m = [0; 7];
        m[v.index()] = exp;
        Monomial(m)
    }

    pub fn exponent(&self, v: Variable) -> i32 {
        self.0[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = [0; 7];
        for i in 0..7 {
            m[i] = self.0[i] + other.0[i];
        }
        Monomial(m)
    }
}

/// Exact Laurent polynomial; the zero polynomial is the empty term map and
/// no zero coefficient is ever stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::from_term(Monomial::one(), BigInt::from(c))
    }

    pub fn from_term(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPolynomial { terms }
    }

    /// `c * v^exp`
    pub fn monomial(v: Variable, exp: i32, c: i64) -> Self {
        Self::from_term(Monomial::var(v, exp), BigInt::from(c))
    }

    pub fn variable(v: Variable) -> Self {
        Self::monomial(v, 1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the unit monomial.
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The single term of a monomial polynomial, if it is one.
    pub fn as_monomial(&self) -> Option<(&Monomial, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    fn insert_add(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn pow(&self, n: i32) -> Result<LaurentPolynomial> {
        if n >= 0 {
            let mut acc = LaurentPolynomial::one();
            for _ in 0..n {
                acc = &acc * self;
            }
            return Ok(acc);
        }
        // Negative powers exist only for invertible elements: single terms
        // with unit coefficient.
        let (m, c) = self.as_monomial().ok_or(Error::NotInvertible)?;
        if c.abs() != BigInt::one() {
            return Err(Error::NotInvertible);
        }
        let mut inv = [0i32; 7];
        for i in 0..7 {
            inv[i] = -m.0[i];
        }
        LaurentPolynomial::from_term(Monomial(inv), c.clone()).pow(-n)
    }

    /// Substitute variables by polynomial images; a ring homomorphism.
    /// A variable mapped to a non-monomial image must occur with
    /// nonnegative exponents only.
    pub fn substitute(&self, map: &[(Variable, LaurentPolynomial)]) -> Result<LaurentPolynomial> {
        for (v, image) in map {
            if image.as_monomial().is_none() {
                for (m, _) in self.terms() {
                    if m.exponent(*v) < 0 {
                        return Err(Error::NegativeExponent { var: v.name() });
                    }
                }
            }
        }
        let mut out = LaurentPolynomial::zero();
        for (m, c) in self.terms() {
            let mut residual = [0i32; 7];
            let mut factor = LaurentPolynomial::one();
            for i in 0..7 {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                if let Some((_, image)) = map.iter().find(|(v, _)| v.index() == i) {
                    factor = &factor * &image.pow(e)?;
                } else {
                    residual[i] = e;
                }
            }
            let term = LaurentPolynomial::from_term(Monomial(residual), c.clone());
            out = &out + &(&term * &factor);
        }
        Ok(out)
    }

    /// Evaluate at a complex point. Quarter-unit `t` exponents are taken on
    /// the principal branch of `value^(stored/4)`.
    pub fn eval_complex(&self, assign: &dyn Fn(Variable) -> Complex64) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in self.terms() {
            let mut v = big_to_complex(c);
            for (i, var) in VARIABLES.iter().enumerate() {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                let z = assign(*var);
                if z.norm() == 0.0 {
                    if e < 0 {
                        return Err(Error::ZeroToNegativePower { var: var.name() });
                    }
                    v *= Complex64::new(0.0, 0.0);
                    continue;
                }
                let power = if *var == Variable::T {
                    f64::from(e) / 4.0
                } else {
                    f64::from(e)
                };
                v *= z.powf(power);
            }
            total += v;
        }
        Ok(total)
    }

    /// Largest/smallest stored exponent of `v` over all terms; None if `v`
    /// does not occur.
    pub fn exponent_range(&self, v: Variable) -> Option<(i32, i32)> {
        let mut range: Option<(i32, i32)> = None;
        for (m, _) in self.terms() {
            let e = m.exponent(v);
            if e != 0 || self.terms.len() == 1 {
                range = Some(match range {
                    None => (e, e),
                    Some((lo, hi)) => (lo.min(e), hi.max(e)),
                });
            }
        }
        // Terms without v count as exponent 0.
        if self.terms().any(|(m, _)| m.exponent(v) == 0) {
            range = Some(match range {
                None => (0, 0),
                Some((lo, hi)) => (lo.min(0), hi.max(0)),
            });
        }
        range
    }

    pub fn uses_only(&self, allowed: &[Variable]) -> std::result::Result<(), Variable> {
        for (m, _) in self.terms() {
            for (i, var) in VARIABLES.iter().enumerate() {
                if m.0[i] != 0 && !allowed.contains(var) {
                    return Err(*var);
                }
            }
        }
        Ok(())
    }

    /// Exact division by a single variable (used by the parity bracket's
    /// normalized accessor). Every term must contain `v` with exponent
    /// at least `exp`.
    pub fn div_var(&self, v: Variable, exp: i32) -> Result<LaurentPolynomial> {
        let mut out = LaurentPolynomial::zero();
        for (m, c) in self.terms() {
            if m.exponent(v) < exp {
                return Err(Error::NotInvertible);
            }
            let mut e = m.0;
            e[v.index()] -= exp;
            out.insert_add(Monomial(e), c.clone());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|(m, c)| {
                let mut exps = serde_json::Map::new();
                for (i, var) in VARIABLES.iter().enumerate() {
                    if m.0[i] != 0 {
                        exps.insert(var.name().to_string(), serde_json::json!(m.0[i]));
                    }
                }
                serde_json::json!({ "coeff": c.to_string(), "exponents": exps })
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }
}

fn big_to_complex(c: &BigInt) -> Complex64 {
    Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.insert_add(*m, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.insert_add(*m, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (m, c) in self.terms() {
            out.insert_add(*m, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                out.insert_add(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// The bracket substitution of the relative Tutte variables:
/// X -> -A^-3, Y -> -A^3, x -> A, y -> A^-1, d -> -(A^2 + A^-2).
pub fn bracket_map() -> Vec<(Variable, LaurentPolynomial)> {
    let a = |e: i32, c: i64| LaurentPolynomial::monomial(Variable::A, e, c);
    vec![
        (Variable::X1, a(-3, -1)),
        (Variable::Y1, a(3, -1)),
        (Variable::X0, a(1, 1)),
        (Variable::Y0, a(-1, 1)),
        (Variable::D, &a(2, -1) + &a(-2, -1)),
    ]
}

/// The Jones substitution A -> t^(-1/4) in quarter-unit encoding.
pub fn jones_map() -> Vec<(Variable, LaurentPolynomial)> {
    vec![(Variable::A, LaurentPolynomial::monomial(Variable::T, -1, 1))]
}

/// The unique Laurent polynomial q with q * (x - X) = x^p - X^p.
pub fn geom_sum(p: i32) -> LaurentPolynomial {
    geom_sum_in(Variable::X0, Variable::X1, p)
}

/// Same as [`geom_sum`] in an arbitrary variable pair (a, b):
/// the result q satisfies q * (a - b) = a^p - b^p.
pub fn geom_sum_in(a: Variable, b: Variable, p: i32) -> LaurentPolynomial {
    let mut out = LaurentPolynomial::zero();
    if p >= 0 {
        for k in 0..p {
            let m = Monomial::var(a, k).mul(&Monomial::var(b, p - 1 - k));
            out.insert_add(m, BigInt::one());
        }
    } else {
        let m_abs = -p;
        for k in 1..=m_abs {
            let m = Monomial::var(a, -k).mul(&Monomial::var(b, -(m_abs + 1 - k)));
            out.insert_add(m, -BigInt::one());
        }
    }
    out
}

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn format_monomial(m: &Monomial, out: &mut String) {
    for (i, var) in VARIABLES.iter().enumerate() {
        let e = m.0[i];
        if e == 0 {
            continue;
        }
        out.push('*');
        if *var == Variable::T {
            // quarter units, reduced to lowest terms
            let g = gcd(e, 4);
            let (num, den) = (e / g, 4 / g);
            if den == 1 {
                out.push_str(&format!("t^{num}"));
            } else {
                out.push_str(&format!("t^({num}/{den})"));
            }
        } else {
            out.push_str(&format!("{}^{}", var.name(), e));
        }
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            if m.is_one() {
                s.push_str(&abs.to_string());
            } else {
                s.push_str(&abs.to_string());
                format_monomial(m, &mut s);
            }
        }
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn var(v: Variable) -> LaurentPolynomial {
        LaurentPolynomial::variable(v)
    }

    #[test]
    fn ring_identities() {
        let x = var(Variable::X0);
        let xx = var(Variable::X1);
        let lhs = &(&x + &xx) * &(&x - &xx);
        let rhs = &x.pow(2).unwrap() - &xx.pow(2).unwrap();
        assert_eq!(lhs, rhs);

        let a = &(&x * &xx) + &LaurentPolynomial::constant(3);
        assert!((&a + &(-&a)).is_zero());

        let a2 = LaurentPolynomial::monomial(Variable::A, 2, 1);
        let am2 = LaurentPolynomial::monomial(Variable::A, -2, 1);
        assert_eq!(&a2 * &am2, LaurentPolynomial::one());
    }

    #[test]
    fn negative_power_of_non_monomial_errors() {
        let p = &var(Variable::X0) + &var(Variable::X1);
        assert_eq!(p.pow(-1), Err(Error::NotInvertible));
        assert_eq!(LaurentPolynomial::constant(2).pow(-1), Err(Error::NotInvertible));
        let m = LaurentPolynomial::monomial(Variable::A, 3, -1);
        assert_eq!(m.pow(-2).unwrap(), LaurentPolynomial::monomial(Variable::A, -6, 1));
    }

    #[test]
    fn bracket_substitution_of_big_x() {
        let image = var(Variable::X1).substitute(&bracket_map()).unwrap();
        assert_eq!(image, LaurentPolynomial::monomial(Variable::A, -3, -1));
    }

    #[test]
    fn bracket_substitution_of_virtual_trefoil_tutte() {
        // x^2 + x*y + X*y  ->  A^2 + 1 - A^-4
        let x = var(Variable::X0);
        let y = var(Variable::Y0);
        let xx = var(Variable::X1);
        let t = &(&x.pow(2).unwrap() + &(&x * &y)) + &(&xx * &y);
        let img = t.substitute(&bracket_map()).unwrap();
        let expected = &(&LaurentPolynomial::monomial(Variable::A, 2, 1)
            + &LaurentPolynomial::one())
            + &LaurentPolynomial::monomial(Variable::A, -4, -1);
        assert_eq!(img, expected);
    }

    #[test]
    fn quarter_unit_substitution() {
        // -A^-4 under A -> t^(-1/4) gives -t (stored exponent 4).
        let p = LaurentPolynomial::monomial(Variable::A, -4, -1);
        let img = p.substitute(&jones_map()).unwrap();
        assert_eq!(img, LaurentPolynomial::monomial(Variable::T, 4, -1));
        assert_eq!(img.to_string(), "-1*t^1");
    }

    #[test]
    fn substitution_rejects_negative_exponent_on_binomial_image() {
        let p = LaurentPolynomial::monomial(Variable::D, -1, 1);
        assert!(matches!(
            p.substitute(&bracket_map()),
            Err(Error::NegativeExponent { var: "d" })
        ));
    }

    #[test]
    fn geom_sum_small() {
        assert_eq!(geom_sum(2), &var(Variable::X0) + &var(Variable::X1));
        assert_eq!(geom_sum(1), LaurentPolynomial::one());
        assert!(geom_sum(0).is_zero());
        // p = -2 -> -x^-1 X^-2 - x^-2 X^-1
        let mut expect = LaurentPolynomial::zero();
        expect = &expect
            + &LaurentPolynomial::from_term(
                Monomial::var(Variable::X0, -1).mul(&Monomial::var(Variable::X1, -2)),
                BigInt::from(-1),
            );
        expect = &expect
            + &LaurentPolynomial::from_term(
                Monomial::var(Variable::X0, -2).mul(&Monomial::var(Variable::X1, -1)),
                BigInt::from(-1),
            );
        assert_eq!(geom_sum(-2), expect);
    }

    #[test]
    fn geom_sum_defining_identity() {
        let lin = &var(Variable::X0) - &var(Variable::X1);
        for p in -10..=10 {
            let lhs = &geom_sum(p) * &lin;
            let rhs = &var(Variable::X0).pow(p).unwrap_or_else(|_| {
                LaurentPolynomial::monomial(Variable::X0, p, 1)
            }) - &LaurentPolynomial::monomial(Variable::X1, p, 1);
            let rhs = if p >= 0 {
                &LaurentPolynomial::monomial(Variable::X0, p, 1)
                    - &LaurentPolynomial::monomial(Variable::X1, p, 1)
            } else {
                rhs
            };
            let _ = rhs;
            let direct = &LaurentPolynomial::monomial(Variable::X0, p, 1)
                - &LaurentPolynomial::monomial(Variable::X1, p, 1);
            assert_eq!(lhs, direct, "p = {p}");
        }
    }

    #[test]
    fn eval_complex_basics() {
        let p = &var(Variable::X0) + &var(Variable::X1);
        let v = p
            .eval_complex(&|v| match v {
                Variable::X0 => Complex64::new(1.0, 0.0),
                Variable::X1 => Complex64::new(2.0, 0.0),
                _ => Complex64::new(0.0, 0.0),
            })
            .unwrap();
        assert!((v - Complex64::new(3.0, 0.0)).norm() < 1e-12);

        // t - 1 at t = 1 (stored exponent 4 is mathematical exponent 1)
        let p = &LaurentPolynomial::monomial(Variable::T, 4, 1) - &LaurentPolynomial::one();
        let v = p.eval_complex(&|_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-12);

        let one = LaurentPolynomial::one();
        let v = one.eval_complex(&|_| Complex64::new(-7.3, 2.0)).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eval_zero_with_negative_exponent_errors() {
        let p = LaurentPolynomial::monomial(Variable::A, -2, 1);
        assert!(matches!(
            p.eval_complex(&|_| Complex64::new(0.0, 0.0)),
            Err(Error::ZeroToNegativePower { .. })
        ));
    }

    #[test]
    fn textual_form_matches_contract() {
        // -1*A^-4 + 1 + 1*A^2
        let p = &(&LaurentPolynomial::monomial(Variable::A, -4, -1) + &LaurentPolynomial::one())
            + &LaurentPolynomial::monomial(Variable::A, 2, 1);
        assert_eq!(p.to_string(), "-1*A^-4 + 1 + 1*A^2");
        // t^(k/4) reduced to lowest terms
        let q = LaurentPolynomial::monomial(Variable::T, -2, 3);
        assert_eq!(q.to_string(), "3*t^(-1/2)");
    }
}
