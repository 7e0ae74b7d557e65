//! Exact rational arithmetic, one-variable polynomials and quasi-polynomials.
//!
//! Every value in this crate is exact. Polynomials carry rational
//! coefficients in ascending degree; whether a polynomial maps integers to
//! integers is decided once, at construction, from its values at
//! `0..=deg` (equivalently, integrality of its binomial-basis coefficients).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// One-variable polynomial in `u` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
    integer_valued: bool,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let integer_valued = binomial_coeffs_of(&coeffs).iter().all(Rational::is_integer);
        Poly {
            coeffs,
            integer_valued,
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Poly::new(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `u^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = Rational::one();
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_integer_valued(&self) -> bool {
        self.integer_valued
    }

    /// Coefficients `c_k` with `p(u) = sum_k c_k * binom(u, k)`.
    pub fn binomial_coeffs(&self) -> Vec<Rational> {
        binomial_coeffs_of(&self.coeffs)
    }

    pub fn eval(&self, t: &BigInt) -> Rational {
        let x = Rational::from_integer(t.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * &x + c)
    }

    pub fn eval_i64(&self, t: i64) -> Rational {
        self.eval(&BigInt::from(t))
    }

    /// Exact value at `t` when it is an integer.
    pub fn eval_int(&self, t: i64) -> Option<BigInt> {
        let v = self.eval_i64(t);
        v.is_integer().then(|| v.to_integer())
    }

    /// The polynomial `s -> p(offset + step * s)`.
    pub fn compose_affine(&self, offset: i64, step: i64) -> Poly {
        let lin = Poly::new(vec![rat(offset), rat(step)]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            &(&acc * &lin) + &Poly::constant(c.clone())
        })
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division over the rationals.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let Some(dd) = divisor.degree() else {
            return Err(Error::invalid("division by the zero polynomial"));
        };
        let lead = divisor.leading().expect("nonzero divisor").clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().expect("nonempty") / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &factor * c;
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Sign of `p(t)` for all sufficiently large `t`.
    pub fn eventual_sign(&self) -> Ordering {
        match self.leading() {
            None => Ordering::Equal,
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    /// Compares `self(t)` and `other(t)` for all sufficiently large `t`.
    pub fn eventual_cmp(&self, other: &Poly) -> Ordering {
        (self - other).eventual_sign()
    }

    /// Integer `R >= 0` such that `p` has no real root `t > R` (Cauchy bound).
    pub fn root_bound(&self) -> BigInt {
        let Some(lead) = self.leading() else {
            return BigInt::zero();
        };
        let max_ratio = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / lead).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        (max_ratio + Rational::one()).ceil().to_integer()
    }

    /// Text form `[c0, c1, ...]` in ascending degree.
    pub fn to_list_string(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }
}

fn binomial_coeffs_of(coeffs: &[Rational]) -> Vec<Rational> {
    // forward differences of the values at 0..=deg
    let n = coeffs.len();
    let mut vals: Vec<Rational> = (0..n)
        .map(|k| {
            let x = rat(k as i64);
            coeffs
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * &x + c)
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(vals[0].clone());
        vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

impl fmt::Display for Poly {
    /// Expression form in `t`, e.g. `1/2t^2 - 3/2t + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if k == 0 || !abs.is_one() {
                write!(f, "{abs}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// A function value that may be `-inf` (BOTTOM).
///
/// The derived ordering puts `Bottom` below every finite value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValue {
    Bottom,
    Finite(Rational),
}

impl ExtendedValue {
    pub fn int(v: impl Into<BigInt>) -> Self {
        ExtendedValue::Finite(Rational::from_integer(v.into()))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedValue::Bottom => None,
            ExtendedValue::Finite(v) => Some(v),
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, ExtendedValue::Bottom)
    }

    /// The value as an `i128` if it is a finite integer in range.
    pub fn to_i128(&self) -> Option<i128> {
        self.finite()
            .filter(|v| v.is_integer())
            .and_then(|v| v.to_integer().to_i128())
    }
}

impl From<i128> for ExtendedValue {
    fn from(v: i128) -> Self {
        ExtendedValue::int(v)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Bottom => write!(f, "-inf"),
            ExtendedValue::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// One residue-class component of a quasi-polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Bottom,
    Poly(Poly),
}

impl Component {
    pub fn eval(&self, t: i64) -> ExtendedValue {
        match self {
            Component::Bottom => ExtendedValue::Bottom,
            Component::Poly(p) => ExtendedValue::Finite(p.eval_i64(t)),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Bottom => write!(f, "-inf"),
            Component::Poly(p) => write!(f, "{p}"),
        }
    }
}

/// `f(t) = components[t mod d](t)` for every `t > threshold`.
///
/// Components are polynomials in the absolute parameter `t`, not in
/// `(t - r) / d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuasiPolynomial {
    components: Vec<Component>,
    threshold: i64,
}

impl QuasiPolynomial {
    pub fn new(components: Vec<Component>, threshold: i64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("quasi-polynomial needs period >= 1"));
        }
        Ok(QuasiPolynomial {
            components,
            threshold,
        })
    }

    /// A period-1 quasi-polynomial.
    pub fn polynomial(p: Poly, threshold: i64) -> Self {
        QuasiPolynomial {
            components: vec![Component::Poly(p)],
            threshold,
        }
    }

    pub fn period(&self) -> usize {
        self.components.len()
    }

    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_for(&self, t: i64) -> &Component {
        &self.components[t.rem_euclid(self.period() as i64) as usize]
    }

    pub fn eval(&self, t: i64) -> Result<ExtendedValue> {
        if t <= self.threshold {
            return Err(Error::BelowThreshold {
                t,
                threshold: self.threshold,
            });
        }
        Ok(self.component_for(t).eval(t))
    }

    /// The same function written with period `k * d`.
    pub fn lift(&self, k: usize) -> QuasiPolynomial {
        let d = self.period();
        QuasiPolynomial {
            components: (0..k * d).map(|i| self.components[i % d].clone()).collect(),
            threshold: self.threshold,
        }
    }

    /// True iff both agree for all sufficiently large `t`.
    pub fn eventually_equal(&self, other: &QuasiPolynomial) -> bool {
        let l = self.period().lcm(&other.period());
        (0..l).all(|i| {
            self.components[i % self.period()] == other.components[i % other.period()]
        })
    }
}

impl fmt::Display for QuasiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "period {} threshold {}", self.period(), self.threshold)?;
        for (r, c) in self.components.iter().enumerate() {
            writeln!(f, "  t = {r} mod {}: {c}", self.period())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Poly::from_ints(&[1, 0, 1]).eval(&big(3)), rat(10));
        let binom2 = Poly::new(vec![rat(0), ratio(-1, 2), ratio(1, 2)]);
        assert_eq!(binom2.eval_int(5), Some(big(10)));
        assert_eq!(Poly::zero().eval(&big(1_000_000)), rat(0));
    }

    #[test]
    fn integer_valued_examples() {
        let binom2 = Poly::new(vec![rat(0), ratio(-1, 2), ratio(1, 2)]);
        assert!(binom2.is_integer_valued());
        assert!(!Poly::new(vec![rat(0), ratio(1, 2)]).is_integer_valued());
        assert!(Poly::from_ints(&[0, -1, 3]).is_integer_valued());
        assert!(Poly::zero().is_integer_valued());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Poly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p, Poly::from_ints(&[1, 2]));
    }

    #[test]
    fn display_and_list_forms() {
        let p = Poly::new(vec![rat(1), ratio(-3, 2), ratio(1, 2)]);
        assert_eq!(p.to_list_string(), "[1, -3/2, 1/2]");
        assert_eq!(p.to_string(), "1/2t^2 - 3/2t + 1");
        assert_eq!(Poly::from_ints(&[-2, 1]).to_string(), "t - 2");
        assert_eq!(Poly::from_ints(&[0, -1]).to_string(), "-t");
    }

    #[test]
    fn compose_and_divide() {
        // (t, t - 2) on even t = 2s, divided by 2, gives (s, s - 1)
        let p = Poly::from_ints(&[-2, 1]).compose_affine(0, 2);
        assert_eq!(p, Poly::from_ints(&[-2, 2]));
        let (q, r) = p.div_rem(&Poly::from_ints(&[2])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_ints(&[-1, 1]));

        let (q, r) = Poly::from_ints(&[-1, 0, 1]).div_rem(&Poly::from_ints(&[1, 1])).unwrap();
        assert_eq!(q, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        let (_, r) = Poly::from_ints(&[1, 0, 1]).div_rem(&Poly::from_ints(&[0, 1])).unwrap();
        assert_eq!(r, Poly::from_ints(&[1]));
        assert!(Poly::from_ints(&[1]).div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn eventual_ordering_and_roots() {
        let a = Poly::from_ints(&[0, 1]);
        let b = Poly::from_ints(&[-100, 0, 1]);
        assert_eq!(a.eventual_cmp(&b), Ordering::Less);
        assert_eq!(b.eventual_cmp(&b), Ordering::Equal);
        assert_eq!(Poly::from_ints(&[-2, 1]).root_bound(), big(3));
    }

    #[test]
    fn bottom_is_least() {
        assert!(ExtendedValue::Bottom < ExtendedValue::int(-1_000_000));
        assert_eq!(ExtendedValue::Bottom, ExtendedValue::Bottom);
        assert!(ExtendedValue::int(3) > ExtendedValue::int(2));
    }

    #[test]
    fn qp_eval_examples() {
        let half = QuasiPolynomial::new(
            vec![
                Component::Poly(Poly::new(vec![rat(0), ratio(1, 2)])),
                Component::Poly(Poly::new(vec![ratio(-1, 2), ratio(1, 2)])),
            ],
            0,
        )
        .unwrap();
        assert_eq!(half.eval(7).unwrap(), ExtendedValue::int(3));

        let q = QuasiPolynomial::polynomial(Poly::from_ints(&[1, 1]), 0);
        assert_eq!(q.eval(41).unwrap(), ExtendedValue::int(42));

        let b = QuasiPolynomial::new(
            vec![Component::Bottom, Component::Poly(Poly::from_ints(&[0, 1]))],
            5,
        )
        .unwrap();
        assert_eq!(b.eval(8).unwrap(), ExtendedValue::Bottom);
        assert_eq!(b.eval(9).unwrap(), ExtendedValue::int(9));
        assert_eq!(
            b.eval(5),
            Err(Error::BelowThreshold { t: 5, threshold: 5 })
        );
        assert!(QuasiPolynomial::new(vec![], 0).is_err());
    }

    #[test]
    fn eventually_equal_examples() {
        let u = Component::Poly(Poly::from_ints(&[0, 1]));
        let q1 = QuasiPolynomial::new(vec![u.clone()], 0).unwrap();
        let q2 = QuasiPolynomial::new(vec![u.clone(), u.clone()], 0).unwrap();
        assert!(q1.eventually_equal(&q2));
        let q3 = QuasiPolynomial::polynomial(Poly::from_ints(&[1, 1]), 0);
        assert!(!q1.eventually_equal(&q3));
        let sq = Component::Poly(Poly::from_ints(&[0, 0, 1]));
        let a = QuasiPolynomial::new(vec![Component::Bottom, sq.clone()], 3).unwrap();
        let b = QuasiPolynomial::new(vec![Component::Bottom, sq], 9).unwrap();
        assert!(a.eventually_equal(&b));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(arb_rational(), 0..5).prop_map(Poly::new)
    }

    fn arb_qp() -> impl Strategy<Value = QuasiPolynomial> {
        let comp = prop_oneof![
            1 => Just(Component::Bottom),
            4 => (0i64..3).prop_map(|k| Component::Poly(Poly::from_ints(&[k, 1]))),
        ];
        (prop::collection::vec(comp, 1..4), -5i64..5)
            .prop_map(|(c, n)| QuasiPolynomial::new(c, n).unwrap())
    }

    proptest! {
        #[test]
        fn binomial_criterion_matches_consecutive_values(p in arb_poly(), start in -30i64..30) {
            let n = p.degree().map_or(1, |d| d + 1);
            let direct = (start..start + n as i64).all(|k| p.eval_i64(k).is_integer());
            prop_assert_eq!(direct, p.is_integer_valued());
        }

        #[test]
        fn integer_valued_polys_give_integers(
            b in prop::collection::vec(-10i64..10, 0..5),
            t in -200i64..200,
        ) {
            // sum_k b_k * binom(u, k) is integer-valued by construction
            let mut p = Poly::zero();
            let mut basis = Poly::from_ints(&[1]);
            for (k, bk) in b.iter().enumerate() {
                p = &p + &basis.scale(&rat(*bk));
                let next = Poly::new(vec![ratio(-(k as i64), k as i64 + 1), ratio(1, k as i64 + 1)]);
                basis = &basis * &next;
            }
            prop_assert!(p.is_integer_valued());
            prop_assert!(p.eval_int(t).is_some());
        }

        #[test]
        fn rationals_stay_normalized(a in arb_rational(), b in arb_rational()) {
            for v in [&a + &b, &a - &b, &a * &b] {
                let renorm = Rational::new(v.numer().clone(), v.denom().clone());
                prop_assert_eq!(&renorm, &v);
                prop_assert!(v.denom().is_positive());
            }
        }

        #[test]
        fn eventually_equal_is_an_equivalence(a in arb_qp(), b in arb_qp(), c in arb_qp(), k in 1usize..4) {
            prop_assert!(a.eventually_equal(&a));
            prop_assert_eq!(a.eventually_equal(&b), b.eventually_equal(&a));
            if a.eventually_equal(&b) && b.eventually_equal(&c) {
                prop_assert!(a.eventually_equal(&c));
            }
            prop_assert!(a.eventually_equal(&a.lift(k)));
            prop_assert_eq!(a.lift(k).eventually_equal(&b), a.eventually_equal(&b));
        }

        #[test]
        fn compose_matches_evaluation(p in arb_poly(), off in -5i64..5, step in 1i64..4, s in -20i64..20) {
            prop_assert_eq!(p.compose_affine(off, step).eval_i64(s), p.eval_i64(off + step * s));
        }
    }
}
