//! Frobenius quantities along polynomial families `P_1(t), ..., P_n(t)`:
//! gcd reduction, the box exponent `r`, the exclusion-problem construction
//! and the two independent ways of producing `F_{m,l}(P(t))` and
//! `G_m(P(t))`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::eqpfit::SampleSeries;
use crate::error::{Error, Result};
use crate::frobenius::{qualifying_bound, Limits, Profile, Tuple};
use crate::parallel::{self, Execution};
use crate::pilp::{exclusion_f_g, ExclusionProblem, ParametricConstraintSystem, Row};
use crate::qpoly::{rat, Component, ExtendedValue, Poly, QuasiPolynomial};

/// Integer-valued polynomials with positive leading coefficients, plus `m`
/// and `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFamily {
    polys: Vec<Poly>,
    m: u64,
    l: u64,
}

impl PolyFamily {
    pub fn new(polys: Vec<Poly>, m: u64, l: u64) -> Result<Self> {
        if polys.len() < 2 {
            return Err(Error::invalid("a family needs at least two polynomials"));
        }
        if m == 0 || l == 0 {
            return Err(Error::invalid("m and l must be positive"));
        }
        for (i, p) in polys.iter().enumerate() {
            if !p.is_integer_valued() {
                return Err(Error::invalid(format!("P{} = {p} is not integer-valued", i + 1)));
            }
            if p.eventual_sign() != Ordering::Greater {
                return Err(Error::invalid(format!(
                    "P{} = {p} does not have a positive leading coefficient",
                    i + 1
                )));
            }
        }
        Ok(PolyFamily { polys, m, l })
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn with_m_l(&self, m: u64, l: u64) -> Result<Self> {
        PolyFamily::new(self.polys.clone(), m, l)
    }

    /// `(P_1(t), ..., P_n(t))` as a tuple of positive integers.
    pub fn tuple_at(&self, t: i64) -> Result<Tuple> {
        let entries = self
            .polys
            .iter()
            .map(|p| {
                let v = p.eval_int(t).expect("integer-valued");
                match v.to_u64() {
                    Some(x) if x > 0 => Ok(x),
                    _ if v <= BigInt::from(0) => Err(Error::invalid(format!("{p} is not positive at t = {t}"))),
                    _ => Err(Error::Overflow("family value")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Tuple::new(entries)
    }

    /// Smallest `t0 >= 1` with every `P_i(t) > 0` for all `t >= t0`.
    pub fn positivity_start(&self) -> i64 {
        let bound = self
            .polys
            .iter()
            .map(Poly::root_bound)
            .max()
            .and_then(|b| b.to_i64())
            .unwrap_or(i64::MAX - 1)
            .max(0);
        let positive = |t: i64| self.polys.iter().all(|p| p.eval_i64(t) > rat(0));
        let mut t0 = bound + 1;
        while t0 > 1 && positive(t0 - 1) {
            t0 -= 1;
        }
        t0
    }

    pub fn check_range(&self, t_min: i64, t_max: i64) -> Result<()> {
        let t0 = self.positivity_start();
        if t_min < t0 {
            return Err(Error::invalid(format!(
                "t_min = {t_min} is below the positivity start {t0}"
            )));
        }
        if t_max < t_min {
            return Err(Error::invalid(format!("empty range {t_min}..={t_max}")));
        }
        Ok(())
    }

    /// `gcd(P_1(t), ..., P_n(t))` for `t` in `[t_min, t_max]`.
    pub fn gcd_series(&self, t_min: i64, t_max: i64) -> Result<SampleSeries> {
        self.check_range(t_min, t_max)?;
        let values = (t_min..=t_max)
            .map(|t| {
                let g = self
                    .polys
                    .iter()
                    .fold(BigInt::from(0), |g, p| g.gcd(&p.eval_int(t).expect("integer-valued")));
                ExtendedValue::int(g)
            })
            .collect();
        Ok(SampleSeries::from_values(t_min, values))
    }

    /// The family `s -> P_i(a + s d) / h(a + s d)` on residue `a` of the gcd
    /// quasi-polynomial `h` of period `d`.
    pub fn reduce_by_gcd(&self, gcd_fit: &QuasiPolynomial, residue: usize) -> Result<PolyFamily> {
        let d = gcd_fit.period();
        if residue >= d {
            return Err(Error::invalid(format!("residue {residue} is not below the period {d}")));
        }
        let h = match &gcd_fit.components()[residue] {
            Component::Poly(h) => h.compose_affine(residue as i64, d as i64),
            Component::Bottom => return Err(Error::invalid("gcd component cannot be -inf")),
        };
        let reduced = self
            .polys
            .iter()
            .map(|p| {
                let shifted = p.compose_affine(residue as i64, d as i64);
                let (q, rem) = shifted.div_rem(&h)?;
                if !rem.is_zero() || !q.is_integer_valued() {
                    return Err(Error::NonIntegerQuotient(format!("({shifted}) / ({h})")));
                }
                Ok(q)
            })
            .collect::<Result<Vec<_>>>()?;
        PolyFamily::new(reduced, self.m, self.l)
            .map_err(|e| Error::NonIntegerQuotient(e.to_string()))
    }

    /// Polynomials sorted by eventual size, ascending, duplicates removed.
    fn eventual_order(&self) -> Vec<&Poly> {
        let mut sorted: Vec<&Poly> = self.polys.iter().collect();
        sorted.sort_by(|a, b| a.eventual_cmp(b));
        sorted.dedup();
        sorted
    }

    /// Smallest `r` with `deg(l + m P_(1) P_(2) + EG(P)) < r`, where the
    /// Erdos-Graham term `2 x_{n-1} floor(x_n / n) - x_n` has degree
    /// `deg x_{n-1} + deg x_n`.
    pub fn exponent_r(&self) -> u32 {
        let by_size = self.eventual_order();
        let mut all: Vec<&Poly> = self.polys.iter().collect();
        all.sort_by(|a, b| a.eventual_cmp(b));
        let deg = |p: &Poly| p.degree().unwrap_or(0);
        let product = deg(all[0]) + deg(all[1]);
        let eg = match by_size.len() {
            1 => 0,
            k => deg(by_size[k - 2]) + deg(by_size[k - 1]),
        };
        product.max(eg) as u32 + 1
    }

    /// Why the exclusion construction with exponent `r` is not valid at `t`,
    /// or `None` if it is.
    pub fn invalid_reason(&self, t: i64, r: u32) -> Option<String> {
        if t < 2 {
            return Some(format!("t = {t} is below 2"));
        }
        let tuple = match self.tuple_at(t) {
            Ok(x) => x,
            Err(e) => return Some(e.to_string()),
        };
        if tuple.gcd() != 1 {
            return Some(format!("gcd of the family is {} at t = {t}", tuple.gcd()));
        }
        let bound = match qualifying_bound(&tuple, self.m) {
            Ok(b) => b,
            Err(e) => return Some(e.to_string()),
        };
        match i128::from(t).checked_pow(r) {
            Some(tr) if bound + i128::from(self.l) < tr => None,
            Some(tr) => Some(format!("bound {} + l is not below t^r = {tr}", bound)),
            None => Some("t^r overflows".to_string()),
        }
    }

    /// `k - sum b_i P_i(t) = l` on `[0, t^r - 1]^{n+1}`, kept coordinate
    /// `k`, objective `k`. The `b_i` are ordered by decreasing eventual size.
    pub fn frobenius_to_exclusion(&self, r: u32) -> Result<ExclusionProblem> {
        let n = self.polys.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| self.polys[j].eventual_cmp(&self.polys[i]).then(i.cmp(&j)));
        let one = Poly::constant(rat(1));
        let top = &Poly::monomial(r as usize) - &one;
        let mut eq = vec![one.clone()];
        eq.extend(order.iter().map(|&i| -&self.polys[i]));
        let mut rows = vec![Row::eq(eq, Poly::constant(rat(self.l as i64)))];
        for k in 0..=n {
            let mut coeffs = vec![Poly::zero(); n + 1];
            coeffs[k] = one.clone();
            rows.push(Row::le(coeffs, top.clone()));
        }
        let sys1 = ParametricConstraintSystem::nonneg(n + 1, rows)?;
        let sys2 = ParametricConstraintSystem::nonneg(1, vec![Row::le(vec![one.clone()], top)])?;
        ExclusionProblem::new(self.m, n, 1, sys1, sys2, vec![one])
    }

    /// `(F_{m,l}(P(t)), G_m(P(t)))` straight from the representation counts.
    pub fn direct_values(&self, t: i64, limits: &Limits) -> Result<(i128, u64)> {
        let profile = Profile::compute(&self.tuple_at(t)?, self.m, limits)?;
        Ok((profile.f(self.l), profile.g()))
    }

    /// `F_{m,l}(P(t))` and `G_m(P(t))` for `t` in `[t_min, t_max]`.
    pub fn parametric_frobenius_series(
        &self,
        t_min: i64,
        t_max: i64,
        exec: Execution,
    ) -> Result<(SampleSeries, SampleSeries)> {
        self.check_range(t_min, t_max)?;
        let ts: Vec<i64> = (t_min..=t_max).collect();
        let limits = Limits::default();
        let values = parallel::try_map(exec, &ts, |&t| self.direct_values(t, &limits))?;
        let f = values.iter().map(|(f, _)| ExtendedValue::from(*f)).collect();
        let g = values.iter().map(|(_, g)| ExtendedValue::from(i128::from(*g))).collect();
        Ok((SampleSeries::from_values(t_min, f), SampleSeries::from_values(t_min, g)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossStatus {
    Equal,
    Diff,
    Skipped(String),
}

/// Both paths at one `t`. The exclusion columns hold `f_l(t) - l` and
/// `g(t) - l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossRow {
    pub t: i64,
    pub direct: Option<(i128, u64)>,
    pub exclusion: Option<(ExtendedValue, i128)>,
    pub skipped: Option<String>,
}

impl CrossRow {
    pub fn status(&self) -> CrossStatus {
        if let Some(reason) = &self.skipped {
            return CrossStatus::Skipped(reason.clone());
        }
        match (&self.direct, &self.exclusion) {
            (Some((df, dg)), Some((ef, eg))) if *ef == ExtendedValue::from(*df) && *eg == i128::from(*dg) => {
                CrossStatus::Equal
            }
            _ => CrossStatus::Diff,
        }
    }

    pub fn f_matches(&self) -> bool {
        matches!((&self.direct, &self.exclusion), (Some((df, _)), Some((ef, _))) if *ef == ExtendedValue::from(*df))
    }

    /// `(g(t) - l) - G_m(P(t))`.
    pub fn g_offset(&self) -> Option<i128> {
        match (&self.direct, &self.exclusion) {
            (Some((_, dg)), Some((_, eg))) => Some(eg - i128::from(*dg)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub r: u32,
    pub rows: Vec<CrossRow>,
}

impl CrossCheck {
    pub fn compared(&self) -> impl Iterator<Item = &CrossRow> {
        self.rows.iter().filter(|r| r.skipped.is_none())
    }

    /// The common value of `g_offset` over all compared rows, if there is one.
    pub fn constant_g_offset(&self) -> Option<i128> {
        let mut offsets = self.compared().map(CrossRow::g_offset);
        let first = offsets.next()??;
        offsets.all(|o| o == Some(first)).then_some(first)
    }
}

/// Runs the exclusion construction and the direct computation at every `t`
/// in `[t_min, t_max]`. Values of `t` where the construction is not valid, or
/// where `t^r` exceeds `point_cap`, are skipped with a reason.
pub fn crosscheck(
    fam: &PolyFamily,
    t_min: i64,
    t_max: i64,
    point_cap: usize,
    exec: Execution,
) -> Result<CrossCheck> {
    fam.check_range(t_min, t_max)?;
    let r = fam.exponent_r();
    let ex = fam.frobenius_to_exclusion(r)?;
    let limits = Limits::default();
    let ts: Vec<i64> = (t_min..=t_max).collect();
    let rows = parallel::try_map(exec, &ts, |&t| -> Result<CrossRow> {
        let skip = |reason: String| CrossRow {
            t,
            direct: None,
            exclusion: None,
            skipped: Some(reason),
        };
        if let Some(reason) = fam.invalid_reason(t, r) {
            return Ok(skip(reason));
        }
        let box_size = i128::from(t).pow(r);
        if box_size > point_cap as i128 {
            return Ok(skip(format!("t^r = {box_size} exceeds the point cap {point_cap}")));
        }
        let direct = fam.direct_values(t, &limits)?;
        let (f, g) = exclusion_f_g(&ex, fam.l as usize, t, point_cap)?;
        let l = i128::from(fam.l);
        let f_l = match f.last().expect("l >= 1") {
            ExtendedValue::Finite(v) => ExtendedValue::Finite(v - rat(fam.l as i64)),
            ExtendedValue::Bottom => ExtendedValue::Bottom,
        };
        Ok(CrossRow {
            t,
            direct: Some(direct),
            exclusion: Some((f_l, i128::from(g) - l)),
            skipped: None,
        })
    })?;
    Ok(CrossCheck { r, rows })
}

/// `h(t)` evaluated exactly, for callers holding a gcd fit.
pub fn gcd_at(gcd_fit: &QuasiPolynomial, t: i64) -> Option<BigInt> {
    match gcd_fit.component_for(t) {
        Component::Poly(p) => p.eval_int(t),
        Component::Bottom => None,
    }
    .filter(|g| *g >= BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqpfit::{fit_eqp, FitConfig};
    use crate::frobenius::{frobenius_number, rep_count_exact};

    fn fam(polys: &[&[i64]], m: u64, l: u64) -> PolyFamily {
        PolyFamily::new(polys.iter().map(|c| Poly::from_ints(c)).collect(), m, l).unwrap()
    }

    fn small_cfg() -> FitConfig {
        FitConfig {
            d_max: 4,
            deg_max: 2,
            holdout: 8,
            min_support: 5,
        }
    }

    #[test]
    fn construction_checks() {
        assert!(PolyFamily::new(vec![Poly::from_ints(&[-10, 1])], 1, 1).is_err());
        assert!(PolyFamily::new(vec![Poly::from_ints(&[0, 1]), Poly::from_ints(&[0, -1])], 1, 1).is_err());
        assert!(PolyFamily::new(vec![Poly::from_ints(&[0, 1]), Poly::from_ints(&[0, 1])], 0, 1).is_err());
    }

    #[test]
    fn positivity() {
        assert_eq!(fam(&[&[0, 1], &[-2, 1]], 1, 1).positivity_start(), 3);
        assert_eq!(fam(&[&[1, 0, 1], &[-1, 2, 1]], 1, 1).positivity_start(), 1);
        assert_eq!(fam(&[&[6, -5, 1], &[0, 1]], 1, 1).positivity_start(), 4);
    }

    #[test]
    fn gcd_fits() {
        let f = fam(&[&[0, 1], &[-2, 1]], 1, 1);
        let s = f.gcd_series(3, 60).unwrap();
        let qp = fit_eqp(&s, &small_cfg()).unwrap().qp().cloned().unwrap();
        assert_eq!(qp.period(), 2);
        assert_eq!(qp.components()[0], Component::Poly(Poly::from_ints(&[2])));
        assert_eq!(qp.components()[1], Component::Poly(Poly::from_ints(&[1])));

        let coprime = fam(&[&[0, 1], &[1, 1]], 1, 1).gcd_series(1, 40).unwrap();
        let qp = fit_eqp(&coprime, &small_cfg()).unwrap().qp().cloned().unwrap();
        assert_eq!(qp, QuasiPolynomial::polynomial(Poly::from_ints(&[1]), 0));

        let lin = fam(&[&[0, 2], &[0, 4]], 1, 1).gcd_series(1, 40).unwrap();
        let qp = fit_eqp(&lin, &small_cfg()).unwrap().qp().cloned().unwrap();
        assert_eq!(qp.components(), &[Component::Poly(Poly::from_ints(&[0, 2]))]);
    }

    #[test]
    fn reduce_examples() {
        let f = fam(&[&[0, 1], &[-2, 1]], 1, 1);
        let qp = fit_eqp(&f.gcd_series(3, 60).unwrap(), &small_cfg()).unwrap().qp().cloned().unwrap();
        let even = f.reduce_by_gcd(&qp, 0).unwrap();
        assert_eq!(even.polys(), &[Poly::from_ints(&[0, 1]), Poly::from_ints(&[-1, 1])]);
        let odd = f.reduce_by_gcd(&qp, 1).unwrap();
        assert_eq!(odd.polys(), &[Poly::from_ints(&[1, 2]), Poly::from_ints(&[-1, 2])]);
        // numerically: P(a + s d) = h * reduced(s)
        for s in 2..20i64 {
            let t = 2 * s;
            let g = gcd_at(&qp, t).unwrap();
            for (p, q) in f.polys().iter().zip(even.polys()) {
                assert_eq!(p.eval_int(t).unwrap(), g.clone() * q.eval_int(s).unwrap());
            }
        }
        let wrong = QuasiPolynomial::polynomial(Poly::from_ints(&[3]), 0);
        assert!(matches!(f.reduce_by_gcd(&wrong, 0), Err(Error::NonIntegerQuotient(_))));
    }

    #[test]
    fn reduction_scales_frobenius() {
        // F_{m,l}(P(t)) = h(t) F_{m,l}(P(t) / h(t))
        let f = fam(&[&[0, 1], &[-2, 1]], 2, 2);
        let qp = fit_eqp(&f.gcd_series(3, 60).unwrap(), &small_cfg()).unwrap().qp().cloned().unwrap();
        let even = f.reduce_by_gcd(&qp, 0).unwrap();
        let limits = Limits::default();
        for s in 2..15i64 {
            let (full, g_full) = f.direct_values(2 * s, &limits).unwrap();
            let (red, g_red) = even.direct_values(s, &limits).unwrap();
            assert_eq!(full, 2 * red);
            assert_eq!(g_full, g_red);
        }
    }

    #[test]
    fn exponents() {
        assert_eq!(fam(&[&[0, 1], &[1, 1]], 1, 1).exponent_r(), 3);
        assert_eq!(fam(&[&[0, 1], &[-1, 1]], 1, 1).exponent_r(), 3);
        let cubic_family = fam(&[&[0, 1], &[1, 0, 1], &[-1, 2, 1]], 1, 1);
        assert_eq!(cubic_family.exponent_r(), 5);
        assert!(cubic_family.with_m_l(2, 1).unwrap().exponent_r() >= 5);
        let f = fam(&[&[0, 1], &[1, 1]], 1, 1);
        for t in 2..=100 {
            assert_eq!(f.invalid_reason(t, 3), None, "t = {t}");
        }
    }

    #[test]
    fn cubic_family_bound() {
        let f = fam(&[&[0, 1], &[1, 0, 1], &[-1, 2, 1]], 1, 1);
        let (d, _) = f.parametric_frobenius_series(3, 40, Execution::default()).unwrap();
        for (t, v) in d.iter() {
            let v = v.to_i128().unwrap();
            assert!(0 <= v && v < i128::from(t).pow(3), "t = {t}: {v}");
        }
    }

    #[test]
    fn series_matches_frobenius_module() {
        let f = fam(&[&[0, 1], &[-2, 1]], 1, 1);
        let (fs, gs) = f.parametric_frobenius_series(4, 30, Execution::Sequential).unwrap();
        for t in 4..=30i64 {
            let tuple = f.tuple_at(t).unwrap();
            assert_eq!(fs.get(t).unwrap().to_i128().unwrap(), frobenius_number(&tuple).unwrap());
            assert!(gs.get(t).unwrap().to_i128().unwrap() >= 0);
        }
        assert!(f.parametric_frobenius_series(2, 10, Execution::Sequential).is_err());
    }

    /// `F_{m,l}` from the exact counting oracle on `[-l, limit]`.
    fn oracle_f(tuple: &Tuple, m: u64, l: u64, limit: u64) -> i128 {
        let lim = Limits::default();
        let mut q: Vec<i128> = (0..=limit)
            .filter(|&k| rep_count_exact(tuple, k, &lim).unwrap() < u128::from(m))
            .map(i128::from)
            .collect();
        q.extend((1..=l as i128).map(|k| -k));
        q.sort_unstable_by(|a, b| b.cmp(a));
        q[l as usize - 1]
    }

    #[test]
    fn crosscheck_linear_family() {
        for (m, l) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let f = fam(&[&[0, 1], &[-1, 1]], m, l);
            let cc = crosscheck(&f, 2, 12, 1_000_000, Execution::default()).unwrap();
            assert_eq!(cc.r, 3);
            assert!(cc.compared().count() >= 8);
            for row in cc.compared() {
                assert!(row.f_matches(), "m = {m}, l = {l}, t = {}", row.t);
                let tuple = f.tuple_at(row.t).unwrap();
                assert_eq!(row.direct.unwrap().0, oracle_f(&tuple, m, l, 400));
            }
            let expected_offset = if m >= 2 { 1 } else { 0 };
            assert_eq!(cc.constant_g_offset(), Some(expected_offset));
            if m == 1 {
                assert!(cc.compared().all(|r| r.status() == CrossStatus::Equal));
            }
        }
    }

    #[test]
    fn crosscheck_skips() {
        let f = fam(&[&[0, 1], &[-1, 1]], 1, 1);
        let cc = crosscheck(&f, 2, 12, 500, Execution::Sequential).unwrap();
        let skipped: Vec<i64> = cc.rows.iter().filter(|r| r.skipped.is_some()).map(|r| r.t).collect();
        assert_eq!(skipped, (8..=12).collect::<Vec<_>>());
        // gcd 2 at even t
        let g = fam(&[&[0, 1], &[-2, 1]], 1, 1);
        let cc = crosscheck(&g, 4, 9, 10_000, Execution::Sequential).unwrap();
        for row in &cc.rows {
            assert_eq!(row.skipped.is_some(), row.t % 2 == 0);
        }
    }
}
