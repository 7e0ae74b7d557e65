//! Fitting eventually quasi-polynomial structure to exact sample series.
//!
//! For each candidate period `d` the training samples are split by
//! `t mod d`. A class fits when its trailing values are all BOTTOM, or when
//! the polynomial through the earliest `deg_max + 1` of its trailing
//! `min_support` points reproduces all of them. The threshold is the largest
//! training `t` at which some class departs from its fit. The smallest `d`
//! whose fit also reproduces the held-out tail wins.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::qpoly::{rat, Component, ExtendedValue, Poly, QuasiPolynomial, Rational};

/// Appended to every NO_FIT verdict.
pub const NO_FIT_NOTE: &str =
    "bounded search only: no quasi-polynomial within the configured period and degree limits fits; this is not a proof that none exists";

/// Samples at every integer `t` in `[t_min, t_max]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSeries {
    samples: BTreeMap<i64, ExtendedValue>,
}

impl SampleSeries {
    pub fn new(samples: BTreeMap<i64, ExtendedValue>) -> Result<Self> {
        if let (Some((&lo, _)), Some((&hi, _))) = (samples.first_key_value(), samples.last_key_value()) {
            if (hi - lo + 1) as usize != samples.len() {
                return Err(Error::invalid(format!("series keys in [{lo}, {hi}] are not contiguous")));
            }
        }
        Ok(SampleSeries { samples })
    }

    pub fn from_values(t_min: i64, values: Vec<ExtendedValue>) -> Self {
        SampleSeries {
            samples: (t_min..).zip(values).collect(),
        }
    }

    pub fn from_fn(t_min: i64, t_max: i64, f: impl Fn(i64) -> ExtendedValue) -> Self {
        SampleSeries {
            samples: (t_min..=t_max).map(|t| (t, f(t))).collect(),
        }
    }

    pub fn t_min(&self) -> Option<i64> {
        self.samples.keys().next().copied()
    }

    pub fn t_max(&self) -> Option<i64> {
        self.samples.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn get(&self, t: i64) -> Option<&ExtendedValue> {
        self.samples.get(&t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &ExtendedValue)> + '_ {
        self.samples.iter().map(|(t, v)| (*t, v))
    }

    pub fn samples(&self) -> &BTreeMap<i64, ExtendedValue> {
        &self.samples
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FitConfig {
    pub d_max: usize,
    pub deg_max: usize,
    pub holdout: usize,
    pub min_support: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig::with_limits(24, 6)
    }
}

impl FitConfig {
    /// `holdout = 2 d_max` and `min_support = deg_max + 3`.
    pub fn with_limits(d_max: usize, deg_max: usize) -> Self {
        FitConfig {
            d_max,
            deg_max,
            holdout: 2 * d_max,
            min_support: deg_max + 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_max == 0 {
            return Err(Error::invalid("d_max must be at least 1"));
        }
        if self.min_support < self.deg_max + 2 {
            return Err(Error::invalid(format!(
                "min_support = {} must be at least deg_max + 2 = {}",
                self.min_support,
                self.deg_max + 2
            )));
        }
        Ok(())
    }
}

/// Why a period or one of its residue classes was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// Fewer training points than `min_support` in some class.
    InsufficientSupport { have: usize, need: usize },
    /// The trailing values mix BOTTOM and finite values.
    MixedBottom,
    /// No polynomial of degree at most `deg_max` fits the trailing values.
    Inconsistent,
    /// Training fit, but the held-out sample at `t` disagrees.
    HoldoutMismatch { t: i64 },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::InsufficientSupport { have, need } => {
                write!(f, "insufficient support ({have} training points, need {need})")
            }
            Failure::MixedBottom => write!(f, "trailing values mix -inf and finite values"),
            Failure::Inconsistent => write!(f, "no polynomial of degree <= deg_max fits the tail"),
            Failure::HoldoutMismatch { t } => write!(f, "holdout disagrees at t = {t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub d: usize,
    /// `None` when the failure concerns the period as a whole.
    pub residue: Option<usize>,
    pub failure: Failure,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.residue {
            Some(r) => write!(f, "d = {} residue {}: {}", self.d, r, self.failure),
            None => write!(f, "d = {}: {}", self.d, self.failure),
        }
    }
}

/// Agreement of a quasi-polynomial with the samples above its threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checked: usize,
    pub agree: usize,
    pub first_disagreement: Option<i64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.agree == self.checked
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FitResult {
    Fit {
        qp: QuasiPolynomial,
        /// Check of the fit against the held-out samples.
        holdout: ValidationReport,
    },
    NoFit {
        diagnostics: Vec<Diagnostic>,
    },
}

impl FitResult {
    pub fn qp(&self) -> Option<&QuasiPolynomial> {
        match self {
            FitResult::Fit { qp, .. } => Some(qp),
            FitResult::NoFit { .. } => None,
        }
    }

    pub fn is_fit(&self) -> bool {
        matches!(self, FitResult::Fit { .. })
    }
}

/// Newton form through `points`, expanded to ascending coefficients.
fn newton(points: &[(i64, Rational)]) -> Poly {
    let k = points.len();
    let xs: Vec<Rational> = points.iter().map(|(t, _)| rat(*t)).collect();
    let mut dd: Vec<Rational> = points.iter().map(|(_, v)| v.clone()).collect();
    for level in 1..k {
        for i in (level..k).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut poly = Poly::zero();
    for i in (0..k).rev() {
        let shift = Poly::new(vec![-xs[i].clone(), rat(1)]);
        poly = &(&poly * &shift) + &Poly::constant(dd[i].clone());
    }
    poly
}

/// The polynomial through the first `deg_max + 1` points, if it also passes
/// through every remaining point; `None` otherwise or when there are too few
/// points to determine it.
pub fn interpolate_component(points: &[(i64, Rational)], deg_max: usize) -> Option<Poly> {
    if points.len() < deg_max + 1 {
        return None;
    }
    let p = newton(&points[..deg_max + 1]);
    points[deg_max + 1..]
        .iter()
        .all(|(t, v)| p.eval_i64(*t) == *v)
        .then_some(p)
}

/// Fit of one residue class: its component and the last training `t` where
/// the class departs from it.
fn fit_class(
    class: &[(i64, &ExtendedValue)],
    cfg: &FitConfig,
) -> std::result::Result<(Component, Option<i64>), Failure> {
    let tail = &class[class.len() - cfg.min_support..];
    if tail.iter().all(|(_, v)| v.is_bottom()) {
        let last_finite = class.iter().rev().find(|(_, v)| !v.is_bottom()).map(|(t, _)| *t);
        return Ok((Component::Bottom, last_finite));
    }
    let finite: Option<Vec<(i64, Rational)>> =
        tail.iter().map(|(t, v)| v.finite().map(|x| (*t, x.clone()))).collect();
    let finite = finite.ok_or(Failure::MixedBottom)?;
    let p = interpolate_component(&finite, cfg.deg_max).ok_or(Failure::Inconsistent)?;
    let comp = Component::Poly(p);
    let departs = class.iter().rev().find(|(t, v)| comp.eval(*t) != **v).map(|(t, _)| *t);
    Ok((comp, departs))
}

fn fit_period(
    train: &[(i64, &ExtendedValue)],
    holdout: &[(i64, &ExtendedValue)],
    d: usize,
    cfg: &FitConfig,
) -> std::result::Result<(QuasiPolynomial, ValidationReport), Vec<Diagnostic>> {
    let t_min = train[0].0;
    let mut classes: Vec<Vec<(i64, &ExtendedValue)>> = vec![Vec::new(); d];
    for &(t, v) in train {
        classes[t.rem_euclid(d as i64) as usize].push((t, v));
    }
    let mut components = Vec::with_capacity(d);
    let mut threshold = t_min - 1;
    let mut diagnostics = Vec::new();
    for (residue, class) in classes.iter().enumerate() {
        match fit_class(class, cfg) {
            Ok((comp, departs)) => {
                if let Some(t) = departs {
                    threshold = threshold.max(t);
                }
                components.push(comp);
            }
            Err(failure) => diagnostics.push(Diagnostic {
                d,
                residue: Some(residue),
                failure,
            }),
        }
    }
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let qp = QuasiPolynomial::new(components, threshold).expect("d >= 1");
    let report = compare(&qp, holdout.iter().map(|(t, v)| (*t, *v)));
    match report.first_disagreement {
        None => Ok((qp, report)),
        Some(t) => Err(vec![Diagnostic {
            d,
            residue: None,
            failure: Failure::HoldoutMismatch { t },
        }]),
    }
}

fn compare<'a>(qp: &QuasiPolynomial, samples: impl Iterator<Item = (i64, &'a ExtendedValue)>) -> ValidationReport {
    let mut report = ValidationReport {
        checked: 0,
        agree: 0,
        first_disagreement: None,
    };
    for (t, v) in samples.filter(|(t, _)| *t > qp.threshold()) {
        report.checked += 1;
        if qp.component_for(t).eval(t) == *v {
            report.agree += 1;
        } else if report.first_disagreement.is_none() {
            report.first_disagreement = Some(t);
        }
    }
    report
}

/// Compares `qp` with every sample above its threshold.
pub fn validate(qp: &QuasiPolynomial, s: &SampleSeries) -> ValidationReport {
    compare(qp, s.iter())
}

pub fn fit_eqp(s: &SampleSeries, cfg: &FitConfig) -> Result<FitResult> {
    fit_eqp_with(s, cfg, Execution::default())
}

/// Tries `d = 1..=d_max` and returns the smallest period that fits. Periods
/// whose classes would have fewer than `min_support` training points are
/// reported rather than tried; only a series too short for `d = 1` is an
/// error.
pub fn fit_eqp_with(s: &SampleSeries, cfg: &FitConfig, exec: Execution) -> Result<FitResult> {
    cfg.validate()?;
    let all: Vec<(i64, &ExtendedValue)> = s.iter().collect();
    let n_train = all.len().saturating_sub(cfg.holdout);
    if n_train < cfg.min_support {
        return Err(Error::InsufficientData(format!(
            "{} samples leave {n_train} for training after a holdout of {}, need at least {}",
            all.len(),
            cfg.holdout,
            cfg.min_support
        )));
    }
    let (train, holdout) = all.split_at(n_train);
    // the smallest class for period d has floor(n_train / d) points
    let supported: Vec<usize> = (1..=cfg.d_max).filter(|d| n_train / d >= cfg.min_support).collect();
    let unsupported = cfg.d_max - supported.len();

    let outcomes = parallel::map(exec, &supported, |&d| fit_period(train, holdout, d, cfg));
    let mut diagnostics = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok((qp, report)) => return Ok(FitResult::Fit { qp, holdout: report }),
            Err(mut diag) => diagnostics.append(&mut diag),
        }
    }
    if unsupported > 0 {
        let d = supported.len() + 1;
        diagnostics.push(Diagnostic {
            d,
            residue: None,
            failure: Failure::InsufficientSupport {
                have: n_train / d,
                need: cfg.min_support,
            },
        });
    }
    Ok(FitResult::NoFit { diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::ratio;
    use proptest::prelude::*;

    fn pts(v: &[(i64, i64)]) -> Vec<(i64, Rational)> {
        v.iter().map(|&(t, y)| (t, rat(y))).collect()
    }

    fn int_series(t_min: i64, t_max: i64, f: impl Fn(i64) -> i64) -> SampleSeries {
        SampleSeries::from_fn(t_min, t_max, |t| ExtendedValue::int(f(t)))
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(
            interpolate_component(&pts(&[(1, 2), (2, 3), (3, 4), (4, 5)]), 1),
            Some(Poly::from_ints(&[1, 1]))
        );
        assert_eq!(
            interpolate_component(&pts(&[(1, 1), (2, 4), (3, 9), (4, 16), (5, 25)]), 2),
            Some(Poly::from_ints(&[0, 0, 1]))
        );
        assert_eq!(interpolate_component(&pts(&[(1, 1), (2, 2), (3, 4)]), 1), None);
    }

    #[test]
    fn floor_half() {
        let s = int_series(1, 60, |t| t / 2);
        let fit = fit_eqp(&s, &FitConfig::with_limits(6, 2)).unwrap();
        let qp = fit.qp().expect("fit");
        assert_eq!(qp.period(), 2);
        assert_eq!(qp.components()[0], Component::Poly(Poly::new(vec![rat(0), ratio(1, 2)])));
        assert_eq!(qp.components()[1], Component::Poly(Poly::new(vec![ratio(-1, 2), ratio(1, 2)])));
        assert_eq!(validate(qp, &s).first_disagreement, None);
    }

    #[test]
    fn threshold_is_last_departure() {
        // constant 5 from t = 10 on, noise before
        let s = int_series(1, 80, |t| if t < 10 { t * t } else { 5 });
        let cfg = FitConfig::with_limits(4, 2);
        let qp = fit_eqp(&s, &cfg).unwrap().qp().cloned().unwrap();
        assert_eq!(qp.period(), 1);
        assert_eq!(qp.threshold(), 9);
    }

    #[test]
    fn bottom_components() {
        let s = SampleSeries::from_fn(1, 90, |t| {
            if t % 3 == 0 {
                ExtendedValue::Bottom
            } else {
                ExtendedValue::int(2 * t)
            }
        });
        let qp = fit_eqp(&s, &FitConfig::with_limits(6, 2)).unwrap().qp().cloned().unwrap();
        assert_eq!(qp.period(), 3);
        assert_eq!(qp.components()[0], Component::Bottom);
        assert_eq!(validate(&qp, &s).first_disagreement, None);
    }

    #[test]
    fn mixed_bottom_tail_fails() {
        let s = SampleSeries::from_fn(1, 40, |t| {
            if t % 7 == 3 {
                ExtendedValue::Bottom
            } else {
                ExtendedValue::int(1)
            }
        });
        let cfg = FitConfig::with_limits(2, 1);
        match fit_eqp(&s, &cfg).unwrap() {
            FitResult::NoFit { diagnostics } => {
                assert!(diagnostics.iter().any(|d| d.failure == Failure::MixedBottom));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_series_has_no_fit() {
        // the held-out tail straddles t = 256, where floor(log2 t) steps
        let s = int_series(1, 260, |t| t * (63 - (t as u64).leading_zeros() as i64));
        let cfg = FitConfig {
            d_max: 6,
            deg_max: 4,
            holdout: 12,
            min_support: 6,
        };
        assert!(!fit_eqp(&s, &cfg).unwrap().is_fit());
    }

    #[test]
    fn insufficient_data() {
        let s = int_series(1, 20, |t| t);
        assert!(matches!(fit_eqp(&s, &FitConfig::default()), Err(Error::InsufficientData(_))));
        let bad = FitConfig {
            min_support: 3,
            ..FitConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn unsupported_periods_are_reported() {
        let s = int_series(1, 40, |t| t * t * t * (t % 5));
        let cfg = FitConfig::with_limits(24, 2);
        // 40 - 48 < 0 training points
        assert!(fit_eqp(&s, &cfg).is_err());
        let cfg = FitConfig {
            holdout: 4,
            ..FitConfig::with_limits(24, 2)
        };
        match fit_eqp(&s, &cfg).unwrap() {
            FitResult::NoFit { diagnostics } => {
                assert!(matches!(
                    diagnostics.last().unwrap().failure,
                    Failure::InsufficientSupport { .. }
                ));
            }
            FitResult::Fit { .. } => panic!("cubic times t mod 5 is out of reach"),
        }
    }

    #[test]
    fn validate_examples() {
        let s = int_series(3, 20, |t| t + 1);
        let r = validate(&QuasiPolynomial::polynomial(Poly::from_ints(&[0, 1]), 0), &s);
        assert_eq!(r.first_disagreement, Some(3));
        assert_eq!(r.agree, 0);
        assert!(!r.passed());
    }

    #[test]
    fn contiguity() {
        let mut m = BTreeMap::new();
        m.insert(1, ExtendedValue::int(1));
        m.insert(3, ExtendedValue::int(1));
        assert!(SampleSeries::new(m).is_err());
    }

    fn component_strategy(deg_max: usize) -> impl Strategy<Value = Component> {
        prop_oneof![
            1 => Just(Component::Bottom),
            6 => prop::collection::vec((-20i64..=20, 1i64..=4), 1..=deg_max + 1)
                .prop_map(|c| Component::Poly(Poly::new(c.iter().map(|&(n, d)| ratio(n, d)).collect()))),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn round_trip(comps in prop::collection::vec(component_strategy(3), 1..=4)) {
            let q = QuasiPolynomial::new(comps, 0).unwrap();
            let cfg = FitConfig { d_max: 8, deg_max: 3, holdout: 16, min_support: 6 };
            let s = SampleSeries::from_fn(1, 16 + 8 * 7, |t| q.eval(t).unwrap());
            let fit = fit_eqp(&s, &cfg).unwrap();
            let got = fit.qp().expect("sampled quasi-polynomial must fit");
            prop_assert!(got.eventually_equal(&q));
            prop_assert!(q.period().is_multiple_of(got.period()));
            prop_assert!(validate(got, &s).passed());
        }

        #[test]
        fn deterministic_and_sequential_agree(comps in prop::collection::vec(component_strategy(2), 1..=3)) {
            let q = QuasiPolynomial::new(comps, 0).unwrap();
            let s = SampleSeries::from_fn(1, 70, |t| q.eval(t).unwrap());
            let cfg = FitConfig { d_max: 6, deg_max: 2, holdout: 10, min_support: 5 };
            let a = fit_eqp_with(&s, &cfg, Execution::Parallel).unwrap();
            let b = fit_eqp_with(&s, &cfg, Execution::Sequential).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a, fit_eqp(&s, &cfg).unwrap());
        }

        #[test]
        fn period_one_stays_period_one(c in prop::collection::vec(-9i64..=9, 1..=4)) {
            let p = Poly::from_ints(&c);
            let s = SampleSeries::from_fn(-10, 60, |t| ExtendedValue::Finite(p.eval_i64(t)));
            let qp = fit_eqp(&s, &FitConfig::with_limits(4, 3)).unwrap().qp().cloned().unwrap();
            prop_assert_eq!(qp.period(), 1);
        }
    }
}
