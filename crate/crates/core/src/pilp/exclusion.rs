//! Exclusion problems: points of `L2(t)` covered by fewer than `m` points of
//! `L1(t)` under projection onto the leading `n2` coordinates.

use crate::error::{Error, Result};
use crate::qpoly::{rat, ExtendedValue, Poly};

use super::enumerate::{enumerate_lattice, objective_at, top_values, LatticeSet, Search};
use super::system::{dot, ParametricConstraintSystem, Row, Sense};

/// `L1` lives in `n2 + n1` variables ordered `(x2, x3)`; `L2` and the
/// objective `c` live in the `n2` kept coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusionProblem {
    pub m: u64,
    pub n1: usize,
    pub n2: usize,
    pub sys1: ParametricConstraintSystem,
    pub sys2: ParametricConstraintSystem,
    pub c: Vec<Poly>,
}

impl ExclusionProblem {
    pub fn new(
        m: u64,
        n1: usize,
        n2: usize,
        sys1: ParametricConstraintSystem,
        sys2: ParametricConstraintSystem,
        c: Vec<Poly>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be positive"));
        }
        if n1 == 0 || n2 == 0 {
            return Err(Error::invalid("n1 and n2 must be positive"));
        }
        if sys1.n() != n1 + n2 {
            return Err(Error::invalid(format!(
                "L1 has {} variables, expected n2 + n1 = {}",
                sys1.n(),
                n1 + n2
            )));
        }
        if sys2.n() != n2 {
            return Err(Error::invalid(format!("L2 has {} variables, expected n2 = {n2}", sys2.n())));
        }
        if c.len() != n2 {
            return Err(Error::invalid(format!("objective has {} entries, expected n2 = {n2}", c.len())));
        }
        if !c.iter().all(Poly::is_integer_valued) {
            return Err(Error::invalid("objective entries must be integer-valued"));
        }
        Ok(ExclusionProblem {
            m,
            n1,
            n2,
            sys1,
            sys2,
            c,
        })
    }
}

/// `L3(t)` in lexicographic order.
pub fn exclusion_feasible(ex: &ExclusionProblem, t: i64, point_cap: usize) -> Result<LatticeSet> {
    let l2 = enumerate_lattice(&ex.sys2, t, point_cap)?;
    let search = Search::new(&ex.sys1.instantiate(t)?)?;
    let mut points = Vec::new();
    for x2 in l2.points {
        let fiber = match &search {
            Some(s) => s.count_with_prefix(&x2, ex.m)?,
            None => 0,
        };
        if fiber < ex.m {
            points.push(x2);
        }
    }
    Ok(LatticeSet { t, points })
}

/// `(f_1(t), ..., f_{l_max}(t))` and `g(t) = |L3(t)|`.
pub fn exclusion_f_g(
    ex: &ExclusionProblem,
    l_max: usize,
    t: i64,
    point_cap: usize,
) -> Result<(Vec<ExtendedValue>, u64)> {
    let l3 = exclusion_feasible(ex, t, point_cap)?;
    let ct = objective_at(&ex.c, t)?;
    let values = l3.points.iter().map(|x| dot(&ct, x)).collect::<Result<Vec<_>>>()?;
    let g = values.len() as u64;
    Ok((top_values(values, l_max), g))
}

fn digit_system(sys: &ParametricConstraintSystem, r: u32) -> Result<ParametricConstraintSystem> {
    if !sys.all_nonneg() {
        return Err(Error::invalid("digit transform needs every variable nonnegative"));
    }
    let r = r as usize;
    let n = sys.n() * r;
    let powers: Vec<Poly> = (0..r).map(Poly::monomial).collect();
    let mut rows: Vec<Row> = sys
        .rows()
        .iter()
        .map(|row| Row {
            coeffs: row
                .coeffs
                .iter()
                .flat_map(|a| powers.iter().map(move |p| a * p))
                .collect(),
            sense: row.sense,
            rhs: row.rhs.clone(),
        })
        .collect();
    let top_digit = &Poly::monomial(1) - &Poly::constant(rat(1));
    for k in 0..n {
        let mut coeffs = vec![Poly::zero(); n];
        coeffs[k] = Poly::constant(rat(1));
        rows.push(Row {
            coeffs,
            sense: Sense::Le,
            rhs: top_digit.clone(),
        });
    }
    ParametricConstraintSystem::nonneg(n, rows)
}

/// Rewrites every variable as `r` base-`t` digits, least significant first,
/// with coefficient `a(t) t^j` on digit `j` and `0 <= digit <= t - 1`. For
/// `t >= 2` this is a bijection onto the original points whose coordinates
/// all lie in `[0, t^r)`.
pub fn digit_transform(ex: &ExclusionProblem, r: u32) -> Result<ExclusionProblem> {
    if r == 0 {
        return Err(Error::invalid("digit count r must be positive"));
    }
    let powers: Vec<Poly> = (0..r as usize).map(Poly::monomial).collect();
    let c = ex
        .c
        .iter()
        .flat_map(|ci| powers.iter().map(move |p| ci * p))
        .collect();
    ExclusionProblem::new(
        ex.m,
        ex.n1 * r as usize,
        ex.n2 * r as usize,
        digit_system(&ex.sys1, r)?,
        digit_system(&ex.sys2, r)?,
        c,
    )
}
