//! Lattice points of an instantiated system: interval bound propagation to a
//! finite box, then depth-first enumeration in variable order with per-level
//! range tightening.

use std::ops::ControlFlow;

use num_integer::Integer;

use super::system::{dot, IntSystem, ParametricConstraintSystem, Sense};
use crate::error::{Error, Result};
use crate::qpoly::{ExtendedValue, Poly};

/// Upper limit on propagation sweeps before giving up on a fixpoint.
pub const MAX_SWEEPS: usize = 100;

/// Lattice points of a system at one `t`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSet {
    pub t: i64,
    pub points: Vec<Vec<i128>>,
}

impl LatticeSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug)]
struct LeRow {
    a: Vec<i128>,
    b: i128,
}

fn le_rows(sys: &IntSystem) -> Vec<LeRow> {
    let mut out = Vec::with_capacity(sys.rows.len() * 2);
    for row in &sys.rows {
        out.push(LeRow {
            a: row.coeffs.clone(),
            b: row.rhs,
        });
        if row.sense == Sense::Eq {
            out.push(LeRow {
                a: row.coeffs.iter().map(|c| -c).collect(),
                b: -row.rhs,
            });
        }
    }
    out
}

fn overflow() -> Error {
    Error::Overflow("bound propagation")
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or_else(overflow)
}

fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or_else(overflow)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&-a, &b)
}

/// Outcome of bound propagation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagated {
    /// Some row can never hold.
    Empty,
    /// Finite `[lo, hi]` per variable.
    Box(Vec<(i128, i128)>),
}

/// Iterated single-row interval tightening, at most [`MAX_SWEEPS`] sweeps.
pub fn propagate(sys: &IntSystem) -> Result<Propagated> {
    let rows = le_rows(sys);
    propagate_rows(sys.n, &rows, &sys.nonneg)
}

fn propagate_rows(n: usize, rows: &[LeRow], nonneg: &[bool]) -> Result<Propagated> {
    let mut lo: Vec<Option<i128>> = nonneg.iter().map(|&nn| nn.then_some(0)).collect();
    let mut hi: Vec<Option<i128>> = vec![None; n];

    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for row in rows {
            // smallest possible value of each term a_k x_k
            let mut finite_sum = 0i128;
            let mut unbounded_terms = 0usize;
            let mut unbounded_at = usize::MAX;
            let mut term_min = vec![None; n];
            for (k, &a) in row.a.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let end = if a > 0 { lo[k] } else { hi[k] };
                match end {
                    Some(v) => {
                        let m = mul(a, v)?;
                        term_min[k] = Some(m);
                        finite_sum = add(finite_sum, m)?;
                    }
                    None => {
                        unbounded_terms += 1;
                        unbounded_at = k;
                    }
                }
            }
            if unbounded_terms == 0 && finite_sum > row.b {
                return Ok(Propagated::Empty);
            }
            for (j, &a) in row.a.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let others = match (unbounded_terms, term_min[j]) {
                    (0, Some(own)) => sub(finite_sum, own)?,
                    (1, None) if unbounded_at == j => finite_sum,
                    _ => continue,
                };
                let slack = sub(row.b, others)?;
                if a > 0 {
                    let cand = Integer::div_floor(&slack, &a);
                    if hi[j].is_none_or(|h| cand < h) {
                        hi[j] = Some(cand);
                        changed = true;
                    }
                } else {
                    let cand = ceil_div(slack, a);
                    if lo[j].is_none_or(|l| cand > l) {
                        lo[j] = Some(cand);
                        changed = true;
                    }
                }
            }
        }
        let crossed = lo
            .iter()
            .zip(&hi)
            .any(|(l, h)| matches!((l, h), (Some(l), Some(h)) if l > h));
        if crossed {
            return Ok(Propagated::Empty);
        }
        if !changed {
            break;
        }
    }

    lo.iter()
        .zip(&hi)
        .enumerate()
        .map(|(var, (l, h))| match (l, h) {
            (Some(l), Some(h)) => Ok((*l, *h)),
            _ => Err(Error::Unbounded { var: var + 1 }),
        })
        .collect::<Result<Vec<_>>>()
        .map(Propagated::Box)
}

/// Depth-first enumerator over an instantiated, propagated system.
#[derive(Clone, Debug)]
pub struct Search {
    n: usize,
    rows: Vec<LeRow>,
    bounds: Vec<(i128, i128)>,
    /// `suffix_min[r][j]` = smallest value of `sum_{k >= j} a_rk x_k` over the box.
    suffix_min: Vec<Vec<i128>>,
}

impl Search {
    /// `Ok(None)` when propagation proves the system empty.
    pub fn new(sys: &IntSystem) -> Result<Option<Search>> {
        let rows = le_rows(sys);
        let bounds = match propagate_rows(sys.n, &rows, &sys.nonneg)? {
            Propagated::Empty => return Ok(None),
            Propagated::Box(b) => b,
        };
        let suffix_min = rows
            .iter()
            .map(|row| {
                let mut acc = vec![0i128; sys.n + 1];
                for k in (0..sys.n).rev() {
                    let a = row.a[k];
                    let (l, h) = bounds[k];
                    let m = if a >= 0 { mul(a, l)? } else { mul(a, h)? };
                    acc[k] = add(acc[k + 1], m)?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Ok(Some(Search {
            n: sys.n,
            rows,
            bounds,
            suffix_min,
        }))
    }

    pub fn bounds(&self) -> &[(i128, i128)] {
        &self.bounds
    }

    /// Allowed `[lo, hi]` for variable `j` given the running row sums of the
    /// already fixed variables; `None` if empty.
    fn range(&self, j: usize, partial: &[i128]) -> Result<Option<(i128, i128)>> {
        let (mut lo, mut hi) = self.bounds[j];
        for (r, row) in self.rows.iter().enumerate() {
            let slack = sub(sub(row.b, partial[r])?, self.suffix_min[r][j + 1])?;
            let a = row.a[j];
            if a == 0 {
                if slack < 0 {
                    return Ok(None);
                }
            } else if a > 0 {
                hi = hi.min(Integer::div_floor(&slack, &a));
            } else {
                lo = lo.max(ceil_div(slack, a));
            }
            if lo > hi {
                return Ok(None);
            }
        }
        Ok(Some((lo, hi)))
    }

    /// Visits every point whose leading coordinates equal `prefix`, in
    /// lexicographic order, until `visit` breaks.
    pub fn for_each(
        &self,
        prefix: &[i128],
        visit: &mut dyn FnMut(&[i128]) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        let mut x = vec![0i128; self.n];
        let mut partial = vec![0i128; self.rows.len()];
        self.dfs(0, prefix, &mut x, &mut partial, visit)
    }

    fn dfs(
        &self,
        j: usize,
        prefix: &[i128],
        x: &mut [i128],
        partial: &mut [i128],
        visit: &mut dyn FnMut(&[i128]) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        if j == self.n {
            return Ok(visit(x));
        }
        let Some((lo, hi)) = self.range(j, partial)? else {
            return Ok(ControlFlow::Continue(()));
        };
        let (lo, hi) = match prefix.get(j) {
            Some(&v) if v < lo || v > hi => return Ok(ControlFlow::Continue(())),
            Some(&v) => (v, v),
            None => (lo, hi),
        };
        let saved = partial.to_vec();
        for v in lo..=hi {
            x[j] = v;
            for (r, row) in self.rows.iter().enumerate() {
                partial[r] = add(saved[r], mul(row.a[j], v)?)?;
            }
            if self.dfs(j + 1, prefix, x, partial, visit)?.is_break() {
                partial.copy_from_slice(&saved);
                return Ok(ControlFlow::Break(()));
            }
        }
        partial.copy_from_slice(&saved);
        Ok(ControlFlow::Continue(()))
    }

    /// Number of points extending `prefix`, counting no further than `cap`.
    pub fn count_with_prefix(&self, prefix: &[i128], cap: u64) -> Result<u64> {
        if cap == 0 {
            return Ok(0);
        }
        let mut count = 0u64;
        let _ = self.for_each(prefix, &mut |_| {
            count += 1;
            if count >= cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(count)
    }
}

fn visit_points(
    sys: &ParametricConstraintSystem,
    t: i64,
    visit: &mut dyn FnMut(&[i128]) -> ControlFlow<()>,
) -> Result<()> {
    let inst = sys.instantiate(t)?;
    if let Some(search) = Search::new(&inst)? {
        let _ = search.for_each(&[], visit)?;
    }
    Ok(())
}

fn too_many(point_cap: usize, t: i64) -> Error {
    Error::ResourceLimit(format!("more than {point_cap} lattice points at t = {t}"))
}

pub fn enumerate_lattice(
    sys: &ParametricConstraintSystem,
    t: i64,
    point_cap: usize,
) -> Result<LatticeSet> {
    let mut points = Vec::new();
    let mut over = false;
    visit_points(sys, t, &mut |x| {
        if points.len() == point_cap {
            over = true;
            return ControlFlow::Break(());
        }
        points.push(x.to_vec());
        ControlFlow::Continue(())
    })?;
    if over {
        return Err(too_many(point_cap, t));
    }
    Ok(LatticeSet { t, points })
}

/// `|L(t)|`.
pub fn size_function(sys: &ParametricConstraintSystem, t: i64, point_cap: usize) -> Result<u64> {
    let mut count = 0usize;
    visit_points(sys, t, &mut |_| {
        count += 1;
        if count > point_cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    if count > point_cap {
        return Err(too_many(point_cap, t));
    }
    Ok(count as u64)
}

/// Instantiated objective `c(t)`.
pub(crate) fn objective_at(c: &[Poly], t: i64) -> Result<Vec<i128>> {
    c.iter().map(|p| super::system::eval_i128(p, t)).collect()
}

/// The `l_max` largest values of `values` (with multiplicity), padded with
/// BOTTOM.
pub(crate) fn top_values(mut values: Vec<i128>, l_max: usize) -> Vec<ExtendedValue> {
    values.sort_unstable_by(|a, b| b.cmp(a));
    (0..l_max)
        .map(|i| values.get(i).map_or(ExtendedValue::Bottom, |&v| ExtendedValue::from(v)))
        .collect()
}

/// `f_1(t), ..., f_{l_max}(t)`: the largest objective values over `L(t)` with
/// multiplicity.
pub fn optimum_values(
    sys: &ParametricConstraintSystem,
    c: &[Poly],
    l_max: usize,
    t: i64,
    point_cap: usize,
) -> Result<Vec<ExtendedValue>> {
    if c.len() != sys.n() {
        return Err(Error::invalid("objective length must match the system dimension"));
    }
    let ct = objective_at(c, t)?;
    let mut values = Vec::new();
    let mut failure = None;
    visit_points(sys, t, &mut |x| {
        if values.len() == point_cap {
            failure = Some(too_many(point_cap, t));
            return ControlFlow::Break(());
        }
        match dot(&ct, x) {
            Ok(v) => {
                values.push(v);
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(top_values(values, l_max))
}

/// The `l`-th largest value of `c(t) . x` over `L(t)`, or BOTTOM.
pub fn lth_largest_objective(
    sys: &ParametricConstraintSystem,
    c: &[Poly],
    l: usize,
    t: i64,
    point_cap: usize,
) -> Result<ExtendedValue> {
    if l == 0 {
        return Err(Error::invalid("l must be positive"));
    }
    Ok(optimum_values(sys, c, l, t, point_cap)?.pop().expect("l >= 1"))
}
