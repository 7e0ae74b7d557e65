use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::qpoly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
}

/// `coeffs(t) . x  <sense>  rhs(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Poly>,
    pub sense: Sense,
    pub rhs: Poly,
}

impl Row {
    pub fn le(coeffs: Vec<Poly>, rhs: Poly) -> Self {
        Row {
            coeffs,
            sense: Sense::Le,
            rhs,
        }
    }

    pub fn eq(coeffs: Vec<Poly>, rhs: Poly) -> Self {
        Row {
            coeffs,
            sense: Sense::Eq,
            rhs,
        }
    }

    /// `coeffs . x >= rhs`, stored as `-coeffs . x <= -rhs`.
    pub fn ge(coeffs: Vec<Poly>, rhs: Poly) -> Self {
        Row::le(coeffs.iter().map(|c| -c).collect(), -&rhs)
    }

    /// Integer-coefficient convenience constructor.
    pub fn ints(coeffs: &[i64], sense: Sense, rhs: Poly) -> Self {
        Row {
            coeffs: coeffs.iter().map(|&c| Poly::from_ints(&[c])).collect(),
            sense,
            rhs,
        }
    }
}

/// A system `A(t) x (<= | =) b(t)` over `n` integer variables, with optional
/// nonnegativity per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricConstraintSystem {
    n: usize,
    rows: Vec<Row>,
    nonneg: Vec<bool>,
}

impl ParametricConstraintSystem {
    pub fn new(n: usize, rows: Vec<Row>, nonneg: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a system needs at least one variable"));
        }
        if nonneg.len() != n {
            return Err(Error::invalid(format!(
                "expected {n} nonnegativity flags, got {}",
                nonneg.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::invalid(format!(
                    "row {} has {} coefficients, expected {n}",
                    i + 1,
                    row.coeffs.len()
                )));
            }
            let all_integer_valued = row
                .coeffs
                .iter()
                .chain(std::iter::once(&row.rhs))
                .all(Poly::is_integer_valued);
            if !all_integer_valued {
                return Err(Error::invalid(format!(
                    "row {} has a polynomial that is not integer-valued",
                    i + 1
                )));
            }
        }
        Ok(ParametricConstraintSystem { n, rows, nonneg })
    }

    /// All variables nonnegative.
    pub fn nonneg(n: usize, rows: Vec<Row>) -> Result<Self> {
        Self::new(n, rows, vec![true; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn nonneg_flags(&self) -> &[bool] {
        &self.nonneg
    }

    pub fn all_nonneg(&self) -> bool {
        self.nonneg.iter().all(|&b| b)
    }

    pub fn instantiate(&self, t: i64) -> Result<IntSystem> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                Ok(IntRow {
                    coeffs: row
                        .coeffs
                        .iter()
                        .map(|p| eval_i128(p, t))
                        .collect::<Result<_>>()?,
                    sense: row.sense,
                    rhs: eval_i128(&row.rhs, t)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(IntSystem {
            n: self.n,
            rows,
            nonneg: self.nonneg.clone(),
        })
    }
}

pub(crate) fn eval_i128(p: &Poly, t: i64) -> Result<i128> {
    let v = p
        .eval_int(t)
        .ok_or_else(|| Error::invalid(format!("{p} is not an integer at t = {t}")))?;
    v.to_i128().ok_or(Error::Overflow("polynomial instantiation"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntRow {
    pub coeffs: Vec<i128>,
    pub sense: Sense,
    pub rhs: i128,
}

impl IntRow {
    pub fn satisfied_by(&self, x: &[i128]) -> Result<bool> {
        let lhs = dot(&self.coeffs, x)?;
        Ok(match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
        })
    }
}

/// A system instantiated at one value of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSystem {
    pub n: usize,
    pub rows: Vec<IntRow>,
    pub nonneg: Vec<bool>,
}

impl IntSystem {
    pub fn contains(&self, x: &[i128]) -> Result<bool> {
        if x.len() != self.n || x.iter().zip(&self.nonneg).any(|(&v, &nn)| nn && v < 0) {
            return Ok(false);
        }
        for row in &self.rows {
            if !row.satisfied_by(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn dot(a: &[i128], x: &[i128]) -> Result<i128> {
    a.iter().zip(x).try_fold(0i128, |acc, (c, v)| {
        c.checked_mul(*v)
            .and_then(|p| acc.checked_add(p))
            .ok_or(Error::Overflow("linear form"))
    })
}
