//! Exact computation of generalized Frobenius numbers, desk-scale parametric
//! integer programs, and empirical detection of eventually quasi-polynomial
//! behaviour along polynomial families.
//!
//! The crate is organised bottom-up:
//!
//! - [`qpoly`]: exact rationals, one-variable polynomials, quasi-polynomials.
//! - [`frobenius`]: representation counts, `F`, `G`, `F_{m,l}` and `G_m`.
//! - [`pilp`]: lattice enumeration for parametric systems, exclusion
//!   problems, base-`t` digit maps and disjoint DNF expansion.
//! - [`eqpfit`]: period/threshold detection and exact component fitting.
//! - [`reduction`]: gcd reduction of polynomial families, the box exponent and
//!   the Frobenius-to-exclusion construction.
//! - [`text`]: the line-oriented text grammars used by the command line tool.
//!
//! Loops over independent parameter values go through [`parallel`], which uses
//! rayon when the `parallel` feature is enabled and runs sequentially
//! otherwise.

pub mod eqpfit;
pub mod error;
pub mod frobenius;
pub mod parallel;
pub mod pilp;
pub mod qpoly;
pub mod reduction;
pub mod text;

pub use error::{Error, Result};
