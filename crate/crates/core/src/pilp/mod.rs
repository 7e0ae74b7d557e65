//! Parametric integer programs evaluated at fixed `t`.

pub mod digits;
pub mod dnf;
pub mod enumerate;
pub mod exclusion;
pub mod system;

pub use digits::{digit_decode, digit_encode};
pub use dnf::{disjoint_expand, disjoint_expand_capped, DnfFormula, LinearAtom, Literal};
pub use enumerate::{
    enumerate_lattice, lth_largest_objective, optimum_values, propagate, size_function,
    LatticeSet, Propagated, Search,
};
pub use exclusion::{digit_transform, exclusion_f_g, exclusion_feasible, ExclusionProblem};
pub use system::{IntRow, IntSystem, ParametricConstraintSystem, Row, Sense};
