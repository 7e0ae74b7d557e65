//! Disjunctions of conjunctions and their rewriting into pairwise disjoint
//! clauses.

use crate::error::{Error, Result};
use crate::qpoly::Poly;

use super::system::{dot, eval_i128};

/// Default ceiling on the number of clauses `disjoint_expand` may produce.
pub const DEFAULT_CLAUSE_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal<A> {
    Pos(A),
    Neg(A),
}

impl<A: Clone> Literal<A> {
    pub fn atom(&self) -> &A {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => a,
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Literal::Pos(_))
    }

    pub fn negated(&self) -> Self {
        match self {
            Literal::Pos(a) => Literal::Neg(a.clone()),
            Literal::Neg(a) => Literal::Pos(a.clone()),
        }
    }

    /// Truth value under an assignment of the atoms.
    pub fn holds(&self, atom_value: impl Fn(&A) -> bool) -> bool {
        atom_value(self.atom()) == self.is_positive()
    }
}

/// `clause_1 or clause_2 or ...`, each clause a conjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnfFormula<A> {
    pub clauses: Vec<Vec<Literal<A>>>,
}

impl<A: Clone + PartialEq> DnfFormula<A> {
    pub fn new(clauses: Vec<Vec<Literal<A>>>) -> Self {
        DnfFormula { clauses }
    }

    /// A formula whose clauses are plain conjunctions of atoms.
    pub fn of_atoms(clauses: Vec<Vec<A>>) -> Self {
        DnfFormula {
            clauses: clauses
                .into_iter()
                .map(|c| c.into_iter().map(Literal::Pos).collect())
                .collect(),
        }
    }

    pub fn holds(&self, atom_value: impl Fn(&A) -> bool + Copy) -> bool {
        self.clauses
            .iter()
            .any(|c| c.iter().all(|lit| lit.holds(atom_value)))
    }
}

/// Appends `lit` unless already present; `false` if its negation is present.
fn push_literal<A: Clone + PartialEq>(clause: &mut Vec<Literal<A>>, lit: &Literal<A>) -> bool {
    if clause.contains(&lit.negated()) {
        return false;
    }
    if !clause.contains(lit) {
        clause.push(lit.clone());
    }
    true
}

/// Ways of falsifying `earlier`: for each position `w`, the literals before
/// `w` hold and literal `w` fails. Listed from the last position to the first.
fn failure_witnesses<A: Clone>(earlier: &[Literal<A>]) -> Vec<Vec<Literal<A>>> {
    (0..earlier.len())
        .rev()
        .map(|w| {
            let mut wit: Vec<Literal<A>> = earlier[..w].to_vec();
            wit.push(earlier[w].negated());
            wit
        })
        .collect()
}

pub fn disjoint_expand<A: Clone + PartialEq>(f: &DnfFormula<A>) -> Result<DnfFormula<A>> {
    disjoint_expand_capped(f, DEFAULT_CLAUSE_CAP)
}

/// Rewrites `f` so that no two clauses can hold at once while the union of
/// satisfying assignments is unchanged. Clause `S` becomes one clause per
/// choice of failure witness for every earlier clause, followed by the
/// literals of `S`; clauses containing a literal and its negation are dropped.
pub fn disjoint_expand_capped<A: Clone + PartialEq>(
    f: &DnfFormula<A>,
    clause_cap: usize,
) -> Result<DnfFormula<A>> {
    let too_many = || Error::ResourceLimit(format!("disjoint expansion exceeds {clause_cap} clauses"));
    let mut out: Vec<Vec<Literal<A>>> = Vec::new();
    for (s_idx, s) in f.clauses.iter().enumerate() {
        let mut partial: Vec<Vec<Literal<A>>> = vec![Vec::new()];
        for earlier in &f.clauses[..s_idx] {
            let witnesses = failure_witnesses(earlier);
            let mut next = Vec::new();
            for base in &partial {
                for wit in &witnesses {
                    let mut clause = base.clone();
                    if wit.iter().all(|lit| push_literal(&mut clause, lit)) {
                        next.push(clause);
                        if next.len() > clause_cap {
                            return Err(too_many());
                        }
                    }
                }
            }
            partial = next;
        }
        for mut clause in partial {
            if s.iter().all(|lit| push_literal(&mut clause, lit)) {
                out.push(clause);
                if out.len() > clause_cap {
                    return Err(too_many());
                }
            }
        }
    }
    Ok(DnfFormula { clauses: out })
}

/// `coeffs(t) . z <= rhs(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearAtom {
    pub coeffs: Vec<Poly>,
    pub rhs: Poly,
}

impl LinearAtom {
    pub fn new(coeffs: Vec<Poly>, rhs: Poly) -> Self {
        LinearAtom { coeffs, rhs }
    }

    /// The complement `(-coeffs) . z <= -rhs - 1`, exact over integer points.
    pub fn negate(&self) -> LinearAtom {
        LinearAtom {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            rhs: &(-&self.rhs) - &Poly::constant(crate::qpoly::rat(1)),
        }
    }

    pub fn holds(&self, t: i64, z: &[i128]) -> Result<bool> {
        let a: Vec<i128> = self.coeffs.iter().map(|c| eval_i128(c, t)).collect::<Result<_>>()?;
        Ok(dot(&a, z)? <= eval_i128(&self.rhs, t)?)
    }

    /// A literal rewritten as a single atom.
    pub fn from_literal(lit: &Literal<LinearAtom>) -> LinearAtom {
        match lit {
            Literal::Pos(a) => a.clone(),
            Literal::Neg(a) => a.negate(),
        }
    }
}
