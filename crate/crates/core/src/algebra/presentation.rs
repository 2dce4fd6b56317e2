//! Graph-type subvariety presentations and the substitution normal form.
//!
//! An ideal is presented by a partition of the ambient variables into a kept
//! set K and an eliminated set E, with one substitution polynomial s_e in the
//! K-variables per eliminated variable. The generators f_e = e - s_e form a
//! regular sequence and a free basis of I/I², and reduction mod I is the
//! substitution e ↦ s_e. This covers every presentation the engine needs
//! (diagonals, linear coisotropics, graphs of differentials) without Gröbner
//! machinery.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::monomial::Monomial;
use super::poly::{MultiPoly, VarTable};
use super::scalar::FieldSpec;

#[derive(Clone, Debug)]
pub struct SubvarietyPresentation {
    pub nvars: usize,
    /// Kept variable indices, ascending.
    pub kept: Vec<usize>,
    /// Eliminated variable -> substitution polynomial in kept variables.
    pub subs: BTreeMap<usize, MultiPoly>,
}

impl SubvarietyPresentation {
    pub fn new(
        vars: &VarTable,
        subs: BTreeMap<usize, MultiPoly>,
    ) -> Result<SubvarietyPresentation, String> {
        let nvars = vars.len();
        let eliminated: Vec<usize> = subs.keys().copied().collect();
        let kept: Vec<usize> = (0..nvars).filter(|v| !eliminated.contains(v)).collect();
        for (e, s) in &subs {
            if *e >= nvars {
                return Err(format!("eliminated variable index {e} out of range"));
            }
            if !s.supported_on(&kept) {
                return Err(format!(
                    "substitution for `{}` mentions an eliminated variable",
                    vars.names[*e]
                ));
            }
            if s.nvars != nvars {
                return Err(String::from("substitution in a different ambient ring"));
            }
        }
        Ok(SubvarietyPresentation { nvars, kept, subs })
    }

    /// The whole ambient space (no eliminated variables).
    pub fn full(nvars: usize) -> SubvarietyPresentation {
        SubvarietyPresentation {
            nvars,
            kept: (0..nvars).collect(),
            subs: BTreeMap::new(),
        }
    }

    pub fn eliminated(&self) -> Vec<usize> {
        self.subs.keys().copied().collect()
    }

    pub fn codim(&self) -> usize {
        self.subs.len()
    }

    /// Ideal generator f_e = e - s_e.
    pub fn generator(&self, e: usize, spec: FieldSpec) -> MultiPoly {
        let s = self.subs.get(&e).expect("not an eliminated variable");
        MultiPoly::var(self.nvars, e, spec).sub(s)
    }

    /// Substitution normal form: the unique representative of p mod I
    /// supported on kept variables. Idempotent, and a ring homomorphism.
    pub fn normal_form(&self, p: &MultiPoly, spec: FieldSpec) -> MultiPoly {
        if self.subs.is_empty() {
            return p.clone();
        }
        if p.terms.keys().all(|m| m.supported_on(&self.kept)) {
            return p.clone();
        }
        p.substitute(&self.subs, spec)
    }

    /// Is every substitution homogeneous of degree 1 (so the quotient grading
    /// is exact)?
    pub fn is_linear_homogeneous(&self) -> bool {
        self.subs
            .values()
            .all(|s| s.is_zero() || (s.is_homogeneous() && s.degree() == Some(1)))
    }

    /// Max substitution degree; degree growth of one normal form pass.
    pub fn max_sub_degree(&self) -> u32 {
        self.subs
            .values()
            .filter_map(|s| s.degree())
            .max()
            .unwrap_or(0)
    }

    /// Monomial basis of the quotient B in a given internal degree.
    pub fn basis_of_degree(&self, d: u32) -> Vec<Monomial> {
        super::monomial::monomials_of_degree(self.nvars, &self.kept, d)
    }
}
