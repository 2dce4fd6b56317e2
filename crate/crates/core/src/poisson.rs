//! Poisson bivectors, Schouten calculus, coisotropy testing, and the
//! differential-geometric oracles used as independent checks against the
//! bar-complex computations.
//!
//! Sign convention C1: ⟨∂_i ∧ ∂_j, dx_i ∧ dx_j⟩ = 1 for i < j, extended
//! bilinearly. Every other sign in the engine is downstream of this one.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::poly::MultiPoly;
use crate::algebra::presentation::SubvarietyPresentation;
use crate::algebra::scalar::{FieldSpec, Scalar};

/// Antisymmetric bivector, stored as the strict upper triangle.
#[derive(Clone, Debug)]
pub struct PoissonBivector {
    pub nvars: usize,
    /// (i, j) with i < j -> coefficient of ∂_i ∧ ∂_j.
    pub upper: BTreeMap<(usize, usize), MultiPoly>,
}

impl PoissonBivector {
    pub fn zero(nvars: usize) -> PoissonBivector {
        PoissonBivector {
            nvars,
            upper: BTreeMap::new(),
        }
    }

    pub fn from_upper(
        nvars: usize,
        entries: impl IntoIterator<Item = ((usize, usize), MultiPoly)>,
    ) -> Result<PoissonBivector, String> {
        let mut upper = BTreeMap::new();
        for ((i, j), p) in entries {
            if i >= j || j >= nvars {
                return Err(format!(
                    "bivector entry ({i},{j}) is not strictly upper triangular"
                ));
            }
            if !p.is_zero() {
                upper.insert((i, j), p);
            }
        }
        Ok(PoissonBivector { nvars, upper })
    }

    pub fn is_constant(&self) -> bool {
        self.upper.values().all(|p| p.degree().unwrap_or(0) == 0)
    }

    /// {f, g} = Σ_{i<j} P_ij (∂_i f ∂_j g − ∂_j f ∂_i g).
    pub fn bracket(&self, f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
        let mut r = MultiPoly::zero(self.nvars);
        for ((i, j), p) in &self.upper {
            let a = f.partial_derivative(*i).mul(&g.partial_derivative(*j));
            let b = f.partial_derivative(*j).mul(&g.partial_derivative(*i));
            r = r.add(&p.mul(&a.sub(&b)));
        }
        r
    }

    /// As a polyvector field Σ_{i<j} P_ij ∂_i∧∂_j.
    pub fn as_polyvector(&self) -> PolyVectorField {
        let mut terms = BTreeMap::new();
        for ((i, j), p) in &self.upper {
            terms.insert(alloc::vec![*i, *j], p.clone());
        }
        PolyVectorField {
            nvars: self.nvars,
            degree: 2,
            terms,
        }
    }

    /// [P, P] = 0, i.e. the bracket satisfies Jacobi.
    pub fn is_poisson(&self) -> bool {
        schouten(&self.as_polyvector(), &self.as_polyvector()).is_zero()
    }

    /// Restrict coefficients to a subvariety (normal form), keeping only
    /// kept-variable directions.
    pub fn restrict(&self, pres: &SubvarietyPresentation, spec: FieldSpec) -> PoissonBivector {
        let mut upper = BTreeMap::new();
        for ((i, j), p) in &self.upper {
            if pres.kept.contains(i) && pres.kept.contains(j) {
                let r = pres.normal_form(p, spec);
                if !r.is_zero() {
                    upper.insert((*i, *j), r);
                }
            }
        }
        PoissonBivector {
            nvars: self.nvars,
            upper,
        }
    }
}

/// Alternating polyvector field of fixed degree; keys are strictly increasing
/// index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    pub nvars: usize,
    pub degree: usize,
    pub terms: BTreeMap<Vec<usize>, MultiPoly>,
}

impl PolyVectorField {
    pub fn zero(nvars: usize, degree: usize) -> PolyVectorField {
        PolyVectorField {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(p: MultiPoly) -> PolyVectorField {
        let nvars = p.nvars;
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(Vec::new(), p);
        }
        PolyVectorField {
            nvars,
            degree: 0,
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, idx: Vec<usize>, coeff: MultiPoly) {
        debug_assert_eq!(idx.len(), self.degree);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&coeff);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &PolyVectorField) -> PolyVectorField {
        debug_assert_eq!(self.degree, o.degree);
        let mut r = self.clone();
        for (i, c) in &o.terms {
            r.add_term(i.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &PolyVectorField) -> PolyVectorField {
        self.add(&o.scale_int(-1))
    }

    pub fn scale_int(&self, k: i64) -> PolyVectorField {
        PolyVectorField {
            nvars: self.nvars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.scale_int(k)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> PolyVectorField {
        PolyVectorField {
            nvars: self.nvars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.scale(s)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

/// Sort an index tuple, returning the permutation sign; None if repeated.
pub fn sort_indices(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v: Vec<usize> = idx.to_vec();
    let mut sign = 1i64;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Wedge of polyvector fields.
pub fn wedge(u: &PolyVectorField, v: &PolyVectorField) -> PolyVectorField {
    let mut r = PolyVectorField::zero(u.nvars, u.degree + v.degree);
    for (iu, cu) in &u.terms {
        for (iv, cv) in &v.terms {
            let mut idx = iu.clone();
            idx.extend_from_slice(iv);
            if let Some((sorted, sign)) = sort_indices(&idx) {
                r.add_term(sorted, cu.mul(cv).scale_int(sign));
            }
        }
    }
    r
}

/// Left derivative ∂/∂θ_i on the odd coordinates of a polyvector field.
fn theta_derivative_left(u: &PolyVectorField, i: usize) -> PolyVectorField {
    let mut r = PolyVectorField::zero(u.nvars, u.degree.saturating_sub(1));
    for (idx, c) in &u.terms {
        if let Some(pos) = idx.iter().position(|&v| v == i) {
            let mut rest = idx.clone();
            rest.remove(pos);
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            r.add_term(rest, c.scale_int(sign));
        }
    }
    r
}

/// Right derivative: the θ being removed commutes past the factors after it.
fn theta_derivative_right(u: &PolyVectorField, i: usize) -> PolyVectorField {
    let mut r = PolyVectorField::zero(u.nvars, u.degree.saturating_sub(1));
    for (idx, c) in &u.terms {
        if let Some(pos) = idx.iter().position(|&v| v == i) {
            let mut rest = idx.clone();
            rest.remove(pos);
            let sign = if (idx.len() - 1 - pos) % 2 == 0 { 1 } else { -1 };
            r.add_term(rest, c.scale_int(sign));
        }
    }
    r
}

fn x_derivative(u: &PolyVectorField, i: usize) -> PolyVectorField {
    let mut r = PolyVectorField::zero(u.nvars, u.degree);
    for (idx, c) in &u.terms {
        r.add_term(idx.clone(), c.partial_derivative(i));
    }
    r
}

/// Schouten-Nijenhuis bracket, realized as the odd Poisson bracket on
/// functions of (x_i, θ_i) with θ_i = ∂_i:
///
///   [u, v] = Σ_i (∂_r u/∂θ_i)·(∂v/∂x_i) − (∂u/∂x_i)·(∂_l v/∂θ_i),
///
/// right derivative on the first slot, left on the second. On functions and
/// vector fields this is the directional derivative and the Lie bracket, and
/// [P, P] = 0 is exactly the Jacobi identity for the bracket induced by P.
pub fn schouten(u: &PolyVectorField, v: &PolyVectorField) -> PolyVectorField {
    let p = u.degree;
    let q = v.degree;
    let mut r = PolyVectorField::zero(u.nvars, (p + q).saturating_sub(1));
    if p + q == 0 {
        return r;
    }
    for i in 0..u.nvars {
        let a = wedge(&theta_derivative_right(u, i), &x_derivative(v, i));
        let b = wedge(&x_derivative(u, i), &theta_derivative_left(v, i));
        // empty wedges can carry a stale degree tag; accumulate termwise
        for (idx, c) in a.terms {
            r.add_term(idx, c);
        }
        for (idx, c) in b.terms {
            r.add_term(idx, c.scale_int(-1));
        }
    }
    r
}

/// Differential form of fixed degree; keys are strictly increasing d-index
/// tuples, coefficients reduced to the subvariety ring where applicable.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialForm {
    pub nvars: usize,
    pub degree: usize,
    pub terms: BTreeMap<Vec<usize>, MultiPoly>,
}

impl DifferentialForm {
    pub fn zero(nvars: usize, degree: usize) -> DifferentialForm {
        DifferentialForm {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(p: MultiPoly) -> DifferentialForm {
        let nvars = p.nvars;
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(Vec::new(), p);
        }
        DifferentialForm {
            nvars,
            degree: 0,
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, idx: Vec<usize>, coeff: MultiPoly) {
        debug_assert_eq!(idx.len(), self.degree);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&coeff);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &DifferentialForm) -> DifferentialForm {
        debug_assert_eq!(self.degree, o.degree);
        let mut r = self.clone();
        for (i, c) in &o.terms {
            r.add_term(i.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &DifferentialForm) -> DifferentialForm {
        self.add(&o.scale_int(-1))
    }

    pub fn scale_int(&self, k: i64) -> DifferentialForm {
        DifferentialForm {
            nvars: self.nvars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.scale_int(k)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> DifferentialForm {
        DifferentialForm {
            nvars: self.nvars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.scale(s)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn wedge(&self, o: &DifferentialForm) -> DifferentialForm {
        let mut r = DifferentialForm::zero(self.nvars, self.degree + o.degree);
        for (iu, cu) in &self.terms {
            for (iv, cv) in &o.terms {
                let mut idx = iu.clone();
                idx.extend_from_slice(iv);
                if let Some((sorted, sign)) = sort_indices(&idx) {
                    r.add_term(sorted, cu.mul(cv).scale_int(sign));
                }
            }
        }
        r
    }
}

/// Exterior derivative restricted to the given variables (a form on Y only
/// sees the kept directions).
pub fn d_dr(omega: &DifferentialForm, vars: &[usize]) -> DifferentialForm {
    let mut r = DifferentialForm::zero(omega.nvars, omega.degree + 1);
    for (idx, c) in &omega.terms {
        for &v in vars {
            let dc = c.partial_derivative(v);
            if dc.is_zero() {
                continue;
            }
            let mut full = alloc::vec![v];
            full.extend_from_slice(idx);
            if let Some((sorted, sign)) = sort_indices(&full) {
                r.add_term(sorted, dc.scale_int(sign));
            }
        }
    }
    r
}

/// Interior product with a single coordinate field ∂_v.
fn contract_one(omega: &DifferentialForm, v: usize) -> DifferentialForm {
    let mut r = DifferentialForm::zero(omega.nvars, omega.degree.saturating_sub(1));
    if omega.degree == 0 {
        return r;
    }
    for (idx, c) in &omega.terms {
        if let Some(pos) = idx.iter().position(|&u| u == v) {
            let mut rest = idx.clone();
            rest.remove(pos);
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            r.add_term(rest, c.scale_int(sign));
        }
    }
    r
}

/// Contraction with the bivector under C1: i_P(dx_i ∧ dx_j) = P_ij for i < j.
pub fn contract_ip(omega: &DifferentialForm, p: &PoissonBivector) -> DifferentialForm {
    let mut r = DifferentialForm::zero(omega.nvars, omega.degree.saturating_sub(2));
    if omega.degree < 2 {
        return r;
    }
    for ((i, j), coeff) in &p.upper {
        let inner = contract_one(&contract_one(omega, *i), *j);
        for (idx, c) in inner.terms {
            r.add_term(idx, c.mul(coeff));
        }
    }
    r
}

/// The Koszul differential δ = i_P d_DR + d_DR i_P on forms over Y.
/// Independent oracle for the descended BV operator of the diagonal scenario.
pub fn koszul_delta_oracle(
    omega: &DifferentialForm,
    p: &PoissonBivector,
    vars: &[usize],
) -> DifferentialForm {
    let mut r = DifferentialForm::zero(omega.nvars, omega.degree.saturating_sub(1));
    let a = contract_ip(&d_dr(omega, vars), p);
    let b = d_dr(&contract_ip(omega, p), vars);
    for (idx, c) in a.terms.into_iter().chain(b.terms) {
        r.add_term(idx, c);
    }
    r
}

/// Chain-level bracket attached to any odd operator δ:
/// [ω, η] = δ(ω∧η) − δ(ω)∧η − (−1)^{deg ω} ω∧δ(η).
pub fn koszul_bracket_oracle(
    omega: &DifferentialForm,
    eta: &DifferentialForm,
    p: &PoissonBivector,
    vars: &[usize],
) -> DifferentialForm {
    let s = if omega.degree % 2 == 0 { 1 } else { -1 };
    koszul_delta_oracle(&omega.wedge(eta), p, vars)
        .sub(&koszul_delta_oracle(omega, p, vars).wedge(eta))
        .sub(&omega.wedge(&koszul_delta_oracle(eta, p, vars)).scale_int(s))
}

/// Witness for a failed coisotropy test.
#[derive(Clone, Debug)]
pub struct CoisotropyWitness {
    pub gen_i: usize,
    pub gen_j: usize,
    pub residue: MultiPoly,
}

/// {I, I} ⊂ I tested on the generator pairs; sufficient by Leibniz.
pub fn is_coisotropic(
    p: &PoissonBivector,
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
) -> Result<(), CoisotropyWitness> {
    let elim = pres.eliminated();
    for (a, &e1) in elim.iter().enumerate() {
        for &e2 in elim.iter().skip(a) {
            let f1 = pres.generator(e1, spec);
            let f2 = pres.generator(e2, spec);
            let residue = pres.normal_form(&p.bracket(&f1, &f2), spec);
            if !residue.is_zero() {
                return Err(CoisotropyWitness {
                    gen_i: e1,
                    gen_j: e2,
                    residue,
                });
            }
        }
    }
    Ok(())
}

/// A class in Λ•N, written in the basis of wedges of normal directions
/// ν_e = [∂_e] indexed by eliminated variables; coefficients in B.
pub type NormalClass = PolyVectorField;

/// Projection Λ•(T_X|_Y) → Λ•N for a graph presentation: ∂_e ↦ ν_e and
/// ∂_k ↦ −Σ_e (∂s_e/∂k) ν_e (the tangential lift of ∂_k is
/// ∂_k + Σ_e (∂s_e/∂k) ∂_e).
pub fn project_to_normal(
    u: &PolyVectorField,
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
) -> NormalClass {
    let elim = pres.eliminated();
    let mut r = PolyVectorField::zero(u.nvars, u.degree);
    for (idx, c) in &u.terms {
        let mut parts: Vec<Vec<(usize, MultiPoly)>> = Vec::new();
        for &v in idx {
            if elim.contains(&v) {
                parts.push(alloc::vec![(v, MultiPoly::one(u.nvars, spec))]);
            } else {
                let mut sum = Vec::new();
                for &e in &elim {
                    let ds = pres.subs[&e].partial_derivative(v);
                    if !ds.is_zero() {
                        sum.push((e, ds.scale_int(-1)));
                    }
                }
                parts.push(sum);
            }
        }
        let mut acc: Vec<(Vec<usize>, MultiPoly)> =
            alloc::vec![(Vec::new(), pres.normal_form(c, spec))];
        for part in parts {
            let mut next = Vec::new();
            for (idx0, c0) in &acc {
                for (e, w) in &part {
                    let mut idx1 = idx0.clone();
                    idx1.push(*e);
                    next.push((idx1, c0.mul(w)));
                }
            }
            acc = next;
        }
        for (idx1, c1) in acc {
            if let Some((sorted, sign)) = sort_indices(&idx1) {
                r.add_term(sorted, pres.normal_form(&c1, spec).scale_int(sign));
            }
        }
    }
    r
}

/// The action of P on Λ•N for a coisotropic Y: lift a class along the graph
/// splitting (ν_e ↦ ∂_e, coefficients through B ⊂ A), Schouten with P,
/// project back. Lift-independence is a property test.
pub fn normal_action_oracle(
    p: &PoissonBivector,
    pres: &SubvarietyPresentation,
    eta: &NormalClass,
    spec: FieldSpec,
) -> Result<NormalClass, CoisotropyWitness> {
    is_coisotropic(p, pres, spec)?;
    let bracket = schouten(&p.as_polyvector(), eta);
    Ok(project_to_normal(&bracket, pres, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::poly::VarTable;
    use crate::rng::TestRng;
    use alloc::vec;

    fn two_vars() -> (VarTable, FieldSpec) {
        (VarTable::new(&["x", "y"]), FieldSpec::Q)
    }

    fn std_symplectic(nvars: usize, pairs: &[(usize, usize)], spec: FieldSpec) -> PoissonBivector {
        PoissonBivector::from_upper(
            nvars,
            pairs
                .iter()
                .map(|&(i, j)| ((i, j), MultiPoly::one(nvars, spec))),
        )
        .unwrap()
    }

    fn rand_field(rng: &mut TestRng, vars: &VarTable, spec: FieldSpec, deg: usize) -> PolyVectorField {
        let n = vars.len();
        let mut u = PolyVectorField::zero(n, deg);
        for _ in 0..2 {
            let mut idx: Vec<usize> = Vec::new();
            while idx.len() < deg {
                let v = rng.below(n);
                if !idx.contains(&v) {
                    idx.push(v);
                }
            }
            idx.sort_unstable();
            u.add_term(idx, rng.poly(vars, spec, 2, 2));
        }
        u
    }

    #[test]
    fn bracket_on_coordinates() {
        let (vars, q) = two_vars();
        let p = std_symplectic(2, &[(0, 1)], q);
        let x = parse_poly("x", &vars, q).unwrap();
        let y = parse_poly("y", &vars, q).unwrap();
        assert_eq!(p.bracket(&x, &y), MultiPoly::one(2, q));
        let f = parse_poly("x^2*y - 3*x", &vars, q).unwrap();
        assert!(p.bracket(&f, &f).is_zero());
        let x2 = parse_poly("x^2", &vars, q).unwrap();
        assert_eq!(p.bracket(&x2, &y), parse_poly("2*x", &vars, q).unwrap());
    }

    #[test]
    fn jacobi_for_linear_bivector_and_rejection() {
        let vars = VarTable::new(&["x", "y", "z"]);
        let q = FieldSpec::Q;
        let p = PoissonBivector::from_upper(
            3,
            [
                ((0, 1), parse_poly("z", &vars, q).unwrap()),
                ((0, 2), parse_poly("-y", &vars, q).unwrap()),
                ((1, 2), parse_poly("x", &vars, q).unwrap()),
            ],
        )
        .unwrap();
        assert!(p.is_poisson());
        let mut rng = TestRng::seeded(11);
        for _ in 0..20 {
            let f = rng.poly(&vars, q, 2, 3);
            let g = rng.poly(&vars, q, 2, 3);
            let h = rng.poly(&vars, q, 2, 3);
            let jac = p
                .bracket(&p.bracket(&f, &g), &h)
                .add(&p.bracket(&p.bracket(&g, &h), &f))
                .add(&p.bracket(&p.bracket(&h, &f), &g));
            assert!(jac.is_zero());
        }
        let bad = PoissonBivector::from_upper(
            3,
            [
                ((0, 1), parse_poly("y", &vars, q).unwrap()),
                ((0, 2), parse_poly("x", &vars, q).unwrap()),
                ((1, 2), parse_poly("1", &vars, q).unwrap()),
            ],
        )
        .unwrap();
        assert!(!bad.is_poisson());
    }

    #[test]
    fn schouten_reduces_to_derivative_and_lie_bracket() {
        let vars = VarTable::new(&["x", "y"]);
        let q = FieldSpec::Q;
        let f = parse_poly("x^2*y", &vars, q).unwrap();
        let mut dx = PolyVectorField::zero(2, 1);
        dx.add_term(vec![0], MultiPoly::one(2, q));
        let r = schouten(&dx, &PolyVectorField::function(f.clone()));
        assert_eq!(r, PolyVectorField::function(f.partial_derivative(0)));
        // [f, X] = -X(f)
        let r2 = schouten(&PolyVectorField::function(f.clone()), &dx);
        assert_eq!(
            r2,
            PolyVectorField::function(f.partial_derivative(0).scale_int(-1))
        );
        // [x∂y, ∂x] = -∂y
        let mut xdy = PolyVectorField::zero(2, 1);
        xdy.add_term(vec![1], parse_poly("x", &vars, q).unwrap());
        let lie = schouten(&xdy, &dx);
        let mut expected = PolyVectorField::zero(2, 1);
        expected.add_term(vec![1], MultiPoly::one(2, q).scale_int(-1));
        assert_eq!(lie, expected);
    }

    #[test]
    fn schouten_constant_bivector_selfbracket_vanishes() {
        let q = FieldSpec::Q;
        let p = std_symplectic(2, &[(0, 1)], q).as_polyvector();
        assert!(schouten(&p, &p).is_zero());
    }

    #[test]
    fn schouten_graded_antisymmetry_and_jacobi() {
        let vars = VarTable::new(&["x", "y", "z"]);
        let q = FieldSpec::Q;
        let mut rng = TestRng::seeded(23);
        for (p, q_, r_) in [(1usize, 2usize, 1usize), (2, 2, 3), (0, 2, 2), (1, 1, 2), (3, 2, 2)] {
            let u = rand_field(&mut rng, &vars, q, p);
            let v = rand_field(&mut rng, &vars, q, q_);
            let w = rand_field(&mut rng, &vars, q, r_);
            let lhs = schouten(&u, &v);
            let sign = if ((p + 1) * (q_ + 1)) % 2 == 0 { 1 } else { -1 };
            let rhs = schouten(&v, &u).scale_int(-sign);
            assert_eq!(lhs, rhs, "antisymmetry at degrees ({p},{q_})");
            // [u,[v,w]] = [[u,v],w] + (-1)^{(p-1)(q-1)}[v,[u,w]]
            let jac_l = schouten(&u, &schouten(&v, &w));
            let jac_r = schouten(&schouten(&u, &v), &w)
                .add(&schouten(&v, &schouten(&u, &w)).scale_int(sign));
            assert_eq!(jac_l, jac_r, "Jacobi at degrees ({p},{q_},{r_})");
        }
    }

    #[test]
    fn hamiltonian_recovers_bracket() {
        // [[P, f], g] = -{f, g}: the classical Schouten normalization puts
        // the Hamiltonian field at [P, f] = -H_f under C1
        let (vars, q) = two_vars();
        let p = std_symplectic(2, &[(0, 1)], q);
        let mut rng = TestRng::seeded(5);
        for _ in 0..10 {
            let f = rng.poly(&vars, q, 3, 3);
            let g = rng.poly(&vars, q, 3, 3);
            let hf = schouten(&p.as_polyvector(), &PolyVectorField::function(f.clone()));
            let got = schouten(&hf, &PolyVectorField::function(g.clone()));
            assert_eq!(
                got,
                PolyVectorField::function(p.bracket(&f, &g).scale_int(-1))
            );
        }
    }

    #[test]
    fn contraction_and_koszul_examples() {
        let (vars, q) = two_vars();
        let p = std_symplectic(2, &[(0, 1)], q);
        let mut dxdy = DifferentialForm::zero(2, 2);
        dxdy.add_term(vec![0, 1], MultiPoly::one(2, q));
        // i_P(dx∧dy) = 1 under C1
        let c = contract_ip(&dxdy, &p);
        assert_eq!(c, DifferentialForm::function(MultiPoly::one(2, q)));
        // i_P on 0- and 1-forms vanishes
        let f = DifferentialForm::function(parse_poly("x^2", &vars, q).unwrap());
        assert!(contract_ip(&f, &p).is_zero());
        // d(x dy) = dx∧dy
        let mut xdy = DifferentialForm::zero(2, 1);
        xdy.add_term(vec![1], parse_poly("x", &vars, q).unwrap());
        assert_eq!(d_dr(&xdy, &[0, 1]), dxdy);
        // δ(dx∧dy) = 0, δ(x dx∧dy) = dx, δ(0-form) = 0
        assert!(koszul_delta_oracle(&dxdy, &p, &[0, 1]).is_zero());
        let mut xdxdy = DifferentialForm::zero(2, 2);
        xdxdy.add_term(vec![0, 1], parse_poly("x", &vars, q).unwrap());
        let mut dx = DifferentialForm::zero(2, 1);
        dx.add_term(vec![0], MultiPoly::one(2, q));
        assert_eq!(koszul_delta_oracle(&xdxdy, &p, &[0, 1]), dx);
        assert!(koszul_delta_oracle(&f, &p, &[0, 1]).is_zero());
    }

    #[test]
    fn koszul_delta_squares_to_zero() {
        let vars = VarTable::new(&["x", "y", "z"]);
        let q = FieldSpec::Q;
        let p = PoissonBivector::from_upper(
            3,
            [
                ((0, 1), parse_poly("z", &vars, q).unwrap()),
                ((0, 2), parse_poly("-y", &vars, q).unwrap()),
                ((1, 2), parse_poly("x", &vars, q).unwrap()),
            ],
        )
        .unwrap();
        let mut rng = TestRng::seeded(31);
        for deg in 0..=3usize {
            for _ in 0..8 {
                let omega = {
                    let mut o = DifferentialForm::zero(3, deg);
                    let mut idx: Vec<usize> = Vec::new();
                    while idx.len() < deg {
                        let v = rng.below(3);
                        if !idx.contains(&v) {
                            idx.push(v);
                        }
                    }
                    idx.sort_unstable();
                    o.add_term(idx, rng.poly(&vars, q, 3, 3));
                    o
                };
                let d2 = koszul_delta_oracle(
                    &koszul_delta_oracle(&omega, &p, &[0, 1, 2]),
                    &p,
                    &[0, 1, 2],
                );
                assert!(d2.is_zero(), "δ² ≠ 0 on degree {deg}");
            }
        }
    }

    #[test]
    fn coisotropy_examples() {
        use alloc::collections::BTreeMap;
        let q = FieldSpec::Q;
        let vars = VarTable::new(&["x", "y"]);
        let p = std_symplectic(2, &[(0, 1)], q);
        let mut subs = BTreeMap::new();
        subs.insert(1, MultiPoly::zero(2));
        let y0 = SubvarietyPresentation::new(&vars, subs).unwrap();
        assert!(is_coisotropic(&p, &y0, q).is_ok());
        // zero bivector: everything coisotropic
        assert!(is_coisotropic(&PoissonBivector::zero(2), &y0, q).is_ok());

        let vars4 = VarTable::new(&["x1", "x2", "x3", "x4"]);
        let p4 = std_symplectic(4, &[(0, 1), (2, 3)], q);
        let mut subs = BTreeMap::new();
        subs.insert(0, MultiPoly::zero(4));
        subs.insert(1, MultiPoly::zero(4));
        let bad = SubvarietyPresentation::new(&vars4, subs).unwrap();
        let w = is_coisotropic(&p4, &bad, q).unwrap_err();
        assert_eq!((w.gen_i, w.gen_j), (0, 1));
        // {f_0, f_1} = {x1, x2} = 1
        assert_eq!(w.residue, MultiPoly::one(4, q));

        let mut subs = BTreeMap::new();
        subs.insert(0, MultiPoly::zero(4));
        subs.insert(2, MultiPoly::zero(4));
        let good = SubvarietyPresentation::new(&vars4, subs).unwrap();
        assert!(is_coisotropic(&p4, &good, q).is_ok());
    }

    #[test]
    fn coisotropy_invariant_under_linear_change_of_generators() {
        // {x1 - x2 = 0, x3 = 0} presented two ways (relabel kept/eliminated)
        let q = FieldSpec::Q;
        let vars = VarTable::new(&["x1", "x2", "x3", "x4"]);
        let p4 = std_symplectic(4, &[(0, 1), (2, 3)], q);
        use alloc::collections::BTreeMap;
        // Y: x1 = x2, x3 = 0 -> {f1, f2} = {x1 - x2, x3} = 0 coisotropic?
        // {x1-x2, x3} = 0; {x1-x2, x1-x2} = 0; fine.
        let mut subs = BTreeMap::new();
        subs.insert(0, parse_poly("x2", &vars, q).unwrap());
        subs.insert(2, MultiPoly::zero(4));
        let pres_a = SubvarietyPresentation::new(&vars, subs).unwrap();
        // same variety, eliminating x2 instead
        let mut subs = BTreeMap::new();
        subs.insert(1, parse_poly("x1", &vars, q).unwrap());
        subs.insert(2, MultiPoly::zero(4));
        let pres_b = SubvarietyPresentation::new(&vars, subs).unwrap();
        assert_eq!(
            is_coisotropic(&p4, &pres_a, q).is_ok(),
            is_coisotropic(&p4, &pres_b, q).is_ok()
        );
    }

    #[test]
    fn normal_action_examples() {
        use alloc::collections::BTreeMap;
        let q = FieldSpec::Q;
        let vars = VarTable::new(&["x", "y"]);
        let p = std_symplectic(2, &[(0, 1)], q);
        let mut subs = BTreeMap::new();
        subs.insert(1, MultiPoly::zero(2));
        let y0 = SubvarietyPresentation::new(&vars, subs).unwrap();
        // η = b(x) ∈ Λ⁰N ↦ ±(∂b/∂x)·ν
        let b = parse_poly("x^3 - 2*x", &vars, q).unwrap();
        let eta = PolyVectorField::function(b.clone());
        let got = normal_action_oracle(&p, &y0, &eta, q).unwrap();
        assert_eq!(got.degree, 1);
        let coeff = got.terms.get(&vec![1]).expect("ν-coefficient");
        let db = b.partial_derivative(0);
        assert!(
            coeff == &db || coeff == &db.scale_int(-1),
            "normal action should be ±∂b/∂x·ν, got {coeff:?}"
        );
        // Λ²N = 0 for a rank-1 normal bundle
        let mut nu = PolyVectorField::zero(2, 1);
        nu.add_term(vec![1], MultiPoly::one(2, q));
        assert!(wedge(&nu, &nu).is_zero());
    }

    #[test]
    fn normal_action_lift_independence() {
        use alloc::collections::BTreeMap;
        // perturbing the lift by something vanishing on Y (an I-multiple)
        // does not change the projected action
        let q = FieldSpec::Q;
        let vars = VarTable::new(&["x", "y"]);
        let p = std_symplectic(2, &[(0, 1)], q);
        let mut subs = BTreeMap::new();
        subs.insert(1, MultiPoly::zero(2));
        let y0 = SubvarietyPresentation::new(&vars, subs).unwrap();
        let b = parse_poly("x^2", &vars, q).unwrap();
        let eta = PolyVectorField::function(b.clone());
        let base = normal_action_oracle(&p, &y0, &eta, q).unwrap();
        // second lift: add y·x (zero on Y) to the function
        let fy = y0.generator(1, q);
        let eta2 = PolyVectorField::function(b.add(&fy.mul(&parse_poly("x", &vars, q).unwrap())));
        let got2 = project_to_normal(&schouten(&p.as_polyvector(), &eta2), &y0, q);
        assert_eq!(base.terms, got2.terms);
        // and a tangential vector field projects to zero
        let mut tang = PolyVectorField::zero(2, 1);
        tang.add_term(vec![0], parse_poly("x^3", &vars, q).unwrap());
        assert!(project_to_normal(&tang, &y0, q).is_zero());
    }
}
