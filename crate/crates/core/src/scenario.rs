//! Scenario descriptors: the ambient ring, Poisson structure, the two
//! subvariety presentations, truncation policy and deformation options, plus
//! the standard constructors (diagonal, graph of df, linear coisotropic).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::grading::GradingAxes;
use crate::algebra::poly::{MultiPoly, VarTable};
use crate::algebra::presentation::SubvarietyPresentation;
use crate::algebra::scalar::FieldSpec;
use crate::bar::{BarCtx, TruncMode, TruncationPolicy};
use crate::deform::{
    assemble_alpha_b, gamma_b_target, gamma_c_target, lift_symbol_divergence, lift_symbol_zero,
    solve_gamma, DeformError, GammaBounds, PsiChoice,
};
use crate::hochschild::{
    alpha_a_from_bivector, transpose, CochainCtx, ModuleTag, PolyDiffCochain, SlotSig,
};
use crate::poisson::PoissonBivector;

#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub vars: VarTable,
    pub spec: FieldSpec,
    pub p: PoissonBivector,
    pub y: SubvarietyPresentation,
    pub z: SubvarietyPresentation,
    pub trunc: TruncationPolicy,
    pub psi: PsiChoice,
    pub second_order: bool,
    pub gamma_bounds: GammaBounds,
}

/// The full cocycle package of a scenario: the algebra deformation, a right
/// deformation of B, a left deformation of C and its transpose, and the
/// second order data when requested.
pub struct DeformationData {
    pub alpha_a: PolyDiffCochain,
    pub alpha_b: PolyDiffCochain,
    pub alpha_c: PolyDiffCochain,
    pub alpha_c_right: PolyDiffCochain,
    pub gamma: Option<GammaData>,
}

pub struct GammaData {
    pub gamma_a: PolyDiffCochain,
    pub gamma_b: PolyDiffCochain,
    pub gamma_c: PolyDiffCochain,
    pub gamma_c_right: PolyDiffCochain,
}

impl Scenario {
    pub fn cochain_ctx(&self) -> CochainCtx<'_> {
        CochainCtx {
            nvars: self.vars.len(),
            spec: self.spec,
            y: &self.y,
            z: &self.z,
        }
    }

    pub fn bar_ctx(&self) -> BarCtx<'_> {
        BarCtx {
            cc: self.cochain_ctx(),
            trunc: self.trunc,
        }
    }

    /// The finest multigrading both presentations respect; fall back to the
    /// total grading outside exact-graded mode.
    pub fn axes(&self) -> GradingAxes {
        match self.trunc.mode {
            TruncMode::ExactGraded => {
                GradingAxes::common(self.vars.len(), &[&self.y, &self.z])
                    .expect("exact-graded scenario must have linear homogeneous substitutions")
            }
            TruncMode::Filtered => GradingAxes::total(self.vars.len()),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.p.is_poisson() {
            return Err(String::from("bivector fails the Jacobi identity"));
        }
        if self.trunc.mode == TruncMode::ExactGraded
            && !(self.y.is_linear_homogeneous() && self.z.is_linear_homogeneous())
        {
            return Err(String::from(
                "exact-graded truncation requested for an inhomogeneous presentation; use filtered mode",
            ));
        }
        Ok(())
    }

    /// Build the first order deformation triple (and second order data when
    /// the scenario asks for it).
    pub fn build_deformation(&self) -> Result<DeformationData, DeformError> {
        let ctx = self.cochain_ctx();
        let alpha_a = alpha_a_from_bivector(&self.p, self.spec);
        let psi_y = match self.psi {
            PsiChoice::ZeroConstants => lift_symbol_zero(&self.p, &self.y, self.spec)?,
            PsiChoice::Divergence => lift_symbol_divergence(&ctx, &self.p, ModuleTag::Y)?,
        };
        let alpha_b = assemble_alpha_b(&ctx, &self.p, ModuleTag::Y, psi_y)?.alpha_b;
        let psi_z = match self.psi {
            PsiChoice::ZeroConstants => lift_symbol_zero(&self.p, &self.z, self.spec)?,
            PsiChoice::Divergence => lift_symbol_divergence(&ctx, &self.p, ModuleTag::Z)?,
        };
        let alpha_c_right = assemble_alpha_b(&ctx, &self.p, ModuleTag::Z, psi_z)?.alpha_b;
        let alpha_c = transpose(&alpha_c_right);
        let gamma = if self.second_order {
            let gamma_a = crate::deform::moyal_gamma_a(&self.p, self.spec)
                .map_err(|certificate| DeformError::SolverFailure { certificate })?;
            let eta_b = gamma_b_target(&ctx, &alpha_a, &alpha_b, &gamma_a);
            let gamma_b = solve_gamma(
                &ctx,
                SlotSig::Module {
                    tag: ModuleTag::Y,
                    first: true,
                    a_slots: 1,
                },
                &eta_b,
                self.gamma_bounds,
            )?;
            let eta_cr = gamma_b_target(&ctx, &alpha_a, &alpha_c_right, &gamma_a);
            let gamma_c_right = solve_gamma(
                &ctx,
                SlotSig::Module {
                    tag: ModuleTag::Z,
                    first: true,
                    a_slots: 1,
                },
                &eta_cr,
                self.gamma_bounds,
            )?;
            let eta_c = gamma_c_target(&ctx, &alpha_a, &alpha_c, &gamma_a);
            let gamma_c = solve_gamma(
                &ctx,
                SlotSig::Module {
                    tag: ModuleTag::Z,
                    first: false,
                    a_slots: 1,
                },
                &eta_c,
                self.gamma_bounds,
            )?;
            Some(GammaData {
                gamma_a,
                gamma_b,
                gamma_c,
                gamma_c_right,
            })
        } else {
            None
        };
        Ok(DeformationData {
            alpha_a,
            alpha_b,
            alpha_c,
            alpha_c_right,
            gamma,
        })
    }
}

/// Constant-coefficient bivector from integer entries on the upper triangle.
pub fn constant_bivector(
    nvars: usize,
    spec: FieldSpec,
    entries: &[(usize, usize, i64)],
) -> PoissonBivector {
    PoissonBivector::from_upper(
        nvars,
        entries
            .iter()
            .map(|&(i, j, v)| ((i, j), MultiPoly::constant(nvars, spec.int(v)))),
    )
    .expect("valid upper triangle")
}

/// Diagonal scenario: X = Y × Y for Y = 𝔸ⁿ, Y = Z = the diagonal, and the
/// product bivector P ⊕ (−P) built from a constant base bivector on Y. The
/// first n variables are the base coordinates, the second n their primed
/// copies, eliminated by the diagonal substitution.
pub fn diagonal(
    n: usize,
    base_upper: &[(usize, usize, i64)],
    spec: FieldSpec,
    trunc: TruncationPolicy,
    second_order: bool,
) -> Scenario {
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.extend((1..=n).map(|i| format!("y{i}")));
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let vars = VarTable::new(&name_refs);
    let nv = 2 * n;
    let mut entries: Vec<(usize, usize, i64)> = Vec::new();
    for &(i, j, v) in base_upper {
        entries.push((i, j, v));
        entries.push((n + i, n + j, -v));
    }
    let p = constant_bivector(nv, spec, &entries);
    let mut subs = BTreeMap::new();
    for i in 0..n {
        subs.insert(n + i, MultiPoly::var(nv, i, spec));
    }
    let y = SubvarietyPresentation::new(&vars, subs).unwrap();
    let z = y.clone();
    Scenario {
        id: format!("diagonal_a{n}"),
        vars,
        spec,
        p,
        y,
        z,
        trunc,
        psi: PsiChoice::ZeroConstants,
        second_order,
        gamma_bounds: GammaBounds::default(),
    }
}

/// The base bivector of a diagonal scenario, as a bivector on the kept
/// variables (used by the Koszul and Schouten oracles).
pub fn diagonal_base_bivector(sc: &Scenario) -> PoissonBivector {
    sc.p.restrict(&sc.y, sc.spec)
}

/// Y = {y = 0} ⊂ 𝔸², Z = Y, standard symplectic structure.
pub fn self_intersection(spec: FieldSpec, trunc: TruncationPolicy, second_order: bool) -> Scenario {
    let vars = VarTable::new(&["x", "y"]);
    let p = constant_bivector(2, spec, &[(0, 1, 1)]);
    let mut subs = BTreeMap::new();
    subs.insert(1, MultiPoly::zero(2));
    let y = SubvarietyPresentation::new(&vars, subs).unwrap();
    let z = y.clone();
    Scenario {
        id: String::from("self_intersection"),
        vars,
        spec,
        p,
        y,
        z,
        trunc,
        psi: PsiChoice::ZeroConstants,
        second_order,
        gamma_bounds: GammaBounds::default(),
    }
}

/// Y = {y = 0}, Z = {x = 0} in the symplectic plane.
pub fn transverse_lines(spec: FieldSpec, trunc: TruncationPolicy) -> Scenario {
    let vars = VarTable::new(&["x", "y"]);
    let p = constant_bivector(2, spec, &[(0, 1, 1)]);
    let mut subs = BTreeMap::new();
    subs.insert(1, MultiPoly::zero(2));
    let y = SubvarietyPresentation::new(&vars, subs).unwrap();
    let mut subs = BTreeMap::new();
    subs.insert(0, MultiPoly::zero(2));
    let z = SubvarietyPresentation::new(&vars, subs).unwrap();
    Scenario {
        id: String::from("transverse_lines"),
        vars,
        spec,
        p,
        y,
        z,
        trunc,
        psi: PsiChoice::ZeroConstants,
        second_order: false,
        gamma_bounds: GammaBounds::default(),
    }
}

/// Coisotropic coordinate subspaces of the standard symplectic 𝔸⁴:
/// Y = {x1 = x3 = 0}, Z = {x2 = x4 = 0}.
pub fn linear_coisotropic_a4(
    spec: FieldSpec,
    trunc: TruncationPolicy,
    second_order: bool,
) -> Scenario {
    let vars = VarTable::new(&["x1", "x2", "x3", "x4"]);
    let p = constant_bivector(4, spec, &[(0, 1, 1), (2, 3, 1)]);
    let mut subs = BTreeMap::new();
    subs.insert(0, MultiPoly::zero(4));
    subs.insert(2, MultiPoly::zero(4));
    let y = SubvarietyPresentation::new(&vars, subs).unwrap();
    let mut subs = BTreeMap::new();
    subs.insert(1, MultiPoly::zero(4));
    subs.insert(3, MultiPoly::zero(4));
    let z = SubvarietyPresentation::new(&vars, subs).unwrap();
    Scenario {
        id: String::from("linear_coiso_a4"),
        vars,
        spec,
        p,
        y,
        z,
        trunc,
        psi: PsiChoice::ZeroConstants,
        second_order,
        gamma_bounds: GammaBounds::default(),
    }
}

/// Non-coisotropic fixture: Y = {x1 = x2 = 0} in symplectic 𝔸⁴.
pub fn non_coisotropic_fixture(spec: FieldSpec, trunc: TruncationPolicy) -> Scenario {
    let vars = VarTable::new(&["x1", "x2", "x3", "x4"]);
    let p = constant_bivector(4, spec, &[(0, 1, 1), (2, 3, 1)]);
    let mut subs = BTreeMap::new();
    subs.insert(0, MultiPoly::zero(4));
    subs.insert(1, MultiPoly::zero(4));
    let y = SubvarietyPresentation::new(&vars, subs).unwrap();
    let z = y.clone();
    Scenario {
        id: String::from("non_coisotropic"),
        vars,
        spec,
        p,
        y,
        z,
        trunc,
        psi: PsiChoice::ZeroConstants,
        second_order: false,
        gamma_bounds: GammaBounds::default(),
    }
}

/// Zero section Y and graph of df in T*𝔸¹ with coordinates (x, ξ); for a
/// nonquadratic f this is the filtered-mode exercise.
pub fn graph_of_df(f_base: &MultiPoly, spec: FieldSpec, trunc: TruncationPolicy) -> Scenario {
    let vars = VarTable::new(&["x", "xi"]);
    let p = constant_bivector(2, spec, &[(0, 1, 1)]);
    let mut subs = BTreeMap::new();
    subs.insert(1, MultiPoly::zero(2));
    let y = SubvarietyPresentation::new(&vars, subs).unwrap();
    let mut subs = BTreeMap::new();
    subs.insert(1, f_base.partial_derivative(0));
    let z = SubvarietyPresentation::new(&vars, subs).unwrap();
    Scenario {
        id: String::from("graph_of_df"),
        vars,
        spec,
        p,
        y,
        z,
        trunc,
        psi: PsiChoice::ZeroConstants,
        second_order: false,
        gamma_bounds: GammaBounds::default(),
    }
}

/// The closed-form right deformation of the diagonal scenario:
/// α_B(b, u⊗v) = −½P(d(bu)∧dv) + ½P(db∧du)·v, written as a polydifferential
/// cochain on the product ring.
pub fn diagonal_alpha_b_closed_form(sc: &Scenario) -> PolyDiffCochain {
    let n = sc.vars.len() / 2;
    let nv = sc.vars.len();
    let spec = sc.spec;
    let base = diagonal_base_bivector(sc);
    let sig = SlotSig::Module {
        tag: ModuleTag::Y,
        first: true,
        a_slots: 1,
    };
    let mut c = PolyDiffCochain::zero(sig, nv);
    let mut entries: Vec<(usize, usize, MultiPoly)> = Vec::new();
    for ((i, j), v) in &base.upper {
        entries.push((*i, *j, v.clone()));
        entries.push((*j, *i, v.scale_int(-1)));
    }
    use crate::algebra::monomial::Monomial;
    for (i, j, pij) in &entries {
        let half = pij.scale(&spec.ratio(1, 2));
        // −½ P_ij ∂_i b · m(∂'_j a): the primed copy of x_j is variable n+j
        c.add_term(
            alloc::vec![Monomial::var(nv, *i), Monomial::var(nv, n + j)],
            half.scale_int(-1),
        );
        // −½ P_ij b · m(∂_i ∂'_j a)
        c.add_term(
            alloc::vec![
                Monomial::unit(nv),
                Monomial::var(nv, *i).mul(&Monomial::var(nv, n + j))
            ],
            half.scale_int(-1),
        );
        // +½ P_ij ∂_i b · m(∂_j a)
        c.add_term(
            alloc::vec![Monomial::var(nv, *i), Monomial::var(nv, *j)],
            half.clone(),
        );
    }
    c
}
