//! First and second order module deformations attached to a coisotropic
//! subvariety: the maps ρ and σ_ψ, the ψ-lift (zero-constants or divergence
//! flavour), assembly of α_B, the Moyal γ_A, and the linear solver for γ_B.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::monomial::{monomials_of_degree, Monomial};
use crate::algebra::poly::MultiPoly;
use crate::algebra::presentation::SubvarietyPresentation;
use crate::algebra::scalar::{FieldSpec, Scalar};
use crate::hochschild::{
    d_ab, d_hoch, CochainCtx, ModuleTag, PolyDiffCochain, SlotSig,
};
use crate::homology::{sparse_from_map, Eliminator, SparseVec};
use crate::poisson::{is_coisotropic, CoisotropyWitness, PoissonBivector};

#[derive(Debug)]
pub enum DeformError {
    NotCoisotropic(CoisotropyWitness),
    /// d_AB(α_A, α_B) ≠ 0 after assembly; signals a normalization bug.
    CocycleAssertionFailed,
    /// No scalar in {±1, ±1/2} makes the divergence lift satisfy the
    /// pseudo-Lie identity.
    DivergenceScalarNotFound,
    /// γ-solver: the target class is nonzero in the ansatz space.
    SolverFailure { certificate: String },
}

/// Which ψ-lift of the principal symbol to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiChoice {
    /// ψ₀ = 0 on the generators.
    ZeroConstants,
    /// ψ₀(f_e) = c · div_ω(H_{f_e}) with ω the standard volume form on Y and
    /// the scalar c pinned by the pseudo-Lie identity.
    Divergence,
}

/// ρ(db, f̄_e) matrix: for each (kept k, eliminated e) the value nf({k, f_e}).
pub struct Rho {
    pub values: BTreeMap<(usize, usize), MultiPoly>,
}

/// σ_ψ(f̄_e ⊗ dk) = ½⟨P|_Y, d f_e ∧ dk⟩ = ½ nf({f_e, k}).
pub struct Symbol {
    pub values: BTreeMap<(usize, usize), MultiPoly>,
}

/// Well-definedness of ρ needs {I, I} ⊂ I.
pub fn build_rho(
    p: &PoissonBivector,
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
) -> Result<Rho, DeformError> {
    is_coisotropic(p, pres, spec).map_err(DeformError::NotCoisotropic)?;
    let mut values = BTreeMap::new();
    for &k in &pres.kept {
        for &e in pres.eliminated().iter() {
            let f = pres.generator(e, spec);
            let v = pres.normal_form(&p.bracket(&MultiPoly::var(pres.nvars, k, spec), &f), spec);
            if !v.is_zero() {
                values.insert((k, e), v);
            }
        }
    }
    Ok(Rho { values })
}

pub fn build_symbol(
    p: &PoissonBivector,
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
) -> Result<Symbol, DeformError> {
    is_coisotropic(p, pres, spec).map_err(DeformError::NotCoisotropic)?;
    let mut values = BTreeMap::new();
    for &e in pres.eliminated().iter() {
        let f = pres.generator(e, spec);
        for &k in &pres.kept {
            let v = pres
                .normal_form(&p.bracket(&f, &MultiPoly::var(pres.nvars, k, spec)), spec)
                .scale(&spec.ratio(1, 2));
            if !v.is_zero() {
                values.insert((e, k), v);
            }
        }
    }
    Ok(Symbol { values })
}

/// A first order differential operator ψ: I/I² → B with principal symbol σ_ψ,
/// i.e. ψ(b·f̄_e) = b·ψ₀(f̄_e) − σ_ψ(f̄_e ⊗ db). The minus sign makes the
/// constraint ψ(ax) − aψ(x) = 1_B α_A(a, x) hold, which is asserted by the
/// cocycle check after assembly.
pub struct PsiLift {
    pub choice: PsiChoice,
    pub psi0: BTreeMap<usize, MultiPoly>,
    pub symbol: Symbol,
    /// the divergence normalization, when applicable
    pub scalar: Option<Scalar>,
}

impl PsiLift {
    /// Evaluate on an ideal class given as Σ b_e f̄_e.
    pub fn eval(
        &self,
        pres: &SubvarietyPresentation,
        spec: FieldSpec,
        coords: &BTreeMap<usize, MultiPoly>,
    ) -> MultiPoly {
        let mut out = MultiPoly::zero(pres.nvars);
        for (e, b) in coords {
            if let Some(p0) = self.psi0.get(e) {
                out = out.add(&b.mul(p0));
            }
            for &k in &pres.kept {
                if let Some(s) = self.symbol.values.get(&(*e, k)) {
                    out = out.sub(&b.partial_derivative(k).mul(s));
                }
            }
        }
        pres.normal_form(&out, spec)
    }
}

/// Hamiltonian field of a generator, as its values on kept coordinates;
/// tangency to Y is exactly coisotropy.
fn hamiltonian_on_kept(
    p: &PoissonBivector,
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
    e: usize,
) -> BTreeMap<usize, MultiPoly> {
    let f = pres.generator(e, spec);
    let mut out = BTreeMap::new();
    for &k in &pres.kept {
        let v = pres.normal_form(&p.bracket(&f, &MultiPoly::var(pres.nvars, k, spec)), spec);
        if !v.is_zero() {
            out.insert(k, v);
        }
    }
    out
}

fn divergence(pres: &SubvarietyPresentation, field: &BTreeMap<usize, MultiPoly>) -> MultiPoly {
    let mut out = MultiPoly::zero(pres.nvars);
    for (k, g) in field {
        out = out.add(&g.partial_derivative(*k));
    }
    out
}

/// The assembled first order deformation of B.
pub struct FirstOrderDeformation {
    pub alpha_b: PolyDiffCochain,
    pub psi: PsiLift,
}

/// α_B(b, a) = ρ(db, p(da)) − ½ P(q(d a|_Y), q(db)) + b·ψ(p(da)), built
/// symbolically; the d_AB cocycle condition is asserted before returning.
pub fn assemble_alpha_b(
    ctx: &CochainCtx,
    p: &PoissonBivector,
    tag: ModuleTag,
    psi: PsiLift,
) -> Result<FirstOrderDeformation, DeformError> {
    let pres = ctx.pres(tag);
    let spec = ctx.spec;
    let nvars = ctx.nvars;
    let rho = build_rho(p, pres, spec)?;
    let sig = SlotSig::Module {
        tag,
        first: true,
        a_slots: 1,
    };
    let mut c = PolyDiffCochain::zero(sig, nvars);
    let unit = Monomial::unit(nvars);

    // ρ(db, p(da)) = Σ_{k,e} ρ_{k,e} · ∂_k b · nf(∂_e a)
    for ((k, e), val) in &rho.values {
        c.add_term(vec![Monomial::var(nvars, *k), Monomial::var(nvars, *e)], val.clone());
    }

    // −½ Σ_{i<j kept} nf(P_ij) [∂_i(a|_Y) ∂_j b − ∂_j(a|_Y) ∂_i b]; the
    // restricted derivative ∂_i ∘ nf expands through the chain rule
    let p_rest = p.restrict(pres, spec);
    for ((i, j), coeff) in &p_rest.upper {
        let half = coeff.scale(&spec.ratio(1, 2));
        for (ki, kj, s) in [(*i, *j, -1i64), (*j, *i, 1i64)] {
            // s·half·∂_{ki}(nf a)·∂_{kj}(b)
            for (cc, v) in nf_then_derive(pres, spec, ki) {
                c.add_term(
                    vec![Monomial::var(nvars, kj), v],
                    half.mul(&cc).scale_int(s),
                );
            }
        }
    }

    // b·ψ(p(da)) with p(da) = Σ_e nf(∂_e a) f̄_e:
    //   Σ_e ψ₀(e)·nf(∂_e a) − Σ_{e,k} σ_{e,k}·∂_k(nf(∂_e a))
    for (e, p0) in &psi.psi0 {
        c.add_term(vec![unit.clone(), Monomial::var(nvars, *e)], p0.clone());
    }
    for ((e, k), sval) in &psi.symbol.values {
        for (cc, v) in nf_deriv_after(pres, spec, *k, *e) {
            c.add_term(vec![unit.clone(), v], sval.mul(&cc).scale_int(-1));
        }
    }

    // hard assertion: (hoch-B) i.e. d_AB(α_A, α_B) = 0
    let alpha_a = crate::hochschild::alpha_a_from_bivector(p, spec);
    let (da, db) = d_ab(ctx, &alpha_a, &c);
    if !da.is_zero_map(ctx) || !db.is_zero_map(ctx) {
        return Err(DeformError::CocycleAssertionFailed);
    }
    Ok(FirstOrderDeformation { alpha_b: c, psi })
}

/// ∂_k ∘ nf as Σ coeff · nf∘∂^v.
fn nf_then_derive(
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
    k: usize,
) -> Vec<(MultiPoly, Monomial)> {
    let nvars = pres.nvars;
    let mut out = vec![(MultiPoly::one(nvars, spec), Monomial::var(nvars, k))];
    for (e, s) in &pres.subs {
        let ds = s.partial_derivative(k);
        if !ds.is_zero() {
            out.push((ds, Monomial::var(nvars, *e)));
        }
    }
    out
}

/// ∂_k ∘ nf ∘ ∂_e as Σ coeff · nf∘∂^v.
fn nf_deriv_after(
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
    k: usize,
    e: usize,
) -> Vec<(MultiPoly, Monomial)> {
    nf_then_derive(pres, spec, k)
        .into_iter()
        .map(|(c, v)| (c, v.mul(&Monomial::var(pres.nvars, e))))
        .collect()
}

pub fn lift_symbol_zero(
    p: &PoissonBivector,
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
) -> Result<PsiLift, DeformError> {
    Ok(PsiLift {
        choice: PsiChoice::ZeroConstants,
        psi0: BTreeMap::new(),
        symbol: build_symbol(p, pres, spec)?,
        scalar: None,
    })
}

/// Divergence lift: ψ₀(f_e) = c · div(H_{f_e}) with ω the coordinate volume
/// form on Y. The paper leaves the normalization of the composite open; the
/// engine tries c ∈ {1, −1, ½, −½} and keeps the one satisfying the
/// pseudo-Lie identity on all generator pairs.
pub fn lift_symbol_divergence(
    ctx: &CochainCtx,
    p: &PoissonBivector,
    tag: ModuleTag,
) -> Result<PsiLift, DeformError> {
    let pres = ctx.pres(tag);
    let spec = ctx.spec;
    let divs: BTreeMap<usize, MultiPoly> = pres
        .eliminated()
        .iter()
        .map(|&e| (e, divergence(pres, &hamiltonian_on_kept(p, pres, spec, e))))
        .collect();
    let candidates = [
        spec.int(1),
        spec.int(-1),
        spec.ratio(1, 2),
        spec.ratio(-1, 2),
    ];
    let mut passing: Vec<(Scalar, PsiLift)> = Vec::new();
    for c in candidates {
        let psi = PsiLift {
            choice: PsiChoice::Divergence,
            psi0: divs
                .iter()
                .map(|(e, d)| (*e, d.scale(&c)))
                .filter(|(_, d)| !d.is_zero())
                .collect(),
            symbol: build_symbol(p, pres, spec)?,
            scalar: Some(c.clone()),
        };
        let deal = assemble_alpha_b(ctx, p, tag, psi)?;
        if pseudo_lie_holds(ctx, p, tag, &deal.alpha_b) {
            passing.push((c, deal.psi));
        }
    }
    // degenerate inputs can make the choice vacuous; then all candidates
    // agree because ψ₀ ≡ 0
    match passing.len() {
        0 => Err(DeformError::DivergenceScalarNotFound),
        1 => Ok(passing.remove(0).1),
        _ => {
            let zero = passing.iter().all(|(_, l)| l.psi0.is_empty());
            if zero {
                Ok(passing.remove(0).1)
            } else {
                Err(DeformError::DivergenceScalarNotFound)
            }
        }
    }
}

/// α_B(α_B(b,x₁),x₂) − α_B(α_B(b,x₂),x₁) − 2α_B(b, α_A(x₁,x₂)) = 0 for
/// x₁, x₂ ∈ I, checked on generator pairs against polynomial b's.
pub fn pseudo_lie_holds(
    ctx: &CochainCtx,
    p: &PoissonBivector,
    tag: ModuleTag,
    alpha_b: &PolyDiffCochain,
) -> bool {
    let pres = ctx.pres(tag);
    let spec = ctx.spec;
    let elim = pres.eliminated();
    let mut test_bs: Vec<MultiPoly> = vec![MultiPoly::one(ctx.nvars, spec)];
    for d in 1..=2u32 {
        for m in monomials_of_degree(ctx.nvars, &pres.kept, d) {
            test_bs.push(MultiPoly::monomial(ctx.nvars, m, spec.one()));
        }
    }
    for &e1 in &elim {
        for &e2 in &elim {
            let x1 = pres.generator(e1, spec);
            let x2 = pres.generator(e2, spec);
            let a12 = p.bracket(&x1, &x2).scale(&spec.ratio(1, 2));
            for b in &test_bs {
                let t1 = alpha_b.eval(ctx, &[alpha_b.eval(ctx, &[b.clone(), x1.clone()]), x2.clone()]);
                let t2 = alpha_b.eval(ctx, &[alpha_b.eval(ctx, &[b.clone(), x2.clone()]), x1.clone()]);
                let t3 = alpha_b.eval(ctx, &[b.clone(), a12.clone()]).scale_int(2);
                if !t1.sub(&t2).sub(&t3).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Constant-coefficient Moyal second-order term:
/// γ_A(a, b) = ⅛ Σ P_ij P_kl ∂_i∂_k a · ∂_j∂_l b  (full antisymmetric sums).
pub fn moyal_gamma_a(p: &PoissonBivector, spec: FieldSpec) -> Result<PolyDiffCochain, String> {
    if !p.is_constant() {
        return Err(String::from(
            "second order data is supported for constant bivectors only",
        ));
    }
    let n = p.nvars;
    // full antisymmetric matrix entries
    let mut entries: Vec<(usize, usize, Scalar)> = Vec::new();
    for ((i, j), c) in &p.upper {
        let s = c
            .constant_term()
            .cloned()
            .unwrap_or_else(|| spec.zero());
        entries.push((*i, *j, s.clone()));
        entries.push((*j, *i, s.neg()));
    }
    let mut gamma = PolyDiffCochain::zero(SlotSig::AValued { arity: 2 }, n);
    let eighth = spec.ratio(1, 8);
    for (i, j, pij) in &entries {
        for (k, l, pkl) in &entries {
            let coeff = pij.mul(pkl).mul(&eighth);
            let u = Monomial::var(n, *i).mul(&Monomial::var(n, *k));
            let v = Monomial::var(n, *j).mul(&Monomial::var(n, *l));
            gamma.add_term(vec![u, v], MultiPoly::constant(n, coeff));
        }
    }
    Ok(gamma)
}

/// Ansatz bounds for the γ-solver.
#[derive(Clone, Copy, Debug)]
pub struct GammaBounds {
    pub max_order: u32,
    pub max_coeff_degree: u32,
}

impl Default for GammaBounds {
    fn default() -> Self {
        // the primitive of the γ_B target needs order 4 already on the
        // hypersurface scenario, even though the target itself has order 3
        GammaBounds {
            max_order: 4,
            max_coeff_degree: 4,
        }
    }
}

/// Solve d_hoch(γ) = η exactly inside the polydifferential ansatz space of
/// the given signature (module slot and coefficients over the kept
/// variables). Returns the certificate on failure: enlarging the bounds is
/// the caller's move.
pub fn solve_gamma(
    ctx: &CochainCtx,
    sig: SlotSig,
    eta: &PolyDiffCochain,
    bounds: GammaBounds,
) -> Result<PolyDiffCochain, DeformError> {
    let (tag, _) = match sig {
        SlotSig::Module { tag, first, .. } => (tag, first),
        _ => panic!("solver targets module-valued cochains"),
    };
    let pres = ctx.pres(tag);
    let spec = ctx.spec;
    let nvars = ctx.nvars;
    let all: Vec<usize> = (0..nvars).collect();
    let mpos = sig.module_pos().unwrap();

    // For exact-graded presentations d_hoch preserves the internal-degree
    // shift (coefficient degree minus total derivative order), so the ansatz
    // is cut down to the shifts occurring in the target.
    let shift_filter: Option<Vec<i64>> = if pres.is_linear_homogeneous() {
        let canon = eta.canonicalize(ctx);
        let mut shifts: Vec<i64> = Vec::new();
        for (key, coeff) in &canon.terms {
            let orders: i64 = key.iter().map(|m| m.degree() as i64).sum();
            for mon in coeff.terms.keys() {
                let s = mon.degree() as i64 - orders;
                if !shifts.contains(&s) {
                    shifts.push(s);
                }
            }
        }
        Some(shifts)
    } else {
        None
    };

    // enumerate the ansatz basis
    let mut slot_choices: Vec<Vec<Monomial>> = Vec::new();
    for slot in 0..sig.slot_count() {
        let on: &[usize] = if slot == mpos { &pres.kept } else { &all };
        let mut ms = Vec::new();
        for d in 0..=bounds.max_order {
            ms.extend(monomials_of_degree(nvars, on, d));
        }
        slot_choices.push(ms);
    }
    let mut coeffs = Vec::new();
    for d in 0..=bounds.max_coeff_degree {
        coeffs.extend(monomials_of_degree(nvars, &pres.kept, d));
    }
    let mut basis: Vec<(Vec<Monomial>, Monomial)> = Vec::new();
    let mut keys: Vec<Vec<Monomial>> = vec![Vec::new()];
    for choice in &slot_choices {
        let mut next = Vec::new();
        for k in &keys {
            for m in choice {
                let mut k2 = k.clone();
                k2.push(m.clone());
                next.push(k2);
            }
        }
        keys = next;
    }
    for k in keys {
        let orders: i64 = k.iter().map(|m| m.degree() as i64).sum();
        for c in &coeffs {
            if let Some(shifts) = &shift_filter {
                if !shifts.contains(&(c.degree() as i64 - orders)) {
                    continue;
                }
            }
            basis.push((k.clone(), c.clone()));
        }
    }

    // target coordinate space: (term key, coeff monomial) -> row
    let mut row_of: BTreeMap<(Vec<Monomial>, Monomial), u32> = BTreeMap::new();
    let to_vec = |c: &PolyDiffCochain, row_of: &mut BTreeMap<(Vec<Monomial>, Monomial), u32>| -> SparseVec {
        let canon = c.canonicalize(ctx);
        let mut v: BTreeMap<u32, Scalar> = BTreeMap::new();
        for (key, coeff) in &canon.terms {
            for (mon, s) in &coeff.terms {
                let n = row_of.len() as u32;
                let row = *row_of
                    .entry((key.clone(), mon.clone()))
                    .or_insert(n);
                v.insert(row, s.clone());
            }
        }
        sparse_from_map(v)
    };

    let mut elim = Eliminator::new(spec, true);
    let mut cols: Vec<SparseVec> = Vec::new();
    for (key, cmono) in &basis {
        let mut g = PolyDiffCochain::zero(sig, nvars);
        g.add_term(key.clone(), MultiPoly::monomial(nvars, cmono.clone(), spec.one()));
        let dg = d_hoch(ctx, &g);
        cols.push(to_vec(&dg, &mut row_of));
    }
    let target = to_vec(eta, &mut row_of);
    for c in &cols {
        elim.push(c);
    }
    match elim.solve(&target) {
        None => Err(DeformError::SolverFailure {
            certificate: format!(
                "eta not a coboundary within ansatz (max_order={}, max_coeff_degree={})",
                bounds.max_order, bounds.max_coeff_degree
            ),
        }),
        Some(combo) => {
            let mut gamma = PolyDiffCochain::zero(sig, nvars);
            for (i, s) in combo {
                let (key, cmono) = &basis[i];
                gamma.add_term(
                    key.clone(),
                    MultiPoly::monomial(nvars, cmono.clone(), s),
                );
            }
            Ok(gamma)
        }
    }
}

/// Right side of the γ_B equation d_hoch(γ_B) = η, from the ε²-part of the
/// associativity (b*a)*a' = b*(a*a'):
/// η(b,a,a') = b·γ_A(a,a') − α_B(α_B(b,a),a') + α_B(b, α_A(a,a')).
pub fn gamma_b_target(
    ctx: &CochainCtx,
    alpha_a: &PolyDiffCochain,
    alpha_b: &PolyDiffCochain,
    gamma_a: &PolyDiffCochain,
) -> PolyDiffCochain {
    let tag = match alpha_b.sig {
        SlotSig::Module { tag, .. } => tag,
        _ => panic!("α_B must be module-valued"),
    };
    let pair = crate::hochschild::PairCochain {
        a: alpha_a.clone(),
        b: alpha_b.clone(),
    };
    crate::hochschild::g_compose(ctx, gamma_a, tag)
        .sub(&crate::hochschild::circ_module(ctx, alpha_b, &pair))
}

/// Left-module analogue for γ_C.
pub fn gamma_c_target(
    ctx: &CochainCtx,
    alpha_a: &PolyDiffCochain,
    alpha_c: &PolyDiffCochain,
    gamma_a: &PolyDiffCochain,
) -> PolyDiffCochain {
    let tag = match alpha_c.sig {
        SlotSig::Module { tag, first: false, .. } => tag,
        _ => panic!("α_C must be left-module-valued"),
    };
    crate::hochschild::circ_left(ctx, alpha_c, alpha_a, alpha_c)
        .add(&crate::hochschild::h_compose(ctx, gamma_a, tag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::poly::VarTable;
    use crate::hochschild::{alpha_a_from_bivector, hkr_alt, transpose};
    use crate::rng::TestRng;

    fn hypersurface() -> (VarTable, SubvarietyPresentation, PoissonBivector, FieldSpec) {
        let vars = VarTable::new(&["x", "y"]);
        let spec = FieldSpec::Q;
        let mut subs = BTreeMap::new();
        subs.insert(1, MultiPoly::zero(2));
        let y = SubvarietyPresentation::new(&vars, subs).unwrap();
        let p = PoissonBivector::from_upper(2, [((0, 1), MultiPoly::one(2, spec))]).unwrap();
        (vars, y, p, spec)
    }

    #[test]
    fn rho_examples() {
        let (vars, y, p, spec) = hypersurface();
        let rho = build_rho(&p, &y, spec).unwrap();
        // ρ(dx, ȳ) = {x, y}| = 1
        assert_eq!(rho.values.get(&(0, 1)), Some(&MultiPoly::one(2, spec)));
        // ρ(d(x²), ȳ) = {x², y}| = 2x: follows from B-linearity of the matrix
        // values; check via the defining formula directly
        let f = y.generator(1, spec);
        let x2 = parse_poly("x^2", &vars, spec).unwrap();
        assert_eq!(
            y.normal_form(&p.bracket(&x2, &f), spec),
            parse_poly("2*x", &vars, spec).unwrap()
        );
        // zero bivector: ρ ≡ 0
        let rho0 = build_rho(&PoissonBivector::zero(2), &y, spec).unwrap();
        assert!(rho0.values.is_empty());
    }

    #[test]
    fn symbol_examples() {
        let (_, y, p, spec) = hypersurface();
        let sym = build_symbol(&p, &y, spec).unwrap();
        // σ_ψ(ȳ ⊗ dx) = ½{y, x}| = −½
        assert_eq!(
            sym.values.get(&(1, 0)),
            Some(&MultiPoly::constant(2, spec.ratio(-1, 2)))
        );
        assert!(build_symbol(&PoissonBivector::zero(2), &y, spec)
            .unwrap()
            .values
            .is_empty());
    }

    #[test]
    fn rho_rejects_non_coisotropic() {
        let spec = FieldSpec::Q;
        let vars4 = VarTable::new(&["x1", "x2", "x3", "x4"]);
        let p4 = PoissonBivector::from_upper(
            4,
            [
                ((0, 1), MultiPoly::one(4, spec)),
                ((2, 3), MultiPoly::one(4, spec)),
            ],
        )
        .unwrap();
        let mut subs = BTreeMap::new();
        subs.insert(0, MultiPoly::zero(4));
        subs.insert(1, MultiPoly::zero(4));
        let bad = SubvarietyPresentation::new(&vars4, subs).unwrap();
        assert!(matches!(
            build_rho(&p4, &bad, spec),
            Err(DeformError::NotCoisotropic(_))
        ));
        let _ = vars4;
    }

    #[test]
    fn psi_lift_values() {
        let (vars, y, p, spec) = hypersurface();
        let psi = lift_symbol_zero(&p, &y, spec).unwrap();
        // ψ(ȳ) = 0
        let mut coords = BTreeMap::new();
        coords.insert(1usize, MultiPoly::one(2, spec));
        assert!(psi.eval(&y, spec, &coords).is_zero());
        // ψ(x·ȳ) = −σ(ȳ⊗dx) = +½  (the sign that satisfies ψ(ax) − aψ(x) = α_A(a,x))
        let mut coords = BTreeMap::new();
        coords.insert(1usize, parse_poly("x", &vars, spec).unwrap());
        assert_eq!(
            psi.eval(&y, spec, &coords),
            MultiPoly::constant(2, spec.ratio(1, 2))
        );
    }

    #[test]
    fn assembled_alpha_b_is_cocycle_and_matches_examples() {
        let (vars, y, p, spec) = hypersurface();
        let z = y.clone();
        let ctx = CochainCtx { nvars: 2, spec, y: &y, z: &z };
        let psi = lift_symbol_zero(&p, &y, spec).unwrap();
        let fod = assemble_alpha_b(&ctx, &p, ModuleTag::Y, psi).unwrap();
        let x = parse_poly("x", &vars, spec).unwrap();
        let yv = parse_poly("y", &vars, spec).unwrap();
        // α_B(x, y) = 1
        assert_eq!(fod.alpha_b.eval(&ctx, &[x.clone(), yv.clone()]), MultiPoly::one(2, spec));
        // α_B(1, x) = 0
        assert!(fod
            .alpha_b
            .eval(&ctx, &[MultiPoly::one(2, spec), x.clone()])
            .is_zero());
        // α_B(b, 1) = 0 (normalized)
        assert!(fod.alpha_b.vanishes_on_unit(&ctx));
    }

    #[test]
    fn alpha_b_cocycle_on_linear_coisotropic_a4() {
        let spec = FieldSpec::Q;
        let vars = VarTable::new(&["x1", "x2", "x3", "x4"]);
        let p = PoissonBivector::from_upper(
            4,
            [
                ((0, 1), MultiPoly::one(4, spec)),
                ((2, 3), MultiPoly::one(4, spec)),
            ],
        )
        .unwrap();
        let mut subs = BTreeMap::new();
        subs.insert(0, MultiPoly::zero(4));
        subs.insert(2, MultiPoly::zero(4));
        let y = SubvarietyPresentation::new(&vars, subs).unwrap();
        let z = y.clone();
        let ctx = CochainCtx { nvars: 4, spec, y: &y, z: &z };
        let psi = lift_symbol_zero(&p, &y, spec).unwrap();
        let fod = assemble_alpha_b(&ctx, &p, ModuleTag::Y, psi).unwrap();
        assert!(fod.alpha_b.vanishes_on_unit(&ctx));
        // transposing twice is the identity on the derived left deformation
        let left = transpose(&fod.alpha_b);
        let back = transpose(&left);
        assert_eq!(back.canonicalize(&ctx), fod.alpha_b.canonicalize(&ctx));
    }

    #[test]
    fn divergence_lift_satisfies_pseudo_lie() {
        let (_, y, p, spec) = hypersurface();
        let z = y.clone();
        let ctx = CochainCtx { nvars: 2, spec, y: &y, z: &z };
        let psi = lift_symbol_divergence(&ctx, &p, ModuleTag::Y).unwrap();
        let fod = assemble_alpha_b(&ctx, &p, ModuleTag::Y, psi).unwrap();
        assert!(pseudo_lie_holds(&ctx, &p, ModuleTag::Y, &fod.alpha_b));
    }

    #[test]
    fn moyal_gamma_examples() {
        let (vars, y, p, spec) = hypersurface();
        let z = y.clone();
        let ctx = CochainCtx { nvars: 2, spec, y: &y, z: &z };
        let gamma = moyal_gamma_a(&p, spec).unwrap();
        // γ_A(x, y) = 0: second derivatives of coordinates vanish
        let x = parse_poly("x", &vars, spec).unwrap();
        let yv = parse_poly("y", &vars, spec).unwrap();
        assert!(gamma.eval(&ctx, &[x.clone(), yv.clone()]).is_zero());
        // symmetry on random pairs
        let mut rng = TestRng::seeded(61);
        for _ in 0..10 {
            let a = rng.poly(&vars, spec, 3, 3);
            let b = rng.poly(&vars, spec, 3, 3);
            assert_eq!(
                gamma.eval(&ctx, &[a.clone(), b.clone()]),
                gamma.eval(&ctx, &[b, a])
            );
        }
        // γ_A(x², y²) = ⅛·(P₁₂² ∂²-cross terms): hand value 2·2·⅛·... check via
        // direct formula: only (i,k)=(1,1),(j,l)=(2,2) type terms survive;
        // γ(x²,y²) = ⅛[P₁₂P₁₂·∂₁²(x²)∂₂²(y²)·? ...] = ⅛·(1·1·2·2 + ...)
        let x2 = parse_poly("x^2", &vars, spec).unwrap();
        let y2 = parse_poly("y^2", &vars, spec).unwrap();
        let got = gamma.eval(&ctx, &[x2, y2]);
        assert_eq!(got, MultiPoly::constant(2, spec.ratio(1, 2)));
        // (integrab-A): residual of the Moyal data vanishes
        let alpha = alpha_a_from_bivector(&p, spec);
        let r = crate::hochschild::circ_avalued(&ctx, &alpha, &alpha)
            .sub(&crate::hochschild::d_hoch(&ctx, &gamma));
        assert!(r.is_zero_map(&ctx));
        // non-constant bivector rejected
        let vars3 = VarTable::new(&["x", "y", "z"]);
        let bad = PoissonBivector::from_upper(
            3,
            [((0, 1), parse_poly("z", &vars3, spec).unwrap())],
        )
        .unwrap();
        assert!(moyal_gamma_a(&bad, spec).is_err());
    }

    #[test]
    fn gamma_b_solver_and_hkr_precondition() {
        let (_, y, p, spec) = hypersurface();
        let z = y.clone();
        let ctx = CochainCtx { nvars: 2, spec, y: &y, z: &z };
        let psi = lift_symbol_divergence(&ctx, &p, ModuleTag::Y).unwrap();
        let fod = assemble_alpha_b(&ctx, &p, ModuleTag::Y, psi).unwrap();
        let alpha_a = alpha_a_from_bivector(&p, spec);
        let gamma_a = moyal_gamma_a(&p, spec).unwrap();
        let eta = gamma_b_target(&ctx, &alpha_a, &fod.alpha_b, &gamma_a);
        // η is a Hochschild cocycle and its alternation vanishes
        let alt = hkr_alt(&ctx, &eta).expect("η must be a cocycle");
        for v in alt.values.values() {
            assert!(v.is_zero(), "alt(η) must vanish before solving");
        }
        // and the solve succeeds with zero residual
        let sig = SlotSig::Module { tag: ModuleTag::Y, first: true, a_slots: 1 };
        let gamma_b = solve_gamma(&ctx, sig, &eta, GammaBounds::default()).unwrap();
        let resid = d_hoch(&ctx, &gamma_b).sub(&eta);
        assert!(resid.is_zero_map(&ctx));
        // P = 0: γ_B = 0 solves
        let p0 = PoissonBivector::zero(2);
        let psi0 = lift_symbol_zero(&p0, &y, spec).unwrap();
        let fod0 = assemble_alpha_b(&ctx, &p0, ModuleTag::Y, psi0).unwrap();
        assert!(fod0.alpha_b.is_zero_map(&ctx));
    }

    #[test]
    fn second_order_obstruction_vanishes_for_solved_data() {
        let (_, y, p, spec) = hypersurface();
        let z = y.clone();
        let ctx = CochainCtx { nvars: 2, spec, y: &y, z: &z };
        let psi = lift_symbol_divergence(&ctx, &p, ModuleTag::Y).unwrap();
        let fod = assemble_alpha_b(&ctx, &p, ModuleTag::Y, psi).unwrap();
        let alpha_a = alpha_a_from_bivector(&p, spec);
        let gamma_a = moyal_gamma_a(&p, spec).unwrap();
        let eta = gamma_b_target(&ctx, &alpha_a, &fod.alpha_b, &gamma_a);
        let sig = SlotSig::Module { tag: ModuleTag::Y, first: true, a_slots: 1 };
        let gamma_b = solve_gamma(&ctx, sig, &eta, GammaBounds::default()).unwrap();
        let resid = crate::hochschild::second_order_obstruction(
            &ctx,
            (&alpha_a, &fod.alpha_b, None),
            (&gamma_a, &gamma_b, None),
        );
        assert!(resid.is_zero(&ctx));
        // α = 0, γ = 0 is trivially unobstructed
        let zero_a = PolyDiffCochain::zero(SlotSig::AValued { arity: 2 }, 2);
        let zero_b = PolyDiffCochain::zero(sig, 2);
        let r0 = crate::hochschild::second_order_obstruction(
            &ctx,
            (&zero_a, &zero_b, None),
            (&zero_a, &zero_b, None),
        );
        assert!(r0.is_zero(&ctx));
        // valid α with γ = 0 for nonzero P leaves the residual ½[α,α]
        let r1 = crate::hochschild::second_order_obstruction(
            &ctx,
            (&alpha_a, &fod.alpha_b, None),
            (&zero_a, &zero_b, None),
        );
        assert!(!r1.r_a.is_zero_map(&ctx) || !r1.r_b.is_zero_map(&ctx));
    }
}
