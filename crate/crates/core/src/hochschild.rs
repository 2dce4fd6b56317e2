//! Polydifferential Hochschild cochains, the deformation complexes of the
//! pairs (A, B) and triples (A, B, C), their DG Lie bracket, and the HKR
//! alternation map.
//!
//! A cochain is a finite sum of terms (coefficient polynomial) × (derivative
//! multi-index per slot). Module-valued cochains act on a slot by reducing
//! after differentiating (nf ∘ ∂^u); for graph presentations that family of
//! operators is linearly independent over the quotient ring, so cochains have
//! a canonical form and symbolic equality decides operator equality.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::monomial::Monomial;
use crate::algebra::poly::MultiPoly;
use crate::algebra::presentation::SubvarietyPresentation;
use crate::algebra::scalar::{FieldSpec, Scalar};
use crate::poisson::PoissonBivector;

/// Which module a module-valued cochain acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModuleTag {
    /// B = O(Y), deformed as a right module.
    Y,
    /// C = O(Z).
    Z,
}

/// Slot signature of a cochain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotSig {
    /// Hom(A^{⊗arity}, A).
    AValued { arity: usize },
    /// Module slot plus A-slots; `first` distinguishes right-module shape
    /// (module slot first, e.g. α_B, α_C') from left-module shape (module
    /// slot last, e.g. α_C).
    Module {
        tag: ModuleTag,
        first: bool,
        a_slots: usize,
    },
}

impl SlotSig {
    pub fn slot_count(&self) -> usize {
        match self {
            SlotSig::AValued { arity } => *arity,
            SlotSig::Module { a_slots, .. } => a_slots + 1,
        }
    }

    pub fn a_slots(&self) -> usize {
        match self {
            SlotSig::AValued { arity } => *arity,
            SlotSig::Module { a_slots, .. } => *a_slots,
        }
    }

    /// Position of the module slot in the argument list, if any.
    pub fn module_pos(&self) -> Option<usize> {
        match self {
            SlotSig::AValued { .. } => None,
            SlotSig::Module { first: true, .. } => Some(0),
            SlotSig::Module {
                first: false,
                a_slots,
                ..
            } => Some(*a_slots),
        }
    }

    /// Argument positions of the A-slots, in order.
    pub fn a_positions(&self) -> Vec<usize> {
        match self {
            SlotSig::AValued { arity } => (0..*arity).collect(),
            SlotSig::Module {
                first: true,
                a_slots,
                ..
            } => (1..=*a_slots).collect(),
            SlotSig::Module {
                first: false,
                a_slots,
                ..
            } => (0..*a_slots).collect(),
        }
    }

    /// Total degree in the deformation complex (a 2-cocycle has degree 2).
    pub fn complex_degree(&self) -> usize {
        match self {
            SlotSig::AValued { arity } => *arity,
            SlotSig::Module { a_slots, .. } => a_slots + 1,
        }
    }
}

/// Shared context: ambient ring plus the presentations for both modules.
#[derive(Clone, Copy)]
pub struct CochainCtx<'a> {
    pub nvars: usize,
    pub spec: FieldSpec,
    pub y: &'a SubvarietyPresentation,
    pub z: &'a SubvarietyPresentation,
}

impl<'a> CochainCtx<'a> {
    pub fn pres(&self, tag: ModuleTag) -> &'a SubvarietyPresentation {
        match tag {
            ModuleTag::Y => self.y,
            ModuleTag::Z => self.z,
        }
    }
}

/// A polydifferential cochain in canonical term form.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyDiffCochain {
    pub sig: SlotSig,
    pub nvars: usize,
    /// per-slot derivative multi-indices -> coefficient polynomial
    pub terms: BTreeMap<Vec<Monomial>, MultiPoly>,
}

impl PolyDiffCochain {
    pub fn zero(sig: SlotSig, nvars: usize) -> PolyDiffCochain {
        PolyDiffCochain {
            sig,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, key: Vec<Monomial>, coeff: MultiPoly) {
        debug_assert_eq!(key.len(), self.sig.slot_count());
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
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

    pub fn add(&self, o: &PolyDiffCochain) -> PolyDiffCochain {
        debug_assert_eq!(self.sig, o.sig);
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &PolyDiffCochain) -> PolyDiffCochain {
        self.add(&o.scale_int(-1))
    }

    pub fn scale_int(&self, k: i64) -> PolyDiffCochain {
        if k == 0 {
            return PolyDiffCochain::zero(self.sig, self.nvars);
        }
        PolyDiffCochain {
            sig: self.sig,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(key, c)| (key.clone(), c.scale_int(k)))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> PolyDiffCochain {
        PolyDiffCochain {
            sig: self.sig,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(key, c)| (key.clone(), c.scale(s)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Reduce to canonical form: module-valued coefficients through the
    /// normal form, terms whose module-slot index touches an eliminated
    /// variable dropped (they annihilate every module element).
    pub fn canonicalize(&self, ctx: &CochainCtx) -> PolyDiffCochain {
        let mut r = PolyDiffCochain::zero(self.sig, self.nvars);
        match self.sig {
            SlotSig::AValued { .. } => {
                for (k, c) in &self.terms {
                    r.add_term(k.clone(), c.clone());
                }
            }
            SlotSig::Module { tag, .. } => {
                let pres = ctx.pres(tag);
                let mpos = self.sig.module_pos().unwrap();
                for (k, c) in &self.terms {
                    if !k[mpos].supported_on(&pres.kept) {
                        continue;
                    }
                    r.add_term(k.clone(), pres.normal_form(c, ctx.spec));
                }
            }
        }
        r
    }

    pub fn is_zero_map(&self, ctx: &CochainCtx) -> bool {
        self.canonicalize(ctx).terms.is_empty()
    }

    /// Evaluate on arguments (one polynomial per slot, in argument order).
    pub fn eval(&self, ctx: &CochainCtx, args: &[MultiPoly]) -> MultiPoly {
        debug_assert_eq!(args.len(), self.sig.slot_count());
        let mut out = MultiPoly::zero(self.nvars);
        let reduce: Option<&SubvarietyPresentation> = match self.sig {
            SlotSig::AValued { .. } => None,
            SlotSig::Module { tag, .. } => Some(ctx.pres(tag)),
        };
        let mpos = self.sig.module_pos();
        for (key, coeff) in &self.terms {
            let mut acc = match reduce {
                Some(p) => p.normal_form(coeff, ctx.spec),
                None => coeff.clone(),
            };
            for (slot, idx) in key.iter().enumerate() {
                if acc.is_zero() {
                    break;
                }
                let d = args[slot].derivative_multi(idx);
                let d = match (reduce, mpos) {
                    (Some(p), Some(m)) if slot != m => p.normal_form(&d, ctx.spec),
                    _ => d,
                };
                acc = acc.mul(&d);
            }
            out = out.add(&acc);
        }
        match reduce {
            Some(p) => p.normal_form(&out, ctx.spec),
            None => out,
        }
    }

    /// Does the cochain vanish whenever an A-slot argument is the unit?
    /// Required for all operators that descend to the reduced bar complex.
    pub fn vanishes_on_unit(&self, ctx: &CochainCtx) -> bool {
        for pos in self.sig.a_positions() {
            let dropped = self.substitute_unit(pos);
            if !dropped.is_zero_map(ctx) {
                return false;
            }
        }
        true
    }

    /// Plug the unit into the given slot, producing a cochain with one fewer
    /// slot (terms differentiating that slot die).
    fn substitute_unit(&self, pos: usize) -> PolyDiffCochain {
        let sig = match self.sig {
            SlotSig::AValued { arity } => SlotSig::AValued { arity: arity - 1 },
            SlotSig::Module {
                tag,
                first,
                a_slots,
            } => SlotSig::Module {
                tag,
                first,
                a_slots: a_slots - 1,
            },
        };
        let mut r = PolyDiffCochain::zero(sig, self.nvars);
        for (key, c) in &self.terms {
            if !key[pos].is_unit() {
                continue;
            }
            let mut k2 = key.clone();
            k2.remove(pos);
            r.add_term(k2, c.clone());
        }
        r
    }
}

/// All splittings u = v + w with the multi-binomial coefficient Π C(u_i, v_i).
fn splittings(u: &Monomial) -> Vec<(Monomial, Monomial, i64)> {
    let mut out: Vec<(Monomial, Monomial, i64)> = vec![(
        Monomial::unit(u.nvars()),
        Monomial::unit(u.nvars()),
        1i64,
    )];
    for (v, &e) in u.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let mut next = Vec::new();
        for (a, b, c) in &out {
            for k in 0..=e {
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2.0[v] = k;
                b2.0[v] = e - k;
                next.push((a2, b2, c * binom(e as i64, k as i64)));
            }
        }
        out = next;
    }
    out
}

fn binom(n: i64, k: i64) -> i64 {
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Distribute a multi-index over m factors with multinomial coefficients.
fn distributions(u: &Monomial, m: usize) -> Vec<(Vec<Monomial>, i64)> {
    let mut out: Vec<(Vec<Monomial>, i64)> = vec![(vec![u.clone()], 1)];
    for _ in 1..m {
        let mut next = Vec::new();
        for (parts, c) in &out {
            let last = parts.last().unwrap();
            for (a, b, binom) in splittings(last) {
                let mut p2 = parts[..parts.len() - 1].to_vec();
                p2.push(a);
                p2.push(b);
                next.push((p2, c * binom));
            }
        }
        out = next;
    }
    out
}

/// The operator ∂^w ∘ (nf ∘ ∂^v) expanded as Σ coeff · (nf ∘ ∂^{v'}), where w
/// is supported on kept variables. One chain-rule step per derivative.
fn kept_derivative_of_nf(
    pres: &SubvarietyPresentation,
    spec: FieldSpec,
    w: &Monomial,
    v: &Monomial,
) -> Vec<(MultiPoly, Monomial)> {
    let nvars = v.nvars();
    let mut terms: Vec<(MultiPoly, Monomial)> =
        vec![(MultiPoly::one(nvars, spec), v.clone())];
    for (k, &e) in w.0.iter().enumerate() {
        for _ in 0..e {
            let mut next: Vec<(MultiPoly, Monomial)> = Vec::new();
            for (c, idx) in &terms {
                // product rule: derivative of the coefficient...
                let dc = c.partial_derivative(k);
                if !dc.is_zero() {
                    next.push((dc, idx.clone()));
                }
                // ...plus the chain rule through the substitution
                let mut bumped = idx.clone();
                bumped.0[k] += 1;
                next.push((c.clone(), bumped));
                for (evar, s) in &pres.subs {
                    let ds = s.partial_derivative(k);
                    if !ds.is_zero() {
                        let mut bumped = idx.clone();
                        bumped.0[*evar] += 1;
                        next.push((c.mul(&ds), bumped));
                    }
                }
            }
            // merge duplicates
            let mut merged: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
            for (c, idx) in next {
                match merged.entry(idx) {
                    alloc::collections::btree_map::Entry::Vacant(en) => {
                        en.insert(c);
                    }
                    alloc::collections::btree_map::Entry::Occupied(mut en) => {
                        let s = en.get().add(&c);
                        if s.is_zero() {
                            en.remove();
                        } else {
                            *en.get_mut() = s;
                        }
                    }
                }
            }
            terms = merged.into_iter().map(|(i, c)| (c, i)).collect();
        }
    }
    terms
}

/// Hochschild differential for every supported slot signature.
pub fn d_hoch(ctx: &CochainCtx, c: &PolyDiffCochain) -> PolyDiffCochain {
    match c.sig {
        SlotSig::AValued { arity } => d_hoch_avalued(c, arity),
        SlotSig::Module {
            tag,
            first: true,
            a_slots,
        } => d_hoch_right(ctx, c, tag, a_slots),
        SlotSig::Module {
            tag,
            first: false,
            a_slots,
        } => d_hoch_left(ctx, c, tag, a_slots),
    }
}

/// (dc)(a_1..a_{n+1}) = a_1 c(a_2..) + Σ_s (−1)^s c(..a_s a_{s+1}..)
///                    + (−1)^{n+1} c(a_1..a_n) a_{n+1}.
fn d_hoch_avalued(c: &PolyDiffCochain, n: usize) -> PolyDiffCochain {
    let sig = SlotSig::AValued { arity: n + 1 };
    let mut r = PolyDiffCochain::zero(sig, c.nvars);
    let unit = Monomial::unit(c.nvars);
    for (key, coeff) in &c.terms {
        // a_1 · c(a_2, ..)
        let mut k2 = vec![unit.clone()];
        k2.extend(key.iter().cloned());
        r.add_term(k2, coeff.clone());
        // interior merges: slot s of c receives a_{s+1}·a_{s+2}
        for s in 0..n {
            let sign = if (s + 1) % 2 == 0 { 1 } else { -1 };
            for (v1, v2, b) in splittings(&key[s]) {
                let mut k2: Vec<Monomial> = Vec::with_capacity(n + 1);
                k2.extend(key[..s].iter().cloned());
                k2.push(v1);
                k2.push(v2);
                k2.extend(key[s + 1..].iter().cloned());
                r.add_term(k2, coeff.scale_int(sign * b));
            }
        }
        // c(a_1..a_n) · a_{n+1}
        let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
        let mut k2 = key.clone();
        k2.push(unit.clone());
        r.add_term(k2, coeff.scale_int(sign));
    }
    r
}

/// Right-module shape: (dc)(b, a_1..a_{k+1}) = c(b·a_1, a_2..)
///   + Σ_s (−1)^s c(b, ..a_s a_{s+1}..) + (−1)^{k+1} c(b, a_1..a_k)·a_{k+1}.
fn d_hoch_right(
    ctx: &CochainCtx,
    c: &PolyDiffCochain,
    tag: ModuleTag,
    k: usize,
) -> PolyDiffCochain {
    let pres = ctx.pres(tag);
    let sig = SlotSig::Module {
        tag,
        first: true,
        a_slots: k + 1,
    };
    let mut r = PolyDiffCochain::zero(sig, c.nvars);
    let unit = Monomial::unit(c.nvars);
    for (key, coeff) in &c.terms {
        let w = &key[0];
        // c(b·a_1, a_2..): ∂^w(b · nf(a_1)) splits, then the a_1 part goes
        // through the chain rule
        for (w1, w2, b1) in splittings(w) {
            for (cc, v) in kept_derivative_of_nf(pres, ctx.spec, &w2, &unit) {
                let mut k2: Vec<Monomial> = Vec::with_capacity(k + 2);
                k2.push(w1.clone());
                k2.push(v);
                k2.extend(key[1..].iter().cloned());
                r.add_term(k2, coeff.mul(&cc).scale_int(b1));
            }
        }
        // interior merges: slot s (argument position s) merges a_s a_{s+1}
        for s in 1..=k {
            let sign = if s % 2 == 0 { 1 } else { -1 };
            for (v1, v2, b) in splittings(&key[s]) {
                let mut k2: Vec<Monomial> = Vec::with_capacity(k + 2);
                k2.extend(key[..s].iter().cloned());
                k2.push(v1);
                k2.push(v2);
                k2.extend(key[s + 1..].iter().cloned());
                r.add_term(k2, coeff.scale_int(sign * b));
            }
        }
        // c(b, a_1..a_k) · a_{k+1}
        let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
        let mut k2 = key.clone();
        k2.push(unit.clone());
        r.add_term(k2, coeff.scale_int(sign));
    }
    r
}

/// Left-module shape: (dc)(a_1..a_{k+1}, m) = a_1·c(a_2.., m)
///   + Σ_s (−1)^s c(..a_s a_{s+1}.., m) + (−1)^{k+1} c(a_1..a_k, a_{k+1}·m).
fn d_hoch_left(
    ctx: &CochainCtx,
    c: &PolyDiffCochain,
    tag: ModuleTag,
    k: usize,
) -> PolyDiffCochain {
    let pres = ctx.pres(tag);
    let sig = SlotSig::Module {
        tag,
        first: false,
        a_slots: k + 1,
    };
    let mut r = PolyDiffCochain::zero(sig, c.nvars);
    let unit = Monomial::unit(c.nvars);
    for (key, coeff) in &c.terms {
        // a_1 · c(a_2.., m): new leading A-slot, multiplication only
        let mut k2 = vec![unit.clone()];
        k2.extend(key.iter().cloned());
        r.add_term(k2, coeff.clone());
        // interior merges (A-slot s at argument position s-1)
        for s in 1..=k {
            let sign = if s % 2 == 0 { 1 } else { -1 };
            for (v1, v2, b) in splittings(&key[s - 1]) {
                let mut k2: Vec<Monomial> = Vec::with_capacity(k + 2);
                k2.extend(key[..s - 1].iter().cloned());
                k2.push(v1);
                k2.push(v2);
                k2.extend(key[s - 1 + 1..].iter().cloned());
                r.add_term(k2, coeff.scale_int(sign * b));
            }
        }
        // c(a_1..a_k, a_{k+1}·m): module slot ∂^w(nf(a_{k+1})·m)
        let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
        let w = &key[k];
        for (w1, w2, b) in splittings(w) {
            for (cc, v) in kept_derivative_of_nf(pres, ctx.spec, &w1, &unit) {
                let mut k2: Vec<Monomial> = Vec::with_capacity(k + 2);
                k2.extend(key[..k].iter().cloned());
                k2.push(v);
                k2.push(w2.clone());
                r.add_term(k2, coeff.mul(&cc).scale_int(sign * b));
            }
        }
    }
    r
}

/// (g·α)(b, a_1..a_n) := b · nf(α(a_1..a_n)) for an A-valued cochain α.
pub fn g_compose(ctx: &CochainCtx, alpha: &PolyDiffCochain, tag: ModuleTag) -> PolyDiffCochain {
    let n = match alpha.sig {
        SlotSig::AValued { arity } => arity,
        _ => panic!("g_compose expects an A-valued cochain"),
    };
    let pres = ctx.pres(tag);
    let sig = SlotSig::Module {
        tag,
        first: true,
        a_slots: n,
    };
    let mut r = PolyDiffCochain::zero(sig, alpha.nvars);
    let unit = Monomial::unit(alpha.nvars);
    for (key, coeff) in &alpha.terms {
        let mut k2 = vec![unit.clone()];
        k2.extend(key.iter().cloned());
        r.add_term(k2, pres.normal_form(coeff, ctx.spec));
    }
    r
}

/// (h·α)(a_1..a_n, m) := nf(α(a_1..a_n)) · m.
pub fn h_compose(ctx: &CochainCtx, alpha: &PolyDiffCochain, tag: ModuleTag) -> PolyDiffCochain {
    let n = match alpha.sig {
        SlotSig::AValued { arity } => arity,
        _ => panic!("h_compose expects an A-valued cochain"),
    };
    let pres = ctx.pres(tag);
    let sig = SlotSig::Module {
        tag,
        first: false,
        a_slots: n,
    };
    let mut r = PolyDiffCochain::zero(sig, alpha.nvars);
    let unit = Monomial::unit(alpha.nvars);
    for (key, coeff) in &alpha.terms {
        let mut k2 = key.clone();
        k2.push(unit.clone());
        r.add_term(k2, pres.normal_form(coeff, ctx.spec));
    }
    r
}

/// Differential of the pair complex: d(α_A ⊕ α_B) = (dα_A, gα_A − dα_B).
pub fn d_ab(
    ctx: &CochainCtx,
    alpha_a: &PolyDiffCochain,
    alpha_b: &PolyDiffCochain,
) -> (PolyDiffCochain, PolyDiffCochain) {
    let tag = match alpha_b.sig {
        SlotSig::Module { tag, .. } => tag,
        _ => panic!("second component must be module-valued"),
    };
    (
        d_hoch(ctx, alpha_a),
        g_compose(ctx, alpha_a, tag).sub(&d_hoch(ctx, alpha_b)),
    )
}

/// Differential of the triple complex (left-module third component):
/// d(α_A ⊕ α_B ⊕ α_C) = (dα_A, gα_A − dα_B, hα_A − dα_C).
pub fn d_abc(
    ctx: &CochainCtx,
    alpha_a: &PolyDiffCochain,
    alpha_b: &PolyDiffCochain,
    alpha_c: &PolyDiffCochain,
) -> (PolyDiffCochain, PolyDiffCochain, PolyDiffCochain) {
    let (da, db) = d_ab(ctx, alpha_a, alpha_b);
    let tag_c = match alpha_c.sig {
        SlotSig::Module { tag, first: false, .. } => tag,
        _ => panic!("third component must be left-module-valued"),
    };
    let dc = h_compose(ctx, alpha_a, tag_c).sub(&d_hoch(ctx, alpha_c));
    (da, db, dc)
}

/// Insert an A-valued cochain into the A-slot at argument position `pos` of
/// `outer`. Tensor-factor bookkeeping only, no signs.
pub fn insert_a(
    ctx: &CochainCtx,
    outer: &PolyDiffCochain,
    pos: usize,
    inner: &PolyDiffCochain,
) -> PolyDiffCochain {
    let m = match inner.sig {
        SlotSig::AValued { arity } => arity,
        _ => panic!("inner cochain must be A-valued"),
    };
    let sig = match outer.sig {
        SlotSig::AValued { arity } => SlotSig::AValued { arity: arity + m - 1 },
        SlotSig::Module {
            tag,
            first,
            a_slots,
        } => SlotSig::Module {
            tag,
            first,
            a_slots: a_slots + m - 1,
        },
    };
    let module_reduce = match outer.sig {
        SlotSig::AValued { .. } => None,
        SlotSig::Module { tag, .. } => Some(ctx.pres(tag)),
    };
    let mut r = PolyDiffCochain::zero(sig, outer.nvars);
    for (okey, ocoeff) in &outer.terms {
        let u = &okey[pos];
        for (ikey, icoeff) in &inner.terms {
            // distribute ∂^u over (inner coefficient, inner slot 1, ..)
            for (parts, mult) in distributions(u, m + 1) {
                let dcoeff = icoeff.derivative_multi(&parts[0]);
                if dcoeff.is_zero() {
                    continue;
                }
                let dcoeff = match module_reduce {
                    Some(p) => p.normal_form(&dcoeff, ctx.spec),
                    None => dcoeff,
                };
                let mut key: Vec<Monomial> = Vec::with_capacity(sig.slot_count());
                key.extend(okey[..pos].iter().cloned());
                for (t, part) in parts[1..].iter().enumerate() {
                    key.push(ikey[t].mul(part));
                }
                key.extend(okey[pos + 1..].iter().cloned());
                r.add_term(key, ocoeff.mul(&dcoeff).scale_int(mult));
            }
        }
    }
    r
}

/// Insert a module-valued cochain (same shape, module slot first) into the
/// module slot of `outer`.
pub fn insert_module(
    ctx: &CochainCtx,
    outer: &PolyDiffCochain,
    inner: &PolyDiffCochain,
) -> PolyDiffCochain {
    let (tag, outer_a) = match outer.sig {
        SlotSig::Module {
            tag,
            first: true,
            a_slots,
        } => (tag, a_slots),
        _ => panic!("outer must be right-module-valued"),
    };
    let inner_a = match inner.sig {
        SlotSig::Module {
            tag: t2,
            first: true,
            a_slots,
        } => {
            assert!(t2 == tag, "module tags must agree");
            a_slots
        }
        _ => panic!("inner must be right-module-valued"),
    };
    let pres = ctx.pres(tag);
    let sig = SlotSig::Module {
        tag,
        first: true,
        a_slots: outer_a + inner_a,
    };
    let mut r = PolyDiffCochain::zero(sig, outer.nvars);
    for (okey, ocoeff) in &outer.terms {
        let w = &okey[0];
        for (ikey, icoeff) in &inner.terms {
            // distribute ∂^w over (inner coeff, module factor, each A factor)
            for (parts, mult) in distributions(w, inner_a + 2) {
                let dcoeff = icoeff.derivative_multi(&parts[0]);
                if dcoeff.is_zero() {
                    continue;
                }
                let dcoeff = pres.normal_form(&dcoeff, ctx.spec);
                let new_w = ikey[0].mul(&parts[1]);
                // chain rule on each inner A-slot operator nf∘∂^v
                let mut slot_expansions: Vec<Vec<(MultiPoly, Monomial)>> = Vec::new();
                for (t, part) in parts[2..].iter().enumerate() {
                    slot_expansions.push(kept_derivative_of_nf(
                        pres,
                        ctx.spec,
                        part,
                        &ikey[1 + t],
                    ));
                }
                // distribute the expansions
                let mut acc: Vec<(Vec<Monomial>, MultiPoly)> =
                    vec![(Vec::new(), ocoeff.mul(&dcoeff).scale_int(mult))];
                for exp in &slot_expansions {
                    let mut next = Vec::new();
                    for (idxs, c) in &acc {
                        for (cc, v) in exp {
                            let mut i2 = idxs.clone();
                            i2.push(v.clone());
                            next.push((i2, c.mul(cc)));
                        }
                    }
                    acc = next;
                }
                for (inner_slots, c) in acc {
                    if c.is_zero() {
                        continue;
                    }
                    let mut key: Vec<Monomial> = Vec::with_capacity(sig.slot_count());
                    key.push(new_w.clone());
                    key.extend(inner_slots);
                    key.extend(okey[1..].iter().cloned());
                    r.add_term(key, c);
                }
            }
        }
    }
    r
}

/// A degree-n element of the pair deformation complex C^n_{A,B}.
#[derive(Clone, Debug)]
pub struct PairCochain {
    pub a: PolyDiffCochain,
    pub b: PolyDiffCochain,
}

impl PairCochain {
    pub fn degree(&self) -> usize {
        self.a.sig.complex_degree()
    }
}

/// Gerstenhaber circle product of A-valued cochains:
/// f ∘ g = Σ_s (−1)^{(s−1)(m−1)} f ∘_s g.
pub fn circ_avalued(
    ctx: &CochainCtx,
    f: &PolyDiffCochain,
    g: &PolyDiffCochain,
) -> PolyDiffCochain {
    let n = f.sig.a_slots();
    let m = g.sig.a_slots();
    let mut r = PolyDiffCochain::zero(
        SlotSig::AValued { arity: n + m - 1 },
        f.nvars,
    );
    for s in 1..=n {
        let sign = if ((s - 1) * (m - 1)) % 2 == 0 { 1 } else { -1 };
        r = r.add(&insert_a(ctx, f, s - 1, g).scale_int(sign));
    }
    r
}

/// Circle product on the module component: insertion of the inner pair into
/// the module slot (through its B-part) and into the A-slots (through its
/// A-part). The module slot counts as insertion position 0.
pub fn circ_module(
    ctx: &CochainCtx,
    f_b: &PolyDiffCochain,
    g: &PairCochain,
) -> PolyDiffCochain {
    let k = f_b.sig.a_slots();
    let m = g.degree();
    let mut r = insert_module(ctx, f_b, &g.b);
    for s in 1..=k {
        let sign = if (s * (m - 1)) % 2 == 0 { 1 } else { -1 };
        r = r.add(&insert_a(ctx, f_b, s, &g.a).scale_int(sign));
    }
    r
}

/// DG Lie bracket on the pair complex C^•_{A,B}; the A-component is the usual
/// Gerstenhaber bracket, so the projection to C^•(A,A) is a Lie map.
pub fn gerst_bracket_pair(ctx: &CochainCtx, x: &PairCochain, y: &PairCochain) -> PairCochain {
    let n = x.degree();
    let m = y.degree();
    let sign = if ((n - 1) * (m - 1)) % 2 == 0 { 1 } else { -1 };
    let a = circ_avalued(ctx, &x.a, &y.a).sub(&circ_avalued(ctx, &y.a, &x.a).scale_int(sign));
    let b = circ_module(ctx, &x.b, y).sub(&circ_module(ctx, &y.b, x).scale_int(sign));
    PairCochain { a, b }
}

/// Left-module circle product for the C-component.
pub fn circ_left(ctx: &CochainCtx, f_c: &PolyDiffCochain, g_a: &PolyDiffCochain, g_c: &PolyDiffCochain) -> PolyDiffCochain {
    let k = f_c.sig.a_slots();
    let m = g_a.sig.a_slots();
    let mut r = PolyDiffCochain::zero(
        SlotSig::Module {
            tag: match f_c.sig {
                SlotSig::Module { tag, .. } => tag,
                _ => panic!("module cochain expected"),
            },
            first: false,
            a_slots: k + m - 1,
        },
        f_c.nvars,
    );
    for s in 1..=k {
        let sign = if ((s - 1) * (m - 1)) % 2 == 0 { 1 } else { -1 };
        r = r.add(&insert_a(ctx, f_c, s - 1, g_a).scale_int(sign));
    }
    let sign = if (k * (m - 1)) % 2 == 0 { 1 } else { -1 };
    r.add(&insert_left_module(ctx, f_c, g_c).scale_int(sign))
}

/// Insert a left-module-valued cochain into the module slot (last argument)
/// of a left-module-valued cochain.
fn insert_left_module(
    ctx: &CochainCtx,
    outer: &PolyDiffCochain,
    inner: &PolyDiffCochain,
) -> PolyDiffCochain {
    let (tag, outer_a) = match outer.sig {
        SlotSig::Module {
            tag,
            first: false,
            a_slots,
        } => (tag, a_slots),
        _ => panic!("outer must be left-module-valued"),
    };
    let inner_a = match inner.sig {
        SlotSig::Module {
            tag: t2,
            first: false,
            a_slots,
        } => {
            assert!(t2 == tag, "module tags must agree");
            a_slots
        }
        _ => panic!("inner must be left-module-valued"),
    };
    let pres = ctx.pres(tag);
    let sig = SlotSig::Module {
        tag,
        first: false,
        a_slots: outer_a + inner_a,
    };
    let mut r = PolyDiffCochain::zero(sig, outer.nvars);
    for (okey, ocoeff) in &outer.terms {
        let w = &okey[outer_a];
        for (ikey, icoeff) in &inner.terms {
            for (parts, mult) in distributions(w, inner_a + 2) {
                let dcoeff = icoeff.derivative_multi(&parts[0]);
                if dcoeff.is_zero() {
                    continue;
                }
                let dcoeff = pres.normal_form(&dcoeff, ctx.spec);
                let new_w = ikey[inner_a].mul(&parts[1]);
                let mut slot_expansions: Vec<Vec<(MultiPoly, Monomial)>> = Vec::new();
                for (t, part) in parts[2..].iter().enumerate() {
                    slot_expansions.push(kept_derivative_of_nf(pres, ctx.spec, part, &ikey[t]));
                }
                let mut acc: Vec<(Vec<Monomial>, MultiPoly)> =
                    vec![(Vec::new(), ocoeff.mul(&dcoeff).scale_int(mult))];
                for exp in &slot_expansions {
                    let mut next = Vec::new();
                    for (idxs, c) in &acc {
                        for (cc, v) in exp {
                            let mut i2 = idxs.clone();
                            i2.push(v.clone());
                            next.push((i2, c.mul(cc)));
                        }
                    }
                    acc = next;
                }
                for (inner_slots, c) in acc {
                    if c.is_zero() {
                        continue;
                    }
                    let mut key: Vec<Monomial> = Vec::with_capacity(sig.slot_count());
                    key.extend(okey[..outer_a].iter().cloned());
                    key.extend(inner_slots);
                    key.push(new_w.clone());
                    r.add_term(key, c);
                }
            }
        }
    }
    r
}

/// Residuals of the second-order (ε³) extension equations. All three vanish
/// exactly iff (α, γ) is a second order deformation.
pub struct ObstructionResiduals {
    pub r_a: PolyDiffCochain,
    pub r_b: PolyDiffCochain,
    pub r_c: Option<PolyDiffCochain>,
}

impl ObstructionResiduals {
    pub fn is_zero(&self, ctx: &CochainCtx) -> bool {
        self.r_a.is_zero_map(ctx)
            && self.r_b.is_zero_map(ctx)
            && self.r_c.as_ref().map_or(true, |c| c.is_zero_map(ctx))
    }
}

/// Residuals of the ε³-associativity equations, componentwise:
/// R_A = α_A∘α_A − dγ_A,  R_B = α_B∘(α_A⊕α_B) − gγ_A + dγ_B, and for a
/// left module C: R_C = α_C∘(α_A⊕α_C) + hγ_A − dγ_C.
pub fn second_order_obstruction(
    ctx: &CochainCtx,
    alpha: (&PolyDiffCochain, &PolyDiffCochain, Option<&PolyDiffCochain>),
    gamma: (&PolyDiffCochain, &PolyDiffCochain, Option<&PolyDiffCochain>),
) -> ObstructionResiduals {
    let (aa, ab, ac) = alpha;
    let (ga, gb, gc) = gamma;
    let r_a = circ_avalued(ctx, aa, aa).sub(&d_hoch(ctx, ga));
    let pair = PairCochain {
        a: aa.clone(),
        b: ab.clone(),
    };
    let tag_b = match ab.sig {
        SlotSig::Module { tag, .. } => tag,
        _ => panic!("α_B must be module-valued"),
    };
    let r_b = circ_module(ctx, ab, &pair)
        .sub(&g_compose(ctx, ga, tag_b))
        .add(&d_hoch(ctx, gb));
    let r_c = match (ac, gc) {
        (Some(ac), Some(gc)) => {
            let tag_c = match ac.sig {
                SlotSig::Module { tag, first: false, .. } => tag,
                _ => panic!("α_C must be left-module-valued"),
            };
            Some(
                circ_left(ctx, ac, aa, ac)
                    .add(&h_compose(ctx, ga, tag_c))
                    .sub(&d_hoch(ctx, gc)),
            )
        }
        _ => None,
    };
    ObstructionResiduals { r_a, r_b, r_c }
}

/// α_A = ½{·,·} as a 2-cochain.
pub fn alpha_a_from_bivector(p: &PoissonBivector, spec: FieldSpec) -> PolyDiffCochain {
    let n = p.nvars;
    let mut r = PolyDiffCochain::zero(SlotSig::AValued { arity: 2 }, n);
    for ((i, j), coeff) in &p.upper {
        let half = coeff.scale(&spec.ratio(1, 2));
        r.add_term(
            vec![Monomial::var(n, *i), Monomial::var(n, *j)],
            half.clone(),
        );
        r.add_term(
            vec![Monomial::var(n, *j), Monomial::var(n, *i)],
            half.scale_int(-1),
        );
    }
    r
}

/// Transpose of a left-module cochain: α^t(m, a) := −α(a, m), an involution
/// exchanging left and right module deformations.
pub fn transpose(c: &PolyDiffCochain) -> PolyDiffCochain {
    match c.sig {
        SlotSig::Module {
            tag,
            first,
            a_slots,
        } => {
            assert!(a_slots == 1, "transpose is defined for 2-cochains");
            let sig = SlotSig::Module {
                tag,
                first: !first,
                a_slots,
            };
            let mut r = PolyDiffCochain::zero(sig, c.nvars);
            for (key, coeff) in &c.terms {
                r.add_term(vec![key[1].clone(), key[0].clone()], coeff.scale_int(-1));
            }
            r
        }
        _ => panic!("transpose expects a module-valued 2-cochain"),
    }
}

/// Result of the HKR alternation: values on the wedge basis of Λ^k(I/I²)
/// indexed by ascending tuples of eliminated variables.
pub struct HkrAlternation {
    pub values: BTreeMap<Vec<usize>, MultiPoly>,
}

/// Antisymmetrize a right-module k-cochain over the ideal generators. Fails
/// (returning the nonzero differential) when the input is not a cocycle,
/// since descent needs the cocycle property.
pub fn hkr_alt(ctx: &CochainCtx, gamma: &PolyDiffCochain) -> Result<HkrAlternation, PolyDiffCochain> {
    let (tag, k) = match gamma.sig {
        SlotSig::Module {
            tag,
            first: true,
            a_slots,
        } => (tag, a_slots),
        _ => panic!("hkr_alt expects a right-module cochain"),
    };
    let d = d_hoch(ctx, gamma).canonicalize(ctx);
    if !d.terms.is_empty() {
        return Err(d);
    }
    let pres = ctx.pres(tag);
    let elim = pres.eliminated();
    let one = MultiPoly::one(gamma.nvars, ctx.spec);
    let mut values = BTreeMap::new();
    for subset in k_subsets(&elim, k) {
        let mut total = MultiPoly::zero(gamma.nvars);
        for (perm, sign) in permutations(&subset) {
            let mut args = vec![one.clone()];
            for e in perm {
                args.push(pres.generator(e, ctx.spec));
            }
            total = total.add(&gamma.eval(ctx, &args).scale_int(sign));
        }
        values.insert(subset, total);
    }
    Ok(HkrAlternation { values })
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in k_subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn permutations(items: &[usize]) -> Vec<(Vec<usize>, i64)> {
    if items.is_empty() {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        let sign0 = if i % 2 == 0 { 1 } else { -1 };
        for (perm, sign) in permutations(&rest) {
            let mut p = vec![x];
            p.extend(perm);
            out.push((p, sign0 * sign));
        }
    }
    out
}
