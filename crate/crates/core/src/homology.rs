//! Exact sparse linear algebra and homology of truncated complexes, plus the
//! independent Koszul-resolution oracle for Tor/Ext of graph presentations.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::monomial::{monomials_of_degree, Monomial};
use crate::algebra::poly::MultiPoly;
use crate::algebra::presentation::SubvarietyPresentation;
use crate::algebra::scalar::{FieldSpec, Scalar};

/// Sparse column vector: (row, coefficient) sorted by row.
pub type SparseVec = Vec<(u32, Scalar)>;

pub fn sparse_add(a: &SparseVec, b: &SparseVec, scale: &Scalar) -> SparseVec {
    let mut out = SparseVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            let s = b[j].1.mul(scale);
            if !s.is_zero() {
                out.push((b[j].0, s));
            }
            j += 1;
        } else {
            let s = a[i].1.add(&b[j].1.mul(scale));
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sparse_from_map(map: BTreeMap<u32, Scalar>) -> SparseVec {
    map.into_iter().filter(|(_, s)| !s.is_zero()).collect()
}

/// Sparse matrix held by columns.
#[derive(Clone, Debug)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMat {
    pub fn new(rows: usize, cols: usize) -> SparseMat {
        SparseMat {
            rows,
            cols: vec![SparseVec::new(); cols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    /// Apply to a sparse coordinate vector (indices into columns).
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (c, s) in v {
            out = sparse_add(&out, &self.cols[*c as usize], s);
        }
        out
    }

    /// Is (self ∘ other) = 0? `other` maps into our column space.
    pub fn composes_to_zero(&self, other: &SparseMat) -> bool {
        other.cols.iter().all(|c| self.apply(c).is_empty())
    }
}

/// Incremental echelon eliminator. Every stored pivot column is normalized to
/// a unit entry at its pivot row, which is its smallest row; reduction then
/// always moves strictly down and terminates.
pub struct Eliminator {
    spec: FieldSpec,
    /// pivot row -> index into `pivot_cols`
    pivots: BTreeMap<u32, usize>,
    pivot_cols: Vec<SparseVec>,
    /// combination of pushed columns producing each pivot column
    combos: Vec<Vec<(usize, Scalar)>>,
    pushed: usize,
    track: bool,
}

impl Eliminator {
    pub fn new(spec: FieldSpec, track_combinations: bool) -> Eliminator {
        Eliminator {
            spec,
            pivots: BTreeMap::new(),
            pivot_cols: Vec::new(),
            combos: Vec::new(),
            pushed: 0,
            track: track_combinations,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    pub fn pushed(&self) -> usize {
        self.pushed
    }

    /// Remainder of v modulo the pivot columns, plus the multipliers used:
    /// rem = v + Σ coeff_j · pivot_j.
    fn reduce(&self, v: &SparseVec) -> (SparseVec, Vec<(usize, Scalar)>) {
        let mut cur = v.clone();
        let mut used = Vec::new();
        loop {
            let Some((row, val)) = cur.first().cloned() else {
                break;
            };
            let Some(&pi) = self.pivots.get(&row) else {
                break;
            };
            let coeff = val.neg();
            cur = sparse_add(&cur, &self.pivot_cols[pi], &coeff);
            used.push((pi, coeff));
        }
        (cur, used)
    }

    /// Push a column. None if it created a new pivot; otherwise a kernel
    /// witness: a combination of pushed columns (this one included, with
    /// coefficient 1) summing to zero. Witnesses need tracking enabled.
    pub fn push(&mut self, col: &SparseVec) -> Option<Vec<(usize, Scalar)>> {
        let my_index = self.pushed;
        self.pushed += 1;
        let (mut rem, used) = self.reduce(col);
        if rem.is_empty() {
            if !self.track {
                return Some(Vec::new());
            }
            let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
            combo.insert(my_index, self.spec.one());
            for (pi, c) in used {
                for (src, s) in &self.combos[pi] {
                    merge_combo(&mut combo, *src, s.mul(&c));
                }
            }
            return Some(combo.into_iter().filter(|(_, s)| !s.is_zero()).collect());
        }
        let inv = rem[0].1.inv();
        for (_, s) in rem.iter_mut() {
            *s = s.mul(&inv);
        }
        let mut combo = Vec::new();
        if self.track {
            let mut map: BTreeMap<usize, Scalar> = BTreeMap::new();
            map.insert(my_index, inv.clone());
            for (pi, c) in used {
                for (src, s) in &self.combos[pi] {
                    merge_combo(&mut map, *src, s.mul(&c).mul(&inv));
                }
            }
            combo = map.into_iter().filter(|(_, s)| !s.is_zero()).collect();
        }
        let row = rem[0].0;
        self.pivots.insert(row, self.pivot_cols.len());
        self.pivot_cols.push(rem);
        self.combos.push(combo);
        None
    }

    /// Express `v` over the pushed columns, if possible.
    pub fn solve(&self, v: &SparseVec) -> Option<Vec<(usize, Scalar)>> {
        assert!(self.track, "solve needs combination tracking");
        let (rem, used) = self.reduce(v);
        if !rem.is_empty() {
            return None;
        }
        // v = -Σ coeff_j · pivot_j
        let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (pi, c) in used {
            for (src, s) in &self.combos[pi] {
                merge_combo(&mut combo, *src, s.mul(&c).neg());
            }
        }
        Some(combo.into_iter().filter(|(_, s)| !s.is_zero()).collect())
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }
}

fn merge_combo(map: &mut BTreeMap<usize, Scalar>, key: usize, add: Scalar) {
    if add.is_zero() {
        return;
    }
    match map.entry(key) {
        alloc::collections::btree_map::Entry::Vacant(e) => {
            e.insert(add);
        }
        alloc::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add(&add);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

pub fn rank_of(m: &SparseMat, spec: FieldSpec) -> usize {
    let mut e = Eliminator::new(spec, false);
    for c in &m.cols {
        e.push(c);
    }
    e.rank()
}

/// Kernel basis as coordinate vectors over column indices.
pub fn kernel_basis(m: &SparseMat, spec: FieldSpec) -> Vec<Vec<(usize, Scalar)>> {
    let mut e = Eliminator::new(spec, true);
    let mut out = Vec::new();
    for c in &m.cols {
        if let Some(combo) = e.push(c) {
            out.push(combo);
        }
    }
    out
}

#[derive(Debug)]
pub enum HomologyError {
    /// d ∘ d ≠ 0 (filtered-mode truncation artifact, or a bug upstream).
    NotAComplex,
    /// coordinate request for a chain outside ker(d).
    NotACycle,
}

/// One homology block H = ker(d_out) / im(d_in), with representatives and a
/// coordinate procedure. Representatives complete the boundary echelon basis,
/// so they are deterministic given the chain basis order.
pub struct HomologyBlock {
    pub spec: FieldSpec,
    pub chain_dim: usize,
    pub boundary_rank: usize,
    pub reps: Vec<SparseVec>,
    /// pushed-column index of each representative inside `elim`
    rep_pushed: Vec<usize>,
    elim: Eliminator,
}

impl HomologyBlock {
    /// `d_in`: C_{i+1} -> C_i, `d_out`: C_i -> C_{i-1}.
    pub fn compute(
        d_in: &SparseMat,
        d_out: &SparseMat,
        spec: FieldSpec,
    ) -> Result<HomologyBlock, HomologyError> {
        if !d_out.composes_to_zero(d_in) {
            return Err(HomologyError::NotAComplex);
        }
        let chain_dim = d_out.ncols();
        let mut elim = Eliminator::new(spec, true);
        let mut boundary_rank = 0;
        for c in &d_in.cols {
            if elim.push(c).is_none() {
                boundary_rank += 1;
            }
        }
        let mut reps = Vec::new();
        let mut rep_pushed = Vec::new();
        for combo in kernel_basis(d_out, spec) {
            let mut map: BTreeMap<u32, Scalar> = BTreeMap::new();
            for (ci, s) in combo {
                merge_combo_u32(&mut map, ci as u32, s);
            }
            let v = sparse_from_map(map);
            let idx = elim.pushed();
            if elim.push(&v).is_none() {
                reps.push(v);
                rep_pushed.push(idx);
            }
        }
        Ok(HomologyBlock {
            spec,
            chain_dim,
            boundary_rank,
            reps,
            rep_pushed,
            elim,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Homology coordinates of a cycle: kills boundaries, inverts the
    /// representative inclusion.
    pub fn coordinates(&self, cycle: &SparseVec) -> Result<Vec<Scalar>, HomologyError> {
        let combo = self.elim.solve(cycle).ok_or(HomologyError::NotACycle)?;
        let mut out = vec![self.spec.zero(); self.reps.len()];
        for (i, s) in combo {
            if let Ok(pos) = self.rep_pushed.binary_search(&i) {
                out[pos] = s;
            }
        }
        Ok(out)
    }
}

fn merge_combo_u32(map: &mut BTreeMap<u32, Scalar>, key: u32, add: Scalar) {
    if add.is_zero() {
        return;
    }
    match map.entry(key) {
        alloc::collections::btree_map::Entry::Vacant(e) => {
            e.insert(add);
        }
        alloc::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add(&add);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Koszul-resolution oracle: resolve B by the Koszul complex of the regular
/// sequence {f_e}, tensor with C (Tor) or Hom into C (Ext). Completely
/// independent of the bar complex; exact-graded presentations only.
pub struct KoszulOracle {
    /// Tor_i dimension per (homological degree, internal degree).
    pub tor_dims: BTreeMap<(usize, u32), usize>,
    /// Ext^i dimension per (cohomological degree, internal shift).
    pub ext_dims: BTreeMap<(usize, i64), usize>,
    /// Is the induced differential zero (every f_e acts as 0 on C)? Then Tor
    /// carries the exterior-algebra product on the nose.
    pub differential_is_zero: bool,
}

/// Basis of Λ^i(k^r) ⊗ C_d as (subset index, monomial), ordered.
struct KoszulSide<'a> {
    pres_z: &'a SubvarietyPresentation,
    subsets: Vec<Vec<Vec<usize>>>,
    gens_on_c: Vec<MultiPoly>,
    nvars: usize,
}

impl<'a> KoszulSide<'a> {
    fn basis(&self, i: usize, c_deg: i64) -> Vec<(usize, Monomial)> {
        let mut out = Vec::new();
        if i >= self.subsets.len() || c_deg < 0 {
            return out;
        }
        let monos = monomials_of_degree(self.nvars, &self.pres_z.kept, c_deg as u32);
        for si in 0..self.subsets[i].len() {
            for m in &monos {
                out.push((si, m.clone()));
            }
        }
        out
    }
}

pub fn koszul_tor_oracle(
    pres_y: &SubvarietyPresentation,
    pres_z: &SubvarietyPresentation,
    spec: FieldSpec,
    max_h: usize,
    max_d: u32,
    max_shift: i64,
) -> KoszulOracle {
    let nvars = pres_y.nvars;
    let elim = pres_y.eliminated();
    let r = elim.len();
    let gens_on_c: Vec<MultiPoly> = elim
        .iter()
        .map(|&e| pres_z.normal_form(&pres_y.generator(e, spec), spec))
        .collect();
    let differential_is_zero = gens_on_c.iter().all(|f| f.is_zero());
    let subsets: Vec<Vec<Vec<usize>>> = (0..=r).map(|i| k_subsets_usize(r, i)).collect();
    let side = KoszulSide {
        pres_z,
        subsets,
        gens_on_c,
        nvars,
    };

    // Tor: d(ξ_S ⊗ μ) = Σ_t (−1)^t ξ_{S∖t} ⊗ f_{S[t]}·μ, grading |S| + deg μ.
    let mut tor_dims = BTreeMap::new();
    for d in 0..=max_d {
        let mat_at = |i: usize| -> SparseMat {
            // d: K_i -> K_{i-1} within total degree d
            let src = side.basis(i, d as i64 - i as i64);
            let tgt = if i == 0 {
                Vec::new()
            } else {
                side.basis(i - 1, d as i64 - i as i64 + 1)
            };
            let mut m = SparseMat::new(tgt.len(), src.len());
            if i == 0 {
                return m;
            }
            for (ci, (si, mu)) in src.iter().enumerate() {
                let subset = &side.subsets[i][*si];
                let mut col: BTreeMap<u32, Scalar> = BTreeMap::new();
                for (t, &j) in subset.iter().enumerate() {
                    let sign = if t % 2 == 0 { 1 } else { -1 };
                    let mut rest = subset.clone();
                    rest.remove(t);
                    let rest_idx = side.subsets[i - 1].iter().position(|s| *s == rest).unwrap();
                    let val = side.gens_on_c[j]
                        .mul(&MultiPoly::monomial(nvars, mu.clone(), spec.one()));
                    let val = pres_z.normal_form(&val, spec);
                    for (mon, coeff) in &val.terms {
                        if let Ok(row) = tgt.binary_search_by(|p| p.cmp(&(rest_idx, mon.clone()))) {
                            merge_combo_u32(&mut col, row as u32, coeff.mul_int(sign));
                        }
                    }
                }
                m.cols[ci] = sparse_from_map(col);
            }
            m
        };
        for i in 0..=max_h.min(r) {
            let src_dim = side.basis(i, d as i64 - i as i64).len();
            if src_dim == 0 {
                continue;
            }
            let d_out = mat_at(i);
            let d_in = mat_at(i + 1);
            let dim = src_dim - rank_of(&d_out, spec) - rank_of(&d_in, spec);
            if dim > 0 {
                tor_dims.insert((i, d), dim);
            }
        }
    }

    // Ext: d(e_{S,μ}) = Σ_{j∉S} (−1)^{pos(j)} e_{S∪j, f_j·μ}; shift deg μ − |S|.
    let mut ext_dims = BTreeMap::new();
    for t in -(max_h as i64)..=max_shift {
        let mat_at = |i: usize| -> SparseMat {
            // d: E^i -> E^{i+1} within shift t
            let src = side.basis(i, t + i as i64);
            let tgt = if i + 1 > r {
                Vec::new()
            } else {
                side.basis(i + 1, t + i as i64 + 1)
            };
            let mut m = SparseMat::new(tgt.len(), src.len());
            if i + 1 > r {
                return m;
            }
            for (ci, (si, mu)) in src.iter().enumerate() {
                let subset = &side.subsets[i][*si];
                let mut col: BTreeMap<u32, Scalar> = BTreeMap::new();
                for j in 0..r {
                    if subset.contains(&j) {
                        continue;
                    }
                    let mut bigger = subset.clone();
                    let pos = bigger.iter().position(|&x| x > j).unwrap_or(bigger.len());
                    bigger.insert(pos, j);
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    let big_idx = side.subsets[i + 1].iter().position(|s| *s == bigger).unwrap();
                    let val = side.gens_on_c[j]
                        .mul(&MultiPoly::monomial(nvars, mu.clone(), spec.one()));
                    let val = pres_z.normal_form(&val, spec);
                    for (mon, coeff) in &val.terms {
                        if let Ok(row) = tgt.binary_search_by(|p| p.cmp(&(big_idx, mon.clone()))) {
                            merge_combo_u32(&mut col, row as u32, coeff.mul_int(sign));
                        }
                    }
                }
                m.cols[ci] = sparse_from_map(col);
            }
            m
        };
        for i in 0..=max_h.min(r) {
            let src_dim = side.basis(i, t + i as i64).len();
            if src_dim == 0 {
                continue;
            }
            let d_out = mat_at(i);
            let rank_in = if i == 0 { 0 } else { rank_of(&mat_at(i - 1), spec) };
            let dim = src_dim - rank_of(&d_out, spec) - rank_in;
            if dim > 0 {
                ext_dims.insert((i, t), dim);
            }
        }
    }

    KoszulOracle {
        tor_dims,
        ext_dims,
        differential_is_zero,
    }
}

pub fn k_subsets_usize(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for x in start..n {
            for mut rest in rec(x + 1, n, k - 1) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }
    rec(0, n, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::VarTable;

    fn fp() -> FieldSpec {
        FieldSpec::Fp(32003)
    }

    fn mat(rows: usize, cols: &[&[(u32, i64)]], spec: FieldSpec) -> SparseMat {
        SparseMat {
            rows,
            cols: cols
                .iter()
                .map(|c| c.iter().map(|(r, v)| (*r, spec.int(*v))).collect())
                .collect(),
        }
    }

    #[test]
    fn rank_and_kernel() {
        let spec = fp();
        let m = mat(
            3,
            &[
                &[(0, 1), (2, 1)],
                &[(1, 1), (2, 1)],
                &[(0, 1), (1, 1), (2, 2)],
            ],
            spec,
        );
        assert_eq!(rank_of(&m, spec), 2);
        let k = kernel_basis(&m, spec);
        assert_eq!(k.len(), 1);
        let v: SparseVec = k[0].iter().map(|(i, s)| (*i as u32, s.clone())).collect();
        assert!(m.apply(&v).is_empty());
    }

    #[test]
    fn rank_agrees_over_q_and_fp() {
        for spec in [FieldSpec::Q, fp()] {
            let m = mat(
                4,
                &[
                    &[(0, 2), (1, 4)],
                    &[(0, 1), (1, 2)],
                    &[(2, 3), (3, -1)],
                    &[(0, 1), (2, 3), (3, -1)],
                ],
                spec,
            );
            assert_eq!(rank_of(&m, spec), 3);
        }
    }

    #[test]
    fn homology_zero_differentials() {
        let spec = fp();
        let d_in = SparseMat::new(4, 0);
        let d_out = SparseMat::new(0, 4);
        let h = HomologyBlock::compute(&d_in, &d_out, spec).unwrap();
        assert_eq!(h.dim(), 4);
        let z: SparseVec = vec![(2, spec.one())];
        let coords = h.coordinates(&z).unwrap();
        assert_eq!(coords.iter().filter(|c| !c.is_zero()).count(), 1);
    }

    #[test]
    fn homology_with_boundaries() {
        let spec = fp();
        let d_in = mat(2, &[&[(0, 1), (1, 1)]], spec);
        let d_out = mat(1, &[&[(0, 1)], &[(0, -1)]], spec);
        let h = HomologyBlock::compute(&d_in, &d_out, spec).unwrap();
        assert_eq!(h.dim(), 0);
        let z: SparseVec = vec![(0, spec.one()), (1, spec.one())];
        let coords = h.coordinates(&z).unwrap();
        assert!(coords.is_empty());
        let bad: SparseVec = vec![(0, spec.one())];
        assert!(h.coordinates(&bad).is_err());
    }

    #[test]
    fn non_complex_rejected() {
        let spec = fp();
        let d_in = mat(2, &[&[(0, 1)]], spec);
        let d_out = mat(1, &[&[(0, 1)], &[(0, 1)]], spec);
        assert!(matches!(
            HomologyBlock::compute(&d_in, &d_out, spec),
            Err(HomologyError::NotAComplex)
        ));
    }

    #[test]
    fn coordinates_kill_boundaries() {
        let spec = fp();
        let d_in = mat(3, &[&[(0, 1), (1, -1)]], spec);
        let d_out = mat(1, &[&[(0, 1)], &[(0, 1)], &[(0, 1)]], spec);
        let h = HomologyBlock::compute(&d_in, &d_out, spec).unwrap();
        assert_eq!(h.dim(), 1);
        let z: SparseVec = vec![(0, spec.one()), (2, spec.int(-1))];
        let base = h.coordinates(&z).unwrap();
        let boundary: SparseVec = vec![(0, spec.one()), (1, spec.int(-1))];
        let zb = sparse_add(&z, &boundary, &spec.one());
        assert_eq!(base, h.coordinates(&zb).unwrap());
    }

    #[test]
    fn koszul_oracle_transverse_lines() {
        let vars = VarTable::new(&["x", "y"]);
        let spec = fp();
        let mut subs = BTreeMap::new();
        subs.insert(1, MultiPoly::zero(2));
        let y = SubvarietyPresentation::new(&vars, subs).unwrap();
        let mut subs = BTreeMap::new();
        subs.insert(0, MultiPoly::zero(2));
        let z = SubvarietyPresentation::new(&vars, subs).unwrap();
        let oracle = koszul_tor_oracle(&y, &z, spec, 2, 6, 6);
        let tor_total: usize = oracle.tor_dims.values().sum();
        assert_eq!(tor_total, 1);
        assert_eq!(oracle.tor_dims.get(&(0, 0)), Some(&1));
        let ext0: usize = oracle.ext_dims.iter().filter(|((i, _), _)| *i == 0).map(|(_, d)| d).sum();
        let ext1: usize = oracle.ext_dims.iter().filter(|((i, _), _)| *i == 1).map(|(_, d)| d).sum();
        assert_eq!(ext0, 0);
        assert_eq!(ext1, 1);
    }

    #[test]
    fn koszul_oracle_diagonal_a2() {
        // diagonal in A²×A²: Tor_i ≅ Ω^i, dim at degree d = C(2,i)·dim B_{d−i}
        let vars = VarTable::new(&["x1", "x2", "y1", "y2"]);
        let spec = fp();
        let mut subs = BTreeMap::new();
        subs.insert(2, MultiPoly::var(4, 0, spec));
        subs.insert(3, MultiPoly::var(4, 1, spec));
        let y = SubvarietyPresentation::new(&vars, subs).unwrap();
        let z = y.clone();
        let oracle = koszul_tor_oracle(&y, &z, spec, 2, 6, 4);
        assert!(oracle.differential_is_zero);
        assert_eq!(oracle.tor_dims.get(&(1, 3)), Some(&6));
        assert_eq!(oracle.tor_dims.get(&(2, 3)), Some(&2));
        // Ext^i ≅ Λ^i T: dim at shift t = C(2,i)·dim B_{t+i}
        assert_eq!(oracle.ext_dims.get(&(1, 0)), Some(&(2 * 2)));
        assert_eq!(oracle.ext_dims.get(&(2, -2)), Some(&1));
    }

    #[test]
    fn koszul_oracle_self_intersection() {
        let vars = VarTable::new(&["x", "y"]);
        let spec = fp();
        let mut subs = BTreeMap::new();
        subs.insert(1, MultiPoly::zero(2));
        let y = SubvarietyPresentation::new(&vars, subs).unwrap();
        let z = y.clone();
        let oracle = koszul_tor_oracle(&y, &z, spec, 1, 4, 4);
        for t in 0..=3i64 {
            assert_eq!(oracle.ext_dims.get(&(0, t)), Some(&1));
            assert_eq!(oracle.ext_dims.get(&(1, t - 1)), Some(&1));
        }
        for d in 0..=3u32 {
            assert_eq!(oracle.tor_dims.get(&(0, d)), Some(&1));
            assert_eq!(oracle.tor_dims.get(&(1, d + 1)), Some(&1));
        }
    }
}
