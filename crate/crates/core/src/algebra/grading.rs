//! Internal-degree bookkeeping.
//!
//! In exact-graded mode (all substitutions linear homogeneous) the ambient
//! variables get partitioned into axes: two variables share an axis whenever
//! some substitution relates them. Every structure map of the bar complex
//! preserves the resulting multidegree, so homology splits into small blocks.

use alloc::vec;
use alloc::vec::Vec;

use super::monomial::{monomials_of_degree, monomials_of_multidegree, Monomial};
use super::presentation::SubvarietyPresentation;

/// Variable-to-axis assignment for the fine multigrading.
#[derive(Clone, Debug)]
pub struct GradingAxes {
    pub axes: Vec<usize>,
    pub naxes: usize,
}

impl GradingAxes {
    /// The coarse grading: everything on one axis.
    pub fn total(nvars: usize) -> GradingAxes {
        GradingAxes {
            axes: vec![0; nvars],
            naxes: 1,
        }
    }

    /// Finest common grading making all generators of the given presentations
    /// homogeneous. Requires linear homogeneous substitutions.
    pub fn common(nvars: usize, presentations: &[&SubvarietyPresentation]) -> Option<GradingAxes> {
        let mut uf: Vec<usize> = (0..nvars).collect();
        fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        fn union(uf: &mut Vec<usize>, a: usize, b: usize) {
            let (ra, rb) = (find(uf, a), find(uf, b));
            uf[ra] = rb;
        }
        for pres in presentations {
            if !pres.is_linear_homogeneous() {
                return None;
            }
            for (e, s) in &pres.subs {
                for m in s.terms.keys() {
                    for (v, &k) in m.0.iter().enumerate() {
                        if k > 0 {
                            union(&mut uf, *e, v);
                        }
                    }
                }
            }
        }
        let mut reps: Vec<usize> = Vec::new();
        let mut axes = vec![0usize; nvars];
        for v in 0..nvars {
            let r = find(&mut uf, v);
            let axis = match reps.iter().position(|&x| x == r) {
                Some(i) => i,
                None => {
                    reps.push(r);
                    reps.len() - 1
                }
            };
            axes[v] = axis;
        }
        Some(GradingAxes {
            axes,
            naxes: reps.len(),
        })
    }

    pub fn mdeg(&self, m: &Monomial) -> Vec<u16> {
        m.multidegree(&self.axes, self.naxes)
    }

    /// All multidegrees of total degree d, in lexicographic order.
    pub fn multidegrees_of_total(&self, d: u32) -> Vec<Vec<u16>> {
        monomials_of_degree(self.naxes, &(0..self.naxes).collect::<Vec<_>>(), d)
            .into_iter()
            .map(|m| m.0)
            .collect()
    }
}

/// An ordered monomial basis of one graded slice of a space.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    pub monomials: Vec<Monomial>,
}

/// Basis of the degree-d slice of the polynomial ring on `vars`.
pub fn slice_of_ring(nvars: usize, vars: &[usize], d: u32) -> GradedBasis {
    GradedBasis {
        monomials: monomials_of_degree(nvars, vars, d),
    }
}

/// Basis of the degree-d slice of the augmentation ideal Ā (degree ≥ 1 only).
pub fn slice_of_augmentation(nvars: usize, d: u32) -> GradedBasis {
    if d == 0 {
        return GradedBasis { monomials: Vec::new() };
    }
    slice_of_ring(nvars, &(0..nvars).collect::<Vec<_>>(), d)
}

/// Basis of a multidegree slice.
pub fn slice_of_multidegree(nvars: usize, vars: &[usize], axes: &GradingAxes, mdeg: &[u16]) -> GradedBasis {
    GradedBasis {
        monomials: monomials_of_multidegree(nvars, vars, &axes.axes, mdeg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::poly::VarTable;
    use crate::algebra::scalar::FieldSpec;
    use alloc::collections::BTreeMap;

    #[test]
    fn slice_sizes() {
        // B = C[x,y] degree 2: {x², xy, y²}
        assert_eq!(slice_of_ring(2, &[0, 1], 2).monomials.len(), 3);
        // Ā for A = C[x] degree 0: empty
        assert!(slice_of_augmentation(1, 0).monomials.is_empty());
        // C(n+d-1, d)
        assert_eq!(slice_of_ring(3, &[0, 1, 2], 4).monomials.len(), 15);
    }

    #[test]
    fn tensor_slice_of_augmentation_squared() {
        // Ā⊗Ā for A = C[x] in degree 3: {x⊗x², x²⊗x}
        let mut count = 0;
        for d1 in 1..3u32 {
            let d2 = 3 - d1;
            count += slice_of_augmentation(1, d1).monomials.len()
                * slice_of_augmentation(1, d2).monomials.len();
        }
        assert_eq!(count, 2);
    }

    #[test]
    fn diagonal_axes() {
        // A = C[x1, x2, y1, y2], diagonal y_i = x_i: two axes
        let vars = VarTable::new(&["x1", "x2", "y1", "y2"]);
        let q = FieldSpec::Q;
        let mut subs = BTreeMap::new();
        subs.insert(2, parse_poly("x1", &vars, q).unwrap());
        subs.insert(3, parse_poly("x2", &vars, q).unwrap());
        let pres = SubvarietyPresentation::new(&vars, subs).unwrap();
        let axes = GradingAxes::common(4, &[&pres]).unwrap();
        assert_eq!(axes.naxes, 2);
        assert_eq!(axes.axes[0], axes.axes[2]);
        assert_eq!(axes.axes[1], axes.axes[3]);
        assert_ne!(axes.axes[0], axes.axes[1]);
    }

    #[test]
    fn nonlinear_has_no_fine_grading() {
        let vars = VarTable::new(&["x", "y"]);
        let q = FieldSpec::Q;
        let mut subs = BTreeMap::new();
        subs.insert(1, parse_poly("x^2", &vars, q).unwrap());
        let pres = SubvarietyPresentation::new(&vars, subs).unwrap();
        assert!(GradingAxes::common(2, &[&pres]).is_none());
    }
}
