//! Exponent vectors with the graded lexicographic order.
//!
//! All determinism in the engine flows from this order: polynomials,
//! basis enumeration and printing all iterate monomials through it.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// An exponent vector over a fixed ambient variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn unit(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, v: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), o.0.len());
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        debug_assert!(o.divides(self));
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    /// Exponents supported only on the given variable set?
    pub fn supported_on(&self, vars: &[usize]) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(v, &e)| e == 0 || vars.contains(&v))
    }

    pub fn pow(&self, k: u16) -> Monomial {
        Monomial(self.0.iter().map(|&e| e * k).collect())
    }

    /// Multidegree along a variable-to-axis assignment.
    pub fn multidegree(&self, axes: &[usize], naxes: usize) -> Vec<u16> {
        let mut m = vec![0u16; naxes];
        for (v, &e) in self.0.iter().enumerate() {
            m[axes[v]] += e;
        }
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree exactly `d` in the given variables,
/// in a deterministic order.
pub fn monomials_of_degree(nvars: usize, vars: &[usize], d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = Monomial::unit(nvars);
    rec(&mut out, &mut cur, vars, 0, d);
    fn rec(out: &mut Vec<Monomial>, cur: &mut Monomial, vars: &[usize], i: usize, rem: u32) {
        if i == vars.len() {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if i + 1 == vars.len() {
            cur.0[vars[i]] = rem as u16;
            out.push(cur.clone());
            cur.0[vars[i]] = 0;
            return;
        }
        for e in 0..=rem {
            cur.0[vars[i]] = e as u16;
            rec(out, cur, vars, i + 1, rem - e);
        }
        cur.0[vars[i]] = 0;
    }
    out
}

/// All monomials of total degree exactly `d` and prescribed multidegree.
pub fn monomials_of_multidegree(
    nvars: usize,
    vars: &[usize],
    axes: &[usize],
    mdeg: &[u16],
) -> Vec<Monomial> {
    let d: u32 = mdeg.iter().map(|&x| x as u32).sum();
    monomials_of_degree(nvars, vars, d)
        .into_iter()
        .filter(|m| m.multidegree(axes, mdeg.len()) == mdeg)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let n = 2;
        let x = Monomial::var(n, 0);
        let y = Monomial::var(n, 1);
        let x2 = x.mul(&x);
        let xy = x.mul(&y);
        assert!(x2 > xy); // same degree, x-exponent decides
        assert!(xy > x); // higher degree wins
        assert!(y < x); // hmm: [0,1] vs [1,0]: lex on exponents gives x > y
    }

    #[test]
    fn enumeration_counts() {
        // C(n+d-1, d) monomials of degree d in n variables
        assert_eq!(monomials_of_degree(3, &[0, 1, 2], 2).len(), 6);
        assert_eq!(monomials_of_degree(4, &[0, 1], 3).len(), 4);
        assert_eq!(monomials_of_degree(2, &[0, 1], 0).len(), 1);
    }
}
