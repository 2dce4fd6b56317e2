//! Deterministic random generation for property checks.
//!
//! Seeded ChaCha8 everywhere; identities are then checked on the seeded
//! sample plus fixed corner cases, independent of thread count.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::monomial::{monomials_of_degree, Monomial};
use crate::algebra::poly::{MultiPoly, VarTable};
use crate::algebra::scalar::FieldSpec;

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn seeded(seed: u64) -> TestRng {
        TestRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent stream for a named check, stable across runs and thread
    /// counts.
    pub fn for_check(seed: u64, check_id: &str) -> TestRng {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in check_id.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        TestRng::seeded(seed ^ h)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Small signed integer in [-4, 4] \ {0}, a good coefficient for exact
    /// identity checks.
    pub fn small_int(&mut self) -> i64 {
        let k = (self.next_u64() % 8) as i64 - 4;
        if k >= 0 {
            k + 1
        } else {
            k
        }
    }

    pub fn monomial_of_degree(&mut self, nvars: usize, vars: &[usize], d: u32) -> Monomial {
        let all = monomials_of_degree(nvars, vars, d);
        all[self.below(all.len())].clone()
    }

    /// Random polynomial with up to `terms` terms of degree ≤ `maxdeg`.
    pub fn poly(&mut self, vars: &VarTable, spec: FieldSpec, maxdeg: u32, terms: usize) -> MultiPoly {
        self.poly_on(vars.len(), &(0..vars.len()).collect::<Vec<_>>(), spec, maxdeg, terms)
    }

    pub fn poly_on(
        &mut self,
        nvars: usize,
        on: &[usize],
        spec: FieldSpec,
        maxdeg: u32,
        terms: usize,
    ) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        for _ in 0..terms {
            let d = (self.next_u64() % (maxdeg as u64 + 1)) as u32;
            let m = self.monomial_of_degree(nvars, on, d);
            p.add_term(m, spec.int(self.small_int()));
        }
        p
    }
}
