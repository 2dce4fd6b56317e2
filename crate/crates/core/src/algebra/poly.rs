//! Sparse multivariate polynomials over an exact scalar field.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::monomial::Monomial;
use super::scalar::{is_negative, FieldSpec, Scalar};

/// Names of the ambient variables, in declaration order. The declaration
/// order fixes the monomial order and hence every printed artifact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarTable {
    pub names: Vec<String>,
}

impl VarTable {
    pub fn new(names: &[&str]) -> VarTable {
        VarTable {
            names: names.iter().map(|s| String::from(*s)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A sparse polynomial: canonical map from exponent vectors to nonzero
/// scalars. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> MultiPoly {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize, spec: FieldSpec) -> MultiPoly {
        MultiPoly::constant(nvars, spec.one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(nvars), c);
        }
        p
    }

    pub fn var(nvars: usize, v: usize, spec: FieldSpec) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(Monomial::var(nvars, v), spec.one());
        p
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Scalar) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &MultiPoly) -> MultiPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &MultiPoly) -> MultiPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.neg());
        }
        r
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, o: &MultiPoly) -> MultiPoly {
        let mut r = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        r
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k.mul(c))).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> MultiPoly {
        if k == 0 {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul_int(k)))
                .collect(),
        }
    }

    pub fn partial_derivative(&self, v: usize) -> MultiPoly {
        let mut r = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[v] = e - 1;
            r.add_term(m2, c.mul_int(e as i64));
        }
        r
    }

    /// Iterated partials along a multi-index.
    pub fn derivative_multi(&self, idx: &Monomial) -> MultiPoly {
        let mut r = self.clone();
        for (v, &k) in idx.0.iter().enumerate() {
            for _ in 0..k {
                r = r.partial_derivative(v);
                if r.is_zero() {
                    return r;
                }
            }
        }
        r
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// The part of given total degree.
    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> Option<&Scalar> {
        self.terms.get(&Monomial::unit(self.nvars))
    }

    /// Strip the degree-0 part; the reduced bar complex drops constants that
    /// land in tensor slots.
    pub fn positive_part(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.is_unit())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn supported_on(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|m| m.supported_on(vars))
    }

    /// Substitute polynomials for variables: each `subs[v] = Some(q)` replaces
    /// variable v by q. Variables not in `subs` stay.
    pub fn substitute(&self, subs: &BTreeMap<usize, MultiPoly>, spec: FieldSpec) -> MultiPoly {
        let mut r = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut factor = MultiPoly::constant(self.nvars, c.clone());
            let mut base = Monomial::unit(self.nvars);
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Some(q) = subs.get(&v) {
                    let mut pw = MultiPoly::one(self.nvars, spec);
                    for _ in 0..e {
                        pw = pw.mul(q);
                    }
                    factor = factor.mul(&pw);
                } else {
                    base.0[v] = e;
                }
            }
            factor = factor.mul(&MultiPoly::monomial(self.nvars, base, spec.one()));
            r = r.add(&factor);
        }
        r
    }

    /// Reduce every rational coefficient mod p (see scalar::to_fp).
    pub fn to_fp(&self, p: u64) -> Option<MultiPoly> {
        let mut r = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), c.to_fp(p)?);
        }
        Some(r)
    }

    /// Canonical text form: terms in descending grlex order.
    pub fn display<'a>(&'a self, vars: &'a VarTable) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, vars }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a MultiPoly,
    vars: &'a VarTable,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            let (sign, mag) = if is_negative(c) {
                ("-", c.neg())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let unit = m.is_unit();
            if !mag.is_one() || unit {
                write!(f, "{mag}")?;
                if !unit {
                    write!(f, "*")?;
                }
            }
            let mut firstv = true;
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !firstv {
                    write!(f, "*")?;
                }
                firstv = false;
                write!(f, "{}", self.vars.names[v])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    fn ctx() -> (VarTable, FieldSpec) {
        (VarTable::new(&["x", "y"]), FieldSpec::Q)
    }

    #[test]
    fn arithmetic_and_derivatives() {
        let (vars, spec) = ctx();
        let p = parse_poly("x^2*y", &vars, spec).unwrap();
        let dx = p.partial_derivative(0);
        assert_eq!(dx, parse_poly("2*x*y", &vars, spec).unwrap());
        assert!(parse_poly("5", &vars, spec).unwrap().partial_derivative(0).is_zero());
        // mixed partials commute
        let q = parse_poly("x^2*y^2", &vars, spec).unwrap();
        let a = q.partial_derivative(0).partial_derivative(1);
        let b = q.partial_derivative(1).partial_derivative(0);
        assert_eq!(a, b);
        assert_eq!(a, parse_poly("4*x*y", &vars, spec).unwrap());
    }

    #[test]
    fn leibniz_rule() {
        let (vars, spec) = ctx();
        let p = parse_poly("x^2 + y", &vars, spec).unwrap();
        let q = parse_poly("x*y - 3", &vars, spec).unwrap();
        let lhs = p.mul(&q).partial_derivative(0);
        let rhs = p
            .partial_derivative(0)
            .mul(&q)
            .add(&p.mul(&q.partial_derivative(0)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn printer_parser_roundtrip() {
        let (vars, spec) = ctx();
        for s in ["x^2*y - 1/2*x + 3", "0", "-x", "x*y", "2*x^3 - y^2 + 1"] {
            let p = parse_poly(s, &vars, spec).unwrap();
            let printed = alloc::format!("{}", p.display(&vars));
            let q = parse_poly(&printed, &vars, spec).unwrap();
            assert_eq!(p, q, "roundtrip failed for `{s}` -> `{printed}`");
        }
    }
}
