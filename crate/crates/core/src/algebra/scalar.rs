//! Exact field scalars: arbitrary-precision rationals and prime fields 𝔽_p.
//!
//! Every value in the engine is a `Scalar`; there is no floating point
//! anywhere. 𝔽_p elements carry their modulus so that mixed-modulus bugs
//! panic instead of corrupting results.

use alloc::string::String;
use alloc::string::ToString;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A choice of ground field for a whole computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    /// The rationals ℚ.
    Q,
    /// The prime field 𝔽_p, 2 < p < 2^31.
    Fp(u64),
}

impl FieldSpec {
    pub fn parse(s: &str) -> Result<FieldSpec, String> {
        if s == "Q" {
            return Ok(FieldSpec::Q);
        }
        if let Some(p) = s.strip_prefix("Fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| alloc::format!("invalid prime in field spec `{s}`"))?;
            if p <= 2 || p >= (1 << 31) {
                return Err(alloc::format!("prime {p} out of range (2 < p < 2^31)"));
            }
            if !is_prime(p) {
                return Err(alloc::format!("{p} is not prime"));
            }
            return Ok(FieldSpec::Fp(p));
        }
        Err(alloc::format!("unrecognized field spec `{s}` (use Q or Fp:<p>)"))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Q => Scalar::Rat(BigRational::zero()),
            FieldSpec::Fp(p) => Scalar::Fp { v: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Q => Scalar::Rat(BigRational::from(BigInt::from(n))),
            FieldSpec::Fp(p) => Scalar::Fp {
                v: n.rem_euclid(*p as i64) as u64,
                p: *p,
            },
        }
    }

    /// The exact fraction n/d. Panics if d ≡ 0 in the field.
    pub fn ratio(&self, n: i64, d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        match self {
            FieldSpec::Q => Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d))),
            FieldSpec::Fp(_) => self.int(n).div(&self.int(d)),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Q => write!(f, "Q"),
            FieldSpec::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of the ground field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rat(BigRational),
    Fp { v: u64, p: u64 },
}

impl Scalar {
    pub fn spec(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Q,
            Scalar::Fp { p, .. } => FieldSpec::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                assert_eq!(p, q, "mixed moduli");
                Scalar::Fp { v: (a + b) % p, p: *p }
            }
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { v, p } => Scalar::Fp { v: (p - v) % p, p: *p },
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                assert_eq!(p, q, "mixed moduli");
                Scalar::Fp { v: a * b % p, p: *p }
            }
            _ => panic!("mixed scalar kinds"),
        }
    }

    /// Multiplicative inverse. Panics on zero (a genuine arithmetic bug), and
    /// on 𝔽_p inputs that became zero because p divides a required integer.
    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => {
                assert!(!a.is_zero(), "inverse of zero");
                Scalar::Rat(a.recip())
            }
            Scalar::Fp { v, p } => {
                assert!(*v != 0, "inverse of zero mod {p}");
                Scalar::Fp { v: mod_inv(*v, *p), p: *p }
            }
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self.mul(&o.inv())
    }

    pub fn mul_int(&self, k: i64) -> Scalar {
        self.mul(&self.spec().int(k))
    }

    pub fn div_int(&self, k: i64) -> Scalar {
        self.mul(&self.spec().int(k).inv())
    }

    /// Reduction of a rational scalar mod p; used by the ℚ-vs-𝔽_p agreement
    /// checks. Fails if p divides the denominator.
    pub fn to_fp(&self, p: u64) -> Option<Scalar> {
        match self {
            Scalar::Fp { v, p: q } => (*q == p).then_some(Scalar::Fp { v: *v, p }),
            Scalar::Rat(r) => {
                let pb = BigInt::from(p);
                let den = r.denom() % &pb;
                if den.is_zero() {
                    return None;
                }
                let num = ((r.numer() % &pb) + &pb) % &pb;
                let num_u = num.to_string().parse::<u64>().ok()?;
                let den_u = (((r.denom() % &pb) + &pb) % &pb).to_string().parse::<u64>().ok()?;
                Some(Scalar::Fp { v: num_u * mod_inv(den_u, p) % p, p })
            }
        }
    }
}

// Display is used by the canonical printer, so keep it minimal and stable:
// rationals as `n` or `n/d`, 𝔽_p as the least nonnegative residue.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

/// Does the printed form need a leading minus handled by the caller?
pub fn is_negative(s: &Scalar) -> bool {
    match s {
        Scalar::Rat(r) => r.is_negative(),
        Scalar::Fp { .. } => false,
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // extended Euclid over i128 to dodge overflow for p near 2^31
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}
