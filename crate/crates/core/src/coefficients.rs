//! Exact coefficient rings: 𝔽₂, 𝔽_p, ℚ and ℤ[1/e].
//!
//! Elements carry their ring so that mixing operands from different rings is
//! caught instead of silently producing garbage. Finite-field elements are
//! residues; ℚ and ℤ[1/e] elements are reduced big-integer fractions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("mixed-ring operands: {0} and {1}")]
    MixedRings(CoefficientRing, CoefficientRing),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("{value} is not an element of {ring}")]
    NotInRing { value: String, ring: CoefficientRing },
    #[error("cannot parse element {0:?}")]
    Parse(String),
    #[error("reduction mod 2 is undefined over {0}")]
    NoMod2(CoefficientRing),
}

/// A coefficient ring used for Hom groups between twisted units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientRing {
    Gf2,
    /// 𝔽_p for an odd prime p.
    Gfp(u64),
    Rationals,
    /// ℤ[1/e] with e = 1 or an odd prime.
    ZInvE(u64),
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl CoefficientRing {
    pub fn gf(p: u64) -> Result<Self, CoeffError> {
        if p == 2 {
            Ok(CoefficientRing::Gf2)
        } else if is_prime(p) {
            Ok(CoefficientRing::Gfp(p))
        } else {
            Err(CoeffError::InvalidRing(format!("F{p}: {p} is not prime")))
        }
    }

    pub fn z_inv(e: u64) -> Result<Self, CoeffError> {
        if e == 1 || (e != 2 && is_prime(e)) {
            Ok(CoefficientRing::ZInvE(e))
        } else {
            Err(CoeffError::InvalidRing(format!(
                "Z[1/{e}]: e must be 1 or an odd prime"
            )))
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, CoefficientRing::ZInvE(_))
    }

    /// Residue characteristic for finite fields.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            CoefficientRing::Gf2 => Some(2),
            CoefficientRing::Gfp(p) => Some(*p),
            _ => None,
        }
    }

    pub fn zero(&self) -> RingElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> RingElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> RingElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> RingElement {
        let value = match self.modulus() {
            Some(p) => Value::Residue(mod_u64(n, p)),
            None => Value::Fraction(BigRational::from_integer(n.clone())),
        };
        RingElement { ring: *self, value }
    }

    /// Image of a rational number, when it lies in the ring (or its
    /// denominator is invertible in the residue field).
    pub fn from_rational(&self, q: &BigRational) -> Result<RingElement, CoeffError> {
        let not_in = || CoeffError::NotInRing {
            value: fmt_fraction(q),
            ring: *self,
        };
        match self {
            CoefficientRing::Gf2 | CoefficientRing::Gfp(_) => {
                let p = self.modulus().unwrap();
                let den = mod_u64(q.denom(), p);
                if den == 0 {
                    return Err(not_in());
                }
                let num = mod_u64(q.numer(), p);
                let inv = mod_inverse(den, p).ok_or_else(not_in)?;
                Ok(RingElement {
                    ring: *self,
                    value: Value::Residue(mul_mod(num, inv, p)),
                })
            }
            CoefficientRing::Rationals => Ok(RingElement {
                ring: *self,
                value: Value::Fraction(q.clone()),
            }),
            CoefficientRing::ZInvE(e) => {
                let (rest, _) = strip_factor(q.denom(), *e);
                if !rest.is_one() {
                    return Err(not_in());
                }
                Ok(RingElement {
                    ring: *self,
                    value: Value::Fraction(q.clone()),
                })
            }
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<RingElement, CoeffError> {
        let q = parse_rational(s)?;
        self.from_rational(&q)
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Gf2 => write!(f, "F2"),
            CoefficientRing::Gfp(p) => write!(f, "F{p}"),
            CoefficientRing::Rationals => write!(f, "Q"),
            CoefficientRing::ZInvE(e) => write!(f, "Z[1/{e}]"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = CoeffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "Q" {
            return Ok(CoefficientRing::Rationals);
        }
        if let Some(rest) = s.strip_prefix("Z[1/").and_then(|r| r.strip_suffix(']')) {
            let e = rest
                .parse::<u64>()
                .map_err(|_| CoeffError::InvalidRing(s.to_string()))?;
            return CoefficientRing::z_inv(e);
        }
        if let Some(rest) = s.strip_prefix('F') {
            let p = rest
                .parse::<u64>()
                .map_err(|_| CoeffError::InvalidRing(s.to_string()))?;
            return CoefficientRing::gf(p);
        }
        Err(CoeffError::InvalidRing(s.to_string()))
    }
}

impl Serialize for CoefficientRing {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoefficientRing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Residue(u64),
    Fraction(BigRational),
}

/// An exact element of a [`CoefficientRing`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: CoefficientRing,
    value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
}

/// Checked binary/unary arithmetic. `Neg` ignores `y` apart from the ring check.
pub fn arith(op: ArithOp, x: &RingElement, y: &RingElement) -> Result<RingElement, CoeffError> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Mul => x.try_mul(y),
        ArithOp::Neg => {
            x.check_ring(y)?;
            Ok(x.neg_ref())
        }
    }
}

impl RingElement {
    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Residue(r) => *r == 0,
            Value::Fraction(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Residue(r) => *r == 1,
            Value::Fraction(q) => q.is_one(),
        }
    }

    /// The value as a rational number; residues are lifted to `0..p`.
    pub fn to_rational(&self) -> BigRational {
        match &self.value {
            Value::Residue(r) => BigRational::from_integer(BigInt::from(*r)),
            Value::Fraction(q) => q.clone(),
        }
    }

    fn check_ring(&self, other: &RingElement) -> Result<(), CoeffError> {
        if self.ring != other.ring {
            Err(CoeffError::MixedRings(self.ring, other.ring))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &RingElement) -> Result<RingElement, CoeffError> {
        self.check_ring(other)?;
        let value = match (&self.value, &other.value) {
            (Value::Residue(a), Value::Residue(b)) => {
                let p = self.ring.modulus().unwrap();
                Value::Residue((a + b) % p)
            }
            (Value::Fraction(a), Value::Fraction(b)) => Value::Fraction(a + b),
            _ => unreachable!("ring tag and representation disagree"),
        };
        Ok(RingElement {
            ring: self.ring,
            value,
        })
    }

    pub fn try_mul(&self, other: &RingElement) -> Result<RingElement, CoeffError> {
        self.check_ring(other)?;
        let value = match (&self.value, &other.value) {
            (Value::Residue(a), Value::Residue(b)) => {
                Value::Residue(mul_mod(*a, *b, self.ring.modulus().unwrap()))
            }
            (Value::Fraction(a), Value::Fraction(b)) => Value::Fraction(a * b),
            _ => unreachable!("ring tag and representation disagree"),
        };
        Ok(RingElement {
            ring: self.ring,
            value,
        })
    }

    fn neg_ref(&self) -> RingElement {
        let value = match &self.value {
            Value::Residue(a) => {
                let p = self.ring.modulus().unwrap();
                Value::Residue((p - a) % p)
            }
            Value::Fraction(q) => Value::Fraction(-q),
        };
        RingElement {
            ring: self.ring,
            value,
        }
    }

    /// Multiplicative inverse inside the ring, if one exists.
    pub fn inverse(&self) -> Option<RingElement> {
        match &self.value {
            Value::Residue(a) => {
                let p = self.ring.modulus().unwrap();
                mod_inverse(*a, p).map(|inv| RingElement {
                    ring: self.ring,
                    value: Value::Residue(inv),
                })
            }
            Value::Fraction(q) => {
                if q.is_zero() {
                    return None;
                }
                let inv = q.recip();
                match self.ring {
                    CoefficientRing::Rationals => Some(RingElement {
                        ring: self.ring,
                        value: Value::Fraction(inv),
                    }),
                    CoefficientRing::ZInvE(_) => self.ring.from_rational(&inv).ok(),
                    _ => unreachable!(),
                }
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        match (&self.value, self.ring) {
            (Value::Fraction(q), CoefficientRing::ZInvE(e)) => {
                // numerator must be ±e^k
                !q.is_zero() && strip_factor(&q.numer().abs(), e).0.is_one()
            }
            _ => !self.is_zero(),
        }
    }

    /// Image under ℤ[1/e] → 𝔽₂ (e odd or 1).
    pub fn reduce_mod2(&self) -> Result<RingElement, CoeffError> {
        match self.ring {
            CoefficientRing::ZInvE(_) => CoefficientRing::Gf2.from_rational(&self.to_rational()),
            r => Err(CoeffError::NoMod2(r)),
        }
    }

    /// Change of coefficients along the canonical map into `target`, where defined.
    pub fn change_ring(&self, target: CoefficientRing) -> Result<RingElement, CoeffError> {
        if target == self.ring {
            return Ok(self.clone());
        }
        match self.ring {
            CoefficientRing::Gf2 | CoefficientRing::Gfp(_) => Err(CoeffError::NotInRing {
                value: self.to_string(),
                ring: target,
            }),
            _ => target.from_rational(&self.to_rational()),
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Residue(r) => write!(f, "{r}"),
            Value::Fraction(q) => write!(f, "{}", fmt_fraction(q)),
        }
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: Self) -> RingElement {
        self.try_add(rhs).expect("ring mismatch in addition")
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: Self) -> RingElement {
        self.try_add(&rhs.neg_ref())
            .expect("ring mismatch in subtraction")
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: Self) -> RingElement {
        self.try_mul(rhs).expect("ring mismatch in multiplication")
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.neg_ref()
    }
}

/// "num/den" (or a bare integer) with a reduced positive denominator.
pub fn fmt_fraction(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, CoeffError> {
    let s = s.trim();
    let err = || CoeffError::Parse(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

fn mod_u64(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(p as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(p as i128) as u64)
}

/// Splits `n = rest · e^k`; for e = 1 nothing is stripped.
fn strip_factor(n: &BigInt, e: u64) -> (BigInt, u32) {
    let mut rest = n.clone();
    let mut k = 0;
    if e <= 1 || rest.is_zero() {
        return (rest, 0);
    }
    let e = BigInt::from(e);
    while (&rest % &e).is_zero() {
        rest /= &e;
        k += 1;
    }
    (rest, k)
}

impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_fraction(&self.to_rational()))
    }
}
