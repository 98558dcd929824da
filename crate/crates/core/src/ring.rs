//! Exact arithmetic in `Z` and in rings of integers of imaginary quadratic
//! fields `Q(sqrt(-d))`.
//!
//! Elements are stored as integer coordinates `a + b*w` over the integral
//! basis `{1, w}`, where `w = (1 + sqrt(-d))/2` when `d = 3 (mod 4)` and
//! `w = sqrt(-d)` otherwise. Over `Z` the `b` coordinate is always zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest supported `d`; keeps residue arithmetic inside `i128`.
pub const MAX_D: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    /// Ring of integers of `Q(sqrt(-d))`, `d` squarefree and positive.
    Quadratic {
        d: u64,
    },
}

impl Ring {
    pub fn quadratic(d: u64) -> Result<Ring> {
        if d == 0 || d > MAX_D {
            return Err(Error::InvalidRing(format!("d = {d} out of range 1..={MAX_D}")));
        }
        if !is_squarefree(d) {
            return Err(Error::InvalidRing(format!("d = {d} is not squarefree")));
        }
        Ok(Ring::Quadratic { d })
    }

    pub fn gaussian() -> Ring {
        Ring::Quadratic { d: 1 }
    }

    pub fn is_integers(self) -> bool {
        matches!(self, Ring::Integers)
    }

    pub fn d(self) -> Option<u64> {
        match self {
            Ring::Integers => None,
            Ring::Quadratic { d } => Some(d),
        }
    }

    /// True when `w = (1 + sqrt(-d))/2`.
    pub fn half_integral(self) -> bool {
        matches!(self, Ring::Quadratic { d } if d % 4 == 3)
    }

    /// `(t, s)` with `w^2 = t*w + s`. Over `Z` both are zero.
    pub fn omega_relation(self) -> (i64, i64) {
        match self {
            Ring::Integers => (0, 0),
            Ring::Quadratic { d } if d % 4 == 3 => (1, -(((1 + d) / 4) as i64)),
            Ring::Quadratic { d } => (0, -(d as i64)),
        }
    }

    /// Trace of `w`: `w + conj(w)`.
    pub fn omega_trace(self) -> i64 {
        self.omega_relation().0
    }

    /// Norm of `w`: `w * conj(w)`.
    pub fn omega_norm(self) -> i64 {
        -self.omega_relation().1
    }

    pub fn zero(self) -> RingElem {
        RingElem::from_int(self, 0)
    }

    pub fn one(self) -> RingElem {
        RingElem::from_int(self, 1)
    }

    /// The basis element `w`; over `Z` this is an error.
    pub fn omega(self) -> Result<RingElem> {
        match self {
            Ring::Integers => Err(Error::InvalidRing("Z has no element w".into())),
            _ => Ok(RingElem::new(self, BigInt::zero(), BigInt::one())),
        }
    }

    /// Rank of the ring as a `Z`-module.
    pub fn rank(self) -> usize {
        match self {
            Ring::Integers => 1,
            Ring::Quadratic { .. } => 2,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Quadratic { d } => write!(f, "Q(sqrt(-{d}))"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ring> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "Z" | "ZZ" => return Ok(Ring::Integers),
            "Q(i)" | "Z[i]" => return Ring::quadratic(1),
            _ => {}
        }
        let inner = t
            .strip_prefix("Q(sqrt(-")
            .and_then(|r| r.strip_suffix("))"))
            .ok_or_else(|| Error::InvalidRing(format!("expected Z or Q(sqrt(-d)), got {s:?}")))?;
        let d: u64 = inner
            .parse()
            .map_err(|_| Error::InvalidRing(format!("bad d in {s:?}")))?;
        Ring::quadratic(d)
    }
}

fn is_squarefree(d: u64) -> bool {
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    a: BigInt,
    b: BigInt,
    ring: Ring,
}

impl RingElem {
    pub fn new(ring: Ring, a: BigInt, b: BigInt) -> RingElem {
        assert!(
            !ring.is_integers() || b.is_zero(),
            "elements of Z have no w coordinate"
        );
        RingElem { a, b, ring }
    }

    pub fn from_int(ring: Ring, a: impl Into<BigInt>) -> RingElem {
        RingElem {
            a: a.into(),
            b: BigInt::zero(),
            ring,
        }
    }

    pub fn from_coords(ring: Ring, a: i64, b: i64) -> RingElem {
        RingElem::new(ring, BigInt::from(a), BigInt::from(b))
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// Rational integer value, if the `w` coordinate vanishes.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.b.is_zero().then_some(&self.a)
    }

    fn check(&self, other: &RingElem) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()))
        }
    }

    pub fn checked_add(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn checked_mul(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &RingElem) -> RingElem {
        RingElem {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            ring: self.ring,
        }
    }

    fn sub_unchecked(&self, other: &RingElem) -> RingElem {
        RingElem {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            ring: self.ring,
        }
    }

    fn mul_unchecked(&self, other: &RingElem) -> RingElem {
        if self.ring.is_integers() {
            return RingElem::from_int(self.ring, &self.a * &other.a);
        }
        let (t, s) = self.ring.omega_relation();
        let bb = &self.b * &other.b;
        RingElem {
            a: &self.a * &other.a + &bb * s,
            b: &self.a * &other.b + &self.b * &other.a + bb * t,
            ring: self.ring,
        }
    }

    pub fn scale(&self, k: &BigInt) -> RingElem {
        RingElem {
            a: &self.a * k,
            b: &self.b * k,
            ring: self.ring,
        }
    }

    /// Image under complex conjugation: `conj(w) = trace(w) - w`.
    pub fn conjugate(&self) -> RingElem {
        let t = self.ring.omega_trace();
        RingElem {
            a: &self.a + &self.b * t,
            b: -&self.b,
            ring: self.ring,
        }
    }

    /// Absolute norm: `|a|` over `Z`, `x * conj(x)` otherwise.
    pub fn norm(&self) -> BigInt {
        match self.ring {
            Ring::Integers => self.a.abs(),
            _ => {
                let t = self.ring.omega_trace();
                let n = self.ring.omega_norm();
                &self.a * &self.a + &self.a * &self.b * t + &self.b * &self.b * n
            }
        }
    }

    pub fn pow(&self, mut e: u64) -> RingElem {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact quotient `self / other`, or `None` when `other` does not divide
    /// `self` in the ring (or `other` is zero).
    pub fn div_exact(&self, other: &RingElem) -> Option<RingElem> {
        if other.is_zero() {
            return None;
        }
        if self.ring.is_integers() {
            let (q, r) = self.a.div_rem(&other.a);
            return r.is_zero().then(|| RingElem::from_int(self.ring, q));
        }
        let num = self * &other.conjugate();
        let den = other.norm();
        let (qa, ra) = num.a.div_rem(&den);
        let (qb, rb) = num.b.div_rem(&den);
        (ra.is_zero() && rb.is_zero()).then_some(RingElem {
            a: qa,
            b: qb,
            ring: self.ring,
        })
    }

    /// Complex embedding, for diagnostics only.
    pub fn to_complex(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        match self.ring {
            Ring::Integers => (a, 0.0),
            Ring::Quadratic { d } => {
                let root = (d as f64).sqrt();
                if self.ring.half_integral() {
                    (a + b / 2.0, b * root / 2.0)
                } else {
                    (a, b * root)
                }
            }
        }
    }

    pub fn parse(ring: Ring, s: &str) -> Result<RingElem> {
        crate::parse::parse_elem(ring, s)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&RingElem> for &RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &RingElem) -> RingElem {
                assert_eq!(self.ring, rhs.ring, "ring mismatch");
                self.$inner(rhs)
            }
        }
        impl $tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: RingElem) -> RingElem {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_unchecked);
forward_binop!(Sub, sub, sub_unchecked);
forward_binop!(Mul, mul, mul_unchecked);

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem {
            a: -&self.a,
            b: -&self.b,
            ring: self.ring,
        }
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let w_part = |f: &mut fmt::Formatter<'_>, b: &BigInt, leading: bool| -> fmt::Result {
            let mag = b.abs();
            let sign = if b.is_negative() {
                "-"
            } else if leading {
                ""
            } else {
                "+"
            };
            if mag.is_one() {
                write!(f, "{sign}w")
            } else {
                write!(f, "{sign}{mag}*w")
            }
        };
        if self.a.is_zero() {
            w_part(f, &self.b, true)
        } else {
            write!(f, "{}", self.a)?;
            w_part(f, &self.b, false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(ring: Ring, a: i64, b: i64) -> RingElem {
        RingElem::from_coords(ring, a, b)
    }

    #[test]
    fn gaussian_product() {
        let zi = Ring::gaussian();
        assert_eq!(&el(zi, 1, 1) * &el(zi, 1, -1), el(zi, 2, 0));
    }

    #[test]
    fn eisenstein_square() {
        let r = Ring::quadratic(3).unwrap();
        assert_eq!(el(r, 1, 1).pow(2), el(r, 0, 3));
        // complex check: (1+w)^2 = 3w numerically
        let (x, y) = el(r, 0, 3).to_complex();
        let (u, v) = el(r, 1, 1).to_complex();
        assert!((u * u - v * v - x).abs() < 1e-12 && (2.0 * u * v - y).abs() < 1e-12);
    }

    #[test]
    fn annihilation() {
        let r = Ring::quadratic(5).unwrap();
        assert!((&el(r, 7, -3) * &r.zero()).is_zero());
    }

    #[test]
    fn conjugates() {
        let zi = Ring::gaussian();
        assert_eq!(el(zi, 3, 2).conjugate(), el(zi, 3, -2));
        assert_eq!(
            Ring::Integers.one().scale(&7.into()).conjugate(),
            RingElem::from_int(Ring::Integers, 7)
        );
        let r3 = Ring::quadratic(3).unwrap();
        assert_eq!(el(r3, 0, 1).conjugate(), el(r3, 1, -1));
    }

    #[test]
    fn norms() {
        assert_eq!(el(Ring::gaussian(), 1, 1).norm(), 2.into());
        assert_eq!(RingElem::from_int(Ring::Integers, -6).norm(), 6.into());
        assert_eq!(el(Ring::quadratic(5).unwrap(), 2, 1).norm(), 9.into());
        assert!(Ring::gaussian().zero().norm().is_zero());
    }

    #[test]
    fn mismatch_is_error() {
        let x = Ring::gaussian().one();
        let y = Ring::Integers.one();
        assert!(matches!(x.checked_add(&y), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn ring_parsing() {
        assert_eq!("Z".parse::<Ring>().unwrap(), Ring::Integers);
        assert_eq!("Q( sqrt(-7) )".parse::<Ring>().unwrap(), Ring::Quadratic { d: 7 });
        assert!("Q(sqrt(-4))".parse::<Ring>().is_err());
        assert!("Q(sqrt(-0))".parse::<Ring>().is_err());
        assert!(Ring::quadratic(7).unwrap().half_integral());
        assert!(!Ring::quadratic(5).unwrap().half_integral());
    }

    #[test]
    fn exact_division() {
        let zi = Ring::gaussian();
        assert_eq!(el(zi, 2, 0).div_exact(&el(zi, 1, 1)), Some(el(zi, 1, -1)));
        assert_eq!(el(zi, 1, 0).div_exact(&el(zi, 1, 1)), None);
        let z = Ring::Integers;
        assert_eq!(el(z, -12, 0).div_exact(&el(z, 4, 0)), Some(el(z, -3, 0)));
        assert_eq!(el(z, 12, 0).div_exact(&el(z, 5, 0)), None);
    }

    #[test]
    fn display() {
        let zi = Ring::gaussian();
        assert_eq!(el(zi, 1, 1).to_string(), "1+w");
        assert_eq!(el(zi, 0, -1).to_string(), "-w");
        assert_eq!(el(zi, 3, -2).to_string(), "3-2*w");
        assert_eq!(el(zi, -4, 0).to_string(), "-4");
    }
}
