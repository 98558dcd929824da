//! Nonzero ideals of `R` as Hermite-normal-form `Z`-lattices.
//!
//! Over a quadratic ring an ideal is stored as `[[p, q], [0, r]]`, whose
//! columns are the `Z`-basis `p` and `q + r*w` (coordinates over `{1, w}`),
//! with `p > 0`, `r > 0` and `0 <= q < p`. Then `I ∩ Z = pZ`, `N(I) = p*r`,
//! and every residue class has a unique representative `a + b*w` with
//! `0 <= a < p`, `0 <= b < r`. Over `Z` an ideal is a single `g > 0`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem};

/// Default bound on the number of residue classes enumerated.
pub const DEFAULT_RESIDUE_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Basis {
    Zero,
    Int(BigInt),
    Quad { p: BigInt, q: BigInt, r: BigInt },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    ring: Ring,
    basis: Basis,
}

/// Incremental HNF of a rank <= 2 lattice in column form.
#[derive(Default)]
struct LatticeBuilder {
    p: BigInt,
    q: BigInt,
    r: BigInt,
}

impl LatticeBuilder {
    fn push(&mut self, va: BigInt, vb: BigInt) {
        if vb.is_zero() {
            self.p = self.p.gcd(&va);
            return;
        }
        if self.r.is_zero() {
            self.q = va;
            self.r = vb;
            return;
        }
        let eg = self.r.extended_gcd(&vb);
        let g = eg.gcd;
        let (s, t) = (eg.x, eg.y);
        let leftover = (&self.r / &g) * &va - (&vb / &g) * &self.q;
        self.q = &s * &self.q + &t * &va;
        self.r = g;
        self.p = self.p.gcd(&leftover);
    }

    fn finish(mut self, ring: Ring) -> Ideal {
        if self.r.is_negative() {
            self.r = -self.r;
            self.q = -self.q;
        }
        if self.p.is_zero() || self.r.is_zero() {
            // Only the zero ideal is rank deficient.
            debug_assert!(self.p.is_zero() && self.r.is_zero());
            return Ideal::zero(ring);
        }
        self.q = self.q.mod_floor(&self.p);
        Ideal {
            ring,
            basis: Basis::Quad {
                p: self.p,
                q: self.q,
                r: self.r,
            },
        }
    }
}

impl Ideal {
    pub fn zero(ring: Ring) -> Ideal {
        Ideal {
            ring,
            basis: Basis::Zero,
        }
    }

    pub fn unit(ring: Ring) -> Ideal {
        Ideal::principal(&ring.one())
    }

    pub fn principal(x: &RingElem) -> Ideal {
        Ideal::from_generators(x.ring(), std::slice::from_ref(x))
    }

    /// Smallest ideal containing `gens`: the HNF of the lattice spanned by
    /// every `g` and `w*g`.
    pub fn from_generators(ring: Ring, gens: &[RingElem]) -> Ideal {
        match ring {
            Ring::Integers => {
                let g = gens.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.a()));
                if g.is_zero() {
                    Ideal::zero(ring)
                } else {
                    Ideal {
                        ring,
                        basis: Basis::Int(g),
                    }
                }
            }
            Ring::Quadratic { .. } => {
                let w = ring.omega().expect("quadratic");
                let mut lat = LatticeBuilder::default();
                for g in gens {
                    debug_assert_eq!(g.ring(), ring);
                    if g.is_zero() {
                        continue;
                    }
                    let wg = &w * g;
                    lat.push(g.a().clone(), g.b().clone());
                    lat.push(wg.a().clone(), wg.b().clone());
                }
                lat.finish(ring)
            }
        }
    }

    pub fn try_from_generators(gens: &[RingElem]) -> Result<Ideal> {
        let ring = gens
            .first()
            .map(|g| g.ring())
            .ok_or_else(|| Error::Invalid("empty generator list has no ring; use Ideal::zero".into()))?;
        if let Some(bad) = gens.iter().find(|g| g.ring() != ring) {
            return Err(Error::RingMismatch(ring.to_string(), bad.ring().to_string()));
        }
        Ok(Ideal::from_generators(ring, gens))
    }

    /// Ideal with the given HNF data, validated.
    pub fn from_hnf(ring: Ring, p: BigInt, q: BigInt, r: BigInt) -> Result<Ideal> {
        if ring.is_integers() {
            return Err(Error::Invalid("HNF triples are for quadratic rings".into()));
        }
        if !p.is_positive() || !r.is_positive() || q.is_negative() || q >= p {
            return Err(Error::Invalid(format!(
                "not a reduced HNF: [[{p}, {q}], [0, {r}]]"
            )));
        }
        let gens = [
            RingElem::from_int(ring, p.clone()),
            RingElem::new(ring, q.clone(), r.clone()),
        ];
        let ideal = Ideal::from_generators(ring, &gens);
        let expected = Ideal {
            ring,
            basis: Basis::Quad { p, q, r },
        };
        if ideal != expected {
            return Err(Error::Invalid(
                "lattice is not closed under multiplication by w".into(),
            ));
        }
        Ok(ideal)
    }

    pub fn from_int_generator(ring: Ring, g: BigInt) -> Ideal {
        Ideal::principal(&RingElem::from_int(ring, g))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.basis, Basis::Zero)
    }

    pub fn is_unit(&self) -> bool {
        match &self.basis {
            Basis::Zero => false,
            Basis::Int(g) => g.is_one(),
            Basis::Quad { p, r, .. } => p.is_one() && r.is_one(),
        }
    }

    /// `(p, q, r)` for nonzero quadratic ideals.
    pub fn hnf(&self) -> Option<(&BigInt, &BigInt, &BigInt)> {
        match &self.basis {
            Basis::Quad { p, q, r } => Some((p, q, r)),
            _ => None,
        }
    }

    /// Positive generator of a nonzero ideal of `Z`.
    pub fn int_generator(&self) -> Option<&BigInt> {
        match &self.basis {
            Basis::Int(g) => Some(g),
            _ => None,
        }
    }

    /// Positive generator of `I ∩ Z`, or zero for the zero ideal.
    pub fn min_integer(&self) -> BigInt {
        match &self.basis {
            Basis::Zero => BigInt::zero(),
            Basis::Int(g) => g.clone(),
            Basis::Quad { p, .. } => p.clone(),
        }
    }

    /// `Z`-basis of the ideal (empty for the zero ideal).
    pub fn basis_elems(&self) -> Vec<RingElem> {
        match &self.basis {
            Basis::Zero => vec![],
            Basis::Int(g) => vec![RingElem::from_int(self.ring, g.clone())],
            Basis::Quad { p, q, r } => vec![
                RingElem::from_int(self.ring, p.clone()),
                RingElem::new(self.ring, q.clone(), r.clone()),
            ],
        }
    }

    /// `N(I) = |R/I|`.
    pub fn norm(&self) -> Result<BigInt> {
        match &self.basis {
            Basis::Zero => Err(Error::ZeroIdealNorm),
            Basis::Int(g) => Ok(g.clone()),
            Basis::Quad { p, r, .. } => Ok(p * r),
        }
    }

    pub fn contains(&self, x: &RingElem) -> bool {
        debug_assert_eq!(x.ring(), self.ring);
        match &self.basis {
            Basis::Zero => x.is_zero(),
            Basis::Int(g) => x.a().is_multiple_of(g),
            Basis::Quad { p, q, r } => {
                let (k, rem) = x.b().div_rem(r);
                rem.is_zero() && (x.a() - k * q).is_multiple_of(p)
            }
        }
    }

    /// True iff `other ⊆ self`.
    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        other.basis_elems().iter().all(|g| self.contains(g))
    }

    /// Canonical representative of `x` modulo the ideal.
    pub fn reduce(&self, x: &RingElem) -> RingElem {
        match &self.basis {
            Basis::Zero => x.clone(),
            Basis::Int(g) => RingElem::from_int(self.ring, x.a().mod_floor(g)),
            Basis::Quad { p, q, r } => {
                let (k, b) = x.b().div_mod_floor(r);
                let a = (x.a() - k * q).mod_floor(p);
                RingElem::new(self.ring, a, b)
            }
        }
    }

    /// `I + J`.
    pub fn join(&self, other: &Ideal) -> Ideal {
        let mut gens = self.basis_elems();
        gens.extend(other.basis_elems());
        Ideal::from_generators(self.ring, &gens)
    }

    /// `I + (x_1, ..., x_k)`.
    pub fn join_elems<'a>(&self, xs: impl IntoIterator<Item = &'a RingElem>) -> Ideal {
        let mut gens = self.basis_elems();
        gens.extend(xs.into_iter().filter(|x| !self.contains(x)).cloned());
        Ideal::from_generators(self.ring, &gens)
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        let xs = self.basis_elems();
        let ys = other.basis_elems();
        let gens: Vec<RingElem> = xs.iter().flat_map(|x| ys.iter().map(move |y| x * y)).collect();
        Ideal::from_generators(self.ring, &gens)
    }

    /// Image under complex conjugation.
    pub fn conjugate(&self) -> Ideal {
        let gens: Vec<RingElem> = self.basis_elems().iter().map(RingElem::conjugate).collect();
        Ideal::from_generators(self.ring, &gens)
    }

    /// The unique `J` with `I * J = (x)`, for `0 != x ∈ I`.
    ///
    /// Uses `I * conj(I) = (N(I))`, so `J = x * conj(I) / N(I)`.
    pub fn quotient(x: &RingElem, ideal: &Ideal) -> Result<Ideal> {
        if x.is_zero() || ideal.is_zero() || !ideal.contains(x) {
            return Err(Error::QuotientUndefined);
        }
        let n = RingElem::from_int(ideal.ring, ideal.norm()?);
        let gens: Vec<RingElem> = match &ideal.basis {
            Basis::Int(g) => vec![x
                .div_exact(&RingElem::from_int(ideal.ring, g.clone()))
                .ok_or(Error::QuotientUndefined)?],
            _ => ideal
                .basis_elems()
                .iter()
                .map(|g| (x * &g.conjugate()).div_exact(&n).ok_or(Error::QuotientUndefined))
                .collect::<Result<_>>()?,
        };
        let j = Ideal::from_generators(ideal.ring, &gens);
        if ideal.product(&j) != Ideal::principal(x) {
            return Err(Error::QuotientUndefined);
        }
        Ok(j)
    }

    /// Canonical representatives of `R/I`, refusing more than `cap` classes.
    pub fn residues(&self, cap: u64) -> Result<Vec<RingElem>> {
        let count = self.residue_count(cap)?;
        Ok((0..count).map(|i| self.residue_at(i)).collect())
    }

    /// Number of residue classes, checked against `cap`.
    pub fn residue_count(&self, cap: u64) -> Result<u64> {
        let n = self.norm()?;
        match n.to_u64() {
            Some(c) if c <= cap => Ok(c),
            _ => Err(Error::ResidueCap {
                count: n.to_string(),
                cap,
            }),
        }
    }

    /// The `i`-th canonical representative, `i < N(I)`; `a` varies fastest.
    pub fn residue_at(&self, i: u64) -> RingElem {
        match &self.basis {
            Basis::Zero => panic!("zero ideal has no finite residue system"),
            Basis::Int(_) => RingElem::from_int(self.ring, i),
            Basis::Quad { p, .. } => {
                let p = p.to_u64().expect("residue index within cap");
                RingElem::from_coords(self.ring, (i % p) as i64, (i / p) as i64)
            }
        }
    }

    /// A generator `x` with `(x) = I`, when one exists and is found within a
    /// bounded search of the norm form.
    pub fn principal_generator(&self) -> Option<RingElem> {
        match &self.basis {
            Basis::Zero => Some(self.ring.zero()),
            Basis::Int(g) => Some(RingElem::from_int(self.ring, g.clone())),
            Basis::Quad { .. } => {
                let n = self.norm().ok()?;
                let t = BigInt::from(self.ring.omega_trace());
                let nw = BigInt::from(self.ring.omega_norm());
                // a^2 + t*a*b + nw*b^2 = N; discriminant in a is
                // b^2 (t^2 - 4 nw) + 4N >= 0.
                let spread = BigInt::from(4) * &nw - &t * &t;
                let bmax = (BigInt::from(4) * &n / &spread).sqrt();
                if bmax > BigInt::from(1_000_000) {
                    return None;
                }
                let bmax = bmax.to_i64()?;
                for b in 0..=bmax {
                    for b in [b, -b] {
                        let b = BigInt::from(b);
                        let disc = BigInt::from(4) * &n - &b * &b * &spread;
                        if disc.is_negative() {
                            continue;
                        }
                        let root = disc.sqrt();
                        if &root * &root != disc {
                            continue;
                        }
                        for num in [-&t * &b + &root, -&t * &b - &root] {
                            if !num.is_even() {
                                continue;
                            }
                            let x = RingElem::new(self.ring, num / 2, b.clone());
                            if self.contains(&x) {
                                return Some(x);
                            }
                        }
                    }
                }
                None
            }
        }
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.basis {
            Basis::Zero => write!(f, "(0)"),
            Basis::Int(g) => write!(f, "({g})"),
            Basis::Quad { p, q, r } => match self.principal_generator() {
                Some(x) => write!(f, "({x})"),
                None => {
                    let second = RingElem::new(self.ring, q.clone(), r.clone());
                    write!(f, "({p}, {second})")
                }
            },
        }
    }
}
