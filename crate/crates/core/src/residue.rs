//! Fixed-width arithmetic in `R/J` for ideals with small HNF entries.
//!
//! Scans evaluate polynomials at every residue class, so values are kept as
//! canonical `(a, b)` pairs with `0 <= a < p`, `0 <= b < r` in `i128`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::ideal::Ideal;
use crate::matrix::MatR;
use crate::ring::{Ring, RingElem};

/// HNF entries must stay below this for products to fit in `i128`.
const LIMB_BOUND: i128 = 1 << 40;

pub type Res = (i128, i128);

#[derive(Clone, Debug)]
pub struct ResidueRing {
    ring: Ring,
    p: i128,
    q: i128,
    r: i128,
    t: i128,
    s: i128,
}

impl ResidueRing {
    /// `None` for the zero ideal or when the HNF entries are too large.
    pub fn new(ideal: &Ideal) -> Option<ResidueRing> {
        let ring = ideal.ring();
        let (t, s) = ring.omega_relation();
        let (p, q, r) = match ideal.hnf() {
            Some((p, q, r)) => (p.to_i128()?, q.to_i128()?, r.to_i128()?),
            None => (ideal.int_generator()?.to_i128()?, 0, 1),
        };
        if p >= LIMB_BOUND || r >= LIMB_BOUND {
            return None;
        }
        Some(ResidueRing {
            ring,
            p,
            q,
            r,
            t: t as i128,
            s: s as i128,
        })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    #[inline]
    fn normalize(&self, a: i128, b: i128) -> Res {
        let k = b.div_euclid(self.r);
        let b = b - k * self.r;
        let a = (a - k * self.q).rem_euclid(self.p);
        (a, b)
    }

    pub fn reduce(&self, x: &RingElem) -> Res {
        if let (Some(a), Some(b)) = (x.a().to_i64(), x.b().to_i64()) {
            return self.normalize(a as i128, b as i128);
        }
        let (k, b) = x.b().div_mod_floor(&BigInt::from(self.r));
        let a = (x.a() - k * BigInt::from(self.q)).mod_floor(&BigInt::from(self.p));
        (a.to_i128().expect("reduced"), b.to_i128().expect("reduced"))
    }

    pub fn lift(&self, x: Res) -> RingElem {
        if self.ring.is_integers() {
            RingElem::from_int(self.ring, x.0)
        } else {
            RingElem::new(self.ring, x.0.into(), x.1.into())
        }
    }

    #[inline]
    pub fn zero(&self) -> Res {
        (0, 0)
    }

    #[inline]
    pub fn one(&self) -> Res {
        self.normalize(1, 0)
    }

    #[inline]
    pub fn add(&self, x: Res, y: Res) -> Res {
        self.normalize(x.0 + y.0, x.1 + y.1)
    }

    #[inline]
    pub fn sub(&self, x: Res, y: Res) -> Res {
        self.normalize(x.0 - y.0, x.1 - y.1)
    }

    #[inline]
    pub fn mul(&self, x: Res, y: Res) -> Res {
        let bb = x.1 * y.1;
        self.normalize(x.0 * y.0 + self.s * bb, x.0 * y.1 + x.1 * y.0 + self.t * bb)
    }

    pub fn pow(&self, x: Res, mut e: u64) -> Res {
        let mut acc = self.one();
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// `sum c_i x^{e_i}` for pre-reduced coefficients.
    pub fn eval(&self, terms: &[(Res, u64)], x: Res) -> Res {
        terms.iter().fold(self.zero(), |acc, &(c, e)| {
            self.add(acc, self.mul(c, self.pow(x, e)))
        })
    }

    pub fn reduce_matrix(&self, m: &MatR) -> ResMat {
        ResMat {
            n: m.n(),
            entries: m.entries().iter().map(|x| self.reduce(x)).collect(),
        }
    }

    pub fn mat_identity(&self, n: usize) -> ResMat {
        let mut m = ResMat {
            n,
            entries: vec![self.zero(); n * n],
        };
        for i in 0..n {
            m.entries[i * n + i] = self.one();
        }
        m
    }

    pub fn mat_mul(&self, x: &ResMat, y: &ResMat) -> ResMat {
        let n = x.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.zero();
                for l in 0..n {
                    acc = self.add(acc, self.mul(x.entries[i * n + l], y.entries[l * n + j]));
                }
                entries.push(acc);
            }
        }
        ResMat { n, entries }
    }

    pub fn mat_add_assign(&self, x: &mut ResMat, y: &ResMat) {
        for (a, b) in x.entries.iter_mut().zip(&y.entries) {
            *a = self.add(*a, *b);
        }
    }

    pub fn mat_pow(&self, x: &ResMat, mut e: u64) -> ResMat {
        let mut acc = self.mat_identity(x.n);
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mat_mul(&base, &base);
            }
        }
        acc
    }

    /// `sum A_i C^{e_i}` with coefficients on the left.
    pub fn mat_eval(&self, terms: &[(ResMat, u64)], c: &ResMat) -> ResMat {
        let n = c.n;
        let mut acc = ResMat {
            n,
            entries: vec![self.zero(); n * n],
        };
        // Exponents are sorted, so powers can be built incrementally.
        let mut power = self.mat_identity(n);
        let mut current = 0u64;
        for (a, e) in terms {
            if *e > current {
                power = self.mat_mul(&power, &self.mat_pow(c, e - current));
                current = *e;
            }
            let term = self.mat_mul(a, &power);
            self.mat_add_assign(&mut acc, &term);
        }
        acc
    }

    /// Residue with canonical index `i` (same order as `Ideal::residue_at`).
    pub fn residue_at(&self, i: u64) -> Res {
        let i = i as i128;
        (i % self.p, i / self.p)
    }

    pub fn count(&self) -> u128 {
        (self.p * self.r) as u128
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResMat {
    pub n: usize,
    pub entries: Vec<Res>,
}

impl ResMat {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&(a, b)| a == 0 && b == 0)
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = Res> + '_ {
        self.entries.iter().copied().filter(|&(a, b)| a != 0 || b != 0)
    }
}
