//! Fixed divisors `d(Z, g)`, `d(R, g)` and `d(M_n(R), f)`.
//!
//! The ring and matrix versions use stabilization: start from the ideal `J`
//! generated by a few values, then scan every residue class of `R/J` (or
//! every matrix with entries in `R/J`). Values depend only on the argument
//! modulo `J`, so if all classes give values in `J`, then `J` is the fixed
//! divisor. Any violating value enlarges `J` and the scan restarts; each
//! enlargement strictly lowers `N(J)`, so the loop terminates.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{Ideal, DEFAULT_RESIDUE_CAP};
use crate::matrix::MatR;
use crate::par;
use crate::poly::{MatrixPoly, ScalarPoly};
use crate::residue::{ResMat, ResidueRing};
use crate::ring::{Ring, RingElem};

/// Above this degree `fixdiv_int` switches from consecutive values to
/// modular stabilization.
pub const DENSE_CUTOFF: u64 = 4096;

/// Samples per deterministic chunk in sampled mode.
const SAMPLE_CHUNK: u64 = 256;

/// Coordinates of sampled matrix entries lie in `[-SAMPLE_RANGE, SAMPLE_RANGE]`.
const SAMPLE_RANGE: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixdivMode {
    Exact,
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    Certified,
    LowerBound,
}

/// A fixed divisor, or (in sampled mode) an ideal contained in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFixdiv {
    pub ideal: Ideal,
    pub certification: Certification,
}

impl MatrixFixdiv {
    pub fn is_certified(&self) -> bool {
        self.certification == Certification::Certified
    }
}

/// `d(Z, g) >= 0`; zero iff `g` is the zero polynomial.
pub fn fixdiv_int(g: &ScalarPoly) -> Result<BigInt> {
    fixdiv_int_with_cap(g, DEFAULT_RESIDUE_CAP)
}

pub fn fixdiv_int_with_cap(g: &ScalarPoly, cap: u64) -> Result<BigInt> {
    require_integers(g)?;
    match g.max_exp() {
        None => Ok(BigInt::zero()),
        Some(m) if m <= DENSE_CUTOFF => fixdiv_int_dense(g),
        Some(_) => fixdiv_int_sparse(g, cap),
    }
}

/// `gcd(g(0), ..., g(deg g))`. Every integer value of `g` is a
/// `Z`-combination of `deg g + 1` consecutive values (finite differences).
pub fn fixdiv_int_dense(g: &ScalarPoly) -> Result<BigInt> {
    require_integers(g)?;
    let deg = g.max_exp().unwrap_or(0);
    let ring = g.ring();
    let values = par::map_range(0..deg + 1, |a| g.eval(&RingElem::from_int(ring, a)).a().clone());
    Ok(values
        .iter()
        .fold(BigInt::zero(), |acc, v| num_integer::Integer::gcd(&acc, v)))
}

/// Stabilization over `Z` with modular fast powering.
pub fn fixdiv_int_sparse(g: &ScalarPoly, cap: u64) -> Result<BigInt> {
    require_integers(g)?;
    let ideal = fixdiv_ring_with_cap(g, cap)?;
    Ok(ideal.int_generator().cloned().unwrap_or_default())
}

fn require_integers(g: &ScalarPoly) -> Result<()> {
    if g.ring().is_integers() {
        Ok(())
    } else {
        Err(Error::RingMismatch("Z".into(), g.ring().to_string()))
    }
}

const EXTRA_SEED_POINTS: i64 = 16;

/// Small evaluation points used to seed `J`.
fn scalar_starters(ring: Ring) -> Vec<RingElem> {
    let mut pts: Vec<RingElem> = [0, 1, -1, 2, -2, 3]
        .iter()
        .map(|&a| RingElem::from_int(ring, a))
        .collect();
    if !ring.is_integers() {
        for (a, b) in [(0, 1), (1, 1), (0, -1), (1, -1), (2, 1)] {
            pts.push(RingElem::from_coords(ring, a, b));
        }
    }
    pts
}

/// A point that is not a root: larger in modulus than every root by the
/// Cauchy bound (nonzero algebraic integers here have modulus >= 1).
fn non_root_point(ring: Ring, coeff_norms: impl Iterator<Item = BigInt>) -> RingElem {
    let bound = coeff_norms.fold(BigInt::zero(), |m, x| m.max(x));
    RingElem::from_int(ring, bound + 2)
}

/// `d(R, g)` by stabilization.
pub fn fixdiv_ring(g: &ScalarPoly) -> Result<Ideal> {
    fixdiv_ring_with_cap(g, DEFAULT_RESIDUE_CAP)
}

pub fn fixdiv_ring_with_cap(g: &ScalarPoly, cap: u64) -> Result<Ideal> {
    let ring = g.ring();
    if g.is_zero() {
        return Ok(Ideal::zero(ring));
    }
    let mut values: Vec<RingElem> = scalar_starters(ring).iter().map(|x| g.eval(x)).collect();
    if values.iter().all(RingElem::is_zero) {
        // Walk further small integers; a root-rich g still leaves a small seed.
        let mut found = 0;
        for k in 4..4 + EXTRA_SEED_POINTS {
            for x in [k, 1 - k] {
                let v = g.eval(&RingElem::from_int(ring, x));
                if !v.is_zero() {
                    found += 1;
                }
                values.push(v);
            }
            if found >= 2 {
                break;
            }
        }
        if found == 0 {
            let t = non_root_point(ring, g.terms().iter().map(|(c, _)| c.norm()));
            values.push(g.eval(&t));
        }
    }
    let mut j = Ideal::from_generators(ring, &values);
    debug_assert!(!j.is_zero());
    loop {
        let count = match j.residue_count(cap) {
            Ok(c) => c,
            Err(_) => return Err(scan_cap(&j, j.norm()?, cap)),
        };
        let rr = match ResidueRing::new(&j) {
            Some(rr) => rr,
            None => return Err(scan_cap(&j, j.norm()?, cap)),
        };
        let terms: Vec<_> = g.terms().iter().map(|(c, e)| (rr.reduce(c), *e)).collect();
        let violation = par::find_map_any(0..count, |i| {
            let v = rr.eval(&terms, rr.residue_at(i));
            (v != rr.zero()).then(|| rr.lift(v))
        });
        match violation {
            None => return Ok(j),
            Some(v) => j = j.join_elems([&v]),
        }
    }
}

fn scan_cap(j: &Ideal, count: BigInt, cap: u64) -> Error {
    Error::ScanCap {
        count: count.to_string(),
        cap,
        partial: Box::new(j.clone()),
    }
}

/// Evaluation points for the matrix stabilization seed: small scalar
/// matrices, matrix units and their shifts by the identity.
fn matrix_starters(ring: Ring, n: usize) -> Vec<MatR> {
    let mut out: Vec<MatR> = scalar_starters(ring).iter().map(|c| MatR::scalar(c, n)).collect();
    let id = MatR::identity(ring, n);
    for i in 0..n {
        for j in 0..n {
            let e = MatR::unit(ring, n, i, j);
            out.push(&id + &e);
            out.push(e);
        }
    }
    out
}

/// `d(M_n(R), f)`: the ideal of `R` generated by all entries of all values.
pub fn fixdiv_matrix(f: &MatrixPoly, mode: FixdivMode, cap: u64) -> Result<MatrixFixdiv> {
    match mode {
        FixdivMode::Exact => fixdiv_matrix_exact(f, cap).map(|ideal| MatrixFixdiv {
            ideal,
            certification: Certification::Certified,
        }),
        FixdivMode::Sampled { count, seed } => Ok(MatrixFixdiv {
            ideal: fixdiv_matrix_sampled(f, count, seed),
            certification: Certification::LowerBound,
        }),
    }
}

/// Ideal generated by the entries of `f` at the fixed starter points. It is
/// always contained in the fixed divisor.
pub fn matrix_starter_ideal(f: &MatrixPoly) -> Ideal {
    let ring = f.ring();
    let mut j = Ideal::zero(ring);
    for c in matrix_starters(ring, f.n()) {
        let v = f.eval(&c).expect("matching shapes");
        j = j.join_elems(v.entries());
    }
    j
}

pub fn fixdiv_matrix_exact(f: &MatrixPoly, cap: u64) -> Result<Ideal> {
    let ring = f.ring();
    let n = f.n();
    if f.is_zero() {
        return Ok(Ideal::zero(ring));
    }
    let mut j = matrix_starter_ideal(f);
    if j.is_zero() {
        let norms = f
            .terms()
            .iter()
            .flat_map(|(a, _)| a.entries().iter().map(RingElem::norm));
        let t = non_root_point(ring, norms.collect::<Vec<_>>().into_iter());
        let v = f.eval(&MatR::scalar(&t, n))?;
        j = j.join_elems(v.entries());
    }
    debug_assert!(!j.is_zero());
    let cells = (n * n) as u32;
    loop {
        let norm = j.norm()?;
        let total = num_traits::pow(norm.clone(), cells as usize);
        let count = match total.to_u64() {
            Some(c) if c <= cap => c,
            _ => return Err(scan_cap(&j, total, cap)),
        };
        let rr = ResidueRing::new(&j).ok_or_else(|| scan_cap(&j, total.clone(), cap))?;
        let base = norm.to_u64().expect("norm within cap");
        let terms: Vec<(ResMat, u64)> = f.terms().iter().map(|(a, e)| (rr.reduce_matrix(a), *e)).collect();
        let violation = par::find_map_any(0..count, |idx| {
            let mut k = idx;
            let mut entries = Vec::with_capacity(n * n);
            for _ in 0..cells {
                entries.push(rr.residue_at(k % base));
                k /= base;
            }
            let c = ResMat { n, entries };
            let v = rr.mat_eval(&terms, &c);
            (!v.is_zero()).then(|| v.nonzero_entries().map(|x| rr.lift(x)).collect::<Vec<_>>())
        });
        match violation {
            None => return Ok(j),
            Some(vs) => j = j.join_elems(&vs),
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, ring: Ring, n: usize) -> MatR {
    let entries = (0..n * n)
        .map(|_| {
            let a = rng.random_range(-SAMPLE_RANGE..=SAMPLE_RANGE);
            if ring.is_integers() {
                RingElem::from_int(ring, a)
            } else {
                RingElem::from_coords(ring, a, rng.random_range(-SAMPLE_RANGE..=SAMPLE_RANGE))
            }
        })
        .collect();
    MatR::from_entries(ring, n, entries).expect("square")
}

/// Join of entry ideals of `f` at `count` seeded pseudorandom matrices.
/// Chunk `c` draws from ChaCha stream `c`, so the result depends only on
/// `(count, seed)`, not on scheduling.
pub fn fixdiv_matrix_sampled(f: &MatrixPoly, count: u64, seed: u64) -> Ideal {
    let ring = f.ring();
    let n = f.n();
    if f.is_zero() || count == 0 {
        return Ideal::zero(ring);
    }
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let partials = par::map_range(0..chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let size = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
        let mut j = Ideal::zero(ring);
        let mut rr: Option<(ResidueRing, Vec<(ResMat, u64)>)> = None;
        for _ in 0..size {
            let m = random_matrix(&mut rng, ring, n);
            match &rr {
                Some((res, terms)) => {
                    let v = res.mat_eval(terms, &res.reduce_matrix(&m));
                    if !v.is_zero() {
                        let lifted: Vec<RingElem> = v.nonzero_entries().map(|x| res.lift(x)).collect();
                        j = j.join_elems(&lifted);
                        rr = None;
                    }
                }
                None => {
                    let v = f.eval(&m).expect("matching shapes");
                    j = j.join_elems(v.entries());
                }
            }
            if rr.is_none() && !j.is_zero() {
                rr = ResidueRing::new(&j).map(|res| {
                    let terms = f
                        .terms()
                        .iter()
                        .map(|(a, e)| (res.reduce_matrix(a), *e))
                        .collect();
                    (res, terms)
                });
            }
        }
        j
    });
    partials.iter().fold(Ideal::zero(ring), |acc, j| acc.join(j))
}

/// `d(R, f)` for a matrix polynomial at scalar arguments: the ideal generated
/// by all entries of `f(cI)`, `c ∈ R`. Equals the join over positions of the
/// entry-polynomial fixed divisors.
pub fn fixdiv_scalar_points(f: &MatrixPoly, cap: u64) -> Result<Ideal> {
    let n = f.n();
    let mut j = Ideal::zero(f.ring());
    for p in 0..n {
        for q in 0..n {
            j = j.join(&fixdiv_ring_with_cap(&f.entry_poly(p, q)?, cap)?);
        }
    }
    Ok(j)
}

/// Certificate that `d` is maximal: for each prime power `p^e <= limit` with
/// `p^e ∤ d`, a witness `a ∈ [0, p^e)` with `p^e ∤ g(a)`. Returns the first
/// prime power lacking a witness, if any.
pub fn maximality_gap(g: &ScalarPoly, d: &BigInt, limit: u64) -> Option<u64> {
    let ring = g.ring();
    for p in 2..=limit {
        if !is_prime(p) {
            continue;
        }
        let mut pe = p;
        while pe <= limit {
            let pe_big = BigInt::from(pe);
            if !(d % &pe_big).is_zero() {
                let witness = (0..pe).any(|a| {
                    let v = g.eval(&RingElem::from_int(ring, a));
                    !(v.a() % &pe_big).is_zero()
                });
                if !witness {
                    return Some(pe);
                }
            }
            pe = match pe.checked_mul(p) {
                Some(x) => x,
                None => break,
            };
        }
    }
    None
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k))
}
