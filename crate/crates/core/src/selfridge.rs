//! Scalar pair searches over `Z`: `(b^m - b^n) | x^m - x^n` for all `x`,
//! and the weaker `(2^m - 2^n) | (3^m - 3^n)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixdiv::fixdiv_int;
use crate::par;
use crate::poly::ScalarPoly;
use crate::ring::Ring;

/// One pair with its certificate `modulus * quotient = fixdiv`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub m: u64,
    pub n: u64,
    #[serde(serialize_with = "crate::io::ser_bigint")]
    pub modulus: BigInt,
    #[serde(serialize_with = "crate::io::ser_bigint")]
    pub fixdiv: BigInt,
    #[serde(serialize_with = "crate::io::ser_bigint")]
    pub quotient: BigInt,
}

impl PairWitness {
    pub fn verify(&self) -> bool {
        &self.modulus * &self.quotient == self.fixdiv
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub kind: &'static str,
    pub base: i64,
    /// Largest `m` searched. Nothing is claimed beyond it.
    pub window: u64,
    pub pairs: Vec<PairWitness>,
}

impl PairReport {
    pub fn pair_list(&self) -> Vec<(u64, u64)> {
        self.pairs.iter().map(|w| (w.m, w.n)).collect()
    }
}

fn binomial(m: u64, n: u64) -> ScalarPoly {
    ScalarPoly::from_ints(Ring::Integers, &[(1, m), (-1, n)])
}

fn modulus(b: i64, m: u64, n: u64) -> BigInt {
    let b = BigInt::from(b);
    num_traits::pow(b.clone(), m as usize) - num_traits::pow(b, n as usize)
}

fn witness(b: i64, m: u64, n: u64) -> Result<Option<PairWitness>> {
    let modulus = modulus(b, m, n);
    if modulus.is_zero() {
        return Err(Error::DegenerateModulus);
    }
    let fixdiv = fixdiv_int(&binomial(m, n))?;
    let (quotient, rem) = fixdiv.div_rem(&modulus);
    Ok(rem.is_zero().then_some(PairWitness {
        m,
        n,
        modulus,
        fixdiv,
        quotient,
    }))
}

fn check_pair(m: u64, n: u64) -> Result<()> {
    if m <= n {
        return Err(Error::Invalid(format!("need m > n, got ({m}, {n})")));
    }
    Ok(())
}

/// `(b^m - b^n) | d(Z, x^m - x^n)`, which holds iff `(b^m - b^n) | x^m - x^n`
/// for every integer `x`.
pub fn divides_fixdiv(b: i64, m: u64, n: u64) -> Result<bool> {
    check_pair(m, n)?;
    if modulus(b, m, n).is_zero() {
        return Err(Error::DegenerateModulus);
    }
    if b.abs() < 2 {
        return Err(Error::Invalid(format!("base must satisfy |b| >= 2, got {b}")));
    }
    Ok(witness(b, m, n)?.is_some())
}

/// Pairs `m > n >= 0`, `m <= max_m`, solving the problem for base `b`.
/// Candidates must first divide `gcd(f(2), f(3))`, which every value of the
/// fixed divisor does.
pub fn base_b_pairs(b: i64, max_m: u64) -> Result<PairReport> {
    if b.abs() < 2 {
        return Err(Error::Invalid(format!("base must satisfy |b| >= 2, got {b}")));
    }
    let per_m = par::map_range(1..max_m + 1, |m| -> Result<Vec<PairWitness>> {
        let mut found = Vec::new();
        for n in (0..m).rev() {
            let md = modulus(b, m, n);
            if md.is_zero() {
                continue;
            }
            let f2 = modulus(2, m, n);
            let f3 = modulus(3, m, n);
            if !(f2.gcd(&f3) % &md).is_zero() {
                continue;
            }
            if let Some(w) = witness(b, m, n)? {
                found.push(w);
            }
        }
        Ok(found)
    });
    let mut pairs = Vec::new();
    for r in per_m {
        pairs.extend(r?);
    }
    Ok(PairReport {
        kind: "base",
        base: b,
        window: max_m,
        pairs,
    })
}

/// The base-2 search.
pub fn selfridge_pairs(max_m: u64) -> Result<PairReport> {
    let mut report = base_b_pairs(2, max_m)?;
    report.kind = "selfridge";
    Ok(report)
}

/// Pairs `m > n > 0`, `m <= max_m`, with `(2^m - 2^n) | (3^m - 3^n)`. The
/// witness stores `3^m - 3^n` in place of the fixed divisor.
pub fn ruderman_pairs(max_m: u64) -> PairReport {
    let per_m = par::map_range(2..max_m + 1, |m| {
        (1..m)
            .rev()
            .filter_map(|n| {
                let md = modulus(2, m, n);
                let value = modulus(3, m, n);
                let (quotient, rem) = value.div_rem(&md);
                rem.is_zero().then_some(PairWitness {
                    m,
                    n,
                    modulus: md,
                    fixdiv: value,
                    quotient,
                })
            })
            .collect::<Vec<_>>()
    });
    PairReport {
        kind: "ruderman",
        base: 2,
        window: max_m,
        pairs: per_m.into_iter().flatten().collect(),
    }
}
