//! Dense `n x n` matrices over `R`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ring::{Ring, RingElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatR {
    n: usize,
    ring: Ring,
    entries: Vec<RingElem>,
}

/// Location of the spectrum of `B*B` relative to the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SpectralClass {
    Singular,
    AllAboveOne,
    AllBelowOne,
    Boundary,
    Mixed,
}

impl SpectralClass {
    /// Uniformly separated from 1, as the growth estimate needs.
    pub fn is_admissible(self) -> bool {
        matches!(self, SpectralClass::AllAboveOne | SpectralClass::AllBelowOne)
    }
}

impl fmt::Display for SpectralClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl MatR {
    pub fn from_entries(ring: Ring, n: usize, entries: Vec<RingElem>) -> Result<MatR> {
        if n == 0 {
            return Err(Error::Invalid("matrix dimension must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Invalid(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.ring() != ring) {
            return Err(Error::RingMismatch(ring.to_string(), e.ring().to_string()));
        }
        Ok(MatR { n, ring, entries })
    }

    pub fn from_rows(ring: Ring, rows: Vec<Vec<RingElem>>) -> Result<MatR> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix rows must form a square".into()));
        }
        MatR::from_entries(ring, n, rows.into_iter().flatten().collect())
    }

    /// Integer matrix from row-major `i64` data.
    pub fn from_ints(ring: Ring, n: usize, data: &[i64]) -> MatR {
        let entries = data.iter().map(|&v| RingElem::from_int(ring, v)).collect();
        MatR::from_entries(ring, n, entries).expect("square integer data")
    }

    pub fn zero(ring: Ring, n: usize) -> MatR {
        MatR {
            n,
            ring,
            entries: vec![ring.zero(); n * n],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> MatR {
        MatR::scalar(&ring.one(), n)
    }

    pub fn scalar(c: &RingElem, n: usize) -> MatR {
        let mut m = MatR::zero(c.ring(), n);
        for i in 0..n {
            m.entries[i * n + i] = c.clone();
        }
        m
    }

    /// Matrix unit with a one at `(i, j)`.
    pub fn unit(ring: Ring, n: usize, i: usize, j: usize) -> MatR {
        let mut m = MatR::zero(ring, n);
        m.entries[i * n + j] = ring.one();
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[RingElem]> {
        self.entries.chunks(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElem::is_zero)
    }

    fn check(&self, other: &MatR) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MatR) -> Result<MatR> {
        self.check(other)?;
        Ok(self.zip(other, |x, y| x + y))
    }

    pub fn checked_sub(&self, other: &MatR) -> Result<MatR> {
        self.check(other)?;
        Ok(self.zip(other, |x, y| x - y))
    }

    pub fn checked_mul(&self, other: &MatR) -> Result<MatR> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn zip(&self, other: &MatR, f: impl Fn(&RingElem, &RingElem) -> RingElem) -> MatR {
        MatR {
            n: self.n,
            ring: self.ring,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| f(x, y))
                .collect(),
        }
    }

    fn mul_unchecked(&self, other: &MatR) -> MatR {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.ring.zero();
                for l in 0..n {
                    let x = self.get(i, l);
                    if x.is_zero() {
                        continue;
                    }
                    acc = &acc + &(x * other.get(l, j));
                }
                entries.push(acc);
            }
        }
        MatR {
            n,
            ring: self.ring,
            entries,
        }
    }

    pub fn scale(&self, c: &RingElem) -> MatR {
        MatR {
            n: self.n,
            ring: self.ring,
            entries: self.entries.iter().map(|x| c * x).collect(),
        }
    }

    /// Square-and-multiply power; `X^0` is the identity.
    pub fn pow(&self, mut e: u64) -> MatR {
        let mut acc = MatR::identity(self.ring, self.n);
        let mut base = self.clone();
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

    pub fn transpose(&self) -> MatR {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        MatR {
            n,
            ring: self.ring,
            entries,
        }
    }

    /// Entrywise conjugation `sigma(M)`.
    pub fn conjugate(&self) -> MatR {
        MatR {
            n: self.n,
            ring: self.ring,
            entries: self.entries.iter().map(RingElem::conjugate).collect(),
        }
    }

    /// `M*`: entry `(i, j)` is `conj(M[j][i])`.
    pub fn conj_transpose(&self) -> MatR {
        self.transpose().conjugate()
    }

    /// Exact `||M||^2 = sum |m_ij|^2`.
    pub fn frob_norm_sq(&self) -> BigInt {
        self.entries
            .iter()
            .map(|x| match x.ring() {
                // elem_norm over Z is |a|; the squared modulus is a^2.
                Ring::Integers => x.a() * x.a(),
                _ => x.norm(),
            })
            .sum()
    }

    /// Ideal generated by all entries.
    pub fn entry_ideal(&self) -> Ideal {
        Ideal::from_generators(self.ring, &self.entries)
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> MatR {
        let entries = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        MatR {
            n: k,
            ring: self.ring,
            entries,
        }
    }

    /// Determinant: cofactor expansion for `n <= 3`, Bareiss elimination
    /// otherwise.
    pub fn det(&self) -> RingElem {
        if self.n <= 3 {
            self.det_cofactor()
        } else {
            self.det_bareiss()
        }
    }

    pub fn det_cofactor(&self) -> RingElem {
        let idx: Vec<usize> = (0..self.n).collect();
        self.cofactor_rec(0, &idx)
    }

    fn cofactor_rec(&self, row: usize, cols: &[usize]) -> RingElem {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = self.ring.zero();
        for (k, &c) in cols.iter().enumerate() {
            let x = self.get(row, c);
            if x.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&cc| cc != c).collect();
            let term = x * &self.cofactor_rec(row + 1, &rest);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// Fraction-free Gaussian elimination; every division is exact in `R`.
    pub fn det_bareiss(&self) -> RingElem {
        let n = self.n;
        let mut m: Vec<Vec<RingElem>> = self.rows().map(|r| r.to_vec()).collect();
        let mut prev = self.ring.one();
        let mut negate = false;
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        negate = !negate;
                    }
                    None => return self.ring.zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    /// Leading principal minors `det(M_1), ..., det(M_n)`.
    pub fn leading_minors(&self) -> Vec<RingElem> {
        (1..=self.n).map(|k| self.leading(k).det()).collect()
    }

    /// Exact classification of the eigenvalues of `B*B` against 1, by
    /// Sylvester's criterion on `B*B - I` and `I - B*B`.
    pub fn spectral_class(&self) -> SpectralClass {
        if self.det().is_zero() {
            return SpectralClass::Singular;
        }
        let h = &self.conj_transpose() * self;
        let id = MatR::identity(self.ring, self.n);
        let above = &h - &id;
        let below = &id - &h;
        if is_positive_definite(&above) {
            SpectralClass::AllAboveOne
        } else if is_positive_definite(&below) {
            SpectralClass::AllBelowOne
        } else if above.det().is_zero() {
            SpectralClass::Boundary
        } else {
            SpectralClass::Mixed
        }
    }
}

/// Sylvester's criterion for a Hermitian matrix over `R`; its leading
/// minors are rational integers.
fn is_positive_definite(h: &MatR) -> bool {
    h.leading_minors().iter().all(|m| {
        debug_assert!(m.b().is_zero(), "Hermitian minor {m} is not rational");
        m.b().is_zero() && m.a().is_positive()
    })
}

/// Smallest integer `s` with `s^2 >= x`, for `x >= 0`.
pub fn isqrt_ceil(x: &BigInt) -> BigInt {
    let s = x.sqrt();
    if &s * &s == *x {
        s
    } else {
        s + BigInt::one()
    }
}

impl Add for &MatR {
    type Output = MatR;
    fn add(self, rhs: &MatR) -> MatR {
        self.checked_add(rhs).expect("matrix add")
    }
}

impl Sub for &MatR {
    type Output = MatR;
    fn sub(self, rhs: &MatR) -> MatR {
        self.checked_sub(rhs).expect("matrix sub")
    }
}

impl Mul for &MatR {
    type Output = MatR;
    fn mul(self, rhs: &MatR) -> MatR {
        self.checked_mul(rhs).expect("matrix mul")
    }
}

impl Neg for &MatR {
    type Output = MatR;
    fn neg(self) -> MatR {
        MatR {
            n: self.n,
            ring: self.ring,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for MatR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
