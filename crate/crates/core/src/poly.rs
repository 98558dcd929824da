//! Sparse polynomials `sum c_i x^{m_i}` with scalar or matrix coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::MatR;
use crate::parse;
use crate::ring::{Ring, RingElem};

/// Scalar sparse polynomial. Exponents are distinct and increasing and every
/// stored coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarPoly {
    ring: Ring,
    terms: Vec<(RingElem, u64)>,
}

impl ScalarPoly {
    /// Merges repeated exponents and drops zero coefficients.
    pub fn new(ring: Ring, terms: impl IntoIterator<Item = (RingElem, u64)>) -> Result<ScalarPoly> {
        let mut merged: BTreeMap<u64, RingElem> = BTreeMap::new();
        for (c, e) in terms {
            if c.ring() != ring {
                return Err(Error::RingMismatch(ring.to_string(), c.ring().to_string()));
            }
            let slot = merged.entry(e).or_insert_with(|| ring.zero());
            *slot = &*slot + &c;
        }
        Ok(ScalarPoly {
            ring,
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (c, e))
                .collect(),
        })
    }

    /// Integer polynomial from `(coeff, exp)` pairs.
    pub fn from_ints(ring: Ring, terms: &[(i64, u64)]) -> ScalarPoly {
        ScalarPoly::new(ring, terms.iter().map(|&(c, e)| (RingElem::from_int(ring, c), e)))
            .expect("single ring")
    }

    pub fn parse(ring: Ring, s: &str) -> Result<ScalarPoly> {
        Ok(ScalarPoly {
            ring,
            terms: parse::parse_poly(ring, s)?,
        })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &[(RingElem, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exp(&self) -> Option<u64> {
        self.terms.last().map(|(_, e)| *e)
    }

    pub fn eval(&self, x: &RingElem) -> RingElem {
        debug_assert_eq!(x.ring(), self.ring);
        self.terms
            .iter()
            .fold(self.ring.zero(), |acc, (c, e)| &acc + &(c * &x.pow(*e)))
    }

    pub fn checked_eval(&self, x: &RingElem) -> Result<RingElem> {
        if x.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), x.ring().to_string()));
        }
        Ok(self.eval(x))
    }
}

impl fmt::Display for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::format_poly(&self.terms))
    }
}

/// Sparse polynomial with `n x n` matrix coefficients, evaluated with the
/// coefficient on the left: `f(C) = sum A_i C^{m_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixPoly {
    ring: Ring,
    n: usize,
    terms: Vec<(MatR, u64)>,
}

impl MatrixPoly {
    pub fn new(ring: Ring, n: usize, terms: impl IntoIterator<Item = (MatR, u64)>) -> Result<MatrixPoly> {
        let mut merged: BTreeMap<u64, MatR> = BTreeMap::new();
        for (a, e) in terms {
            if a.ring() != ring {
                return Err(Error::RingMismatch(ring.to_string(), a.ring().to_string()));
            }
            if a.n() != n {
                return Err(Error::DimensionMismatch(n, a.n()));
            }
            let slot = merged.entry(e).or_insert_with(|| MatR::zero(ring, n));
            *slot = &*slot + &a;
        }
        Ok(MatrixPoly {
            ring,
            n,
            terms: merged
                .into_iter()
                .filter(|(_, a)| !a.is_zero())
                .map(|(e, a)| (a, e))
                .collect(),
        })
    }

    /// Coefficients `c_i * I`.
    pub fn from_scalar(g: &ScalarPoly, n: usize) -> MatrixPoly {
        MatrixPoly {
            ring: g.ring,
            n,
            terms: g.terms.iter().map(|(c, e)| (MatR::scalar(c, n), *e)).collect(),
        }
    }

    /// Pair coefficient matrices with an exponent tuple.
    pub fn from_tuple(coeffs: &[MatR], exps: &[u64]) -> Result<MatrixPoly> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Invalid("no coefficients".into()))?;
        if coeffs.len() != exps.len() {
            return Err(Error::Invalid(format!(
                "{} coefficients but {} exponents",
                coeffs.len(),
                exps.len()
            )));
        }
        MatrixPoly::new(
            first.ring(),
            first.n(),
            coeffs.iter().cloned().zip(exps.iter().copied()),
        )
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(MatR, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exp(&self) -> Option<u64> {
        self.terms.last().map(|(_, e)| *e)
    }

    pub fn eval(&self, c: &MatR) -> Result<MatR> {
        if c.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), c.ring().to_string()));
        }
        if c.n() != self.n {
            return Err(Error::DimensionMismatch(self.n, c.n()));
        }
        let mut acc = MatR::zero(self.ring, self.n);
        let mut power = MatR::identity(self.ring, self.n);
        let mut current = 0;
        for (a, e) in &self.terms {
            if *e > current {
                power = &power * &c.pow(e - current);
                current = *e;
            }
            acc = &acc + &(a * &power);
        }
        Ok(acc)
    }

    /// Scalar polynomial of `(p, q)` entries of the coefficients (0-based).
    pub fn entry_poly(&self, p: usize, q: usize) -> Result<ScalarPoly> {
        if p >= self.n || q >= self.n {
            return Err(Error::IndexOutOfRange(p, q, self.n));
        }
        ScalarPoly::new(
            self.ring,
            self.terms.iter().map(|(a, e)| (a.get(p, q).clone(), *e)),
        )
    }
}

impl fmt::Display for MatrixPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, e)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}*x^{e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_eval() {
        let g = ScalarPoly::parse(Ring::Integers, "x^2 - x").unwrap();
        assert_eq!(
            g.eval(&RingElem::from_int(Ring::Integers, 3)),
            RingElem::from_int(Ring::Integers, 6)
        );
    }

    #[test]
    fn matrix_eval_nilpotent() {
        let z = Ring::Integers;
        let f = MatrixPoly::from_scalar(&ScalarPoly::parse(z, "x^2 - x").unwrap(), 2);
        let c = MatR::from_ints(z, 2, &[0, 1, 0, 0]);
        assert_eq!(f.eval(&c).unwrap(), MatR::from_ints(z, 2, &[0, -1, 0, 0]));
        assert!(f.eval(&MatR::zero(z, 2)).unwrap().is_zero());
        assert!(matches!(
            f.eval(&MatR::zero(z, 3)),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn merging() {
        let z = Ring::Integers;
        let a = MatR::from_ints(z, 2, &[1, 2, 3, 4]);
        let f = MatrixPoly::new(z, 2, [(a.clone(), 2), (-&a, 2)]).unwrap();
        assert!(f.is_zero());
        let g = ScalarPoly::from_ints(z, &[(3, 4), (2, 1), (-3, 4)]);
        assert_eq!(g.terms(), &[(RingElem::from_int(z, 2), 1)]);
    }

    #[test]
    fn entry_polys() {
        let z = Ring::Integers;
        let f = MatrixPoly::new(
            z,
            2,
            [
                (MatR::from_ints(z, 2, &[1, 0, 0, 0]), 3),
                (MatR::from_ints(z, 2, &[-1, 2, 0, 0]), 1),
            ],
        )
        .unwrap();
        assert_eq!(
            f.entry_poly(0, 0).unwrap(),
            ScalarPoly::parse(z, "x^3 - x").unwrap()
        );
        assert_eq!(f.entry_poly(0, 1).unwrap(), ScalarPoly::parse(z, "2*x").unwrap());
        assert!(f.entry_poly(1, 1).unwrap().is_zero());
        assert!(matches!(f.entry_poly(2, 0), Err(Error::IndexOutOfRange(2, 0, 2))));
    }
}
