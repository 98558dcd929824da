//! Mini-grammar for ring elements and sparse polynomials.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' INT]
//! atom   := INT | 'w' | 'x' | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. Ring elements are expressions without `x`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem};

/// Parenthesised powers of non-monomials beyond this are rejected.
const MAX_GROUP_POWER: u64 = 64;

type Sparse = BTreeMap<u64, RingElem>;

pub fn parse_elem(ring: Ring, s: &str) -> Result<RingElem> {
    let p = parse_sparse(ring, s)?;
    if let Some((&e, _)) = p.iter().find(|(&e, _)| e > 0) {
        return Err(Error::parse(1, format!("ring element contains x^{e}")));
    }
    Ok(p.get(&0).cloned().unwrap_or_else(|| ring.zero()))
}

/// Terms `(coeff, exp)` with nonzero coefficients, exponents increasing.
pub fn parse_poly(ring: Ring, s: &str) -> Result<Vec<(RingElem, u64)>> {
    Ok(parse_sparse(ring, s)?.into_iter().map(|(e, c)| (c, e)).collect())
}

fn parse_sparse(ring: Ring, s: &str) -> Result<Sparse> {
    let tokens = tokenize(s)?;
    let mut p = Parser {
        ring,
        tokens,
        pos: 0,
        len: s.len(),
    };
    let out = p.expr()?;
    if let Some((col, tok)) = p.tokens.get(p.pos) {
        return Err(Error::parse(*col, format!("unexpected {tok}")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    W,
    X,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::W => write!(f, "'w'"),
            Tok::X => write!(f, "'x'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
        }
    }
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            c if c.is_whitespace() => {}
            '0'..='9' => {
                let start = i;
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = s[start..=i].parse().expect("digits");
                out.push((col, Tok::Int(n)));
            }
            'w' => out.push((col, Tok::W)),
            'x' => out.push((col, Tok::X)),
            '+' => out.push((col, Tok::Plus)),
            '-' => out.push((col, Tok::Minus)),
            '*' => out.push((col, Tok::Star)),
            '^' => out.push((col, Tok::Caret)),
            '(' => out.push((col, Tok::LParen)),
            ')' => out.push((col, Tok::RParen)),
            other => return Err(Error::parse(col, format!("unexpected character {other:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    ring: Ring,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map(|(c, _)| *c).unwrap_or(self.len + 1)
    }

    fn expr(&mut self) -> Result<Sparse> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => self.pos += 1,
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            _ => {}
        }
        let mut acc = Sparse::new();
        let first = self.term()?;
        add_into(&mut acc, first, negate);
        loop {
            let neg = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => break,
            };
            self.pos += 1;
            let t = self.term()?;
            add_into(&mut acc, t, neg);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Sparse> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let f = self.factor()?;
            acc = mul(&acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Sparse> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let col = self.col();
        let e = match self.tokens.get(self.pos) {
            Some((_, Tok::Int(n))) => n
                .to_u64()
                .ok_or_else(|| Error::parse(col, "exponent out of range"))?,
            _ => return Err(Error::parse(col, "expected exponent")),
        };
        self.pos += 1;
        if base.len() == 1 {
            let (&k, c) = base.iter().next().unwrap();
            let exp = k
                .checked_mul(e)
                .ok_or_else(|| Error::parse(col, "exponent overflow"))?;
            return Ok(Sparse::from([(exp, c.pow(e))]));
        }
        if base.is_empty() {
            let mut out = Sparse::new();
            if e == 0 {
                out.insert(0, self.ring.one());
            }
            return Ok(out);
        }
        if e > MAX_GROUP_POWER {
            return Err(Error::parse(
                col,
                format!("power of a sum limited to {MAX_GROUP_POWER}"),
            ));
        }
        let mut acc = Sparse::from([(0, self.ring.one())]);
        for _ in 0..e {
            acc = mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Sparse> {
        let col = self.col();
        let tok = self
            .tokens
            .get(self.pos)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| Error::parse(col, "unexpected end of input"))?;
        self.pos += 1;
        let ring = self.ring;
        let mono = |c: RingElem, e: u64| {
            let mut m = Sparse::new();
            if !c.is_zero() {
                m.insert(e, c);
            }
            m
        };
        match tok {
            Tok::Int(n) => Ok(mono(RingElem::from_int(ring, n), 0)),
            Tok::W => Ok(mono(
                ring.omega().map_err(|e| Error::parse(col, e.to_string()))?,
                0,
            )),
            Tok::X => Ok(mono(ring.one(), 1)),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(Error::parse(self.col(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(Error::parse(col, format!("unexpected {other}"))),
        }
    }
}

fn add_into(acc: &mut Sparse, p: Sparse, negate: bool) {
    for (e, c) in p {
        let c = if negate { -c } else { c };
        let sum = match acc.remove(&e) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            acc.insert(e, sum);
        }
    }
}

fn mul(x: &Sparse, y: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ex, cx) in x {
        for (ey, cy) in y {
            let term = Sparse::from([(ex + ey, cx * cy)]);
            add_into(&mut out, term, false);
        }
    }
    out
}

/// Render terms in the same grammar, highest exponent first.
pub fn format_poly(terms: &[(RingElem, u64)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (c, e)) in terms.iter().rev().enumerate() {
        let needs_parens = !c.a().is_zero() && !c.b().is_zero();
        let negative = !needs_parens && (c.a() < &BigInt::zero() || c.b() < &BigInt::zero());
        let body = if needs_parens {
            format!("({c})")
        } else if negative {
            (-c).to_string()
        } else {
            c.to_string()
        };
        let sep = match (i, negative) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        };
        out.push_str(sep);
        let unit = body == "1";
        match (*e, unit) {
            (0, _) => out.push_str(&body),
            (1, true) => out.push('x'),
            (1, false) => out.push_str(&format!("{body}*x")),
            (e, true) => out.push_str(&format!("x^{e}")),
            (e, false) => out.push_str(&format!("{body}*x^{e}")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial() {
        let t = parse_poly(Ring::Integers, "x^5 - x").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0], (RingElem::from_int(Ring::Integers, -1), 1));
        assert_eq!(t[1], (Ring::Integers.one(), 5));
    }

    #[test]
    fn merges_and_drops() {
        let t = parse_poly(Ring::Integers, "3*x^2 + x - 3*x^2").unwrap();
        assert_eq!(t, vec![(Ring::Integers.one(), 1)]);
        assert!(parse_poly(Ring::Integers, "x^2-x^2").unwrap().is_empty());
    }

    #[test]
    fn elements() {
        let zi = Ring::gaussian();
        assert_eq!(parse_elem(zi, "1+1*w").unwrap(), RingElem::from_coords(zi, 1, 1));
        assert_eq!(parse_elem(zi, " -w ").unwrap(), RingElem::from_coords(zi, 0, -1));
        assert_eq!(parse_elem(zi, "3-2*w").unwrap(), RingElem::from_coords(zi, 3, -2));
        assert!(parse_elem(Ring::Integers, "w").is_err());
        assert!(parse_elem(zi, "x").is_err());
    }

    #[test]
    fn ring_coefficients() {
        let zi = Ring::gaussian();
        let t = parse_poly(zi, "(1+w)*x^2 + 2*w*x").unwrap();
        assert_eq!(t[0], (RingElem::from_coords(zi, 0, 2), 1));
        assert_eq!(t[1], (RingElem::from_coords(zi, 1, 1), 2));
    }

    #[test]
    fn error_columns() {
        match parse_poly(Ring::Integers, "x^2 - $x") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 7),
            other => panic!("{other:?}"),
        }
        match parse_poly(Ring::Integers, "x^") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn format_round_trip() {
        let zi = Ring::gaussian();
        for s in ["x^5 - x", "-x^3 + 2*x - 7", "(1+w)*x^2 - w*x + 3", "0", "x"] {
            let t = parse_poly(zi, s).unwrap();
            assert_eq!(parse_poly(zi, &format_poly(&t)).unwrap(), t, "{s}");
        }
        assert_eq!(
            format_poly(&parse_poly(Ring::Integers, "x^5 - x").unwrap()),
            "x^5 - x"
        );
    }
}
