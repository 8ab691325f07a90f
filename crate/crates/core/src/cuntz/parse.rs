//! Parser for Cuntz expressions.
//!
//! ```text
//! expr  := ['-'] term (('+' | '-') term)*
//! term  := coeff ['*' word] | word
//! word  := atom ('*' atom)*
//! atom  := ('S0' | 'T0' | 'T1' | 'T2') ['^']        '^' is the adjoint
//! coeff := num ['i'] | 'i' | '(' num ('+' | '-') num 'i' ')'
//! ```

use thiserror::Error;

use super::{CuntzExpr, CuntzWord, Gen};
use crate::scalar::Cx;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("Cuntz expression parse error at {pos}: {message}")]
pub struct CuntzParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub gen: Gen,
    pub adjoint: bool,
}

/// Parsed but unreduced expression: coefficients times atom sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct RawExpr {
    pub terms: Vec<(Cx, Vec<Atom>)>,
}

impl RawExpr {
    pub fn parse(src: &str) -> Result<Self, CuntzParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let terms = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected input"));
        }
        Ok(RawExpr { terms })
    }

    /// Reverses every word, flips adjoints and conjugates coefficients.
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, w)| (c.conj(), w.iter().rev().map(|a| Atom { gen: a.gen, adjoint: !a.adjoint }).collect()))
            .collect();
        RawExpr { terms }
    }

    pub fn scale(&self, c: Cx) -> Self {
        RawExpr { terms: self.terms.iter().map(|(k, w)| (k * c, w.clone())).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        RawExpr { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    /// Formal product, term by term.
    pub fn product(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for (c1, w1) in &self.terms {
            for (c2, w2) in &other.terms {
                terms.push((c1 * c2, w1.iter().chain(w2).copied().collect()));
            }
        }
        RawExpr { terms }
    }

    pub fn normalize(&self) -> CuntzExpr {
        let mut out = CuntzExpr::zero();
        'terms: for (c, atoms) in &self.terms {
            let mut w = CuntzWord::one();
            for a in atoms {
                let aw = if a.adjoint {
                    CuntzWord::new(vec![], vec![a.gen])
                } else {
                    CuntzWord::new(vec![a.gen], vec![])
                };
                match w.mul(&aw) {
                    Some(next) => w = next,
                    None => continue 'terms,
                }
            }
            out.add_term(w, *c);
        }
        out
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> CuntzParseError {
        CuntzParseError { pos: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Vec<(Cx, Vec<Atom>)>, CuntzParseError> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(b'-') { -1.0 } else { 1.0 };
        loop {
            let (c, w) = self.term()?;
            terms.push((c * sign, w));
            sign = match self.peek() {
                Some(b'+') => 1.0,
                Some(b'-') => -1.0,
                _ => return Ok(terms),
            };
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Cx, Vec<Atom>), CuntzParseError> {
        match self.peek() {
            Some(b'S' | b'T') => Ok((Cx::new(1.0, 0.0), self.word()?)),
            Some(c) if c.is_ascii_digit() || c == b'.' || c == b'(' || c == b'i' => {
                let coeff = self.coeff()?;
                if self.eat(b'*') {
                    Ok((coeff, self.word()?))
                } else {
                    Ok((coeff, Vec::new()))
                }
            }
            Some(_) => Err(self.error("expected a coefficient or a generator S0, T0, T1, T2")),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn word(&mut self) -> Result<Vec<Atom>, CuntzParseError> {
        let mut atoms = vec![self.atom()?];
        while self.eat(b'*') {
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<Atom, CuntzParseError> {
        self.skip_ws();
        let gen = match (self.src.get(self.pos), self.src.get(self.pos + 1)) {
            (Some(b'S'), Some(b'0')) => Gen::S0,
            (Some(b'T'), Some(&d @ b'0'..=b'2')) => Gen::T(d - b'0'),
            (None, _) => return Err(self.error("expected a generator after '*'")),
            _ => return Err(self.error("expected a generator S0, T0, T1 or T2")),
        };
        self.pos += 2;
        if self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
            return Err(self.error("unknown generator"));
        }
        let adjoint = self.eat(b'^');
        Ok(Atom { gen, adjoint })
    }

    fn number(&mut self) -> Result<f64, CuntzParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.src.get(p.pos).is_some_and(u8::is_ascii_digit) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            digits(self);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| CuntzParseError { pos: start, message: format!("bad number '{text}'") })
    }

    fn coeff(&mut self) -> Result<Cx, CuntzParseError> {
        if self.eat(b'(') {
            let neg_re = self.eat(b'-');
            let re = self.number()?;
            let re = if neg_re { -re } else { re };
            let sign = match self.peek() {
                Some(b'+') => 1.0,
                Some(b'-') => -1.0,
                _ => return Err(self.error("expected '+' or '-' inside a complex coefficient")),
            };
            self.pos += 1;
            let im = if self.peek() == Some(b'i') { 1.0 } else { self.number()? };
            if !self.eat(b'i') {
                return Err(self.error("expected 'i'"));
            }
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Cx::new(re, sign * im));
        }
        if self.eat(b'i') {
            return Ok(Cx::new(0.0, 1.0));
        }
        let x = self.number()?;
        if self.src.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            Ok(Cx::new(0.0, x))
        } else {
            Ok(Cx::new(x, 0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let r = RawExpr::parse("S0^*S0").unwrap();
        assert_eq!(r.terms.len(), 1);
        assert_eq!(r.terms[0].1.len(), 2);
        assert!(r.terms[0].1[0].adjoint && !r.terms[0].1[1].adjoint);
        let r = RawExpr::parse("0.5*T0*T1^ + T2").unwrap();
        assert_eq!(r.terms.len(), 2);
        assert_eq!(r.terms[0].0, Cx::new(0.5, 0.0));
        let r = RawExpr::parse("-2i*T0 + (1.5-2i) - i*S0 + 1e-3").unwrap();
        assert_eq!(r.terms[0].0, Cx::new(0.0, -2.0));
        assert_eq!(r.terms[1].0, Cx::new(1.5, -2.0));
        assert_eq!(r.terms[2].0, Cx::new(0.0, -1.0));
        assert_eq!(r.terms[3].0, Cx::new(1e-3, 0.0));
    }

    #[test]
    fn error_positions() {
        let e = RawExpr::parse("T0*").unwrap_err();
        assert_eq!(e.pos, 3);
        let e = RawExpr::parse("T0 + T3").unwrap_err();
        assert_eq!(e.pos, 5);
        assert!(RawExpr::parse("T01").is_err());
        assert!(RawExpr::parse("(1+2)").is_err());
        assert!(RawExpr::parse("").is_err());
    }
}
