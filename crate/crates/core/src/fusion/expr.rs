//! Formal sector expressions: nonnegative integer combinations of words of labels.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := product ('+' product)*
//! product := factor ('*' factor)*
//! factor  := INT | LABEL | '(' expr ')'
//! LABEL   := [A-Za-z_][A-Za-z0-9_']*
//! ```
//!
//! Integers act as scalars, so `1` is the unit and `2*r` is twice `r`.
//! Parenthesised sums are distributed in order (words do not commute).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sector expression parse error at {pos}: {message}")]
pub struct ExprParseError {
    pub pos: usize,
    pub message: String,
}

/// One term `coeff · w₁w₂…wₙ`; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: u64,
    pub word: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SectorExpr {
    terms: Vec<Term>,
}

pub fn is_label_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl SectorExpr {
    /// Builds an expression, merging repeated words and dropping zero terms.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, Vec<String>)>,
    {
        let mut out: Vec<Term> = Vec::new();
        for (coeff, word) in terms {
            if coeff == 0 {
                continue;
            }
            match out.iter_mut().find(|t| t.word == word) {
                Some(t) => t.coeff += coeff,
                None => out.push(Term { coeff, word }),
            }
        }
        SectorExpr { terms: out }
    }

    pub fn word<S: AsRef<str>>(labels: &[S]) -> Self {
        Self::from_terms([(1, labels.iter().map(|s| s.as_ref().to_string()).collect())])
    }

    pub fn unit() -> Self {
        Self::from_terms([(1, Vec::new())])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().flat_map(|t| t.word.iter().map(String::as_str))
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(&other.terms)
                .map(|t| (t.coeff, t.word.clone())),
        )
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut w = a.word.clone();
                w.extend(b.word.iter().cloned());
                out.push((a.coeff * b.coeff, w));
            }
        }
        Self::from_terms(out)
    }

    pub fn parse(src: &str) -> Result<Self, ExprParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected input"));
        }
        Ok(e)
    }
}

impl std::str::FromStr for SectorExpr {
    type Err = ExprParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for SectorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            match (t.coeff, t.word.is_empty()) {
                (c, true) => write!(f, "{c}")?,
                (1, false) => f.write_str(&t.word.join("*"))?,
                (c, false) => write!(f, "{c}*{}", t.word.join("*"))?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprParseError {
        ExprParseError { pos: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<SectorExpr, ExprParseError> {
        let mut acc = self.product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            acc = acc.sum(&self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<SectorExpr, ExprParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.product(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SectorExpr, ExprParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos < self.src.len() && is_ident_char(self.src[self.pos]) {
                    return Err(self.error("labels may not start with a digit"));
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let n: u64 = text
                    .parse()
                    .map_err(|_| ExprParseError { pos: start, message: "integer too large".into() })?;
                Ok(SectorExpr::from_terms([(n, Vec::new())]))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && is_ident_char(self.src[self.pos]) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(SectorExpr::word(&[name]))
            }
            Some(_) => Err(self.error("expected label, integer or '('")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_words_sums_and_scalars() {
        let e = SectorExpr::parse("t2*r*r").unwrap();
        assert_eq!(e.terms(), &[Term { coeff: 1, word: vec!["t2".into(), "r".into(), "r".into()] }]);
        let e = SectorExpr::parse("t2 + r").unwrap();
        assert_eq!(e.terms().len(), 2);
        assert_eq!(SectorExpr::parse("1").unwrap(), SectorExpr::unit());
        assert_eq!(SectorExpr::parse("2*r + r").unwrap().to_string(), "3*r");
        assert_eq!(SectorExpr::parse("r*2").unwrap().to_string(), "2*r");
        assert!(SectorExpr::parse("0").unwrap().is_zero());
    }

    #[test]
    fn distributes_parentheses_in_order() {
        let e = SectorExpr::parse("(1+r)*t*(1+r)").unwrap();
        assert_eq!(e.to_string(), "t + t*r + r*t + r*t*r");
    }

    #[test]
    fn reports_error_positions() {
        let err = SectorExpr::parse("r * ").unwrap_err();
        assert_eq!(err.pos, 4);
        let err = SectorExpr::parse("r + (t").unwrap_err();
        assert_eq!(err.pos, 6);
        assert!(SectorExpr::parse("2r").is_err());
        assert!(SectorExpr::parse("r $ t").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = SectorExpr> {
        let label = prop::sample::select(vec!["r", "t", "t2", "eta'", "l10", "_x"]);
        let word = prop::collection::vec(label, 0..4)
            .prop_map(|w| w.into_iter().map(String::from).collect::<Vec<_>>());
        prop::collection::vec((1u64..5, word), 0..5).prop_map(SectorExpr::from_terms)
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            prop_assert_eq!(SectorExpr::parse(&e.to_string()).unwrap(), e);
        }
    }
}
