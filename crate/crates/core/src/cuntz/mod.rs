//! Linear combinations of Cuntz words over the isometries `S0, T0, T1, T2`.
//!
//! Every product reduces with `X*Y = δ_XY` to a sum of words `u v*` (no
//! adjoint to the left of a non-adjoint). That form is not unique in `O_4`
//! because `1 = S0 S0* + Σ T_i T_i*`; [`CuntzExpr::canonical`] pads every
//! term to a common adjoint length, which is unique, and residuals are taken
//! there.

mod haagerup;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{format_sig, Cx};

pub use haagerup::{
    solve_qsystem, verify_haagerup_relations, HaagerupConstants, HaagerupSystem, QSystemSolution,
    RelationCheck, RelationFamily, RelationReport, RELATION_THRESHOLD,
};
pub use parse::{Atom, CuntzParseError, RawExpr};

/// Coefficients below this are treated as exact cancellation and dropped.
pub const PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    S0,
    T(u8),
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::S0, Gen::T(0), Gen::T(1), Gen::T(2)];

    pub fn t(i: i64) -> Gen {
        Gen::T(i.rem_euclid(3) as u8)
    }

    pub fn index(self) -> usize {
        match self {
            Gen::S0 => 0,
            Gen::T(i) => 1 + i as usize,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::S0 => f.write_str("S0"),
            Gen::T(i) => write!(f, "T{i}"),
        }
    }
}

/// The normal-form word `left · right*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CuntzWord {
    pub left: Vec<Gen>,
    pub right: Vec<Gen>,
}

impl CuntzWord {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(left: Vec<Gen>, right: Vec<Gen>) -> Self {
        CuntzWord { left, right }
    }

    pub fn is_one(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        CuntzWord { left: self.right.clone(), right: self.left.clone() }
    }

    /// `(u1 v1*)(u2 v2*)`: `v1* u2` contracts letter by letter from the inside.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        let (v1, u2) = (&self.right, &other.left);
        let n = v1.len().min(u2.len());
        if v1[..n] != u2[..n] {
            return None;
        }
        let mut left = self.left.clone();
        let mut right = other.right.clone();
        if v1.len() <= u2.len() {
            left.extend_from_slice(&u2[n..]);
        } else {
            right.extend_from_slice(&v1[n..]);
        }
        Some(CuntzWord { left, right })
    }

    pub fn map_gens(&self, f: impl Fn(Gen) -> Gen) -> Self {
        CuntzWord { left: self.left.iter().map(|&g| f(g)).collect(), right: self.right.iter().map(|&g| f(g)).collect() }
    }
}

impl fmt::Display for CuntzWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let atoms: Vec<String> = self
            .left
            .iter()
            .map(|g| g.to_string())
            .chain(self.right.iter().rev().map(|g| format!("{g}^")))
            .collect();
        f.write_str(&atoms.join("*"))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CuntzExpr {
    terms: BTreeMap<CuntzWord, Cx>,
}

impl CuntzExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(CuntzWord::one(), Cx::new(1.0, 0.0))
    }

    pub fn word(w: CuntzWord, c: Cx) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn gen(g: Gen) -> Self {
        Self::word(CuntzWord::new(vec![g], vec![]), Cx::new(1.0, 0.0))
    }

    pub fn gen_adjoint(g: Gen) -> Self {
        Self::word(CuntzWord::new(vec![], vec![g]), Cx::new(1.0, 0.0))
    }

    pub fn scalar(c: Cx) -> Self {
        Self::word(CuntzWord::one(), c)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CuntzWord, &Cx)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &CuntzWord) -> Cx {
        self.terms.get(w).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: CuntzWord, c: Cx) {
        let v = self.terms.remove(&w).unwrap_or_default() + c;
        if v.norm() >= PRUNE {
            self.terms.insert(w, v);
        }
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= PRUNE);
        self
    }

    pub fn scale(&self, c: Cx) -> Self {
        CuntzExpr { terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect() }.prune()
    }

    pub fn adjoint(&self) -> Self {
        CuntzExpr { terms: self.terms.iter().map(|(w, c)| (w.adjoint(), c.conj())).collect() }
    }

    pub fn map_words(&self, f: impl Fn(&CuntzWord) -> CuntzWord) -> Self {
        let mut out = BTreeMap::new();
        for (w, c) in &self.terms {
            *out.entry(f(w)).or_insert_with(Cx::default) += c;
        }
        CuntzExpr { terms: out }.prune()
    }

    pub fn max_right_len(&self) -> usize {
        self.terms.keys().map(|w| w.right.len()).max().unwrap_or(0)
    }

    /// Pads every term to adjoint length `len` via `u v* = Σ_X uX (vX)*`.
    pub fn padded(&self, len: usize) -> Self {
        let mut out: BTreeMap<CuntzWord, Cx> = BTreeMap::new();
        let mut stack: Vec<(CuntzWord, Cx)> = self.terms.iter().map(|(w, c)| (w.clone(), *c)).collect();
        while let Some((w, c)) = stack.pop() {
            if w.right.len() >= len {
                *out.entry(w).or_default() += c;
                continue;
            }
            for g in Gen::ALL {
                let mut nw = w.clone();
                nw.left.push(g);
                nw.right.push(g);
                stack.push((nw, c));
            }
        }
        CuntzExpr { terms: out }.prune()
    }

    /// Unique representative: all terms padded to the longest adjoint part.
    pub fn canonical(&self) -> Self {
        self.padded(self.max_right_len())
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max coefficient modulus of the canonical form; zero iff the element vanishes.
    pub fn residual(&self) -> f64 {
        self.canonical().max_coeff()
    }

    /// The same element as an unreduced expression.
    pub fn to_raw(&self) -> RawExpr {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| {
                let atoms = w
                    .left
                    .iter()
                    .map(|&gen| Atom { gen, adjoint: false })
                    .chain(w.right.iter().rev().map(|&gen| Atom { gen, adjoint: true }))
                    .collect();
                (*c, atoms)
            })
            .collect();
        RawExpr { terms }
    }

    pub fn parse(src: &str) -> Result<RawExpr, CuntzParseError> {
        RawExpr::parse(src)
    }

    pub fn normalize(raw: &RawExpr) -> Self {
        raw.normalize()
    }
}

impl Add for &CuntzExpr {
    type Output = CuntzExpr;
    fn add(self, other: &CuntzExpr) -> CuntzExpr {
        let mut out = self.terms.clone();
        for (w, c) in &other.terms {
            *out.entry(w.clone()).or_default() += c;
        }
        CuntzExpr { terms: out }.prune()
    }
}

impl Neg for &CuntzExpr {
    type Output = CuntzExpr;
    fn neg(self) -> CuntzExpr {
        CuntzExpr { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }
}

impl Sub for &CuntzExpr {
    type Output = CuntzExpr;
    fn sub(self, other: &CuntzExpr) -> CuntzExpr {
        self + &(-other)
    }
}

impl Mul for &CuntzExpr {
    type Output = CuntzExpr;
    fn mul(self, other: &CuntzExpr) -> CuntzExpr {
        let mut out: BTreeMap<CuntzWord, Cx> = BTreeMap::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if let Some(w) = w1.mul(w2) {
                    *out.entry(w).or_default() += c1 * c2;
                }
            }
        }
        CuntzExpr { terms: out }.prune()
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for CuntzExpr {
            type Output = CuntzExpr;
            fn $m(self, other: CuntzExpr) -> CuntzExpr {
                (&self).$m(&other)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// Prints `c` so the Cuntz parser reads it back.
pub fn format_coeff(c: Cx) -> String {
    let (re, im) = (format_sig(c.re), format_sig(c.im));
    if im == "0" {
        re
    } else if re == "0" {
        format!("{im}i")
    } else if c.im < 0.0 {
        format!("({re}{im}i)")
    } else {
        format!("({re}+{im}i)")
    }
}

impl fmt::Display for CuntzExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            let coeff = format_coeff(*c);
            let (neg, coeff) = match coeff.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, coeff),
            };
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (coeff.as_str(), w.is_one()) {
                (_, true) => f.write_str(&coeff)?,
                ("1", false) => write!(f, "{w}")?,
                (_, false) => write!(f, "{coeff}*{w}")?,
            }
        }
        Ok(())
    }
}
