//! Number tower: exact arithmetic in a single real quadratic field `Q(√m)`,
//! plus complex doubles compared under an explicit tolerance policy.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Complex double used for Cuntz coefficients and 6j values.
pub type Cx = Complex64;

/// Environment variable overriding the absolute tolerance.
pub const TOLERANCE_ENV: &str = "SWB_TOLERANCE";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("radicand {0} is not a square-free integer >= 2")]
    BadRadicand(u64),
    #[error("mixed radicands sqrt({0}) and sqrt({1})")]
    MixedRadicand(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at {pos}: {message}")]
    Parse { pos: usize, message: String },
}

/// `a + b·√m` with rational `a`, `b` and square-free `m`.
///
/// A value with `b = 0` is stored with `m = 1` so that equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    m: u64,
}

fn is_square_free(m: u64) -> bool {
    let mut p = 2u64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Splits `n = s²·f` with `f` square-free.
fn square_part(n: u64) -> (u64, u64) {
    let (mut s, mut f) = (1u64, n);
    let mut p = 2u64;
    while p * p <= f {
        while f % (p * p) == 0 {
            f /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, f)
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Extremely large components: scale through the integer parts.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl QuadExt {
    pub fn new(a: BigRational, b: BigRational, m: u64) -> Result<Self, ScalarError> {
        if b.is_zero() {
            return Ok(Self::rational(a));
        }
        if m < 2 || !is_square_free(m) {
            return Err(ScalarError::BadRadicand(m));
        }
        Ok(QuadExt { a, b, m })
    }

    /// `an/ad + (bn/bd)·√m` from small integers.
    pub fn from_ratios(an: i64, ad: i64, bn: i64, bd: i64, m: u64) -> Result<Self, ScalarError> {
        Self::new(ratio(an, ad), ratio(bn, bd), m)
    }

    pub fn rational(a: BigRational) -> Self {
        QuadExt { a, b: BigRational::zero(), m: 1 }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `√n`, reduced to `s·√f` with `f` square-free.
    pub fn sqrt_of(n: u64) -> Self {
        let (s, f) = square_part(n);
        let s = BigRational::from_integer(BigInt::from(s));
        if f == 1 || n == 0 {
            if n == 0 {
                return Self::zero();
            }
            return Self::rational(s);
        }
        QuadExt { a: BigRational::zero(), b: s, m: f }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_coeff(&self) -> &BigRational {
        &self.b
    }

    /// Radicand; `1` for rational values.
    pub fn radicand(&self) -> u64 {
        self.m
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    pub fn eval(&self) -> f64 {
        if self.b.is_zero() {
            return rat_to_f64(&self.a);
        }
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * (self.m as f64).sqrt()
    }

    /// `a − b√m`.
    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone(), m: self.m }
    }

    /// Field norm `a² − b²m`, an exact rational.
    pub fn norm(&self) -> BigRational {
        let m = BigRational::from_integer(BigInt::from(self.m));
        &self.a * &self.a - &self.b * &self.b * m
    }

    /// Exact sign of the real number `a + b√m`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let m = BigRational::from_integer(BigInt::from(self.m));
        let a2 = &self.a * &self.a;
        let b2m = &self.b * &self.b * m;
        match a2.cmp(&b2m) {
            Ordering::Greater => sa,
            _ => sb,
        }
    }

    fn common_radicand(&self, other: &Self) -> Result<u64, ScalarError> {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => Ok(other.m),
            (_, true) => Ok(self.m),
            _ if self.m == other.m => Ok(self.m),
            _ => Err(ScalarError::MixedRadicand(self.m, other.m)),
        }
    }

    fn build(a: BigRational, b: BigRational, m: u64) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            QuadExt { a, b, m }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let m = self.common_radicand(other)?;
        Ok(Self::build(&self.a + &other.a, &self.b + &other.b, m))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        let m = self.common_radicand(other)?;
        Ok(Self::build(&self.a - &other.a, &self.b - &other.b, m))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let m = self.common_radicand(other)?;
        let mr = BigRational::from_integer(BigInt::from(m));
        let a = &self.a * &other.a + &self.b * &other.b * mr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::build(a, b, m))
    }

    pub fn checked_inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        // m is not a perfect square, so the norm vanishes only at zero.
        let n = self.norm();
        Ok(Self::build(&self.a / &n, -(&self.b / &n), self.m))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact comparison; `None` for mixed radicands.
    pub fn cmp_exact(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|d| d.signum())
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, 'b> $tr<&'b QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'b QuadExt) -> QuadExt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("QuadExt {}: {}", stringify!($method), e))
            }
        }
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'a QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::build(-self.a, -self.b, self.m)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        self.clone().neg()
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::integer(n)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadExt {
    /// ASCII form accepted by [`FromStr`], e.g. `3/2+1/2*sqrt(13)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let radical = if self.b.abs().is_one() {
            format!("sqrt({})", self.m)
        } else {
            format!("{}*sqrt({})", fmt_rational(&self.b.abs()), self.m)
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{radical}")
            } else {
                write!(f, "{radical}")
            }
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", fmt_rational(&self.a), sign, radical)
        }
    }
}

impl FromStr for QuadExt {
    type Err = ScalarError;

    /// Arithmetic over integers, decimals and `sqrt(n)`: `(5+sqrt(5))/2`, `2+sqrt(2)`.
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let mut p = QuadParser { src: s.as_bytes(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(v)
    }
}

struct QuadParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl QuadParser<'_> {
    fn error(&self, message: &str) -> ScalarError {
        ScalarError::Parse { pos: self.pos, message: message.to_string() }
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

    fn expr(&mut self) -> Result<QuadExt, ScalarError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.term()?;
            acc = if c == b'+' { acc.checked_add(&rhs) } else { acc.checked_sub(&rhs) }
                .map_err(|e| ScalarError::Parse { pos: at, message: e.to_string() })?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<QuadExt, ScalarError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            acc = if c == b'*' { acc.checked_mul(&rhs) } else { acc.checked_div(&rhs) }
                .map_err(|e| ScalarError::Parse { pos: at, message: e.to_string() })?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<QuadExt, ScalarError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<QuadExt, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b's') => {
                let rest = &self.src[self.pos..];
                if !rest.starts_with(b"sqrt") {
                    return Err(self.error("expected 'sqrt'"));
                }
                self.pos += 4;
                let had_paren = self.peek() == Some(b'(');
                if had_paren {
                    self.pos += 1;
                }
                let at = self.pos;
                let n = self.number()?;
                if had_paren {
                    if self.peek() != Some(b')') {
                        return Err(self.error("expected ')'"));
                    }
                    self.pos += 1;
                }
                if !n.is_integer() || n.rational_part().is_negative() {
                    return Err(ScalarError::Parse { pos: at, message: "sqrt needs a nonnegative integer".into() });
                }
                let n = n.rational_part().numer().to_u64().ok_or(ScalarError::Parse {
                    pos: at,
                    message: "radicand too large".into(),
                })?;
                Ok(QuadExt::sqrt_of(n))
            }
            _ => Err(self.error("expected number, 'sqrt' or '('")),
        }
    }

    fn number(&mut self) -> Result<QuadExt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if int.is_empty() && frac.is_empty() || frac.contains('.') {
            return Err(ScalarError::Parse { pos: start, message: format!("bad number '{text}'") });
        }
        let digits = format!("{int}{frac}");
        let numer: BigInt = digits.parse().map_err(|_| ScalarError::Parse {
            pos: start,
            message: format!("bad number '{text}'"),
        })?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        Ok(QuadExt::rational(BigRational::new(numer, denom)))
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Absolute/relative tolerance pair; `|x−y| ≤ max(abs, rel·max(|x|,|y|))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-9, rel: 1e-12 }
    }
}

impl Tolerance {
    pub fn with_abs(abs: f64) -> Self {
        Tolerance { abs, ..Self::default() }
    }

    /// Default tolerance with `abs` taken from `SWB_TOLERANCE` when set and valid.
    pub fn from_env() -> Self {
        std::env::var(TOLERANCE_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .map(Self::with_abs)
            .unwrap_or_default()
    }

    pub fn bound<T: Magnitude>(&self, x: T, y: T) -> f64 {
        self.abs.max(self.rel * x.magnitude().max(y.magnitude()))
    }

    pub fn approx_eq<T: Magnitude>(&self, x: T, y: T) -> bool {
        x.distance(y) <= self.bound(x, y)
    }
}

/// Values comparable under [`Tolerance`].
pub trait Magnitude: Copy {
    fn magnitude(self) -> f64;
    fn distance(self, other: Self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn distance(self, other: Self) -> f64 {
        (self - other).abs()
    }
}

impl Magnitude for Cx {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

/// Approximate equality under the default tolerance.
pub fn approx_eq<T: Magnitude>(x: T, y: T) -> bool {
    Tolerance::default().approx_eq(x, y)
}

pub fn quad_eval(x: &QuadExt) -> f64 {
    x.eval()
}

/// Number of significant digits used for all printed floats.
pub const PRINT_DIGITS: usize = 12;

/// Rounds to [`PRINT_DIGITS`] significant digits and prints the shortest
/// decimal that reads back to the rounded value.
pub fn format_sig(x: f64) -> String {
    round_sig(x).to_string()
}

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", PRINT_DIGITS - 1, x).parse().expect("float round trip")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(std::f64::consts::FRAC_PI_3), "1.0471975512");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn eval_examples() {
        let d = QuadExt::from_ratios(3, 2, 1, 2, 13).unwrap();
        assert!((d.eval() - 3.302_775_637_731_995).abs() < 1e-12);
        assert_eq!(QuadExt::from_ratios(0, 1, 0, 1, 2).unwrap().eval(), 0.0);
        assert!((QuadExt::from_ratios(1, 1, 1, 1, 2).unwrap().eval() - 2.414_213_562_373_095).abs() < 1e-12);
    }

    #[test]
    fn approx_eq_examples() {
        assert!(approx_eq(1.0, 1.0 + 1e-12));
        assert!(!approx_eq(0.0, 1e-6));
        let two_minus_sqrt3 = q("2-sqrt(3)").eval();
        assert!(approx_eq(two_minus_sqrt3, (std::f64::consts::PI / 12.0).tan()));
        assert!(approx_eq(Cx::new(1.0, 1.0), Cx::new(1.0, 1.0 + 1e-10)));
    }

    #[test]
    fn rejects_bad_radicand_and_zero_division() {
        assert_eq!(QuadExt::from_ratios(0, 1, 1, 1, 8), Err(ScalarError::BadRadicand(8)));
        assert_eq!(QuadExt::from_ratios(0, 1, 1, 1, 1), Err(ScalarError::BadRadicand(1)));
        assert_eq!(QuadExt::one().checked_div(&QuadExt::zero()), Err(ScalarError::DivisionByZero));
        assert!(matches!(q("sqrt(2)").checked_add(&q("sqrt(3)")), Err(ScalarError::MixedRadicand(2, 3))));
    }

    #[test]
    fn exact_identities() {
        assert_eq!(q("2+sqrt(2)").pow(2), q("6+4*sqrt(2)"));
        assert_eq!(q("(5+sqrt(5))/2") - QuadExt::one(), q("(3+sqrt(5))/2"));
        let d = q("(3+sqrt(13))/2");
        assert_eq!(d.pow(2), &(&d * &QuadExt::integer(3)) + &QuadExt::one());
        assert_eq!(q("sqrt(8)"), q("2*sqrt(2)"));
        assert_eq!(q("sqrt(4)"), QuadExt::integer(2));
    }

    #[test]
    fn exact_sign() {
        assert_eq!(q("1-sqrt(2)").signum(), Ordering::Less);
        assert_eq!(q("-1+sqrt(2)").signum(), Ordering::Greater);
        assert_eq!(q("3-2*sqrt(2)").signum(), Ordering::Greater);
        assert_eq!(q("0").signum(), Ordering::Equal);
        assert!(q("1+sqrt(3)") > QuadExt::integer(2));
    }

    #[test]
    fn display_parse_round_trip() {
        for s in ["3/2+1/2*sqrt(13)", "-sqrt(2)", "7", "-1/3", "1-2*sqrt(5)"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert!("2+".parse::<QuadExt>().is_err());
        assert!("sqrt(x)".parse::<QuadExt>().is_err());
        assert_eq!(q("0.25"), q("1/4"));
    }

    fn arb_quad() -> impl Strategy<Value = QuadExt> {
        (-1000i64..=1000, 1i64..=50, -1000i64..=1000, 1i64..=50)
            .prop_map(|(an, ad, bn, bd)| QuadExt::from_ratios(an, ad, bn, bd, 13).unwrap())
    }

    proptest! {
        #[test]
        fn field_division_is_exact(x in arb_quad(), y in arb_quad()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!((&x * &y) / &y, x);
        }

        #[test]
        fn eval_is_ring_homomorphism(x in arb_quad(), y in arb_quad()) {
            let lhs = (&x * &y).eval();
            let rhs = x.eval() * y.eval();
            // Scale by the operands' size: a + b√m may cancel to a tiny value.
            let size = |v: &QuadExt| rat_to_f64(v.rational_part()).abs()
                + rat_to_f64(v.radical_coeff()).abs() * 13f64.sqrt();
            let tol = Tolerance::default();
            prop_assert!((lhs - rhs).abs() <= tol.abs.max(tol.rel * size(&x) * size(&y)),
                "{} vs {}", lhs, rhs);
        }

        #[test]
        fn conjugate_product_is_norm(x in arb_quad()) {
            let p = &x * &x.conj();
            prop_assert!(p.is_rational());
            prop_assert_eq!(p.rational_part().clone(), x.norm());
        }

        #[test]
        fn sign_agrees_with_float(x in arb_quad()) {
            let f = x.eval();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.signum(), f.partial_cmp(&0.0).unwrap());
            }
            prop_assert_eq!(x.is_zero(), x.signum() == Ordering::Equal);
        }
    }
}
