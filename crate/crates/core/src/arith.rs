//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Every coefficient and parameter in the crate is a [`GaussianRational`],
//! a complex number whose real and imaginary parts are reduced fractions.
//! Values are kept in canonical form at all times, so `==` is structural.
//!
//! The textual syntax is shared by the expression language, the JSON
//! encodings and the CLI:
//!
//! ```text
//! 3      -3/4      1/2+3*i      1/2-3/5*i      -7*i      0
//! ```
//!
//! No whitespace is allowed inside a scalar. [`GaussianRational`]'s
//! `Display` emits exactly this syntax and `FromStr` accepts it.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid scalar `{text}`: {reason}")]
    Parse { text: String, reason: &'static str },
}

/// A reduced fraction with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ArithError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    /// Floor of the value as an `i64`, if it fits.
    pub fn floor_i64(&self) -> Option<i64> {
        self.0.floor().to_integer().to_i64()
    }

    fn parse_magnitude(text: &str) -> Result<Self, &'static str> {
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(num) {
            return Err("expected digits");
        }
        let numer: BigInt = num.parse().map_err(|_| "expected digits")?;
        let denom: BigInt = match den {
            Some(d) if digits(d) => d.parse().map_err(|_| "expected digits")?,
            Some(_) => return Err("expected digits after `/`"),
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err("zero denominator");
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ArithError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let mag = Rational::parse_magnitude(body).map_err(|reason| ArithError::Parse {
            text: text.to_string(),
            reason,
        })?;
        Ok(if neg { -mag } else { mag })
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($ty:ident, $trait:ident, $method:ident, $body:expr) => {
        impl $trait<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                let f: fn(&$ty, &$ty) -> $ty = $body;
                f(self, rhs)
            }
        }
        impl $trait<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
        impl $trait<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Rational, Add, add, |a, b| Rational(&a.0 + &b.0));
forward_binop!(Rational, Sub, sub, |a, b| Rational(&a.0 - &b.0));
forward_binop!(Rational, Mul, mul, |a, b| Rational(&a.0 * &b.0));
forward_binop!(Rational, Div, div, |a, b| Rational(&a.0 / &b.0));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// An exact complex number `re + im·i` with rational parts.
///
/// The derived ordering is lexicographic on `(re, im)`; it is the canonical
/// sort order for parameter lists and carries no algebraic meaning.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        GaussianRational::new(Rational::from_integer(n), Rational::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self, ArithError> {
        Ok(GaussianRational::new(
            Rational::new(numer, denom)?,
            Rational::zero(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Real integer value, if the scalar is one and fits in an `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        if self.is_real() && self.re.is_integer() {
            self.re.numer().to_i64()
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        let norm = self.norm_sqr();
        if norm.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(GaussianRational::new(&self.re / &norm, -(&self.im / &norm)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.recip()?)
    }

    /// Exact integer power by repeated squaring; negative exponents invert.
    pub fn pow(&self, exp: i64) -> Result<Self, ArithError> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = GaussianRational::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// True for `0, -1, -2, …`: the values a lower hypergeometric parameter
    /// may not take.
    pub fn is_nonpositive_integer(&self) -> bool {
        self.is_real() && self.re.is_integer() && !self.re.numer().is_positive()
    }

    /// Length in bytes of the longest prefix of `text` that is a complete
    /// scalar, or `None` when no prefix is.
    pub fn scan_prefix(text: &str) -> Option<usize> {
        let bytes = text.as_bytes();
        let magnitude = |start: usize| -> Option<usize> {
            let mut i = start;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i == start {
                return None;
            }
            if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            Some(i)
        };
        let imag_tail = |at: usize| bytes.get(at..at + 2) == Some(b"*i".as_slice());
        let mut pos = usize::from(bytes.first() == Some(&b'-'));
        pos = magnitude(pos)?;
        if imag_tail(pos) && !ident_continues(bytes, pos + 2) {
            return Some(pos + 2);
        }
        if let Some(&sign) = bytes.get(pos) {
            if sign == b'+' || sign == b'-' {
                if let Some(end) = magnitude(pos + 1) {
                    if imag_tail(end) && !ident_continues(bytes, end + 2) {
                        return Some(end + 2);
                    }
                }
            }
        }
        Some(pos)
    }
}

fn ident_continues(bytes: &[u8], at: usize) -> bool {
    bytes
        .get(at)
        .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}{}*i", self.re, self.im)
                } else {
                    write!(f, "{}+{}*i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GaussianRational {
    type Err = ArithError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason| ArithError::Parse {
            text: text.to_string(),
            reason,
        };
        if text.is_empty() {
            return Err(err("empty scalar"));
        }
        if GaussianRational::scan_prefix(text) != Some(text.len()) {
            return Err(err("not of the form p, p/q, p/q+r/s*i or p/q*i"));
        }
        let Some(body) = text.strip_suffix("*i") else {
            return Ok(GaussianRational::new(text.parse()?, Rational::zero()));
        };
        // The split point is the last sign that is not the leading one.
        let split = body
            .bytes()
            .enumerate()
            .skip(1)
            .filter(|&(_, b)| b == b'+' || b == b'-')
            .map(|(i, _)| i)
            .next_back();
        match split {
            None => Ok(GaussianRational::new(Rational::zero(), body.parse()?)),
            Some(at) => {
                let re: Rational = body[..at].parse()?;
                let im_text = body[at..].strip_prefix('+').unwrap_or(&body[at..]);
                Ok(GaussianRational::new(re, im_text.parse()?))
            }
        }
    }
}

impl From<Rational> for GaussianRational {
    fn from(re: Rational) -> Self {
        GaussianRational::new(re, Rational::zero())
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_integer(n)
    }
}

forward_binop!(GaussianRational, Add, add, |a, b| GaussianRational::new(
    &a.re + &b.re,
    &a.im + &b.im
));
forward_binop!(GaussianRational, Sub, sub, |a, b| GaussianRational::new(
    &a.re - &b.re,
    &a.im - &b.im
));
forward_binop!(GaussianRational, Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussianRational::new(&a.re * &b.re, Rational::zero());
    }
    GaussianRational::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
});
// Panics on a zero divisor, like the primitive numeric types; use
// `checked_div` where the divisor is not known to be nonzero.
forward_binop!(GaussianRational, Div, div, |a, b| a
    .checked_div(b)
    .expect("division of a Gaussian rational by zero"));

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(GaussianRational::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for GaussianRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(GaussianRational::one(), |acc, x| acc * x)
    }
}
