//! Exact characteristic-zero scalars.
//!
//! Two fields are provided: the rationals [`Rational`] and the Gaussian
//! rationals [`GaussianRational`]. Everything else in the crate is generic
//! over the [`Scalar`] trait.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rational = BigRational;

/// Which concrete field a scalar type lives in.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Gaussian,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => f.write_str("Q"),
            FieldKind::Gaussian => f.write_str("Qi"),
        }
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" | "q" => Ok(FieldKind::Rational),
            "Qi" | "qi" | "Q(i)" => Ok(FieldKind::Gaussian),
            _ => Err(Error::Parse(format!("unknown field `{s}` (expected Q or Qi)"))),
        }
    }
}

/// An element of an exact field of characteristic zero.
///
/// Arithmetic never rounds. Division by zero panics, as it does for
/// [`BigRational`]; use [`Scalar::inv`] when the divisor may vanish.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const FIELD: FieldKind;

    fn from_rational(r: Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The imaginary unit, when the field contains one.
    fn imaginary_unit() -> Option<Self>;

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    fn conj(&self) -> Self;

    /// An exact square root inside the field, if one exists.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Absolute value as a float; used only for reporting residual norms.
    fn magnitude(&self) -> f64;

    /// Parse the exact string grammar `-?digits(/digits)?`, plus `a+b*i`
    /// composites for the Gaussian field.
    fn parse_exact(s: &str) -> Result<Self>;

    fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

pub(crate) fn rational_from_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient C(n, k) as a big integer.
pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Parse a rational literal. Accepts `p`, `p/q` and plain decimals such as
/// `0.125`, which are converted exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num).ok_or_else(bad)?;
        let den = parse_decimal(den).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let value = Rational::new(num, den);
    Some(if neg { -value } else { value })
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators: scale by bit length first
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
        if shift <= 0 {
            return f64::NAN;
        }
        let n = (r.numer().abs() >> shift as usize).to_f64().unwrap_or(f64::INFINITY);
        let d = (r.denom() >> shift as usize).to_f64().unwrap_or(f64::INFINITY);
        let v = n / d;
        if r.numer().sign() == Sign::Minus {
            -v
        } else {
            v
        }
    })
}

impl Scalar for Rational {
    const FIELD: FieldKind = FieldKind::Rational;

    fn from_rational(r: Rational) -> Self {
        r
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        rational_sqrt(self)
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.abs())
    }

    fn parse_exact(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

/// An element a + b·i of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::new(Rational::one(), Rational::zero())
    }
}

impl Add for GaussianRational {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        GaussianRational::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        GaussianRational::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussianRational::new(re, im)
    }
}

impl Div for GaussianRational {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &n;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &n;
        GaussianRational::new(re, im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;

    fn neg(self) -> Self {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl Scalar for GaussianRational {
    const FIELD: FieldKind = FieldKind::Gaussian;

    fn from_rational(r: Rational) -> Self {
        GaussianRational::new(r, Rational::zero())
    }

    fn imaginary_unit() -> Option<Self> {
        Some(GaussianRational::i())
    }

    fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.im.is_zero() {
            return match rational_sqrt(&self.re) {
                Some(r) => Some(GaussianRational::from_rational(r)),
                None => rational_sqrt(&-self.re.clone())
                    .map(|r| GaussianRational::new(Rational::zero(), r)),
            };
        }
        // (p + qi)^2 = a + bi  with  p^2 = (|z| + a) / 2,  q = b / 2p
        let modulus = rational_sqrt(&self.norm())?;
        let two = rational_from_int(2);
        let p = rational_sqrt(&((&modulus + &self.re) / &two))?;
        if p.is_zero() {
            return None;
        }
        let q = &self.im / (&two * &p);
        Some(GaussianRational::new(p, q))
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.re).hypot(rational_to_f64(&self.im))
    }

    fn parse_exact(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("invalid Gaussian rational `{s}`"));
        if compact.is_empty() {
            return Err(bad());
        }
        let Some(body) = compact.strip_suffix('i') else {
            return parse_rational(&compact).map(GaussianRational::from_rational);
        };
        // split the real part from the imaginary coefficient at the last
        // sign that is not the leading character
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && bytes[j - 1] != b'+');
        let (re_str, im_str) = match split {
            Some(j) => (&body[..j], &body[j..]),
            None => ("0", body),
        };
        let im_str = im_str.strip_prefix('+').unwrap_or(im_str);
        let im_str = im_str.strip_suffix('*').unwrap_or(im_str);
        let im = match im_str {
            "" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other).map_err(|_| bad())?,
        };
        let re = parse_rational(re_str).map_err(|_| bad())?;
        Ok(GaussianRational::new(re, im))
    }
}
