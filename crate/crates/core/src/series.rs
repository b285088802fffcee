//! Univariate polynomials and truncated power series over a [`Scalar`].
//!
//! A [`Series`] is either an exact polynomial or a truncated series known
//! modulo `v^n` (written `O(v^n)`). Every operation propagates the tightest
//! truncation it can justify; exact inputs give exact outputs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{binomial, rational_from_int, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<F> {
    coeffs: Vec<F>,
    /// `Some(n)`: coefficients of index `>= n` are unknown.
    big_o: Option<usize>,
}

/// Polynomial or truncated series in `x`, the phase variable.
pub type XSeries<F> = Series<F>;

fn min_bound(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn add_bound(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    }
}

impl<F: Scalar> Series<F> {
    fn normalized(mut coeffs: Vec<F>, big_o: Option<usize>) -> Self {
        if let Some(n) = big_o {
            coeffs.truncate(n);
        }
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Series { coeffs, big_o }
    }

    pub fn zero() -> Self {
        Series { coeffs: Vec::new(), big_o: None }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::normalized(vec![c], None)
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn monomial(c: F, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Self::normalized(coeffs, None)
    }

    pub fn from_coeffs(coeffs: Vec<F>) -> Self {
        Self::normalized(coeffs, None)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| F::from_i64(c)).collect())
    }

    /// A series known modulo `v^big_o`.
    pub fn truncated(coeffs: Vec<F>, big_o: usize) -> Self {
        Self::normalized(coeffs, Some(big_o))
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn big_o(&self) -> Option<usize> {
        self.big_o
    }

    pub fn is_exact(&self) -> bool {
        self.big_o.is_none()
    }

    /// Exactly zero as a polynomial (a truncated zero is not).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.big_o.is_none()
    }

    /// All known coefficients vanish.
    pub fn is_zero_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Smallest index that may carry a nonzero value.
    fn effective_valuation(&self) -> Option<usize> {
        self.valuation().or(self.big_o)
    }

    pub fn truncate(&self, big_o: usize) -> Self {
        Self::normalized(self.coeffs.clone(), min_bound(self.big_o, Some(big_o)))
    }

    /// Forget truncation and treat the known coefficients as a polynomial.
    pub fn into_polynomial(self) -> Self {
        Series { coeffs: self.coeffs, big_o: None }
    }

    /// Equality up to the shared valid order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let bound = min_bound(self.big_o, other.big_o);
        let len = self.coeffs.len().max(other.coeffs.len());
        let len = bound.map_or(len, |b| len.min(b));
        (0..len).all(|k| self.coeff(k) == other.coeff(k))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::normalized(Vec::new(), self.big_o);
        }
        Self::normalized(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), self.big_o)
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::normalized(coeffs, self.big_o.map(|b| b + k))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * F::from_i64(k as i64))
            .collect();
        Self::normalized(coeffs, self.big_o.map(|b| b.saturating_sub(1)))
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Evaluate an exact polynomial at a point.
    pub fn eval(&self, x: &F) -> Result<F> {
        if !self.is_exact() {
            return Err(Error::Precondition("cannot evaluate a truncated series".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * x.clone() + c.clone()))
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                let b = other.coeff(k);
                self.coeff(k) + if negate { -b } else { b }
            })
            .collect();
        Self::normalized(coeffs, min_bound(self.big_o, other.big_o))
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let bound = min_bound(
            add_bound(self.effective_valuation(), other.big_o),
            add_bound(other.effective_valuation(), self.big_o),
        );
        let len = self.coeffs.len() + other.coeffs.len();
        let len = bound.map_or(len, |b| len.min(b));
        let mut coeffs = vec![F::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Self::normalized(coeffs, bound)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse of a series with invertible constant term,
    /// valid through `order` (that is, `O(v^(order+1))`).
    pub fn reciprocal(&self, order: usize) -> Result<Self> {
        let c0 = self.coeff(0);
        let inv0 = c0
            .inv()
            .ok_or(Error::Precondition("reciprocal needs a nonzero constant term".into()))?;
        let bound = min_bound(self.big_o, Some(order + 1)).unwrap_or(order + 1);
        let mut out: Vec<F> = Vec::with_capacity(bound);
        for n in 0..bound {
            if n == 0 {
                out.push(inv0.clone());
                continue;
            }
            let mut acc = F::zero();
            for k in 1..=n {
                let a = self.coeff(k);
                if !a.is_zero() {
                    acc = acc + a * out[n - k].clone();
                }
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(Self::truncated(out, bound))
    }

    /// `self(inner)`. The inner series must have zero constant term unless
    /// `self` is an exact polynomial.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let inner_c0 = inner.coeff(0);
        let bound = match self.big_o {
            None => None,
            Some(m) => {
                if !inner_c0.is_zero() {
                    return Err(Error::NonzeroConstantTerm);
                }
                let v = inner.effective_valuation().unwrap_or(usize::MAX / 2);
                Some(m.saturating_mul(v))
            }
        };
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
            if let Some(b) = bound {
                acc = acc.truncate(b);
            }
        }
        Ok(match bound {
            Some(b) => acc.truncate(b),
            None => acc,
        })
    }

    /// `exp(self)` for `self(0) = 0`, valid through `order`.
    pub fn exp(&self, order: usize) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::Precondition("exp needs zero constant term".into()));
        }
        let bound = min_bound(self.big_o, Some(order + 1)).unwrap_or(order + 1);
        // n e_n = sum_{k=1}^{n} k u_k e_{n-k}
        let mut out: Vec<F> = Vec::with_capacity(bound);
        for n in 0..bound {
            if n == 0 {
                out.push(F::one());
                continue;
            }
            let mut acc = F::zero();
            for k in 1..=n {
                let u = self.coeff(k);
                if !u.is_zero() {
                    acc = acc + F::from_i64(k as i64) * u * out[n - k].clone();
                }
            }
            out.push(acc / F::from_i64(n as i64));
        }
        Ok(Self::truncated(out, bound))
    }

    /// `log(self)` for `self(0) = 1`, valid through `order`.
    pub fn log(&self, order: usize) -> Result<Self> {
        if self.coeff(0) != F::one() {
            return Err(Error::Precondition("log needs constant term 1".into()));
        }
        let bound = min_bound(self.big_o, Some(order + 1)).unwrap_or(order + 1);
        let quotient = &self.derivative() * &self.reciprocal(order)?;
        let mut out = vec![F::zero()];
        for n in 1..bound {
            out.push(quotient.coeff(n - 1) / F::from_i64(n as i64));
        }
        Ok(Self::truncated(out, bound))
    }

    /// `(1 + self)^r` for `self(0) = 0` and rational `r`, valid through `order`.
    pub fn binomial_power(&self, r: &Rational, order: usize) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::Precondition("binomial_power needs zero constant term".into()));
        }
        let bound = min_bound(self.big_o, Some(order + 1)).unwrap_or(order + 1);
        let r1 = F::from_rational(r.clone() + Rational::one());
        // n y_n = sum_{k=1}^{n} ((r+1) k - n) u_k y_{n-k}
        let mut out: Vec<F> = Vec::with_capacity(bound);
        for n in 0..bound {
            if n == 0 {
                out.push(F::one());
                continue;
            }
            let mut acc = F::zero();
            for k in 1..=n {
                let u = self.coeff(k);
                if !u.is_zero() {
                    let w = r1.clone() * F::from_i64(k as i64) - F::from_i64(n as i64);
                    acc = acc + w * u * out[n - k].clone();
                }
            }
            out.push(acc / F::from_i64(n as i64));
        }
        Ok(Self::truncated(out, bound))
    }

    /// Compositional inverse `p^{-1}` valid through `order`, for `p(0) = 0`
    /// and invertible `p'(0)`. Uses Lagrange inversion:
    /// `[v^n] p^{-1} = (1/n) [z^{n-1}] (z / p(z))^n`.
    pub fn compositional_inverse(&self, order: usize) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::NotInvertible("constant term must be zero"));
        }
        if self.coeff(1).is_zero() {
            return Err(Error::NotInvertible("linear coefficient must be nonzero"));
        }
        if let Some(b) = self.big_o {
            if b < order + 1 {
                return Err(Error::OrderExceeded { requested: order, available: b.saturating_sub(1) });
            }
        }
        if order == 0 {
            return Ok(Self::truncated(Vec::new(), 1));
        }
        // z / p(z) = 1 / (p_1 + p_2 z + ...)
        let shifted: Vec<F> = (1..=order).map(|k| self.coeff(k)).collect();
        let h = Self::truncated(shifted, order).reciprocal(order - 1)?;
        let mut out = vec![F::zero()];
        let mut power = Self::one();
        for n in 1..=order {
            power = (&power * &h).truncate(order);
            out.push(power.coeff(n - 1) / F::from_i64(n as i64));
        }
        Ok(Self::truncated(out, order + 1))
    }
}

impl<F: Scalar> Default for Series<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Scalar> Add for &Series<F> {
    type Output = Series<F>;

    fn add(self, rhs: Self) -> Series<F> {
        self.add_impl(rhs, false)
    }
}

impl<F: Scalar> Sub for &Series<F> {
    type Output = Series<F>;

    fn sub(self, rhs: Self) -> Series<F> {
        self.add_impl(rhs, true)
    }
}

impl<F: Scalar> Mul for &Series<F> {
    type Output = Series<F>;

    fn mul(self, rhs: Self) -> Series<F> {
        self.mul_impl(rhs)
    }
}

impl<F: Scalar> Neg for &Series<F> {
    type Output = Series<F>;

    fn neg(self) -> Series<F> {
        Series::normalized(self.coeffs.iter().map(|c| -c.clone()).collect(), self.big_o)
    }
}

impl<F: Scalar> Add for Series<F> {
    type Output = Series<F>;

    fn add(self, rhs: Self) -> Series<F> {
        &self + &rhs
    }
}

impl<F: Scalar> Sub for Series<F> {
    type Output = Series<F>;

    fn sub(self, rhs: Self) -> Series<F> {
        &self - &rhs
    }
}

impl<F: Scalar> Mul for Series<F> {
    type Output = Series<F>;

    fn mul(self, rhs: Self) -> Series<F> {
        &self * &rhs
    }
}

impl<F: Scalar> Neg for Series<F> {
    type Output = Series<F>;

    fn neg(self) -> Series<F> {
        -&self
    }
}

impl<F: Scalar> fmt::Display for Series<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        if first && self.big_o.is_none() {
            f.write_str("0")?;
        }
        if let Some(n) = self.big_o {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "O(x^{n})")?;
        }
        Ok(())
    }
}

/// The derivative sequence `(f, δf, δ²f, …, δᴺf)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeSequence<F> {
    entries: Vec<Series<F>>,
}

impl<F: Scalar> DerivativeSequence<F> {
    /// `(f, δf, …, δ^depth f)`.
    pub fn of(f: &Series<F>, depth: usize) -> Self {
        let mut entries = Vec::with_capacity(depth + 1);
        let mut cur = f.clone();
        for _ in 0..=depth {
            let next = cur.derivative();
            entries.push(cur);
            cur = next;
        }
        DerivativeSequence { entries }
    }

    pub fn from_entries(entries: Vec<Series<F>>) -> Self {
        DerivativeSequence { entries }
    }

    pub fn entries(&self) -> &[Series<F>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry `k + 1` is the derivative of entry `k`.
    pub fn is_consistent(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].derivative().agrees_with(&w[1]))
    }

    /// Hurwitz product: entry `n` is `Σ_k C(n,k) δᵏF · δⁿ⁻ᵏG`, which is the
    /// derivative sequence of the pointwise product.
    pub fn hurwitz_product(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        let entries = (0..self.len())
            .map(|n| {
                (0..=n).fold(Series::zero(), |acc, k| {
                    let c = F::from_rational(rational_from_int(binomial(n, k)));
                    &acc + &(&self.entries[k] * &other.entries[n - k]).scale(&c)
                })
            })
            .collect();
        Ok(DerivativeSequence { entries })
    }
}
