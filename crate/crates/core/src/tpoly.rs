//! Polynomials in the time variable `t`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::{binomial, rational_from_int, Scalar};

/// A polynomial in `t` with exact coefficients; `coeffs[k]` multiplies `t^k`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> TPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        TPoly { coeffs }
    }

    pub fn zero() -> Self {
        TPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    pub fn t() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn monomial(c: F, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| F::from_i64(c)).collect())
    }

    /// `t (t + step) (t + 2 step) ⋯` with `n` factors.
    pub fn factorial_power(n: usize, step: &F) -> Self {
        let mut acc = Self::one();
        for j in 0..n {
            let root = step.clone() * F::from_i64(j as i64);
            acc = &acc * &Self::new(vec![root, F::one()]);
        }
        acc
    }

    /// Falling factorial `(t)_n = t (t-1) ⋯ (t-n+1)`.
    pub fn falling(n: usize) -> Self {
        Self::factorial_power(n, &-F::one())
    }

    /// Rising factorial `t (t+1) ⋯ (t+n-1)`.
    pub fn rising(n: usize) -> Self {
        Self::factorial_power(n, &F::one())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * F::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, t: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    /// `p(t + a)`.
    pub fn shift(&self, a: &F) -> Self {
        let deg = self.coeffs.len();
        let mut out = vec![F::zero(); deg];
        let powers: Vec<F> = (0..deg).map(|j| a.pow(j)).collect();
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate().take(n + 1) {
                let b = F::from_rational(rational_from_int(binomial(n, k)));
                *slot = slot.clone() + c.clone() * b * powers[n - k].clone();
            }
        }
        Self::new(out)
    }

    /// `p(c t)`.
    pub fn scale_var(&self, c: &F) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a.clone() * c.pow(k))
                .collect(),
        )
    }

    /// `p(q(t))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }
}

impl<F: Scalar> Add for &TPoly<F> {
    type Output = TPoly<F>;

    fn add(self, rhs: Self) -> TPoly<F> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        TPoly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<F: Scalar> Sub for &TPoly<F> {
    type Output = TPoly<F>;

    fn sub(self, rhs: Self) -> TPoly<F> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        TPoly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<F: Scalar> Mul for &TPoly<F> {
    type Output = TPoly<F>;

    fn mul(self, rhs: Self) -> TPoly<F> {
        if self.is_zero() || rhs.is_zero() {
            return TPoly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        TPoly::new(out)
    }
}

impl<F: Scalar> Neg for &TPoly<F> {
    type Output = TPoly<F>;

    fn neg(self) -> TPoly<F> {
        TPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<F: Scalar> fmt::Display for TPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
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
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        Ok(())
    }
}
