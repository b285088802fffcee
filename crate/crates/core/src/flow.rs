//! Bivariate flows `Σ c_n(x) · bₙ(t)` where `bₙ` is either `tⁿ` or a basic
//! polynomial `q_n(t)`.

use std::sync::Arc;


use crate::error::{Error, Result};
use crate::scalar::{binomial, rational_from_int, Scalar};
use crate::series::XSeries;
use crate::umbral::BasicSequence;

#[derive(Clone, Debug)]
pub enum Basis<F> {
    /// `bₙ(t) = tⁿ`.
    Monomial,
    /// `bₙ(t) = q_n(t)` from a basic sequence.
    Basic(Arc<BasicSequence<F>>),
}

impl<F: Scalar> Basis<F> {
    pub fn same_as(&self, other: &Self) -> bool {
        match (self, other) {
            (Basis::Monomial, Basis::Monomial) => true,
            (Basis::Basic(a), Basis::Basic(b)) => Arc::ptr_eq(a, b) || **a == **b,
            _ => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Basis::Monomial => "monomial".into(),
            Basis::Basic(b) => b.op().name(),
        }
    }
}

/// A flow truncated at `t`-order `N`. `terms[0]` is the base point (`x`
/// for a flow, `0` for a semiflow) and `terms[n]` multiplies `bₙ(t)`.
#[derive(Clone, Debug)]
pub struct Flow<F> {
    terms: Vec<XSeries<F>>,
    basis: Basis<F>,
}

impl<F: Scalar> Flow<F> {
    pub fn new(terms: Vec<XSeries<F>>, basis: Basis<F>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Precondition("a flow needs at least its base point".into()));
        }
        if let Basis::Basic(b) = &basis {
            if b.depth() + 1 < terms.len() {
                return Err(Error::OrderExceeded { requested: terms.len() - 1, available: b.depth() });
            }
        }
        Ok(Flow { terms, basis })
    }

    pub fn monomial(terms: Vec<XSeries<F>>) -> Self {
        Flow::new(terms, Basis::Monomial).expect("monomial flows need a base point")
    }

    pub fn terms(&self) -> &[XSeries<F>] {
        &self.terms
    }

    pub fn term(&self, n: usize) -> XSeries<F> {
        self.terms.get(n).cloned().unwrap_or_else(XSeries::zero)
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn basis(&self) -> &Basis<F> {
        &self.basis
    }

    pub fn is_semiflow(&self) -> bool {
        self.terms[0].is_zero()
    }

    /// The generator `f`, read off the first-order coefficient (the same in
    /// every basis since `A₁ = f`).
    pub fn generator(&self) -> XSeries<F> {
        self.term(1)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Flow { terms: self.terms.iter().take(order + 1).cloned().collect(), basis: self.basis.clone() }
    }

    pub fn with_base_point(&self, base: XSeries<F>) -> Self {
        let mut terms = self.terms.clone();
        terms[0] = base;
        Flow { terms, basis: self.basis.clone() }
    }

    /// Coefficients of `tⁿ`, lossless since each `q_n` has degree `n`.
    pub fn to_monomial(&self) -> Self {
        match &self.basis {
            Basis::Monomial => self.clone(),
            Basis::Basic(b) => {
                let n = self.order();
                let terms = (0..=n)
                    .map(|k| {
                        (k..=n).fold(XSeries::zero(), |acc, m| {
                            let c = b.beta(k, m);
                            if c.is_zero() { acc } else { &acc + &self.terms[m].scale(&c) }
                        })
                    })
                    .collect();
                Flow::monomial(terms)
            }
        }
    }

    /// Re-expand over a basic sequence.
    pub fn to_basic(&self, basis: Arc<BasicSequence<F>>) -> Result<Self> {
        let mono = self.to_monomial();
        let n = mono.order();
        if basis.depth() < n {
            return Err(Error::OrderExceeded { requested: n, available: basis.depth() });
        }
        let gamma = basis.gamma();
        let terms = (0..=n)
            .map(|j| {
                (j..=n).fold(XSeries::zero(), |acc, m| {
                    let c = &gamma[m][j];
                    if c.is_zero() { acc } else { &acc + &mono.terms[m].scale(c) }
                })
            })
            .collect();
        Flow::new(terms, Basis::Basic(basis))
    }

    /// Evaluate the time dependence at `t`.
    pub fn eval_t(&self, t: &F) -> XSeries<F> {
        self.terms.iter().enumerate().fold(XSeries::zero(), |acc, (n, c)| {
            let w = match &self.basis {
                Basis::Monomial => t.pow(n),
                Basis::Basic(b) => b.poly(n).eval(t),
            };
            if w.is_zero() { acc } else { &acc + &c.scale(&w) }
        })
    }

    pub fn eval(&self, t: &F, x: &F) -> Result<F> {
        self.eval_t(t).eval(x)
    }

    /// `t ↦ c t` on a monomial flow.
    pub fn scale_time(&self, c: &F) -> Self {
        let mono = self.to_monomial();
        Flow::monomial(mono.terms.iter().enumerate().map(|(k, a)| a.scale(&c.pow(k))).collect())
    }

    pub fn x_derivative(&self) -> Self {
        Flow { terms: self.terms.iter().map(XSeries::derivative).collect(), basis: self.basis.clone() }
    }

    /// `∂ₜ` of the monomial form; the result has order `N − 1`.
    pub fn t_derivative(&self) -> Self {
        let mono = self.to_monomial();
        let terms: Vec<_> = mono
            .terms
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&F::from_i64(k as i64)))
            .collect();
        if terms.is_empty() {
            return Flow::monomial(vec![XSeries::zero()]);
        }
        Flow::monomial(terms)
    }

    /// Coefficient-wise difference in this flow's own basis.
    pub fn difference(&self, other: &Self) -> Result<Vec<XSeries<F>>> {
        if !self.basis.same_as(&other.basis) {
            return Err(Error::BasisMismatch);
        }
        let n = self.order().max(other.order());
        Ok((0..=n).map(|k| &self.term(k) - &other.term(k)).collect())
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.order().min(other.order());
        self.basis.same_as(&other.basis) && (0..=n).all(|k| self.terms[k].agrees_with(&other.terms[k]))
    }
}

/// `Σ_k c_k tᵏ` products with no truncation in `t`.
pub(crate) fn tx_mul<F: Scalar>(a: &[XSeries<F>], b: &[XSeries<F>], limit: Option<usize>) -> Vec<XSeries<F>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let len = limit.map_or(len, |l| len.min(l + 1));
    let mut out = vec![XSeries::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if !bj.is_zero() {
                out[i + j] = &out[i + j] + &(ai * bj);
            }
        }
    }
    out
}

/// `f^{(k)}(x)/k!`, i.e. `Σ_j C(j+k, k) f_{j+k} xʲ`.
fn taylor_coefficient<F: Scalar>(f: &XSeries<F>, k: usize) -> XSeries<F> {
    let coeffs: Vec<F> = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(k)
        .map(|(m, c)| c.clone() * F::from_rational(rational_from_int(binomial(m, k))))
        .collect();
    match f.big_o() {
        Some(b) => XSeries::truncated(coeffs, b.saturating_sub(k)),
        None => XSeries::from_coeffs(coeffs),
    }
}

fn displacement<F: Scalar>(w: &Flow<F>) -> Result<Vec<XSeries<F>>> {
    let mono = w.to_monomial();
    let mut d = mono.terms.clone();
    d[0] = &d[0] - &XSeries::x();
    if !d[0].is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    Ok(d)
}

/// `f(W) = Σ_k f⁽ᵏ⁾(x)/k! (W − x)ᵏ`, truncated at `W`'s `t`-order. `W`
/// must reduce to `x` at `t = 0`. With a truncated `f` the `k`-th term
/// loses `k` orders of `x`-precision.
pub fn taylor_compose<F: Scalar>(f: &XSeries<F>, w: &Flow<F>) -> Result<Flow<F>> {
    let d = displacement(w)?;
    let n = w.order();
    let kmax = if f.is_exact() { f.degree().unwrap_or(0).min(n) } else { n };
    let mut acc: Vec<XSeries<F>> = vec![taylor_coefficient(f, kmax)];
    for k in (0..kmax).rev() {
        acc = tx_mul(&acc, &d, Some(n));
        acc[0] = &acc[0] + &taylor_coefficient(f, k);
    }
    acc.resize(n + 1, XSeries::zero());
    Ok(Flow::monomial(acc))
}

/// `f(W)` as an exact polynomial in `t` (no truncation). Needs a
/// polynomial `f`; the Taylor sum of a series would not terminate.
pub fn taylor_compose_exact<F: Scalar>(f: &XSeries<F>, w: &Flow<F>) -> Result<Vec<XSeries<F>>> {
    if !f.is_exact() {
        return Err(Error::UnboundedComposition);
    }
    let d = displacement(w)?;
    let kmax = f.degree().unwrap_or(0);
    let mut acc: Vec<XSeries<F>> = vec![taylor_coefficient(f, kmax)];
    for k in (0..kmax).rev() {
        acc = tx_mul(&acc, &d, None);
        if acc.is_empty() {
            acc.push(XSeries::zero());
        }
        acc[0] = &acc[0] + &taylor_coefficient(f, k);
    }
    while acc.len() > 1 && acc.last().is_some_and(XSeries::is_zero) {
        acc.pop();
    }
    Ok(acc)
}
