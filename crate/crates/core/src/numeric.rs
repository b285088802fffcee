//! Floating-point checks of the exponential closed forms of linear
//! semiflows, and the Lambert W function they need for Abel operators.
//!
//! For `f = ax + b` the semiflow is `(ax + b)/a · Σ aⁿ q_n(t)/n!`, whose
//! sum is `e^{t p⁻¹(a)} − 1`. Each term `aⁿ q_n(t)/n!` is evaluated exactly
//! in ℚ from the explicit basic polynomials, and only the partial sum is
//! converted to `f64`.

use std::f64::consts::E;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::umbral::DeltaOp;

/// Tolerances and sample grid for closed-form checks.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericConfig {
    pub tolerance: f64,
    /// Number of terms in the partial sums.
    pub depth: usize,
    /// Exact `(a, t)` samples.
    pub samples: Vec<(Rational, Rational)>,
    /// Abel parameters; `|α a|` must stay below `1/e` for convergence.
    pub abel_alphas: Vec<Rational>,
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            tolerance: 1e-9,
            depth: 64,
            samples: vec![(ratio(1, 2), ratio(1, 10)), (ratio(1, 4), ratio(1, 2))],
            abel_alphas: vec![ratio(1, 2), ratio(-1, 2)],
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Precondition("tolerance must be positive".into()));
        }
        if self.depth == 0 {
            return Err(Error::Precondition("partial-sum depth must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NumericKind {
    Forward,
    Backward,
    Abel(Rational),
    Touchard,
}

impl NumericKind {
    /// The exact operator behind this kind.
    pub fn op(&self, order: usize) -> DeltaOp<Rational> {
        match self {
            NumericKind::Forward => DeltaOp::forward(order),
            NumericKind::Backward => DeltaOp::backward(order),
            NumericKind::Abel(alpha) => DeltaOp::abel(alpha.clone(), order),
            NumericKind::Touchard => DeltaOp::touchard(order),
        }
    }

    pub fn name(&self) -> String {
        match self {
            NumericKind::Forward => "forward".into(),
            NumericKind::Backward => "backward".into(),
            NumericKind::Abel(a) => format!("abel:{a}"),
            NumericKind::Touchard => "touchard".into(),
        }
    }

    /// `p⁻¹(a)` in closed form.
    pub fn inverse_at(&self, a: f64) -> Result<f64> {
        Ok(match self {
            NumericKind::Forward => a.ln_1p(),
            NumericKind::Backward => -(-a).ln_1p(),
            NumericKind::Abel(alpha) => {
                let alpha = alpha.to_f64().unwrap_or(f64::NAN);
                if alpha == 0.0 { a } else { lambert_w(alpha * a)? / alpha }
            }
            NumericKind::Touchard => a.exp_m1(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericReport {
    pub kind: String,
    pub partial_sum: f64,
    pub closed_form: f64,
    pub deviation: f64,
    pub terms: usize,
}

impl NumericReport {
    pub fn within(&self, tol: f64) -> bool {
        self.deviation < tol
    }
}

/// Compare `(ax + b)/a · Σ_{n=1}^{D} aⁿ q_n(t)/n!` with
/// `(ax + b)/a · (e^{t p⁻¹(a)} − 1)`. For `a = 0` both sides reduce to
/// `b t`.
pub fn numeric_closed_form_check(
    kind: &NumericKind,
    a: &Rational,
    b: &Rational,
    t: &Rational,
    x: &Rational,
    cfg: &NumericConfig,
) -> Result<NumericReport> {
    cfg.validate()?;
    if a.is_zero() {
        let v = (b * t).to_f64().unwrap_or(f64::NAN);
        return Ok(NumericReport { kind: kind.name(), partial_sum: v, closed_form: v, deviation: 0.0, terms: 1 });
    }
    let depth = cfg.depth;
    let terms = basic_terms(kind, a, t, depth)?;
    let sum = terms.iter().fold(Rational::zero(), |acc, x| acc + x);
    let last = terms.last().map_or(0.0, Scalar::magnitude);
    // a few successive terms must be negligible against the tolerance
    let tail: f64 = terms.iter().rev().take(4).map(Scalar::magnitude).fold(0.0, f64::max);
    if !tail.is_finite() || tail > cfg.tolerance * 0.1 {
        return Err(Error::Divergence { depth, last_term: last });
    }
    let scale = ((a * x + b) / a).to_f64().unwrap_or(f64::NAN);
    let t_f = t.to_f64().unwrap_or(f64::NAN);
    let a_f = a.to_f64().unwrap_or(f64::NAN);
    let closed = scale * (t_f * kind.inverse_at(a_f)?).exp_m1();
    let partial = scale * sum.to_f64().unwrap_or(f64::NAN);
    Ok(NumericReport {
        kind: kind.name(),
        partial_sum: partial,
        closed_form: closed,
        deviation: (partial - closed).abs(),
        terms: depth,
    })
}

/// `aⁿ q_n(t)/n!` for `n = 1..=depth`, with `q_n` the falling or rising
/// factorial, the Abel polynomial `t(t − nα)^{n−1}`, or `Σ S(n,k) tᵏ`.
fn basic_terms(kind: &NumericKind, a: &Rational, t: &Rational, depth: usize) -> Result<Vec<Rational>> {
    let one = Rational::from_i64(1);
    let mut out = Vec::with_capacity(depth);
    let mut coef = one.clone();
    let mut product = one.clone();
    let stirling = match kind {
        NumericKind::Touchard => Some(stirling2_rows(depth)),
        _ => None,
    };
    for n in 1..=depth {
        let m = Rational::from_i64(n as i64);
        coef = coef * a / &m;
        let q = match kind {
            NumericKind::Forward => {
                product *= t - (&m - &one);
                product.clone()
            }
            NumericKind::Backward => {
                product *= t + (&m - &one);
                product.clone()
            }
            NumericKind::Abel(alpha) => t * Scalar::pow(&(t - &m * alpha), n - 1),
            NumericKind::Touchard => {
                let row = &stirling.as_ref().expect("table built for touchard")[n];
                let mut acc = Rational::zero();
                for s in row.iter().rev() {
                    acc = acc * t + s;
                }
                acc
            }
        };
        out.push(&coef * q);
    }
    Ok(out)
}

/// Rows `S(n, 0..=n)` of the second-kind Stirling triangle.
fn stirling2_rows(depth: usize) -> Vec<Vec<Rational>> {
    let mut rows = vec![vec![Rational::from_i64(1)]];
    for n in 1..=depth {
        let prev = &rows[n - 1];
        let row = (0..=n)
            .map(|k| {
                let keep = prev.get(k).map_or(Rational::zero(), |s| s * Rational::from_i64(k as i64));
                let new = if k > 0 { prev.get(k - 1).cloned().unwrap_or_default() } else { Rational::zero() };
                keep + new
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// The builtin kinds on the default grid: forward, backward, each Abel
/// parameter, Touchard.
pub fn default_kinds(cfg: &NumericConfig) -> Vec<NumericKind> {
    let mut kinds = vec![NumericKind::Forward, NumericKind::Backward];
    kinds.extend(cfg.abel_alphas.iter().cloned().map(NumericKind::Abel));
    kinds.push(NumericKind::Touchard);
    kinds
}

const BRANCH: f64 = -1.0 / E;

/// Principal branch `W₀(x)` for `x ≥ −1/e`, by Halley iteration on
/// `w eʷ − x`.
///
/// Starting guesses: a series in `p = √(2(ex + 1))` near the branch point,
/// `ln(1+x)`-based for moderate `x`, and `L₁ − L₂ + L₂/L₁` asymptotics for
/// large `x`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH - 1e-15 {
        return Err(Error::OutOfRange(format!("lambert_w({x}) below -1/e")));
    }
    if x <= BRANCH {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x <= E {
        let l = x.ln_1p();
        l * (1.0 - (l.ln_1p()) / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..50 {
        let ew = w.exp();
        let fw = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * fw / (2.0 * wp1);
        let step = fw / denom;
        w -= step;
        if step.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// `|W(x) e^{W(x)} − x|`.
pub fn lambert_residual(x: f64) -> Result<f64> {
    let w = lambert_w(x)?;
    Ok((w * w.exp() - x).abs())
}

/// Grid over `[−0.3, 10]`: zero, log-spaced magnitudes `10^{−8}..0.3` on
/// the negative side and `10^{−8}..10` on the positive side.
pub fn lambert_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    let steps = 40;
    let span = |lo: f64, hi: f64| (0..=steps).map(move |k| lo * (hi / lo).powf(k as f64 / steps as f64));
    grid.extend(span(1e-8, 0.3).map(|m| -m));
    grid.extend(span(1e-8, 10.0));
    grid
}
