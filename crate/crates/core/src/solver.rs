//! Exact closed-form solutions of first-order difference equations
//! `y_{n+1} = g(y_n)`, with brute-force iteration as the oracle.
//!
//! Writing `f = g − x`, the forward problem is `△y = f(y)` and its
//! candidate solution is the forward delta flow evaluated at integer time:
//! `y_n = x + Σ_{k=1}^{n} A_k(x) C(n, k)`.

use std::sync::Arc;


use crate::autonomous::{aut_scale, autonomous_sequence, AutonomousSequence};
use crate::deltaflow::{delta_flow, delta_flow_over, poly_flow_product, DeltaFlow, Residual};
use crate::error::{Error, Result};
use crate::scalar::{binomial, rational_from_int, Scalar};
use crate::series::XSeries;
use crate::umbral::{BasicSequence, DeltaOp};

/// `y_{n+1} = g(y_n)` from `x₀` over a horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceProblem<F> {
    pub g: XSeries<F>,
    pub f: XSeries<F>,
    pub x0: F,
    pub horizon: usize,
}

impl<F: Scalar> DifferenceProblem<F> {
    pub fn new(g: XSeries<F>, x0: F, horizon: usize) -> Result<Self> {
        if !g.is_exact() {
            return Err(Error::Precondition("difference maps must be polynomials".into()));
        }
        let f = &g - &XSeries::x();
        Ok(DifferenceProblem { g, f, x0, horizon })
    }

    /// Closed and iterated values side by side.
    pub fn table(&self) -> Result<IterateTable<F>> {
        let solver = ForwardSolver::new(&self.g, self.horizon)?;
        let iterated = iterate(&self.g, &self.x0, self.horizon)?;
        let rows = iterated
            .into_iter()
            .enumerate()
            .map(|(n, it)| {
                let closed = solver.solve(&self.x0, n)?;
                let equal = closed == it;
                Ok(IterateRow { n, closed, iterated: it, equal })
            })
            .collect::<Result<_>>()?;
        Ok(IterateTable { rows })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterateRow<F> {
    pub n: usize,
    pub closed: F,
    pub iterated: F,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterateTable<F> {
    pub rows: Vec<IterateRow<F>>,
}

impl<F: Scalar> IterateTable<F> {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(|r| r.equal)
    }

    pub fn first_mismatch(&self) -> Option<&IterateRow<F>> {
        self.rows.iter().find(|r| !r.equal)
    }
}

/// `y₀ = x₀`, `y_{k+1} = g(y_k)`; returns `y₀..=y_n`.
pub fn iterate<F: Scalar>(g: &XSeries<F>, x0: &F, n: usize) -> Result<Vec<F>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(x0.clone());
    for k in 0..n {
        let next = g.eval(&out[k])?;
        out.push(next);
    }
    Ok(out)
}

/// Autonomous polynomials of `f = g − x`, computed once to a fixed depth.
#[derive(Clone, Debug)]
pub struct ForwardSolver<F> {
    seq: AutonomousSequence<F>,
}

impl<F: Scalar> ForwardSolver<F> {
    pub fn new(g: &XSeries<F>, depth: usize) -> Result<Self> {
        let f = g - &XSeries::x();
        Ok(ForwardSolver { seq: autonomous_sequence(&f, depth.max(1))? })
    }

    pub fn depth(&self) -> usize {
        self.seq.len()
    }

    /// `x₀ + Σ_{k=1}^{n} A_k(x₀) C(n, k)`.
    pub fn solve(&self, x0: &F, n: usize) -> Result<F> {
        if n > self.depth() {
            return Err(Error::OrderExceeded { requested: n, available: self.depth() });
        }
        let mut acc = x0.clone();
        for k in 1..=n {
            let a = self.seq.term(k).eval(x0)?;
            if !a.is_zero() {
                acc = acc + a * F::from_rational(rational_from_int(binomial(n, k)));
            }
        }
        Ok(acc)
    }
}

pub fn solve_forward<F: Scalar>(g: &XSeries<F>, x0: &F, n: usize) -> Result<F> {
    ForwardSolver::new(g, n)?.solve(x0, n)
}

/// The logistic map `y ↦ μ y (1 − y)`.
pub fn logistic_map<F: Scalar>(mu: &F) -> XSeries<F> {
    XSeries::from_coeffs(vec![F::zero(), mu.clone(), -mu.clone()])
}

/// Factored solution of the logistic map: `f = (−x)(μx − (μ−1))`, taken
/// as a `⊛_△` product of linear semiflows and evaluated at `t = n`.
pub fn solve_logistic<F: Scalar>(mu: &F, x0: &F, n: usize) -> Result<F> {
    if mu.is_zero() {
        return Err(Error::Precondition("logistic parameter must be nonzero".into()));
    }
    let factors = [(-F::one(), F::zero()), (mu.clone(), -(mu.clone() - F::one()))];
    eval_factored(&factors, x0, n)
}

fn eval_factored<F: Scalar>(factors: &[(F, F)], x0: &F, n: usize) -> Result<F> {
    let depth = n.max(1);
    let basis = Arc::new(BasicSequence::generate(&DeltaOp::forward(depth), depth)?);
    let semi = poly_flow_product(factors, &basis, depth)?;
    let flow = semi.with_base_point();
    flow.eval(&F::from_i64(n as i64), x0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticMethod {
    /// `f = (x − α)(x − (1 − α))` with `α` in the field.
    Factored,
    /// No exact root; solved through the expanded `f`.
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSolution<F> {
    pub value: F,
    pub method: QuadraticMethod,
}

/// `z_{n+1} = z_n² + c`. `f = x² − x + c` factors over the field when
/// `1 − 4c` has an exact square root there; otherwise fall back to the
/// unfactored forward solution if allowed.
pub fn solve_quadratic_map<F: Scalar>(c: &F, z0: &F, n: usize, allow_fallback: bool) -> Result<QuadraticSolution<F>> {
    let disc = F::one() - F::from_i64(4) * c.clone();
    match disc.sqrt_exact() {
        Some(root) => {
            let two = F::from_i64(2);
            let alpha = (F::one() + root) / two;
            let beta = F::one() - alpha.clone();
            let value = eval_factored(&[(F::one(), -alpha), (F::one(), -beta)], z0, n)?;
            Ok(QuadraticSolution { value, method: QuadraticMethod::Factored })
        }
        None if allow_fallback => {
            let g = XSeries::from_coeffs(vec![c.clone(), F::zero(), F::one()]);
            Ok(QuadraticSolution { value: solve_forward(&g, z0, n)?, method: QuadraticMethod::Fallback })
        }
        None => Err(Error::Precondition("1 - 4c has no square root in this field".into())),
    }
}

/// `Φ_▽(t, x, Δf) − Φ_△(−t, x, −Δf)` in monomial coefficients.
pub fn backward_relation_check<F: Scalar>(f: &XSeries<F>, n: usize) -> Result<Residual<F>> {
    let lhs = solve_backward_series(f, n)?.to_monomial();
    let neg = aut_scale(&-F::one(), &autonomous_sequence(f, n.max(1))?);
    let fwd_basis = Arc::new(BasicSequence::generate(&DeltaOp::forward(n), n)?);
    let rhs = delta_flow_over(neg.generator(), &fwd_basis, n)?.to_monomial().scale_time(&-F::one());
    Ok(Residual::new(lhs.difference(&rhs)?))
}

/// `Φ_▽` over rising factorials. Integer-time evaluation does not
/// terminate, so this is only a series.
pub fn solve_backward_series<F: Scalar>(f: &XSeries<F>, n: usize) -> Result<DeltaFlow<F>> {
    delta_flow(f, &DeltaOp::backward(n), n)
}

/// `Φ_{A(α)}(t, x, aΔf) − Φ_{A(aα)}(at, x, Δf)` in monomial coefficients.
pub fn abel_scaling_check<F: Scalar>(alpha: &F, a: &F, f: &XSeries<F>, n: usize) -> Result<Residual<F>> {
    let lhs = delta_flow(&f.scale(a), &DeltaOp::abel(alpha.clone(), n), n)?.to_monomial();
    let rhs = delta_flow(f, &DeltaOp::abel(a.clone() * alpha.clone(), n), n)?.to_monomial().scale_time(a);
    Ok(Residual::new(lhs.difference(&rhs)?))
}
