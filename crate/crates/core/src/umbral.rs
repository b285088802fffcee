//! Delta operators, their basic sequences and the umbral group.
//!
//! A delta operator is stored as a power series `p(δ) = Σ p_k δᵏ` in the
//! derivative `δ = d/dt`, with `p_0 = 0` and `p_1 ≠ 0`. Its basic sequence
//! comes from the generating function
//!
//! ```text
//! Σ q_n(t) uⁿ/n! = exp(t · p⁻¹(u))
//! ```
//!
//! so `β_{k,n} = (n!/k!) [uⁿ] (p⁻¹(u))ᵏ`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{factorial, rational_from_int, Scalar};
use crate::series::Series;
use crate::tpoly::TPoly;

/// Default depth of generated basic sequences.
pub const DEFAULT_DEPTH: usize = 16;

/// How a delta operator was built. Known kinds can be regenerated at any
/// truncation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpKind<F> {
    Derivative,
    Forward,
    Backward,
    Abel(F),
    Touchard,
    /// `outer(inner(δ))`.
    Composite(Box<DeltaOp<F>>, Box<DeltaOp<F>>),
    /// Compositional inverse of another operator.
    Inverse(Box<DeltaOp<F>>),
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaOp<F> {
    kind: OpKind<F>,
    /// Ordinary coefficients, truncated at `O(δ^(order+1))` unless exact.
    p: Series<F>,
    order: usize,
}

fn inv_factorial<F: Scalar>(k: usize) -> F {
    F::one() / F::from_rational(rational_from_int(factorial(k)))
}

impl<F: Scalar> DeltaOp<F> {
    fn builtin(kind: OpKind<F>, order: usize) -> Self {
        let coeffs: Vec<F> = (0..=order)
            .map(|k| {
                if k == 0 {
                    return F::zero();
                }
                match &kind {
                    OpKind::Derivative => {
                        if k == 1 { F::one() } else { F::zero() }
                    }
                    OpKind::Forward => inv_factorial(k),
                    OpKind::Backward => {
                        let c = inv_factorial::<F>(k);
                        if k % 2 == 1 { c } else { -c }
                    }
                    // u e^{αu}: p_k = α^{k-1}/(k-1)!
                    OpKind::Abel(alpha) => alpha.pow(k - 1) * inv_factorial(k - 1),
                    OpKind::Touchard => {
                        let c = F::one() / F::from_i64(k as i64);
                        if k % 2 == 1 { c } else { -c }
                    }
                    _ => unreachable!("not a builtin kind"),
                }
            })
            .collect();
        let p = match kind {
            OpKind::Derivative => Series::x(),
            _ => Series::truncated(coeffs, order + 1),
        };
        DeltaOp { kind, p, order }
    }

    /// `δ` itself.
    pub fn derivative(order: usize) -> Self {
        Self::builtin(OpKind::Derivative, order)
    }

    /// Forward difference `△ = e^δ − 1`.
    pub fn forward(order: usize) -> Self {
        Self::builtin(OpKind::Forward, order)
    }

    /// Backward difference `▽ = 1 − e^{−δ}`.
    pub fn backward(order: usize) -> Self {
        Self::builtin(OpKind::Backward, order)
    }

    /// Abel operator `E^α δ = δ e^{αδ}`.
    pub fn abel(alpha: F, order: usize) -> Self {
        Self::builtin(OpKind::Abel(alpha), order)
    }

    /// Touchard operator `log(1 + δ)`.
    pub fn touchard(order: usize) -> Self {
        Self::builtin(OpKind::Touchard, order)
    }

    /// An operator from explicit ordinary coefficients.
    pub fn custom(p: Series<F>) -> Result<Self> {
        Self::check(&p)?;
        let order = p.big_o().map_or(p.degree().unwrap_or(1), |b| b - 1);
        Ok(DeltaOp { kind: OpKind::Custom, p, order })
    }

    fn check(p: &Series<F>) -> Result<()> {
        if !p.coeff(0).is_zero() {
            return Err(Error::Precondition("delta operator needs p_0 = 0".into()));
        }
        if p.coeff(1).is_zero() || p.big_o().is_some_and(|b| b < 2) {
            return Err(Error::Precondition("delta operator needs p_1 != 0".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> &OpKind<F> {
        &self.kind
    }

    pub fn series(&self) -> &Series<F> {
        &self.p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> F {
        self.p.coeff(k)
    }

    /// The same operator with coefficients valid through `order`.
    pub fn at_order(&self, order: usize) -> Result<Self> {
        Ok(match &self.kind {
            OpKind::Derivative | OpKind::Forward | OpKind::Backward | OpKind::Touchard => {
                Self::builtin(self.kind.clone(), order)
            }
            OpKind::Abel(a) => Self::builtin(OpKind::Abel(a.clone()), order),
            OpKind::Composite(outer, inner) => outer.at_order(order)?.compose(&inner.at_order(order)?)?,
            OpKind::Inverse(base) => base.at_order(order)?.inverse()?,
            OpKind::Custom => {
                if self.p.is_exact() || order <= self.order {
                    let p = if self.p.is_exact() { self.p.clone() } else { self.p.truncate(order + 1) };
                    DeltaOp { kind: OpKind::Custom, p, order }
                } else {
                    return Err(Error::OrderExceeded { requested: order, available: self.order });
                }
            }
        })
    }

    /// `self(inner(δ))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let order = self.order.min(inner.order);
        let p = self.p.compose(&inner.p.truncate(order + 1))?.truncate(order + 1);
        let p = if self.p.is_exact() && inner.p.is_exact() { p.into_polynomial() } else { p };
        Ok(DeltaOp {
            kind: OpKind::Composite(Box::new(self.clone()), Box::new(inner.clone())),
            p,
            order,
        })
    }

    /// The operator whose series is `p⁻¹`.
    pub fn inverse(&self) -> Result<Self> {
        if let OpKind::Inverse(base) = &self.kind {
            return base.at_order(self.order);
        }
        let p = self.p.compositional_inverse(self.order)?;
        let p = if matches!(self.kind, OpKind::Derivative) { p.into_polynomial() } else { p };
        Ok(DeltaOp { kind: OpKind::Inverse(Box::new(self.clone())), p, order: self.order })
    }

    /// Apply `Σ p_k δᵏ` to a polynomial in `t`. The sum is finite; the
    /// operator is regenerated when its stored order is too small.
    pub fn apply(&self, poly: &TPoly<F>) -> Result<TPoly<F>> {
        let deg = poly.degree().unwrap_or(0);
        let op = if deg > self.order && !self.p.is_exact() { self.at_order(deg)? } else { self.clone() };
        let mut acc = TPoly::zero();
        let mut d = poly.clone();
        for k in 1..=deg {
            d = d.derivative();
            let c = op.coeff(k);
            if !c.is_zero() {
                acc = &acc + &d.scale(&c);
            }
        }
        Ok(acc)
    }

    pub fn name(&self) -> String {
        match &self.kind {
            OpKind::Derivative => "derivative".into(),
            OpKind::Forward => "forward".into(),
            OpKind::Backward => "backward".into(),
            OpKind::Abel(a) => format!("abel:{a}"),
            OpKind::Touchard => "touchard".into(),
            OpKind::Composite(o, i) => format!("({})∘({})", o.name(), i.name()),
            OpKind::Inverse(b) => format!("inverse({})", b.name()),
            OpKind::Custom => "custom".into(),
        }
    }
}

impl<F: Scalar> fmt::Display for DeltaOp<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Apply a delta operator to a polynomial in `t`.
pub fn apply_delta_tpoly<F: Scalar>(q: &DeltaOp<F>, p: &TPoly<F>) -> Result<TPoly<F>> {
    q.apply(p)
}

/// Basic polynomials `q_0, …, q_depth` of a delta operator.
#[derive(Clone, Debug)]
pub struct BasicSequence<F> {
    op: DeltaOp<F>,
    /// `beta[n][k]` is the coefficient of `tᵏ` in `q_n`.
    beta: Vec<Vec<F>>,
    polys: Vec<TPoly<F>>,
}

impl<F: Scalar> PartialEq for BasicSequence<F> {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta
    }
}

impl<F: Scalar> BasicSequence<F> {
    /// Generate `q_0..q_depth` from `exp(t p⁻¹(u))`.
    pub fn generate(q: &DeltaOp<F>, depth: usize) -> Result<Self> {
        let ord = depth.max(1);
        let op = if q.order() == ord { q.clone() } else { q.at_order(ord)? };
        let inv = op.series().compositional_inverse(ord)?;
        let mut beta = vec![vec![F::zero(); 1]; depth + 1];
        for (n, row) in beta.iter_mut().enumerate() {
            row.resize(n + 1, F::zero());
        }
        beta[0][0] = F::one();
        let mut power = Series::one();
        for k in 1..=depth {
            power = (&power * &inv).truncate(depth + 1);
            for (n, row) in beta.iter_mut().enumerate().skip(k) {
                let c = power.coeff(n);
                if !c.is_zero() {
                    let scale = F::from_rational(crate::scalar::Rational::new(factorial(n), factorial(k)));
                    row[k] = c * scale;
                }
            }
        }
        Ok(Self::from_beta(op, beta))
    }

    fn from_beta(op: DeltaOp<F>, beta: Vec<Vec<F>>) -> Self {
        let polys = beta.iter().map(|row| TPoly::new(row.clone())).collect();
        BasicSequence { op, beta, polys }
    }

    /// The monomial basis `q_n = tⁿ`.
    pub fn monomial(depth: usize) -> Self {
        let beta = (0..=depth)
            .map(|n| (0..=n).map(|k| if k == n { F::one() } else { F::zero() }).collect())
            .collect();
        Self::from_beta(DeltaOp::derivative(depth), beta)
    }

    pub fn op(&self) -> &DeltaOp<F> {
        &self.op
    }

    pub fn depth(&self) -> usize {
        self.beta.len() - 1
    }

    /// Coefficient of `tᵏ` in `q_n`.
    pub fn beta(&self, k: usize, n: usize) -> F {
        self.beta.get(n).and_then(|row| row.get(k)).cloned().unwrap_or_else(F::zero)
    }

    /// Rows `q_0..q_depth`, each listing `t`-coefficients.
    pub fn rows(&self) -> &[Vec<F>] {
        &self.beta
    }

    pub fn poly(&self, n: usize) -> &TPoly<F> {
        &self.polys[n]
    }

    pub fn polys(&self) -> &[TPoly<F>] {
        &self.polys
    }

    pub fn is_monomial(&self) -> bool {
        self.beta
            .iter()
            .enumerate()
            .all(|(n, row)| row.iter().enumerate().all(|(k, c)| if k == n { c.is_one() } else { c.is_zero() }))
    }

    /// Expansion of monomials in this basis: `gamma[m][j]` is the
    /// coefficient of `q_j` in `t^m`. Inverse of the β triangle.
    pub fn gamma(&self) -> Vec<Vec<F>> {
        let depth = self.depth();
        let mut gamma: Vec<Vec<F>> = Vec::with_capacity(depth + 1);
        for m in 0..=depth {
            // t^m = Σ_j gamma[m][j] q_j; solve top-down in j
            let mut row = vec![F::zero(); m + 1];
            let mut rest = vec![F::zero(); m + 1];
            rest[m] = F::one();
            for j in (0..=m).rev() {
                let c = rest[j].clone() / self.beta[j][j].clone();
                if !c.is_zero() {
                    for (k, slot) in rest.iter_mut().enumerate().take(j + 1) {
                        *slot = slot.clone() - c.clone() * self.beta[j][k].clone();
                    }
                }
                row[j] = c;
            }
            gamma.push(row);
        }
        gamma
    }

    /// Defining axioms: `q_0 = 1`, `q_n(0) = 0`, `Q q_n = n q_{n−1}`.
    pub fn check_axioms(&self) -> Result<bool> {
        if self.polys[0] != TPoly::one() {
            return Ok(false);
        }
        for n in 1..=self.depth() {
            if !self.beta(0, n).is_zero() || self.beta(n, n).is_zero() {
                return Ok(false);
            }
            let lhs = self.op.apply(&self.polys[n])?;
            if lhs != self.polys[n - 1].scale(&F::from_i64(n as i64)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Generate the basic sequence of a delta operator.
pub fn basic_sequence_from_delta<F: Scalar>(q: &DeltaOp<F>, depth: usize) -> Result<BasicSequence<F>> {
    BasicSequence::generate(q, depth)
}

/// The umbral operator `tⁿ ↦ q_n(t)`.
#[derive(Clone, Debug)]
pub struct UmbralOperator<F> {
    basis: Arc<BasicSequence<F>>,
}

impl<F: Scalar> UmbralOperator<F> {
    pub fn new(basis: Arc<BasicSequence<F>>) -> Self {
        UmbralOperator { basis }
    }

    pub fn basis(&self) -> &Arc<BasicSequence<F>> {
        &self.basis
    }

    pub fn apply(&self, p: &TPoly<F>) -> Result<TPoly<F>> {
        let deg = p.degree().unwrap_or(0);
        if deg > self.basis.depth() {
            return Err(Error::OrderExceeded { requested: deg, available: self.basis.depth() });
        }
        Ok(p.coeffs()
            .iter()
            .enumerate()
            .fold(TPoly::zero(), |acc, (k, c)| &acc + &self.basis.poly(k).scale(c)))
    }
}

pub fn umbral_apply<F: Scalar>(l: &UmbralOperator<F>, p: &TPoly<F>) -> Result<TPoly<F>> {
    l.apply(p)
}

/// `c_n = a_n(b(t))`: replace each `tᵏ` in `a_n` by `b_k`. The result is the
/// basic sequence of `f(g(δ))` when `a ↔ f(δ)` and `b ↔ g(δ)`; as β
/// matrices it is the product `B·A`.
pub fn umbral_compose<F: Scalar>(a: &BasicSequence<F>, b: &BasicSequence<F>) -> Result<BasicSequence<F>> {
    if a.depth() != b.depth() {
        return Err(Error::LengthMismatch { left: a.depth(), right: b.depth() });
    }
    let beta = a
        .rows()
        .iter()
        .enumerate()
        .map(|(n, row)| {
            (0..=n)
                .map(|j| {
                    (j..=n).fold(F::zero(), |acc, k| {
                        let ak = row[k].clone();
                        if ak.is_zero() { acc } else { acc + ak * b.beta(j, k) }
                    })
                })
                .collect()
        })
        .collect();
    let op = a.op().compose(b.op())?;
    Ok(BasicSequence::from_beta(op, beta))
}

/// Basic sequence of the compositional inverse operator.
pub fn umbral_inverse<F: Scalar>(a: &BasicSequence<F>) -> Result<BasicSequence<F>> {
    BasicSequence::generate(&a.op().inverse()?, a.depth())
}

/// `c_k = [T q_k(t)]_{t=0}`, so that `T = Σ c_k Qᵏ / k!`.
pub fn first_expansion<F: Scalar>(t_op: &Series<F>, q: &DeltaOp<F>, depth: usize) -> Result<Vec<F>> {
    let basis = BasicSequence::generate(q, depth)?;
    (0..=depth)
        .map(|k| {
            let mut d = basis.poly(k).clone();
            let mut acc = F::zero();
            for j in 0..=k {
                if j > 0 {
                    d = d.derivative();
                }
                let c = t_op.coeff(j);
                if !c.is_zero() {
                    acc = acc + c * d.coeff(0);
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Rebuild `Σ c_k Qᵏ / k!` as a δ-series valid through `depth`.
pub fn reconstruct_from_expansion<F: Scalar>(c: &[F], q: &DeltaOp<F>, depth: usize) -> Result<Series<F>> {
    let p = q.at_order(depth)?.series().truncate(depth + 1);
    let mut acc = Series::truncated(Vec::new(), depth + 1);
    let mut power = Series::one();
    for (k, ck) in c.iter().enumerate().take(depth + 1) {
        if k > 0 {
            power = (&power * &p).truncate(depth + 1);
        }
        acc = &acc + &power.scale(&(ck.clone() * inv_factorial(k)));
    }
    Ok(acc)
}

/// `E^a = e^{aδ}` through `order`.
pub fn shift_operator<F: Scalar>(a: &F, order: usize) -> Series<F> {
    Series::truncated((0..=order).map(|k| a.pow(k) * inv_factorial(k)).collect(), order + 1)
}

fn stirling_check(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::OutOfRange(format!("Stirling index k={k} exceeds n={n}")));
    }
    Ok(())
}

/// Stirling numbers of the second kind, `S(n, k) = k S(n−1, k) + S(n−1, k−1)`.
pub fn stirling2<F: Scalar>(n: usize, k: usize) -> Result<F> {
    stirling_check(n, k)?;
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); m + 1];
        for j in 1..=m {
            let keep = if j < m { &row[j] * BigInt::from(j) } else { BigInt::zero() };
            next[j] = keep + &row[j - 1];
        }
        row = next;
    }
    Ok(F::from_rational(rational_from_int(row[k].clone())))
}

/// Signed Stirling numbers of the first kind: `(t)_n = Σ s(n, k) tᵏ`.
pub fn signed_stirling1<F: Scalar>(n: usize, k: usize) -> Result<F> {
    stirling_check(n, k)?;
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        // multiply by (t − (m−1))
        let shift = BigInt::from(m - 1);
        let mut next = vec![BigInt::zero(); m + 1];
        for j in 0..m {
            next[j + 1] += &row[j];
            next[j] -= &row[j] * &shift;
        }
        row = next;
    }
    Ok(F::from_rational(rational_from_int(row[k].clone())))
}
