//! Delta flows `Φ_Q = x + Σ A_n q_n(t)/n!`, the `ρ_q` ring, closed forms
//! for linear factors and monomial powers, the composition group `⊚`, and
//! connection matrices.

use std::sync::Arc;


use crate::autonomous::{aut_add, aut_scale, autonomous_sequence, flow_terms, inv_factorial, AutonomousSequence};
use crate::error::{Error, Result};
use crate::flow::{taylor_compose_exact, Basis, Flow};
use crate::scalar::{binomial, factorial, rational_from_int, Rational, Scalar};
use crate::series::XSeries;
use crate::umbral::{umbral_compose, BasicSequence, DeltaOp};

/// Coefficient-wise residual of an identity; zero means the identity holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual<F> {
    pub terms: Vec<XSeries<F>>,
}

impl<F: Scalar> Residual<F> {
    pub fn new(terms: Vec<XSeries<F>>) -> Self {
        Residual { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(XSeries::is_zero_known)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.terms.iter().position(|t| !t.is_zero_known())
    }

    /// Largest coefficient magnitude, for reporting.
    pub fn max_abs(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.coeffs().iter())
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }
}

/// A flow over a basic sequence together with its generator.
#[derive(Clone, Debug)]
pub struct DeltaFlow<F> {
    flow: Flow<F>,
    generator: XSeries<F>,
    basis: Arc<BasicSequence<F>>,
}

impl<F: Scalar> DeltaFlow<F> {
    fn from_sequence(seq: &AutonomousSequence<F>, basis: Arc<BasicSequence<F>>, base: XSeries<F>) -> Result<Self> {
        let flow = Flow::new(flow_terms(seq, base), Basis::Basic(basis.clone()))?;
        Ok(DeltaFlow { flow, generator: seq.generator().clone(), basis })
    }

    pub fn flow(&self) -> &Flow<F> {
        &self.flow
    }

    pub fn generator(&self) -> &XSeries<F> {
        &self.generator
    }

    pub fn basis(&self) -> &Arc<BasicSequence<F>> {
        &self.basis
    }

    pub fn order(&self) -> usize {
        self.flow.order()
    }

    /// Coefficient of `q_n(t)`.
    pub fn term(&self, n: usize) -> XSeries<F> {
        self.flow.term(n)
    }

    pub fn terms(&self) -> &[XSeries<F>] {
        self.flow.terms()
    }

    pub fn is_semiflow(&self) -> bool {
        self.flow.is_semiflow()
    }

    pub fn to_monomial(&self) -> Flow<F> {
        self.flow.to_monomial()
    }

    pub fn eval(&self, t: &F, x: &F) -> Result<F> {
        self.flow.eval(t, x)
    }

    /// `A_n = n! c_n` recovered from the stored coefficients.
    pub fn autonomous_terms(&self) -> Result<AutonomousSequence<F>> {
        let terms = (1..=self.order())
            .map(|n| self.flow.term(n).scale(&F::from_rational(rational_from_int(factorial(n)))))
            .collect();
        AutonomousSequence::from_terms(terms)
    }

    /// Flow with the base point `x` attached.
    pub fn with_base_point(&self) -> Self {
        DeltaFlow { flow: self.flow.with_base_point(XSeries::x()), ..self.clone() }
    }

    /// Semiflow obtained by dropping the base point.
    pub fn without_base_point(&self) -> Self {
        DeltaFlow { flow: self.flow.with_base_point(XSeries::zero()), ..self.clone() }
    }
}

fn make_basis<F: Scalar>(q: &DeltaOp<F>, n: usize) -> Result<Arc<BasicSequence<F>>> {
    Ok(Arc::new(BasicSequence::generate(q, n)?))
}

fn check_depth<F: Scalar>(basis: &BasicSequence<F>, n: usize) -> Result<()> {
    if basis.depth() < n {
        return Err(Error::OrderExceeded { requested: n, available: basis.depth() });
    }
    Ok(())
}

/// `Φ_Q(t, x) = x + Σ_{n=1}^{N} A_n(f) q_n(t)/n!`.
pub fn delta_flow<F: Scalar>(f: &XSeries<F>, q: &DeltaOp<F>, n: usize) -> Result<DeltaFlow<F>> {
    delta_flow_over(f, &make_basis(q, n)?, n)
}

pub fn delta_flow_over<F: Scalar>(f: &XSeries<F>, basis: &Arc<BasicSequence<F>>, n: usize) -> Result<DeltaFlow<F>> {
    check_depth(basis, n)?;
    DeltaFlow::from_sequence(&autonomous_sequence(f, n)?, basis.clone(), XSeries::x())
}

/// `ρ_q 𝔄(Δf)`: the delta flow without its base point.
pub fn rho_q<F: Scalar>(f: &XSeries<F>, q: &DeltaOp<F>, n: usize) -> Result<DeltaFlow<F>> {
    rho_q_over(f, &make_basis(q, n)?, n)
}

pub fn rho_q_over<F: Scalar>(f: &XSeries<F>, basis: &Arc<BasicSequence<F>>, n: usize) -> Result<DeltaFlow<F>> {
    check_depth(basis, n)?;
    DeltaFlow::from_sequence(&autonomous_sequence(f, n)?, basis.clone(), XSeries::zero())
}

fn check_pair<F: Scalar>(a: &DeltaFlow<F>, b: &DeltaFlow<F>) -> Result<()> {
    if !Basis::Basic(a.basis.clone()).same_as(&Basis::Basic(b.basis.clone())) {
        return Err(Error::BasisMismatch);
    }
    if a.order() != b.order() {
        return Err(Error::LengthMismatch { left: a.order(), right: b.order() });
    }
    Ok(())
}

/// `Ψ_f ⊞_q Ψ_g = ρ_q 𝔄(Δ(f+g))`, computed from the stored coefficients
/// through the `H_n` recursion.
pub fn rhoq_add<F: Scalar>(a: &DeltaFlow<F>, b: &DeltaFlow<F>) -> Result<DeltaFlow<F>> {
    check_pair(a, b)?;
    let sum = aut_add(&a.autonomous_terms()?, &b.autonomous_terms()?)?;
    DeltaFlow::from_sequence(&sum, a.basis.clone(), XSeries::zero())
}

/// `Ψ_f ⊛_q Ψ_g = ρ_q 𝔄(Δ(f g))`.
pub fn rhoq_mul<F: Scalar>(a: &DeltaFlow<F>, b: &DeltaFlow<F>) -> Result<DeltaFlow<F>> {
    check_pair(a, b)?;
    rho_q_over(&(&a.generator * &b.generator), &a.basis, a.order())
}

/// `ρ_q 𝔄(a Δf)`: coefficient `n` scaled by `aⁿ`.
pub fn rhoq_scale<F: Scalar>(a: &F, psi: &DeltaFlow<F>) -> Result<DeltaFlow<F>> {
    let seq = aut_scale(a, &psi.autonomous_terms()?);
    DeltaFlow::from_sequence(&seq, psi.basis.clone(), XSeries::zero())
}

/// Additive unit (`f = 0`).
pub fn rhoq_zero<F: Scalar>(basis: &Arc<BasicSequence<F>>, n: usize) -> Result<DeltaFlow<F>> {
    rho_q_over(&XSeries::zero(), basis, n)
}

/// Multiplicative unit `q₁(t)` (`f = 1`).
pub fn rhoq_unit<F: Scalar>(basis: &Arc<BasicSequence<F>>, n: usize) -> Result<DeltaFlow<F>> {
    rho_q_over(&XSeries::one(), basis, n)
}

/// Semiflow of `f = ax + b`: coefficient `a^{n−1}(ax + b)/n!` against
/// `q_n`. For `a = 0` it is `b q₁(t)`.
pub fn linear_semiflow_terms<F: Scalar>(a: &F, b: &F, basis: &Arc<BasicSequence<F>>, n: usize) -> Result<DeltaFlow<F>> {
    check_depth(basis, n)?;
    let f = XSeries::from_coeffs(vec![b.clone(), a.clone()]);
    let mut terms = vec![XSeries::zero()];
    for k in 1..=n {
        let c = if a.is_zero() {
            if k == 1 { F::one() } else { F::zero() }
        } else {
            a.pow(k - 1) * inv_factorial(k)
        };
        terms.push(f.scale(&c));
    }
    let flow = Flow::new(terms, Basis::Basic(basis.clone()))?;
    Ok(DeltaFlow { flow, generator: f, basis: basis.clone() })
}

/// Compare `L(x (1 − a(k−1) x^{k−1} t)^{−1/(k−1)} − x)` with
/// `ρ_q 𝔄(a Δ(x^k))`, the latter built as the `k`-fold `⊛_q` power of
/// `ρ_q 𝔄(Δx)` scaled by `a`. Returns the coefficient difference.
pub fn monomial_power_identity<F: Scalar>(a: &F, k: usize, basis: &Arc<BasicSequence<F>>, n: usize) -> Result<Residual<F>> {
    if k < 2 {
        return Err(Error::Precondition("monomial power identity needs k >= 2".into()));
    }
    check_depth(basis, n)?;
    let r = -Rational::new(1.into(), ((k - 1) as i64).into());
    let y = XSeries::<F>::x().binomial_power(&r, n)?;
    let c = -(a.clone() * F::from_i64((k - 1) as i64));
    let closed: Vec<XSeries<F>> = (0..=n)
        .map(|m| if m == 0 { XSeries::zero() } else { XSeries::monomial(y.coeff(m) * c.pow(m), m * (k - 1) + 1) })
        .collect();

    let base = rho_q_over(&XSeries::x(), basis, n)?;
    let mut power = base.clone();
    for _ in 1..k {
        power = rhoq_mul(&power, &base)?;
    }
    let rhs = rhoq_scale(a, &power)?;
    Ok(Residual::new((0..=n).map(|m| &closed[m] - &rhs.term(m)).collect()))
}

/// `⊞_q` over the monomials `a_k x^k` of `f`, each term a scaled
/// `⊛_q`-power of `ρ_q 𝔄(Δx)` (`k = 0` gives `a₀ q₁(t)`).
pub fn poly_flow_sum<F: Scalar>(f: &XSeries<F>, basis: &Arc<BasicSequence<F>>, n: usize) -> Result<DeltaFlow<F>> {
    if !f.is_exact() {
        return Err(Error::Precondition("poly_flow_sum needs a polynomial".into()));
    }
    let base = rho_q_over(&XSeries::x(), basis, n)?;
    let mut acc = rhoq_zero(basis, n)?;
    let mut power = rhoq_unit(basis, n)?;
    for (k, ak) in f.coeffs().iter().enumerate() {
        if k > 0 {
            power = rhoq_mul(&power, &base)?;
        }
        if ak.is_zero() {
            continue;
        }
        acc = rhoq_add(&acc, &rhoq_scale(ak, &power)?)?;
    }
    Ok(acc)
}

/// `⊛_q` product of the semiflows of `a_k x + b_k`.
pub fn poly_flow_product<F: Scalar>(factors: &[(F, F)], basis: &Arc<BasicSequence<F>>, n: usize) -> Result<DeltaFlow<F>> {
    if factors.is_empty() {
        return Err(Error::EmptyFactors);
    }
    if factors.iter().any(|(a, _)| a.is_zero()) {
        return Err(Error::Precondition("every linear factor needs a_k != 0".into()));
    }
    let mut acc: Option<DeltaFlow<F>> = None;
    for (a, b) in factors {
        let term = linear_semiflow_terms(a, b, basis, n)?;
        acc = Some(match acc {
            None => term,
            Some(prev) => rhoq_mul(&prev, &term)?,
        });
    }
    Ok(acc.expect("nonempty"))
}

/// `Φ_A ⊚ Φ_B`: same coefficients over the umbral composite `c_n = a_n(b(t))`.
pub fn flow_compose<F: Scalar>(a: &DeltaFlow<F>, b: &DeltaFlow<F>) -> Result<DeltaFlow<F>> {
    if a.generator != b.generator {
        return Err(Error::GeneratorMismatch);
    }
    if a.order() != b.order() {
        return Err(Error::LengthMismatch { left: a.order(), right: b.order() });
    }
    let basis = Arc::new(umbral_compose(&a.basis, &b.basis)?);
    let flow = Flow::new(a.flow.terms().to_vec(), Basis::Basic(basis.clone()))?;
    Ok(DeltaFlow { flow, generator: a.generator.clone(), basis })
}

/// Inverse in the flow group: the same coefficients over the inverse basis.
pub fn flow_inverse<F: Scalar>(a: &DeltaFlow<F>) -> Result<DeltaFlow<F>> {
    let basis = Arc::new(crate::umbral::umbral_inverse(&a.basis)?);
    let flow = Flow::new(a.flow.terms().to_vec(), Basis::Basic(basis.clone()))?;
    Ok(DeltaFlow { flow, generator: a.generator.clone(), basis })
}

/// Triangular matrix `b_{n,i} = β_{n,i}` (row = power of `t`, column =
/// basis index) and the vector `F_i = 1/i!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionMatrix<F> {
    pub b: Vec<Vec<F>>,
    pub factorials: Vec<F>,
}

impl<F: Scalar> ConnectionMatrix<F> {
    pub fn from_basis(basis: &BasicSequence<F>) -> Self {
        let d = basis.depth();
        let b = (0..=d).map(|n| (0..=d).map(|i| basis.beta(n, i)).collect()).collect();
        ConnectionMatrix { b, factorials: (0..=d).map(inv_factorial).collect() }
    }

    pub fn identity(depth: usize) -> Self {
        Self::from_basis(&BasicSequence::monomial(depth))
    }

    pub fn depth(&self) -> usize {
        self.b.len() - 1
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.depth() != rhs.depth() {
            return Err(Error::LengthMismatch { left: self.depth(), right: rhs.depth() });
        }
        let d = self.depth();
        let b = (0..=d)
            .map(|r| {
                (0..=d)
                    .map(|c| (0..=d).fold(F::zero(), |acc, k| acc + self.b[r][k].clone() * rhs.b[k][c].clone()))
                    .collect()
            })
            .collect();
        Ok(ConnectionMatrix { b, factorials: self.factorials.clone() })
    }
}

/// `Φ_Q = x + Σ_n B_n [𝔄(Δf) · F] tⁿ` in the monomial basis.
pub fn connection_flow<F: Scalar>(f: &XSeries<F>, q: &DeltaOp<F>, n: usize) -> Result<Flow<F>> {
    let basis = BasicSequence::generate(q, n)?;
    let m = ConnectionMatrix::from_basis(&basis);
    let seq = autonomous_sequence(f, n)?;
    let weighted: Vec<XSeries<F>> = (1..=n).map(|i| seq.term(i).scale(&m.factorials[i])).collect();
    let terms = (0..=n)
        .map(|row| {
            let mut acc = if row == 0 { XSeries::x() } else { XSeries::zero() };
            for i in 1..=n {
                let c = &m.b[row][i];
                if !c.is_zero() {
                    acc = &acc + &weighted[i - 1].scale(c);
                }
            }
            acc
        })
        .collect();
    Ok(Flow::monomial(terms))
}

/// `Q` applied in `t` to an exact polynomial in `t` with series coefficients.
fn apply_in_t<F: Scalar>(q: &DeltaOp<F>, poly: &[XSeries<F>]) -> Result<Vec<XSeries<F>>> {
    let deg = poly.len().saturating_sub(1);
    let op = q.at_order(deg.max(1))?;
    let mut out = vec![XSeries::zero(); poly.len()];
    for k in 1..=deg {
        let pk = op.coeff(k);
        if pk.is_zero() {
            continue;
        }
        for m in 0..=deg - k {
            // ∂ₜᵏ t^{m+k} = (m+k)!/m! t^m
            let w = F::from_rational(Rational::new(factorial(m + k), factorial(m)));
            out[m] = &out[m] + &poly[m + k].scale(&(pk.clone() * w));
        }
    }
    Ok(out)
}

/// The first `count` coordinates of an exact `t`-polynomial in the basic
/// sequence of `q`. The coordinate of `q_j` in `t^m` is `(Q^j t^m)(0)/j!`,
/// which is `m!/j! [u^m] p(u)^j`, so only scalar powers of `p` are needed.
fn basic_coordinates<F: Scalar>(q: &DeltaOp<F>, poly: &[XSeries<F>], count: usize) -> Result<Vec<XSeries<F>>> {
    let deg = poly.len().saturating_sub(1);
    let p = q.at_order(deg.max(1))?.series().truncate(deg + 1);
    let mut power: XSeries<F> = XSeries::one();
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let mut acc = XSeries::zero();
        for (m, pm) in poly.iter().enumerate().skip(j) {
            let c = power.coeff(m);
            if !c.is_zero() {
                let w = F::from_rational(Rational::new(factorial(m), factorial(j)));
                acc = &acc + &pm.scale(&(c * w));
            }
        }
        out.push(acc);
        power = (&power * &p).truncate(deg + 1);
    }
    Ok(out)
}

/// `QΦ_Q − f(Φ_Q)`, computed exactly as a polynomial in `t` and read in the
/// basic coordinates `q_0 … q_{N−1}`, the range the truncated flow
/// determines.
pub fn verify_delta_ode<F: Scalar>(f: &XSeries<F>, q: &DeltaOp<F>, n: usize) -> Result<Residual<F>> {
    let phi = delta_flow(f, q, n)?;
    let mono = phi.to_monomial();
    let lhs = apply_in_t(q, mono.terms())?;
    let rhs = taylor_compose_exact(f, &mono)?;
    let len = lhs.len().max(rhs.len());
    let diff: Vec<XSeries<F>> = (0..len)
        .map(|k| &lhs.get(k).cloned().unwrap_or_default() - &rhs.get(k).cloned().unwrap_or_default())
        .collect();
    Ok(Residual::new(basic_coordinates(q, &diff, n)?))
}

/// `QΦ_Q − f δₓΦ_Q` in basic coordinates `0..N−1`. This half of the delta
/// ODE holds for every generator.
pub fn x_pde_defect<F: Scalar>(phi: &DeltaFlow<F>) -> Residual<F> {
    let n = phi.order();
    let f = phi.generator();
    let terms = (0..n)
        .map(|j| {
            let lhs = phi.term(j + 1).scale(&F::from_i64((j + 1) as i64));
            &lhs - &(f * &phi.term(j).derivative())
        })
        .collect();
    Residual::new(terms)
}

/// Rebuild `Σ Qⁿ Φ_Q(0, x) q_n(t)/n!` by applying `Q` repeatedly to the
/// monomial form, and compare with the stored coefficients.
pub fn delta_representation_defect<F: Scalar>(phi: &DeltaFlow<F>) -> Result<Residual<F>> {
    let q = phi.basis.op();
    let mut cur = phi.to_monomial().terms().to_vec();
    let mut out = Vec::with_capacity(phi.order() + 1);
    for k in 0..=phi.order() {
        if k > 0 {
            cur = apply_in_t(q, &cur)?;
        }
        let at_zero = cur.first().cloned().unwrap_or_default();
        out.push(&at_zero.scale(&inv_factorial(k)) - &phi.term(k));
    }
    Ok(Residual::new(out))
}

/// `Φ_Q(t+s, x) − Φ_Q(t, Φ_Q(s, x))` in `q_k(t) q_j(s)` coordinates,
/// `k + j ≤ N`. Exact, so costly for high orders of nonlinear `f`.
pub fn delta_additivity_defect<F: Scalar>(phi: &DeltaFlow<F>) -> Result<Vec<Vec<XSeries<F>>>> {
    let n = phi.order();
    let q = phi.basis.op().clone();
    let inner = phi.to_monomial();
    let mut out = vec![Vec::new(); n + 1];
    for (k, row) in out.iter_mut().enumerate() {
        let composed = taylor_compose_exact(&phi.term(k), &inner)?;
        let coords = basic_coordinates(&q, &composed, n - k + 1)?;
        for j in 0..=n - k {
            let c = F::from_rational(rational_from_int(binomial(k + j, k)));
            let lhs = phi.term(k + j).scale(&c);
            let rhs = coords.get(j).cloned().unwrap_or_default();
            row.push(&lhs - &rhs);
        }
    }
    Ok(out)
}
