//! Autonomous polynomials `A_n`, the ring operations `⊞`/`⊛`, and
//! classical flows of `φ′ = f(φ)`.

use crate::error::{Error, Result};
use crate::flow::{taylor_compose, Flow};
use crate::scalar::{factorial, rational_from_int, Scalar};
use crate::series::XSeries;

/// `A₁ = f`, `A_{n+1} = f · δA_n` for `n = 1..N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutonomousSequence<F> {
    generator: XSeries<F>,
    /// `terms[n - 1]` is `A_n`.
    terms: Vec<XSeries<F>>,
}

impl<F: Scalar> AutonomousSequence<F> {
    pub fn generator(&self) -> &XSeries<F> {
        &self.generator
    }

    /// `A_1, …, A_N`.
    pub fn terms(&self) -> &[XSeries<F>] {
        &self.terms
    }

    /// `A_n`, 1-based.
    pub fn term(&self, n: usize) -> &XSeries<F> {
        &self.terms[n - 1]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Build from stored terms; the generator is `A₁`.
    pub fn from_terms(terms: Vec<XSeries<F>>) -> Result<Self> {
        let generator = terms.first().cloned().ok_or(Error::Precondition("no terms".into()))?;
        Ok(AutonomousSequence { generator, terms })
    }
}

pub(crate) fn inv_factorial<F: Scalar>(n: usize) -> F {
    F::one() / F::from_rational(rational_from_int(factorial(n)))
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("autonomous sequences need N >= 1".into()));
    }
    Ok(())
}

pub fn autonomous_sequence<F: Scalar>(f: &XSeries<F>, n: usize) -> Result<AutonomousSequence<F>> {
    check_len(n)?;
    let mut terms = Vec::with_capacity(n);
    terms.push(f.clone());
    for k in 1..n {
        let next = f * &terms[k - 1].derivative();
        terms.push(next);
    }
    Ok(AutonomousSequence { generator: f.clone(), terms })
}

/// `H₁ = 0`, `H_{n+1} = f δA_n(g) + g δA_n(f) + (f+g) δH_n`, from the terms
/// of both sequences.
fn h_from_terms<F: Scalar>(fa: &[XSeries<F>], ga: &[XSeries<F>]) -> Vec<XSeries<F>> {
    let f = &fa[0];
    let g = &ga[0];
    let sum = f + g;
    let mut h = vec![XSeries::zero()];
    for k in 1..fa.len() {
        let cross = &(f * &ga[k - 1].derivative()) + &(g * &fa[k - 1].derivative());
        let next = &cross + &(&sum * &h[k - 1].derivative());
        h.push(next);
    }
    h
}

/// `(H₁, …, H_N)`, satisfying `A_n(f+g) = A_n(f) + A_n(g) + H_n`.
pub fn h_sequence<F: Scalar>(f: &XSeries<F>, g: &XSeries<F>, n: usize) -> Result<Vec<XSeries<F>>> {
    let fa = autonomous_sequence(f, n)?;
    let ga = autonomous_sequence(g, n)?;
    Ok(h_from_terms(&fa.terms, &ga.terms))
}

/// `F ⊞ G`, computed term-wise through the `H_n` recursion.
pub fn aut_add<F: Scalar>(a: &AutonomousSequence<F>, b: &AutonomousSequence<F>) -> Result<AutonomousSequence<F>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let h = h_from_terms(&a.terms, &b.terms);
    let terms = (0..a.len()).map(|k| &(&a.terms[k] + &b.terms[k]) + &h[k]).collect();
    Ok(AutonomousSequence { generator: &a.generator + &b.generator, terms })
}

/// `F ⊛ G = 𝔄(Δ(f g))`, with `f`, `g` pulled back from `A₁`.
pub fn aut_mul<F: Scalar>(a: &AutonomousSequence<F>, b: &AutonomousSequence<F>) -> Result<AutonomousSequence<F>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    autonomous_sequence(&(&a.terms[0] * &b.terms[0]), a.len())
}

/// `𝔄(a Δf)`: term `n` becomes `aⁿ A_n`.
pub fn aut_scale<F: Scalar>(a: &F, seq: &AutonomousSequence<F>) -> AutonomousSequence<F> {
    let terms = seq.terms.iter().enumerate().map(|(k, t)| t.scale(&a.pow(k + 1))).collect();
    AutonomousSequence { generator: seq.generator.scale(a), terms }
}

/// Coefficients `A_n / n!` with base point `base`.
pub(crate) fn flow_terms<F: Scalar>(seq: &AutonomousSequence<F>, base: XSeries<F>) -> Vec<XSeries<F>> {
    std::iter::once(base)
        .chain(seq.terms.iter().enumerate().map(|(k, a)| a.scale(&inv_factorial(k + 1))))
        .collect()
}

/// `Φ(t, x) = x + Σ A_n tⁿ / n!`.
pub fn classical_flow<F: Scalar>(f: &XSeries<F>, n: usize) -> Result<Flow<F>> {
    Ok(Flow::monomial(flow_terms(&autonomous_sequence(f, n)?, XSeries::x())))
}

/// `Σ A_n tⁿ / n!`, the flow without its base point.
pub fn semiflow<F: Scalar>(f: &XSeries<F>, n: usize) -> Result<Flow<F>> {
    Ok(Flow::monomial(flow_terms(&autonomous_sequence(f, n)?, XSeries::zero())))
}

fn semiflow_generator<F: Scalar>(s: &Flow<F>) -> XSeries<F> {
    s.generator()
}

/// `⊛` on semiflows: the semiflow of the product of the generators.
pub fn semiflow_mul<F: Scalar>(a: &Flow<F>, b: &Flow<F>) -> Result<Flow<F>> {
    if a.order() != b.order() {
        return Err(Error::LengthMismatch { left: a.order(), right: b.order() });
    }
    semiflow(&(&semiflow_generator(a) * &semiflow_generator(b)), a.order())
}

/// `x + (Φ_{g₁} − x) ⊛ ⋯ ⊛ (Φ_{g_m} − x)`.
pub fn flow_factorize<F: Scalar>(factors: &[XSeries<F>], n: usize) -> Result<Flow<F>> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyFactors)?;
    let mut acc = semiflow(first, n)?;
    for g in rest {
        acc = semiflow_mul(&acc, &semiflow(g, n)?)?;
    }
    Ok(acc.with_base_point(XSeries::x()))
}

/// `Φ(t, Φ(s, x)) − Φ(t + s, x)` as a bivariate array `[i][j]` over
/// `tⁱ sʲ`, restricted to `i + j ≤ N`.
pub fn group_law_defect<F: Scalar>(flow: &Flow<F>) -> Result<Vec<Vec<XSeries<F>>>> {
    let n = flow.order();
    let mono = flow.to_monomial();
    // inner Φ(s, x) as a series in s; each coefficient of tⁱ is composed
    let inner = Flow::monomial(mono.terms().to_vec());
    let mut lhs: Vec<Vec<XSeries<F>>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let c = mono.term(i);
        let composed = taylor_compose(&c, &inner)?;
        lhs.push(composed.terms().to_vec());
    }
    let mut out = vec![vec![XSeries::zero(); n + 1]; n + 1];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate().take(n + 1 - i) {
            let binom = F::from_rational(rational_from_int(crate::scalar::binomial(i + j, i)));
            let rhs = mono.term(i + j).scale(&binom);
            *slot = &lhs[i][j] - &rhs;
        }
    }
    Ok(out)
}

/// `f δₓΦ − ∂ₜΦ` and `∂ₜΦ − f(Φ)` through `t`-order `N − 1`.
pub fn pde_defects<F: Scalar>(f: &XSeries<F>, flow: &Flow<F>) -> Result<(Vec<XSeries<F>>, Vec<XSeries<F>>)> {
    let n = flow.order();
    let dt = flow.t_derivative();
    let dx = flow.to_monomial().x_derivative();
    let first: Vec<_> = (0..n).map(|k| &(f * &dx.term(k)) - &dt.term(k)).collect();
    let composed = taylor_compose(f, &flow.to_monomial())?;
    let second: Vec<_> = (0..n).map(|k| &dt.term(k) - &composed.term(k)).collect();
    Ok((first, second))
}

/// `Φ(t, x, aΔf) − Φ(at, x, Δf)`.
pub fn scaling_defect<F: Scalar>(a: &F, f: &XSeries<F>, n: usize) -> Result<Vec<XSeries<F>>> {
    let lhs = classical_flow(&f.scale(a), n)?;
    let rhs = classical_flow(f, n)?.scale_time(a);
    lhs.difference(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type S = XSeries<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn sequence_examples() {
        let a = autonomous_sequence(&S::x(), 4).unwrap();
        assert!(a.terms().iter().all(|t| *t == S::x()));
        let a = autonomous_sequence(&S::from_ints(&[0, 0, 1]), 3).unwrap();
        assert_eq!(a.terms(), &[S::from_ints(&[0, 0, 1]), S::from_ints(&[0, 0, 0, 2]), S::from_ints(&[0, 0, 0, 0, 6])]);
        // A_n(ax + b) = a^{n-1} (ax + b), hand-checked for a = 3, b = -2
        let f = S::from_ints(&[-2, 3]);
        let a = autonomous_sequence(&f, 5).unwrap();
        for n in 1..=5 {
            assert_eq!(a.term(n), &f.scale(&Scalar::pow(&q(3), n - 1)));
        }
        assert!(autonomous_sequence(&f, 0).is_err());
    }

    #[test]
    fn h_examples() {
        let zero = S::zero();
        let f = S::from_ints(&[1, 0, 2]);
        assert!(h_sequence(&f, &zero, 5).unwrap().iter().all(S::is_zero));
        let h = h_sequence(&S::x(), &S::x(), 3).unwrap();
        assert_eq!(h[1], S::from_ints(&[0, 2]));
    }

    #[test]
    fn ring_operations() {
        let n = 6;
        let ax = autonomous_sequence(&S::x(), n).unwrap();
        let a0 = autonomous_sequence(&S::zero(), n).unwrap();
        assert_eq!(aut_add(&ax, &a0).unwrap(), ax);
        let two = aut_add(&ax, &ax).unwrap();
        for k in 1..=n {
            assert_eq!(two.term(k), &S::x().scale(&Scalar::pow(&q(2), k)));
        }
        let one = autonomous_sequence(&S::one(), n).unwrap();
        assert_eq!(aut_mul(&ax, &one).unwrap(), ax);
        let omx = autonomous_sequence(&S::from_ints(&[1, -1]), n).unwrap();
        assert_eq!(aut_mul(&ax, &omx).unwrap(), autonomous_sequence(&S::from_ints(&[0, 1, -1]), n).unwrap());
        let sq = autonomous_sequence(&S::from_ints(&[0, 0, 1]), n).unwrap();
        assert_eq!(aut_scale(&q(2), &sq), autonomous_sequence(&S::from_ints(&[0, 0, 2]), n).unwrap());
        assert_eq!(aut_scale(&q(-1), &ax), autonomous_sequence(&S::from_ints(&[0, -1]), n).unwrap());
        assert_eq!(aut_scale(&q(1), &sq), sq);
    }

    #[test]
    fn flows() {
        let phi = classical_flow(&S::from_ints(&[0, 0, 1]), 4).unwrap();
        // x / (1 − x t)
        for k in 0..=4 {
            assert_eq!(phi.term(k), S::monomial(q(1), k + 1));
        }
        let phi0 = classical_flow(&S::zero(), 3).unwrap();
        assert_eq!(phi0.term(0), S::x());
        assert!((1..=3).all(|k| phi0.term(k).is_zero()));
        let fac = flow_factorize(&[S::from_ints(&[1, 1]), S::from_ints(&[3, 2])], 5).unwrap();
        assert!(fac.agrees_with(&classical_flow(&S::from_ints(&[3, 5, 2]), 5).unwrap()));
        assert_eq!(flow_factorize::<Rational>(&[], 3).unwrap_err(), Error::EmptyFactors);
    }

    #[test]
    fn flow_properties() {
        let f = S::from_ints(&[1, -2, 0, 1]);
        let phi = classical_flow(&f, 6).unwrap();
        assert!(group_law_defect(&phi).unwrap().iter().flatten().all(S::is_zero));
        let (a, b) = pde_defects(&f, &phi).unwrap();
        assert!(a.iter().chain(b.iter()).all(S::is_zero));
        assert!(scaling_defect(&Rational::new(3.into(), 2.into()), &f, 6).unwrap().iter().all(S::is_zero));
    }
}
