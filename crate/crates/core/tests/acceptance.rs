//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails. Every check compares the library
//! against an oracle built here, not against another library routine.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use deltadyn::corpus::Corpus;
use deltadyn::numeric::{default_kinds, lambert_grid, lambert_residual};
use deltadyn::solver::{logistic_map, QuadraticMethod};
use deltadyn::{
    abel_scaling_check, aut_add, autonomous_sequence, backward_relation_check, classical_flow, connection_flow,
    delta_flow, flow_compose, flow_factorize, numeric_closed_form_check, poly_flow_product,
    poly_flow_sum, solve_forward, solve_logistic, solve_quadratic_map, umbral_compose, umbral_inverse,
    verify_delta_ode, BasicSequence, ConnectionMatrix, DeltaOp, Flow, GaussianRational, NumericConfig, Rational,
    Scalar, TPoly, XSeries,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;
type G = GaussianRational;

const ORDER: usize = 10;
const HORIZON: usize = 12;
const NUMERIC_TOL: f64 = 1e-9;
const LAMBERT_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn ops<F: Scalar>(order: usize) -> Vec<DeltaOp<F>> {
    vec![
        DeltaOp::derivative(order),
        DeltaOp::forward(order),
        DeltaOp::backward(order),
        DeltaOp::abel(F::from_i64(1), order),
        DeltaOp::abel(F::from_i64(-1), order),
        DeltaOp::touchard(order),
    ]
}

fn horner<F: Scalar>(g: &XSeries<F>, y: &F) -> F {
    g.coeffs().iter().rev().fold(F::zero(), |acc, c| acc * y.clone() + c.clone())
}

fn binomial(n: usize, k: usize) -> Q {
    (0..k).fold(Q::from_i64(1), |c, i| c * Q::from_i64((n - i) as i64) / Q::from_i64((i + 1) as i64))
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::from_i64(1), |c, i| c * Q::from_i64(i as i64))
}

/// `x + Σ_{n≥1} A_n(f) q_n(t)/n!` multiplied out into powers of `t`, with
/// `A_n` from the defining recursion.
fn expand_by_hand<F: Scalar>(f: &XSeries<F>, basis: &BasicSequence<F>, order: usize) -> Flow<F> {
    let mut a = vec![f.clone()];
    while a.len() < order {
        let next = f * &a.last().unwrap().derivative();
        a.push(next);
    }
    let mut terms = vec![XSeries::zero(); order + 1];
    terms[0] = XSeries::x();
    let mut fact = F::from_i64(1);
    for n in 1..=order {
        fact = fact * F::from_i64(n as i64);
        let q = basis.poly(n);
        for (r, term) in terms.iter_mut().enumerate() {
            let c = q.coeff(r);
            if !c.is_zero() {
                *term = &*term + &a[n - 1].scale(&(c / fact.clone()));
            }
        }
    }
    Flow::monomial(terms)
}

/// Brute-force iteration kept outside the library's arithmetic.
trait IterOracle: Scalar {
    type State;
    fn start(x0: &Self) -> Self::State;
    fn step(g: &XSeries<Self>, y: &Self::State) -> Self::State;
    fn matches(&self, y: &Self::State) -> bool;
}

impl IterOracle for G {
    type State = G;
    fn start(x0: &G) -> G {
        x0.clone()
    }
    fn step(g: &XSeries<G>, y: &G) -> G {
        horner(g, y)
    }
    fn matches(&self, y: &G) -> bool {
        self == y
    }
}

/// Over ℚ the iterate is kept as an unreduced fraction `p/q` of integers,
/// so deep iterates of `x³` avoid a gcd per step.
impl IterOracle for Q {
    type State = (BigInt, BigInt);
    fn start(x0: &Q) -> Self::State {
        (x0.numer().clone(), x0.denom().clone())
    }
    fn step(g: &XSeries<Q>, (p, q): &Self::State) -> Self::State {
        let c = g.coeffs();
        let l = c.iter().fold(BigInt::one(), |l, ck| l.lcm(ck.denom()));
        let a: Vec<BigInt> = c.iter().map(|ck| ck.numer() * (&l / ck.denom())).collect();
        let d = a.len() - 1;
        let mut qpow = vec![BigInt::one()];
        for _ in 0..d {
            let next = qpow.last().unwrap() * q;
            qpow.push(next);
        }
        let mut acc = a[d].clone();
        for k in (0..d).rev() {
            acc = acc * p + &a[k] * &qpow[d - k];
        }
        (acc, l * &qpow[d])
    }
    fn matches(&self, (p, q): &Self::State) -> bool {
        self.numer() * q == self.denom() * p
    }
}

/// `solve_forward` against iteration for one map and every start value.
fn oracle_equivalence<F: IterOracle>(name: &str, g: &XSeries<F>, x0s: &[F], bad: &mut Vec<String>) -> usize {
    let mut checked = 0;
    for x0 in x0s {
        let mut y = F::start(x0);
        let mut first_bad = None;
        for n in 0..=HORIZON {
            if n > 0 {
                y = F::step(g, &y);
            }
            checked += 1;
            match solve_forward(g, x0, n) {
                Ok(v) if v.matches(&y) => {}
                Ok(_) => {
                    first_bad.get_or_insert(n);
                }
                Err(e) => bad.push(format!("{name} x0={x0} n={n}: {e}")),
            }
        }
        if let Some(n) = first_bad {
            bad.push(format!("{name} x0={x0} from n={n}"));
        }
    }
    checked
}

fn criterion_1(corpus: &Corpus) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for m in &corpus.maps {
        let r = match m.field.as_str() {
            "Qi" => m.map::<G>().and_then(|g| Ok((g, corpus.initial_values::<G>()?))).map(|(g, xs)| oracle_equivalence(&m.name, &g, &xs, &mut bad)),
            _ => m.map::<Q>().and_then(|g| Ok((g, corpus.initial_values::<Q>()?))).map(|(g, xs)| oracle_equivalence(&m.name, &g, &xs, &mut bad)),
        };
        match r {
            Ok(c) => checked += c,
            Err(e) => bad.push(format!("{}: {e}", m.name)),
        }
    }
    Outcome::new(bad.is_empty(), format!("{checked} cases; mismatches: [{}]", bad.join("; ")))
}

fn criterion_2(corpus: &Corpus) -> Outcome {
    let mut bad = Vec::new();
    let mus = corpus.mus::<Q>().expect("corpus mu values");
    for mu in &mus {
        let fixed = (mu.clone() - Q::from_i64(1)) / mu.clone();
        for n in 0..=HORIZON {
            if solve_logistic(mu, &Q::from_i64(0), n).ok() != Some(Q::from_i64(0)) {
                bad.push(format!("mu={mu} x0=0 n={n}"));
            }
            if solve_logistic(mu, &fixed, n).ok() != Some(fixed.clone()) {
                bad.push(format!("mu={mu} x0={fixed} n={n}"));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("mu in [{}]; failures: [{}]", mus.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "), bad.join(", ")))
}

fn ode_pairs<F: Scalar>(name: &str, f: &XSeries<F>, zero: &mut usize, bad: &mut Vec<String>) {
    for q in ops::<F>(ORDER) {
        match verify_delta_ode(f, &q, ORDER) {
            Ok(r) if r.is_zero() => *zero += 1,
            Ok(r) => bad.push(format!("{name}/{} from t^{}", q.name(), r.first_nonzero().unwrap_or(0))),
            Err(e) => bad.push(format!("{name}/{}: {e}", q.name())),
        }
    }
}

fn criterion_3(corpus: &Corpus) -> Outcome {
    let (mut zero, mut bad) = (0, Vec::new());
    for m in &corpus.maps {
        match m.field.as_str() {
            "Qi" => ode_pairs(&m.name, &m.generator::<G>().expect("generator"), &mut zero, &mut bad),
            _ => ode_pairs(&m.name, &m.generator::<Q>().expect("generator"), &mut zero, &mut bad),
        }
    }
    Outcome::new(bad.is_empty(), format!("{zero} pairs zero; nonzero: [{}]", bad.join(", ")))
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    // falling factorials multiplied out, and S₁ by its recurrence
    let fwd = BasicSequence::generate(&DeltaOp::<Q>::forward(ORDER), ORDER).expect("forward basis");
    let mut s1 = vec![vec![Q::from_i64(1)]];
    for n in 1..=ORDER {
        let prev = &s1[n - 1];
        let row: Vec<Q> = (0..=n)
            .map(|k| {
                let shift = if k > 0 { prev.get(k - 1).cloned().unwrap_or_default() } else { Q::from_i64(0) };
                let keep = prev.get(k).cloned().unwrap_or_default() * Q::from_i64(n as i64 - 1);
                shift - keep
            })
            .collect();
        s1.push(row);
    }
    let mut falling = TPoly::<Q>::one();
    for n in 0..=ORDER {
        if n > 0 {
            falling = &falling * &TPoly::from_ints(&[-(n as i64 - 1), 1]);
        }
        if fwd.poly(n) != &falling || (0..=n).any(|k| fwd.poly(n).coeff(k) != s1[n][k]) {
            bad.push(format!("forward q_{n}"));
        }
    }
    // S₂ by inclusion–exclusion
    let tou = BasicSequence::generate(&DeltaOp::<Q>::touchard(ORDER), ORDER).expect("touchard basis");
    for n in 0..=ORDER {
        for k in 0..=n {
            let sum = (0..=k).fold(Q::from_i64(0), |acc, j| {
                let sign = Q::from_i64(if (k - j) % 2 == 0 { 1 } else { -1 });
                acc + sign * binomial(k, j) * Scalar::pow(&Q::from_i64(j as i64), n)
            });
            if tou.beta(k, n) != sum / factorial(k) {
                bad.push(format!("touchard S({n},{k})"));
            }
        }
    }
    // t(t − nα)^{n−1} multiplied out
    for alpha in [Q::from_i64(1), Q::from_i64(-1), Q::from_ratio(1, 2)] {
        let abel = BasicSequence::generate(&DeltaOp::abel(alpha.clone(), ORDER), ORDER).expect("abel basis");
        for n in 1..=ORDER {
            let root = TPoly::new(vec![-(Q::from_i64(n as i64) * alpha.clone()), Q::from_i64(1)]);
            let mut expected = TPoly::from_ints(&[0, 1]);
            for _ in 1..n {
                expected = &expected * &root;
            }
            if abel.poly(n) != &expected {
                bad.push(format!("abel({alpha}) q_{n}"));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("n <= {ORDER}; failures: [{}]", bad.join(", ")))
}

fn criterion_5() -> Outcome {
    // Both sides have degree ≤ n in each of t and s, so agreement on the
    // grid {0..=n}² proves the bivariate identity.
    let mut bad = Vec::new();
    for q in ops::<Q>(ORDER) {
        let b = BasicSequence::generate(&q, ORDER).expect("builtin basis");
        let grid: Vec<Q> = (0..=ORDER as i64).map(Q::from_i64).collect();
        let values: Vec<Vec<Q>> = (0..=ORDER).map(|n| grid.iter().map(|t| b.poly(n).eval(t)).collect()).collect();
        'outer: for n in 0..=ORDER {
            for (i, t) in grid.iter().enumerate() {
                for (j, s) in grid.iter().enumerate() {
                    let lhs = b.poly(n).eval(&(t.clone() + s.clone()));
                    let rhs = (0..=n).fold(Q::from_i64(0), |acc, k| acc + binomial(n, k) * values[k][i].clone() * values[n - k][j].clone());
                    if lhs != rhs {
                        bad.push(format!("{} n={n}", q.name()));
                        break 'outer;
                    }
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("6 bases, n <= {ORDER}; failures: [{}]", bad.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let random_poly = |rng: &mut ChaCha8Rng| {
        let deg = rng.gen_range(0..=3);
        XSeries::<Q>::from_ints(&(0..=deg).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>())
    };
    let mut bad = Vec::new();
    for pair in 0..20 {
        let (f, g) = (random_poly(&mut rng), random_poly(&mut rng));
        let sum = aut_add(&autonomous_sequence(&f, ORDER).unwrap(), &autonomous_sequence(&g, ORDER).unwrap()).unwrap();
        // A₁ = f + g, A_{k+1} = (f + g) · d/dx A_k
        let h = &f + &g;
        let mut expected = vec![h.clone()];
        while expected.len() < ORDER {
            let next = &h * &expected.last().unwrap().derivative();
            expected.push(next);
        }
        if sum.terms() != expected.as_slice() {
            bad.push(format!("pair {pair}: f={f} g={g}"));
        }
    }
    Outcome::new(bad.is_empty(), format!("20 pairs, n <= {ORDER}; failures: [{}]", bad.join(", ")))
}

fn criterion_7(corpus: &Corpus) -> Outcome {
    let mut bad = Vec::new();
    let fwd = Arc::new(BasicSequence::generate(&DeltaOp::<Q>::forward(ORDER), ORDER).unwrap());
    for mu in corpus.mus::<Q>().unwrap() {
        // f = μx(1 − x) − x = x · ((μ − 1) − μx)
        let f = &logistic_map(&mu) - &XSeries::x();
        let factors = [XSeries::x(), XSeries::from_coeffs(vec![mu.clone() - Q::from_i64(1), -mu.clone()])];
        let classical = classical_flow(&f, ORDER).unwrap();
        if !flow_factorize(&factors, ORDER).unwrap().agrees_with(&classical) {
            bad.push(format!("flow_factorize mu={mu}"));
        }
        let direct = expand_by_hand(&f, &fwd, ORDER);
        let product = poly_flow_product(&[(Q::from_i64(1), Q::from_i64(0)), (-mu.clone(), mu.clone() - Q::from_i64(1))], &fwd, ORDER)
            .unwrap()
            .with_base_point()
            .to_monomial();
        if !product.agrees_with(&direct) {
            bad.push(format!("poly_flow_product mu={mu}"));
        }
        if !poly_flow_sum(&f, &fwd, ORDER).unwrap().with_base_point().to_monomial().agrees_with(&direct) {
            bad.push(format!("poly_flow_sum mu={mu}"));
        }
    }
    // z² + 1/2 − z = (z − α)(z − ᾱ), α = (1 + i)/2
    let c = G::from_ratio(1, 2);
    let alpha = G::parse_exact("1/2+1/2*i").unwrap();
    let beta = G::from_i64(1) - alpha.clone();
    let f = XSeries::from_coeffs(vec![c.clone(), G::from_i64(-1), G::from_i64(1)]);
    let gbasis = Arc::new(BasicSequence::generate(&DeltaOp::<G>::forward(ORDER), ORDER).unwrap());
    let direct = expand_by_hand(&f, &gbasis, ORDER);
    let lin = |r: &G| XSeries::from_coeffs(vec![-r.clone(), G::from_i64(1)]);
    if !flow_factorize(&[lin(&alpha), lin(&beta)], ORDER).unwrap().agrees_with(&classical_flow(&f, ORDER).unwrap()) {
        bad.push("flow_factorize quadratic".into());
    }
    let product = poly_flow_product(&[(G::from_i64(1), -alpha), (G::from_i64(1), -beta)], &gbasis, ORDER).unwrap();
    if !product.with_base_point().to_monomial().agrees_with(&direct) {
        bad.push("poly_flow_product quadratic".into());
    }
    if !poly_flow_sum(&f, &gbasis, ORDER).unwrap().with_base_point().to_monomial().agrees_with(&direct) {
        bad.push("poly_flow_sum quadratic".into());
    }
    match solve_quadratic_map(&c, &G::from_i64(0), 3, false) {
        Ok(s) if s.method == QuadraticMethod::Factored => {}
        _ => bad.push("quadratic map not factored".into()),
    }
    Outcome::new(bad.is_empty(), format!("order {ORDER}; failures: [{}]", bad.join(", ")))
}

fn criterion_8(corpus: &Corpus) -> Outcome {
    let mut bad = Vec::new();
    let one = Q::from_i64(1);
    for m in corpus.maps.iter().filter(|m| m.field != "Qi") {
        let f = m.generator::<Q>().unwrap();
        if !backward_relation_check(&f, ORDER).map(|r| r.is_zero()).unwrap_or(false) {
            bad.push(format!("backward {}", m.name));
        }
        for a in [2, -1] {
            if !abel_scaling_check(&one, &Q::from_i64(a), &f, ORDER).map(|r| r.is_zero()).unwrap_or(false) {
                bad.push(format!("abel a={a} {}", m.name));
            }
        }
    }
    let f = corpus.maps.iter().find(|m| m.field == "Qi").unwrap().generator::<G>().unwrap();
    if !backward_relation_check(&f, ORDER).map(|r| r.is_zero()).unwrap_or(false) {
        bad.push("backward quadratic".into());
    }
    Outcome::new(bad.is_empty(), format!("order {ORDER}; failures: [{}]", bad.join(", ")))
}

fn criterion_9(corpus: &Corpus) -> Outcome {
    let mut bad = Vec::new();
    for m in corpus.maps.iter().filter(|m| m.field != "Qi") {
        let f = m.generator::<Q>().unwrap();
        for q in ops::<Q>(ORDER) {
            let basis = Arc::new(BasicSequence::generate(&q, ORDER).unwrap());
            let expected = expand_by_hand(&f, &basis, ORDER);
            if !connection_flow(&f, &q, ORDER).unwrap().agrees_with(&expected) {
                bad.push(format!("connection {}/{}", m.name, q.name()));
            }
        }
    }
    let d = 8;
    let f = XSeries::<Q>::from_ints(&[0, 1, -1]);
    let pairs = [(DeltaOp::forward(d), DeltaOp::touchard(d)), (DeltaOp::abel(Q::from_i64(1), d), DeltaOp::backward(d))];
    for (qa, qb) in pairs {
        let (a, b) = (delta_flow(&f, &qa, d).unwrap(), delta_flow(&f, &qb, d).unwrap());
        let composed = flow_compose(&a, &b).unwrap();
        let lhs = ConnectionMatrix::from_basis(composed.basis());
        let rhs = ConnectionMatrix::from_basis(b.basis()).mul(&ConnectionMatrix::from_basis(a.basis())).unwrap();
        if lhs != rhs {
            bad.push(format!("B·A for ({}, {})", qa.name(), qb.name()));
        }
        // independent check of the composite basis: c_n(t) = Σ_k a_{n,k} b_k(t)
        for n in 0..=d {
            let mut c = TPoly::zero();
            for k in 0..=n {
                c = &c + &b.basis().poly(k).scale(&a.basis().beta(k, n));
            }
            if composed.basis().poly(n) != &c {
                bad.push(format!("composite q_{n} for ({}, {})", qa.name(), qb.name()));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("order {ORDER}, depth {d}; failures: [{}]", bad.join(", ")))
}

fn criterion_10() -> Outcome {
    let d = 8;
    let mut bad = Vec::new();
    let mono = TPoly::<Q>::one();
    for q in [DeltaOp::forward(d), DeltaOp::backward(d), DeltaOp::abel(Q::from_i64(1), d), DeltaOp::touchard(d)] {
        let a = BasicSequence::generate(&q, d).unwrap();
        let composed = umbral_compose(&a, &umbral_inverse(&a).unwrap()).unwrap();
        let mut power = mono.clone();
        for n in 0..=d {
            if composed.poly(n) != &power {
                bad.push(format!("{} n={n}", q.name()));
                break;
            }
            power = &power * &TPoly::from_ints(&[0, 1]);
        }
    }
    Outcome::new(bad.is_empty(), format!("depth {d}; failures: [{}]", bad.join(", ")))
}

fn criterion_11() -> Outcome {
    let cfg = NumericConfig { tolerance: NUMERIC_TOL, ..NumericConfig::default() };
    let (x, b) = (Q::from_ratio(1, 3), Q::from_i64(1));
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for kind in default_kinds(&cfg) {
        for (a, t) in &cfg.samples {
            match numeric_closed_form_check(&kind, a, &b, t, &x, &cfg) {
                Ok(r) => {
                    worst = worst.max(r.deviation);
                    if !(r.deviation < NUMERIC_TOL) {
                        bad.push(format!("{} (a={a}, t={t}): {:e}", kind.name(), r.deviation));
                    }
                }
                Err(e) => bad.push(format!("{} (a={a}, t={t}): {e}", kind.name())),
            }
        }
    }
    let lambert = lambert_grid().into_iter().map(|x| lambert_residual(x).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    if !(lambert < LAMBERT_TOL) {
        bad.push(format!("lambert residual {lambert:e}"));
    }
    Outcome::new(bad.is_empty(), format!("max deviation {worst:e}, lambert {lambert:e}; failures: [{}]", bad.join(", ")))
}

fn main() -> ExitCode {
    let corpus = Corpus::builtin();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("difference-equation oracle equivalence", Box::new(|| criterion_1(&corpus))),
        ("logistic fixed points", Box::new(|| criterion_2(&corpus))),
        ("delta-ODE residual", Box::new(|| criterion_3(&corpus))),
        ("basis correctness", Box::new(criterion_4)),
        ("binomial type", Box::new(criterion_5)),
        ("ring cross-validation", Box::new(criterion_6)),
        ("factorization theorems", Box::new(|| criterion_7(&corpus))),
        ("backward relation and Abel scaling", Box::new(|| criterion_8(&corpus))),
        ("connection matrix", Box::new(|| criterion_9(&corpus))),
        ("umbral group", Box::new(criterion_10)),
        ("numeric closed forms", Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} criterion {:>2} {name} ({:.2}s): {}", i + 1, start.elapsed().as_secs_f64(), o.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
