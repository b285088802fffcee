//! Named invariant checks, run in parallel with results in a fixed order.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::autonomous::{
    aut_add, aut_mul, autonomous_sequence, classical_flow, flow_factorize, group_law_defect, pde_defects,
    scaling_defect,
};
use crate::corpus::Corpus;
use crate::deltaflow::{
    connection_flow, delta_additivity_defect, delta_flow, delta_flow_over, delta_representation_defect,
    flow_compose, flow_inverse, monomial_power_identity, poly_flow_product, poly_flow_sum, rho_q_over, rhoq_add,
    rhoq_mul, rhoq_unit, rhoq_zero, verify_delta_ode, x_pde_defect, ConnectionMatrix, Residual,
};
use crate::error::{Error, Result};
use crate::flow::{taylor_compose, Flow};
use crate::numeric::{default_kinds, lambert_grid, lambert_residual, numeric_closed_form_check, NumericConfig};
use crate::parse::parse_op;
use crate::scalar::{binomial, rational_from_int, FieldKind, GaussianRational, Rational, Scalar};
use crate::series::{DerivativeSequence, XSeries};
use crate::solver::{
    abel_scaling_check, backward_relation_check, iterate, solve_forward, solve_logistic, solve_quadratic_map,
    ForwardSolver,
};
use crate::tpoly::TPoly;
use crate::umbral::{signed_stirling1, stirling2, umbral_compose, umbral_inverse, BasicSequence, DeltaOp};

type Q = Rational;
type S = XSeries<Q>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Core,
    Autonomous,
    Umbral,
    Deltaflow,
    Solver,
    Numeric,
}

impl Group {
    pub const ALL: [Group; 6] =
        [Group::Core, Group::Autonomous, Group::Umbral, Group::Deltaflow, Group::Solver, Group::Numeric];

    pub fn name(self) -> &'static str {
        match self {
            Group::Core => "core",
            Group::Autonomous => "autonomous",
            Group::Umbral => "umbral",
            Group::Deltaflow => "deltaflow",
            Group::Solver => "solver",
            Group::Numeric => "numeric",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check group `{s}`")))
    }
}

/// `all` or a comma-separated list of group names.
pub fn parse_groups(s: &str) -> Result<Vec<Group>> {
    if s.trim() == "all" {
        return Ok(Group::ALL.to_vec());
    }
    let mut groups = s.split(',').map(|g| g.trim().parse()).collect::<Result<Vec<Group>>>()?;
    groups.sort();
    groups.dedup();
    Ok(groups)
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// `t`-order `N` of flows.
    pub order: usize,
    /// Depth of generated bases for umbral checks.
    pub depth: usize,
    pub seed: u64,
    pub groups: Vec<Group>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { order: 10, depth: 16, seed: 0x5eed, groups: Group::ALL.to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub group: Group,
    pub name: &'static str,
    pub passed: bool,
    /// Largest coefficient of the residual; zero when an identity holds.
    pub residual: f64,
    pub detail: String,
}

struct Outcome {
    passed: bool,
    residual: f64,
    detail: String,
}

impl Outcome {
    fn flag(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, residual: if passed { 0.0 } else { 1.0 }, detail: detail.into() }
    }

    /// Fold labelled residuals; the detail names the failing cases.
    fn residuals<F: Scalar>(cases: Vec<(String, Residual<F>)>) -> Self {
        let total = cases.len();
        let failing: Vec<&String> = cases.iter().filter(|(_, r)| !r.is_zero()).map(|(l, _)| l).collect();
        let residual = cases.iter().map(|(_, r)| r.max_abs()).fold(0.0, f64::max);
        let detail = if failing.is_empty() {
            format!("{total} cases")
        } else {
            let shown: Vec<&str> = failing.iter().take(6).map(|s| s.as_str()).collect();
            format!("{}/{} cases nonzero: {}", failing.len(), total, shown.join(", "))
        };
        Outcome { passed: failing.is_empty(), residual, detail }
    }
}

type CheckFn = fn(&VerifyConfig) -> Result<Outcome>;

const CHECKS: &[(Group, &str, CheckFn)] = &[
    (Group::Core, "series_ring_axioms", check_ring_axioms),
    (Group::Core, "hurwitz_isomorphism", check_hurwitz),
    (Group::Core, "inverse_round_trip", check_inverse_round_trip),
    (Group::Core, "taylor_chain_rule", check_chain_rule),
    (Group::Autonomous, "recursion_and_degree", check_recursion),
    (Group::Autonomous, "add_via_h_sequence", check_add_h),
    (Group::Autonomous, "mul_generator", check_mul_generator),
    (Group::Autonomous, "flow_group_law", check_group_law),
    (Group::Autonomous, "flow_pde", check_pde),
    (Group::Autonomous, "flow_scaling", check_scaling),
    (Group::Autonomous, "flow_factorize", check_factorize),
    (Group::Umbral, "basic_set_axioms", check_basic_axioms),
    (Group::Umbral, "binomial_type", check_binomial_type),
    (Group::Umbral, "stirling_and_abel_bases", check_named_bases),
    (Group::Umbral, "compose_group", check_umbral_group),
    (Group::Umbral, "shift_invariance", check_shift_invariance),
    (Group::Deltaflow, "delta_ode_residual", check_delta_ode),
    (Group::Deltaflow, "delta_ode_x_half", check_x_half),
    (Group::Deltaflow, "base_point", check_base_point),
    (Group::Deltaflow, "basis_round_trip", check_round_trip),
    (Group::Deltaflow, "delta_representation", check_representation),
    (Group::Deltaflow, "additivity", check_additivity),
    (Group::Deltaflow, "connection_matrix", check_connection),
    (Group::Deltaflow, "rho_ring_axioms", check_rho_ring),
    (Group::Deltaflow, "monomial_powers", check_monomial_powers),
    (Group::Deltaflow, "poly_sum_and_product", check_sum_product),
    (Group::Deltaflow, "flow_compose_group", check_flow_group),
    (Group::Solver, "forward_vs_iterate", check_forward_oracle),
    (Group::Solver, "logistic_fixed_points", check_fixed_points),
    (Group::Solver, "quadratic_map_vs_iterate", check_quadratic),
    (Group::Solver, "factored_vs_direct", check_factored_direct),
    (Group::Solver, "backward_relation", check_backward),
    (Group::Solver, "abel_scaling", check_abel_scaling),
    (Group::Numeric, "closed_forms", check_numeric),
    (Group::Numeric, "lambert_w_residual", check_lambert),
];

/// Run every check in the selected groups. Output order follows the
/// check table regardless of scheduling.
pub fn run(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let selected: Vec<_> = CHECKS.iter().filter(|(g, _, _)| cfg.groups.contains(g)).collect();
    selected
        .par_iter()
        .map(|(group, name, check)| match check(cfg) {
            Ok(o) => CheckReport { group: *group, name, passed: o.passed, residual: o.residual, detail: o.detail },
            Err(e) => CheckReport { group: *group, name, passed: false, residual: f64::NAN, detail: format!("error: {e}") },
        })
        .collect()
}

/// Names of all checks, for listings.
pub fn check_names() -> Vec<String> {
    CHECKS.iter().map(|(g, n, _)| format!("{g}.{n}")).collect()
}

#[derive(Serialize)]
pub struct Summary<'a> {
    pub order: usize,
    pub depth: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: &'a [CheckReport],
}

pub fn summary_json(cfg: &VerifyConfig, reports: &[CheckReport]) -> String {
    let passed = reports.iter().filter(|r| r.passed).count();
    let summary =
        Summary { order: cfg.order, depth: cfg.depth, seed: cfg.seed, passed, failed: reports.len() - passed, checks: reports };
    serde_json::to_string_pretty(&summary).expect("summary serializes")
}

// --- helpers -----------------------------------------------------------

fn rng(cfg: &VerifyConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Polynomial of degree ≤ `deg` with integer coefficients in `−3..=3`.
pub fn random_poly<R: Rng>(rng: &mut R, deg: usize) -> S {
    S::from_coeffs((0..=deg).map(|_| Q::from_i64(rng.gen_range(-3..=3))).collect())
}

fn builtin_ops(order: usize) -> Vec<DeltaOp<Q>> {
    vec![
        DeltaOp::derivative(order),
        DeltaOp::forward(order),
        DeltaOp::backward(order),
        DeltaOp::abel(Q::from_i64(1), order),
        DeltaOp::abel(Q::from_i64(-1), order),
        DeltaOp::touchard(order),
    ]
}

fn corpus_generators() -> Result<Vec<(String, S)>> {
    let c = Corpus::builtin();
    c.maps.iter().map(|m| Ok((m.name.clone(), m.generator::<Q>()?))).collect()
}

fn diff_residual(a: &[S], b: &[S]) -> Residual<Q> {
    let n = a.len().max(b.len());
    Residual::new(
        (0..n)
            .map(|k| &a.get(k).cloned().unwrap_or_default() - &b.get(k).cloned().unwrap_or_default())
            .collect(),
    )
}

fn flow_residual(a: &Flow<Q>, b: &Flow<Q>) -> Result<Residual<Q>> {
    Ok(Residual::new(a.difference(b)?))
}

fn basis(op: &DeltaOp<Q>, depth: usize) -> Result<Arc<BasicSequence<Q>>> {
    Ok(Arc::new(BasicSequence::generate(op, depth)?))
}

// --- core --------------------------------------------------------------

fn check_ring_axioms(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 1);
    let mut cases = Vec::new();
    for k in 0..20 {
        let (a, b, c) = (random_poly(&mut r, 3), random_poly(&mut r, 3), random_poly(&mut r, 3));
        let assoc = &(&(&a * &b) * &c) - &(&a * &(&b * &c));
        let dist = &(&a * &(&b + &c)) - &(&(&a * &b) + &(&a * &c));
        let comm = &(&a * &b) - &(&b * &a);
        cases.push((format!("triple {k}"), Residual::new(vec![assoc, dist, comm])));
    }
    Ok(Outcome::residuals(cases))
}

fn check_hurwitz(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 2);
    let mut cases = Vec::new();
    for k in 0..20 {
        let (f, g) = (random_poly(&mut r, 3), random_poly(&mut r, 3));
        let n = cfg.order;
        let lhs = DerivativeSequence::of(&f, n).hurwitz_product(&DerivativeSequence::of(&g, n))?;
        let rhs = DerivativeSequence::of(&(&f * &g), n);
        cases.push((format!("pair {k}"), diff_residual(lhs.entries(), rhs.entries())));
    }
    Ok(Outcome::residuals(cases))
}

fn check_inverse_round_trip(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.depth;
    let mut cases = Vec::new();
    for op in builtin_ops(n) {
        let p = op.series();
        let inv = p.compositional_inverse(n)?;
        let there = p.compose(&inv)?;
        let back = inv.compose(p)?;
        let id = S::x().truncate(n + 1);
        cases.push((op.name(), Residual::new(vec![&there - &id, &back - &id])));
    }
    Ok(Outcome::residuals(cases))
}

fn check_chain_rule(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 3);
    let mut cases = Vec::new();
    for k in 0..8 {
        let g = random_poly(&mut r, 2);
        let f = random_poly(&mut r, 3);
        let phi = classical_flow(&g, cfg.order)?;
        let lhs = taylor_compose(&f, &phi)?.x_derivative();
        let fp = taylor_compose(&f.derivative(), &phi)?;
        let dphi: Vec<S> = phi.x_derivative().terms().to_vec();
        let rhs = crate::flow::tx_mul(fp.terms(), &dphi, Some(cfg.order));
        cases.push((format!("case {k}"), diff_residual(lhs.terms(), &rhs)));
    }
    Ok(Outcome::residuals(cases))
}

// --- autonomous --------------------------------------------------------

fn check_recursion(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        let a = autonomous_sequence(&f, cfg.order)?;
        let d = f.degree().unwrap_or(0);
        let mut terms = vec![a.term(1) - &f];
        for n in 1..cfg.order {
            terms.push(a.term(n + 1) - &(&f * &a.term(n).derivative()));
        }
        let degree_ok = (1..=cfg.order).all(|n| d < 1 || a.term(n).degree().unwrap_or(0) <= n * (d - 1) + 1);
        if !degree_ok {
            terms.push(S::one());
        }
        cases.push((name, Residual::new(terms)));
    }
    Ok(Outcome::residuals(cases))
}

fn check_add_h(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 4);
    let mut cases = Vec::new();
    for k in 0..20 {
        let (f, g) = (random_poly(&mut r, 3), random_poly(&mut r, 3));
        let sum = aut_add(&autonomous_sequence(&f, cfg.order)?, &autonomous_sequence(&g, cfg.order)?)?;
        let oracle = autonomous_sequence(&(&f + &g), cfg.order)?;
        let mut res = diff_residual(sum.terms(), oracle.terms());
        res.terms.push(sum.generator() - &(&f + &g));
        cases.push((format!("pair {k}"), res));
    }
    Ok(Outcome::residuals(cases))
}

fn check_mul_generator(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 5);
    let mut cases = Vec::new();
    for k in 0..10 {
        let (f, g) = (random_poly(&mut r, 2), random_poly(&mut r, 2));
        let prod = aut_mul(&autonomous_sequence(&f, cfg.order)?, &autonomous_sequence(&g, cfg.order)?)?;
        let mut res = Residual::new(vec![prod.generator() - &(&f * &g)]);
        // A_{n+1} = (fg) δA_n
        for n in 1..cfg.order {
            res.terms.push(prod.term(n + 1) - &(&(&f * &g) * &prod.term(n).derivative()));
        }
        cases.push((format!("pair {k}"), res));
    }
    Ok(Outcome::residuals(cases))
}

fn check_group_law(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.order.min(6);
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        let defect = group_law_defect(&classical_flow(&f, n)?)?;
        cases.push((name, Residual::new(defect.into_iter().flatten().collect())));
    }
    Ok(Outcome::residuals(cases))
}

fn check_pde(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        let (a, b) = pde_defects(&f, &classical_flow(&f, cfg.order)?)?;
        cases.push((name, Residual::new(a.into_iter().chain(b).collect())));
    }
    Ok(Outcome::residuals(cases))
}

fn check_scaling(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for a in [Q::from_i64(2), Q::from_i64(-1), Q::from_ratio(1, 3)] {
            cases.push((format!("{name} a={a}"), Residual::new(scaling_defect(&a, &f, cfg.order)?)));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_factorize(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.order;
    let p = |c: &[i64]| S::from_ints(c);
    let cases: Vec<(Vec<S>, S)> = vec![
        (vec![p(&[0, 1]), p(&[1, -1])], p(&[0, 1, -1])),
        (vec![p(&[1, 1]), p(&[3, 2])], p(&[3, 5, 2])),
        (vec![p(&[0, -1]), p(&[-3, 4])], p(&[0, 3, -4])),
    ];
    let mut out = Vec::new();
    for (factors, expanded) in cases {
        let lhs = flow_factorize(&factors, n)?;
        out.push((format!("{expanded}"), flow_residual(&lhs, &classical_flow(&expanded, n)?)?));
    }
    Ok(Outcome::residuals(out))
}

// --- umbral ------------------------------------------------------------

fn check_basic_axioms(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut failing = Vec::new();
    for op in builtin_ops(cfg.depth) {
        if !BasicSequence::generate(&op, cfg.depth)?.check_axioms()? {
            failing.push(op.name());
        }
    }
    Ok(Outcome::flag(failing.is_empty(), format!("failing: {failing:?}")))
}

/// `q_n(t+s) − Σ C(n,k) q_k(t) q_{n−k}(s)` as a bivariate coefficient list.
pub fn binomial_type_defect<F: Scalar>(b: &BasicSequence<F>, n_max: usize) -> Vec<F> {
    let mut out = Vec::new();
    for n in 0..=n_max.min(b.depth()) {
        // coefficient of t^i s^j on the left: β_{i+j,n} C(i+j, i)
        for i in 0..=n {
            for j in 0..=n - i {
                let lhs = b.beta(i + j, n) * F::from_rational(rational_from_int(binomial(i + j, i)));
                let rhs = (0..=n).fold(F::zero(), |acc, k| {
                    let c = F::from_rational(rational_from_int(binomial(n, k)));
                    acc + c * b.beta(i, k) * b.beta(j, n - k)
                });
                out.push(lhs - rhs);
            }
        }
    }
    out
}

fn check_binomial_type(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut failing = Vec::new();
    let mut worst = 0.0f64;
    for op in builtin_ops(cfg.depth) {
        let defect = binomial_type_defect(&BasicSequence::generate(&op, cfg.depth)?, cfg.order);
        let m = defect.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        worst = worst.max(m);
        if m != 0.0 {
            failing.push(op.name());
        }
    }
    Ok(Outcome { passed: failing.is_empty(), residual: worst, detail: format!("failing: {failing:?}") })
}

fn check_named_bases(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.order;
    let fwd = BasicSequence::generate(&DeltaOp::<Q>::forward(n), n)?;
    let tou = BasicSequence::generate(&DeltaOp::<Q>::touchard(n), n)?;
    let mut bad = Vec::new();
    for m in 0..=n {
        for k in 0..=m {
            if fwd.beta(k, m) != signed_stirling1(m, k)? {
                bad.push(format!("forward β[{k},{m}]"));
            }
            if tou.beta(k, m) != stirling2(m, k)? {
                bad.push(format!("touchard β[{k},{m}]"));
            }
        }
        if fwd.poly(m) != &TPoly::falling(m) {
            bad.push(format!("falling {m}"));
        }
    }
    for alpha in [Q::from_i64(1), Q::from_i64(-1)] {
        let ab = BasicSequence::generate(&DeltaOp::abel(alpha.clone(), n), n)?;
        for m in 1..=n {
            let root = TPoly::new(vec![-(alpha.clone() * Q::from_i64(m as i64)), Q::from_i64(1)]);
            let mut closed = TPoly::t();
            for _ in 1..m {
                closed = &closed * &root;
            }
            if ab.poly(m) != &closed {
                bad.push(format!("abel:{alpha} q_{m}"));
            }
        }
    }
    Ok(Outcome::flag(bad.is_empty(), if bad.is_empty() { "all entries match".into() } else { bad.join(", ") }))
}

fn check_umbral_group(cfg: &VerifyConfig) -> Result<Outcome> {
    let d = cfg.order.min(8);
    let bases: Vec<BasicSequence<Q>> =
        builtin_ops(d).iter().map(|op| BasicSequence::generate(op, d)).collect::<Result<_>>()?;
    let id = BasicSequence::monomial(d);
    let mut bad = Vec::new();
    for a in &bases {
        let inv = umbral_inverse(a)?;
        if !umbral_compose(a, &inv)?.is_monomial() || !umbral_compose(&inv, a)?.is_monomial() {
            bad.push(format!("inverse {}", a.op()));
        }
        if umbral_compose(a, &id)? != *a || umbral_compose(&id, a)? != *a {
            bad.push(format!("identity {}", a.op()));
        }
    }
    for w in bases.windows(3) {
        let left = umbral_compose(&umbral_compose(&w[0], &w[1])?, &w[2])?;
        let right = umbral_compose(&w[0], &umbral_compose(&w[1], &w[2])?)?;
        if left != right {
            bad.push(format!("assoc {}", w[0].op()));
        }
    }
    // the composite is the basis of the composed operator
    let c = umbral_compose(&bases[1], &bases[2])?;
    let oracle = BasicSequence::generate(&bases[1].op().compose(bases[2].op())?, d)?;
    if c != oracle {
        bad.push("compose vs operator".into());
    }
    Ok(Outcome::flag(bad.is_empty(), if bad.is_empty() { "group axioms hold".into() } else { bad.join(", ") }))
}

fn check_shift_invariance(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 6);
    let mut bad = 0;
    let mut total = 0;
    for op in builtin_ops(cfg.order) {
        for _ in 0..3 {
            let p = TPoly::new((0..=5).map(|_| Q::from_i64(r.gen_range(-3..=3))).collect());
            let a = Q::from_ratio(r.gen_range(-5..=5), r.gen_range(1..=4));
            total += 1;
            if op.apply(&p.shift(&a))? != op.apply(&p)?.shift(&a) {
                bad += 1;
            }
        }
    }
    Ok(Outcome::flag(bad == 0, format!("{bad}/{total} samples differ")))
}

// --- deltaflow ---------------------------------------------------------

fn check_delta_ode(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for op in builtin_ops(cfg.order) {
            cases.push((format!("{name}/{op}"), verify_delta_ode(&f, &op, cfg.order)?));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_x_half(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for op in builtin_ops(cfg.order) {
            cases.push((format!("{name}/{op}"), x_pde_defect(&delta_flow(&f, &op, cfg.order)?)));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_base_point(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for op in builtin_ops(cfg.order) {
            let at_zero = delta_flow(&f, &op, cfg.order)?.flow().eval_t(&Q::from_i64(0));
            cases.push((format!("{name}/{op}"), Residual::new(vec![&at_zero - &S::x()])));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_round_trip(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for op in builtin_ops(cfg.order) {
            let phi = delta_flow(&f, &op, cfg.order)?;
            let back = phi.to_monomial().to_basic(phi.basis().clone())?;
            cases.push((format!("{name}/{op}"), flow_residual(&back, phi.flow())?));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_representation(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for op in builtin_ops(cfg.order) {
            cases.push((format!("{name}/{op}"), delta_representation_defect(&delta_flow(&f, &op, cfg.order)?)?));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_additivity(cfg: &VerifyConfig) -> Result<Outcome> {
    // exact bivariate identity; kept at a small order because nonlinear
    // generators make the composed polynomial large
    let n = cfg.order.min(3);
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for op in builtin_ops(n) {
            let defect = delta_additivity_defect(&delta_flow(&f, &op, n)?)?;
            cases.push((format!("{name}/{op}"), Residual::new(defect.into_iter().flatten().collect())));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_connection(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for op in builtin_ops(cfg.order) {
            let conn = connection_flow(&f, &op, cfg.order)?;
            cases.push((format!("{name}/{op}"), flow_residual(&conn, &delta_flow(&f, &op, cfg.order)?.to_monomial())?));
        }
    }
    let d = cfg.order.min(8);
    let ops = builtin_ops(d);
    let mut bad = Vec::new();
    for (i, j) in [(1, 2), (3, 5), (5, 1)] {
        let (a, b) = (BasicSequence::generate(&ops[i], d)?, BasicSequence::generate(&ops[j], d)?);
        let composed = ConnectionMatrix::from_basis(&umbral_compose(&a, &b)?);
        let product = ConnectionMatrix::from_basis(&b).mul(&ConnectionMatrix::from_basis(&a))?;
        if composed != product {
            bad.push(format!("{}⊚{}", ops[i], ops[j]));
        }
    }
    let mut o = Outcome::residuals(cases);
    if !bad.is_empty() {
        o.passed = false;
        o.detail = format!("{}; anti-isomorphism fails for {}", o.detail, bad.join(", "));
    }
    Ok(o)
}

fn check_rho_ring(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.order;
    let mut r = rng(cfg, 7);
    let mut cases = Vec::new();
    for op in [DeltaOp::forward(n), DeltaOp::touchard(n), DeltaOp::abel(Q::from_i64(-1), n)] {
        let b = basis(&op, n)?;
        let zero = rhoq_zero(&b, n)?;
        let unit = rhoq_unit(&b, n)?;
        for k in 0..4 {
            let fs: Vec<S> = (0..3).map(|_| random_poly(&mut r, 2)).collect();
            let [x, y, z] = [0, 1, 2].map(|i| rho_q_over(&fs[i], &b, n));
            let (x, y, z) = (x?, y?, z?);
            let mut res = Vec::new();
            let mut push = |a: &Flow<Q>, c: &Flow<Q>| -> Result<()> {
                res.extend(a.difference(c)?);
                Ok(())
            };
            push(rhoq_add(&x, &y)?.flow(), rhoq_add(&y, &x)?.flow())?;
            push(rhoq_mul(&x, &y)?.flow(), rhoq_mul(&y, &x)?.flow())?;
            push(rhoq_add(&rhoq_add(&x, &y)?, &z)?.flow(), rhoq_add(&x, &rhoq_add(&y, &z)?)?.flow())?;
            push(rhoq_mul(&rhoq_mul(&x, &y)?, &z)?.flow(), rhoq_mul(&x, &rhoq_mul(&y, &z)?)?.flow())?;
            push(
                rhoq_mul(&x, &rhoq_add(&y, &z)?)?.flow(),
                rhoq_add(&rhoq_mul(&x, &y)?, &rhoq_mul(&x, &z)?)?.flow(),
            )?;
            push(rhoq_add(&x, &zero)?.flow(), x.flow())?;
            push(rhoq_mul(&x, &unit)?.flow(), x.flow())?;
            push(rhoq_add(&x, &y)?.flow(), rho_q_over(&(&fs[0] + &fs[1]), &b, n)?.flow())?;
            cases.push((format!("{op} sample {k}"), Residual::new(res)));
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_monomial_powers(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.order;
    let mut cases = Vec::new();
    for op in builtin_ops(n) {
        let b = basis(&op, n)?;
        for k in 2..=4 {
            for a in [Q::from_i64(1), Q::from_i64(-2)] {
                cases.push((format!("{op} k={k} a={a}"), monomial_power_identity(&a, k, &b, n)?));
            }
        }
    }
    Ok(Outcome::residuals(cases))
}

fn check_sum_product(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.order;
    let mut cases = Vec::new();
    for op in builtin_ops(n) {
        let b = basis(&op, n)?;
        for (name, f) in corpus_generators()? {
            let sum = poly_flow_sum(&f, &b, n)?;
            cases.push((format!("sum {name}/{op}"), flow_residual(sum.flow(), rho_q_over(&f, &b, n)?.flow())?));
        }
        for mu in [Q::from_i64(2), Q::from_ratio(5, 2), Q::from_i64(4)] {
            let factors = [(Q::from_i64(-1), Q::from_i64(0)), (mu.clone(), -(mu.clone() - Q::from_i64(1)))];
            let f = S::from_coeffs(vec![Q::from_i64(0), mu.clone() - Q::from_i64(1), -mu.clone()]);
            let prod = poly_flow_product(&factors, &b, n)?;
            cases.push((format!("logistic {mu}/{op}"), flow_residual(prod.flow(), rho_q_over(&f, &b, n)?.flow())?));
        }
    }
    // the quadratic map over Q(i)
    type G = GaussianRational;
    let bg = Arc::new(BasicSequence::generate(&DeltaOp::<G>::forward(n), n)?);
    let alpha = G::parse_exact("1/2+1/2*i")?;
    let prod = poly_flow_product(&[(G::from_i64(1), -alpha.clone()), (G::from_i64(1), -alpha.conj())], &bg, n)?;
    let f = XSeries::from_coeffs(vec![G::from_ratio(1, 2), G::from_i64(-1), G::from_i64(1)]);
    let gres = Residual::new(prod.flow().difference(rho_q_over(&f, &bg, n)?.flow())?);
    let mut o = Outcome::residuals(cases);
    if !gres.is_zero() {
        o.passed = false;
        o.detail.push_str("; quadratic map over Qi differs");
    }
    Ok(o)
}

fn check_flow_group(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.order.min(8);
    let f = S::from_ints(&[0, 1, -1]);
    let ops = builtin_ops(n);
    let flows: Vec<_> = ops.iter().map(|op| delta_flow(&f, op, n)).collect::<Result<_>>()?;
    let id = delta_flow_over(&f, &Arc::new(BasicSequence::monomial(n)), n)?;
    let mut bad = Vec::new();
    for phi in &flows {
        if !flow_compose(phi, &id)?.flow().agrees_with(phi.flow()) {
            bad.push(format!("identity {}", phi.basis().op()));
        }
        let back = flow_compose(phi, &flow_inverse(phi)?)?;
        if !back.to_monomial().agrees_with(&classical_flow(&f, n)?) {
            bad.push(format!("inverse {}", phi.basis().op()));
        }
    }
    for w in flows.windows(3) {
        let left = flow_compose(&flow_compose(&w[0], &w[1])?, &w[2])?;
        let right = flow_compose(&w[0], &flow_compose(&w[1], &w[2])?)?;
        if **left.basis() != **right.basis() || !left.to_monomial().agrees_with(&right.to_monomial()) {
            bad.push(format!("assoc from {}", w[0].basis().op()));
        }
    }
    Ok(Outcome::flag(bad.is_empty(), if bad.is_empty() { "group axioms hold".into() } else { bad.join(", ") }))
}

// --- solver ------------------------------------------------------------

/// `(label, closed, iterated)` over the corpus, initial values and `n`.
fn oracle_cases<F: Scalar>(horizon: usize, field: FieldKind) -> Result<Vec<(String, F, F)>> {
    let c = Corpus::builtin();
    let mut out = Vec::new();
    for m in c.maps.iter().filter(|m| m.field_kind().ok() == Some(field)) {
        let g = m.map::<F>()?;
        let solver = ForwardSolver::new(&g, horizon)?;
        for x0 in c.initial_values::<F>()? {
            let it = iterate(&g, &x0, horizon)?;
            for (n, y) in it.into_iter().enumerate() {
                out.push((format!("{} x0={} n={}", m.name, x0, n), solver.solve(&x0, n)?, y));
            }
        }
    }
    Ok(out)
}

fn mismatch_outcome<F: Scalar>(cases: Vec<(String, F, F)>) -> Outcome {
    let total = cases.len();
    let bad: Vec<String> = cases.into_iter().filter(|(_, a, b)| a != b).map(|(l, _, _)| l).collect();
    Outcome::flag(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{total} values equal")
        } else {
            format!("{}/{} differ, e.g. {}", bad.len(), total, bad.iter().take(4).cloned().collect::<Vec<_>>().join("; "))
        },
    )
}

fn check_forward_oracle(cfg: &VerifyConfig) -> Result<Outcome> {
    let horizon = cfg.order.min(12);
    let mut cases: Vec<(String, GaussianRational, GaussianRational)> = oracle_cases::<Q>(horizon, FieldKind::Rational)?
        .into_iter()
        .map(|(l, a, b)| (l, GaussianRational::from_rational(a), GaussianRational::from_rational(b)))
        .collect();
    cases.extend(oracle_cases::<GaussianRational>(horizon, FieldKind::Gaussian)?);
    Ok(mismatch_outcome(cases))
}

fn check_fixed_points(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for mu in Corpus::builtin().mus::<Q>()? {
        let fixed = (mu.clone() - Q::from_i64(1)) / mu.clone();
        for n in 0..=cfg.order {
            cases.push((format!("mu={mu} x0=0 n={n}"), solve_logistic(&mu, &Q::from_i64(0), n)?, Q::from_i64(0)));
            cases.push((format!("mu={mu} x0={fixed} n={n}"), solve_logistic(&mu, &fixed, n)?, fixed.clone()));
        }
    }
    Ok(mismatch_outcome(cases))
}

fn check_quadratic(cfg: &VerifyConfig) -> Result<Outcome> {
    type G = GaussianRational;
    let c = G::from_ratio(1, 2);
    let g = XSeries::from_coeffs(vec![c.clone(), G::from_i64(0), G::from_i64(1)]);
    let mut cases = Vec::new();
    for z0 in [G::from_i64(0), G::parse_exact("1/2*i")?] {
        let it = iterate(&g, &z0, cfg.order)?;
        for (n, y) in it.into_iter().enumerate() {
            cases.push((format!("z0={z0} n={n}"), solve_quadratic_map(&c, &z0, n, false)?.value, y));
        }
    }
    Ok(mismatch_outcome(cases))
}

fn check_factored_direct(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for mu in Corpus::builtin().mus::<Q>()? {
        let g = crate::solver::logistic_map(&mu);
        for x0 in Corpus::builtin().initial_values::<Q>()? {
            for n in 0..=cfg.order {
                cases.push((format!("mu={mu} x0={x0} n={n}"), solve_logistic(&mu, &x0, n)?, solve_forward(&g, &x0, n)?));
            }
        }
    }
    Ok(mismatch_outcome(cases))
}

fn check_backward(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        cases.push((name, backward_relation_check(&f, cfg.order)?));
    }
    Ok(Outcome::residuals(cases))
}

fn check_abel_scaling(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut cases = Vec::new();
    for (name, f) in corpus_generators()? {
        for a in [Q::from_i64(2), Q::from_i64(-1)] {
            cases.push((format!("{name} a={a}"), abel_scaling_check(&Q::from_i64(1), &a, &f, cfg.order)?));
        }
    }
    Ok(Outcome::residuals(cases))
}

// --- numeric -----------------------------------------------------------

fn check_numeric(_cfg: &VerifyConfig) -> Result<Outcome> {
    let ncfg = NumericConfig::default();
    let one = Q::from_i64(1);
    let zero = Q::from_i64(0);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for kind in default_kinds(&ncfg) {
        for (a, t) in &ncfg.samples {
            let rep = numeric_closed_form_check(&kind, a, &zero, t, &one, &ncfg)?;
            worst = worst.max(rep.deviation);
            if !rep.within(ncfg.tolerance) {
                bad.push(format!("{} a={a} t={t}", rep.kind));
            }
        }
    }
    Ok(Outcome {
        passed: bad.is_empty(),
        residual: worst,
        detail: if bad.is_empty() { format!("max deviation {worst:.3e}") } else { bad.join(", ") },
    })
}

fn check_lambert(_cfg: &VerifyConfig) -> Result<Outcome> {
    let grid = lambert_grid();
    let worst = grid.iter().map(|&x| lambert_residual(x)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    Ok(Outcome { passed: worst < 1e-12, residual: worst, detail: format!("{} points", grid.len()) })
}

/// Resolve an operator name for the CLI.
pub fn op_from_name(name: &str, order: usize) -> Result<DeltaOp<Q>> {
    parse_op(name, order)
}
