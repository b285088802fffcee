use deltadyn::{
    apply_delta_tpoly, first_expansion, shift_operator, signed_stirling1, stirling2, umbral_apply, umbral_compose,
    umbral_inverse, BasicSequence, DeltaOp, Rational, Scalar, TPoly, UmbralOperator, XSeries,
};
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::Arc;

type Q = Rational;
type S = XSeries<Q>;
type B = BasicSequence<Q>;

const D: usize = 6;

fn custom_op() -> impl Strategy<Value = DeltaOp<Q>> {
    (prop_oneof![-2i64..=-1, 1i64..=2], prop::collection::vec(-2i64..=2, D - 1)).prop_map(|(p1, rest)| {
        let mut c = vec![0, p1];
        c.extend(rest);
        DeltaOp::custom(S::from_ints(&c)).unwrap()
    })
}

fn rational() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Q::from_ratio(n, d))
}

fn tpoly(deg: usize) -> impl Strategy<Value = TPoly<Q>> {
    prop::collection::vec(-4i64..=4, deg + 1).prop_map(|c| TPoly::from_ints(&c))
}

fn builtins(order: usize) -> Vec<DeltaOp<Q>> {
    vec![
        DeltaOp::derivative(order),
        DeltaOp::forward(order),
        DeltaOp::backward(order),
        DeltaOp::abel(Q::from_i64(1), order),
        DeltaOp::abel(Q::from_i64(-1), order),
        DeltaOp::touchard(order),
    ]
}

fn binomial(n: usize, k: usize) -> Q {
    let mut c = Q::from_i64(1);
    for i in 0..k {
        c = c * Q::from_i64((n - i) as i64) / Q::from_i64((i + 1) as i64);
    }
    c
}

/// `Q q_n = n q_{n−1}`, `q_0 = 1`, `q_n(0) = 0`, checked by applying the
/// operator to the stored polynomials.
fn assert_basic_set(q: &DeltaOp<Q>, b: &B) {
    assert_eq!(b.poly(0), &TPoly::one());
    for n in 1..=b.depth() {
        assert!(b.poly(n).eval(&Q::from_i64(0)).is_zero(), "{q} q_{n}(0)");
        let lhs = apply_delta_tpoly(q, b.poly(n)).unwrap();
        assert_eq!(lhs, b.poly(n - 1).scale(&Q::from_i64(n as i64)), "{q} n={n}");
    }
}

/// Compare the addition law at a single point `(t, s)`.
fn binomial_identity_at(b: &B, t: &Q, s: &Q) -> bool {
    (0..=b.depth()).all(|n| {
        let lhs = b.poly(n).eval(&(t.clone() + s.clone()));
        let rhs = (0..=n).fold(Q::from_i64(0), |acc, k| acc + binomial(n, k) * b.poly(k).eval(t) * b.poly(n - k).eval(s));
        lhs == rhs
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn custom_operators_give_basic_sets(q in custom_op()) {
        let b = B::generate(&q, D).unwrap();
        assert_basic_set(&q, &b);
        prop_assert!(b.check_axioms().unwrap());
    }

    #[test]
    fn custom_bases_are_of_binomial_type(q in custom_op(), t in rational(), s in rational()) {
        let b = B::generate(&q, D).unwrap();
        prop_assert!(binomial_identity_at(&b, &t, &s));
    }

    #[test]
    fn umbral_composition_is_associative(a in custom_op(), b in custom_op(), c in custom_op()) {
        let (a, b, c) = (B::generate(&a, D).unwrap(), B::generate(&b, D).unwrap(), B::generate(&c, D).unwrap());
        let left = umbral_compose(&umbral_compose(&a, &b).unwrap(), &c).unwrap();
        let right = umbral_compose(&a, &umbral_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn umbral_inverse_is_two_sided(q in custom_op()) {
        let a = B::generate(&q, D).unwrap();
        let inv = umbral_inverse(&a).unwrap();
        prop_assert!(umbral_compose(&a, &inv).unwrap().is_monomial());
        prop_assert!(umbral_compose(&inv, &a).unwrap().is_monomial());
        prop_assert_eq!(umbral_inverse(&inv).unwrap(), a);
    }

    #[test]
    fn composite_basis_matches_composed_operator(a in custom_op(), b in custom_op()) {
        let (ba, bb) = (B::generate(&a, D).unwrap(), B::generate(&b, D).unwrap());
        let oracle = B::generate(&a.compose(&b).unwrap(), D).unwrap();
        prop_assert_eq!(umbral_compose(&ba, &bb).unwrap(), oracle);
    }

    #[test]
    fn delta_operators_commute_with_shifts(p in tpoly(6), a in rational(), which in 0usize..6) {
        let q = &builtins(8)[which];
        let lhs = q.apply(&p.shift(&a)).unwrap();
        let rhs = q.apply(&p).unwrap().shift(&a);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn umbral_operator_is_linear(p in tpoly(5), r in tpoly(5), c in rational()) {
        let l = UmbralOperator::new(Arc::new(B::generate(&DeltaOp::touchard(D), D).unwrap()));
        let lhs = umbral_apply(&l, &(&p.scale(&c) + &r)).unwrap();
        let rhs = &umbral_apply(&l, &p).unwrap().scale(&c) + &umbral_apply(&l, &r).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn builtin_bases_are_basic_sets_of_binomial_type() {
    let pts = [(Q::from_ratio(1, 2), Q::from_i64(3)), (Q::from_i64(-2), Q::from_ratio(5, 3))];
    for q in builtins(10) {
        let b = B::generate(&q, 10).unwrap();
        assert_basic_set(&q, &b);
        for (t, s) in &pts {
            assert!(binomial_identity_at(&b, t, s), "{q}");
        }
    }
}

#[test]
fn named_bases() {
    let fwd = B::generate(&DeltaOp::<Q>::forward(5), 5).unwrap();
    assert_eq!(fwd.poly(2), &TPoly::from_ints(&[0, -1, 1]));
    let bwd = B::generate(&DeltaOp::<Q>::backward(5), 5).unwrap();
    assert_eq!(bwd.poly(2), &TPoly::from_ints(&[0, 1, 1]));
    let tou = B::generate(&DeltaOp::<Q>::touchard(5), 5).unwrap();
    assert_eq!(tou.poly(3), &TPoly::from_ints(&[0, 1, 3, 1]));
    let abel = B::generate(&DeltaOp::abel(Q::from_ratio(1, 3), 5), 5).unwrap();
    // t(t − 2/3)
    assert_eq!(abel.poly(2), &TPoly::new(vec![Q::from_i64(0), Q::from_ratio(-2, 3), Q::from_i64(1)]));
    assert!(B::generate(&DeltaOp::<Q>::derivative(5), 5).unwrap().is_monomial());
}

#[test]
fn forward_basis_by_product_expansion() {
    // independent oracle: multiply out t(t−1)⋯(t−n+1)
    let b = B::generate(&DeltaOp::<Q>::forward(10), 10).unwrap();
    let mut falling = TPoly::<Q>::one();
    for n in 1..=10 {
        falling = &falling * &TPoly::from_ints(&[-(n as i64 - 1), 1]);
        assert_eq!(b.poly(n), &falling, "n={n}");
        for k in 0..=n {
            assert_eq!(signed_stirling1::<Q>(n, k).unwrap(), falling.coeff(k));
        }
    }
}

#[test]
fn touchard_basis_by_inclusion_exclusion() {
    // S(n,k) = (1/k!) Σ_j (−1)^{k−j} C(k,j) jⁿ
    let b = B::generate(&DeltaOp::<Q>::touchard(10), 10).unwrap();
    for n in 0..=10 {
        for k in 0..=n {
            let mut s = Q::from_i64(0);
            let mut kfact = Q::from_i64(1);
            for j in 0..=k {
                let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
                s = s + Q::from_i64(sign) * binomial(k, j) * Scalar::pow(&Q::from_i64(j as i64), n);
                if j > 0 {
                    kfact = kfact * Q::from_i64(j as i64);
                }
            }
            let s = s / kfact;
            assert_eq!(b.beta(k, n), s, "S({n},{k})");
            assert_eq!(stirling2::<Q>(n, k).unwrap(), s);
        }
    }
    assert_eq!(stirling2::<Q>(3, 2).unwrap(), Q::from_i64(3));
    assert_eq!(signed_stirling1::<Q>(3, 1).unwrap(), Q::from_i64(2));
}

#[test]
fn inverse_of_forward_is_touchard() {
    let fwd = B::generate(&DeltaOp::<Q>::forward(8), 8).unwrap();
    let tou = B::generate(&DeltaOp::<Q>::touchard(8), 8).unwrap();
    assert_eq!(umbral_inverse(&fwd).unwrap(), tou);
    assert!(B::monomial(8) == umbral_inverse(&B::monomial(8)).unwrap());
}

#[test]
fn gamma_inverts_beta() {
    let b = B::generate(&DeltaOp::abel(Q::from_i64(-1), 7), 7).unwrap();
    let g = b.gamma();
    // t^m = Σ_j γ[m][j] q_j
    for (m, row) in g.iter().enumerate() {
        let mut acc = TPoly::zero();
        for (j, c) in row.iter().enumerate() {
            acc = &acc + &b.poly(j).scale(c);
        }
        assert_eq!(acc, TPoly::monomial(Q::from_i64(1), m));
    }
}

#[test]
fn delta_and_shift_expansions() {
    let d = 6;
    let fwd = DeltaOp::<Q>::forward(d);
    let c = first_expansion(fwd.series(), &fwd, d).unwrap();
    assert_eq!(c[1], Q::from_i64(1));
    assert!(c.iter().enumerate().all(|(k, v)| k == 1 || v.is_zero()));
    // E¹ = 1 + △: c_k = q_k(1) = (1)_k, which is 1 for k ≤ 1 and 0 beyond
    let shift = shift_operator(&Q::from_i64(1), d);
    let c = first_expansion(&shift, &fwd, d).unwrap();
    let expected: Vec<Q> = (0..=d).map(|k| Q::from_i64(if k <= 1 { 1 } else { 0 })).collect();
    assert_eq!(c, expected);
    let e1 = shift_operator(&Q::from_i64(1), d);
    assert_eq!(e1.coeff(3), Q::from_ratio(1, 6));
}

#[test]
fn operator_application_examples() {
    let fwd = DeltaOp::<Q>::forward(6);
    assert_eq!(fwd.apply(&TPoly::from_ints(&[0, 0, 1])).unwrap(), TPoly::from_ints(&[1, 2]));
    let f3 = TPoly::<Q>::falling(3);
    assert_eq!(fwd.apply(&f3).unwrap(), TPoly::falling(2).scale(&Q::from_i64(3)));
    let l = UmbralOperator::new(Arc::new(B::generate(&fwd, 6).unwrap()));
    assert_eq!(l.apply(&TPoly::from_ints(&[0, 0, 1])).unwrap(), TPoly::from_ints(&[0, -1, 1]));
    let tou = UmbralOperator::new(Arc::new(B::generate(&DeltaOp::<Q>::touchard(6), 6).unwrap()));
    assert_eq!(tou.apply(&TPoly::from_ints(&[1, 1])).unwrap(), TPoly::from_ints(&[1, 1]));
}
