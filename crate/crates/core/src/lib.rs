//! Exact solutions of autonomous delta-type systems `QΦ = f(Φ)`.
//!
//! The crate works over exact fields ([`Rational`] and
//! [`GaussianRational`]) and builds, for a generator `f` and a delta
//! operator `Q`, the flow
//!
//! ```text
//! Φ_Q(t, x) = x + Σ A_n(f)(x) q_n(t) / n!
//! ```
//!
//! where `A_n` are the autonomous polynomials of `f` and `q_n` the basic
//! polynomials of `Q`. Every construction can be checked against an
//! independent oracle: brute-force iteration for difference maps,
//! regeneration of bases from composed operators, and so on.
//!
//! ```
//! use deltadyn::{autonomous_sequence, Rational, XSeries};
//!
//! // A_n(x²) = n! x^{n+1}
//! let f = XSeries::<Rational>::from_ints(&[0, 0, 1]);
//! let a = autonomous_sequence(&f, 3).unwrap();
//! assert_eq!(a.term(3), &XSeries::from_ints(&[0, 0, 0, 0, 6]));
//! ```

pub mod autonomous;
pub mod corpus;
pub mod deltaflow;
pub mod error;
pub mod flow;
pub mod json;
pub mod numeric;
pub mod parse;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod tpoly;
pub mod umbral;
pub mod verify;

pub use autonomous::{
    aut_add, aut_mul, aut_scale, autonomous_sequence, classical_flow, flow_factorize, h_sequence, semiflow,
    AutonomousSequence,
};
pub use deltaflow::{
    connection_flow, delta_flow, flow_compose, linear_semiflow_terms, monomial_power_identity, poly_flow_product,
    poly_flow_sum, rho_q, rhoq_add, rhoq_mul, verify_delta_ode, ConnectionMatrix, DeltaFlow, Residual,
};
pub use error::{Error, Result};
pub use flow::{taylor_compose, Basis, Flow};
pub use numeric::{lambert_w, numeric_closed_form_check, NumericConfig, NumericKind};
pub use scalar::{FieldKind, GaussianRational, Rational, Scalar};
pub use series::{DerivativeSequence, Series, XSeries};
pub use solver::{
    abel_scaling_check, backward_relation_check, iterate, solve_backward_series, solve_forward, solve_logistic,
    solve_quadratic_map, DifferenceProblem, IterateTable,
};
pub use tpoly::TPoly;
pub use umbral::{
    apply_delta_tpoly, basic_sequence_from_delta, first_expansion, shift_operator, signed_stirling1, stirling2,
    umbral_apply, umbral_compose, umbral_inverse, BasicSequence, DeltaOp, UmbralOperator,
};
