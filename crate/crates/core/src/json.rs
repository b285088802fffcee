//! JSON forms: exact scalars are strings, series are arrays of strings, and
//! bases and flows are `{"basis", "order", "coeffs"}` matrices.

use serde::{Deserialize, Serialize};

use crate::deltaflow::DeltaFlow;
use crate::error::Result;
use crate::flow::Flow;
use crate::scalar::Scalar;
use crate::series::XSeries;
use crate::tpoly::TPoly;
use crate::umbral::BasicSequence;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffMatrix {
    pub basis: String,
    pub order: usize,
    pub coeffs: Vec<Vec<String>>,
}

pub fn scalar_strings<F: Scalar>(xs: &[F]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

/// Known coefficients of a series, lowest power first.
pub fn series_strings<F: Scalar>(s: &XSeries<F>) -> Vec<String> {
    scalar_strings(s.coeffs())
}

pub fn tpoly_strings<F: Scalar>(p: &TPoly<F>) -> Vec<String> {
    scalar_strings(p.coeffs())
}

pub fn parse_series<F: Scalar>(xs: &[String]) -> Result<XSeries<F>> {
    Ok(XSeries::from_coeffs(xs.iter().map(|s| F::parse_exact(s)).collect::<Result<_>>()?))
}

/// Row `n` lists the `t`-coefficients of `q_n`, so `coeffs[n][k]` is `β_{k,n}`.
pub fn basis_json<F: Scalar>(b: &BasicSequence<F>) -> CoeffMatrix {
    CoeffMatrix {
        basis: b.op().name(),
        order: b.depth(),
        coeffs: b.rows().iter().map(|r| scalar_strings(r)).collect(),
    }
}

/// Row `n` lists the `x`-coefficients of the `n`-th term.
pub fn flow_json<F: Scalar>(flow: &Flow<F>) -> CoeffMatrix {
    CoeffMatrix {
        basis: flow.basis().name(),
        order: flow.order(),
        coeffs: flow.terms().iter().map(series_strings).collect(),
    }
}

/// Monomial form first, then the basic form.
pub fn delta_flow_json<F: Scalar>(phi: &DeltaFlow<F>) -> Vec<CoeffMatrix> {
    vec![flow_json(&phi.to_monomial()), flow_json(phi.flow())]
}
