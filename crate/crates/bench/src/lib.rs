//! Shared fixtures for the criterion benches.

use qfrac_core::{Integrand, OperatorSpec, QContext};

/// Orders swept by the operator benches.
pub const ORDERS: [f64; 3] = [0.5, 1.5, 3.25];

pub fn spec(alpha: f64, q: f64, p: f64) -> OperatorSpec {
    OperatorSpec::new(alpha, QContext::new(q, p).expect("bench parameters are valid"))
        .expect("bench order is valid")
}

/// A cheap polynomial and a parsed expression with a fractional power.
pub fn integrands() -> Vec<(&'static str, Integrand)> {
    let expr = qfrac_core::parse("1/(1+t)^0.5 + t^2").expect("bench expression parses");
    vec![
        ("poly", Integrand::polynomial(&[1.0, -2.0, 0.5])),
        ("expr", Integrand::from_expr(expr)),
    ]
}
