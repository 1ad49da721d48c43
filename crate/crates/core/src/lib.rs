//! Generalized q-fractional calculus.
//!
//! The crate evaluates the two-parameter q-fractional integral `J^α_{p,q}` and
//! its left inverse `D^α_{p,q}` on real arguments, together with the q-special
//! functions they are built from (q-numbers, q-Pochhammer products, the
//! generalized q-power, q-Gamma and q-Beta) and the Jackson integration engine.
//!
//! Module map:
//! - [`qcore`]: q-arithmetic primitives and q-special functions
//! - [`jackson`]: Jackson integrals, the q-difference operator and [`Integrand`]
//! - [`operators`]: the fractional operators, integer-order oracles, closed
//!   forms and the identity-verification registry
//! - [`expr`]: the integrand expression language used by the CLI
//!
//! Every infinite sum or product is truncated under a [`Truncation`] policy and
//! reports its diagnostics through [`EvalResult`].

pub mod error;
pub mod expr;
pub mod jackson;
pub mod operators;
pub mod qcore;
pub mod sum;

pub use error::{QError, Result};
pub use expr::{evaluate, parse, Expr, ParseError};
pub use jackson::{
    composed_xp_dq, jackson_integral, jackson_integral_between, q_derivative, Integrand,
};
pub use operators::{
    classical_reference, frac_derivative, frac_integral, frac_integral_direct, integer_kernel_integral,
    iterated_integral, power_rule, q_riemann_integral, run_identity_suite, Identity, OperatorSpec,
    VerificationReport,
};
pub use qcore::{
    big_e_q, bracket_exponent, e_q, gen_power, q_beta, q_binomial, q_factorial, q_gamma, q_number,
    q_pochhammer, q_pochhammer_inf, q_power, EvalResult, IntegralResult, QContext, Truncation,
};
