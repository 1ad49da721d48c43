//! Jackson q-integration and the q-difference operator.
//!
//! `∫_0^b f(t) d_q t = (1 - q) b Σ_{i≥0} q^i f(b q^i)` is a Riemann sum on the
//! geometric grid below `b`. Each integral builds its own grid from its own
//! upper limit; nothing is snapped to a global grid.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{domain, QError, Result};
use crate::expr::Expr;
use crate::qcore::{check_q, EvalResult, IntegralResult, QContext, Truncation};
use crate::sum::sum_series;

type EvalFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// A real function of one positive real variable.
///
/// The Jackson engine needs `f` on every grid point `b q^i`. For the sums to
/// converge the caller must also ensure `|f(t) t^a|` stays bounded near zero
/// for some `a` in `[0, 1)`; violations only show up as non-convergence.
#[derive(Clone)]
pub struct Integrand {
    eval: Arc<EvalFn>,
    description: String,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("description", &self.description)
            .finish()
    }
}

impl Integrand {
    /// Wraps a fallible function.
    pub fn new<F>(description: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            description: description.into(),
        }
    }

    /// Wraps a total function.
    pub fn from_fn<F>(description: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(description, move |t| Ok(f(t)))
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(format!("{c}"), move |_| c)
    }

    /// `t^e`.
    pub fn power(exponent: f64) -> Self {
        Self::from_fn(format!("t^{exponent}"), move |t| t.powf(exponent))
    }

    /// `c_0 + c_1 t + c_2 t^2 + ...`
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let c = coeffs.to_vec();
        let description = c
            .iter()
            .enumerate()
            .map(|(k, v)| format!("{v}*t^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        Self::from_fn(description, move |t| c.iter().rev().fold(0.0, |acc, &v| acc * t + v))
    }

    /// An integrand backed by a parsed expression.
    pub fn from_expr(expr: Expr) -> Self {
        let description = expr.to_string();
        Self::new(description, move |t| {
            crate::expr::evaluate(&expr, t).map_err(|e| QError::Evaluation {
                t,
                message: e.to_string(),
            })
        })
    }

    /// Evaluates the function, rejecting non-finite values.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = (self.eval)(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QError::Evaluation {
                t,
                message: format!("non-finite value {v}"),
            })
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// A copy that caches values by the exact bit pattern of `t`.
    ///
    /// Useful when an expensive integrand (another operator) is sampled on
    /// overlapping grids.
    pub fn memoized(&self) -> Self {
        let inner = self.clone();
        let cache: Mutex<HashMap<u64, f64>> = Mutex::new(HashMap::new());
        Self::new(self.description.clone(), move |t| {
            if let Some(&v) = cache.lock().expect("memo lock poisoned").get(&t.to_bits()) {
                return Ok(v);
            }
            let v = inner.eval(t)?;
            cache.lock().expect("memo lock poisoned").insert(t.to_bits(), v);
            Ok(v)
        })
    }
}

/// `∫_0^b f(t) d_q t`.
pub fn jackson_integral(f: &Integrand, b: f64, q: f64, trunc: &Truncation) -> Result<IntegralResult> {
    check_q(q)?;
    if !(b > 0.0 && b.is_finite()) {
        return domain(format!("Jackson integral needs an upper limit b > 0, got {b}"));
    }
    let r = sum_series(
        |i| {
            let qi = q.powi(i as i32);
            Ok(qi * f.eval(b * qi)?)
        },
        q,
        trunc,
    )?;
    Ok(r.scaled((1.0 - q) * b))
}

/// `∫_a^b f(t) d_q t = ∫_0^b - ∫_0^a`.
pub fn jackson_integral_between(
    f: &Integrand,
    a: f64,
    b: f64,
    q: f64,
    trunc: &Truncation,
) -> Result<IntegralResult> {
    check_q(q)?;
    if !(a >= 0.0 && a <= b) {
        return domain(format!("Jackson integral needs 0 <= a <= b, got a = {a}, b = {b}"));
    }
    if a == b {
        return Ok(EvalResult::exact(0.0));
    }
    let upper = jackson_integral(f, b, q, trunc)?;
    if a == 0.0 {
        return Ok(upper);
    }
    let lower = jackson_integral(f, a, q, trunc)?;
    Ok(upper.minus(&lower))
}

/// Jackson difference `(f(x) - f(qx)) / ((1 - q) x)`.
pub fn q_derivative(f: &Integrand, x: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !(x > 0.0) {
        return domain(format!("q-derivative needs x > 0, got {x}"));
    }
    Ok((f.eval(x)? - f.eval(q * x)?) / ((1.0 - q) * x))
}

/// `(t^{-p} D_q)^n f` at `x`, using the values of `f` at `x, xq, ..., xq^n`.
pub fn composed_xp_dq(f: &Integrand, x: f64, n: u32, ctx: &QContext) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("composed q-derivative needs x > 0, got {x}"));
    }
    let q = ctx.q();
    let values = (0..=n)
        .map(|j| f.eval(x * q.powi(j as i32)))
        .collect::<Result<Vec<_>>>()?;
    Ok(apply_composed(values, x, ctx))
}

/// Applies `t ↦ t^{-p} D_q` to values sampled on `x q^j`, shrinking the
/// vector by one each time. The same linear map is used for error bounds.
pub(crate) fn apply_composed(mut values: Vec<f64>, x: f64, ctx: &QContext) -> f64 {
    let (q, p) = (ctx.q(), ctx.p());
    let n = values.len() - 1;
    for level in 0..n {
        for j in 0..n - level {
            let t = x * q.powi(j as i32);
            values[j] = t.powf(-p) * (values[j] - values[j + 1]) / ((1.0 - q) * t);
        }
    }
    values[0]
}

/// Absolute error bound of [`apply_composed`] given per-sample bounds.
pub(crate) fn propagate_composed(mut errors: Vec<f64>, x: f64, ctx: &QContext) -> f64 {
    let (q, p) = (ctx.q(), ctx.p());
    let n = errors.len() - 1;
    for level in 0..n {
        for j in 0..n - level {
            let t = x * q.powi(j as i32);
            errors[j] = t.powf(-p) * (errors[j] + errors[j + 1]) / ((1.0 - q) * t);
        }
    }
    errors[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{big_e_q, q_number};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tight() -> Truncation {
        Truncation::new(1e-14, 10_000).unwrap()
    }

    #[test]
    fn integral_examples() {
        let t = tight();
        let one = jackson_integral(&Integrand::constant(1.0), 1.0, 0.5, &t).unwrap();
        assert!(one.converged);
        assert_relative_eq!(one.value, 1.0, max_relative = 1e-13);
        let lin = jackson_integral(&Integrand::power(1.0), 1.0, 0.5, &t).unwrap();
        assert_relative_eq!(lin.value, 1.0 / 1.5, max_relative = 1e-13);
        for p in [-0.5, 0.0, 0.7, 2.0] {
            let x = 1.7;
            let r = jackson_integral(&Integrand::power(p), x, 0.5, &t).unwrap();
            assert!(r.converged);
            assert_relative_eq!(r.value, x.powf(p + 1.0) / q_number(p + 1.0, 0.5), max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_weight_integrates_to_one() {
        let q = 0.5;
        let e = Integrand::new("E_q(-qt)", move |x| Ok(big_e_q(-q * x, q, &tight())?.value));
        let r = jackson_integral(&e, 1.0 / (1.0 - q), q, &tight()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn between_examples() {
        let t = tight();
        let f = Integrand::power(1.0);
        assert_eq!(jackson_integral_between(&f, 0.8, 0.8, 0.5, &t).unwrap().value, 0.0);
        let c = jackson_integral_between(&Integrand::constant(1.0), 0.5, 1.0, 0.5, &t).unwrap();
        assert_relative_eq!(c.value, 0.5, max_relative = 1e-13);
        for (a, b) in [(0.2, 1.0), (0.5, 3.0), (0.0, 2.0)] {
            let r = jackson_integral_between(&f, a, b, 0.5, &t).unwrap();
            assert_relative_eq!(r.value, (b * b - a * a) / 1.5, max_relative = 1e-12);
        }
        assert!(jackson_integral_between(&f, 1.0, 0.5, 0.5, &t).is_err());
        assert!(jackson_integral(&f, 0.0, 0.5, &t).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        // 1/t violates the boundedness contract: terms never decay
        let f = Integrand::power(-1.0);
        let r = jackson_integral(&f, 1.0, 0.5, &Truncation::new(1e-12, 500).unwrap()).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn derivative_examples() {
        let q = 0.5;
        for n in 0..5 {
            let x = 1.3;
            let d = q_derivative(&Integrand::power(n as f64), x, q).unwrap();
            assert_relative_eq!(d, q_number(n as f64, q) * x.powi(n - 1), max_relative = 1e-14, epsilon = 1e-15);
        }
        assert_eq!(q_derivative(&Integrand::constant(4.0), 2.0, q).unwrap(), 0.0);
        assert!(q_derivative(&Integrand::constant(4.0), 0.0, q).is_err());
    }

    #[test]
    fn derivative_of_big_e() {
        let q = 0.5;
        let e = Integrand::new("E_q(-t)", move |x| Ok(big_e_q(-x, q, &tight())?.value));
        for x in [0.3, 1.0, 1.9] {
            let d = q_derivative(&e, x, q).unwrap();
            let expected = -big_e_q(-q * x, q, &tight()).unwrap().value;
            assert_relative_eq!(d, expected, max_relative = 1e-11);
        }
    }

    #[test]
    fn composed_examples() {
        let ctx = QContext::new(0.5, 1.0).unwrap();
        let v = composed_xp_dq(&Integrand::power(2.0), 0.8, 1, &ctx).unwrap();
        assert_relative_eq!(v, ctx.p_bracket(), max_relative = 1e-14);
        // (t^{-p} D_q)^2 t^{2(p+1)} = [p+1]_q [2p+2]_q; hand value 1.5 * 1.875
        let v2 = composed_xp_dq(&Integrand::power(4.0), 0.8, 2, &ctx).unwrap();
        assert_relative_eq!(v2, 2.8125, max_relative = 1e-13);
    }

    #[test]
    fn composed_inverts_weighted_integral() {
        let ctx = QContext::new(0.5, 1.0).unwrap();
        let t = tight();
        for k in 0..4 {
            let f = Integrand::power(k as f64);
            let g = {
                let f = f.clone();
                Integrand::new("J1", move |x| {
                    let w = Integrand::new("w^p f", {
                        let f = f.clone();
                        move |s| Ok(s * f.eval(s)?)
                    });
                    jackson_integral(&w, x, 0.5, &t)?.value()
                })
            };
            let v = composed_xp_dq(&g, 0.9, 1, &ctx).unwrap();
            assert_relative_eq!(v, 0.9_f64.powi(k), max_relative = 1e-10);
        }
    }

    /// Polynomial with its exact derivative coefficients.
    fn poly_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-2.0f64..2.0, 1..=5)
    }

    fn poly(c: &[f64], t: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
    }

    proptest! {
        #[test]
        fn integration_by_parts(
            fc in poly_strategy(),
            gc in poly_strategy(),
            a in 0.05f64..1.0,
            width in 0.1f64..2.0,
            q in 0.2f64..0.8,
        ) {
            let b = a + width;
            let t = tight();
            let (f, g) = (Integrand::polynomial(&fc), Integrand::polynomial(&gc));
            let lhs_f = {
                let (f, g) = (f.clone(), g.clone());
                Integrand::new("g Dq f", move |x| Ok(g.eval(x)? * q_derivative(&f, x, q)?))
            };
            let rhs_f = {
                let (f, g) = (f.clone(), g.clone());
                Integrand::new("f(q.) Dq g", move |x| Ok(f.eval(q * x)? * q_derivative(&g, x, q)?))
            };
            let lhs = jackson_integral_between(&lhs_f, a, b, q, &t).unwrap().value;
            let boundary = poly(&gc, b) * poly(&fc, b) - poly(&gc, a) * poly(&fc, a);
            let rest = jackson_integral_between(&rhs_f, a, b, q, &t).unwrap().value;
            let scale = lhs.abs() + boundary.abs() + rest.abs() + 1.0;
            prop_assert!((lhs - boundary + rest).abs() <= 1e-10 * scale);
        }

        #[test]
        fn interchange_of_order(fc in poly_strategy(), x in 0.3f64..2.5, q in 0.2f64..0.8) {
            let t = tight();
            let f = Integrand::polynomial(&fc);
            let inner = {
                let f = f.clone();
                Integrand::new("inner", move |v| jackson_integral(&f, v, q, &t)?.value())
            };
            let nested = jackson_integral(&inner, x, q, &t).unwrap().value;
            let weighted = {
                let f = f.clone();
                Integrand::new("(x-qs) f", move |s| Ok((x - q * s) * f.eval(s)?))
            };
            let single = jackson_integral(&weighted, x, q, &t).unwrap().value;
            let scale = nested.abs().max(single.abs()).max(1e-3);
            prop_assert!((nested - single).abs() <= 1e-10 * scale);
        }

        #[test]
        fn linearity(a in -3.0f64..3.0, c in -3.0f64..3.0, b in 0.1f64..3.0, q in 0.1f64..0.9) {
            let t = tight();
            let f = Integrand::power(1.5);
            let g = Integrand::power(0.5);
            let combo = {
                let (f, g) = (f.clone(), g.clone());
                Integrand::new("a f + c g", move |x| Ok(a * f.eval(x)? + c * g.eval(x)?))
            };
            let lhs = jackson_integral(&combo, b, q, &t).unwrap().value;
            let rhs = a * jackson_integral(&f, b, q, &t).unwrap().value
                + c * jackson_integral(&g, b, q, &t).unwrap().value;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs() + 1.0));
        }

        #[test]
        fn positivity(fc in prop::collection::vec(0.0f64..2.0, 1..=5), b in 0.1f64..3.0, q in 0.1f64..0.9) {
            let f = Integrand::polynomial(&fc);
            prop_assert!(jackson_integral(&f, b, q, &Truncation::default()).unwrap().value >= 0.0);
        }
    }

    #[test]
    fn classical_limit_of_square() {
        let q = 1.0 - 1e-4;
        let t = Truncation::new(1e-12, 1_000_000).unwrap();
        let r = jackson_integral(&Integrand::power(2.0), 1.0, q, &t).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() <= 1e-3);
    }

    #[test]
    fn memoized_integrand_agrees() {
        let f = Integrand::power(1.5);
        let m = f.memoized();
        for x in [0.1, 0.5, 0.1, 2.0] {
            assert_eq!(f.eval(x).unwrap(), m.eval(x).unwrap());
        }
    }
}
