//! Generalized q-power `(x - y)^(α)` over an arbitrary base and the bracket
//! exponent `[p+1]^(α)`.

use super::{
    check_q, one_minus_exp, q_gamma, EvalResult, QContext, Truncation, MAX_FINITE_ORDER,
};
use crate::error::{domain, Result};

/// `(x - y)^(α)` over base `Q = q^(p+1)`:
///
/// `x^α Π_{k≥0} (1 - r Q^k) / (1 - r Q^{k+α})` with `r = y/x`.
///
/// For integer `α = n ≥ 0` this is the finite product `Π_{k<n} (x - y Q^k)`.
pub fn gen_power(
    x: f64,
    y: f64,
    alpha: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<EvalResult> {
    power_over_base(x, y, alpha, ctx.ln_base(), trunc)
}

/// `(x - y)^(α)` over base `q`; the `p = 0` case of [`gen_power`].
pub fn q_power(x: f64, y: f64, alpha: f64, q: f64, trunc: &Truncation) -> Result<EvalResult> {
    check_q(q)?;
    power_over_base(x, y, alpha, q.ln(), trunc)
}

pub(crate) fn power_over_base(
    x: f64,
    y: f64,
    alpha: f64,
    ln_base: f64,
    trunc: &Truncation,
) -> Result<EvalResult> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("generalized power needs x > 0, got {x}"));
    }
    if !(y >= 0.0 && y.is_finite()) {
        return domain(format!("generalized power needs y >= 0, got {y}"));
    }
    if !alpha.is_finite() {
        return domain(format!("generalized power needs a finite exponent, got {alpha}"));
    }
    if y == 0.0 || alpha == 0.0 {
        return Ok(EvalResult::exact(x.powf(alpha)));
    }
    let ln_r = (y / x).ln();

    if alpha.fract() == 0.0 && alpha.abs() <= MAX_FINITE_ORDER {
        let n = alpha.abs() as usize;
        if alpha > 0.0 {
            let value = (0..n)
                .map(|k| x * one_minus_exp(ln_r + k as f64 * ln_base))
                .product();
            return Ok(EvalResult::exact(value));
        }
        // (x - y)^(-n) = 1 / Π_{k=1..n} (x - y Q^{-k})
        let denom: f64 = (1..=n)
            .map(|k| x * one_minus_exp(ln_r - k as f64 * ln_base))
            .product();
        if denom == 0.0 {
            return domain(format!("generalized power ({x} - {y})^({alpha}) sits on a pole"));
        }
        return Ok(EvalResult::exact(1.0 / denom));
    }

    let one_minus_base = one_minus_exp(ln_base);
    let mut value = x.powf(alpha);
    let mut bound = f64::INFINITY;
    for k in 0..trunc.max_terms() {
        let ln_u = ln_r + k as f64 * ln_base;
        let ln_w = ln_u + alpha * ln_base;
        let (u, w) = (ln_u.exp(), ln_w.exp());
        if u < 1.0 && w < 1.0 {
            bound = (u / (1.0 - u) + w / (1.0 - w)) / one_minus_base;
            if bound <= trunc.tol() {
                return Ok(EvalResult {
                    value,
                    terms_used: k,
                    est_tail: bound * value.abs(),
                    converged: true,
                });
            }
        }
        let num = one_minus_exp(ln_u);
        let den = one_minus_exp(ln_w);
        if den == 0.0 {
            return domain(format!("generalized power ({x} - {y})^({alpha}) sits on a pole"));
        }
        value *= num / den;
        if value == 0.0 {
            return Ok(EvalResult {
                value,
                terms_used: k + 1,
                est_tail: 0.0,
                converged: true,
            });
        }
    }
    Ok(EvalResult {
        value,
        terms_used: trunc.max_terms(),
        est_tail: bound * value.abs(),
        converged: false,
    })
}

/// Bracket exponent `[p+1]^(α) = Γ_Q(α+1) / Γ_q(α+1) · ([p+1]_q)^α`.
pub fn bracket_exponent(alpha: f64, ctx: &QContext, trunc: &Truncation) -> Result<EvalResult> {
    if !(alpha > -1.0) {
        return domain(format!("bracket exponent needs alpha > -1, got {alpha}"));
    }
    let g_base = q_gamma(alpha + 1.0, ctx.base(), trunc)?;
    let g_q = q_gamma(alpha + 1.0, ctx.q(), trunc)?;
    let value = g_base.value / g_q.value * ctx.p_bracket().powf(alpha);
    Ok(EvalResult::from_product(value, &[&g_base, &g_q]))
}

/// Bracket exponent through its product form
/// `Π_{k≥1} (1 - Q^k)(1 - q^{k+α}) / ((1 - Q^{k+α})(1 - q^k))`.
///
/// Kept as an independent route for cross-checking [`bracket_exponent`].
pub fn bracket_exponent_product(
    alpha: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<EvalResult> {
    if !(alpha > -1.0) {
        return domain(format!("bracket exponent needs alpha > -1, got {alpha}"));
    }
    let ln_q = ctx.q().ln();
    let ln_b = ctx.ln_base();
    let (om_q, om_b) = (one_minus_exp(ln_q), one_minus_exp(ln_b));
    let mut value = 1.0;
    let mut bound = f64::INFINITY;
    for k in 1..=trunc.max_terms() {
        let e = [
            (k as f64 * ln_b, om_b),
            ((k as f64 + alpha) * ln_b, om_b),
            (k as f64 * ln_q, om_q),
            ((k as f64 + alpha) * ln_q, om_q),
        ];
        let small = e.iter().all(|(l, _)| l.exp() < 1.0);
        if small {
            bound = e
                .iter()
                .map(|&(l, om)| {
                    let u = l.exp();
                    u / ((1.0 - u) * om)
                })
                .sum();
            if bound <= trunc.tol() {
                return Ok(EvalResult {
                    value,
                    terms_used: k - 1,
                    est_tail: bound * value.abs(),
                    converged: true,
                });
            }
        }
        value *= one_minus_exp(e[0].0) * one_minus_exp(e[3].0)
            / (one_minus_exp(e[1].0) * one_minus_exp(e[2].0));
    }
    Ok(EvalResult {
        value,
        terms_used: trunc.max_terms(),
        est_tail: bound * value.abs(),
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tight() -> Truncation {
        Truncation::new(1e-15, 10_000).unwrap()
    }

    /// Direct product with a fixed, generous factor count.
    fn direct_product(x: f64, y: f64, alpha: f64, base: f64, factors: usize) -> f64 {
        let r = y / x;
        let mut v = x.powf(alpha);
        for k in 0..factors {
            v *= (1.0 - r * base.powi(k as i32)) / (1.0 - r * base.powf(k as f64 + alpha));
        }
        v
    }

    #[test]
    fn trivial_cases() {
        let ctx = QContext::new(0.5, 1.0).unwrap();
        let t = Truncation::default();
        assert_relative_eq!(gen_power(2.0, 0.0, 1.7, &ctx, &t).unwrap().value, 2f64.powf(1.7));
        assert_relative_eq!(gen_power(2.0, 0.7, 1.0, &ctx, &t).unwrap().value, 1.3, max_relative = 1e-15);
        // (2 - 1)(2 - 1 * 0.25) with Q = q^2 = 0.25
        assert_relative_eq!(gen_power(2.0, 1.0, 2.0, &ctx, &t).unwrap().value, 1.75, max_relative = 1e-15);
        assert_eq!(gen_power(2.0, 1.0, 0.0, &ctx, &t).unwrap().value, 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let ctx = QContext::new(0.5, 0.0).unwrap();
        let t = Truncation::default();
        assert!(gen_power(0.0, 0.5, 0.5, &ctx, &t).is_err());
        assert!(gen_power(-1.0, 0.5, 0.5, &ctx, &t).is_err());
        assert!(gen_power(1.0, -0.5, 0.5, &ctx, &t).is_err());
        // (x - y)^(-1) = 1/(x - y/Q) has a pole at y = xQ
        assert!(gen_power(1.0, 0.5, -1.0, &ctx, &t).is_err());
    }

    #[test]
    fn fractional_exponent_matches_long_product() {
        let ctx = QContext::new(0.5, 0.0).unwrap();
        let v = gen_power(1.0, 0.3, 0.5, &ctx, &tight()).unwrap();
        assert!(v.converged);
        assert_relative_eq!(v.value, direct_product(1.0, 0.3, 0.5, 0.5, 400), max_relative = 1e-14);
    }

    #[test]
    fn negative_integer_exponent() {
        let ctx = QContext::new(0.5, 1.0).unwrap();
        let t = tight();
        let v = gen_power(2.0, 0.3, -2.0, &ctx, &t).unwrap().value;
        let q = ctx.base();
        let expected = 1.0 / ((2.0 - 0.3 / q) * (2.0 - 0.3 / (q * q)));
        assert_relative_eq!(v, expected, max_relative = 1e-14);
        // and it agrees with the non-integer route just off the integer
        let near = gen_power(2.0, 0.3, -2.0 + 1e-9, &ctx, &t).unwrap().value;
        assert_relative_eq!(v, near, max_relative = 1e-6);
    }

    #[test]
    fn q_power_is_p_zero_case() {
        let t = tight();
        let ctx = QContext::new(0.37, 0.0).unwrap();
        for (x, y, a) in [(1.0, 0.37, 0.5), (2.0, 1.5, 1.3), (0.7, 0.1, -0.4)] {
            assert_eq!(
                gen_power(x, y, a, &ctx, &t).unwrap().value,
                q_power(x, y, a, 0.37, &t).unwrap().value
            );
        }
    }

    #[test]
    fn bracket_exponent_examples() {
        let t = tight();
        let ctx = QContext::new(0.5, 1.0).unwrap();
        assert_relative_eq!(bracket_exponent(0.0, &ctx, &t).unwrap().value, 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            bracket_exponent(1.0, &ctx, &t).unwrap().value,
            ctx.p_bracket(),
            max_relative = 1e-15
        );
        let ctx0 = QContext::new(0.5, 0.0).unwrap();
        assert_relative_eq!(bracket_exponent(1.7, &ctx0, &t).unwrap().value, 1.0, max_relative = 1e-14);
        assert!(bracket_exponent(-1.0, &ctx, &t).is_err());
    }

    #[test]
    fn bracket_exponent_forms_agree() {
        let t = tight();
        for alpha in [0.3, 1.0, 2.5] {
            for p in [0.5, 1.0, 3.0] {
                let ctx = QContext::new(0.5, p).unwrap();
                let closed = bracket_exponent(alpha, &ctx, &t).unwrap();
                let prod = bracket_exponent_product(alpha, &ctx, &t).unwrap();
                assert!(closed.converged && prod.converged);
                assert_relative_eq!(closed.value, prod.value, max_relative = 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn integer_exponent_telescopes(
            n in 1u32..=6,
            x in 0.1f64..3.0,
            y_frac in 0.0f64..1.0,
            q in 0.05f64..0.95,
            p in -0.9f64..3.0,
        ) {
            let y = x * y_frac;
            let ctx = QContext::new(q, p).unwrap();
            let base = ctx.base();
            let finite: f64 = (0..n).map(|k| x - y * base.powi(k as i32)).product();
            let v = gen_power(x, y, n as f64, &ctx, &tight()).unwrap().value;
            prop_assert!((v - finite).abs() <= 1e-12 * finite.abs().max(1e-300));
        }

        #[test]
        fn p_zero_power_shares_grid(
            x in 0.1f64..3.0,
            y_frac in 0.0f64..1.0,
            a in -0.9f64..3.0,
            q in 0.05f64..0.95,
        ) {
            let y = x * y_frac;
            let ctx = QContext::new(q, 0.0).unwrap();
            let t = Truncation::default();
            let g = gen_power(x, y, a, &ctx, &t).unwrap().value;
            let h = q_power(x, y, a, q, &t).unwrap().value;
            prop_assert_eq!(g.to_bits(), h.to_bits());
        }
    }
}
