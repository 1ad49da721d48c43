//! Both sides of the summation and integral identities behind the operator:
//! the Heine-type sum, the beta-type integral with a lower limit, and the
//! logarithmic limit of the normalized generalized power.

use crate::error::{domain, Result};
use crate::jackson::{jackson_integral, Integrand};
use crate::qcore::{bracket_exponent, gen_power, QContext, Truncation};
use crate::sum::sum_series;

/// Left- and right-hand side of an identity, evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityPair {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityPair {
    pub fn abs_err(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// `|lhs - rhs| / |rhs|`, or the absolute error when `rhs` is zero.
    pub fn rel_err(&self) -> f64 {
        if self.rhs == 0.0 {
            self.abs_err()
        } else {
            self.abs_err() / self.rhs.abs()
        }
    }
}

/// `Σ_{t≥0} (1 - μ Q^{1-t})^(α-1) (1 - Q^{1+t})^(β-1) Q^{tα}` against
/// `(1-Q)^(α-1) (1-Q)^(β-1) / (1-Q)^(α+β-1) · (1 - μQ)^(α+β-1)`, all powers
/// over `Q = q^{p+1}`.
pub fn heine_type_sum(
    mu: f64,
    alpha: f64,
    beta: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<IdentityPair> {
    if !(0.0..1.0).contains(&mu) {
        return domain(format!("Heine-type sum needs 0 <= mu < 1, got {mu}"));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return domain(format!("Heine-type sum needs alpha, beta > 0, got ({alpha}, {beta})"));
    }
    let ln_b = ctx.ln_base();
    let base = ctx.base();
    let power = |y: f64, e: f64| -> Result<f64> { gen_power(1.0, y, e, ctx, trunc)?.value() };
    let lhs = sum_series(
        |t| {
            let t = t as f64;
            let first = if mu == 0.0 {
                1.0
            } else {
                power((mu.ln() + (1.0 - t) * ln_b).exp(), alpha - 1.0)?
            };
            let second = power(((1.0 + t) * ln_b).exp(), beta - 1.0)?;
            Ok(first * second * (t * alpha * ln_b).exp())
        },
        base,
        trunc,
    )?
    .value()?;
    let rhs = power(base, alpha - 1.0)? * power(base, beta - 1.0)? / power(base, alpha + beta - 1.0)?
        * power(mu * base, alpha + beta - 1.0)?;
    Ok(IdentityPair { lhs, rhs })
}

/// `∫_a^x t^p (x^{p+1} - (qt)^{p+1})^(α-1) (t^{p+1} - a^{p+1})^(λ) d_q t`
/// against `(1-q) (1-Q)^(α-1) (1-Q)^(λ) / (1-Q)^(α+λ) · (x^{p+1} - a^{p+1})^(α+λ)`.
///
/// The left side is `∫_0^x - ∫_0^a`. For non-integer `λ` every term of the
/// second sum carries a vanishing factor of `((aq^i)^{p+1} - a^{p+1})^(λ)`, so
/// it is skipped; for integer `λ` that factor is a finite product which only
/// vanishes for the first `λ` terms, and the sum is evaluated.
pub fn beta_type_integral(
    a: f64,
    x: f64,
    alpha: f64,
    lambda: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<IdentityPair> {
    if !(a >= 0.0 && a < x && x.is_finite()) {
        return domain(format!("beta-type integral needs 0 <= a < x, got a = {a}, x = {x}"));
    }
    if !(alpha > 0.0) {
        return domain(format!("beta-type integral needs alpha > 0, got {alpha}"));
    }
    if !(lambda > -1.0) {
        return domain(format!("beta-type integral needs lambda > -1, got {lambda}"));
    }
    let (q, p) = (ctx.q(), ctx.p());
    let p1 = p + 1.0;
    let (xp, ap) = (x.powf(p1), a.powf(p1));
    let (c, t) = (*ctx, *trunc);
    let integrand = Integrand::new("beta-type kernel", move |s| {
        let k1 = gen_power(xp, (q * s).powf(p1), alpha - 1.0, &c, &t)?.value()?;
        let k2 = gen_power(s.powf(p1), ap, lambda, &c, &t)?.value()?;
        Ok(s.powf(p) * k1 * k2)
    });
    let mut lhs = jackson_integral(&integrand, x, q, trunc)?.value()?;
    if a > 0.0 && lambda.fract() == 0.0 {
        lhs -= jackson_integral(&integrand, a, q, trunc)?.value()?;
    }

    let base = ctx.base();
    let power = |y: f64, e: f64| -> Result<f64> { gen_power(1.0, y, e, ctx, trunc)?.value() };
    let rhs = (1.0 - q) * power(base, alpha - 1.0)? * power(base, lambda)? / power(base, alpha + lambda)?
        * gen_power(xp, ap, alpha + lambda, ctx, trunc)?.value()?;
    Ok(IdentityPair { lhs, rhs })
}

/// `(t^{p+1} - a^{p+1})^(λ) / [p+1]^(λ)` at `q = 1 - eps_q`, `p = -1 + eps_p`
/// (left) against `(ln(t/a))^λ` (right).
///
/// The generalized power is a slowly converging product this close to
/// `q = 1`; `trunc` should allow on the order of `1/eps_q` factors.
pub fn hadamard_kernel_limit_check(
    t: f64,
    a: f64,
    lambda: f64,
    eps_q: f64,
    eps_p: f64,
    trunc: &Truncation,
) -> Result<IdentityPair> {
    if !(a > 0.0 && t > a && t.is_finite()) {
        return domain(format!("Hadamard kernel check needs 0 < a < t, got a = {a}, t = {t}"));
    }
    if !(lambda >= 0.0) {
        return domain(format!("Hadamard kernel check needs lambda >= 0, got {lambda}"));
    }
    if !(eps_q > 0.0 && eps_q < 1.0 && eps_p > 0.0) {
        return domain(format!("offsets must be small positive numbers, got ({eps_q}, {eps_p})"));
    }
    let ctx = QContext::new(1.0 - eps_q, -1.0 + eps_p)?;
    let num = gen_power(t.powf(eps_p), a.powf(eps_p), lambda, &ctx, trunc)?.value()?;
    let den = bracket_exponent(lambda, &ctx, trunc)?.value()?;
    Ok(IdentityPair {
        lhs: num / den,
        rhs: (t / a).ln().powf(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{power_kernel_integral, power_rule};
    use approx::assert_relative_eq;

    fn tight() -> Truncation {
        Truncation::new(1e-14, 10_000).unwrap()
    }

    #[test]
    fn heine_on_grid() {
        for p in [0.0, 1.0] {
            let ctx = QContext::new(0.5, p).unwrap();
            let big_q = ctx.base();
            for mu in [0.0, big_q, big_q * big_q] {
                for (alpha, beta) in [(0.5, 0.5), (1.5, 2.0), (0.5, 1.5)] {
                    let r = heine_type_sum(mu, alpha, beta, &ctx, &tight()).unwrap();
                    assert!(r.rel_err() <= 1e-10, "mu={mu} a={alpha} b={beta} p={p}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn heine_alpha_one_is_mu_free() {
        // (1 - μQ^{1-t})^(0) = 1, so μ drops out of both sides
        let ctx = QContext::new(0.5, 1.0).unwrap();
        let a = heine_type_sum(0.0, 1.0, 1.5, &ctx, &tight()).unwrap();
        let b = heine_type_sum(0.6, 1.0, 1.5, &ctx, &tight()).unwrap();
        assert_eq!(a.lhs, b.lhs);
        assert!(a.rel_err() <= 1e-12);
    }

    #[test]
    fn heine_rejects_domain() {
        let ctx = QContext::new(0.5, 0.0).unwrap();
        assert!(heine_type_sum(1.0, 0.5, 0.5, &ctx, &tight()).is_err());
        assert!(heine_type_sum(0.5, 0.0, 0.5, &ctx, &tight()).is_err());
    }

    #[test]
    fn beta_type_on_grid_lower_limits() {
        for p in [0.0, 1.0] {
            let ctx = QContext::new(0.5, p).unwrap();
            for a in [0.0, 0.25, 0.125] {
                for (alpha, lambda) in [(0.5, 0.0), (1.5, 0.5), (1.5, 1.0), (0.7, 2.0)] {
                    let r = beta_type_integral(a, 1.0, alpha, lambda, &ctx, &tight()).unwrap();
                    assert!(r.rel_err() <= 1e-10, "a={a} alpha={alpha} lambda={lambda} p={p}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn beta_type_at_zero_is_power_kernel_integral() {
        let t = tight();
        let ctx = QContext::new(0.5, 1.0).unwrap();
        for (alpha, lambda) in [(0.5, 0.0), (1.5, 0.5)] {
            let r = beta_type_integral(0.0, 1.0, alpha, lambda, &ctx, &t).unwrap();
            let raw = power_kernel_integral(lambda, alpha, 1.0, &ctx, &t).unwrap().value;
            assert_relative_eq!(r.rhs, raw, max_relative = 1e-12);
            // and the normalized power rule differs from it by Γ_Q(α)
            let rule = power_rule(lambda, alpha, 1.0, &ctx, &t).unwrap().value;
            assert!((rule - raw).abs() > 1e-3 * raw || alpha == 1.0);
        }
    }

    #[test]
    fn hadamard_limits() {
        let t = Truncation::new(1e-12, 100_000).unwrap();
        let r = hadamard_kernel_limit_check(2.0, 1.0, 0.0, 1e-3, 1e-2, &t).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        let r = hadamard_kernel_limit_check(std::f64::consts::E, 1.0, 1.0, 1e-3, 1e-2, &t).unwrap();
        assert_relative_eq!(r.rhs, 1.0, max_relative = 1e-15);
        assert!(r.abs_err() <= 5e-2);
        let r = hadamard_kernel_limit_check(2.0, 1.0, 2.0, 1e-3, 1e-2, &t).unwrap();
        assert!(r.abs_err() <= 5e-2, "{r:?}");
        assert!(hadamard_kernel_limit_check(1.0, 2.0, 1.0, 1e-3, 1e-2, &t).is_err());
    }
}
