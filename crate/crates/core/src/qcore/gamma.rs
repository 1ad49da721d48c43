use super::{check_q, power_over_base, EvalResult, Truncation};
use crate::error::{domain, Result};

/// q-Gamma function through its product form
/// `Γ_q(t) = (1 - q)^(t-1) / (1 - q)^{t-1}`, where the numerator is the
/// generalized q-power with `x = 1`, `y = q`.
///
/// Only `t > 0` is accepted; there is no analytic continuation.
pub fn q_gamma(t: f64, q: f64, trunc: &Truncation) -> Result<EvalResult> {
    check_q(q)?;
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("q-Gamma needs t > 0, got {t}"));
    }
    let power = power_over_base(1.0, q, t - 1.0, q.ln(), trunc)?;
    let scale = ((t - 1.0) * (-q).ln_1p()).exp();
    Ok(EvalResult::from_product(power.value / scale, &[&power]))
}

/// q-Beta function `Γ_q(t) Γ_q(s) / Γ_q(t + s)`.
pub fn q_beta(t: f64, s: f64, q: f64, trunc: &Truncation) -> Result<EvalResult> {
    if !(t > 0.0 && s > 0.0) {
        return domain(format!("q-Beta needs t, s > 0, got ({t}, {s})"));
    }
    let gt = q_gamma(t, q, trunc)?;
    let gs = q_gamma(s, q, trunc)?;
    let gts = q_gamma(t + s, q, trunc)?;
    Ok(EvalResult::from_product(gt.value * gs.value / gts.value, &[&gt, &gs, &gts]))
}
