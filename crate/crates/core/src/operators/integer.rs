//! Integer-order oracles: the brute-force iterated integral and the
//! single integral against the finite product kernel.

use crate::error::{domain, Result};
use crate::jackson::{jackson_integral, Integrand};
use crate::qcore::{q_number, IntegralResult, QContext, Truncation};

/// Largest order accepted by [`iterated_integral`]; the cost is
/// `O(terms^k)`.
pub const MAX_ITERATED_ORDER: u32 = 4;

/// `∫_0^x x_1^p ∫_0^{x_1} x_2^p ... ∫_0^{x_{k-1}} x_k^p f(x_k) d_q x_k ... d_q x_1`
/// by nested Jackson sums.
pub fn iterated_integral(
    f: &Integrand,
    x: f64,
    k: u32,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<IntegralResult> {
    if k == 0 || k > MAX_ITERATED_ORDER {
        return domain(format!(
            "iterated integral supports orders 1..={MAX_ITERATED_ORDER}, got {k}"
        ));
    }
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("iterated integral needs x > 0, got {x}"));
    }
    nested(f.clone(), x, k, *ctx, *trunc)
}

fn nested(f: Integrand, x: f64, k: u32, ctx: QContext, trunc: Truncation) -> Result<IntegralResult> {
    let p = ctx.p();
    let weighted = if k == 1 {
        Integrand::new("w^p f", move |w| Ok(w.powf(p) * f.eval(w)?))
    } else {
        Integrand::new("w^p J^{k-1} f", move |w| {
            Ok(w.powf(p) * nested(f.clone(), w, k - 1, ctx, trunc)?.value()?)
        })
    };
    jackson_integral(&weighted, x, ctx.q(), &trunc)
}

/// Order-`k` operator as one Jackson integral against the finite kernel
///
/// `1 / Π_{n=1}^{k-1} [n(p+1)]_q · ∫_0^x w^p f(w) Π_{n=0}^{k-2} (x^{p+1} - (wq)^{p+1} Q^n) d_q w`.
pub fn integer_kernel_integral(
    f: &Integrand,
    x: f64,
    k: u32,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<IntegralResult> {
    if k == 0 {
        return domain("integer kernel integral needs k >= 1");
    }
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("integer kernel integral needs x > 0, got {x}"));
    }
    let (q, p) = (ctx.q(), ctx.p());
    let base = ctx.base();
    let norm: f64 = (1..k).map(|n| q_number(n as f64 * (p + 1.0), q)).product();
    let xp1 = x.powf(p + 1.0);
    let g = f.clone();
    let weighted = Integrand::new("finite kernel", move |w| {
        let y = (w * q).powf(p + 1.0);
        let mut kernel = 1.0;
        let mut qn = 1.0;
        for _ in 0..k.saturating_sub(1) {
            kernel *= xp1 - y * qn;
            qn *= base;
        }
        Ok(w.powf(p) * g.eval(w)? * kernel)
    });
    Ok(jackson_integral(&weighted, x, q, trunc)?.scaled(1.0 / norm))
}
