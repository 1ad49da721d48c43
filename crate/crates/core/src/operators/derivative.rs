use super::{frac_integral, refine, OperatorSpec};
use crate::error::{domain, Result};
use crate::jackson::{apply_composed, propagate_composed, Integrand};
use crate::qcore::EvalResult;

/// Orders above this are rejected; every unit of order costs one more
/// q-difference and one more grid sample.
const MAX_DERIVATIVE_ORDER: f64 = 64.0;

/// `D^α f(x) = (x^{-p} D_q)^n J^{n-α} f(x)` with `n = ⌊α⌋ + 1`.
///
/// `α = 0` returns `f(x)` exactly. The `n` differences need `J^{n-α} f` at
/// `x, xq, ..., xq^n`, all of which must lie above the lower limit.
/// Truncation errors of those samples are pushed through the differences; if
/// the amplified tail misses the tolerance the samples are recomputed under a
/// tighter one.
pub fn frac_derivative(f: &Integrand, x: f64, spec: &OperatorSpec) -> Result<EvalResult> {
    let alpha = spec.alpha();
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("fractional derivative needs x > 0, got {x}"));
    }
    if alpha == 0.0 {
        return Ok(EvalResult::exact(f.eval(x)?));
    }
    if alpha > MAX_DERIVATIVE_ORDER {
        return domain(format!("derivative order above {MAX_DERIVATIVE_ORDER} is not supported"));
    }
    let n = alpha.floor() as u32 + 1;
    let inner = spec.with_alpha(n as f64 - alpha)?;
    let ctx = spec.ctx();
    let q = ctx.q();
    let points: Vec<f64> = (0..=n).map(|j| x * q.powi(j as i32)).collect();
    if points[n as usize] <= spec.lower() {
        return domain(format!(
            "fractional derivative of order {alpha} at {x} samples below the lower limit {}",
            spec.lower()
        ));
    }
    refine(spec.trunc(), |trunc| {
        let inner = inner.with_truncation(*trunc);
        let samples = points
            .iter()
            .map(|&t| frac_integral(f, t, &inner))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalResult {
            value: apply_composed(samples.iter().map(|s| s.value).collect(), x, ctx),
            terms_used: samples.iter().map(|s| s.terms_used).sum(),
            est_tail: propagate_composed(samples.iter().map(|s| s.est_tail).collect(), x, ctx),
            converged: samples.iter().all(|s| s.converged),
        })
    })
}
