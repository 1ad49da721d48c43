//! The `q → 1` limit of the operator, evaluated by ordinary quadrature.

use statrs::function::gamma::gamma;

use crate::error::{domain, QError, Result};
use crate::jackson::Integrand;

/// `(p+1)^{1-α} / Γ(α) ∫_0^x w^p f(w) (x^{p+1} - w^{p+1})^{α-1} dw`.
///
/// The substitutions `u = x^{p+1} - w^{p+1}` and `v = u^α` remove both the
/// `w^p` weight and the endpoint singularity at `w = x`:
///
/// `(p+1)^{-α} / Γ(α+1) ∫_0^{X^α} f((X - v^{1/α})^{1/(p+1)}) dv`, `X = x^{p+1}`.
pub fn classical_reference(f: &Integrand, x: f64, alpha: f64, p: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("classical reference needs x > 0, got {x}"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("classical reference needs alpha > 0, got {alpha}"));
    }
    if !(p > -1.0 && p.is_finite()) {
        return domain(format!("classical reference needs p > -1, got {p}"));
    }
    let big_x = x.powf(p + 1.0);
    let upper = big_x.powf(alpha);
    let g = |v: f64| -> Result<f64> {
        let u = v.powf(1.0 / alpha).min(big_x);
        let w = (big_x - u).max(0.0).powf(1.0 / (p + 1.0));
        // f is only defined on positive reals; the w = 0 endpoint is never
        // sampled by the open Gauss-Kronrod rule
        f.eval(w)
    };
    let integral = adaptive_gauss_kronrod(g, 0.0, upper, 1e-13, 4000)?;
    Ok(integral * (p + 1.0).powf(-alpha) / gamma(alpha + 1.0))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights on the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn gk15<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx)? + f(c + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// Global adaptive Gauss–Kronrod: keeps bisecting the interval with the
/// largest error estimate until the total meets `rel_tol`.
fn adaptive_gauss_kronrod<F: Fn(f64) -> Result<f64>>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    let (v, e) = gk15(&f, a, b)?;
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|s| s.2).sum();
        let err: f64 = intervals.iter().map(|s| s.3).sum();
        if err <= rel_tol * total.abs().max(f64::MIN_POSITIVE) {
            return Ok(total);
        }
        if intervals.len() >= max_intervals {
            return Err(QError::Quadrature(format!(
                "error estimate {err:e} above tolerance after {max_intervals} subintervals"
            )));
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("interval list is never empty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval can no longer be split in double precision
            return Ok(total);
        }
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}
