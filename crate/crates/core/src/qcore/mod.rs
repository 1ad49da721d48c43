//! q-arithmetic primitives and q-special functions.
//!
//! Everything here works on real `q` strictly inside `(0, 1)`. Infinite
//! products are truncated once the remaining factors provably change the
//! logarithm of the product by less than the tolerance; see [`Truncation`].

mod gamma;
mod power;

pub use gamma::{q_beta, q_gamma};
pub use power::{bracket_exponent, bracket_exponent_product, gen_power, q_power};
pub(crate) use power::power_over_base;

use crate::error::{domain, QError, Result};

/// Values below this magnitude are treated as zero when a relative tolerance
/// is converted into an absolute one.
pub const FLOOR_SCALE: f64 = 1e-150;

/// Largest integer exponent handled by exact finite products.
pub(crate) const MAX_FINITE_ORDER: f64 = 4096.0;

/// The parameter pair `(q, p)`: `q` in `(0, 1)`, `p > -1`.
///
/// Operators built on this context use the derived base `Q = q^(p+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: f64,
    p: f64,
}

impl QContext {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        check_q(q)?;
        if !p.is_finite() || p <= -1.0 {
            return domain(format!("p must be a finite real greater than -1, got {p}"));
        }
        Ok(Self { q, p })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `Q = q^(p+1)`.
    pub fn base(&self) -> f64 {
        (self.ln_base()).exp()
    }

    pub(crate) fn ln_base(&self) -> f64 {
        (self.p + 1.0) * self.q.ln()
    }

    /// `[p+1]_q`.
    pub fn p_bracket(&self) -> f64 {
        q_number(self.p + 1.0, self.q)
    }
}

/// Tolerance and term cap applied to every truncated sum or product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    tol: f64,
    max_terms: usize,
}

impl Truncation {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        if max_terms == 0 {
            return domain("max_terms must be at least 1");
        }
        Ok(Self { tol, max_terms })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn with_max_terms(self, max_terms: usize) -> Result<Self> {
        Self::new(self.tol, max_terms)
    }

    /// Absolute tail budget for a result of magnitude `value`.
    pub fn threshold(&self, value: f64) -> f64 {
        self.tol * value.abs().max(FLOOR_SCALE)
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

/// A truncated evaluation together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub terms_used: usize,
    /// Estimated absolute size of the discarded tail.
    pub est_tail: f64,
    pub converged: bool,
}

/// Jackson integrals report the same diagnostics as any other truncated sum.
pub type IntegralResult = EvalResult;

impl EvalResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            terms_used: 0,
            est_tail: 0.0,
            converged: true,
        }
    }

    /// The value, or a [`QError::NonConvergence`] if the term cap was hit.
    pub fn value(&self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(QError::NonConvergence {
                terms: self.terms_used,
                est_tail: self.est_tail,
            })
        }
    }

    pub(crate) fn relative_tail(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.est_tail / self.value.abs()
        }
    }

    /// Diagnostics for a value obtained by multiplying and dividing the
    /// given results: relative tails add up.
    pub(crate) fn from_product(value: f64, parts: &[&EvalResult]) -> Self {
        let rel: f64 = parts.iter().map(|r| r.relative_tail()).sum();
        Self {
            value,
            terms_used: parts.iter().map(|r| r.terms_used).sum(),
            est_tail: rel * value.abs(),
            converged: parts.iter().all(|r| r.converged),
        }
    }

    /// Diagnostics for `self - other`.
    pub(crate) fn minus(&self, other: &EvalResult) -> Self {
        Self {
            value: self.value - other.value,
            terms_used: self.terms_used + other.terms_used,
            est_tail: self.est_tail + other.est_tail,
            converged: self.converged && other.converged,
        }
    }

    pub(crate) fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self.est_tail *= factor.abs();
        self
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        domain(format!("q must lie strictly inside (0, 1), got {q}"))
    }
}

/// `1 - exp(ln_value)`, accurate when the exponential is close to one.
#[inline]
pub(crate) fn one_minus_exp(ln_value: f64) -> f64 {
    -ln_value.exp_m1()
}

/// `1 - a`, using the log form when `a > 0`.
#[inline]
pub(crate) fn one_minus_scaled(a: f64, ln_q: f64, exponent: f64) -> f64 {
    if a > 0.0 {
        one_minus_exp(a.ln() + exponent * ln_q)
    } else {
        1.0 - a * (exponent * ln_q).exp()
    }
}

/// `[a]_q = (1 - q^a)/(1 - q)`.
pub fn q_number(a: f64, q: f64) -> f64 {
    if (0.0..=64.0).contains(&a) && a.fract() == 0.0 {
        // 1 + q + ... + q^(a-1), exact for small integers
        let mut sum = 0.0;
        let mut term = 1.0;
        for _ in 0..a as usize {
            sum += term;
            term *= q;
        }
        return sum;
    }
    let ln_q = q.ln();
    (a * ln_q).exp_m1() / ln_q.exp_m1()
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: u32, q: f64) -> f64 {
    (1..=n).map(|k| q_number(k as f64, q)).product()
}

/// Finite q-Pochhammer symbol `(a; q)_n`.
pub fn q_pochhammer(a: f64, q: f64, n: u32) -> f64 {
    let mut value = 1.0;
    let mut qj = 1.0;
    for _ in 0..n {
        value *= 1.0 - qj * a;
        qj *= q;
    }
    value
}

/// Gaussian binomial coefficient `(q;q)_n / ((q;q)_{n-k} (q;q)_k)`.
pub fn q_binomial(n: u32, k: u32, q: f64) -> Result<f64> {
    if k > n {
        return domain(format!("q-binomial needs k <= n, got n = {n}, k = {k}"));
    }
    check_q(q)?;
    let num = q_pochhammer(q, q, n);
    Ok(num / (q_pochhammer(q, q, n - k) * q_pochhammer(q, q, k)))
}

/// Infinite q-Pochhammer product `(a; q)_∞`.
///
/// Stops at the first index `j` where `Σ_{i≥j} |a q^i| / (1 - |a q^i|)`,
/// which bounds the change in the log of the product, falls under `tol`.
pub fn q_pochhammer_inf(a: f64, q: f64, trunc: &Truncation) -> Result<EvalResult> {
    check_q(q)?;
    if !a.is_finite() {
        return domain(format!("q-Pochhammer argument must be finite, got {a}"));
    }
    if a == 0.0 {
        return Ok(EvalResult::exact(1.0));
    }
    let ln_q = q.ln();
    let one_minus_q = 1.0 - q;
    let mut value = 1.0;
    let mut bound = f64::INFINITY;
    for j in 0..trunc.max_terms() {
        let x = a.abs() * (j as f64 * ln_q).exp();
        if x < 1.0 {
            bound = x / (one_minus_q * (1.0 - x));
            if bound <= trunc.tol() {
                return Ok(EvalResult {
                    value,
                    terms_used: j,
                    est_tail: bound * value.abs(),
                    converged: true,
                });
            }
        }
        value *= one_minus_scaled(a, ln_q, j as f64);
        if value == 0.0 {
            return Ok(EvalResult {
                value,
                terms_used: j + 1,
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

/// `e_q(z) = 1 / ((1-q) z; q)_∞`, valid for `|z| < 1/(1-q)`.
pub fn e_q(z: f64, q: f64, trunc: &Truncation) -> Result<EvalResult> {
    check_q(q)?;
    if !(z.abs() * (1.0 - q) < 1.0) {
        return domain(format!("e_q needs |z| < 1/(1-q) = {}, got {z}", 1.0 / (1.0 - q)));
    }
    let prod = q_pochhammer_inf((1.0 - q) * z, q, trunc)?;
    Ok(EvalResult {
        value: 1.0 / prod.value,
        ..prod
    }
    .with_relative_tail(prod.relative_tail()))
}

/// `E_q(z) = (-(1-q) z; q)_∞`, entire in `z`.
pub fn big_e_q(z: f64, q: f64, trunc: &Truncation) -> Result<EvalResult> {
    check_q(q)?;
    q_pochhammer_inf(-(1.0 - q) * z, q, trunc)
}

impl EvalResult {
    fn with_relative_tail(mut self, rel: f64) -> Self {
        self.est_tail = rel * self.value.abs();
        self
    }
}
