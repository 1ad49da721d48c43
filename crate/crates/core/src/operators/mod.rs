//! The generalized q-fractional integral `J^α_{p,q}` and derivative
//! `D^α_{p,q}`.
//!
//! ```text
//! J^α f(x) = [p+1]_q^{1-α} / Γ_Q(α) ∫_a^x w^p f(w) (x^{p+1} - (wq)^{p+1})^(α-1) d_q w
//! ```
//!
//! with `Q = q^{p+1}`, the generalized power taken over base `Q`, and lower
//! limit `a` (zero unless set on the [`OperatorSpec`]).
//!
//! Expanding the Jackson sum on the grid `x q^i` collapses the kernel into a
//! ratio of finite Pochhammer products:
//!
//! ```text
//! J^α f(x) = (1-q)^α x^{α(p+1)} Σ_i Q^i (Q^α; Q)_i / (Q; Q)_i f(x q^i)
//! ```
//!
//! which is what [`frac_integral`] sums. [`frac_integral_direct`] evaluates
//! the kernel literally and is kept as a cross-check.

mod classical;
mod derivative;
mod identities;
mod integer;
mod verify;

pub use classical::classical_reference;
pub use derivative::frac_derivative;
pub use identities::{beta_type_integral, hadamard_kernel_limit_check, heine_type_sum, IdentityPair};
pub use integer::{integer_kernel_integral, iterated_integral};
pub use verify::{run_identity_suite, CellResult, Identity, SuiteGrid, VerificationReport};

use crate::error::{domain, Result};
use crate::jackson::{jackson_integral, jackson_integral_between, Integrand};
use crate::qcore::{
    bracket_exponent, gen_power, one_minus_exp, q_gamma, q_power, EvalResult, IntegralResult,
    QContext, Truncation,
};
use crate::sum::sum_series;

/// Order, lower limit, parameters and truncation policy of one operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    alpha: f64,
    lower: f64,
    ctx: QContext,
    trunc: Truncation,
}

impl OperatorSpec {
    /// Order `alpha ≥ 0`, lower limit 0, default truncation.
    ///
    /// The integral needs `alpha > 0`; order zero is only meaningful for the
    /// derivative, where it is the identity.
    pub fn new(alpha: f64, ctx: QContext) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self {
            alpha,
            lower: 0.0,
            ctx,
            trunc: Truncation::default(),
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_lower(mut self, lower: f64) -> Result<Self> {
        if !(lower >= 0.0 && lower.is_finite()) {
            return domain(format!("lower limit must be a finite value >= 0, got {lower}"));
        }
        self.lower = lower;
        Ok(self)
    }

    pub fn with_truncation(mut self, trunc: Truncation) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn trunc(&self) -> &Truncation {
        &self.trunc
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !(x.is_finite() && x > self.lower) {
            return domain(format!(
                "evaluation point must exceed the lower limit {}, got {x}",
                self.lower
            ));
        }
        Ok(())
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        domain(format!("order must be a finite value >= 0, got {alpha}"))
    }
}

fn check_integral_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 {
        Ok(())
    } else {
        domain(format!("fractional integral needs alpha > 0, got {alpha}"))
    }
}

/// The three algebraically equal ways of writing the operator's prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefactorForm {
    /// `1 / ([p+1]^(α-1) Γ_q(α))`
    Bracket,
    /// `(1-q)^{α-1} / (1-Q)^(α-1)`, the denominator a generalized power over `Q`.
    PowerRatio,
    /// `[p+1]_q^{1-α} / Γ_Q(α)`
    BaseGamma,
}

impl PrefactorForm {
    pub const ALL: [PrefactorForm; 3] = [Self::Bracket, Self::PowerRatio, Self::BaseGamma];
}

/// Prefactor of `J^α` in the requested form.
pub fn prefactor(
    form: PrefactorForm,
    alpha: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<EvalResult> {
    check_integral_order(alpha)?;
    match form {
        PrefactorForm::Bracket => {
            let b = bracket_exponent(alpha - 1.0, ctx, trunc)?;
            let g = q_gamma(alpha, ctx.q(), trunc)?;
            Ok(EvalResult::from_product(1.0 / (b.value * g.value), &[&b, &g]))
        }
        PrefactorForm::PowerRatio => {
            let d = gen_power(1.0, ctx.base(), alpha - 1.0, ctx, trunc)?;
            let num = ((alpha - 1.0) * (-ctx.q()).ln_1p()).exp();
            Ok(EvalResult::from_product(num / d.value, &[&d]))
        }
        PrefactorForm::BaseGamma => {
            let g = q_gamma(alpha, ctx.base(), trunc)?;
            let value = ctx.p_bracket().powf(1.0 - alpha) / g.value;
            Ok(EvalResult::from_product(value, &[&g]))
        }
    }
}

/// `J^α_{p,q} f(x)`, summed through the collapsed series.
///
/// With a lower limit `b > 0` the integral over `(0, b]` is summed on its own
/// grid `b q^i` and subtracted; the kernel there obeys
/// `κ_{i+1} = κ_i (1 - ν Q^{i+α}) / (1 - ν Q^{i+1})` with `ν = (b/x)^{p+1}`.
pub fn frac_integral(f: &Integrand, x: f64, spec: &OperatorSpec) -> Result<IntegralResult> {
    check_integral_order(spec.alpha)?;
    spec.check_point(x)?;
    if spec.lower == 0.0 {
        return integral_from_zero(f, x, spec.alpha, &spec.ctx, &spec.trunc);
    }
    refine(&spec.trunc, |trunc| {
        let upper = integral_from_zero(f, x, spec.alpha, &spec.ctx, trunc)?;
        let lower = lower_piece(f, x, spec.lower, spec.alpha, &spec.ctx, trunc)?;
        Ok(upper.minus(&lower))
    })
}

fn integral_from_zero(
    f: &Integrand,
    x: f64,
    alpha: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<IntegralResult> {
    let q = ctx.q();
    let ln_b = ctx.ln_base();
    let base = ctx.base();
    let mut weight = 1.0;
    let series = sum_series(
        |i| {
            if i > 0 {
                let k = i as f64;
                weight *= base * one_minus_exp((alpha + k - 1.0) * ln_b) / one_minus_exp(k * ln_b);
            }
            Ok(weight * f.eval(x * q.powi(i as i32))?)
        },
        base,
        trunc,
    )?;
    let scale = (alpha * (-q).ln_1p() + alpha * (ctx.p() + 1.0) * x.ln()).exp();
    Ok(series.scaled(scale))
}

/// `C ∫_0^b w^p f(w) (x^{p+1} - (wq)^{p+1})^(α-1) d_q w` for `0 < b < x`.
fn lower_piece(
    f: &Integrand,
    x: f64,
    b: f64,
    alpha: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<IntegralResult> {
    let q = ctx.q();
    let p1 = ctx.p() + 1.0;
    let ln_b = ctx.ln_base();
    let base = ctx.base();
    let ln_nu = p1 * (b / x).ln();
    let nu = ln_nu.exp();
    let kappa0 = gen_power(1.0, nu * base, alpha - 1.0, ctx, trunc)?;
    let norm = gen_power(1.0, base, alpha - 1.0, ctx, trunc)?;
    let mut kappa = kappa0.value;
    let mut qi = 1.0;
    let series = sum_series(
        |i| {
            if i > 0 {
                let k = (i - 1) as f64;
                kappa *= one_minus_exp(ln_nu + (k + alpha) * ln_b) / one_minus_exp(ln_nu + (k + 1.0) * ln_b);
                qi *= base;
            }
            Ok(qi * kappa * f.eval(b * q.powi(i as i32))?)
        },
        base,
        trunc,
    )?;
    let scale = (alpha * (-q).ln_1p() + p1 * b.ln() + p1 * (alpha - 1.0) * x.ln()).exp() / norm.value;
    let mut r = series.scaled(scale);
    let extra = EvalResult::from_product(r.value, &[&kappa0, &norm]);
    r.est_tail += extra.est_tail;
    r.converged &= extra.converged;
    Ok(r)
}

/// Re-runs `eval` under a tighter tolerance while cancellation leaves the
/// combined tail above what `trunc` asks for. The result is flagged as not
/// converged if the bound still fails after a few rounds.
pub(crate) fn refine<F>(trunc: &Truncation, mut eval: F) -> Result<EvalResult>
where
    F: FnMut(&Truncation) -> Result<EvalResult>,
{
    const ROUNDS: usize = 3;
    let floor = f64::EPSILON * f64::EPSILON;
    let mut inner = *trunc;
    let mut r = eval(&inner)?;
    for _ in 0..ROUNDS {
        if !r.converged || r.est_tail <= trunc.threshold(r.value) || inner.tol() <= floor {
            break;
        }
        let ratio = trunc.threshold(r.value) / r.est_tail;
        inner = Truncation::new((inner.tol() * ratio * 0.5).max(floor), inner.max_terms())?;
        r = eval(&inner)?;
    }
    r.converged = r.converged && r.est_tail <= trunc.threshold(r.value);
    Ok(r)
}

/// `J^α f(x)` as prefactor × Jackson integral of the literal kernel.
///
/// Costs a generalized-power product per grid point; meant for
/// cross-checking [`frac_integral`].
pub fn frac_integral_direct(f: &Integrand, x: f64, spec: &OperatorSpec) -> Result<IntegralResult> {
    check_integral_order(spec.alpha)?;
    spec.check_point(x)?;
    let (ctx, trunc, alpha) = (spec.ctx, spec.trunc, spec.alpha);
    let c = prefactor(PrefactorForm::BaseGamma, alpha, &ctx, &trunc)?;
    let p = ctx.p();
    let xp1 = x.powf(p + 1.0);
    let g = f.clone();
    let weighted = Integrand::new("kernel", move |w| {
        let k = gen_power(xp1, (w * ctx.q()).powf(p + 1.0), alpha - 1.0, &ctx, &trunc)?.value()?;
        Ok(w.powf(p) * g.eval(w)? * k)
    });
    let integral = jackson_integral_between(&weighted, spec.lower, x, ctx.q(), &trunc)?;
    Ok(EvalResult::from_product(c.value * integral.value, &[&c, &integral]))
}

/// q-Riemann–Liouville integral
/// `1/Γ_q(α) ∫_0^x (x - qt)^(α-1) f(t) d_q t` with the base-`q` power.
pub fn q_riemann_integral(
    f: &Integrand,
    x: f64,
    alpha: f64,
    q: f64,
    trunc: &Truncation,
) -> Result<IntegralResult> {
    check_integral_order(alpha)?;
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("q-Riemann integral needs x > 0, got {x}"));
    }
    let g = q_gamma(alpha, q, trunc)?;
    let trunc_k = *trunc;
    let h = f.clone();
    let weighted = Integrand::new("q-Riemann kernel", move |t| {
        Ok(q_power(x, q * t, alpha - 1.0, q, &trunc_k)?.value()? * h.eval(t)?)
    });
    let integral = jackson_integral(&weighted, x, q, trunc)?;
    Ok(EvalResult::from_product(integral.value / g.value, &[&g, &integral]))
}

/// Closed form of `J^α t^{λ(p+1)}` at `x`:
/// `[p+1]_q^{-α} Γ_Q(λ+1) / Γ_Q(λ+α+1) · x^{(p+1)(λ+α)}`.
pub fn power_rule(
    lambda: f64,
    alpha: f64,
    x: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<EvalResult> {
    let (ratio, xpow) = power_rule_parts(lambda, alpha, x, ctx, trunc)?;
    let value = ctx.p_bracket().powf(-alpha) * ratio.value * xpow;
    Ok(EvalResult::from_product(value, &[&ratio]))
}

/// The kernel integral `∫_0^x w^p w^{λ(p+1)} (x^{p+1} - (wq)^{p+1})^(α-1) d_q w`
/// without the operator prefactor:
/// `Γ_Q(α) Γ_Q(λ+1) / ([p+1]_q Γ_Q(λ+α+1)) · x^{(p+1)(λ+α)}`.
pub fn power_kernel_integral(
    lambda: f64,
    alpha: f64,
    x: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<EvalResult> {
    let (ratio, xpow) = power_rule_parts(lambda, alpha, x, ctx, trunc)?;
    let ga = q_gamma(alpha, ctx.base(), trunc)?;
    let value = ga.value * ratio.value / ctx.p_bracket() * xpow;
    Ok(EvalResult::from_product(value, &[&ratio, &ga]))
}

/// `Γ_Q(λ+1) / Γ_Q(λ+α+1)` and `x^{(p+1)(λ+α)}`.
fn power_rule_parts(
    lambda: f64,
    alpha: f64,
    x: f64,
    ctx: &QContext,
    trunc: &Truncation,
) -> Result<(EvalResult, f64)> {
    check_integral_order(alpha)?;
    if !(lambda > -1.0 && lambda.is_finite()) {
        return domain(format!("power rule needs lambda > -1, got {lambda}"));
    }
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("power rule needs x > 0, got {x}"));
    }
    let base = ctx.base();
    let g1 = q_gamma(lambda + 1.0, base, trunc)?;
    let g2 = q_gamma(lambda + alpha + 1.0, base, trunc)?;
    let ratio = EvalResult::from_product(g1.value / g2.value, &[&g1, &g2]);
    let xpow = ((ctx.p() + 1.0) * (lambda + alpha) * x.ln()).exp();
    Ok((ratio, xpow))
}
