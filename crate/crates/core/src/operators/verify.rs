//! Registry of numerical identity checks.
//!
//! Each [`Identity`] owns a default parameter grid and a pass threshold. A
//! run evaluates both sides of the identity on every grid cell and reduces
//! the residuals to one [`VerificationReport`]. Failures inside a cell
//! (domain errors, non-convergence) make that cell fail; they never abort the
//! run.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{
    beta_type_integral, classical_reference, frac_derivative, frac_integral,
    hadamard_kernel_limit_check, heine_type_sum, integer_kernel_integral, iterated_integral,
    power_rule, prefactor, q_riemann_integral, IdentityPair, OperatorSpec, PrefactorForm,
};
use crate::error::{QError, Result};
use crate::jackson::{jackson_integral, jackson_integral_between, q_derivative, Integrand};
use crate::qcore::{big_e_q, q_beta, q_gamma, q_number, q_power, QContext, Truncation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    GammaRecurrence,
    PrefactorConsistency,
    IntegerConsistency,
    PowerRule,
    Semigroup,
    LeftInverse,
    Lemma5,
    Lemma6,
    P0Reduction,
    Q1Limit,
    HadamardKernel,
    Interchange,
    ByParts,
    BetaCrosscheck,
}

impl Identity {
    pub const ALL: [Identity; 14] = [
        Identity::GammaRecurrence,
        Identity::PrefactorConsistency,
        Identity::IntegerConsistency,
        Identity::PowerRule,
        Identity::Semigroup,
        Identity::LeftInverse,
        Identity::Lemma5,
        Identity::Lemma6,
        Identity::P0Reduction,
        Identity::Q1Limit,
        Identity::HadamardKernel,
        Identity::Interchange,
        Identity::ByParts,
        Identity::BetaCrosscheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::GammaRecurrence => "gamma-recurrence",
            Identity::PrefactorConsistency => "prefactor-consistency",
            Identity::IntegerConsistency => "integer-consistency",
            Identity::PowerRule => "power-rule",
            Identity::Semigroup => "semigroup",
            Identity::LeftInverse => "left-inverse",
            Identity::Lemma5 => "lemma5",
            Identity::Lemma6 => "lemma6",
            Identity::P0Reduction => "p0-reduction",
            Identity::Q1Limit => "q1-limit",
            Identity::HadamardKernel => "hadamard-kernel",
            Identity::Interchange => "interchange",
            Identity::ByParts => "by-parts",
            Identity::BetaCrosscheck => "beta-crosscheck",
        }
    }

    /// Default bound on the scaled residual.
    pub fn threshold(self) -> f64 {
        match self {
            Identity::GammaRecurrence => 1e-10,
            Identity::PrefactorConsistency => 1e-12,
            Identity::IntegerConsistency => 1e-6,
            Identity::PowerRule => 1e-9,
            Identity::Semigroup => 1e-7,
            Identity::LeftInverse => 1e-6,
            Identity::Lemma5 | Identity::Lemma6 => 1e-8,
            Identity::P0Reduction => 1e-10,
            Identity::Q1Limit => 1e-2,
            Identity::HadamardKernel => 5e-2,
            Identity::Interchange | Identity::ByParts => 1e-10,
            Identity::BetaCrosscheck => 1e-8,
        }
    }

    fn default_q(self) -> &'static [f64] {
        match self {
            Identity::GammaRecurrence => &[0.1, 0.5, 0.9],
            Identity::PrefactorConsistency => &[0.3, 0.7],
            Identity::BetaCrosscheck => &[0.3, 0.5, 0.7],
            _ => &[0.5],
        }
    }

    fn default_p(self) -> &'static [f64] {
        match self {
            Identity::PrefactorConsistency => &[0.0, 0.5, 2.0],
            _ => &[0.0, 1.0],
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| QError::Domain(format!("unknown identity '{s}'")))
    }
}

/// Overrides for the default grids and thresholds.
///
/// `q` and `p` replace the q and p lists of identities that sweep them;
/// `p0-reduction`, `q1-limit` and `hadamard-kernel` have fixed parameters by
/// construction and ignore both. An empty list yields no cells, and an
/// identity without cells produces no report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteGrid {
    pub q: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub thresholds: BTreeMap<Identity, f64>,
}

impl SuiteGrid {
    fn qs(&self, id: Identity) -> Vec<f64> {
        self.q.clone().unwrap_or_else(|| id.default_q().to_vec())
    }

    fn ps(&self, id: Identity) -> Vec<f64> {
        self.p.clone().unwrap_or_else(|| id.default_p().to_vec())
    }
}

/// Residuals at one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub params: Vec<(&'static str, f64)>,
    pub abs_err: f64,
    /// The residual the threshold applies to; see [`VerificationReport`].
    pub rel_err: f64,
    pub pass: bool,
    /// Set when the cell could not be evaluated.
    pub error: Option<String>,
}

/// Summary of one identity over its grid.
///
/// `rel_err` is the identity's scaled residual: relative to the reference
/// side for most identities, `|diff| / (1 + |f|)` for `left-inverse`,
/// `|diff| / scale` for `by-parts` and `interchange`, and the absolute error
/// for `hadamard-kernel`, whose limit is stated in absolute terms.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub identity: Identity,
    pub cells: Vec<CellResult>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn identity_name(&self) -> &'static str {
        self.identity.name()
    }

    fn new(identity: Identity, threshold: f64, cells: Vec<CellResult>) -> Self {
        let max_abs_err = cells.iter().map(|c| c.abs_err).fold(0.0, f64::max);
        let max_rel_err = cells.iter().map(|c| c.rel_err).fold(0.0, f64::max);
        let pass = cells.iter().all(|c| c.pass);
        Self {
            identity,
            cells,
            max_abs_err,
            max_rel_err,
            threshold,
            pass,
        }
    }
}

/// Runs the requested identities in the given order.
pub fn run_identity_suite(which: &[Identity], grid: &SuiteGrid) -> Vec<VerificationReport> {
    which
        .iter()
        .filter_map(|&id| {
            let threshold = grid.thresholds.get(&id).copied().unwrap_or(id.threshold());
            let raw = evaluate(id, grid);
            if raw.is_empty() {
                return None;
            }
            let cells = raw
                .into_iter()
                .map(|(params, outcome)| match outcome {
                    Ok((abs_err, rel_err)) => {
                        let (abs_err, rel_err) = (nan_to_inf(abs_err), nan_to_inf(rel_err));
                        CellResult {
                            params,
                            abs_err,
                            rel_err,
                            pass: rel_err <= threshold,
                            error: None,
                        }
                    }
                    Err(e) => CellResult {
                        params,
                        abs_err: f64::INFINITY,
                        rel_err: f64::INFINITY,
                        pass: false,
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            Some(VerificationReport::new(id, threshold, cells))
        })
        .collect()
}

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

type Params = Vec<(&'static str, f64)>;
type Cell = (Params, Result<(f64, f64)>);

fn relative(value: f64, reference: f64) -> (f64, f64) {
    let abs = (value - reference).abs();
    let rel = if reference == 0.0 { abs } else { abs / reference.abs() };
    (abs, rel)
}

fn pair(r: IdentityPair) -> (f64, f64) {
    (r.abs_err(), r.rel_err())
}

/// Integrand polynomials of degree at most four used by the Jackson identities.
const POLYS: [&[f64]; 5] = [
    &[1.0],
    &[0.0, 1.0],
    &[1.0, -2.0, 0.5],
    &[0.25, 0.0, 0.0, 1.0],
    &[2.0, -1.0, 0.5, -0.25, 0.125],
];

fn tight() -> Truncation {
    Truncation::new(1e-15, 10_000).expect("valid truncation")
}

fn spec(alpha: f64, q: f64, p: f64) -> Result<OperatorSpec> {
    OperatorSpec::new(alpha, QContext::new(q, p)?)
}

fn evaluate(id: Identity, grid: &SuiteGrid) -> Vec<Cell> {
    let qs = grid.qs(id);
    let ps = grid.ps(id);
    let trunc = Truncation::default();
    let mut cells = Vec::new();
    match id {
        Identity::GammaRecurrence => {
            for &q in &qs {
                for k in 1..=50 {
                    let t = k as f64 / 10.0;
                    let r = (|| {
                        let lhs = q_gamma(t + 1.0, q, &trunc)?.value()?;
                        let rhs = q_number(t, q) * q_gamma(t, q, &trunc)?.value()?;
                        Ok(relative(rhs, lhs))
                    })();
                    cells.push((vec![("q", q), ("t", t)], r));
                }
            }
        }
        Identity::PrefactorConsistency => {
            for &alpha in &[0.3, 1.0, 2.7] {
                for &p in &ps {
                    for &q in &qs {
                        let r = (|| {
                            let ctx = QContext::new(q, p)?;
                            let reference = prefactor(PrefactorForm::BaseGamma, alpha, &ctx, &tight())?.value()?;
                            let mut worst = (0.0, 0.0);
                            for form in [PrefactorForm::Bracket, PrefactorForm::PowerRatio] {
                                let v = prefactor(form, alpha, &ctx, &tight())?.value()?;
                                let e = relative(v, reference);
                                worst = (f64::max(worst.0, e.0), f64::max(worst.1, e.1));
                            }
                            Ok(worst)
                        })();
                        cells.push((vec![("alpha", alpha), ("p", p), ("q", q)], r));
                    }
                }
            }
        }
        Identity::IntegerConsistency => {
            for k in 1..=3u32 {
                for degree in 0..=2u32 {
                    for &p in &ps {
                        for &q in &qs {
                            for &x in &[0.5, 1.0] {
                                let r = (|| {
                                    let ctx = QContext::new(q, p)?;
                                    let f = Integrand::power(degree as f64);
                                    let s = OperatorSpec::new(k as f64, ctx)?;
                                    let j = frac_integral(&f, x, &s)?.value()?;
                                    let kernel = integer_kernel_integral(&f, x, k, &ctx, &trunc)?.value()?;
                                    let nested = iterated_integral(&f, x, k, &ctx, &trunc)?.value()?;
                                    let (a1, r1) = relative(kernel, j);
                                    let (a2, r2) = relative(nested, j);
                                    Ok((a1.max(a2), r1.max(r2)))
                                })();
                                let params = vec![
                                    ("k", k as f64),
                                    ("degree", degree as f64),
                                    ("p", p),
                                    ("q", q),
                                    ("x", x),
                                ];
                                cells.push((params, r));
                            }
                        }
                    }
                }
            }
        }
        Identity::PowerRule | Identity::P0Reduction => {
            let (ps, qs) = if id == Identity::P0Reduction {
                (vec![0.0], vec![0.5])
            } else {
                (ps, qs)
            };
            for &lambda in &[0.0, 0.5, 1.0, 2.0] {
                for &alpha in &[0.5, 1.0, 1.7] {
                    for &p in &ps {
                        for &q in &qs {
                            for &x in &[0.5, 1.0] {
                                let r = (|| {
                                    let s = spec(alpha, q, p)?;
                                    let f = Integrand::power(lambda * (p + 1.0));
                                    let numeric = frac_integral(&f, x, &s)?.value()?;
                                    let reference = if id == Identity::P0Reduction {
                                        q_riemann_integral(&f, x, alpha, q, &trunc)?.value()?
                                    } else {
                                        power_rule(lambda, alpha, x, s.ctx(), &trunc)?.value()?
                                    };
                                    Ok(relative(numeric, reference))
                                })();
                                let params =
                                    vec![("lambda", lambda), ("alpha", alpha), ("p", p), ("q", q), ("x", x)];
                                cells.push((params, r));
                            }
                        }
                    }
                }
            }
        }
        Identity::Semigroup => {
            let orders = [0.5, 1.0, 1.5];
            for &p in &ps {
                for &q in &qs {
                    for (fi, &e) in [0.0, 1.0, p + 1.0, 2.0].iter().enumerate() {
                        for &x in &[0.5, 1.0] {
                            for &alpha in &orders {
                                for &beta in &orders {
                                    let r = (|| {
                                        let f = Integrand::power(e);
                                        let inner_spec = spec(beta, q, p)?;
                                        let inner = {
                                            let f = f.clone();
                                            Integrand::new("J^beta f", move |t| {
                                                frac_integral(&f, t, &inner_spec)?.value()
                                            })
                                            .memoized()
                                        };
                                        let lhs = frac_integral(&inner, x, &spec(alpha, q, p)?)?.value()?;
                                        let rhs = frac_integral(&f, x, &spec(alpha + beta, q, p)?)?.value()?;
                                        Ok(relative(lhs, rhs))
                                    })();
                                    let params = vec![
                                        ("f", fi as f64),
                                        ("f_exponent", e),
                                        ("x", x),
                                        ("alpha", alpha),
                                        ("beta", beta),
                                        ("p", p),
                                        ("q", q),
                                    ];
                                    cells.push((params, r));
                                }
                            }
                        }
                    }
                }
            }
        }
        Identity::LeftInverse => {
            let polys: [&[f64]; 4] = [&[1.0], &[0.0, 1.0], &[0.0, 0.0, 1.0], &[1.0, -2.0, 0.5]];
            for &alpha in &[0.25, 0.5, 0.75] {
                for (fi, coeffs) in polys.iter().enumerate() {
                    for &p in &ps {
                        for &q in &qs {
                            for &x in &[0.5, 1.0] {
                                let r = (|| {
                                    let f = Integrand::polynomial(coeffs);
                                    let s = spec(alpha, q, p)?;
                                    let g = {
                                        let f = f.clone();
                                        Integrand::new("J^alpha f", move |t| frac_integral(&f, t, &s)?.value())
                                    };
                                    let d = frac_derivative(&g, x, &s)?.value()?;
                                    let fx = f.eval(x)?;
                                    let abs = (d - fx).abs();
                                    Ok((abs, abs / (1.0 + fx.abs())))
                                })();
                                let params = vec![("alpha", alpha), ("f", fi as f64), ("p", p), ("q", q), ("x", x)];
                                cells.push((params, r));
                            }
                        }
                    }
                }
            }
        }
        Identity::Lemma5 => {
            // μ on the Q-grid, where the summation identity holds exactly
            for &p in &ps {
                for &q in &qs {
                    let Ok(ctx) = QContext::new(q, p) else {
                        cells.push((vec![("p", p), ("q", q)], Err(QError::Domain("invalid (q, p)".into()))));
                        continue;
                    };
                    let big_q = ctx.base();
                    for m in 0..=3 {
                        let mu = if m == 0 { 0.0 } else { big_q.powi(m) };
                        for &alpha in &[0.5, 1.5] {
                            for &beta in &[0.5, 1.5] {
                                let r = heine_type_sum(mu, alpha, beta, &ctx, &tight()).map(pair);
                                let params = vec![("mu", mu), ("alpha", alpha), ("beta", beta), ("p", p), ("q", q)];
                                cells.push((params, r));
                            }
                        }
                    }
                }
            }
        }
        Identity::Lemma6 => {
            // lower limits on the q-grid of x, where the sum over (0, a] vanishes
            let x = 1.0;
            for &p in &ps {
                for &q in &qs {
                    for &a in &[0.0, x * q * q] {
                        for &alpha in &[0.5, 1.5] {
                            for &lambda in &[0.0, 0.5] {
                                let r = QContext::new(q, p)
                                    .and_then(|ctx| beta_type_integral(a, x, alpha, lambda, &ctx, &tight()))
                                    .map(pair);
                                let params =
                                    vec![("a", a), ("x", x), ("alpha", alpha), ("lambda", lambda), ("p", p), ("q", q)];
                                cells.push((params, r));
                            }
                        }
                    }
                }
            }
        }
        Identity::Q1Limit => {
            let q = 1.0 - 1e-3;
            let long = Truncation::new(1e-12, 100_000).expect("valid truncation");
            for &p in &[0.0, 1.0] {
                for (fi, e) in [0.0, p + 1.0].into_iter().enumerate() {
                    for &alpha in &[0.5, 1.5] {
                        let r = (|| {
                            let f = Integrand::power(e);
                            let s = spec(alpha, q, p)?.with_truncation(long);
                            let numeric = frac_integral(&f, 1.0, &s)?.value()?;
                            let classical = classical_reference(&f, 1.0, alpha, p)?;
                            Ok(relative(numeric, classical))
                        })();
                        let params = vec![("f", fi as f64), ("f_exponent", e), ("alpha", alpha), ("p", p), ("q", q)];
                        cells.push((params, r));
                    }
                }
            }
        }
        Identity::HadamardKernel => {
            let long = Truncation::new(1e-12, 100_000).expect("valid truncation");
            for (t, a, lambda) in [(2.0, 1.0, 1.0), (2.0, 1.0, 2.0), (std::f64::consts::E, 1.0, 1.0)] {
                let r = hadamard_kernel_limit_check(t, a, lambda, 1e-3, 1e-2, &long).map(|r| {
                    let abs = r.abs_err();
                    (abs, abs)
                });
                cells.push((vec![("t", t), ("a", a), ("lambda", lambda)], r));
            }
        }
        Identity::Interchange => {
            for &q in &qs {
                for (fi, coeffs) in POLYS.iter().enumerate() {
                    for &x in &[0.5, 1.0, 2.0] {
                        let r = interchange_residual(coeffs, x, q);
                        cells.push((vec![("f", fi as f64), ("x", x), ("q", q)], r));
                    }
                }
            }
        }
        Identity::ByParts => {
            for &q in &qs {
                for (fi, fc) in POLYS.iter().enumerate() {
                    for (gi, gc) in POLYS.iter().enumerate() {
                        for (a, b) in [(0.2, 1.0), (0.5, 2.0)] {
                            let r = by_parts_residual(fc, gc, a, b, q);
                            let params = vec![("f", fi as f64), ("g", gi as f64), ("a", a), ("b", b), ("q", q)];
                            cells.push((params, r));
                        }
                    }
                }
            }
        }
        Identity::BetaCrosscheck => {
            for &q in &qs {
                for t in [0.5, 1.5, 3.2] {
                    let r = (|| {
                        let closed = q_gamma(t, q, &tight())?.value()?;
                        Ok(relative(gamma_by_jackson(t, q)?, closed))
                    })();
                    cells.push((vec![("kind", 0.0), ("q", q), ("t", t)], r));
                }
                for (t, s) in [(0.5, 0.5), (1.5, 2.5), (0.7, 1.3)] {
                    let r = (|| {
                        let closed = q_beta(t, s, q, &tight())?.value()?;
                        Ok(relative(beta_by_jackson(t, s, q)?, closed))
                    })();
                    cells.push((vec![("kind", 1.0), ("q", q), ("t", t), ("s", s)], r));
                }
            }
        }
    }
    cells
}

/// `∫_0^x ∫_0^v f(s) d_q s d_q v` against `∫_0^x (x - qs) f(s) d_q s`,
/// scaled by `∫_0^x (x - qs) |f(s)| d_q s`.
fn interchange_residual(coeffs: &[f64], x: f64, q: f64) -> Result<(f64, f64)> {
    let t = tight();
    let f = Integrand::polynomial(coeffs);
    let inner = {
        let f = f.clone();
        Integrand::new("inner", move |v| jackson_integral(&f, v, q, &t)?.value())
    };
    let nested = jackson_integral(&inner, x, q, &t)?.value()?;
    let weighted = {
        let f = f.clone();
        Integrand::new("(x - qs) f", move |s| Ok((x - q * s) * f.eval(s)?))
    };
    let single = jackson_integral(&weighted, x, q, &t)?.value()?;
    let magnitude = Integrand::new("(x - qs) |f|", move |s| Ok((x - q * s) * f.eval(s)?.abs()));
    let scale = jackson_integral(&magnitude, x, q, &t)?.value()?;
    let abs = (nested - single).abs();
    Ok((abs, abs / scale))
}

/// `∫_a^b g D_q f - [(gf)(b) - (gf)(a)] + ∫_a^b f(q·) D_q g`.
fn by_parts_residual(fc: &[f64], gc: &[f64], a: f64, b: f64, q: f64) -> Result<(f64, f64)> {
    let t = tight();
    let (f, g) = (Integrand::polynomial(fc), Integrand::polynomial(gc));
    let left = {
        let (f, g) = (f.clone(), g.clone());
        Integrand::new("g D_q f", move |x| Ok(g.eval(x)? * q_derivative(&f, x, q)?))
    };
    let right = {
        let (f, g) = (f.clone(), g.clone());
        Integrand::new("f(q.) D_q g", move |x| Ok(f.eval(q * x)? * q_derivative(&g, x, q)?))
    };
    let lhs = jackson_integral_between(&left, a, b, q, &t)?.value()?;
    let rest = jackson_integral_between(&right, a, b, q, &t)?.value()?;
    let boundary = g.eval(b)? * f.eval(b)? - g.eval(a)? * f.eval(a)?;
    let abs = (lhs - boundary + rest).abs();
    let scale = lhs.abs() + boundary.abs() + rest.abs();
    Ok((abs, if scale == 0.0 { abs } else { abs / scale }))
}

/// `Γ_q(t) = ∫_0^{1/(1-q)} x^{t-1} E_q(-qx) d_q x`.
fn gamma_by_jackson(t: f64, q: f64) -> Result<f64> {
    let tr = tight();
    let weight = Integrand::new("x^{t-1} E_q(-qx)", move |x| {
        Ok(x.powf(t - 1.0) * big_e_q(-q * x, q, &tr)?.value()?)
    });
    jackson_integral(&weight, 1.0 / (1.0 - q), q, &tr)?.value()
}

/// `β_q(t, s) = ∫_0^1 x^{t-1} (1 - qx)^(s-1) d_q x`.
fn beta_by_jackson(t: f64, s: f64, q: f64) -> Result<f64> {
    let tr = tight();
    let weight = Integrand::new("x^{t-1} (1-qx)^(s-1)", move |x| {
        Ok(x.powf(t - 1.0) * q_power(1.0, q * x, s - 1.0, q, &tr)?.value()?)
    });
    jackson_integral(&weight, 1.0, q, &tr)?.value()
}
