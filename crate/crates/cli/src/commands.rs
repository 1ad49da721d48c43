use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use qfrac_core::operators::{run_identity_suite, Identity, SuiteGrid};
use qfrac_core::{
    frac_derivative, frac_integral, parse, power_rule, Integrand, OperatorSpec, QContext,
    Truncation,
};

use crate::config::{parse_list, parse_points, ConfigFile};
use crate::output::{emit, Field, Format, Table};
use crate::{EvalArgs, OutputArgs, ParamArgs, TableArgs, VerifyArgs};

const NOT_CONVERGED: u8 = 3;
const VERIFY_FAILED: u8 = 1;

struct Params {
    ctx: QContext,
    alpha: f64,
    points: Vec<f64>,
    trunc: Truncation,
}

fn params(args: &ParamArgs, cfg: &ConfigFile) -> Result<Params> {
    let q = cfg.pick(args.q, "q", 0.5)?;
    let p = cfg.pick(args.p, "p", 0.0)?;
    let ctx = QContext::new(q, p)?;
    let alpha = cfg.pick(args.alpha, "alpha", 1.0)?;
    let points = parse_points(&cfg.pick(args.points.clone(), "points", "1".to_string())?)?;
    let trunc = Truncation::new(
        cfg.pick(args.tol, "tol", Truncation::default().tol())?,
        cfg.pick(args.max_terms, "max_terms", Truncation::default().max_terms())?,
    )?;
    Ok(Params {
        ctx,
        alpha,
        points,
        trunc,
    })
}

fn output(args: &OutputArgs, cfg: &ConfigFile) -> Result<(Format, Option<PathBuf>)> {
    let format = cfg.pick(args.format, "format", Format::Csv)?;
    let path = cfg.pick_opt(args.output.clone(), "output")?;
    Ok((format, path))
}

pub fn eval(args: &EvalArgs, cfg: &ConfigFile) -> Result<ExitCode> {
    let prm = params(&args.params, cfg)?;
    let (format, path) = output(&args.out, cfg)?;
    let derivative = cfg.switch(args.derivative, "derivative")?;
    let lower = cfg.pick(args.lower, "lower", 0.0)?;
    let Some(text) = cfg.pick_opt(args.integrand.clone(), "f")? else {
        bail!("no integrand given (use --f)");
    };
    let expr = parse(&text).map_err(|e| {
        anyhow::anyhow!(
            "cannot parse integrand: {}\n  {text}\n  {}^",
            e.message,
            " ".repeat(e.position)
        )
    })?;
    if !derivative && prm.alpha <= 0.0 {
        bail!("the fractional integral needs alpha > 0, got {}", prm.alpha);
    }
    let spec = OperatorSpec::new(prm.alpha, prm.ctx)?
        .with_lower(lower)?
        .with_truncation(prm.trunc);
    let f = Integrand::from_expr(expr);

    let mut table = Table::new(&["x", "value", "terms_used", "est_tail", "converged"]);
    let mut all_converged = true;
    for &x in &prm.points {
        let r = if derivative {
            frac_derivative(&f, x, &spec)
        } else {
            frac_integral(&f, x, &spec)
        }
        .with_context(|| format!("at x = {x}"))?;
        all_converged &= r.converged;
        table.push(vec![
            Field::Num(x),
            Field::Num(r.value),
            Field::Count(r.terms_used),
            Field::Num(r.est_tail),
            Field::Flag(r.converged),
        ]);
    }
    emit(&table.render(format)?, path.as_deref())?;
    Ok(if all_converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: some rows did not converge");
        ExitCode::from(NOT_CONVERGED)
    })
}

fn parse_suite(spec: &str) -> Result<Vec<Identity>> {
    if spec.trim() == "all" {
        return Ok(Identity::ALL.to_vec());
    }
    let mut ids = Vec::new();
    for name in spec.split(',').map(str::trim) {
        let id: Identity = name.parse().with_context(|| {
            let known: Vec<&str> = Identity::ALL.iter().map(|i| i.name()).collect();
            format!("known identities: all, {}", known.join(", "))
        })?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    Ok(ids)
}

pub fn verify(args: &VerifyArgs, cfg: &ConfigFile) -> Result<ExitCode> {
    let which = parse_suite(&cfg.pick(args.suite.clone(), "suite", "all".to_string())?)?;
    let (format, path) = output(&args.out, cfg)?;
    let q = cfg.pick_opt(args.q.clone(), "q")?.map(|s| parse_list(&s)).transpose()?;
    let p = cfg.pick_opt(args.p.clone(), "p")?.map(|s| parse_list(&s)).transpose()?;
    if let Some(bad) = q.iter().flatten().find(|q| !(**q > 0.0 && **q < 1.0)) {
        bail!("q must lie strictly inside (0, 1), got {bad}");
    }
    if let Some(bad) = p.iter().flatten().find(|p| !(**p > -1.0 && p.is_finite())) {
        bail!("p must be greater than -1, got {bad}");
    }
    let grid = SuiteGrid {
        q,
        p,
        ..SuiteGrid::default()
    };
    let reports = run_identity_suite(&which, &grid);

    let mut table = Table::new(&["identity", "params", "abs_err", "rel_err", "threshold", "pass"]);
    for r in &reports {
        for c in &r.cells {
            let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            table.push(vec![
                Field::Text(r.identity_name().to_string()),
                Field::Text(params.join(";")),
                Field::Num(c.abs_err),
                Field::Num(c.rel_err),
                Field::Num(r.threshold),
                Field::Flag(c.pass),
            ]);
        }
    }
    emit(&table.render(format)?, path.as_deref())?;
    let passed = reports.iter().filter(|r| r.pass).count();
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!(
            "FAIL {}: max scaled residual {:e} above {:e}",
            r.identity_name(),
            r.max_rel_err,
            r.threshold
        );
    }
    eprintln!("{passed}/{} identities passed", reports.len());
    Ok(if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VERIFY_FAILED)
    })
}

pub fn table(args: &TableArgs, cfg: &ConfigFile) -> Result<ExitCode> {
    let prm = params(&args.params, cfg)?;
    let (format, path) = output(&args.out, cfg)?;
    let lambda = cfg.pick(args.lambda, "lambda", 0.0)?;
    if !(lambda > -1.0) {
        bail!("lambda must be greater than -1, got {lambda}");
    }
    if !(prm.alpha > 0.0) {
        bail!("alpha must be positive, got {}", prm.alpha);
    }
    let spec = OperatorSpec::new(prm.alpha, prm.ctx)?.with_truncation(prm.trunc);
    let f = Integrand::power(lambda * (prm.ctx.p() + 1.0));

    let mut table = Table::new(&["x", "numeric", "closed_form", "rel_err"]);
    let mut all_converged = true;
    for &x in &prm.points {
        let numeric = frac_integral(&f, x, &spec).with_context(|| format!("at x = {x}"))?;
        let closed = power_rule(lambda, prm.alpha, x, &prm.ctx, &prm.trunc)?;
        all_converged &= numeric.converged && closed.converged;
        let rel = (numeric.value - closed.value).abs() / closed.value.abs();
        table.push(vec![
            Field::Num(x),
            Field::Num(numeric.value),
            Field::Num(closed.value),
            Field::Num(rel),
        ]);
    }
    emit(&table.render(format)?, path.as_deref())?;
    Ok(if all_converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: some rows did not converge");
        ExitCode::from(NOT_CONVERGED)
    })
}
