use std::io::Write;
use std::time::Instant;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use qhs_core::qcore::check_q;
use qhs_core::numeval::{gram_matrix, lambda_hat_from_lambda, max_relative_off_diagonal};
use qhs_core::{
    BigFloat, Error, ExactHermiteFamily, ExactPoly, ExactSobolevFamily, Identity, Mass, NumericConfig, QContext,
    Rational,
};

use crate::args::{
    ClassicalArgs, Cli, Command, FamilyArgs, Format, GramArgs, MassArgs, PlotArgs, PrecisionArgs, SobolevArgs,
    VerifyArgs,
};
use crate::report::*;

/// Below this many digits the Gram check is reported with a precision warning.
pub const GRAM_MIN_PRECISION: u64 = 30;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::IdentityViolation { .. }) => 1,
            _ => 2,
        }
    }
}

/// How a completed run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
    PrecisionWarning,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
            Outcome::PrecisionWarning => 3,
        }
    }
}

type CliResult = Result<Outcome, CliError>;

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Classical(a) => classical(a, out),
        Command::Sobolev(a) => sobolev(a, out),
        Command::Verify(a) => verify(a, out),
        Command::PlotData(a) => plot_data(a, out),
        Command::Gram(a) => gram(a, out),
    }
}

fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_csv(header: Vec<String>, rows: Vec<Vec<String>>, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().flexible(false).from_writer(out);
    w.write_record(&header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn classical(a: ClassicalArgs, out: &mut dyn Write) -> CliResult {
    check_q(&a.q)?;
    let f = ExactHermiteFamily::build(a.q.clone(), a.n_max)?;
    let rows: Vec<ClassicalRow> = (0..=a.n_max)
        .map(|n| ClassicalRow {
            n,
            coefficients: f.poly(n).coeffs().iter().map(exact).collect(),
            gamma: (n >= 1).then(|| exact(f.gamma(n))),
            normalized_norm: exact(f.normalized_norm(n)),
        })
        .collect();
    match a.format {
        Format::Json => write_json(
            &ClassicalReport {
                command: "classical",
                context: ContextEcho { q: exact(&a.q), ..Default::default() },
                rows,
            },
            out,
        )?,
        Format::Csv => {
            let mut header: Vec<String> = ["n", "gamma", "normalized_norm"].map(String::from).to_vec();
            header.extend((0..=a.n_max).map(|k| format!("c{k}")));
            let body = rows
                .into_iter()
                .map(|r| {
                    let mut row = vec![r.n.to_string(), r.gamma.unwrap_or_default(), r.normalized_norm];
                    let width = row.len() + a.n_max + 1;
                    row.extend(r.coefficients);
                    row.resize(width, String::new());
                    row
                })
                .collect();
            write_csv(header, body, out)?
        }
    }
    Ok(Outcome::Pass)
}

/// A context plus the scaled mass the exact layer will use.
struct Resolved {
    ctx: QContext,
    lambda_hat: Rational,
    echo: ContextEcho,
}

fn resolve(family: &FamilyArgs, mass: &MassArgs, precision: &PrecisionArgs) -> Result<Resolved, CliError> {
    let mut echo = ContextEcho {
        q: exact(&family.q),
        alpha: Some(exact(&family.alpha)),
        j: Some(family.j),
        precision: Some(precision.precision),
        ..Default::default()
    };
    let (m, lambda_hat) = match (&mass.lambda, &mass.lambda_hat) {
        (Some(lambda), None) => {
            let m = Mass::Numeric { lambda: lambda.clone(), digits: precision.lambda_digits };
            echo.lambda = Some(exact(lambda));
            echo.lambda_hat_digits = Some(precision.lambda_digits);
            (m, None)
        }
        (None, Some(lh)) => (Mass::Exact { lambda_hat: lh.clone() }, Some(lh.clone())),
        _ => return Err(CliError::Usage("give exactly one of --lambda and --lambda-hat".into())),
    };
    let ctx = QContext::new(family.q.clone(), family.alpha.clone(), family.j, m)?;
    let lambda_hat = match lambda_hat {
        Some(lh) => lh,
        None => lambda_hat_from_lambda(mass.lambda.as_ref().unwrap(), &family.q, precision.lambda_digits)?,
    };
    echo.lambda_hat = Some(exact(&lambda_hat));
    Ok(Resolved { ctx, lambda_hat, echo })
}

fn sobolev_family(r: &Resolved, depth: usize) -> Result<ExactSobolevFamily, CliError> {
    let ctx = &r.ctx;
    Ok(ExactSobolevFamily::new(ctx.q().clone(), ctx.alpha().clone(), ctx.j(), r.lambda_hat.clone(), depth)?)
}

fn sobolev(a: SobolevArgs, out: &mut dyn Write) -> CliResult {
    check_precision(a.precision.precision)?;
    let resolved = resolve(&a.family, &a.mass, &a.precision)?;
    let f = sobolev_family(&resolved, a.n_max)?;
    let decimal = a.mass.lambda.is_some();
    let digits = a.precision.precision;
    let rows: Vec<SobolevRow> = (0..=a.n_max)
        .map(|n| SobolevRow {
            n,
            coefficients: f
                .sobolev_poly(n)
                .coeffs()
                .iter()
                .map(|c| {
                    if decimal {
                        Coefficient::Decimal(Decimal::from_rational(c, digits))
                    } else {
                        Coefficient::Exact(exact(c))
                    }
                })
                .collect(),
        })
        .collect();
    match a.format {
        Format::Json => write_json(
            &SobolevReport {
                command: "sobolev",
                context: resolved.echo,
                mode: if decimal { "decimal" } else { "exact" },
                rows,
            },
            out,
        )?,
        Format::Csv => {
            let mut header = vec!["n".to_string()];
            header.extend((0..=a.n_max).map(|k| format!("c{k}")));
            let body = rows
                .into_iter()
                .map(|r| {
                    let mut row = vec![r.n.to_string()];
                    row.extend(r.coefficients.iter().map(Coefficient::csv_text));
                    row.resize(a.n_max + 2, String::new());
                    row
                })
                .collect();
            write_csv(header, body, out)?
        }
    }
    Ok(Outcome::Pass)
}

fn selected_identities(list: &str) -> Result<Vec<Identity>, CliError> {
    if list.trim() == "all" {
        return Ok(Identity::ALL.to_vec());
    }
    let mut ids = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let id = Identity::from_name(name).ok_or_else(|| {
            let known: Vec<_> = Identity::ALL.iter().map(|i| i.name()).collect();
            CliError::Usage(format!("unknown check {name:?}; known: all, {}", known.join(", ")))
        })?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    if ids.is_empty() {
        return Err(CliError::Usage("no checks selected".into()));
    }
    Ok(ids)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> CliResult {
    let start = Instant::now();
    let ids = selected_identities(&a.checks)?;
    check_q(&a.family.q)?;
    let mass = Mass::Exact { lambda_hat: a.lambda_hat.clone() };
    let ctx = QContext::new(a.family.q.clone(), a.family.alpha.clone(), a.family.j, mass)?;
    let mut base = ExactHermiteFamily::build(a.family.q.clone(), a.n_max + 2)?;
    if let Some(k) = a.corrupt_gamma {
        if k == 0 || k > base.depth() {
            return Err(CliError::Usage(format!("--corrupt-gamma must lie in 1..={}", base.depth())));
        }
        let doubled = base.gamma(k).clone() * Rational::from_integer(2.into());
        base.override_gamma(k, doubled);
    }
    let family = ExactSobolevFamily::with_base(base, ctx.alpha().clone(), ctx.j(), a.lambda_hat.clone(), a.n_max)?;
    let echo = ContextEcho {
        q: exact(ctx.q()),
        alpha: Some(exact(ctx.alpha())),
        j: Some(ctx.j()),
        lambda_hat: Some(exact(&a.lambda_hat)),
        ..Default::default()
    };

    let tasks: Vec<(Identity, usize)> = ids
        .iter()
        .flat_map(|&id| {
            let (lo, hi) = id.range(a.n_max);
            (lo..=hi.min(a.n_max)).map(move |n| (id, n))
        })
        .collect();
    let mut checks: Vec<CheckEntry> = tasks
        .par_iter()
        .map(|&(id, n)| {
            let mut entry = CheckEntry {
                identity: id.name(),
                n,
                status: Status::Pass,
                residual: None,
                reason: None,
                context: None,
            };
            match family.residual(id, n) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => {
                    entry.status = Status::Fail;
                    entry.residual = Some(r.to_string());
                    entry.context = Some(echo.clone());
                }
                Err(e @ (Error::Precondition(_) | Error::Domain(_))) => {
                    entry.status = Status::Skipped;
                    entry.reason = Some(e.to_string());
                }
                Err(e) => {
                    entry.status = Status::Fail;
                    entry.reason = Some(e.to_string());
                    entry.context = Some(echo.clone());
                }
            }
            entry
        })
        .collect();
    checks.sort_by(|x, y| (x.identity, x.n).cmp(&(y.identity, y.n)));

    let mut totals = Totals::default();
    let mut identities: Vec<IdentitySummary> = Vec::new();
    for c in &checks {
        match identities.last_mut() {
            Some(s) if s.identity == c.identity => s.n_max = c.n,
            _ => identities.push(IdentitySummary {
                identity: c.identity,
                n_min: c.n,
                n_max: c.n,
                passed: 0,
                failed: 0,
                skipped: 0,
            }),
        }
        let s = identities.last_mut().unwrap();
        match c.status {
            Status::Pass => (s.passed += 1, totals.passed += 1),
            Status::Fail => (s.failed += 1, totals.failed += 1),
            Status::Skipped => (s.skipped += 1, totals.skipped += 1),
        };
    }
    let outcome = if totals.failed > 0 { Outcome::Violation } else { Outcome::Pass };
    match a.format {
        Format::Json => write_json(
            &VerifyReport {
                command: "verify",
                context: echo,
                n_max: a.n_max,
                summary: totals,
                identities,
                checks,
                timing_ms: start.elapsed().as_millis(),
            },
            out,
        )?,
        Format::Csv => {
            let header = ["identity", "n", "status", "detail"].map(String::from).to_vec();
            let body = checks
                .into_iter()
                .map(|c| {
                    let detail = c.residual.or(c.reason).unwrap_or_default();
                    vec![c.identity.to_string(), c.n.to_string(), c.status.as_str().to_string(), detail]
                })
                .collect();
            write_csv(header, body, out)?
        }
    }
    Ok(outcome)
}

fn check_precision(precision: u64) -> Result<NumericConfig, CliError> {
    NumericConfig::with_precision(precision).map_err(|e| CliError::Usage(e.to_string()))
}

fn plot_data(a: PlotArgs, out: &mut dyn Write) -> CliResult {
    check_precision(a.precision.precision)?;
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    if a.x_min > a.x_max {
        return Err(CliError::Usage("--x-min exceeds --x-max".into()));
    }
    let resolved = resolve(&a.family, &a.mass, &a.precision)?;
    let n_top = *a.n_list.0.iter().max().unwrap();
    let f = sobolev_family(&resolved, n_top)?;
    let digits = a.precision.precision;
    let xs: Vec<Rational> = if a.samples == 1 {
        vec![a.x_min.clone()]
    } else {
        let step = (&a.x_max - &a.x_min) / Rational::from_integer((a.samples - 1).into());
        (0..a.samples).map(|i| &a.x_min + &step * Rational::from_integer(i.into())).collect()
    };
    let columns: Vec<PlotColumn> = a
        .n_list
        .0
        .par_iter()
        .map(|&n| {
            let p: &ExactPoly = f.sobolev_poly(n);
            PlotColumn { n, values: xs.iter().map(|x| Decimal::from_rational(&p.eval(x), digits)).collect() }
        })
        .collect();
    let x: Vec<Decimal> = xs.iter().map(|x| Decimal::from_rational(x, digits)).collect();
    match a.format {
        Format::Json => {
            write_json(&PlotReport { command: "plot-data", context: resolved.echo, x, columns }, out)?
        }
        Format::Csv => {
            let mut header = vec!["x".to_string()];
            header.extend(columns.iter().map(|c| format!("H{}", c.n)));
            let body = (0..xs.len())
                .map(|i| {
                    let mut row = vec![x[i].value.clone()];
                    row.extend(columns.iter().map(|c| c.values[i].value.clone()));
                    row
                })
                .collect();
            write_csv(header, body, out)?
        }
    }
    Ok(Outcome::Pass)
}

fn gram(a: GramArgs, out: &mut dyn Write) -> CliResult {
    let cfg = check_precision(a.precision.precision)?;
    if a.tolerance.is_nan() || a.tolerance <= 0.0 {
        return Err(CliError::Usage("--tolerance must be positive".into()));
    }
    let resolved = resolve(&a.family, &a.mass, &a.precision)?;
    let f = sobolev_family(&resolved, a.n_max)?;
    let polys: Vec<ExactPoly> = (0..=a.n_max).map(|n| f.sobolev_poly(n).clone()).collect();
    let g = gram_matrix::<BigFloat>(&polys, &resolved.ctx, &cfg);
    let worst = max_relative_off_diagonal(&g);
    let pass = worst < a.tolerance;
    let warning = (cfg.precision() < GRAM_MIN_PRECISION).then(|| {
        format!(
            "precision {} is below the {GRAM_MIN_PRECISION} digits recommended for the orthogonality check",
            cfg.precision()
        )
    });
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let digits = cfg.precision();
    let matrix: Vec<Vec<Decimal>> =
        g.iter().map(|row| row.iter().map(|v| Decimal::from_big(v, digits)).collect()).collect();
    match a.format {
        Format::Json => write_json(
            &GramReport {
                command: "gram",
                context: resolved.echo,
                n_max: a.n_max,
                matrix,
                max_relative_off_diagonal: worst,
                tolerance: a.tolerance,
                status: if pass { Status::Pass } else { Status::Fail },
                warning: warning.clone(),
            },
            out,
        )?,
        Format::Csv => {
            let header = (0..=a.n_max).map(|n| format!("H{n}")).collect();
            let body = matrix.into_iter().map(|row| row.into_iter().map(|d| d.value).collect()).collect();
            write_csv(header, body, out)?
        }
    }
    Ok(if !pass {
        Outcome::Violation
    } else if warning.is_some() {
        Outcome::PrecisionWarning
    } else {
        Outcome::Pass
    })
}
