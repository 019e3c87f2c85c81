use qeigen::gtransform::{transform_eigenfunction, Kernel, KernelSpec};
use qeigen::lambda::lambda_batch;
use qeigen::params::{ParamSet, SolutionKind};
use qeigen::quadrature::gram_matrix;
use qeigen::structrep::StructuredEigenfunction;
use qeigen::verify::{run_suite, Suite, SuiteConfig, VerificationReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CliConfig, Command, Format, PrecisionMode};
use crate::format::{g17, write_csv};
use crate::CliError;

/// Parameter points of the default verification sweep, all under IC1.
pub const DEFAULT_SWEEP: [(f64, f64); 4] = [(3.0, 1.0), (4.0, 2.0), (1.0, -1.0), (5.0, 3.0)];

pub const DEFAULT_J_MAX: u32 = 4;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_GRAM_TOL: f64 = 1e-11;

/// What a command produced: the output body, whether it counts as a pass,
/// and lines for stderr.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub body: String,
    pub passed: bool,
    pub log: Vec<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, passed: true, log: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabRow {
    pub i: u8,
    pub j: u32,
    pub mu: f64,
    pub nu: f64,
    pub x: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub i: u8,
    pub mu: f64,
    pub nu: f64,
    pub x: Vec<f64>,
    pub series: Vec<Series>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub mu: f64,
    pub nu: f64,
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformRow {
    pub i: u8,
    pub j: u32,
    pub mu: f64,
    pub nu: f64,
    pub x: f64,
    pub value: f64,
    pub transformed: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
}

pub fn run(cfg: &CliConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Tabulate => tabulate(cfg),
        Command::Plotdata => plotdata(cfg),
        Command::Verify => verify(cfg),
        Command::Kernel => kernel(cfg),
        Command::Transform => transform(cfg),
        Command::Gram => gram(cfg),
    }
}

fn setup(cfg: &CliConfig) -> Result<(SolutionKind, ParamSet), CliError> {
    let (mu, nu) = cfg.params()?;
    let p = ParamSet::new(mu, nu)?;
    let kind = SolutionKind::new(cfg.i.unwrap_or(2))?;
    kind.check(&p)?;
    Ok((kind, p))
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, &header, rows)?;
    Ok(String::from_utf8(buf).expect("ascii output"))
}

fn finite(v: f64, what: impl FnOnce() -> String) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Numerical(format!("non-finite value at {}", what())))
    }
}

/// Rows j = 0..=j_max, columns xs.
pub fn values(
    mode: PrecisionMode,
    kind: SolutionKind,
    p: &ParamSet,
    j_max: u32,
    xs: &[f64],
) -> Result<Vec<Vec<f64>>, CliError> {
    let rows = match mode {
        PrecisionMode::DoubleDouble => lambda_batch(kind, p, j_max, xs)?,
        PrecisionMode::Double => (0..=j_max as i64)
            .map(|j| {
                let f = StructuredEigenfunction::build(kind, p, j)?;
                xs.par_iter().map(|&x| f.func.eval_f64(x)).collect()
            })
            .collect::<qeigen::Result<_>>()?,
    };
    for (j, row) in rows.iter().enumerate() {
        for (v, x) in row.iter().zip(xs) {
            finite(*v, || format!("j={j}, x={x}"))?;
        }
    }
    Ok(rows)
}

fn tabulate(cfg: &CliConfig) -> Result<Outcome, CliError> {
    let (kind, p) = setup(cfg)?;
    let xs = cfg.points();
    let table = values(cfg.precision_mode, kind, &p, cfg.j_max.unwrap_or(DEFAULT_J_MAX), &xs)?;
    let rows: Vec<TabRow> = table
        .iter()
        .enumerate()
        .flat_map(|(j, row)| {
            row.iter().zip(&xs).map(move |(&value, &x)| TabRow { i: kind.i, j: j as u32, mu: p.mu, nu: p.nu, x, value })
        })
        .collect();
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows)?,
        Format::Csv => csv(
            &["i", "j", "mu", "nu", "x", "value"],
            &rows
                .iter()
                .map(|r| vec![r.i.to_string(), r.j.to_string(), g17(r.mu), g17(r.nu), g17(r.x), g17(r.value)])
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Outcome::ok(body))
}

fn plotdata(cfg: &CliConfig) -> Result<Outcome, CliError> {
    let (kind, p) = setup(cfg)?;
    let xs = cfg.points();
    let table = values(cfg.precision_mode, kind, &p, cfg.j_max.unwrap_or(DEFAULT_J_MAX), &xs)?;
    let names: Vec<String> = (0..table.len()).map(|j| format!("L{}_{j}", kind.i)).collect();
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&PlotData {
            i: kind.i,
            mu: p.mu,
            nu: p.nu,
            x: xs,
            series: names.into_iter().zip(table).map(|(name, values)| Series { name, values }).collect(),
        })?,
        Format::Csv => {
            let mut header = vec!["x"];
            header.extend(names.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = xs
                .iter()
                .enumerate()
                .map(|(n, &x)| std::iter::once(g17(x)).chain(table.iter().map(|r| g17(r[n]))).collect())
                .collect();
            csv(&header, &rows)?
        }
    };
    Ok(Outcome::ok(body))
}

fn kernel(cfg: &CliConfig) -> Result<Outcome, CliError> {
    let (mu, nu) = cfg.params()?;
    let k = Kernel::new(KernelSpec::new(mu, nu)?);
    let ts = cfg.points();
    let vals = ts.par_iter().map(|&t| k.eval(t)).collect::<qeigen::Result<Vec<f64>>>()?;
    let rows: Vec<KernelRow> = ts
        .iter()
        .zip(vals)
        .map(|(&t, value)| finite(value, || format!("t={t}")).map(|value| KernelRow { mu, nu, t, value }))
        .collect::<Result<_, _>>()?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows)?,
        Format::Csv => csv(
            &["mu", "nu", "t", "value"],
            &rows.iter().map(|r| vec![g17(r.mu), g17(r.nu), g17(r.t), g17(r.value)]).collect::<Vec<_>>(),
        )?,
    };
    Ok(Outcome::ok(body))
}

fn transform(cfg: &CliConfig) -> Result<Outcome, CliError> {
    let (kind, p) = setup(cfg)?;
    KernelSpec::for_params(&p)?;
    let xs = cfg.points();
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let mut rows = Vec::new();
    for j in 0..=cfg.j_max.unwrap_or(DEFAULT_J_MAX) {
        let f = StructuredEigenfunction::build(kind, &p, j as i64)?;
        let t = transform_eigenfunction(&f, &xs, tol)?;
        for (r, &x) in t.iter().zip(&xs) {
            rows.push(TransformRow {
                i: kind.i,
                j,
                mu: p.mu,
                nu: p.nu,
                x,
                value: f.evaluate(x)?,
                transformed: r.value,
                abs_error_estimate: r.abs_error_estimate,
                converged: r.converged,
            });
        }
    }
    let mut log = Vec::new();
    let bad = rows.iter().filter(|r| !r.converged).count();
    if bad > 0 {
        log.push(format!("warning: {bad} transform integrals did not reach tol {tol:e}"));
    }
    if !p.ic1 {
        log.push("note: parameters outside IC1; the eigenfunction property is not asserted here".into());
    }
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows)?,
        Format::Csv => csv(
            &["i", "j", "mu", "nu", "x", "value", "transformed", "abs_error_estimate", "converged"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.i.to_string(),
                        r.j.to_string(),
                        g17(r.mu),
                        g17(r.nu),
                        g17(r.x),
                        g17(r.value),
                        g17(r.transformed),
                        g17(r.abs_error_estimate),
                        r.converged.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Outcome { body, passed: true, log })
}

fn gram(cfg: &CliConfig) -> Result<Outcome, CliError> {
    let (mu, nu) = cfg.params()?;
    let p = ParamSet::new(mu, nu)?;
    let g = gram_matrix(&p, cfg.j_max.unwrap_or(DEFAULT_J_MAX), cfg.tol.unwrap_or(DEFAULT_GRAM_TOL))?;
    let mut log = vec![format!("max normalized off-diagonal {:e}", g.max_off_diagonal)];
    if let Some(e) = g.max_diagonal_error {
        log.push(format!("max relative diagonal error {e:e}"));
    }
    if !g.converged {
        log.push("warning: quadrature did not converge".into());
    }
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&g)?,
        Format::Csv => {
            let n = g.entries.len();
            let rows: Vec<Vec<String>> = (0..n)
                .flat_map(|j| (0..n).map(move |k| (j, k)))
                .map(|(j, k)| {
                    let expected = match &g.expected_norms {
                        Some(e) if j == k => g17(e[j]),
                        _ => String::new(),
                    };
                    vec![j.to_string(), k.to_string(), g17(g.entries[j][k]), expected]
                })
                .collect();
            csv(&["j", "k", "value", "expected"], &rows)?
        }
    };
    Ok(Outcome { body, passed: true, log })
}

/// The suite configuration for one point, with the CLI overrides applied.
pub fn suite_config(cfg: &CliConfig, suite: Suite, mu: f64, nu: f64) -> Result<SuiteConfig, CliError> {
    let mut sc = SuiteConfig::defaults(suite, mu, nu);
    if let Some(i) = cfg.i {
        sc.kinds = vec![i];
    }
    if let Some(j) = cfg.j_max {
        sc.j_max = j;
    }
    if let Some(xs) = &cfg.xs {
        sc.xs = xs.clone();
    }
    if let Some(t) = cfg.tol {
        sc.quad_tol = t;
    }
    sc.perturb = cfg.perturb;
    Ok(sc)
}

fn verify(cfg: &CliConfig) -> Result<Outcome, CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Invalid("verify writes JSON reports only".into()));
    }
    let points = match (cfg.mu, cfg.nu) {
        (Some(mu), Some(nu)) => vec![(mu, nu)],
        (None, None) => DEFAULT_SWEEP.to_vec(),
        _ => return Err(CliError::Invalid("--mu and --nu must be given together".into())),
    };
    let suites = if cfg.suites.is_empty() { Suite::ALL.to_vec() } else { cfg.suites.clone() };
    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut log = Vec::new();
    for &(mu, nu) in &points {
        for &s in &suites {
            let r = run_suite(s, &suite_config(cfg, s, mu, nu)?)?;
            let m = &r.summary;
            log.push(format!("{s} mu={mu} nu={nu}: {} passed, {} failed, {} skipped", m.passed, m.failed, m.skipped));
            reports.push(r);
        }
    }
    let passed = reports.iter().all(VerificationReport::all_passed);
    Ok(Outcome { body: json(&reports)?, passed, log })
}
