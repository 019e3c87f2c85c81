use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qeigen::verify::Suite;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Tabulate,
    Plotdata,
    Verify,
    Kernel,
    Transform,
    Gram,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PrecisionMode {
    /// Structured engine with a double-precision ladder.
    Double,
    /// Double-double throughout, closed forms where they exist.
    DoubleDouble,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

pub const MAX_GRID_POINTS: usize = 1_000_000;

impl Default for XGrid {
    fn default() -> Self {
        Self { min: 0.1, max: 10.0, count: 100, spacing: Spacing::Linear }
    }
}

impl XGrid {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=MAX_GRID_POINTS).contains(&self.count) {
            return Err(CliError::Invalid(format!("grid count must lie in 1..={MAX_GRID_POINTS}, got {}", self.count)));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return Err(CliError::Invalid(format!("grid needs finite min <= max, got [{}, {}]", self.min, self.max)));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(CliError::Invalid(format!("log spacing needs min > 0, got {}", self.min)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k == self.count - 1 {
                    return self.max;
                }
                let s = k as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * s,
                    Spacing::Log if k == 0 => self.min,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * s).exp(),
                }
            })
            .collect()
    }
}

/// Fully merged configuration. `None` fields take the command's default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliConfig {
    pub command: Command,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub i: Option<u8>,
    pub j_max: Option<u32>,
    pub x_grid: XGrid,
    /// Explicit points; these replace the grid.
    pub xs: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub output_path: Option<String>,
    pub precision_mode: PrecisionMode,
    pub suites: Vec<Suite>,
    pub perturb: f64,
}

impl CliConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            mu: None,
            nu: None,
            i: None,
            j_max: None,
            x_grid: XGrid::default(),
            xs: None,
            tol: None,
            format: None,
            output_path: None,
            precision_mode: PrecisionMode::DoubleDouble,
            suites: Vec::new(),
            perturb: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.x_grid.validate()?;
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Invalid(format!("tol must lie in (0, 1), got {t}")));
            }
        }
        if let Some(xs) = &self.xs {
            if xs.is_empty() || xs.len() > MAX_GRID_POINTS || xs.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Invalid(format!("x list must be finite with 1..={MAX_GRID_POINTS} points")));
            }
        }
        if let Some(i) = self.i {
            if !(1..=4).contains(&i) {
                return Err(CliError::Invalid(format!("i must be in 1..=4, got {i}")));
            }
        }
        if !self.perturb.is_finite() {
            return Err(CliError::Invalid("perturb must be finite".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        self.xs.clone().unwrap_or_else(|| self.x_grid.points())
    }

    pub fn params(&self) -> Result<(f64, f64), CliError> {
        match (self.mu, self.nu) {
            (Some(mu), Some(nu)) => Ok((mu, nu)),
            (None, _) => Err(CliError::Invalid("--mu is required".into())),
            (_, None) => Err(CliError::Invalid("--nu is required".into())),
        }
    }
}

/// Config file contents; every field optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub i: Option<u8>,
    pub j_max: Option<u32>,
    pub x_grid: Option<PartialGrid>,
    pub xs: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub output_path: Option<String>,
    pub precision_mode: Option<PrecisionMode>,
    pub suites: Option<Vec<Suite>>,
    pub perturb: Option<f64>,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialGrid {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

impl ConfigFile {
    pub fn from_json_str(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let s =
            std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
        Self::from_json_str(&s)
    }
}

#[derive(Parser, Debug)]
#[command(name = "qeigen", version, about = "Tabulate and verify the eigenfunctions Λ_{i,j}^{μ,ν}")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Rows (i, j, mu, nu, x, value) for j = 0..=jmax over the x grid.
    Tabulate(CommonArgs),
    /// One column per j, for plotting.
    Plotdata(CommonArgs),
    /// Run verification suites and write JSON reports.
    Verify(VerifyArgs),
    /// The transform kernel G_{μ,ν}(t) over the grid.
    Kernel(CommonArgs),
    /// T Λ_{i,j} next to Λ_{i,j}.
    Transform(CommonArgs),
    /// Gram matrix of Λ_{2,0..=jmax} with the closed-form norms.
    Gram(CommonArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// JSON config; explicit flags override it.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub i: Option<u8>,
    #[arg(long = "jmax")]
    pub j_max: Option<u32>,
    /// Comma-separated points; replaces the grid.
    #[arg(long = "x", value_delimiter = ',', allow_negative_numbers = true)]
    pub xs: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short = 'o')]
    pub output: Option<String>,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionMode>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Suites to run (comma-separated); all by default.
    #[arg(long = "suite", value_delimiter = ',')]
    pub suites: Option<Vec<Suite>>,
    /// Test mode: scales the eigenvalue used by the eigen suite by (1 + eps).
    #[arg(long, allow_negative_numbers = true)]
    pub perturb: Option<f64>,
}

impl Cli {
    pub fn resolve(self) -> Result<CliConfig, CliError> {
        let (command, common, suites, perturb) = match self.command {
            Sub::Tabulate(c) => (Command::Tabulate, c, None, None),
            Sub::Plotdata(c) => (Command::Plotdata, c, None, None),
            Sub::Kernel(c) => (Command::Kernel, c, None, None),
            Sub::Transform(c) => (Command::Transform, c, None, None),
            Sub::Gram(c) => (Command::Gram, c, None, None),
            Sub::Verify(v) => (Command::Verify, v.common, v.suites, v.perturb),
        };
        let file = match &common.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let cfg = merge(command, &common, suites, perturb, file);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Flags over file over defaults. The subcommand always names the command.
pub fn merge(
    command: Command,
    a: &CommonArgs,
    suites: Option<Vec<Suite>>,
    perturb: Option<f64>,
    file: ConfigFile,
) -> CliConfig {
    let d = CliConfig::new(command);
    let g = file.x_grid.unwrap_or_default();
    let dg = XGrid::default();
    CliConfig {
        command,
        mu: a.mu.or(file.mu),
        nu: a.nu.or(file.nu),
        i: a.i.or(file.i),
        j_max: a.j_max.or(file.j_max),
        x_grid: XGrid {
            min: a.xmin.or(g.min).unwrap_or(dg.min),
            max: a.xmax.or(g.max).unwrap_or(dg.max),
            count: a.count.or(g.count).unwrap_or(dg.count),
            spacing: a.spacing.or(g.spacing).unwrap_or(dg.spacing),
        },
        xs: a.xs.clone().or(file.xs),
        tol: a.tol.or(file.tol),
        format: a.format.or(file.format),
        output_path: a.output.clone().or(file.output_path),
        precision_mode: a.precision.or(file.precision_mode).unwrap_or(d.precision_mode),
        suites: suites.or(file.suites).unwrap_or_default(),
        perturb: perturb.or(file.perturb).unwrap_or(0.0),
    }
}
