//! Run configuration: command-line flags over a `key = value` file over defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use plap_core::mc::MIN_SAMPLES;
use plap_core::SpaceParams;

use crate::error::CliError;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "PLAP_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "plap",
    version,
    about = "p-Laplacian fundamental solution verification suite"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandName,

    #[command(flatten)]
    pub args: ConfigArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    /// Check that ψ^α (log ψ when p = Q) is p-harmonic away from x0.
    VerifyFundamental,
    /// Check that ψ is ∞-harmonic away from x0.
    VerifyInfinity,
    /// Compare Lie brackets with finite differences and the alternative closed form.
    BracketReport,
    /// Estimate σ_p.
    Sigma,
    /// Check 𝒱(B_R) = σ_p R^Q across radii.
    Ahlfors,
    /// Surface measure scaling and the density limit at x0.
    Density,
    /// Annulus pairing limit Δ_p(C ψ^α) = δ_x0.
    Dirac,
    /// Capacity of a gauge annulus.
    Capacity,
}

impl CommandName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandName::VerifyFundamental => "verify-fundamental",
            CommandName::VerifyInfinity => "verify-infinity",
            CommandName::BracketReport => "bracket-report",
            CommandName::Sigma => "sigma",
            CommandName::Ahlfors => "ahlfors",
            CommandName::Density => "density",
            CommandName::Dirac => "dirac",
            CommandName::Capacity => "capacity",
        }
    }
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodSel {
    ClosedForm,
    Radial,
    Mc,
    All,
}

/// Every configurable value; `None` means "not given at this level".
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Base point, comma separated (defaults to the origin).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub p: Option<f64>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo samples per estimate.
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Random evaluation points for operator checks.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Radii list, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Inner annulus radius.
    #[arg(long = "r", global = true)]
    pub inner: Option<f64>,
    /// Outer annulus radius.
    #[arg(long = "R", global = true)]
    pub outer: Option<f64>,
    /// Support radius of the test bump.
    #[arg(long, global = true)]
    pub support: Option<f64>,
    /// Segments of the radial minimizer.
    #[arg(long, global = true)]
    pub knots: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodSel>,
    /// Worker threads (also `PLAP_THREADS`).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Scaled residual bound for operator checks.
    #[arg(long = "tol-ad", global = true)]
    pub tol_ad: Option<f64>,
    /// Number of standard errors for Monte Carlo consistency checks.
    #[arg(long = "n-sigma", global = true)]
    pub n_sigma: Option<f64>,
    /// Relative tolerance for extrapolated limits.
    #[arg(long = "tol-limit", global = true)]
    pub tol_limit: Option<f64>,
    /// Relative tolerance for pairwise capacity agreement.
    #[arg(long = "tol-capacity", global = true)]
    pub tol_capacity: Option<f64>,
}

/// Pinned tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub ad: f64,
    pub n_sigma: f64,
    pub limit: f64,
    pub capacity: f64,
    /// Radial minimizer vs closed form.
    pub radial: f64,
    /// Extra relative slack for the Monte Carlo capacity.
    pub mc_relative: f64,
    /// Closed-form gradient identities.
    pub gradient: f64,
    /// Divergence form vs expanded Δ_p.
    pub expansion: f64,
    /// Lie bracket vs finite-difference commutator.
    pub bracket_fd: f64,
    /// Lie bracket vs the alternative closed form when k = 1.
    pub bracket_exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ad: 1e-8,
            n_sigma: 3.0,
            limit: 0.02,
            capacity: 0.02,
            radial: 0.005,
            mc_relative: 0.01,
            gradient: 1e-10,
            expansion: 1e-9,
            bracket_fd: 1e-6,
            bracket_exact: 1e-12,
        }
    }
}

/// A fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub k: f64,
    pub c: f64,
    pub x0: Vec<f64>,
    pub p: f64,
    pub seed: u64,
    pub samples: u64,
    pub points: usize,
    /// Command-specific default when not given.
    pub radii: Option<Vec<f64>>,
    #[serde(rename = "r")]
    pub inner: f64,
    #[serde(rename = "R")]
    pub outer: f64,
    pub support: f64,
    pub knots: usize,
    pub method: MethodSel,
    pub format: Format,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn space(&self) -> SpaceParams {
        SpaceParams::new(self.n, self.k, self.c, self.x0.clone()).expect("validated")
    }

    pub fn radii_or(&self, default: &[f64]) -> Vec<f64> {
        self.radii.clone().unwrap_or_else(|| default.to_vec())
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value for `{key}`: {raw:?}")))
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',').map(|v| parse_value(key, v)).collect()
}

fn parse_enum<T: ValueEnum>(key: &str, raw: &str) -> Result<T, CliError> {
    T::from_str(raw.trim(), true).map_err(|_| CliError::Config(format!("invalid value for `{key}`: {raw:?}")))
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<ConfigArgs, CliError> {
    let mut a = ConfigArgs::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let v = value.trim();
        match key {
            "n" => a.n = Some(parse_value(key, v)?),
            "k" => a.k = Some(parse_value(key, v)?),
            "c" => a.c = Some(parse_value(key, v)?),
            "x0" => a.x0 = Some(parse_list(key, v)?),
            "p" => a.p = Some(parse_value(key, v)?),
            "seed" => a.seed = Some(parse_value(key, v)?),
            "samples" => a.samples = Some(parse_value(key, v)?),
            "points" => a.points = Some(parse_value(key, v)?),
            "radii" => a.radii = Some(parse_list(key, v)?),
            "r" => a.inner = Some(parse_value(key, v)?),
            "R" => a.outer = Some(parse_value(key, v)?),
            "support" => a.support = Some(parse_value(key, v)?),
            "knots" => a.knots = Some(parse_value(key, v)?),
            "method" => a.method = Some(parse_enum(key, v)?),
            "format" => a.format = Some(parse_enum(key, v)?),
            "threads" => a.threads = Some(parse_value(key, v)?),
            "out" => a.out = Some(PathBuf::from(v)),
            "tol-ad" => a.tol_ad = Some(parse_value(key, v)?),
            "n-sigma" => a.n_sigma = Some(parse_value(key, v)?),
            "tol-limit" => a.tol_limit = Some(parse_value(key, v)?),
            "tol-capacity" => a.tol_capacity = Some(parse_value(key, v)?),
            other => return Err(CliError::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
        }
    }
    Ok(a)
}

pub fn load_config_file(path: &Path) -> Result<ConfigArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

macro_rules! pick {
    ($flags:ident, $file:ident, $field:ident, $default:expr) => {
        $flags
            .$field
            .clone()
            .or_else(|| $file.$field.clone())
            .unwrap_or($default)
    };
}

/// Merges flags over file values over defaults, then validates.
pub fn resolve(flags: &ConfigArgs, env_threads: Option<&str>) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => load_config_file(path)?,
        None => ConfigArgs::default(),
    };
    let n = pick!(flags, file, n, 1);
    let d = Tolerances::default();
    let env_threads = match env_threads {
        Some(raw) => Some(parse_value::<usize>(THREADS_ENV, raw)?),
        None => None,
    };
    let cfg = RunConfig {
        n,
        k: pick!(flags, file, k, 1.0),
        c: pick!(flags, file, c, 1.0),
        x0: pick!(flags, file, x0, vec![0.0; 2 * n + 1]),
        p: pick!(flags, file, p, 2.0),
        seed: pick!(flags, file, seed, 1),
        samples: pick!(flags, file, samples, 1_000_000),
        points: pick!(flags, file, points, 100),
        radii: flags.radii.clone().or_else(|| file.radii.clone()),
        inner: pick!(flags, file, inner, 1.0),
        outer: pick!(flags, file, outer, 2.0),
        support: pick!(flags, file, support, 1.0),
        knots: pick!(flags, file, knots, 400),
        method: pick!(flags, file, method, MethodSel::All),
        format: pick!(flags, file, format, Format::Json),
        tolerances: Tolerances {
            ad: pick!(flags, file, tol_ad, d.ad),
            n_sigma: pick!(flags, file, n_sigma, d.n_sigma),
            limit: pick!(flags, file, tol_limit, d.limit),
            capacity: pick!(flags, file, tol_capacity, d.capacity),
            ..d
        },
        threads: flags.threads.or(file.threads).or(env_threads),
        out: flags.out.clone().or_else(|| file.out.clone()),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    SpaceParams::new(cfg.n, cfg.k, cfg.c, cfg.x0.clone()).map_err(|e| bad(e.to_string()))?;
    if !(cfg.p > 1.0 && cfg.p.is_finite()) {
        return Err(bad(format!("p must lie in (1, ∞), got {}", cfg.p)));
    }
    if cfg.samples < MIN_SAMPLES {
        return Err(bad(format!(
            "samples must be at least {MIN_SAMPLES}, got {}",
            cfg.samples
        )));
    }
    if cfg.points == 0 {
        return Err(bad("points must be positive"));
    }
    if let Some(radii) = &cfg.radii {
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(bad("radii must be positive"));
        }
    }
    if !(cfg.inner > 0.0 && cfg.inner < cfg.outer && cfg.outer.is_finite()) {
        return Err(bad(format!("need 0 < r < R, got r = {}, R = {}", cfg.inner, cfg.outer)));
    }
    if !(cfg.support > 0.0 && cfg.support.is_finite()) {
        return Err(bad("support must be positive"));
    }
    if cfg.knots < 8 {
        return Err(bad(format!("knots must be at least 8, got {}", cfg.knots)));
    }
    if cfg.threads == Some(0) {
        return Err(bad("threads must be positive"));
    }
    let t = &cfg.tolerances;
    for (name, v) in [
        ("tol-ad", t.ad),
        ("n-sigma", t.n_sigma),
        ("tol-limit", t.limit),
        ("tol-capacity", t.capacity),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(bad(format!("{name} must be positive")));
        }
    }
    Ok(())
}

/// Radii must be strictly decreasing for limit commands.
pub fn require_decreasing(radii: &[f64]) -> Result<(), CliError> {
    if radii.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(bad("radii must be strictly decreasing"));
    }
    Ok(())
}
