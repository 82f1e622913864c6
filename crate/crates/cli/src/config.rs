//! Command line, config file and environment, resolved into a [`RunConfig`].

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use hardy_core::identities::{IdentityId, DEFAULT_REL_TOL, DEFAULT_THRESHOLD};
use hardy_core::suite::SWEEP_EPS;

use crate::UsageError;

/// Environment variable that replaces the default quadrature tolerance.
pub const REL_TOL_ENV: &str = "HARDY_REL_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate one identity for one test function.
    Verify,
    /// Rayleigh quotients along a truncated extremizer family.
    Sharpness,
    /// Windowed integrals of an exact extremizer form against the log window.
    Divergence,
    /// Randomized check of the orthogonality lemma in complex space.
    Lemma1,
    /// Logarithmic identity over a list of radii.
    RSweep,
    /// The full acceptance suite.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plot,
}

/// Comma-separated reals, parsed as a single value so that a later
/// occurrence replaces an earlier one.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(FloatList(Vec::new()));
        }
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
            .collect::<Result<_, _>>()
            .map(FloatList)
    }
}

impl fmt::Display for FloatList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "hardy",
    version,
    about = "Numerical checks of L² Hardy-type remainder identities"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Flat `key = value` file; keys are long flag names, flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Theorem 1, 2 or 3.
    #[arg(short, long, global = true, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub theorem: Option<u8>,

    /// Identity within the theorem, e.g. T1_eq16 or T3_eq117.
    #[arg(long, global = true)]
    pub identity: Option<IdentityId>,

    /// Space dimension.
    #[arg(short = 'n', long = "n", global = true)]
    pub n: Option<usize>,

    /// Exponent of the one-dimensional identities.
    #[arg(short = 'p', long = "p", global = true)]
    pub p: Option<f64>,

    /// Sphere radius of the logarithmic identity.
    #[arg(short = 'R', long, global = true)]
    pub radius: Option<f64>,

    /// Radii for r-sweep, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub radii: Option<FloatList>,

    /// Catalogued test family.
    #[arg(long, global = true)]
    pub family: Option<String>,

    /// Family parameters, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub params: Option<FloatList>,

    /// Angular factor: one, zero, first_harmonic, cosK (plane only).
    #[arg(long, global = true)]
    pub angular: Option<String>,

    /// Truncations for sharpness, comma separated.
    #[arg(long, global = true)]
    pub eps: Option<FloatList>,

    /// Cutoffs δ for divergence: windows (δ, 1/δ), or (δ, 1) in log distance for theorem 2.
    #[arg(long, global = true)]
    pub cutoffs: Option<FloatList>,

    /// Also require this fraction of the sharp constant at the finest truncation.
    #[arg(long, global = true)]
    pub min_fraction: Option<f64>,

    /// Quadrature relative tolerance.
    #[arg(long, global = true, env = REL_TOL_ENV)]
    pub rel_tol: Option<f64>,

    /// Residual threshold for a passing report.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,

    #[arg(short, long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file; JSON and CSV go to stdout without it.
    #[arg(short, long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Vector dimension for lemma1.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
}

/// Fully resolved options.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub theorem: Option<u8>,
    pub identity: Option<IdentityId>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub radius: Option<f64>,
    pub radii: Vec<f64>,
    pub family: Option<String>,
    pub params: Vec<f64>,
    pub angular: Option<String>,
    pub eps: Vec<f64>,
    pub cutoffs: Option<Vec<f64>>,
    pub min_fraction: Option<f64>,
    pub rel_tol: f64,
    pub threshold: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
}

impl RunConfig {
    /// Parses `args` (program name first), folding in `--config` if given.
    pub fn from_args<I, T>(args: I) -> Result<Self, UsageError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
        let first = Cli::try_parse_from(&args).map_err(UsageError::Clap)?;
        let cli = match &first.config {
            None => first,
            Some(path) => {
                // file entries go first so that explicit flags override them
                let mut merged = vec![args.first().cloned().unwrap_or_else(|| "hardy".into())];
                merged.extend(file_args(path)?);
                merged.extend(args.iter().skip(1).cloned());
                Cli::try_parse_from(merged).map_err(UsageError::Clap)?
            }
        };
        Self::resolve(cli)
    }

    fn resolve(cli: Cli) -> Result<Self, UsageError> {
        let rel_tol = cli.rel_tol.unwrap_or(DEFAULT_REL_TOL);
        if !(1e-14..1.0).contains(&rel_tol) {
            return Err(UsageError::Invalid(format!("rel-tol {rel_tol} must lie in [1e-14, 1)")));
        }
        let threshold = cli.threshold.unwrap_or(DEFAULT_THRESHOLD);
        if !(threshold > 0.0) {
            return Err(UsageError::Invalid(format!("threshold {threshold} must be positive")));
        }
        let theorem = match (cli.theorem, cli.identity) {
            (Some(t), Some(id)) if t != id.theorem() => {
                return Err(UsageError::Invalid(format!("identity {id} is not part of theorem {t}")))
            }
            (t, id) => t.or(id.map(|id| id.theorem())),
        };
        let cfg = RunConfig {
            command: cli.command,
            theorem,
            identity: cli.identity,
            n: cli.n,
            p: cli.p,
            radius: cli.radius,
            radii: cli.radii.map(|l| l.0).unwrap_or_default(),
            family: cli.family,
            params: cli.params.map(|l| l.0).unwrap_or_default(),
            angular: cli.angular,
            eps: cli.eps.map(|l| l.0).unwrap_or_else(|| SWEEP_EPS.to_vec()),
            cutoffs: cli.cutoffs.map(|l| l.0),
            min_fraction: cli.min_fraction,
            rel_tol,
            threshold,
            format: cli.format.unwrap_or(Format::Json),
            output: cli.output,
            seed: cli.seed.unwrap_or(7),
            trials: cli.trials.unwrap_or(1000),
            dim: cli.dim.unwrap_or(16),
        };
        cfg.check_ranges()?;
        Ok(cfg)
    }

    /// Parameter ranges of the theorems.
    fn check_ranges(&self) -> Result<(), UsageError> {
        let bad = |m: String| Err(UsageError::Invalid(m));
        match self.theorem {
            Some(1) => {
                if let Some(n) = self.n.filter(|&n| n < 3) {
                    return bad(format!("theorem 1 needs n >= 3, got {n}"));
                }
            }
            Some(2) => {
                if let Some(n) = self.n.filter(|&n| n < 2) {
                    return bad(format!("theorem 2 needs n >= 2, got {n}"));
                }
                for r in self.radius.iter().chain(&self.radii) {
                    if !(*r > 0.0 && r.is_finite()) {
                        return bad(format!("theorem 2 needs R > 0, got {r}"));
                    }
                }
            }
            Some(3) => {
                if let Some(p) = self.p.filter(|p| !(*p > 0.0 && p.is_finite())) {
                    return bad(format!("theorem 3 needs p > 0, got {p}"));
                }
            }
            _ => {}
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad("eps values must lie in (0, 1)".into());
        }
        if let Some(f) = self.min_fraction.filter(|f| !(*f > 0.0 && *f <= 1.0)) {
            return bad(format!("min-fraction {f} must lie in (0, 1]"));
        }
        if self.trials == 0 || self.dim == 0 {
            return bad("trials and dim must be positive".into());
        }
        Ok(())
    }

    pub fn theorem_or_usage(&self) -> Result<u8, UsageError> {
        self.theorem
            .ok_or_else(|| UsageError::Invalid("select a theorem with --theorem or --identity".into()))
    }
}

/// Reads a flat config file into `--key value` pairs.
fn file_args(path: &Path) -> Result<Vec<OsString>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError::Invalid(format!("config file {}: {e}", path.display())))?;
    let known: Vec<String> = Cli::command()
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .collect();
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(a, b)| (a.trim(), b.trim().trim_matches('"')))
            .ok_or_else(|| UsageError::Invalid(format!("{}:{}: expected `key = value`", path.display(), k + 1)))?;
        let key = key.replace('_', "-");
        if key == "config" || !known.contains(&key) {
            return Err(UsageError::Invalid(format!(
                "{}:{}: unknown key `{key}`",
                path.display(),
                k + 1
            )));
        }
        out.push(format!("--{key}").into());
        out.push(value.into());
    }
    Ok(out)
}
