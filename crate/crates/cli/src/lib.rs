//! `slms` command-line driver.
//!
//! Exit codes: 0 success, 2 malformed configuration or usage, 3 runtime
//! failure (every trial of an algorithm diverged, or a noise validation
//! verdict of FAIL), 4 I/O error, 5 parameter out of range.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand};
use slms_core::config::{default_config, parse_config, ConfigError, TEMPLATE};
use slms_core::filter::AlgorithmId;
use slms_core::noise::{validate_cf, AlphaStableParams, CfReport, CF_GRID, CF_TOLERANCE};
use slms_core::report::{curves_to_csv, series_to_csv, RunManifest};
use slms_core::sim::{run_experiment_with, trial_seed, LearningCurve, Parallelism, Realization, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_INVALID: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "slms", version, about = "Sparse sign-LMS channel estimation under alpha-stable noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte-Carlo experiment and write learning curves as CSV.
    Run(RunArgs),
    /// Compare sampled noise against the analytic characteristic function.
    ValidateNoise(NoiseArgs),
    /// Print the reference configuration file.
    Template,
    /// Write the channel, training input and noise of one trial as CSV.
    DumpTrial(DumpArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Configuration file; the built-in template when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Output CSV; the manifest is written alongside with extension `.manifest.toml`.
    #[arg(long, default_value = "curves.csv")]
    pub out: PathBuf,
    /// Comma-separated algorithm names, e.g. `slms,slms-za`.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,
    /// Worker threads; all cores when omitted. Does not affect results.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[arg(long, default_value_t = 1.2, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = CF_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trial index within the experiment.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Error carrying the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        let code = match err {
            ConfigError::Io { .. } => EXIT_IO,
            ConfigError::Syntax(_) => EXIT_CONFIG,
            ConfigError::Invalid(_) => EXIT_INVALID,
        };
        Self::new(code, err.to_string())
    }
}

impl From<slms_core::Error> for CliError {
    fn from(err: slms_core::Error) -> Self {
        use slms_core::Error as E;
        let code = match err {
            E::UnknownAlgorithm(_) => EXIT_CONFIG,
            E::Divergence { .. } => EXIT_RUNTIME,
            _ => EXIT_INVALID,
        };
        Self::new(code, err.to_string())
    }
}

/// Result of a successful `run`.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: SimConfig,
    pub curves: Vec<LearningCurve>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

fn load_config(path: Option<&Path>) -> Result<SimConfig, CliError> {
    Ok(match path {
        Some(p) => parse_config(p)?,
        None => default_config(),
    })
}

/// Applies command-line overrides on top of the file values.
pub fn resolve_run_config(args: &RunArgs) -> Result<SimConfig, CliError> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        config.n_trials = trials;
    }
    if let Some(iterations) = args.iterations {
        config.n_iterations = iterations;
    }
    if let Some(names) = &args.algorithms {
        let mut selected = Vec::with_capacity(names.len());
        for name in names.iter().map(|n| n.trim()) {
            let id: AlgorithmId = name.parse()?;
            // Sections from the file win; otherwise reference parameters.
            let spec = config
                .algorithms
                .iter()
                .find(|s| s.id() == id)
                .copied()
                .unwrap_or_else(|| id.with_defaults());
            selected.push(spec);
        }
        config.algorithms = selected;
    }
    config.validate()?;
    Ok(config)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.toml")
}

pub fn cmd_run(args: &RunArgs) -> Result<RunOutcome, CliError> {
    let config = resolve_run_config(args)?;
    let started = SystemTime::now();
    let parallelism = args.threads.map_or(Parallelism::Auto, Parallelism::Threads);
    let curves = run_experiment_with(&config, parallelism)?;
    let finished = SystemTime::now();

    let csv_path = args.out.clone();
    fs::write(&csv_path, curves_to_csv(&curves)).map_err(|e| CliError::io(&csv_path, e))?;
    let manifest = RunManifest {
        config_path: args.config.clone(),
        config: config.clone(),
        output_path: csv_path.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished,
    };
    let manifest_path = manifest_path(&csv_path);
    fs::write(&manifest_path, manifest.render()).map_err(|e| CliError::io(&manifest_path, e))?;

    let dead: Vec<&str> = curves
        .iter()
        .filter(|c| c.all_diverged())
        .map(|c| c.algorithm.as_str())
        .collect();
    if !dead.is_empty() {
        return Err(CliError::new(
            EXIT_RUNTIME,
            format!("every trial diverged for: {}", dead.join(", ")),
        ));
    }
    Ok(RunOutcome {
        config,
        curves,
        csv_path,
        manifest_path,
    })
}

/// Human-readable agreement table with a final PASS/FAIL verdict.
pub fn format_noise_report(report: &CfReport) -> String {
    let p = &report.params;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "alpha={} beta={} gamma={} delta={} samples={}",
        p.alpha, p.beta, p.gamma, p.delta, report.n_samples
    );
    let _ = writeln!(out, "{:>6}  {:>22}  {:>22}  {:>10}", "t", "analytic", "empirical", "|error|");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{:>6}  {:>10.6}{:+10.6}j  {:>10.6}{:+10.6}j  {:>10.6}",
            row.t, row.analytic.re, row.analytic.im, row.empirical.re, row.empirical.im, row.error
        );
    }
    let _ = writeln!(out, "sample mean {:.6}, sample variance {:.6}", report.sample_mean, report.sample_variance);
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(
        out,
        "{verdict}: max |error| {:.6} (tolerance {})",
        report.max_error(),
        report.tolerance
    );
    out
}

pub fn cmd_validate_noise(args: &NoiseArgs) -> Result<CfReport, CliError> {
    let params = AlphaStableParams::new(args.alpha, args.beta, args.gamma, args.delta)?;
    if !(args.tolerance > 0.0) {
        return Err(CliError::new(EXIT_INVALID, "tolerance must be positive"));
    }
    Ok(validate_cf(&params, args.samples, args.seed, &CF_GRID, args.tolerance)?)
}

pub fn cmd_dump_trial(args: &DumpArgs) -> Result<Vec<PathBuf>, CliError> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let real = Realization::generate(&config, trial_seed(config.master_seed, args.trial))?;
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let files = [
        ("channel.csv", series_to_csv(real.channel.taps())),
        ("input.csv", series_to_csv(real.input.samples())),
        ("noise.csv", series_to_csv(&real.noise)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = args.out_dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args).map(|outcome| {
            eprintln!(
                "wrote {} and {}",
                outcome.csv_path.display(),
                outcome.manifest_path.display()
            );
            for curve in &outcome.curves {
                if curve.trials_diverged > 0 {
                    eprintln!(
                        "{}: {} of {} trials diverged and were excluded",
                        curve.algorithm,
                        curve.trials_diverged,
                        curve.trials_diverged + curve.trials_completed
                    );
                }
            }
        }),
        Command::ValidateNoise(args) => cmd_validate_noise(args).and_then(|report| {
            print!("{}", format_noise_report(&report));
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::new(EXIT_RUNTIME, "characteristic function mismatch"))
            }
        }),
        Command::Template => {
            print!("{TEMPLATE}");
            Ok(())
        }
        Command::DumpTrial(args) => cmd_dump_trial(args).map(|paths| {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
