//! Experiment configuration files.
//!
//! A configuration is sectioned key-value text (TOML syntax):
//!
//! ```toml
//! [channel]
//! n_taps = 128
//! sparsity = 8
//!
//! [noise]
//! alpha = 1.2
//! snr_db = 10.0
//!
//! [run]
//! trials = 100
//!
//! [algorithm.slms-za]
//! rho = 2e-4
//! ```
//!
//! Every key is optional and falls back to the reference value; each
//! `[algorithm.NAME]` section adds one algorithm. Penalty strength is given
//! either as `rho`, the attractor coefficient used directly in the update,
//! or as `lambda`, the cost-function weight, converted with `rho = mu *
//! lambda` (`mu * lambda * eps` for RZA; RL1 takes `lambda` unscaled).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::channel::InputKind;
use crate::filter::{
    AlgorithmId, AlgorithmSpec, Penalty, PenaltyKind, DEFAULT_DELTA_RL1, DEFAULT_EPS_LP, DEFAULT_EPS_RZA, DEFAULT_MU,
    DEFAULT_P,
};
use crate::noise::AlphaStableParams;
use crate::sim::{SimConfig, SnrScaling, DEFAULT_ITERATIONS};

/// Reference configuration with every algorithm enabled.
pub const TEMPLATE: &str = r#"# Sparse channel estimation under alpha-stable noise.

[channel]
n_taps = 128
sparsity = 8
input = "gaussian"

[noise]
alpha = 1.2
beta = 0.0
gamma = 1.0
delta = 0.0
snr_db = 10.0
snr_scaling = "noise"

[run]
iterations = 3000
trials = 100
seed = 1
mu = 0.005

[algorithm.lms]
[algorithm.slms]

[algorithm.lms-za]
rho = 2e-4
[algorithm.slms-za]
rho = 2e-4

[algorithm.lms-rza]
rho = 2e-3
eps = 20.0
[algorithm.slms-rza]
rho = 2e-3
eps = 20.0

[algorithm.lms-rl1]
rho = 5e-5
delta = 0.05
[algorithm.slms-rl1]
rho = 5e-5
delta = 0.05

[algorithm.lms-lp]
rho = 5e-6
eps = 0.05
p = 0.5
[algorithm.slms-lp]
rho = 5e-6
eps = 0.05
p = 0.5
"#;

const DEFAULT_TRIALS: usize = 100;
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed text, wrong value types or unknown keys.
    #[error("malformed configuration: {0}")]
    Syntax(String),

    /// Well-formed but violates a parameter constraint.
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    channel: RawChannel,
    #[serde(default)]
    noise: RawNoise,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    algorithm: BTreeMap<String, RawAlgorithm>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    n_taps: Option<usize>,
    sparsity: Option<usize>,
    input: Option<InputKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    snr_db: Option<f64>,
    snr_scaling: Option<SnrScaling>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    iterations: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    mu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgorithm {
    mu: Option<f64>,
    rho: Option<f64>,
    lambda: Option<f64>,
    eps: Option<f64>,
    delta: Option<f64>,
    p: Option<f64>,
}

impl RawAlgorithm {
    fn resolve(&self, name: &str, default_mu: f64) -> Result<AlgorithmSpec, ConfigError> {
        let id: AlgorithmId = name
            .parse()
            .map_err(|_| ConfigError::Syntax(format!("unknown algorithm section `algorithm.{name}`")))?;
        let kind = id.penalty;
        let reject = |key: &str, present: bool| {
            if present {
                Err(ConfigError::Syntax(format!(
                    "key `{key}` does not apply to algorithm `{name}`"
                )))
            } else {
                Ok(())
            }
        };
        reject("eps", self.eps.is_some() && !matches!(kind, PenaltyKind::Rza | PenaltyKind::Lp))?;
        reject("delta", self.delta.is_some() && kind != PenaltyKind::Rl1)?;
        reject("p", self.p.is_some() && kind != PenaltyKind::Lp)?;
        reject("rho", self.rho.is_some() && kind == PenaltyKind::None)?;
        reject("lambda", self.lambda.is_some() && kind == PenaltyKind::None)?;
        if self.rho.is_some() && self.lambda.is_some() {
            return Err(ConfigError::Syntax(format!(
                "algorithm `{name}` sets both `rho` and `lambda`"
            )));
        }

        let mu = self.mu.unwrap_or(default_mu);
        let defaults = kind.with_defaults();
        let coefficient = |scale: f64| -> f64 {
            match (self.rho, self.lambda) {
                (Some(rho), _) => rho,
                (None, Some(lambda)) => scale * lambda,
                (None, None) => match defaults {
                    Penalty::None => 0.0,
                    Penalty::Za { rho } | Penalty::Rza { rho, .. } | Penalty::Rl1 { rho, .. } | Penalty::Lp { rho, .. } => rho,
                },
            }
        };
        let penalty = match kind {
            PenaltyKind::None => Penalty::None,
            PenaltyKind::Za => Penalty::Za { rho: coefficient(mu) },
            PenaltyKind::Rza => {
                let eps = self.eps.unwrap_or(DEFAULT_EPS_RZA);
                Penalty::Rza {
                    rho: coefficient(mu * eps),
                    eps,
                }
            }
            PenaltyKind::Rl1 => Penalty::Rl1 {
                rho: coefficient(1.0),
                delta: self.delta.unwrap_or(DEFAULT_DELTA_RL1),
            },
            PenaltyKind::Lp => Penalty::Lp {
                rho: coefficient(mu),
                eps: self.eps.unwrap_or(DEFAULT_EPS_LP),
                p: self.p.unwrap_or(DEFAULT_P),
            },
        };
        let spec = AlgorithmSpec {
            family: id.family,
            penalty,
            mu,
        };
        spec.validate()
            .map_err(|e| ConfigError::Invalid(format!("algorithm `{name}`: {e}")))?;
        Ok(spec)
    }
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str) -> Result<SimConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;

    let mu = raw.run.mu.unwrap_or(DEFAULT_MU);
    let algorithms = raw
        .algorithm
        .iter()
        .map(|(name, alg)| alg.resolve(name, mu))
        .collect::<Result<Vec<_>, _>>()?;

    let noise = AlphaStableParams {
        alpha: raw.noise.alpha.unwrap_or(1.2),
        beta: raw.noise.beta.unwrap_or(0.0),
        gamma: raw.noise.gamma.unwrap_or(1.0),
        delta: raw.noise.delta.unwrap_or(0.0),
    };
    let config = SimConfig {
        n_taps: raw.channel.n_taps.unwrap_or(128),
        sparsity: raw.channel.sparsity.unwrap_or(8),
        n_iterations: raw.run.iterations.unwrap_or(DEFAULT_ITERATIONS),
        n_trials: raw.run.trials.unwrap_or(DEFAULT_TRIALS),
        snr_db: raw.noise.snr_db.unwrap_or(10.0),
        noise,
        snr_scaling: raw.noise.snr_scaling.unwrap_or_default(),
        input: raw.channel.input.unwrap_or_default(),
        algorithms,
        master_seed: raw.run.seed.unwrap_or(DEFAULT_SEED),
        noiseless: false,
    };
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(ConfigError::Invalid(format!("run.mu = {mu} must be positive and finite")));
    }
    config.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(config)
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

/// The template parsed into a configuration.
pub fn default_config() -> SimConfig {
    parse_config_str(TEMPLATE).expect("built-in template is valid")
}

/// Renders a configuration back to text that [`parse_config_str`] accepts.
/// Penalty strengths are written as `rho`.
pub fn to_config_string(config: &SimConfig) -> String {
    let mut out = String::new();
    let input = match config.input {
        InputKind::Gaussian => "gaussian",
        InputKind::Binary => "binary",
    };
    let scaling = match config.snr_scaling {
        SnrScaling::Noise => "noise",
        SnrScaling::Input => "input",
    };
    // `{:?}` on f64 prints the shortest round-trip representation.
    let _ = write!(
        out,
        "[channel]\nn_taps = {}\nsparsity = {}\ninput = \"{input}\"\n\n\
         [noise]\nalpha = {:?}\nbeta = {:?}\ngamma = {:?}\ndelta = {:?}\nsnr_db = {:?}\nsnr_scaling = \"{scaling}\"\n\n\
         [run]\niterations = {}\ntrials = {}\nseed = {}\n",
        config.n_taps,
        config.sparsity,
        config.noise.alpha,
        config.noise.beta,
        config.noise.gamma,
        config.noise.delta,
        config.snr_db,
        config.n_iterations,
        config.n_trials,
        config.master_seed,
    );
    for spec in &config.algorithms {
        let _ = write!(out, "\n[algorithm.{}]\nmu = {:?}\n", spec.name(), spec.mu);
        let _ = match spec.penalty {
            Penalty::None => Ok(()),
            Penalty::Za { rho } => writeln!(out, "rho = {rho:?}"),
            Penalty::Rza { rho, eps } => writeln!(out, "rho = {rho:?}\neps = {eps:?}"),
            Penalty::Rl1 { rho, delta } => writeln!(out, "rho = {rho:?}\ndelta = {delta:?}"),
            Penalty::Lp { rho, eps, p } => writeln!(out, "rho = {rho:?}\neps = {eps:?}\np = {p:?}"),
        };
    }
    out
}
