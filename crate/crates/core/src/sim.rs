//! Seeded Monte-Carlo experiments producing averaged MSE learning curves.
//!
//! Trial `m` derives one seed from `(master_seed, m)`; that seed fixes the
//! channel, the training sequence and the noise stream, and every algorithm
//! of the experiment is run on the same realization. Per-iteration squared
//! errors are summed in trial-index order once a batch of trials finishes,
//! so results are bit-identical for any degree of parallelism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{generate_channel, generate_input_kind, InputKind, SparseChannel, TrainingSignal};
use crate::error::{Error, Result};
use crate::filter::{AlgorithmSpec, FilterState};
use crate::noise::{AlphaStable, AlphaStableParams};

/// Lower clamp applied to every dB value.
pub const MSE_FLOOR_DB: f64 = -100.0;

/// Default number of filter iterations per trial.
pub const DEFAULT_ITERATIONS: usize = 3000;

/// Trials processed per parallel batch before accumulation.
const BATCH: usize = 64;

const CHANNEL_STREAM: u64 = 0;
const INPUT_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// How the received SNR is realized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrScaling {
    /// Unit-power training sequence; noise dispersion divided by `P0`.
    #[default]
    Noise,
    /// Training sequence of power `P0`; noise used as configured.
    Input,
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_taps: usize,
    pub sparsity: usize,
    pub n_iterations: usize,
    pub n_trials: usize,
    pub snr_db: f64,
    pub noise: AlphaStableParams,
    pub snr_scaling: SnrScaling,
    pub input: InputKind,
    pub algorithms: Vec<AlgorithmSpec>,
    pub master_seed: u64,
    /// Test hook: drop the additive noise entirely.
    pub noiseless: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_taps == 0 {
            return Err(Error::param("n_taps", 0.0, "must be at least 1"));
        }
        if self.sparsity == 0 || self.sparsity > self.n_taps {
            return Err(Error::param("sparsity", self.sparsity as f64, "must lie in [1, n_taps]"));
        }
        if self.n_iterations == 0 {
            return Err(Error::param("iterations", 0.0, "must be at least 1"));
        }
        if self.n_trials == 0 {
            return Err(Error::param("trials", 0.0, "must be at least 1"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::param("snr_db", self.snr_db, "must be finite"));
        }
        self.noise.validate()?;
        if self.algorithms.is_empty() {
            return Err(Error::Invalid("no algorithms selected".into()));
        }
        for (i, spec) in self.algorithms.iter().enumerate() {
            spec.validate()?;
            if self.algorithms[..i].iter().any(|other| other.name() == spec.name()) {
                return Err(Error::Invalid(format!("algorithm `{}` listed twice", spec.name())));
            }
        }
        Ok(())
    }
}

/// Training-signal power `P0` implied by the configured SNR.
///
/// For Gaussian noise (`alpha = 2`) the variance is `2 gamma` and
/// `P0 = 2 gamma 10^(snr/10)`. Below `alpha = 2` the variance is infinite
/// and the dispersion stands in for it: `P0 = gamma 10^(snr/10)`.
pub fn apply_snr(config: &SimConfig) -> f64 {
    let ratio = 10f64.powf(config.snr_db / 10.0);
    let noise_power = if config.noise.is_gaussian() {
        2.0 * config.noise.gamma
    } else {
        config.noise.gamma
    };
    noise_power * ratio
}

/// Training power and noise law actually used by a trial.
pub fn trial_levels(config: &SimConfig) -> Result<(f64, AlphaStableParams)> {
    let p0 = apply_snr(config);
    match config.snr_scaling {
        SnrScaling::Input => Ok((p0, config.noise)),
        SnrScaling::Noise => Ok((1.0, config.noise.with_gamma(config.noise.gamma / p0)?)),
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index`; independent of the algorithm.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// The random triple shared by every algorithm within one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub channel: SparseChannel,
    pub input: TrainingSignal,
    pub noise: Vec<f64>,
}

impl Realization {
    pub fn generate(config: &SimConfig, seed: u64) -> Result<Self> {
        let (power, law) = trial_levels(config)?;
        let channel = generate_channel(config.n_taps, config.sparsity, &mut stream(seed, CHANNEL_STREAM))?;
        let input = generate_input_kind(config.input, config.n_iterations, power, &mut stream(seed, INPUT_STREAM))?;
        let noise = if config.noiseless {
            vec![0.0; config.n_iterations]
        } else {
            let dist = AlphaStable::new(law)?;
            let mut rng = stream(seed, NOISE_STREAM);
            (0..config.n_iterations).map(|_| dist.sample(&mut rng)).collect()
        };
        Ok(Self { channel, input, noise })
    }

    /// Received samples `d(n) = wᵀ x(n) + z(n)`.
    pub fn desired(&self) -> Vec<f64> {
        let w = self.channel.taps();
        let x = self.input.samples();
        (0..x.len())
            .map(|n| {
                let clean: f64 = w.iter().enumerate().take(n + 1).map(|(k, wk)| wk * x[n - k]).sum();
                clean + self.noise[n]
            })
            .collect()
    }

    /// Runs `spec` over the whole realization.
    pub fn run(&self, spec: &AlgorithmSpec) -> TrialResult {
        let truth = self.channel.taps();
        let norm_sq = self.channel.norm_sq();
        let samples = self.input.samples();
        let mut state = FilterState::new(truth.len());
        let mut x = vec![0.0; truth.len()];
        let mut errors = Vec::with_capacity(samples.len());
        for (n, (&s, d)) in samples.iter().zip(self.desired()).enumerate() {
            // Delay line, most recent sample first.
            x.rotate_right(1);
            x[0] = s;
            if let Err(Error::Divergence { iteration }) = state.advance(spec, &x, d) {
                return TrialResult::Diverged { iteration };
            }
            debug_assert_eq!(state.iteration(), n as u64 + 1);
            let err: f64 = state.w().iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum();
            // Coefficients near 1e154 are still finite but their squared
            // error is not; such a trial is as lost as one that hit NaN.
            if !err.is_finite() {
                return TrialResult::Diverged { iteration: n as u64 };
            }
            errors.push(err / norm_sq);
        }
        TrialResult::Completed(errors)
    }
}

/// Outcome of one trial of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialResult {
    /// Normalized squared error `‖w(n) − w‖² / ‖w‖²` after each update.
    Completed(Vec<f64>),
    Diverged { iteration: u64 },
}

impl TrialResult {
    pub fn errors(&self) -> Option<&[f64]> {
        match self {
            TrialResult::Completed(e) => Some(e),
            TrialResult::Diverged { .. } => None,
        }
    }
}

/// Runs one algorithm on the realization drawn from `trial_seed`.
pub fn run_trial(config: &SimConfig, spec: &AlgorithmSpec, trial_seed: u64) -> Result<TrialResult> {
    config.validate()?;
    spec.validate()?;
    Ok(Realization::generate(config, trial_seed)?.run(spec))
}

/// `10 log10` with the −100 dB floor.
pub fn to_db(ratio: f64) -> f64 {
    let db = 10.0 * ratio.log10();
    if db.is_nan() || db < MSE_FLOOR_DB {
        MSE_FLOOR_DB
    } else {
        db
    }
}

/// Trial-averaged normalized squared error of `estimates` against `truth`,
/// in dB.
pub fn mse_db(estimates: &[Vec<f64>], truth: &[f64]) -> Result<f64> {
    let norm_sq: f64 = truth.iter().map(|v| v * v).sum();
    if !(norm_sq > 0.0) {
        return Err(Error::param("truth", norm_sq.sqrt(), "must have nonzero norm"));
    }
    if estimates.is_empty() {
        return Err(Error::param("estimates", 0.0, "need at least one estimate"));
    }
    let mut total = 0.0;
    for est in estimates {
        if est.len() != truth.len() {
            return Err(Error::Dimension {
                expected: truth.len(),
                found: est.len(),
            });
        }
        total += est.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / norm_sq;
    }
    Ok(to_db(total / estimates.len() as f64))
}

/// Averaged learning curve of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub algorithm: String,
    /// One entry per iteration; empty when every trial diverged.
    pub mse_db: Vec<f64>,
    pub trials_completed: usize,
    pub trials_diverged: usize,
}

impl LearningCurve {
    pub fn all_diverged(&self) -> bool {
        self.trials_completed == 0
    }

    /// Mean dB value over the last `fraction` of iterations.
    pub fn tail_mean_db(&self, fraction: f64) -> Option<f64> {
        if self.mse_db.is_empty() {
            return None;
        }
        let k = ((self.mse_db.len() as f64 * fraction).ceil() as usize).clamp(1, self.mse_db.len());
        let tail = &self.mse_db[self.mse_db.len() - k..];
        Some(tail.iter().sum::<f64>() / k as f64)
    }
}

/// Worker count for [`run_experiment_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Parallelism {
    /// Rayon's global pool.
    #[default]
    Auto,
    Threads(usize),
}

/// Runs every configured algorithm over `n_trials` paired realizations.
pub fn run_experiment(config: &SimConfig) -> Result<Vec<LearningCurve>> {
    run_experiment_with(config, Parallelism::Auto)
}

pub fn run_experiment_with(config: &SimConfig, parallelism: Parallelism) -> Result<Vec<LearningCurve>> {
    config.validate()?;
    match parallelism {
        Parallelism::Auto => aggregate(config),
        Parallelism::Threads(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?
            .install(|| aggregate(config)),
    }
}

fn aggregate(config: &SimConfig) -> Result<Vec<LearningCurve>> {
    let n_algs = config.algorithms.len();
    let mut sums = vec![vec![0.0f64; config.n_iterations]; n_algs];
    let mut completed = vec![0usize; n_algs];
    let mut diverged = vec![0usize; n_algs];

    let indices: Vec<u64> = (0..config.n_trials as u64).collect();
    for batch in indices.chunks(BATCH) {
        let results = batch
            .par_iter()
            .map(|&m| {
                let real = Realization::generate(config, trial_seed(config.master_seed, m))?;
                Ok(config.algorithms.iter().map(|spec| real.run(spec)).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        for per_trial in &results {
            for (a, result) in per_trial.iter().enumerate() {
                match result {
                    TrialResult::Completed(errors) => {
                        sums[a].iter_mut().zip(errors).for_each(|(s, e)| *s += e);
                        completed[a] += 1;
                    }
                    TrialResult::Diverged { .. } => diverged[a] += 1,
                }
            }
        }
    }

    Ok(config
        .algorithms
        .iter()
        .enumerate()
        .map(|(a, spec)| {
            let mse_db = if completed[a] == 0 {
                Vec::new()
            } else {
                let m = completed[a] as f64;
                sums[a].iter().map(|s| to_db(s / m)).collect()
            };
            LearningCurve {
                algorithm: spec.name(),
                mse_db,
                trials_completed: completed[a],
                trials_diverged: diverged[a],
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{AlgorithmId, Family, Penalty};

    fn config() -> SimConfig {
        SimConfig {
            n_taps: 16,
            sparsity: 2,
            n_iterations: 200,
            n_trials: 3,
            snr_db: 10.0,
            noise: AlphaStableParams::symmetric(1.2, 1.0).unwrap(),
            snr_scaling: SnrScaling::Noise,
            input: InputKind::Gaussian,
            algorithms: vec![AlgorithmSpec::from_name("slms").unwrap()],
            master_seed: 7,
            noiseless: false,
        }
    }

    #[test]
    fn snr_power_examples() {
        let mut c = config();
        c.noise = AlphaStableParams::symmetric(2.0, 1.0).unwrap();
        assert!((apply_snr(&c) - 20.0).abs() < 1e-12);
        c.snr_db = 0.0;
        assert_eq!(apply_snr(&c), 2.0);
        c.noise = AlphaStableParams::symmetric(1.2, 1.0).unwrap();
        c.snr_db = 10.0;
        assert!((apply_snr(&c) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn noise_scaling_keeps_the_ratio() {
        let mut c = config();
        let (power, law) = trial_levels(&c).unwrap();
        assert_eq!(power, 1.0);
        assert!((law.gamma - 0.1).abs() < 1e-15);
        c.snr_scaling = SnrScaling::Input;
        let (power, law) = trial_levels(&c).unwrap();
        assert!((power - 10.0).abs() < 1e-12);
        assert_eq!(law.gamma, 1.0);
    }

    #[test]
    fn mse_db_examples() {
        let truth = vec![0.6, 0.0, -0.8];
        assert_eq!(mse_db(&[vec![0.0; 3]], &truth).unwrap(), 0.0);
        assert_eq!(mse_db(&[truth.clone()], &truth).unwrap(), MSE_FLOOR_DB);
        let half: Vec<f64> = truth.iter().map(|v| v / 2.0).collect();
        let more: Vec<f64> = truth.iter().map(|v| v * 1.5).collect();
        let got = mse_db(&[half, more], &truth).unwrap();
        assert!((got - 10.0 * 0.25f64.log10()).abs() < 1e-12, "{got}");
        assert!((got + 6.020599913279624).abs() < 1e-12);
        assert!(mse_db(&[vec![0.0; 3]], &[0.0; 3]).is_err());
        assert!(mse_db(&[vec![0.0; 2]], &truth).is_err());
    }

    #[test]
    fn trial_is_deterministic() {
        let c = config();
        let spec = AlgorithmSpec::from_name("slms-za").unwrap();
        assert_eq!(run_trial(&c, &spec, 99).unwrap(), run_trial(&c, &spec, 99).unwrap());
        assert_ne!(run_trial(&c, &spec, 99).unwrap(), run_trial(&c, &spec, 100).unwrap());
    }

    #[test]
    fn zero_iterations_rejected() {
        let mut c = config();
        c.n_iterations = 0;
        assert!(run_trial(&c, &c.algorithms[0].clone(), 1).is_err());
        c.n_iterations = 10;
        c.n_trials = 0;
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn duplicate_algorithms_rejected() {
        let mut c = config();
        c.algorithms.push(AlgorithmSpec::from_name("slms").unwrap());
        assert!(matches!(c.validate(), Err(Error::Invalid(_))));
    }

    #[test]
    fn desired_matches_convolution() {
        let c = config();
        let r = Realization::generate(&c, 5).unwrap();
        let d = r.desired();
        let n = 40;
        let x = crate::channel::regressor(&r.input, n, c.n_taps).unwrap();
        let clean: f64 = r.channel.taps().iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!((d[n] - clean - r.noise[n]).abs() < 1e-12);
    }

    #[test]
    fn divergence_is_excluded_and_counted() {
        let mut c = config();
        c.n_trials = 4;
        c.algorithms = vec![
            AlgorithmSpec::new(Family::Gradient, Penalty::None, 10.0).unwrap(),
            AlgorithmId::all()[5].with_defaults(),
        ];
        let curves = run_experiment(&c).unwrap();
        assert_eq!(curves[0].trials_diverged, 4);
        assert!(curves[0].all_diverged());
        assert!(curves[0].mse_db.is_empty());
        assert_eq!(curves[1].trials_completed, 4);
        assert_eq!(curves[1].mse_db.len(), c.n_iterations);
    }

    #[test]
    fn tail_mean() {
        let curve = LearningCurve {
            algorithm: "slms".into(),
            mse_db: (0..10).map(f64::from).collect(),
            trials_completed: 1,
            trials_diverged: 0,
        };
        assert_eq!(curve.tail_mean_db(0.1), Some(9.0));
        assert_eq!(curve.tail_mean_db(0.2), Some(8.5));
    }
}
