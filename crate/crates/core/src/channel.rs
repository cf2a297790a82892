//! Sparse FIR channel and training sequence generation.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unknown K-sparse channel with unit ℓ2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseChannel {
    taps: Vec<f64>,
    support: Vec<usize>,
}

impl SparseChannel {
    /// Builds a channel from explicit taps. The support is every nonzero
    /// position; no normalization is applied.
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::param("n_taps", 0.0, "must be at least 1"));
        }
        if let Some(bad) = taps.iter().find(|v| !v.is_finite()) {
            return Err(Error::param("tap", *bad, "must be finite"));
        }
        let support = taps
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { taps, support })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Sorted indices of the nonzero taps.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.taps.iter().map(|v| v * v).sum()
    }
}

/// Draws a channel with `sparsity` Gaussian taps at uniformly random
/// distinct positions, scaled to unit norm.
pub fn generate_channel<R: Rng + ?Sized>(n_taps: usize, sparsity: usize, rng: &mut R) -> Result<SparseChannel> {
    if n_taps == 0 {
        return Err(Error::param("n_taps", 0.0, "must be at least 1"));
    }
    if sparsity == 0 || sparsity > n_taps {
        return Err(Error::param("sparsity", sparsity as f64, "must lie in [1, n_taps]"));
    }
    let mut support = index::sample(rng, n_taps, sparsity).into_vec();
    support.sort_unstable();
    let mut taps = vec![0.0; n_taps];
    for &i in &support {
        // An exact zero would silently shrink the support.
        taps[i] = loop {
            let v: f64 = rng.sample(StandardNormal);
            if v != 0.0 {
                break v;
            }
        };
    }
    let norm = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|v| *v /= norm);
    Ok(SparseChannel { taps, support })
}

/// Distribution of the training sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    /// i.i.d. zero-mean Gaussian.
    #[default]
    Gaussian,
    /// i.i.d. equiprobable `±sqrt(power)`.
    Binary,
}

/// Training sequence `x(n)` with its nominal mean-square power.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSignal {
    samples: Vec<f64>,
    power: f64,
}

impl TrainingSignal {
    pub fn new(samples: Vec<f64>, power: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::param("power", power, "must be positive and finite"));
        }
        if samples.is_empty() {
            return Err(Error::param("length", 0.0, "must be at least 1"));
        }
        Ok(Self { samples, power })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Gaussian training sequence with variance `power`.
pub fn generate_input<R: Rng + ?Sized>(length: usize, power: f64, rng: &mut R) -> Result<TrainingSignal> {
    generate_input_kind(InputKind::Gaussian, length, power, rng)
}

pub fn generate_input_kind<R: Rng + ?Sized>(
    kind: InputKind,
    length: usize,
    power: f64,
    rng: &mut R,
) -> Result<TrainingSignal> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::param("power", power, "must be positive and finite"));
    }
    if length == 0 {
        return Err(Error::param("length", 0.0, "must be at least 1"));
    }
    let amp = power.sqrt();
    let samples = match kind {
        InputKind::Gaussian => (0..length)
            .map(|_| amp * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        InputKind::Binary => (0..length)
            .map(|_| if rng.gen::<bool>() { amp } else { -amp })
            .collect(),
    };
    Ok(TrainingSignal { samples, power })
}

/// The delay-line vector `[x(n), x(n-1), ..., x(n-N+1)]`, zero before time 0.
pub fn regressor(signal: &TrainingSignal, n: usize, n_taps: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n_taps];
    regressor_into(signal, n, &mut out)?;
    Ok(out)
}

/// Fills `out` with the regressor at time `n`; its length sets `N`.
pub fn regressor_into(signal: &TrainingSignal, n: usize, out: &mut [f64]) -> Result<()> {
    let s = signal.samples();
    if n >= s.len() {
        return Err(Error::Index { index: n, len: s.len() });
    }
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = if k <= n { s[n - k] } else { 0.0 };
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig(v: &[f64]) -> TrainingSignal {
        TrainingSignal::new(v.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn channel_has_requested_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = generate_channel(128, 8, &mut rng).unwrap();
        assert_eq!(ch.n_taps(), 128);
        assert_eq!(ch.sparsity(), 8);
        assert_eq!(ch.taps().iter().filter(|v| **v != 0.0).count(), 8);
        assert!((ch.norm_sq().sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_tap_channel_is_unit() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ch = generate_channel(1, 1, &mut rng).unwrap();
            assert!(ch.taps() == [1.0] || ch.taps() == [-1.0], "{:?}", ch.taps());
        }
    }

    #[test]
    fn channel_is_deterministic() {
        let a = generate_channel(128, 4, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = generate_channel(128, 4, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn channel_rejects_bad_sparsity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(generate_channel(8, 0, &mut rng).is_err());
        assert!(generate_channel(8, 9, &mut rng).is_err());
        assert!(generate_channel(0, 0, &mut rng).is_err());
    }

    #[test]
    fn gaussian_input_moments() {
        for power in [1.0, 4.0] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let s = generate_input(10_000, power, &mut rng).unwrap();
            let n = s.len() as f64;
            let mean = s.samples().iter().sum::<f64>() / n;
            let ms = s.samples().iter().map(|v| v * v).sum::<f64>() / n;
            assert!(mean.abs() < 0.05 * power.sqrt(), "mean {mean}");
            assert!((ms / power - 1.0).abs() < 0.05, "mean square {ms}");
        }
    }

    #[test]
    fn binary_input_is_constant_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = generate_input_kind(InputKind::Binary, 1000, 4.0, &mut rng).unwrap();
        assert!(s.samples().iter().all(|v| v.abs() == 2.0));
    }

    #[test]
    fn input_is_deterministic() {
        let a = generate_input(100, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = generate_input(100, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn input_rejects_bad_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(generate_input(10, 0.0, &mut rng).is_err());
        assert!(generate_input(10, -1.0, &mut rng).is_err());
        assert!(generate_input(0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn regressor_examples() {
        assert_eq!(regressor(&sig(&[1.0, 2.0, 3.0]), 2, 2).unwrap(), vec![3.0, 2.0]);
        assert_eq!(regressor(&sig(&[1.0, 2.0, 3.0]), 0, 3).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(regressor(&sig(&[5.0]), 0, 1).unwrap(), vec![5.0]);
        assert!(matches!(
            regressor(&sig(&[5.0]), 1, 1),
            Err(Error::Index { index: 1, len: 1 })
        ));
    }
}
