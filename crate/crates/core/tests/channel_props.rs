use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slms_core::channel::{generate_channel, generate_input, regressor, SparseChannel, TrainingSignal};
use slms_core::report::{parse_series_csv, series_to_csv};

proptest! {
    #[test]
    fn channel_support_and_norm((n, k) in (1usize..256).prop_flat_map(|n| (Just(n), 1..=n)), seed in any::<u64>()) {
        let ch = generate_channel(n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(ch.sparsity(), k);
        let nonzero: Vec<usize> = ch.taps().iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect();
        prop_assert_eq!(&nonzero[..], ch.support());
        prop_assert!((ch.norm_sq().sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regressor_shifts_by_one(samples in prop::collection::vec(-10.0f64..10.0, 2..64), n_taps in 1usize..16, at in any::<prop::sample::Index>()) {
        let signal = TrainingSignal::new(samples.clone(), 1.0).unwrap();
        let n = at.index(samples.len() - 1);
        let now = regressor(&signal, n, n_taps).unwrap();
        let next = regressor(&signal, n + 1, n_taps).unwrap();
        prop_assert_eq!(next[0], samples[n + 1]);
        prop_assert_eq!(&next[1..], &now[..n_taps - 1]);
    }

    #[test]
    fn channel_survives_csv(seed in any::<u64>()) {
        let ch = generate_channel(32, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let back = SparseChannel::from_taps(parse_series_csv(&series_to_csv(ch.taps())).unwrap()).unwrap();
        prop_assert_eq!(back, ch);
    }
}

#[test]
fn input_is_reproducible_across_calls() {
    let a = generate_input(10_000, 1.0, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
    let b = generate_input(10_000, 1.0, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
    assert_eq!(a.samples(), b.samples());
}
