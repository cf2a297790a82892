//! Robust sparse adaptive channel estimation.
//!
//! Sign-LMS and LMS filters with zero-attracting (ZA), reweighted
//! zero-attracting (RZA), reweighted ℓ1 (RL1) and ℓp (LP) sparsity penalties,
//! an alpha-stable impulsive-noise generator, a sparse FIR channel model and
//! a seeded Monte-Carlo harness that produces normalized-MSE learning curves.
//!
//! ```
//! use slms_core::filter::{step, AlgorithmSpec, FilterState};
//!
//! let spec = AlgorithmSpec::from_name("slms-za").unwrap();
//! let state = FilterState::new(4);
//! let next = step(&spec, &state, &[1.0, 0.0, 0.0, 0.0], 0.5).unwrap();
//! assert_eq!(next.w()[0], spec.mu);
//! ```

pub mod channel;
pub mod config;
pub mod error;
pub mod filter;
pub mod noise;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
