//! LMS and sign-LMS adaptive filters with sparsity-inducing zero attractors.
//!
//! Every rule has the form
//!
//! ```text
//! w(n+1) = w(n) + g(n) − a(n)
//! g(n)   = μ e(n) x(n)          gradient family (LMS)
//!        = μ sgn(e(n)) x(n)     sign family (SLMS)
//! ```
//!
//! where `a(n)` is the elementwise zero attractor of the chosen penalty:
//!
//! | penalty | attractor `a_i`                                     |
//! |---------|-----------------------------------------------------|
//! | none    | 0                                                   |
//! | ZA      | ρ sgn(w_i)                                          |
//! | RZA     | ρ sgn(w_i) / (1 + ε\|w_i\|)                          |
//! | RL1     | ρ sgn(w_i) / (δ + \|w_prev_i\|)                      |
//! | LP      | ρ ‖w‖_p^(1−p) sgn(w_i) / (ε + \|w_i\|^(1−p))          |
//!
//! `sgn(0) = 0` throughout, so exact zeros stay zero under the attractor.
//! The estimate starts at `w(0) = 0` and the RL1 reweighting uses
//! `w(−1) = 0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Step size used throughout the reference experiments.
pub const DEFAULT_MU: f64 = 0.005;
pub const DEFAULT_RHO_ZA: f64 = 2e-4;
pub const DEFAULT_RHO_RZA: f64 = 2e-3;
pub const DEFAULT_EPS_RZA: f64 = 20.0;
pub const DEFAULT_RHO_RL1: f64 = 5e-5;
pub const DEFAULT_DELTA_RL1: f64 = 0.05;
pub const DEFAULT_RHO_LP: f64 = 5e-6;
pub const DEFAULT_EPS_LP: f64 = 0.05;
pub const DEFAULT_P: f64 = 0.5;

/// Three-valued sign: `1` for positive, `-1` for negative, `0` for zero.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Elementwise [`sgn`].
pub fn sign(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| sgn(x)).collect()
}

/// How the instantaneous error enters the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// LMS: `μ e(n) x(n)`.
    Gradient,
    /// Sign LMS: `μ sgn(e(n)) x(n)`.
    Sign,
}

/// Penalty kind without its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PenaltyKind {
    None,
    Za,
    Rza,
    Rl1,
    Lp,
}

impl PenaltyKind {
    pub const ALL: [PenaltyKind; 5] = [
        PenaltyKind::None,
        PenaltyKind::Za,
        PenaltyKind::Rza,
        PenaltyKind::Rl1,
        PenaltyKind::Lp,
    ];

    pub fn suffix(self) -> Option<&'static str> {
        match self {
            PenaltyKind::None => None,
            PenaltyKind::Za => Some("za"),
            PenaltyKind::Rza => Some("rza"),
            PenaltyKind::Rl1 => Some("rl1"),
            PenaltyKind::Lp => Some("lp"),
        }
    }

    /// The penalty with its reference hyperparameters.
    pub fn with_defaults(self) -> Penalty {
        match self {
            PenaltyKind::None => Penalty::None,
            PenaltyKind::Za => Penalty::Za { rho: DEFAULT_RHO_ZA },
            PenaltyKind::Rza => Penalty::Rza {
                rho: DEFAULT_RHO_RZA,
                eps: DEFAULT_EPS_RZA,
            },
            PenaltyKind::Rl1 => Penalty::Rl1 {
                rho: DEFAULT_RHO_RL1,
                delta: DEFAULT_DELTA_RL1,
            },
            PenaltyKind::Lp => Penalty::Lp {
                rho: DEFAULT_RHO_LP,
                eps: DEFAULT_EPS_LP,
                p: DEFAULT_P,
            },
        }
    }
}

/// Sparsity penalty with its attractor coefficient and shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    None,
    /// ℓ1 norm.
    Za { rho: f64 },
    /// Log-sum `Σ log(1 + eps |w_i|)`.
    Rza { rho: f64, eps: f64 },
    /// ℓ1 norm reweighted by `1 / (delta + |w_prev_i|)`.
    Rl1 { rho: f64, delta: f64 },
    /// ℓp quasi-norm, `0 < p < 1`.
    Lp { rho: f64, eps: f64, p: f64 },
}

impl Penalty {
    pub fn kind(&self) -> PenaltyKind {
        match self {
            Penalty::None => PenaltyKind::None,
            Penalty::Za { .. } => PenaltyKind::Za,
            Penalty::Rza { .. } => PenaltyKind::Rza,
            Penalty::Rl1 { .. } => PenaltyKind::Rl1,
            Penalty::Lp { .. } => PenaltyKind::Lp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, v, "must be non-negative and finite"))
            }
        };
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, v, "must be positive and finite"))
            }
        };
        match *self {
            Penalty::None => Ok(()),
            Penalty::Za { rho } => nonneg("rho_za", rho),
            Penalty::Rza { rho, eps } => {
                nonneg("rho_rza", rho)?;
                positive("eps_rza", eps)
            }
            Penalty::Rl1 { rho, delta } => {
                nonneg("rho_rl1", rho)?;
                positive("delta_rl1", delta)
            }
            Penalty::Lp { rho, eps, p } => {
                nonneg("rho_lp", rho)?;
                positive("eps_lp", eps)?;
                if p > 0.0 && p < 1.0 {
                    Ok(())
                } else {
                    Err(Error::param("p", p, "must lie in (0, 1)"))
                }
            }
        }
    }

    /// Weight `c` such that the attractor equals `c` times the gradient of
    /// [`Penalty::value`] (for LP, in the `eps -> 0` limit).
    pub fn gradient_scale(&self) -> f64 {
        match *self {
            Penalty::None => 0.0,
            Penalty::Za { rho } | Penalty::Rl1 { rho, .. } | Penalty::Lp { rho, .. } => rho,
            Penalty::Rza { rho, eps } => rho / eps,
        }
    }

    /// Penalty function at `w`. For RL1 the reweighting vector is frozen at
    /// `1 / (delta + |w_prev|)`; the other penalties ignore `w_prev`.
    pub fn value(&self, w: &[f64], w_prev: &[f64]) -> f64 {
        match *self {
            Penalty::None => 0.0,
            Penalty::Za { .. } => w.iter().map(|v| v.abs()).sum(),
            Penalty::Rza { eps, .. } => w.iter().map(|v| (eps * v.abs()).ln_1p()).sum(),
            Penalty::Rl1 { delta, .. } => w
                .iter()
                .zip(w_prev)
                .map(|(v, prev)| v.abs() / (delta + prev.abs()))
                .sum(),
            Penalty::Lp { p, .. } => p_norm(w, p),
        }
    }

    /// Writes the attractor term `a(n)` into `out`.
    pub fn attractor_into(&self, w: &[f64], w_prev: &[f64], out: &mut [f64]) {
        let scale = self.lp_scale(w);
        for ((o, &v), &prev) in out.iter_mut().zip(w).zip(w_prev) {
            *o = self.attractor_at(v, prev, scale);
        }
    }

    /// `rho * ‖w‖_p^(1-p)` for LP, unused otherwise.
    fn lp_scale(&self, w: &[f64]) -> f64 {
        match *self {
            Penalty::Lp { rho, p, .. } => rho * p_norm(w, p).powf(1.0 - p),
            _ => 0.0,
        }
    }

    /// Attractor on one coefficient `v` whose previous value was `prev`.
    #[inline]
    fn attractor_at(&self, v: f64, prev: f64, lp_scale: f64) -> f64 {
        if v == 0.0 {
            return 0.0;
        }
        match *self {
            Penalty::None => 0.0,
            Penalty::Za { rho } => rho * sgn(v),
            Penalty::Rza { rho, eps } => rho * sgn(v) / (1.0 + eps * v.abs()),
            Penalty::Rl1 { rho, delta } => rho * sgn(v) / (delta + prev.abs()),
            Penalty::Lp { eps, p, .. } => lp_scale * sgn(v) / (eps + v.abs().powf(1.0 - p)),
        }
    }

    pub fn attractor(&self, w: &[f64], w_prev: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; w.len()];
        self.attractor_into(w, w_prev, &mut out);
        out
    }
}

/// `(Σ |w_i|^p)^(1/p)`.
pub fn p_norm(w: &[f64], p: f64) -> f64 {
    let s: f64 = w.iter().map(|v| v.abs().powf(p)).sum();
    if s == 0.0 {
        0.0
    } else {
        s.powf(1.0 / p)
    }
}

/// One of the ten update rules: a family, a penalty and a step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmSpec {
    pub family: Family,
    pub penalty: Penalty,
    pub mu: f64,
}

impl AlgorithmSpec {
    pub fn new(family: Family, penalty: Penalty, mu: f64) -> Result<Self> {
        let spec = Self { family, penalty, mu };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the named rule with reference hyperparameters.
    pub fn from_name(name: &str) -> Result<Self> {
        let id: AlgorithmId = name.parse()?;
        Ok(id.with_defaults())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::param("mu", self.mu, "must be positive and finite"));
        }
        self.penalty.validate()
    }

    pub fn id(&self) -> AlgorithmId {
        AlgorithmId {
            family: self.family,
            penalty: self.penalty.kind(),
        }
    }

    /// Wire name such as `slms-rza`.
    pub fn name(&self) -> String {
        self.id().to_string()
    }
}

/// Family and penalty kind; the identity carried by wire names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgorithmId {
    pub family: Family,
    pub penalty: PenaltyKind,
}

impl AlgorithmId {
    /// All ten rules, LMS variants first.
    pub fn all() -> Vec<AlgorithmId> {
        [Family::Gradient, Family::Sign]
            .into_iter()
            .flat_map(|family| PenaltyKind::ALL.into_iter().map(move |penalty| AlgorithmId { family, penalty }))
            .collect()
    }

    pub fn with_defaults(self) -> AlgorithmSpec {
        AlgorithmSpec {
            family: self.family,
            penalty: self.penalty.with_defaults(),
            mu: DEFAULT_MU,
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.family {
            Family::Gradient => "lms",
            Family::Sign => "slms",
        };
        match self.penalty.suffix() {
            Some(s) => write!(f, "{base}-{s}"),
            None => f.write_str(base),
        }
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, suffix) = match s.split_once('-') {
            Some((b, p)) => (b, Some(p)),
            None => (s, None),
        };
        let family = match base {
            "lms" => Family::Gradient,
            "slms" => Family::Sign,
            _ => return Err(Error::UnknownAlgorithm(s.to_string())),
        };
        let penalty = PenaltyKind::ALL
            .into_iter()
            .find(|k| k.suffix() == suffix)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))?;
        Ok(AlgorithmId { family, penalty })
    }
}

/// Running estimate `w(n)`, the previous estimate `w(n-1)` and the
/// iteration counter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    w: Vec<f64>,
    w_prev: Vec<f64>,
    n: u64,
}

impl FilterState {
    /// Zero-initialized state of length `n_taps`.
    pub fn new(n_taps: usize) -> Self {
        Self {
            w: vec![0.0; n_taps],
            w_prev: vec![0.0; n_taps],
            n: 0,
        }
    }

    pub fn from_parts(w: Vec<f64>, w_prev: Vec<f64>, n: u64) -> Result<Self> {
        if w.len() != w_prev.len() {
            return Err(Error::Dimension {
                expected: w.len(),
                found: w_prev.len(),
            });
        }
        if let Some(bad) = w.iter().chain(&w_prev).find(|v| !v.is_finite()) {
            return Err(Error::param("w", *bad, "must be finite"));
        }
        Ok(Self { w, w_prev, n })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn w_prev(&self) -> &[f64] {
        &self.w_prev
    }

    pub fn iteration(&self) -> u64 {
        self.n
    }

    pub fn n_taps(&self) -> usize {
        self.w.len()
    }

    /// Estimation error vector `truth - w(n)`.
    pub fn deviation(&self, truth: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.w.len(), truth.len())?;
        Ok(truth.iter().zip(&self.w).map(|(t, w)| t - w).collect())
    }

    /// Advances by one sample in place, reusing the state's buffers.
    ///
    /// On a divergence error the coefficients are left in an unspecified
    /// (but allocated) state and the filter should be discarded.
    pub fn advance(&mut self, spec: &AlgorithmSpec, x: &[f64], d: f64) -> Result<()> {
        check_dim(self.w.len(), x.len())?;
        let e = d - dot(&self.w, x);
        let g = match spec.family {
            Family::Gradient => spec.mu * e,
            Family::Sign => spec.mu * sgn(e),
        };
        let penalty = spec.penalty;
        let scale = penalty.lp_scale(&self.w);
        let mut finite = true;
        for ((v, prev), &xi) in self.w.iter_mut().zip(self.w_prev.iter_mut()).zip(x) {
            let next = *v + g * xi - penalty.attractor_at(*v, *prev, scale);
            finite &= next.is_finite();
            *prev = *v;
            *v = next;
        }
        let iteration = self.n;
        self.n += 1;
        if finite {
            Ok(())
        } else {
            Err(Error::Divergence { iteration })
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Filter output `y(n) = w(n)ᵀ x(n)`.
pub fn predict(state: &FilterState, x: &[f64]) -> Result<f64> {
    check_dim(state.w.len(), x.len())?;
    Ok(dot(&state.w, x))
}

/// A-priori error `e(n) = d(n) - y(n)`.
pub fn error(desired: f64, state: &FilterState, x: &[f64]) -> Result<f64> {
    Ok(desired - predict(state, x)?)
}

/// Applies one update of `spec` and returns the new state.
pub fn step(spec: &AlgorithmSpec, state: &FilterState, x: &[f64], d: f64) -> Result<FilterState> {
    spec.validate()?;
    let mut next = state.clone();
    next.advance(spec, x, d)?;
    Ok(next)
}

/// Penalty term alone, see [`Penalty::value`].
pub fn penalty_value(spec: &AlgorithmSpec, w: &[f64], w_prev: &[f64]) -> f64 {
    spec.penalty.value(w, w_prev)
}
