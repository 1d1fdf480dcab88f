//! Parameters, configurations and trajectories.

mod symmetric;

pub use symmetric::{
    elementary_symmetric, elementary_symmetric_all, elementary_symmetric_excluding,
    power_sum, stieltjes_power_identity_residual, symmetric_identity_residuals,
    IdentityResiduals, MIN_IDENTITY_GAP,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse temperature. `Frozen` stands for β = ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaParam {
    Finite(f64),
    Frozen,
}

impl BetaParam {
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 1.0 {
            return Err(Error::OutOfRegime(format!(
                "beta must be a finite value >= 1, got {value}"
            )));
        }
        Ok(BetaParam::Finite(value))
    }

    pub fn is_frozen(&self) -> bool {
        matches!(self, BetaParam::Frozen)
    }

    /// 1/β, which is exactly zero in the frozen case.
    pub fn inverse(&self) -> f64 {
        match self {
            BetaParam::Finite(v) => 1.0 / v,
            BetaParam::Frozen => 0.0,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            BetaParam::Finite(v) => Some(*v),
            BetaParam::Frozen => None,
        }
    }
}

impl std::fmt::Display for BetaParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaParam::Finite(v) => write!(f, "{v}"),
            BetaParam::Frozen => write!(f, "inf"),
        }
    }
}

/// Model parameters `(N, a, b, β)` of the Hua-Pickrell dynamics.
///
/// `a` and `b` are in the dynamics convention. The pseudo-Jacobi parameter of
/// the stationary polynomial is obtained with [`ModelParams::stationary_pj_a`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_particles: usize,
    pub a: f64,
    pub b: f64,
    pub beta: BetaParam,
}

impl ModelParams {
    pub fn new(n_particles: usize, a: f64, b: f64, beta: BetaParam) -> Result<Self> {
        if n_particles < 1 {
            return Err(Error::InvalidArgument("need at least one particle".into()));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "a and b must be finite, got a={a}, b={b}"
            )));
        }
        if let BetaParam::Finite(v) = beta {
            BetaParam::finite(v)?;
        }
        Ok(Self {
            n_particles,
            a,
            b,
            beta,
        })
    }

    pub fn frozen(n_particles: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(n_particles, a, b, BetaParam::Frozen)
    }

    pub fn with_beta(self, beta: BetaParam) -> Self {
        Self { beta, ..self }
    }

    /// Pseudo-Jacobi parameter `-(N + a)` whose degree-N polynomial has the
    /// stationary configuration of the frozen flow as its zeros.
    pub fn stationary_pj_a(&self) -> f64 {
        stationary_pj_a(self.n_particles, self.a)
    }
}

/// The single conversion from the dynamics parameter `a` to the
/// pseudo-Jacobi parameter `ã = -(N + a)`.
pub fn stationary_pj_a(n_particles: usize, a: f64) -> f64 {
    -(n_particles as f64 + a)
}

/// Particle positions `x_1, ..., x_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub coords: Vec<f64>,
}

impl Configuration {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_ordered(&self, strict: bool) -> bool {
        is_ordered(&self.coords, strict)
    }

    /// Smallest gap between neighbours, `+inf` for fewer than two particles.
    pub fn min_gap(&self) -> f64 {
        min_gap(&self.coords)
    }

    /// `(-x_N, ..., -x_1)`.
    pub fn reflected(&self) -> Self {
        Self::new(self.coords.iter().rev().map(|x| -x).collect())
    }
}

impl From<Vec<f64>> for Configuration {
    fn from(coords: Vec<f64>) -> Self {
        Self::new(coords)
    }
}

/// Membership in the closed Weyl chamber (or its interior when `strict`).
/// Comparisons are exact.
pub fn validate_configuration(c: &Configuration, strict: bool) -> bool {
    c.is_ordered(strict)
}

pub(crate) fn is_ordered(x: &[f64], strict: bool) -> bool {
    x.iter().all(|v| !v.is_nan())
        && x.windows(2).all(|w| if strict { w[0] < w[1] } else { w[0] <= w[1] })
}

pub(crate) fn min_gap(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// First pair of (sorted) coordinates closer than `tol`.
pub(crate) fn check_separated(x: &[f64], tol: f64) -> Result<()> {
    for (i, w) in x.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if gap.is_nan() || gap.abs() <= tol {
            return Err(Error::Collision { i, j: i + 1, gap });
        }
    }
    Ok(())
}

/// Distinctness check for possibly unsorted inputs.
pub(crate) fn check_distinct(x: &[f64], tol: f64) -> Result<()> {
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let gap = (x[i] - x[j]).abs();
            if gap.is_nan() || gap <= tol {
                return Err(Error::Collision { i, j, gap });
            }
        }
    }
    Ok(())
}

/// Time-indexed sequence of configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Configuration>,
    pub params: ModelParams,
    /// Zero for deterministic runs.
    pub seed: u64,
}

impl Trajectory {
    pub fn new(params: ModelParams, seed: u64) -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            params,
            seed,
        }
    }

    pub fn push(&mut self, t: f64, state: Configuration) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &Configuration)> {
        self.times.last().copied().zip(self.states.last())
    }

    /// Checks the trajectory invariants: increasing times, ordered states,
    /// strictly ordered after the initial time.
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.states.len() {
            return Err(Error::Integrity("times and states differ in length".into()));
        }
        if !self.times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Integrity("times are not strictly increasing".into()));
        }
        for (k, s) in self.states.iter().enumerate() {
            if !s.is_ordered(k > 0) {
                return Err(Error::Integrity(format!("state {k} leaves the chamber")));
            }
        }
        Ok(())
    }
}
