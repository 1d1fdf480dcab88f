//! Fixtures shared by the benchmarks.

use hualab_core::{BetaParam, Configuration, ModelParams};

/// `n` ordered points spread over `[-2, 2]`.
pub fn spread(n: usize) -> Configuration {
    Configuration::new((0..n).map(|j| -2.0 + 4.0 * (j as f64 + 0.5) / n as f64).collect())
}

pub fn params(n: usize, beta: f64) -> ModelParams {
    ModelParams::new(n, 1.0, 0.5, BetaParam::finite(beta).expect("positive beta")).expect("valid parameters")
}
