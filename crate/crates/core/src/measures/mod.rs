//! Hua-Pickrell densities and their normalization, Metropolis sampling,
//! the equilibrium measure and empirical measures.

mod empirical;
mod equilibrium;
mod hua_pickrell;
mod mh;

pub use empirical::{empirical_moments, measure_distance, EmpiricalMeasure, MeasureDistance, DISTANCE_MAX_MOMENT};
pub use equilibrium::{EquilibriumMeasure, EquilibriumSampler, CAUCHY_CONSTANT_SIGN};
pub use hua_pickrell::{
    hp_log_density_unnormalized, hp_log_normalization, potential_v, HuaPickrellMeasure,
};
pub use mh::{mh_sample, MhConfig, MhResult};
