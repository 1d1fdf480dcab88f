//! Limiting moment flow, Cauchy-transform PDE, freezing-CLT covariances and
//! the Monte Carlo checks tying them to finite systems.

mod clt;
mod covariance;
mod moments;

pub use clt::{
    finite_n_moment_flow_check, mc_freezing_test, CltReport, FiniteNConfig, FiniteNReport, MomentStart, MC_BURN_IN,
    MC_CHAINS, MC_THIN,
};
pub use covariance::{
    build_covariances, clt_eigenvalues, clt_eigenvectors, det_s_closed_form, eigenvector_structure_check,
    CovarianceSet, SPECTRUM_TOL,
};
pub use moments::{
    carleman_bound, cauchy_pde_residual, default_probes, integrate_moments, integrate_moments_path, moment_rhs,
    MomentSequence, MOMENT_DT,
};
