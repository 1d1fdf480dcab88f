use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatResidualReport {
    /// Interior recorded times at which the residual was evaluated.
    pub times: Vec<f64>,
    /// Largest absolute residual over the probe points at each time.
    pub residuals: Vec<f64>,
    pub max: f64,
}

/// `H(z) = Π (z - x_j)` with its first two derivatives.
fn char_poly_derivs(x: &[f64], z: f64) -> (f64, f64, f64) {
    // Horner-like product rule accumulation
    let (mut h, mut h1, mut h2) = (1.0, 0.0, 0.0);
    for &xj in x {
        let f = z - xj;
        h2 = h2 * f + 2.0 * h1;
        h1 = h1 * f + h;
        h *= f;
    }
    (h, h1, h2)
}

/// `-(1+z²) H'' + (-2b + 2(a+N-1) z) H' - N(2a+N-1) H` for the
/// characteristic polynomial of `x`.
pub fn heat_rhs_at(x: &[f64], params: &ModelParams, z: f64) -> f64 {
    let n = x.len() as f64;
    let (a, b) = (params.a, params.b);
    let (h, h1, h2) = char_poly_derivs(x, z);
    -(1.0 + z * z) * h2 + (-2.0 * b + 2.0 * (a + n - 1.0) * z) * h1 - n * (2.0 * a + n - 1.0) * h
}

/// Checks that `H(t, z) = Π (z - x_j(t))` solves the backward heat equation
/// along a frozen trajectory. `H_t` is a second-order finite difference on
/// the (possibly non-uniform) recorded time grid.
pub fn heat_residual(traj: &Trajectory, probes: &[f64], params: &ModelParams) -> Result<HeatResidualReport> {
    if traj.len() < 3 {
        return Err(Error::InvalidArgument("need at least three recorded states".into()));
    }
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probe points".into()));
    }
    let mut times = Vec::with_capacity(traj.len() - 2);
    let mut residuals = Vec::with_capacity(traj.len() - 2);
    for i in 1..traj.len() - 1 {
        let h0 = traj.times[i] - traj.times[i - 1];
        let h1 = traj.times[i + 1] - traj.times[i];
        let (wm, w0, wp) = (-h1 / (h0 * (h0 + h1)), (h1 - h0) / (h0 * h1), h0 / (h1 * (h0 + h1)));
        let mut worst: f64 = 0.0;
        for &z in probes {
            let hm = char_poly_derivs(traj.states[i - 1].as_slice(), z).0;
            let hc = char_poly_derivs(traj.states[i].as_slice(), z).0;
            let hp = char_poly_derivs(traj.states[i + 1].as_slice(), z).0;
            let ht = wm * hm + w0 * hc + wp * hp;
            worst = worst.max((ht - heat_rhs_at(traj.states[i].as_slice(), params, z)).abs());
        }
        times.push(traj.times[i]);
        residuals.push(worst);
    }
    let max = residuals.iter().copied().fold(0.0, f64::max);
    Ok(HeatResidualReport { times, residuals, max })
}
