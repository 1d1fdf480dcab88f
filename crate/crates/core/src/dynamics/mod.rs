//! Frozen and stochastic Hua-Pickrell dynamics, the elementary-symmetric
//! flow, transformed flows and the heat-equation residual.

mod esp;
mod heat;
mod moments;
mod sde;
mod transforms;

pub use esp::{config_from_esp, esp_closed_form, esp_rhs, esp_rk_solution, EspState};
pub use heat::{heat_residual, heat_rhs_at, HeatResidualReport};
pub use moments::empirical_moment_drift;
pub use sde::{euler_step, simulate_sde, Chart, SdeRunConfig, TimeScaling};
pub use transforms::{
    frozen_fd_residual, heckman_rhs, heckman_to_hp_transform, integrate_heckman, integrate_jacobi_type,
    jacobi_type_esp_rhs, jacobi_type_rhs, jacobi_type_stationary, squared_ode_rhs,
    squared_transform_residual,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{is_ordered, min_gap, Configuration, ModelParams, Trajectory};
use crate::ode::{self, StepControl};

/// Relative size of the split applied to coincident starting coordinates.
pub const BOUNDARY_SPLIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt_init: f64,
    pub dt_min: f64,
    /// Upper bound on accepted steps; controls the resolution of the
    /// recorded path. `f64::INFINITY` leaves the step to error control.
    pub dt_max: f64,
    pub local_tol: f64,
    pub t_end: f64,
    pub record_every: usize,
    /// Steps that shrink the smallest gap below this value are rejected.
    /// `None` means `1e-8 · (1 + span of x0)`.
    pub min_gap_guard: Option<f64>,
    /// Antisymmetrise the vector field, `f_j ← (f_j - f_{N+1-j})/2`, and the
    /// start. Keeps `b = 0` symmetric paths exactly symmetric in floating point.
    pub symmetrize: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt_init: 1e-3,
            // Boundary starts resolve gaps of 1e-10, which needs steps near gap².
            dt_min: 1e-24,
            dt_max: f64::INFINITY,
            local_tol: 1e-10,
            t_end: 1.0,
            record_every: 1,
            min_gap_guard: None,
            symmetrize: false,
        }
    }
}

impl IntegratorConfig {
    pub fn until(t_end: f64) -> Self {
        Self { t_end, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt_init > 0.0 && self.dt_min > 0.0 && self.local_tol > 0.0 && self.t_end > 0.0) {
            return Err(Error::InvalidArgument(
                "dt_init, dt_min, local_tol and t_end must be positive".into(),
            ));
        }
        if self.dt_min > self.dt_init {
            return Err(Error::InvalidArgument("dt_min exceeds dt_init".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1".into()));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::InvalidArgument("dt_max must be positive".into()));
        }
        Ok(())
    }
}

/// `2[b - a x_j + Σ_{k≠j} (x_j x_k + 1)/(x_j - x_k)]`.
pub fn frozen_rhs(x: &Configuration, params: &ModelParams) -> Result<Vec<f64>> {
    if !x.is_ordered(true) {
        return Err(collision_or_unordered(x.as_slice()));
    }
    let mut out = vec![0.0; x.len()];
    frozen_rhs_into(x.as_slice(), params.a, params.b, &mut out)?;
    Ok(out)
}

pub(crate) fn frozen_rhs_into(x: &[f64], a: f64, b: f64, out: &mut [f64]) -> Result<()> {
    let n = x.len();
    for (o, &xj) in out.iter_mut().zip(x) {
        *o = b - a * xj;
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let d = x[j] - x[k];
            if !(d != 0.0) {
                return Err(Error::Collision { i: j, j: k, gap: d.abs() });
            }
            let t = (x[j] * x[k] + 1.0) / d;
            out[j] += t;
            out[k] -= t;
        }
    }
    for o in out.iter_mut() {
        *o *= 2.0;
    }
    Ok(())
}

pub(crate) fn collision_or_unordered(x: &[f64]) -> Error {
    for (i, w) in x.windows(2).enumerate() {
        if w[0] == w[1] {
            return Error::Collision { i, j: i + 1, gap: 0.0 };
        }
    }
    Error::Unordered
}

/// Spreads runs of equal coordinates symmetrically by
/// `BOUNDARY_SPLIT · max(1, |x|)` so the repulsive drift is defined.
pub fn split_boundary(x: &[f64]) -> Vec<f64> {
    split_boundary_by(x, BOUNDARY_SPLIT)
}

pub(crate) fn split_boundary_by(x: &[f64], rel: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    let mut i = 0;
    while i < out.len() {
        let mut j = i + 1;
        while j < out.len() && x[j] == x[i] {
            j += 1;
        }
        let m = j - i;
        if m > 1 {
            let h = rel * x[i].abs().max(1.0);
            for (r, slot) in out[i..j].iter_mut().enumerate() {
                *slot = x[i] + (r as f64 - 0.5 * (m - 1) as f64) * h;
            }
        }
        i = j;
    }
    out
}

fn antisymmetrize(v: &mut [f64]) {
    let n = v.len();
    for j in 0..n / 2 {
        let s = 0.5 * (v[j] - v[n - 1 - j]);
        v[j] = s;
        v[n - 1 - j] = -s;
    }
    if n % 2 == 1 {
        v[n / 2] = 0.0;
    }
}

/// Integrates an ordered particle flow `x' = rhs(x)` with the chamber guard.
/// `domain` restricts admissible states further (e.g. positivity).
pub(crate) fn integrate_ordered<F, D>(
    mut rhs: F,
    x0: &[f64],
    params: ModelParams,
    cfg: &IntegratorConfig,
    domain: D,
) -> Result<Trajectory>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
    D: Fn(&[f64]) -> bool,
{
    cfg.validate()?;
    if !is_ordered(x0, false) {
        return Err(Error::Unordered);
    }
    let mut start = split_boundary(x0);
    if cfg.symmetrize {
        antisymmetrize(&mut start);
    }
    if !domain(&start) {
        return Err(Error::OutOfRegime("start outside the flow's domain".into()));
    }
    let span = start.last().copied().unwrap_or(0.0) - start.first().copied().unwrap_or(0.0);
    let guard = cfg.min_gap_guard.unwrap_or(1e-8 * (1.0 + span.abs()));

    let mut traj = Trajectory::new(params, 0);
    traj.push(0.0, Configuration::new(x0.to_vec()));
    let mut steps = 0usize;
    let mut last_recorded = 0.0;
    let ctrl = StepControl {
        dt_init: cfg.dt_init,
        dt_min: cfg.dt_min,
        dt_max: cfg.dt_max,
        tol: cfg.local_tol,
    };
    let symmetrize = cfg.symmetrize;
    let t_end = cfg.t_end;
    let record_every = cfg.record_every;
    ode::integrate(
        |_, y, dy| {
            rhs(y, dy)?;
            if symmetrize {
                antisymmetrize(dy);
            }
            Ok(())
        },
        0.0,
        &start,
        t_end,
        ctrl,
        |old, new| {
            if !is_ordered(new, true) || !domain(new) {
                return false;
            }
            let g = min_gap(new);
            g >= guard || g >= min_gap(old)
        },
        |t, y| {
            steps += 1;
            if (steps.is_multiple_of(record_every) || t == t_end) && t > last_recorded {
                traj.push(t, Configuration::new(y.to_vec()));
                last_recorded = t;
            }
        },
    )?;
    Ok(traj)
}

/// Adaptive Dormand–Prince integration of the frozen flow from `x0`.
/// Coincident starting coordinates are split by [`BOUNDARY_SPLIT`]; the
/// recorded state at `t = 0` is `x0` itself.
pub fn integrate_frozen(x0: &Configuration, params: &ModelParams, cfg: &IntegratorConfig) -> Result<Trajectory> {
    if x0.len() != params.n_particles {
        return Err(Error::InvalidArgument(format!(
            "start has {} coordinates, params say N = {}",
            x0.len(),
            params.n_particles
        )));
    }
    let (a, b) = (params.a, params.b);
    integrate_ordered(
        |y, dy| frozen_rhs_into(y, a, b, dy),
        x0.as_slice(),
        *params,
        cfg,
        |_| true,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudojacobi::{electrostatic_residual, pseudo_jacobi_zeros};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn sup(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn rhs_examples() {
        let r = 3f64.sqrt().recip();
        let p = ModelParams::frozen(2, 1.0, 0.0).unwrap();
        let v = frozen_rhs(&Configuration::new(vec![-r, r]), &p).unwrap();
        assert!(v.iter().all(|c| c.abs() < 1e-15));

        let p = ModelParams::frozen(2, 0.0, 0.0).unwrap();
        let v = frozen_rhs(&Configuration::new(vec![-1.0, 1.0]), &p).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);

        let p = ModelParams::frozen(4, 0.7, 0.0).unwrap();
        let v = frozen_rhs(&Configuration::new(vec![-2.0, -0.3, 0.3, 2.0]), &p).unwrap();
        for j in 0..4 {
            assert_relative_eq!(v[j], -v[3 - j], epsilon = 1e-14);
        }

        assert!(matches!(
            frozen_rhs(&Configuration::new(vec![0.0, 0.0]), &p),
            Err(Error::Collision { .. })
        ));
    }

    #[test]
    fn converges_to_closed_form_zeros() {
        let p = ModelParams::frozen(2, 1.0, 0.0).unwrap();
        let traj = integrate_frozen(&Configuration::new(vec![-2.0, 0.5]), &p, &IntegratorConfig::until(30.0)).unwrap();
        let (t, last) = traj.last().unwrap();
        assert_eq!(t, 30.0);
        let r = 3f64.sqrt().recip();
        assert!(sup(last.as_slice(), &[-r, r]) < 1e-6);
        traj.validate().unwrap();
    }

    #[test]
    fn converges_to_electrostatic_solution() {
        let p = ModelParams::frozen(5, 2.0, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut x0: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
        x0.sort_by(f64::total_cmp);
        let traj = integrate_frozen(&Configuration::new(x0), &p, &IntegratorConfig::until(40.0)).unwrap();
        let last = traj.last().unwrap().1;
        assert!(electrostatic_residual(last.as_slice(), p.stationary_pj_a(), 1.0).unwrap() < 1e-6);
    }

    #[test]
    fn stationary_start_stays_put() {
        let p = ModelParams::frozen(4, 1.5, -0.5).unwrap();
        let z = pseudo_jacobi_zeros(4, p.stationary_pj_a(), p.b).unwrap();
        let traj = integrate_frozen(&Configuration::new(z.zeros.clone()), &p, &IntegratorConfig::until(10.0)).unwrap();
        for s in &traj.states {
            assert!(sup(s.as_slice(), &z.zeros) < 1e-8);
        }
    }

    #[test]
    fn boundary_start_is_split() {
        let p = ModelParams::frozen(3, 1.0, 0.0).unwrap();
        let traj = integrate_frozen(&Configuration::new(vec![0.0, 0.0, 0.0]), &p, &IntegratorConfig::until(5.0)).unwrap();
        traj.validate().unwrap();
        let z = pseudo_jacobi_zeros(3, -4.0, 0.0).unwrap();
        assert!(sup(traj.last().unwrap().1.as_slice(), &z.zeros) < 1e-4);
    }

    #[test]
    fn symmetry_is_preserved() {
        for &symmetrize in &[false, true] {
            let p = ModelParams::frozen(6, 0.8, 0.0).unwrap();
            let x0 = vec![-3.0, -1.0, -0.2, 0.2, 1.0, 3.0];
            let cfg = IntegratorConfig { symmetrize, ..IntegratorConfig::until(10.0) };
            let traj = integrate_frozen(&Configuration::new(x0), &p, &cfg).unwrap();
            for s in &traj.states {
                let x = s.as_slice();
                for j in 0..6 {
                    assert!((x[j] + x[5 - j]).abs() < 1e-9, "symmetrize={symmetrize}");
                }
            }
        }
    }

    #[test]
    fn distance_to_zeros_decreases_late() {
        let p = ModelParams::frozen(4, 1.0, 0.5).unwrap();
        let z = pseudo_jacobi_zeros(4, p.stationary_pj_a(), p.b).unwrap();
        let traj = integrate_frozen(&Configuration::new(vec![-4.0, -1.0, 2.0, 5.0]), &p, &IntegratorConfig::until(12.0)).unwrap();
        let d: Vec<f64> = traj
            .times
            .iter()
            .zip(&traj.states)
            .filter(|(t, _)| **t > 2.0)
            .map(|(_, s)| sup(s.as_slice(), &z.zeros))
            .take_while(|d| *d > 1e-9)
            .collect();
        assert!(d.len() > 5);
        assert!(d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    }

    #[test]
    fn symmetric_stationary_solution_for_small_negative_a() {
        // a ∈ (-1/2, 0], b = 0: symmetric starts converge.
        let a = -0.25;
        let n = 4;
        let p = ModelParams::frozen(n, a, 0.0).unwrap();
        let cfg = IntegratorConfig { symmetrize: true, ..IntegratorConfig::until(60.0) };
        let t1 = integrate_frozen(&Configuration::new(vec![-3.0, -0.5, 0.5, 3.0]), &p, &cfg).unwrap();
        let t2 = integrate_frozen(&Configuration::new(vec![-0.4, -0.1, 0.1, 0.4]), &p, &cfg).unwrap();
        let u = t1.last().unwrap().1.as_slice().to_vec();
        let v = t2.last().unwrap().1.as_slice().to_vec();
        assert!(sup(&u, &v) < 1e-6, "{u:?} vs {v:?}");
        let rhs = frozen_rhs(&Configuration::new(u), &p).unwrap();
        assert!(rhs.iter().all(|r| r.abs() < 1e-6));
    }

    #[test]
    fn split_boundary_runs() {
        let s = split_boundary(&[-1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(s[0], -1.0);
        assert_eq!(s[4], 2.0);
        assert!(s[1] < s[2] && s[2] < s[3]);
        assert_relative_eq!(s[1] + s[3], 0.0, epsilon = 1e-25);
    }

    #[test]
    fn dt_underflow_reports_state() {
        let p = ModelParams::frozen(2, 1.0, 0.0).unwrap();
        let cfg = IntegratorConfig { dt_min: 1e-3, dt_init: 1e-3, local_tol: 1e-16, ..IntegratorConfig::until(1.0) };
        match integrate_frozen(&Configuration::new(vec![-1e-6, 1e-6]), &p, &cfg) {
            Err(Error::Stiffness { state, .. }) => assert_eq!(state.len(), 2),
            other => panic!("expected stiffness error, got {other:?}"),
        }
    }
}
