use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Fixed RK4 step of [`integrate_moments`].
pub const MOMENT_DT: f64 = 1e-3;

/// Default probes for [`cauchy_pde_residual`].
pub fn default_probes() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 5.0), Complex64::new(0.0, 10.0), Complex64::new(3.0, 4.0)]
}

/// Moments `m_0, ..., m_{n_max}` of a probability measure at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSequence {
    pub n_max: usize,
    pub values: Vec<f64>,
    pub t: f64,
}

impl MomentSequence {
    pub fn new(values: Vec<f64>, t: f64) -> Result<Self> {
        if values.is_empty() || (values[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("moment sequences start with m_0 = 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("moments must be finite".into()));
        }
        Ok(Self { n_max: values.len() - 1, values, t })
    }

    /// Moments of `δ_0`.
    pub fn delta(n_max: usize) -> Self {
        let mut values = vec![0.0; n_max + 1];
        values[0] = 1.0;
        Self { n_max, values, t: 0.0 }
    }

    /// Moments of the uniform law on `[-1, 1]`.
    pub fn uniform(n_max: usize) -> Self {
        let values = (0..=n_max).map(|n| if n % 2 == 0 { 1.0 / (n as f64 + 1.0) } else { 0.0 }).collect();
        Self { n_max, values, t: 0.0 }
    }

    /// `max_{n ≥ 1} |m_n|^{1/n}`, a proxy for the support radius.
    pub fn radius_proxy(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, m)| m.abs().powf(1.0 / n as f64))
            .fold(0.0, f64::max)
    }

    /// Checks `|m_n(t)| ≤ (n c_1 e^{c_2 t})^n` for `n ≥ 1`, where the initial
    /// law is supported in `[-γ, γ]`.
    pub fn satisfies_carleman(&self, a_hat: f64, b_hat: f64, gamma: f64) -> bool {
        (1..=self.n_max).all(|n| self.values[n].abs() <= carleman_bound(n, a_hat, b_hat, gamma, self.t))
    }
}

/// `(n c_1 e^{c_2 t})^n` with `c_1 = max(1, 2γ, 4(|b̂|+5))`, `c_2 = max(0, c_1 - 2â)`.
pub fn carleman_bound(n: usize, a_hat: f64, b_hat: f64, gamma: f64, t: f64) -> f64 {
    let c1 = 1f64.max(2.0 * gamma).max(4.0 * (b_hat.abs() + 5.0));
    let c2 = (c1 - 2.0 * a_hat).max(0.0);
    (n as f64 * c1 * (c2 * t).exp()).powi(n as i32)
}

fn rhs_into(m: &[f64], a_hat: f64, b_hat: f64, out: &mut [f64]) {
    out[0] = 0.0;
    for n in 1..m.len() {
        let mut s = -2.0 * (a_hat + 1.0) * m[n] + 2.0 * b_hat * m[n - 1];
        for k in 0..=n {
            s += m[k] * m[n - k];
        }
        for k in 0..n.saturating_sub(1) {
            s += m[k] * m[n - 2 - k];
        }
        out[n] = n as f64 * s;
    }
}

/// Right-hand side of the limiting moment system
/// `m_n' = n[-2(â+1) m_n + 2b̂ m_{n-1} + Σ_{k=0}^n m_k m_{n-k} + Σ_{k=0}^{n-2} m_k m_{n-2-k}]`,
/// entry 0 being zero.
pub fn moment_rhs(m: &MomentSequence, a_hat: f64, b_hat: f64) -> Vec<f64> {
    let mut out = vec![0.0; m.values.len()];
    rhs_into(&m.values, a_hat, b_hat, &mut out);
    out
}

/// RK4 path with step [`MOMENT_DT`] (the last step shortened), recording
/// the start and every `record_every`-th step plus the end point.
pub fn integrate_moments_path(
    m0: &MomentSequence,
    a_hat: f64,
    b_hat: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Vec<MomentSequence>> {
    if !(t_end >= m0.t) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end = {t_end} precedes the start time {}", m0.t)));
    }
    let record_every = record_every.max(1);
    let len = m0.values.len();
    let mut y = m0.values.clone();
    let mut t = m0.t;
    let mut path = vec![m0.clone()];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let steps = ((t_end - m0.t) / MOMENT_DT).ceil() as usize;
    for step in 1..=steps {
        let h = if step == steps { t_end - t } else { MOMENT_DT };
        rhs_into(&y, a_hat, b_hat, &mut k1);
        for i in 0..len {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs_into(&tmp, a_hat, b_hat, &mut k2);
        for i in 0..len {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs_into(&tmp, a_hat, b_hat, &mut k3);
        for i in 0..len {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs_into(&tmp, a_hat, b_hat, &mut k4);
        for i in 0..len {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = if step == steps { t_end } else { t + h };
        if let Some(n) = y.iter().position(|v| !v.is_finite() || v.abs() > 1e300) {
            return Err(Error::Divergence(format!("moment m_{n} overflowed at t = {t}")));
        }
        if step % record_every == 0 || step == steps {
            path.push(MomentSequence { n_max: m0.n_max, values: y.clone(), t });
        }
    }
    Ok(path)
}

pub fn integrate_moments(m0: &MomentSequence, a_hat: f64, b_hat: f64, t_end: f64) -> Result<MomentSequence> {
    let path = integrate_moments_path(m0, a_hat, b_hat, t_end, usize::MAX)?;
    Ok(path.into_iter().last().expect("path holds the start"))
}

/// Residual of `∂_t G = -∂_z[(-2(â+1)z + 2b̂) G + (z²+1) G²]` for the truncated
/// series `G = Σ_{n ≤ truncation} m_n z^{-n-1}`, maximised over the path and
/// the probes. `∂_t G` is taken term-wise from [`moment_rhs`].
pub fn cauchy_pde_residual(
    path: &[MomentSequence],
    a_hat: f64,
    b_hat: f64,
    probes: &[Complex64],
    truncation: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in path {
        if truncation > m.n_max {
            return Err(Error::InvalidArgument(format!("truncation {truncation} exceeds n_max = {}", m.n_max)));
        }
        let radius = m.radius_proxy();
        let dm = moment_rhs(m, a_hat, b_hat);
        for &z in probes {
            if z.norm() <= 1.5 * radius {
                return Err(Error::OutOfRegime(format!(
                    "probe {z} is too close to the support (radius ≈ {radius:.4}); the series may not converge"
                )));
            }
            let w = z.inv();
            let (mut g, mut gz, mut gt) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let mut p = w;
            for n in 0..=truncation {
                g += m.values[n] * p;
                gt += dm[n] * p;
                gz -= (n as f64 + 1.0) * m.values[n] * p * w;
                p *= w;
            }
            let lin = -2.0 * (a_hat + 1.0) * z + 2.0 * b_hat;
            let spatial = -2.0 * (a_hat + 1.0) * g + lin * gz + 2.0 * z * g * g + 2.0 * (z * z + 1.0) * g * gz;
            worst = worst.max((gt + spatial).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::EquilibriumMeasure;

    fn equilibrium(a_hat: f64, b_hat: f64, n_max: usize) -> MomentSequence {
        let e = EquilibriumMeasure::new(a_hat, b_hat).unwrap();
        MomentSequence::new((0..=n_max as u32).map(|n| e.moment(n)).collect(), 0.0).unwrap()
    }

    #[test]
    fn first_moment_rhs() {
        let m = MomentSequence::new(vec![1.0, 0.3, 0.5], 0.0).unwrap();
        let d = moment_rhs(&m, 1.5, 0.7);
        assert_eq!(d[0], 0.0);
        assert!((d[1] - (-2.0 * 1.5 * 0.3 + 2.0 * 0.7)).abs() < 1e-14);
        let s = MomentSequence::new(vec![1.0, 0.0, 0.5], 0.0).unwrap();
        assert!(moment_rhs(&s, 1.0, 0.0)[2].abs() < 1e-15);
    }

    #[test]
    fn stationary_first_moment() {
        let m = MomentSequence::new(vec![1.0, 0.4 / 2.0], 0.0).unwrap();
        assert!(moment_rhs(&m, 2.0, 0.4)[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(MomentSequence::new(vec![0.9, 0.0], 0.0).is_err());
        assert!(MomentSequence::new(vec![], 0.0).is_err());
    }

    #[test]
    fn equilibrium_is_fixed() {
        let m0 = equilibrium(1.0, 0.0, 8);
        let m = integrate_moments(&m0, 1.0, 0.0, 5.0).unwrap();
        for (a, b) in m.values.iter().zip(&m0.values) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn delta_start_relaxes() {
        let m = integrate_moments(&MomentSequence::delta(4), 1.0, 0.0, 30.0).unwrap();
        assert!((m.values[2] - 0.5).abs() < 1e-6);
        assert!((m.t - 30.0).abs() < 1e-12);
    }

    #[test]
    fn first_moment_closed_form() {
        let path = integrate_moments_path(&MomentSequence::delta(1), 1.0, 1.0, 3.0, 100).unwrap();
        for m in &path {
            assert!((m.values[1] - (1.0 - (-2.0 * m.t).exp())).abs() < 1e-8);
        }
    }

    #[test]
    fn three_way_agreement() {
        for &a_hat in &[0.5, 1.0, 2.0] {
            for &b_hat in &[0.0, 0.5] {
                let m = integrate_moments(&MomentSequence::delta(8), a_hat, b_hat, 60.0).unwrap();
                let e = equilibrium(a_hat, b_hat, 8);
                for n in 0..=8 {
                    let d = (m.values[n] - e.values[n]).abs();
                    assert!(d < 1e-5 * (1.0 + e.values[n].abs()), "â={a_hat} b̂={b_hat} n={n}: {d}");
                }
            }
        }
    }

    #[test]
    fn divergence_is_reported() {
        let r = integrate_moments(&MomentSequence::uniform(30), -1.0, 0.0, 200.0);
        assert!(matches!(r, Err(Error::Divergence(_))), "{r:?}");
    }

    #[test]
    fn carleman_bound_holds() {
        let path = integrate_moments_path(&MomentSequence::delta(12), 1.0, 0.5, 5.0, 100).unwrap();
        assert!(path.iter().all(|m| m.satisfies_carleman(1.0, 0.5, 0.0)));
        let path = integrate_moments_path(&MomentSequence::uniform(12), 0.5, 0.0, 5.0, 100).unwrap();
        assert!(path.iter().all(|m| m.satisfies_carleman(0.5, 0.0, 1.0)));
    }

    #[test]
    fn stationary_pde_residual() {
        let m = equilibrium(1.0, 0.0, 40);
        let probes = [Complex64::new(0.0, 5.0), Complex64::new(3.0, 4.0)];
        let r = cauchy_pde_residual(&[m], 1.0, 0.0, &probes, 40).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn transient_pde_residual() {
        let path = integrate_moments_path(&MomentSequence::delta(40), 1.0, 0.0, 1.0, 250).unwrap();
        let probe = [Complex64::new(0.0, 10.0)];
        let r20 = cauchy_pde_residual(&path, 1.0, 0.0, &probe, 20).unwrap();
        assert!(r20 < 1e-5, "{r20}");
        // at truncation 20 the residual is already at rounding level
        let r4 = cauchy_pde_residual(&path, 1.0, 0.0, &probe, 4).unwrap();
        let r8 = cauchy_pde_residual(&path, 1.0, 0.0, &probe, 8).unwrap();
        assert!(r8 * 10.0 <= r4, "{r4} {r8}");
        assert!(cauchy_pde_residual(&path, 1.0, 0.0, &default_probes(), 40).unwrap() < 1e-6);
    }

    #[test]
    fn probe_near_support_is_rejected() {
        let m = equilibrium(1.0, 0.0, 20);
        let r = cauchy_pde_residual(&[m], 1.0, 0.0, &[Complex64::new(0.0, 1.0)], 20);
        assert!(matches!(r, Err(Error::OutOfRegime(_))));
    }
}
