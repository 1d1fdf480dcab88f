use super::{integrate_ordered, IntegratorConfig};
use crate::error::{Error, Result};
use crate::model::{Configuration, ModelParams, Trajectory};
use crate::pseudojacobi::classical_jacobi_zeros;

/// `x_j' = -p + (p+q) x_j + Σ_{k≠j} (2 x_j x_k - x_j - x_k)/(x_j - x_k)`.
pub fn jacobi_type_rhs(x: &[f64], p: f64, q: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.len()];
    jacobi_type_into(x, p, q, &mut out)?;
    Ok(out)
}

fn jacobi_type_into(x: &[f64], p: f64, q: f64, out: &mut [f64]) -> Result<()> {
    for (j, &xj) in x.iter().enumerate() {
        let mut v = -p + (p + q) * xj;
        for (k, &xk) in x.iter().enumerate() {
            if k == j {
                continue;
            }
            let d = xj - xk;
            if !(d != 0.0) {
                return Err(Error::Collision { i: j.min(k), j: j.max(k), gap: 0.0 });
            }
            v += (2.0 * xj * xk - xj - xk) / d;
        }
        out[j] = v;
    }
    Ok(())
}

/// Elementary-symmetric form of the Jacobi-type flow:
/// `y_m' = m(p+q+1-m) y_m - (p-m+1)(N-m+1) y_{m-1}`, `y_0 = 1`.
pub fn jacobi_type_esp_rhs(y: &[f64], p: f64, q: f64) -> Vec<f64> {
    let n = y.len();
    (1..=n)
        .map(|m| {
            let mf = m as f64;
            let prev = if m == 1 { 1.0 } else { y[m - 2] };
            mf * (p + q + 1.0 - mf) * y[m - 1] - (p - mf + 1.0) * (n - m + 1) as f64 * prev
        })
        .collect()
}

/// Stationary point of the Jacobi-type flow for `q > N - 1`, `p < -q`:
/// `x_j = 2/(y_{N+1-j} + 1)` with `y` the zeros of `P_N^{(q-N, -(p+q+1))}`.
pub fn jacobi_type_stationary(n: usize, p: f64, q: f64) -> Result<Vec<f64>> {
    if n == 0 || !(q > n as f64 - 1.0) || !(p < -q) {
        return Err(Error::OutOfRegime(format!(
            "Jacobi-type stationary point needs q > N-1 and p < -q (N={n}, p={p}, q={q})"
        )));
    }
    let jac = classical_jacobi_zeros(n, q - n as f64, -(p + q + 1.0))?;
    Ok(jac.zeros.iter().rev().map(|y| 2.0 / (y + 1.0)).collect())
}

/// Integrates the Jacobi-type flow as an ordered particle system.
pub fn integrate_jacobi_type(x0: &[f64], p: f64, q: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let params = ModelParams::frozen(x0.len(), p, q)?;
    integrate_ordered(|y, dy| jacobi_type_into(y, p, q, dy), x0, params, cfg, |_| true)
}

/// `y_j' = -(N-1) y_j + 2 Σ_{k≠j} y_j²/(y_j - y_k)`.
pub fn heckman_rhs(y: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; y.len()];
    heckman_into(y, &mut out)?;
    Ok(out)
}

fn heckman_into(y: &[f64], out: &mut [f64]) -> Result<()> {
    let n1 = y.len() as f64 - 1.0;
    for (j, &yj) in y.iter().enumerate() {
        let mut v = -n1 * yj;
        for (k, &yk) in y.iter().enumerate() {
            if k == j {
                continue;
            }
            let d = yj - yk;
            if !(d != 0.0) {
                return Err(Error::Collision { i: j.min(k), j: j.max(k), gap: 0.0 });
            }
            v += 2.0 * yj * yj / d;
        }
        out[j] = v;
    }
    Ok(())
}

/// Integrates the Heckman flow on the positive half-line.
pub fn integrate_heckman(y0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory> {
    if y0.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::OutOfRegime("Heckman flow needs positive coordinates".into()));
    }
    let n = y0.len();
    let params = ModelParams::frozen(n, -(n as f64) + 0.5, 0.0)?;
    integrate_ordered(heckman_into, y0, params, cfg, |y| y.iter().all(|v| *v > 0.0))
}

/// Maps a Heckman trajectory `y` to the Hua-Pickrell trajectory
/// `x_t = f(y_{4t})`, `f(y) = (√y - 1/√y)/2`, with `a = -N + 1/2`, `b = 0`.
pub fn heckman_to_hp_transform(traj: &Trajectory) -> Result<Trajectory> {
    let n = traj.states.first().map(|s| s.len()).unwrap_or(0);
    let params = ModelParams::frozen(n, -(n as f64) + 0.5, 0.0)?;
    let mut out = Trajectory::new(params, traj.seed);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        if s.as_slice().iter().any(|v| !(*v > 0.0)) {
            return Err(Error::OutOfRegime(format!("non-positive Heckman coordinate at t = {t}")));
        }
        let x = s.as_slice().iter().map(|y| 0.5 * (y.sqrt() - 1.0 / y.sqrt())).collect();
        out.push(t / 4.0, Configuration::new(x));
    }
    Ok(out)
}

/// Right-hand side of the squared-coordinate flow for `x̃_j = x_j² + 1`,
/// `j ≤ ⌊N/2⌋`, of a symmetric (`b = 0`) configuration of `N` particles:
/// `x̃_j' = c - 2(2a+1) x̃_j + 4 Σ_{k≠j} (2 x̃_j x̃_k - x̃_j - x̃_k)/(x̃_j - x̃_k)`
/// with `c = 2(N+2a)` for even and `2(N+2a+1)` for odd `N`.
pub fn squared_ode_rhs(xt: &[f64], n: usize, a: f64) -> Result<Vec<f64>> {
    if xt.len() != n / 2 {
        return Err(Error::InvalidArgument(format!("expected {} squared coordinates", n / 2)));
    }
    let c = if n.is_multiple_of(2) { 2.0 * (n as f64 + 2.0 * a) } else { 2.0 * (n as f64 + 2.0 * a + 1.0) };
    let mut out = vec![0.0; xt.len()];
    for (j, &u) in xt.iter().enumerate() {
        let mut v = c - 2.0 * (2.0 * a + 1.0) * u;
        for (k, &w) in xt.iter().enumerate() {
            if k != j {
                let d = u - w;
                if !(d != 0.0) {
                    return Err(Error::Collision { i: j.min(k), j: j.max(k), gap: 0.0 });
                }
                v += 4.0 * (2.0 * u * w - u - w) / d;
            }
        }
        out[j] = v;
    }
    Ok(out)
}

/// Second-order derivative estimate at interior grid point `i`.
pub(crate) fn central_difference(times: &[f64], i: usize, f: impl Fn(usize) -> f64) -> f64 {
    let h0 = times[i] - times[i - 1];
    let h1 = times[i + 1] - times[i];
    -h1 / (h0 * (h0 + h1)) * f(i - 1) + (h1 - h0) / (h0 * h1) * f(i) + h0 / (h1 * (h0 + h1)) * f(i + 1)
}

/// Largest mismatch between central differences of a recorded trajectory and
/// the frozen right-hand side for `traj.params`, relative to `1 + |rhs|`.
pub fn frozen_fd_residual(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::InvalidArgument("need at least three recorded states".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 1..traj.len() - 1 {
        let rhs = super::frozen_rhs(&traj.states[i], &traj.params)?;
        for (j, r) in rhs.iter().enumerate() {
            let d = central_difference(&traj.times, i, |k| traj.states[k].coords[j]);
            worst = worst.max((d - r).abs() / (1.0 + r.abs()));
        }
    }
    Ok(worst)
}

/// Differentiates `x̃_j = x_j² + 1` along a recorded symmetric (`b = 0`)
/// trajectory by central differences and compares with [`squared_ode_rhs`].
/// For odd `N` the middle particle must stay at `x̃ = 1`. Returns the largest
/// mismatch relative to `1 + |x̃'|`.
pub fn squared_transform_residual(traj: &Trajectory) -> Result<f64> {
    let p = traj.params;
    if p.b != 0.0 {
        return Err(Error::OutOfRegime("squared coordinates need b = 0".into()));
    }
    if traj.len() < 3 {
        return Err(Error::InvalidArgument("need at least three recorded states".into()));
    }
    let n = p.n_particles;
    let mut worst: f64 = 0.0;
    for (i, s) in traj.states.iter().enumerate() {
        let x = s.as_slice();
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for j in 0..n {
            let sym = (x[j] + x[n - 1 - j]).abs() / scale;
            if sym > 1e-9 {
                return Err(Error::OutOfRegime(format!("state {i} is not symmetric ({sym:e})")));
            }
        }
        if n % 2 == 1 {
            worst = worst.max(x[n / 2].powi(2));
        }
        if i == 0 || i + 1 == traj.len() {
            continue;
        }
        let xt: Vec<f64> = x[..n / 2].iter().map(|v| v * v + 1.0).collect();
        let rhs = squared_ode_rhs(&xt, n, p.a)?;
        for j in 0..n / 2 {
            let d = central_difference(&traj.times, i, |k| traj.states[k].coords[j].powi(2) + 1.0);
            worst = worst.max((d - rhs[j]).abs() / (1.0 + d.abs()));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate_frozen;
    use crate::model::{elementary_symmetric_all, is_ordered};
    use crate::pseudojacobi::pseudo_jacobi_zeros;
    use approx::assert_relative_eq;

    #[test]
    fn heckman_example() {
        let r = heckman_rhs(&[0.5, 2.0]).unwrap();
        assert_relative_eq!(r[0], -5.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(r[1], 10.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn heckman_image_solves_frozen_flow() {
        // reciprocal-symmetric start y ↔ 1/y keeps the image symmetric
        for y0 in [vec![0.25, 4.0], vec![0.2, 1.0, 5.0], vec![0.1, 0.5, 2.0, 10.0]] {
            let n = y0.len();
            let cfg = IntegratorConfig { local_tol: 1e-12, dt_max: 4e-4, ..IntegratorConfig::until(0.4) };
            let y = integrate_heckman(&y0, &cfg).unwrap();
            let x = heckman_to_hp_transform(&y).unwrap();
            assert_eq!(x.params.a, -(n as f64) + 0.5);
            let worst = frozen_fd_residual(&x).unwrap();
            assert!(worst < 1e-5, "N={n}: {worst:e}");
        }
    }

    #[test]
    fn jacobi_type_esp_chain_rule() {
        let (p, q) = (-4.2, 3.1);
        let x = [0.3, 0.9, 1.7, 2.4];
        let dx = jacobi_type_rhs(&x, p, q).unwrap();
        let e = elementary_symmetric_all(&x);
        let de = jacobi_type_esp_rhs(&e[1..], p, q);
        // d e_m = Σ_j e_{m-1}(x without j) dx_j
        for m in 1..=4 {
            let mut chain = 0.0;
            for j in 0..4 {
                let rest: Vec<f64> = x.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| *v).collect();
                chain += elementary_symmetric_all(&rest)[m - 1] * dx[j];
            }
            assert_relative_eq!(chain, de[m - 1], epsilon = 1e-11, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobi_type_stationary_point() {
        let n = 3;
        let q = n as f64 + 0.5;
        let p = -q - 0.5;
        let z = jacobi_type_stationary(n, p, q).unwrap();
        assert!(is_ordered(&z, true));
        let r = jacobi_type_rhs(&z, p, q).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-10), "{r:?}");

        let traj = integrate_jacobi_type(&[1.1, 1.5, 3.0], p, q, &IntegratorConfig::until(0.5)).unwrap();
        traj.validate().unwrap();
        assert!(jacobi_type_stationary(3, 0.0, 1.0).is_err());
    }

    #[test]
    fn squared_flow_even_and_odd() {
        for n in [4usize, 5, 6, 7] {
            let a = 0.6;
            let p = ModelParams::frozen(n, a, 0.0).unwrap();
            let x0: Vec<f64> = (0..n).map(|j| -2.0 + 4.0 * j as f64 / (n - 1) as f64).collect();
            let cfg = IntegratorConfig { symmetrize: true, dt_max: 1e-4, local_tol: 1e-12, ..IntegratorConfig::until(1.0) };
            let traj = integrate_frozen(&Configuration::new(x0), &p, &cfg).unwrap();
            let r = squared_transform_residual(&traj).unwrap();
            assert!(r < 1e-5, "N={n}: {r:e}");
        }
    }

    #[test]
    fn squared_flow_stationary_at_zeros() {
        let n = 6;
        let a = 1.5;
        let z = pseudo_jacobi_zeros(n, -(n as f64) - a, 0.0).unwrap();
        let xt: Vec<f64> = z.zeros[..n / 2].iter().map(|v| v * v + 1.0).collect();
        let r = squared_ode_rhs(&xt, n, a).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-9), "{r:?}");
    }
}
