//! Dormand–Prince 5(4) with step rejection.
//!
//! Besides the usual error control, a caller-supplied admissibility test can
//! veto a step (for example when particles would leave the Weyl chamber); the
//! step is then halved and retried.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Mixed tolerance: the error in component `i` is compared against
    /// `tol · (1 + |y_i|)`.
    pub tol: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (same as the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// `f` writes the derivative into its last argument; a [`Error::Collision`]
/// from `f` at an intermediate stage counts as a rejected step. Every
/// accepted step is reported through `on_accept(t, y)`.
pub fn integrate<F, A, R>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    ctrl: StepControl,
    mut admissible: A,
    mut on_accept: R,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    A: FnMut(&[f64], &[f64]) -> bool,
    R: FnMut(f64, &[f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut dt = ctrl.dt_init.min(ctrl.dt_max);
    let mut k = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y5 = vec![0.0; n];

    while t < t_end {
        let remaining = t_end - t;
        let last = remaining <= dt;
        // Halve the last two steps instead of leaving a sliver at the end.
        let h = if last { remaining } else if remaining < 2.0 * dt { 0.5 * remaining } else { dt };

        let mut ok = true;
        for s in 0..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            match f(t + C[s] * h, &stage, &mut k[s]) {
                Ok(()) => {}
                Err(Error::Collision { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
            if k[s].iter().any(|v| !v.is_finite()) {
                ok = false;
                break;
            }
        }

        let mut err: f64 = 0.0;
        if ok {
            for i in 0..n {
                let mut hi = y[i];
                let mut lo = y[i];
                for s in 0..7 {
                    hi += h * B5[s] * k[s][i];
                    lo += h * B4[s] * k[s][i];
                }
                y5[i] = hi;
                let scale = 1.0 + y[i].abs().max(hi.abs());
                err = err.max((hi - lo).abs() / (ctrl.tol * scale));
            }
            ok = err.is_finite() && admissible(&y, &y5);
        }

        if ok && err <= 1.0 {
            t = if last { t_end } else { t + h };
            y.copy_from_slice(&y5);
            on_accept(t, &y);
            if last {
                break;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            dt = (h * factor).min(ctrl.dt_max);
        } else {
            let factor = if ok { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.5 };
            dt = h * factor;
            if dt < ctrl.dt_min {
                return Err(Error::Stiffness { t, dt, state: y });
            }
        }
    }
    Ok(y)
}
