//! Pseudo-Jacobi polynomials `P_n(x; a, b)`, classical Jacobi zeros, the
//! electrostatic characterisation of zeros and discrete orthonormal systems.
//!
//! Parameters here are in the pseudo-Jacobi convention. The stationary
//! configuration of the dynamics with parameter `a` uses
//! [`crate::model::stationary_pj_a`].

mod discrete;
mod jacobi;
mod tridiag;
mod zeros;

pub use discrete::{discrete_orthonormal_polys, DiscreteOrthMeasure, OrthonormalSystem};
pub use jacobi::{classical_jacobi_zeros, jacobi_stieltjes_residual, zero_map_check};
pub use zeros::{
    electrostatic_newton, electrostatic_residual, electrostatic_residuals, h_objective,
    pseudo_jacobi_zeros, HObjective, ZeroSet, ZeroSource,
};

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly;
use crate::quadrature;
use crate::special::{ln_abs_gamma, ln_gamma_real};

/// Probe abscissae for the series/recurrence self-check.
const PROBES: [f64; 5] = [-2.3, -0.7, 0.0, 0.9, 1.8];
const SELF_CHECK_TOL: f64 = 1e-9;

/// `P_n(x; a, b)` from the terminating hypergeometric series in complex
/// arithmetic.
pub fn pseudo_jacobi_series_eval(n: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    pseudo_jacobi_series_eval_scaled(n, a, b, x).map(|(v, _)| v)
}

/// Series value together with `Σ |term_k|`, the scale of its rounding error.
pub fn pseudo_jacobi_series_eval_scaled(n: usize, a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    let c = Complex64::new(a + 1.0, b);
    for j in 0..n {
        if c + j as f64 == Complex64::new(0.0, 0.0) {
            return Err(Error::DegenerateParameter {
                n,
                reason: format!("Pochhammer factor a+ib+1+{j} vanishes"),
            });
        }
    }
    let u = Complex64::new(1.0, -x) * 0.5;
    // term_k = (a+ib+1)_n / n! * (-n)_k (2a+n+1)_k / ((a+ib+1)_k k!) * u^k,
    // with (a+ib+1)_n / (a+ib+1)_k folded into the leading factor.
    let nf = n as f64;
    let mut lead = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        lead *= (c + (j - 1) as f64) / j as f64;
    }
    let mut term = lead;
    let mut sum = term;
    let mut magnitude = term.norm();
    for k in 0..n {
        let kf = k as f64;
        term *= (kf - nf) * (2.0 * a + nf + 1.0 + kf) / ((c + kf) * (kf + 1.0)) * u;
        sum += term;
        magnitude += term.norm();
    }
    let phase = match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    let v = phase * sum;
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs()).max(magnitude) {
        return Err(Error::Numerical(format!(
            "series value has imaginary part {:e} (real part {:e})",
            v.im, v.re
        )));
    }
    Ok((v.re, magnitude))
}

/// Coefficients of `D_n P_{n+1} = (A_n x + B_n) P_n + C_n P_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceStep {
    pub d: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Three-term recurrence coefficients at step `n`; errors when the step
/// cannot raise the degree.
pub fn recurrence_step(n: usize, a: f64, b: f64) -> Result<RecurrenceStep> {
    let nf = n as f64;
    let d = (nf + 1.0) * (nf + 2.0 * a + 1.0) * (nf + a);
    let lead = (2.0 * nf + 2.0 * a + 1.0) * (nf + a) * (nf + a + 1.0);
    if d == 0.0 {
        return Err(Error::DegenerateParameter {
            n,
            reason: "recurrence prefactor (n+1)(n+2a+1)(n+a) vanishes".into(),
        });
    }
    if lead == 0.0 {
        return Err(Error::DegenerateParameter {
            n,
            reason: format!("P_{} would have degree below {}", n + 1, n + 1),
        });
    }
    Ok(RecurrenceStep {
        d,
        a: lead,
        b: (2.0 * nf + 2.0 * a + 1.0) * a * b,
        c: ((nf + a).powi(2) + b * b) * (nf + a + 1.0),
    })
}

/// `P_n(x; a, b)` by running the recurrence on values.
pub fn pseudo_jacobi_recurrence_eval(n: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let s = recurrence_step(k, a, b)?;
        let next = ((s.a * x + s.b) * cur + s.c * prev) / s.d;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Monomial coefficient table of `P_0, ..., P_{n_max}` built by the
/// recurrence. Each row is checked against the series at fixed probes.
pub fn pseudo_jacobi_recurrence_coeffs(n_max: usize, a: f64, b: f64) -> Result<Vec<Vec<f64>>> {
    let mut table: Vec<Vec<f64>> = vec![vec![1.0]];
    for n in 0..n_max {
        let s = recurrence_step(n, a, b)?;
        let cur = &table[n];
        let mut next = vec![0.0; n + 2];
        for (k, &c) in cur.iter().enumerate() {
            next[k + 1] += s.a * c / s.d;
            next[k] += s.b * c / s.d;
        }
        if n > 0 {
            for (k, &c) in table[n - 1].iter().enumerate() {
                next[k] += s.c * c / s.d;
            }
        }
        table.push(next);
    }
    for (n, row) in table.iter().enumerate() {
        self_check(n, a, b, row)?;
    }
    Ok(table)
}

fn self_check(n: usize, a: f64, b: f64, coeffs: &[f64]) -> Result<()> {
    for &x in &PROBES {
        let (series, magnitude) = pseudo_jacobi_series_eval_scaled(n, a, b, x)?;
        let from_coeffs = poly::eval(coeffs, x);
        let scale = poly::eval_abs(coeffs, x).max(magnitude);
        if (series - from_coeffs).abs() > SELF_CHECK_TOL * scale {
            return Err(Error::Integrity(format!(
                "P_{n}({x}; {a}, {b}): recurrence {from_coeffs:e} vs series {series:e}"
            )));
        }
    }
    Ok(())
}

/// `P_n(·; a, b)` in the monomial basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoJacobiPoly {
    pub degree: usize,
    pub a: f64,
    pub b: f64,
    /// Ascending monomial coefficients, length `degree + 1`.
    pub coeffs: Vec<f64>,
}

impl PseudoJacobiPoly {
    pub fn new(degree: usize, a: f64, b: f64) -> Result<Self> {
        let mut table = pseudo_jacobi_recurrence_coeffs(degree, a, b)?;
        Ok(Self {
            degree,
            a,
            b,
            coeffs: table.pop().unwrap(),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        poly::eval(&self.coeffs, x)
    }
}

/// `w(x) = (1 + x²)^a e^{2b arctan x}`.
pub fn pseudo_jacobi_weight(x: f64, a: f64, b: f64) -> f64 {
    (a * (1.0 + x * x).ln() + 2.0 * b * x.atan()).exp()
}

/// `‖P_n‖²` in `L²(w)`.
///
/// This is `2^{2a+1}` times the constant usually displayed for this family;
/// the displayed constant is off by that factor (e.g. it gives `4π` for
/// `∫(1+x²)^{-2} dx = π/2`).
pub fn pseudo_jacobi_norm_sq(n: usize, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    let log = (2.0 * PI).ln() + ln_gamma_real(-nf - 2.0 * a)
        - (-2.0 * nf - 2.0 * a - 1.0).ln()
        - ln_gamma_real(nf + 1.0)
        - 2.0 * ln_abs_gamma(-nf - a, b)
        + (2.0 * a + 1.0) * 2f64.ln();
    log.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityCheck {
    pub integral: f64,
    pub reference: f64,
}

/// `∫ P_n P_m w dx` by quadrature, against `0` (n < m) or the squared norm.
/// Requires `a < 0`, `n ≤ m` and integrability `n + m + 2a < -1`.
pub fn orthogonality_check(n: usize, m: usize, a: f64, b: f64) -> Result<OrthogonalityCheck> {
    if !(a < 0.0) || n > m || (n + m) as f64 + 2.0 * a >= -1.0 {
        return Err(Error::OutOfRegime(format!(
            "orthogonality needs a < 0, n <= m and n + m + 2a < -1 (n={n}, m={m}, a={a})"
        )));
    }
    let pn = PseudoJacobiPoly::new(n, a, b)?;
    let pm = PseudoJacobiPoly::new(m, a, b)?;
    let integral = quadrature::real_line(
        |x| pn.eval(x) * pm.eval(x) * pseudo_jacobi_weight(x, a, b),
        1e-10,
    );
    let reference = if n == m { pseudo_jacobi_norm_sq(n, a, b) } else { 0.0 };
    Ok(OrthogonalityCheck { integral, reference })
}
