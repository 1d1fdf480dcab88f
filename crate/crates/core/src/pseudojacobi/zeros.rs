use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::recurrence_step;
use super::tridiag::MonicRecurrence;
use crate::error::{Error, Result};
use crate::model::{check_separated, is_ordered};

/// Relative tolerance for the electrostatic post-check of computed zeros.
const ELECTROSTATIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ZeroSource {
    PseudoJacobi { degree: usize, a: f64, b: f64 },
    ClassicalJacobi { degree: usize, alpha: f64, beta: f64 },
}

/// Strictly increasing real zeros of a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    pub source: ZeroSource,
    /// Largest Newton correction `|P(z_j) / P'(z_j)|` left after polishing.
    /// It bounds the distance to the exact zero and, unlike `|P(z_j)|`, does
    /// not depend on how the polynomial is normalised.
    pub residual: f64,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn min_gap(&self) -> f64 {
        crate::model::min_gap(&self.zeros)
    }
}

/// Zeros of `P_n(·; a, b)` for `a < 0`, `n < -a`.
///
/// The polynomials `P_0, ..., P_n` satisfy a three-term recurrence, so their
/// zeros are the eigenvalues of the associated tridiagonal (comrade) matrix,
/// which is diagonally similar to a symmetric one in this regime. The
/// eigenvalues are Newton-polished on the same recurrence and finally checked
/// against the electrostatic equations.
pub fn pseudo_jacobi_zeros(n: usize, a: f64, b: f64) -> Result<ZeroSet> {
    if !(a < 0.0) || n as f64 >= -a || n == 0 || !b.is_finite() {
        return Err(Error::OutOfRegime(format!(
            "pseudo-Jacobi zeros need a < 0 and 1 <= N < -a (N={n}, a={a})"
        )));
    }
    // x P_k = alpha_k P_{k+1} + beta_k P_k + gamma_k P_{k-1}
    let mut alpha = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let s = recurrence_step(k, a, b)?;
        alpha.push(s.d / s.a);
        diag.push(-s.b / s.a);
        gamma.push(-s.c / s.a);
    }
    let coupling: Vec<f64> = (1..n).map(|k| alpha[k - 1] * gamma[k]).collect();
    let rec = MonicRecurrence { diag, coupling };
    let (zeros, residual) = rec.zeros(1e-8)?;
    check_separated(&zeros, 0.0)
        .map_err(|_| Error::Numerical("computed zeros are not simple".into()))?;

    let (abs, rel) = electrostatic_parts(&zeros, a, b);
    if rel > ELECTROSTATIC_TOL {
        return Err(Error::Numerical(format!(
            "electrostatic residual {abs:e} (relative {rel:e}) after polishing"
        )));
    }
    Ok(ZeroSet {
        zeros,
        source: ZeroSource::PseudoJacobi { degree: n, a, b },
        residual,
    })
}

/// Per-particle `|(a+1) z_j + b + Σ_{k≠j} (1 + z_j²)/(z_j - z_k)|`.
pub fn electrostatic_residuals(z: &[f64], a: f64, b: f64) -> Result<Vec<f64>> {
    if !is_ordered(z, true) {
        return Err(check_separated(z, 0.0).err().unwrap_or(Error::Unordered));
    }
    Ok((0..z.len()).map(|j| electrostatic_term(z, j, a, b).0.abs()).collect())
}

/// Maximum of [`electrostatic_residuals`].
pub fn electrostatic_residual(z: &[f64], a: f64, b: f64) -> Result<f64> {
    Ok(electrostatic_residuals(z, a, b)?.into_iter().fold(0.0, f64::max))
}

/// Signed value and absolute summand scale of equation `j`.
fn electrostatic_term(z: &[f64], j: usize, a: f64, b: f64) -> (f64, f64) {
    let zj = z[j];
    let lin = (a + 1.0) * zj + b;
    let mut sum = lin;
    let mut scale = (a + 1.0).abs() * zj.abs() + b.abs();
    for (k, &zk) in z.iter().enumerate() {
        if k != j {
            let t = (1.0 + zj * zj) / (zj - zk);
            sum += t;
            scale += t.abs();
        }
    }
    (sum, scale)
}

/// (max absolute residual, max residual relative to summand scale).
fn electrostatic_parts(z: &[f64], a: f64, b: f64) -> (f64, f64) {
    let mut abs: f64 = 0.0;
    let mut rel: f64 = 0.0;
    for j in 0..z.len() {
        let (v, s) = electrostatic_term(z, j, a, b);
        abs = abs.max(v.abs());
        rel = rel.max(v.abs() / (1.0 + s));
    }
    (abs, rel)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HObjective {
    pub log_value: f64,
    /// `∇ log h`; component `j` is the electrostatic expression divided by
    /// `1 + x_j²`.
    pub grad_log: Vec<f64>,
}

impl HObjective {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `h(x) = Π_j (1+x_j²)^{(a+1)/2} e^{b arctan x_j} · Π_{j<k} (x_k - x_j)`
/// and its log-gradient on the open chamber.
pub fn h_objective(x: &[f64], a: f64, b: f64) -> Result<HObjective> {
    if !is_ordered(x, true) {
        return Err(check_separated(x, 0.0).err().unwrap_or(Error::Unordered));
    }
    let n = x.len();
    let mut log_value = 0.0;
    let mut grad = vec![0.0; n];
    for j in 0..n {
        let xj = x[j];
        let q = 1.0 + xj * xj;
        log_value += 0.5 * (a + 1.0) * q.ln() + b * xj.atan();
        let mut g = ((a + 1.0) * xj + b) / q;
        for k in 0..n {
            if k != j {
                g += 1.0 / (xj - x[k]);
            }
        }
        grad[j] = g;
        for k in (j + 1)..n {
            log_value += (x[k] - xj).ln();
        }
    }
    Ok(HObjective { log_value, grad_log: grad })
}

/// Damped Newton solve of the electrostatic equations from `x0`, kept inside
/// the open chamber. Independent of the recurrence machinery. Stops once every
/// equation is below `tol` relative to its summand scale.
pub fn electrostatic_newton(x0: &[f64], a: f64, b: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !is_ordered(x0, true) {
        return Err(Error::Unordered);
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    // The unscaled equations: dividing by 1 + x_j² would let a particle
    // escape to infinity while the residual decays like 1/x_j.
    let residual = |x: &[f64]| -> DVector<f64> {
        DVector::from_iterator(n, (0..n).map(|j| electrostatic_term(x, j, a, b).0))
    };
    let mut f = residual(&x);
    let mut mu = 1e-3;
    let converged = |x: &[f64]| electrostatic_parts(x, a, b).1 < tol;
    for _ in 0..max_iter {
        if converged(&x) {
            return Ok(x);
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let q = 1.0 + x[j] * x[j];
            jac[(j, j)] = a + 1.0;
            for k in 0..n {
                if k != j {
                    let d = x[j] - x[k];
                    jac[(j, j)] += 2.0 * x[j] / d - q / (d * d);
                    jac[(j, k)] = q / (d * d);
                }
            }
        }
        // Levenberg-Marquardt: the plain Newton matrix can be singular at
        // symmetric starting points.
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &f;
        let mut accepted = false;
        while mu < 1e12 {
            let mut m = jtj.clone();
            for i in 0..n {
                m[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            if let Some(step) = m.cholesky().map(|c| c.solve(&(-&g))) {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, s)| xi + s).collect();
                if is_ordered(&trial, true) {
                    let ft = residual(&trial);
                    if ft.norm() < f.norm() {
                        x = trial;
                        f = ft;
                        mu = (mu * 0.3).max(1e-15);
                        accepted = true;
                        break;
                    }
                }
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    if converged(&x) {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "electrostatic Newton did not converge (|F| = {:e})",
            f.amax()
        )))
    }
}
