//! Zeros of polynomials given by a monic three-term recurrence
//! `p_{k+1} = (x - d_k) p_k - e_k p_{k-1}`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Monic recurrence data: `diag = (d_0, ..., d_{n-1})` and
/// `coupling = (e_1, ..., e_{n-1})`.
pub(crate) struct MonicRecurrence {
    pub diag: Vec<f64>,
    pub coupling: Vec<f64>,
}

impl MonicRecurrence {
    pub fn degree(&self) -> usize {
        self.diag.len()
    }

    /// Newton correction `p_n(x) / p_n'(x)`, computed with rescaling so
    /// that high degrees do not overflow.
    pub fn newton_step(&self, x: f64) -> f64 {
        let n = self.degree();
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut dp_prev, mut dp) = (0.0, 0.0);
        for k in 0..n {
            let e = if k == 0 { 0.0 } else { self.coupling[k - 1] };
            let p_next = (x - self.diag[k]) * p - e * p_prev;
            let dp_next = p + (x - self.diag[k]) * dp - e * dp_prev;
            p_prev = p;
            p = p_next;
            dp_prev = dp;
            dp = dp_next;
            let s = p.abs().max(dp.abs());
            if s > 1e150 || (s < 1e-150 && s > 0.0) {
                p /= s;
                p_prev /= s;
                dp /= s;
                dp_prev /= s;
            }
        }
        if dp == 0.0 {
            0.0
        } else {
            p / dp
        }
    }

    /// Real zeros, sorted. Uses a symmetric tridiagonal eigensolve when all
    /// couplings are positive and a general eigensolve otherwise.
    pub fn zeros(&self, imag_tol: f64) -> Result<(Vec<f64>, f64)> {
        let n = self.degree();
        if n == 0 {
            return Ok((Vec::new(), 0.0));
        }
        let mut roots: Vec<f64> = if self.coupling.iter().all(|&e| e > 0.0) {
            let mut t = DMatrix::<f64>::zeros(n, n);
            for k in 0..n {
                t[(k, k)] = self.diag[k];
            }
            for k in 1..n {
                let s = self.coupling[k - 1].sqrt();
                t[(k, k - 1)] = s;
                t[(k - 1, k)] = s;
            }
            SymmetricEigen::new(t).eigenvalues.iter().copied().collect()
        } else {
            let mut t = DMatrix::<f64>::zeros(n, n);
            for k in 0..n {
                t[(k, k)] = self.diag[k];
            }
            for k in 1..n {
                t[(k, k - 1)] = 1.0;
                t[(k - 1, k)] = self.coupling[k - 1];
            }
            let eig = t.complex_eigenvalues();
            let max_imag = eig
                .iter()
                .map(|z| z.im.abs() / (1.0 + z.re.abs()))
                .fold(0.0, f64::max);
            if max_imag > imag_tol {
                return Err(Error::Numerical(format!(
                    "recurrence matrix has non-real eigenvalues (max |Im| = {max_imag:e})"
                )));
            }
            eig.iter().map(|z| z.re).collect()
        };
        roots.sort_by(f64::total_cmp);
        let residual = self.polish(&mut roots);
        Ok((roots, residual))
    }

    /// Newton polish that never moves a zero past the midpoint to its
    /// neighbours. Returns the largest remaining Newton correction.
    fn polish(&self, roots: &mut [f64]) -> f64 {
        let n = roots.len();
        let original = roots.to_vec();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let lo = if j > 0 { 0.5 * (original[j - 1] + original[j]) } else { f64::NEG_INFINITY };
            let hi = if j + 1 < n { 0.5 * (original[j] + original[j + 1]) } else { f64::INFINITY };
            let mut x = original[j];
            let mut step = self.newton_step(x);
            for _ in 0..6 {
                if step == 0.0 || !step.is_finite() {
                    break;
                }
                let trial = x - step;
                if !(trial > lo && trial < hi) {
                    break;
                }
                let next = self.newton_step(trial);
                if !(next.abs() < step.abs()) {
                    break;
                }
                x = trial;
                step = next;
            }
            roots[j] = x;
            worst = worst.max(step.abs());
        }
        worst
    }
}
