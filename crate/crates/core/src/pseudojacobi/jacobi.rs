use super::tridiag::MonicRecurrence;
use super::zeros::{pseudo_jacobi_zeros, ZeroSet, ZeroSource};
use crate::error::{Error, Result};
use crate::model::{check_separated, is_ordered, stationary_pj_a};

/// Monic Jacobi recurrence `p_{k+1} = (x - d_k) p_k - e_k p_{k-1}`.
fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> MonicRecurrence {
    let s = alpha + beta;
    let diag = (0..n)
        .map(|k| {
            if k == 0 {
                (beta - alpha) / (s + 2.0)
            } else {
                let m = 2.0 * k as f64 + s;
                (beta * beta - alpha * alpha) / (m * (m + 2.0))
            }
        })
        .collect();
    let coupling = (1..n)
        .map(|k| {
            let kf = k as f64;
            if k == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                let m = 2.0 * kf + s;
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + s) / (m * m * (m + 1.0) * (m - 1.0))
            }
        })
        .collect();
    MonicRecurrence { diag, coupling }
}

/// Zeros of the Jacobi polynomial `P_N^{(α, β)}` on `(-1, 1)`, `α, β > -1`.
pub fn classical_jacobi_zeros(n: usize, alpha: f64, beta: f64) -> Result<ZeroSet> {
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::OutOfRegime(format!(
            "Jacobi parameters must exceed -1 (alpha={alpha}, beta={beta})"
        )));
    }
    let (zeros, residual) = jacobi_recurrence(n, alpha, beta).zeros(1e-8)?;
    check_separated(&zeros, 0.0)
        .map_err(|_| Error::Numerical("computed Jacobi zeros are not simple".into()))?;
    if zeros.iter().any(|z| z.abs() >= 1.0) {
        return Err(Error::Numerical("Jacobi zero outside (-1, 1)".into()));
    }
    let r = jacobi_stieltjes_residual(&zeros, alpha, beta)?;
    let scale = zeros
        .iter()
        .map(|z| (alpha + 1.0).abs() / (1.0 - z).abs() + (beta + 1.0).abs() / (1.0 + z).abs())
        .fold(0.0, f64::max)
        + stieltjes_scale(&zeros);
    if r > 1e-9 * (1.0 + scale) {
        return Err(Error::Numerical(format!("Stieltjes residual {r:e} after polishing")));
    }
    Ok(ZeroSet {
        zeros,
        source: ZeroSource::ClassicalJacobi { degree: n, alpha, beta },
        residual,
    })
}

fn stieltjes_scale(z: &[f64]) -> f64 {
    (0..z.len())
        .map(|j| {
            z.iter()
                .enumerate()
                .filter(|&(l, _)| l != j)
                .map(|(_, zl)| 2.0 / (z[j] - zl).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `max_j |2 Σ_{l≠j} 1/(z_j - z_l) + (α+1)/(z_j - 1) + (β+1)/(z_j + 1)|`,
/// the Stieltjes equilibrium conditions for Jacobi zeros.
pub fn jacobi_stieltjes_residual(z: &[f64], alpha: f64, beta: f64) -> Result<f64> {
    if !is_ordered(z, true) {
        return Err(check_separated(z, 0.0).err().unwrap_or(Error::Unordered));
    }
    let mut worst: f64 = 0.0;
    for (j, &zj) in z.iter().enumerate() {
        let mut v = (alpha + 1.0) / (zj - 1.0) + (beta + 1.0) / (zj + 1.0);
        for (l, &zl) in z.iter().enumerate() {
            if l != j {
                v += 2.0 / (zj - zl);
            }
        }
        worst = worst.max(v.abs());
    }
    Ok(worst)
}

/// Compares the positive zeros `z` of `P_N(·; -N-a, 0)`, mapped by
/// `z ↦ (1 - z²)/(1 + z²)`, with the zeros of `P_{⌊N/2⌋}^{(∓1/2, a-1/2)}`
/// (upper sign for even `N`). Returns the largest mismatch.
pub fn zero_map_check(n: usize, a: f64) -> Result<f64> {
    if !(a > 0.0) || n < 2 {
        return Err(Error::OutOfRegime(format!(
            "zero map check needs a > 0 and N >= 2 (N={n}, a={a})"
        )));
    }
    let pj = pseudo_jacobi_zeros(n, stationary_pj_a(n, a), 0.0)?;
    let mut images: Vec<f64> = pj
        .zeros
        .iter()
        .skip(n - n / 2)
        .map(|z| (1.0 - z * z) / (1.0 + z * z))
        .collect();
    images.sort_by(f64::total_cmp);
    let alpha = if n.is_multiple_of(2) { -0.5 } else { 0.5 };
    let jac = classical_jacobi_zeros(n / 2, alpha, a - 0.5)?;
    let mut worst: f64 = 0.0;
    for (u, v) in images.iter().zip(&jac.zeros) {
        worst = worst.max((u - v).abs());
    }
    if n % 2 == 1 {
        // the middle zero of an odd-degree symmetric polynomial is 0
        worst = worst.max(pj.zeros[n / 2].abs());
    }
    Ok(worst)
}
