use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::stationary_pj_a;
use crate::pseudojacobi::{discrete_orthonormal_polys, pseudo_jacobi_zeros, DiscreteOrthMeasure, ZeroSet};
use crate::special::ln_gamma_real;

/// Relative tolerance of the spectral self-check in [`build_covariances`].
pub const SPECTRUM_TOL: f64 = 1e-8;

/// Limit covariance data of the freezing CLT at the zeros `z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceSet {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub zeros: ZeroSet,
    pub s: DMatrix<f64>,
    /// `S̃_{jk} = S_{jk} √(1+z_j²) √(1+z_k²)`.
    pub s_tilde: DMatrix<f64>,
    /// `Σ = S^{-1}`.
    pub sigma: DMatrix<f64>,
    /// Computed spectrum of `S̃`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest relative deviation of `eigenvalues` from `k(a+(k-1)/2)`.
    pub spectrum_defect: f64,
}

impl CovarianceSet {
    pub fn det_s(&self) -> f64 {
        let scale: f64 = self.zeros.zeros.iter().map(|z| 1.0 + z * z).product();
        self.eigenvalues.iter().product::<f64>() / scale
    }
}

/// `λ_k = k(a + (k-1)/2)`, `k = 1, ..., N`.
pub fn clt_eigenvalues(n: usize, a: f64) -> Vec<f64> {
    (1..=n).map(|k| k as f64 * (a + (k as f64 - 1.0) / 2.0)).collect()
}

/// `det S = N! Π_{j<N} (2a+j)³ / (2^{3N} Π_{j<N} ((a+j)² + b²))`.
pub fn det_s_closed_form(n: usize, a: f64, b: f64) -> f64 {
    let mut log = ln_gamma_real(n as f64 + 1.0) - 3.0 * n as f64 * std::f64::consts::LN_2;
    for j in 0..n {
        let j = j as f64;
        log += 3.0 * (2.0 * a + j).ln() - ((a + j).powi(2) + b * b).ln();
    }
    log.exp()
}

fn s_matrix(z: &[f64], n: usize, a: f64, b: f64) -> DMatrix<f64> {
    let nf = n as f64;
    DMatrix::from_fn(n, n, |j, k| {
        if j != k {
            -(z[j] - z[k]).powi(-2)
        } else {
            let zj = z[j];
            let q = 1.0 + zj * zj;
            let inter: f64 = z.iter().enumerate().filter(|(l, _)| *l != j).map(|(_, zl)| (zj - zl).powi(-2)).sum();
            inter + ((nf + a - 1.0) * (1.0 - zj * zj) + 2.0 * b * zj) / (q * q)
        }
    })
}

/// Builds `S`, `S̃` and `Σ` for the frozen state of `(N, a, b)`. `Σ` is
/// obtained from the eigendecomposition of `S̃` as `D^{1/2} S̃^{-1} D^{1/2}`,
/// `D = diag(1+z_j²)`. Fails with an integrity error if the spectrum of `S̃`
/// misses `k(a+(k-1)/2)` by more than [`SPECTRUM_TOL`] relative.
pub fn build_covariances(n: usize, a: f64, b: f64) -> Result<CovarianceSet> {
    if !(a > 0.0) || !b.is_finite() {
        return Err(Error::OutOfRegime(format!("the freezing CLT needs a > 0 (got a = {a}, b = {b})")));
    }
    let zeros = pseudo_jacobi_zeros(n, stationary_pj_a(n, a), b)?;
    let z = &zeros.zeros;
    let s = s_matrix(z, n, a, b);
    let root_d = DVector::from_iterator(n, z.iter().map(|zj| (1.0 + zj * zj).sqrt()));
    let s_tilde = DMatrix::from_fn(n, n, |j, k| s[(j, k)] * root_d[j] * root_d[k]);

    let eig = SymmetricEigen::new(s_tilde.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let expected = clt_eigenvalues(n, a);
    let spectrum_defect = eigenvalues
        .iter()
        .zip(&expected)
        .map(|(got, want)| ((got - want) / want).abs())
        .fold(0.0, f64::max);
    if !(spectrum_defect <= SPECTRUM_TOL) || !(eigenvalues[0] > 0.0) {
        return Err(Error::Integrity(format!(
            "spectrum of S̃ {eigenvalues:?} deviates from {expected:?} (relative {spectrum_defect:e})"
        )));
    }

    let inv_lambda = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
    let s_tilde_inv = &eig.eigenvectors * inv_lambda * eig.eigenvectors.transpose();
    let mut sigma = DMatrix::from_fn(n, n, |j, k| s_tilde_inv[(j, k)] * root_d[j] * root_d[k]);
    sigma = (&sigma + sigma.transpose()) * 0.5;

    Ok(CovarianceSet { n, a, b, zeros, s, s_tilde, sigma, eigenvalues, spectrum_defect })
}

/// The vectors `v_k = (q_{k-1}(z_j) √(1+z_j²))_j`, `q` orthonormal for
/// `Σ_j (1+z_j²) δ_{z_j}`; entry `k-1` is `v_k`.
pub fn clt_eigenvectors(cs: &CovarianceSet) -> Result<Vec<DVector<f64>>> {
    let z = &cs.zeros.zeros;
    let measure = DiscreteOrthMeasure::from_zeros(z)?;
    let system = discrete_orthonormal_polys(&measure, cs.n - 1)?;
    Ok(system
        .values
        .iter()
        .map(|q| DVector::from_iterator(cs.n, q.iter().zip(z).map(|(qj, zj)| qj * (1.0 + zj * zj).sqrt())))
        .collect())
}

/// `max_k ‖S̃ v_k − λ_k v_k‖ / ‖v_k‖` over the vectors of [`clt_eigenvectors`].
pub fn eigenvector_structure_check(cs: &CovarianceSet) -> Result<f64> {
    let lambda = clt_eigenvalues(cs.n, cs.a);
    let vs = clt_eigenvectors(cs)?;
    Ok(vs
        .iter()
        .zip(&lambda)
        .map(|(v, l)| (&cs.s_tilde * v - v * *l).norm() / v.norm())
        .fold(0.0, f64::max))
}
