use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::is_ordered;

/// `Σ_j w_j δ_{x_j}` with strictly increasing atoms and positive weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteOrthMeasure {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteOrthMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidArgument("atoms and weights differ in length".into()));
        }
        if !is_ordered(&atoms, true) {
            return Err(Error::Numerical("atoms must be strictly increasing (rank deficient)".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(Self { atoms, weights })
    }

    /// The measure `Σ (1 + z_j²) δ_{z_j}` built on a zero vector.
    pub fn from_zeros(z: &[f64]) -> Result<Self> {
        Self::new(z.to_vec(), z.iter().map(|x| 1.0 + x * x).collect())
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }
}

/// Orthonormal polynomials `q_0, ..., q_K` of a discrete measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthonormalSystem {
    /// Ascending monomial coefficients of each `q_k`.
    pub coeffs: Vec<Vec<f64>>,
    /// `values[k][j] = q_k(atom_j)`.
    pub values: Vec<Vec<f64>>,
}

/// Gram–Schmidt on `1, x, x², ...` in the discrete inner product, carried out
/// as a Stieltjes/Lanczos recursion `x q_k = b_{k+1} q_{k+1} + a_k q_k + b_k q_{k-1}`
/// with full reorthogonalisation of the value vectors.
pub fn discrete_orthonormal_polys(m: &DiscreteOrthMeasure, up_to: usize) -> Result<OrthonormalSystem> {
    let n = m.atoms.len();
    if up_to >= n {
        return Err(Error::InvalidArgument(format!(
            "degree {up_to} needs more than {n} atoms"
        )));
    }
    let total: f64 = m.weights.iter().sum();
    let q0 = total.powf(-0.5);
    let mut values = vec![vec![q0; n]];
    let mut coeffs = vec![vec![q0]];
    let mut b_prev = 0.0;
    for k in 0..up_to {
        let qk = &values[k];
        let xq: Vec<f64> = m.atoms.iter().zip(qk).map(|(x, q)| x * q).collect();
        let a_k = m.inner(&xq, qk);
        let mut v: Vec<f64> = (0..n)
            .map(|j| xq[j] - a_k * qk[j] - if k > 0 { b_prev * values[k - 1][j] } else { 0.0 })
            .collect();
        // Two passes of reorthogonalisation against all previous vectors.
        for _ in 0..2 {
            for q in &values {
                let c = m.inner(&v, q);
                for j in 0..n {
                    v[j] -= c * q[j];
                }
            }
        }
        let norm = m.inner(&v, &v).sqrt();
        let xq_norm = m.inner(&xq, &xq).sqrt();
        if !(norm > 1e-12 * xq_norm.max(1e-300)) {
            return Err(Error::Numerical(format!("rank deficiency at degree {}", k + 1)));
        }
        for vj in v.iter_mut() {
            *vj /= norm;
        }
        // Coefficients follow the same recursion: q_{k+1} = ((x - a_k) q_k - b_k q_{k-1}) / b_{k+1}.
        let mut c = vec![0.0; k + 2];
        for (i, &ci) in coeffs[k].iter().enumerate() {
            c[i + 1] += ci;
            c[i] -= a_k * ci;
        }
        if k > 0 {
            for (i, &ci) in coeffs[k - 1].iter().enumerate() {
                c[i] -= b_prev * ci;
            }
        }
        for ci in c.iter_mut() {
            *ci /= norm;
        }
        coeffs.push(c);
        values.push(v);
        b_prev = norm;
    }
    Ok(OrthonormalSystem { coeffs, values })
}
