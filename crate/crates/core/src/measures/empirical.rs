use serde::Serialize;

use super::equilibrium::EquilibriumMeasure;
use crate::error::{Error, Result};

/// Moments compared by [`measure_distance`]: `n = 0, ..., 8`.
pub const DISTANCE_MAX_MOMENT: u32 = 8;
const CDF_GRID: usize = 1000;

/// Uniform probability measure on the atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<f64>) -> Result<Self> {
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("atoms must be finite".into()));
        }
        Ok(Self { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// `(S_0, ..., S_{n_max})`, `S_n = (1/N) Σ x_j^n`. Empty measures give zeros
/// beyond `S_0 = 1`.
pub fn empirical_moments(e: &EmpiricalMeasure, n_max: u32) -> Vec<f64> {
    let mut s = vec![0.0; n_max as usize + 1];
    s[0] = 1.0;
    if e.is_empty() {
        return s;
    }
    for &x in &e.atoms {
        let mut p = x;
        for sn in s.iter_mut().skip(1) {
            *sn += p;
            p *= x;
        }
    }
    let n = e.len() as f64;
    for sn in s.iter_mut().skip(1) {
        *sn /= n;
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureDistance {
    /// `|S_n - m_n|` for `n = 0, ..., 8`; empty for an empty measure.
    pub moment_gap: Vec<f64>,
    /// Largest CDF difference on a 1000-point grid covering both supports.
    pub cdf_sup_gap: f64,
}

pub fn measure_distance(e: &EmpiricalMeasure, m: &EquilibriumMeasure) -> MeasureDistance {
    if e.is_empty() {
        return MeasureDistance { moment_gap: Vec::new(), cdf_sup_gap: 1.0 };
    }
    let s = empirical_moments(e, DISTANCE_MAX_MOMENT);
    let moment_gap = (0..=DISTANCE_MAX_MOMENT).map(|n| (s[n as usize] - m.moment(n)).abs()).collect();

    let mut sorted = e.atoms.clone();
    sorted.sort_by(f64::total_cmp);
    let lo = m.x_minus.min(sorted[0]);
    let hi = m.x_plus.max(sorted[sorted.len() - 1]);
    let table = m.sampler();
    let n = sorted.len() as f64;
    let mut gap: f64 = 0.0;
    for i in 0..CDF_GRID {
        let x = lo + (hi - lo) * i as f64 / (CDF_GRID - 1) as f64;
        let below = sorted.partition_point(|a| *a <= x) as f64 / n;
        gap = gap.max((below - table.cdf(x)).abs());
    }
    MeasureDistance { moment_gap, cdf_sup_gap: gap }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudojacobi::pseudo_jacobi_zeros;
    use rand::SeedableRng;

    #[test]
    fn moments_of_two_atoms() {
        let r = 3f64.sqrt().recip();
        let e = EmpiricalMeasure::new(vec![-r, r]).unwrap();
        let s = empirical_moments(&e, 4);
        assert_eq!(s[0], 1.0);
        assert!((s[2] - 1.0 / 3.0).abs() < 1e-15);
        assert!(s[1].abs() < 1e-16 && s[3].abs() < 1e-16);
        assert!(EmpiricalMeasure::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn empty_measure() {
        let m = EquilibriumMeasure::new(1.0, 0.0).unwrap();
        let d = measure_distance(&EmpiricalMeasure::new(vec![]).unwrap(), &m);
        assert_eq!(d.cdf_sup_gap, 1.0);
        assert!(d.moment_gap.is_empty());
    }

    #[test]
    fn direct_samples_are_close() {
        let m = EquilibriumMeasure::new(1.0, 0.0).unwrap();
        let s = m.sampler();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let e = EmpiricalMeasure::new((0..100_000).map(|_| s.sample(&mut rng)).collect()).unwrap();
        let d = measure_distance(&e, &m);
        assert!(d.cdf_sup_gap < 0.01, "{}", d.cdf_sup_gap);
        assert!(d.moment_gap[2] < 0.01);
    }

    #[test]
    fn zeros_approach_equilibrium() {
        let n = 200;
        let a_hat = 1.0;
        let z = pseudo_jacobi_zeros(n, -(n as f64) - a_hat * n as f64, 0.0).unwrap();
        let m = EquilibriumMeasure::new(a_hat, 0.0).unwrap();
        let d = measure_distance(&EmpiricalMeasure::new(z.zeros).unwrap(), &m);
        assert!(d.cdf_sup_gap < 0.05, "{}", d.cdf_sup_gap);
    }
}
