use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::simpson;

/// Sign of the constant term in `(z²+1)G² - 2((â+1)z - b̂)G + σ(2â+1) = 0`.
/// The `1/z` expansion of `G` forces `σ = +1`; see
/// [`EquilibriumMeasure::resolve_quadratic_sign`].
pub const CAUCHY_CONSTANT_SIGN: f64 = 1.0;

const QUAD_TOL: f64 = 1e-14;

/// The limiting measure `â √((x-x₋)(x₊-x)) / (π(1+x²)) dx` on `[x₋, x₊]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumMeasure {
    pub a_hat: f64,
    pub b_hat: f64,
    pub x_minus: f64,
    pub x_plus: f64,
}

impl EquilibriumMeasure {
    /// `x_± = (b̂(â+1) ± √((2â+1)(â²+b̂²)))/â²`, the zeros of the discriminant
    /// of the Cauchy-transform quadratic (mean `b̂/â`).
    pub fn new(a_hat: f64, b_hat: f64) -> Result<Self> {
        if !(a_hat > 0.0) || !b_hat.is_finite() || !a_hat.is_finite() {
            return Err(Error::OutOfRegime(format!("equilibrium measure needs a_hat > 0, got {a_hat}")));
        }
        let root = ((2.0 * a_hat + 1.0) * (a_hat * a_hat + b_hat * b_hat)).sqrt();
        let centre = b_hat * (a_hat + 1.0);
        let a2 = a_hat * a_hat;
        Ok(Self { a_hat, b_hat, x_minus: (centre - root) / a2, x_plus: (centre + root) / a2 })
    }

    fn width(&self) -> f64 {
        self.x_plus - self.x_minus
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= self.x_minus || x >= self.x_plus {
            return 0.0;
        }
        self.a_hat * ((x - self.x_minus) * (self.x_plus - x)).sqrt() / (PI * (1.0 + x * x))
    }

    /// `x(θ) = x₋ + w(1 - cos θ)/2`, `θ ∈ [0, π]`.
    fn x_of(&self, theta: f64) -> f64 {
        self.x_minus + 0.5 * self.width() * (1.0 - theta.cos())
    }

    fn theta_of(&self, x: f64) -> f64 {
        (1.0 - 2.0 * (x - self.x_minus) / self.width()).clamp(-1.0, 1.0).acos()
    }

    /// Density times `dx/dθ`; smooth on `[0, π]`.
    fn weight(&self, theta: f64) -> f64 {
        let x = self.x_of(theta);
        let h = 0.5 * self.width() * theta.sin();
        self.a_hat * h * h / (PI * (1.0 + x * x))
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, theta_end: f64) -> f64 {
        simpson(|t| self.weight(t) * f(self.x_of(t)), 0.0, theta_end, QUAD_TOL)
    }

    /// Integral over the whole support. The integrand is smooth and even in
    /// θ about both ends, so the trapezoid rule converges geometrically;
    /// the panel count doubles until two levels agree.
    fn integrate_full(&self, f: impl Fn(f64) -> f64) -> f64 {
        let g = |t: f64| self.weight(t) * f(self.x_of(t));
        let mut panels = 64usize;
        let mut prev = f64::NAN;
        loop {
            let h = PI / panels as f64;
            let sum: f64 = (1..panels).map(|k| g(k as f64 * h)).sum::<f64>() + 0.5 * (g(0.0) + g(PI));
            let cur = sum * h;
            if (cur - prev).abs() <= 1e-15 * cur.abs().max(1e-300) || panels >= 1 << 20 {
                return cur;
            }
            prev = cur;
            panels *= 2;
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.x_minus {
            return 0.0;
        }
        if x >= self.x_plus {
            return 1.0;
        }
        self.integrate(|_| 1.0, self.theta_of(x)).clamp(0.0, 1.0)
    }

    pub fn moment(&self, n: u32) -> f64 {
        self.integrate_full(|x| x.powi(n as i32))
    }

    /// `G(z) = ∫ μ(dx)/(z - x)` for `z` off the support.
    pub fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re >= self.x_minus && z.re <= self.x_plus {
            return Err(Error::InvalidArgument(format!("z = {z} lies on the support")));
        }
        let re = self.integrate_full(|x| (1.0 / (z - x)).re);
        let im = self.integrate_full(|x| (1.0 / (z - x)).im);
        Ok(Complex64::new(re, im))
    }

    pub fn quadratic_residual(&self, z: Complex64) -> Result<f64> {
        self.quadratic_residual_with_sign(z, CAUCHY_CONSTANT_SIGN)
    }

    /// `|(z²+1)G² - 2((â+1)z - b̂)G + σ(2â+1)|`.
    pub fn quadratic_residual_with_sign(&self, z: Complex64, sigma: f64) -> Result<f64> {
        let g = self.cauchy(z)?;
        let q = (z * z + 1.0) * g * g - 2.0 * ((self.a_hat + 1.0) * z - self.b_hat) * g
            + sigma * (2.0 * self.a_hat + 1.0);
        Ok(q.norm())
    }

    /// Picks the constant-term sign from the large-`z` behaviour: with
    /// `G ≈ 1/z + m₁/z²`, the `z⁰` coefficient of the quadratic is
    /// `1 - 2(â+1) + σ(2â+1)`, which vanishes only for `σ = +1`. The choice is
    /// confirmed numerically at `z = 10i`.
    pub fn resolve_quadratic_sign(&self) -> Result<f64> {
        let z = Complex64::new(0.0, 10.0);
        let plus = self.quadratic_residual_with_sign(z, 1.0)?;
        let minus = self.quadratic_residual_with_sign(z, -1.0)?;
        Ok(if plus <= minus { 1.0 } else { -1.0 })
    }

    pub fn sampler(&self) -> EquilibriumSampler {
        EquilibriumSampler::new(*self)
    }
}

/// Inverse-CDF sampler and fast CDF built from a table of the CDF on a
/// uniform grid in the angle variable.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSampler {
    measure: EquilibriumMeasure,
    theta: Vec<f64>,
    cdf: Vec<f64>,
}

impl EquilibriumSampler {
    pub const GRID: usize = 4096;

    fn new(measure: EquilibriumMeasure) -> Self {
        let n = Self::GRID;
        let h = PI / n as f64;
        let theta: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let mut cdf = Vec::with_capacity(n + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let (a, b) = (theta[i], theta[i + 1]);
            acc += h / 6.0 * (measure.weight(a) + 4.0 * measure.weight(0.5 * (a + b)) + measure.weight(b));
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Self { measure, theta, cdf }
    }

    /// Table CDF, linear in the angle variable between grid points.
    pub fn cdf(&self, x: f64) -> f64 {
        let m = &self.measure;
        if x <= m.x_minus {
            return 0.0;
        }
        if x >= m.x_plus {
            return 1.0;
        }
        let t = m.theta_of(x);
        let h = PI / Self::GRID as f64;
        let i = ((t / h) as usize).min(Self::GRID - 1);
        let s = (t - self.theta[i]) / h;
        self.cdf[i] + s * (self.cdf[i + 1] - self.cdf[i])
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|c| *c < u).clamp(1, Self::GRID);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let s = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.measure.x_of(self.theta[i - 1] + s * (self.theta[i] - self.theta[i - 1]))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn support_and_mass() {
        let m = EquilibriumMeasure::new(1.0, 0.0).unwrap();
        assert_relative_eq!(m.x_minus, -3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(m.x_plus, 3f64.sqrt(), epsilon = 1e-15);
        assert!((m.moment(0) - 1.0).abs() < 1e-8);
        assert_eq!(m.density(2.0), 0.0);
        for &(a, b) in &[(0.5, 0.3), (2.0, -1.0), (7.0, 4.0)] {
            let m = EquilibriumMeasure::new(a, b).unwrap();
            assert!((m.moment(0) - 1.0).abs() < 1e-8, "a={a} b={b}");
            assert!(m.x_minus < m.x_plus);
            // stationary first moment b̂/â
            assert_relative_eq!(m.moment(1), b / a, epsilon = 1e-9);
        }
        assert!(EquilibriumMeasure::new(0.0, 1.0).is_err());
    }

    #[test]
    fn moments() {
        let m = EquilibriumMeasure::new(1.0, 0.0).unwrap();
        assert_relative_eq!(m.moment(2), 0.5, epsilon = 1e-10);
        assert!(m.moment(3).abs() < 1e-12);
        assert!(m.moment(5).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_monotone_and_matches_table() {
        let m = EquilibriumMeasure::new(1.5, 0.7).unwrap();
        let s = m.sampler();
        let mut prev = 0.0;
        for i in 0..=50 {
            let x = m.x_minus + (m.x_plus - m.x_minus) * i as f64 / 50.0;
            let c = m.cdf(x);
            assert!(c >= prev - 1e-15);
            prev = c;
            assert!((c - s.cdf(x)).abs() < 1e-6);
            assert!((s.quantile(s.cdf(x)) - x).abs() < 1e-6 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn cauchy_transform() {
        let m = EquilibriumMeasure::new(1.0, 0.0).unwrap();
        let z = Complex64::new(0.0, 100.0);
        assert!((z * m.cauchy(z).unwrap() - 1.0).norm() < 1e-3);
        let z = Complex64::new(0.7, 1.3);
        let g = m.cauchy(z).unwrap();
        let g2 = m.cauchy(-z.conj()).unwrap();
        assert!((g2 + g.conj()).norm() < 1e-12);
        assert!(m.cauchy(Complex64::new(0.5, 0.0)).is_err());

        // moment series at z = 2i; terms decay like (√3/2)^n, so twenty terms
        // leave ~1e-4 and two hundred reach the quadrature accuracy
        let z = Complex64::new(0.0, 2.0);
        let g = m.cauchy(z).unwrap();
        let partial = |k: u32| (0..=k).map(|n| m.moment(n) / z.powu(n + 1)).sum::<Complex64>();
        assert!((partial(20) - g).norm() < 1e-3);
        assert!((partial(200) - g).norm() < 1e-8);
    }

    #[test]
    fn quadratic_sign() {
        let m = EquilibriumMeasure::new(1.0, 0.0).unwrap();
        assert_eq!(m.resolve_quadratic_sign().unwrap(), CAUCHY_CONSTANT_SIGN);
        assert!(m.quadratic_residual(Complex64::new(0.0, 2.0)).unwrap() < 1e-6);
        assert!(m.quadratic_residual(Complex64::new(0.0, 100.0)).unwrap() < 1e-4);
        assert!(m.quadratic_residual_with_sign(Complex64::new(0.0, 2.0), -1.0).unwrap() > 1.0);
        for &(a, b) in &[(0.5, 0.3), (3.0, -2.0)] {
            let m = EquilibriumMeasure::new(a, b).unwrap();
            assert_eq!(m.resolve_quadratic_sign().unwrap(), 1.0);
            for z in [Complex64::new(0.3, 1.0), Complex64::new(-5.0, 0.2), Complex64::new(m.x_plus + 1.0, 0.0)] {
                assert!(m.quadratic_residual(z).unwrap() < 1e-8, "a={a} b={b} z={z}");
            }
        }
    }

    #[test]
    fn sampler_reproduces_moments() {
        let m = EquilibriumMeasure::new(1.0, 0.5).unwrap();
        let s = m.sampler();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - m.moment(1)).abs() < 4.0 * (var / n as f64).sqrt());
    }
}
