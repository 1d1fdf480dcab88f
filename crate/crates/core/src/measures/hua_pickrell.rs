use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::{Configuration, ModelParams};
use crate::special::{ln_abs_gamma, ln_gamma_real};

/// The β-Hua-Pickrell distribution on the ordered chamber.
#[derive(Debug, Clone)]
pub struct HuaPickrellMeasure {
    pub params: ModelParams,
    beta: f64,
    log_norm: OnceLock<f64>,
}

impl HuaPickrellMeasure {
    pub fn new(params: ModelParams) -> Result<Self> {
        let beta = check_regime(&params)?;
        Ok(Self { params, beta, log_norm: OnceLock::new() })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `log C`, computed on first use.
    pub fn log_norm(&self) -> f64 {
        *self.log_norm.get_or_init(|| log_norm_unchecked(&self.params, self.beta))
    }

    pub fn log_density(&self, x: &Configuration) -> f64 {
        self.log_norm() + log_density_unchecked(x.as_slice(), &self.params, self.beta)
    }

    pub fn log_density_unnormalized(&self, x: &Configuration) -> f64 {
        log_density_unchecked(x.as_slice(), &self.params, self.beta)
    }
}

fn check_regime(params: &ModelParams) -> Result<f64> {
    let beta = params
        .beta
        .value()
        .ok_or_else(|| Error::OutOfRegime("Hua-Pickrell density needs finite beta".into()))?;
    if !(params.a > -1.0 / beta) {
        return Err(Error::OutOfRegime(format!(
            "density is not normalisable for a = {} <= -1/beta = {}",
            params.a,
            -1.0 / beta
        )));
    }
    if params.n_particles == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    Ok(beta)
}

/// `Σ_j [(β(1-N-a)/2 - 1) log(1+x_j²) + βb arctan x_j] + β Σ_{j<k} log(x_k - x_j)`,
/// or `-∞` off the open chamber.
pub fn hp_log_density_unnormalized(x: &Configuration, params: &ModelParams) -> Result<f64> {
    let beta = params
        .beta
        .value()
        .ok_or_else(|| Error::OutOfRegime("Hua-Pickrell density needs finite beta".into()))?;
    Ok(log_density_unchecked(x.as_slice(), params, beta))
}

fn log_density_unchecked(x: &[f64], params: &ModelParams, beta: f64) -> f64 {
    let n = x.len() as f64;
    let e = beta * (1.0 - n - params.a) / 2.0 - 1.0;
    let mut v = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        v += e * xj.mul_add(xj, 1.0).ln() + beta * params.b * xj.atan();
        for &xk in &x[j + 1..] {
            let d = xk - xj;
            if !(d > 0.0) {
                return f64::NEG_INFINITY;
            }
            v += beta * d.ln();
        }
    }
    v
}

/// `log C` such that `C · f` integrates to one over the ordered chamber.
///
/// From the Cauchy–Selberg integral with `α = β(N-1+a)/2 + 1 + iβb/2`,
/// `γ = β/2`:
/// `1/C = (1/N!) 2^{γN(N-1) - (2Re α - 2)N} π^N
///        Π_{j=0}^{N-1} Γ(2Re α - (N+j-1)γ - 1) Γ(1+(j+1)γ) / (|Γ(α - jγ)|² Γ(1+γ))`.
pub fn hp_log_normalization(params: &ModelParams) -> Result<f64> {
    let beta = check_regime(params)?;
    Ok(log_norm_unchecked(params, beta))
}

fn log_norm_unchecked(params: &ModelParams, beta: f64) -> f64 {
    let n = params.n_particles;
    let nf = n as f64;
    let g = beta / 2.0;
    let re = beta * (nf - 1.0 + params.a) / 2.0 + 1.0;
    let im = beta * params.b / 2.0;
    let mut log_inv = -ln_gamma_real(nf + 1.0)
        + (g * nf * (nf - 1.0) - (2.0 * re - 2.0) * nf) * std::f64::consts::LN_2
        + nf * std::f64::consts::PI.ln();
    for j in 0..n {
        let jf = j as f64;
        log_inv += ln_gamma_real(2.0 * re - (nf + jf - 1.0) * g - 1.0) + ln_gamma_real(1.0 + (jf + 1.0) * g)
            - 2.0 * ln_abs_gamma(re - jf * g, im)
            - ln_gamma_real(1.0 + g);
    }
    -log_inv
}

fn log_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// The Gibbs potential in the chart `y = arsinh x`:
/// `V(y) = -β[(1-N-1/β-a) Σ log cosh y_j + b Σ arctan(sinh y_j)
///          + Σ_{j<k} log(sinh((y_k-y_j)/2) cosh((y_j+y_k)/2))]`,
/// `+∞` off the open chamber. `exp(-V)` is proportional to the density of
/// `arsinh X`.
pub fn potential_v(y: &[f64], params: &ModelParams) -> Result<f64> {
    let beta = params
        .beta
        .value()
        .ok_or_else(|| Error::OutOfRegime("the potential needs finite beta".into()))?;
    let n = y.len() as f64;
    let lin = 1.0 - n - 1.0 / beta - params.a;
    let mut s = 0.0;
    for (j, &yj) in y.iter().enumerate() {
        s += lin * log_cosh(yj) + params.b * yj.sinh().atan();
        for &yk in &y[j + 1..] {
            let d = 0.5 * (yk - yj);
            if !(d > 0.0) {
                return Ok(f64::INFINITY);
            }
            s += d.sinh().ln() + log_cosh(0.5 * (yj + yk));
        }
    }
    Ok(-beta * s)
}
