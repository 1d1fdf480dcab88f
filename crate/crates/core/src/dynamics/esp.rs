use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{elementary_symmetric_all, Configuration, ModelParams};
use crate::ode::{self, StepControl};
use crate::poly;

/// Elementary symmetric polynomials `y_1, ..., y_N` of a configuration.
/// `y_0 = 1` is implicit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EspState {
    pub y: Vec<f64>,
    pub params: ModelParams,
}

impl EspState {
    pub fn new(y: Vec<f64>, params: ModelParams) -> Result<Self> {
        if y.len() != params.n_particles {
            return Err(Error::InvalidArgument(format!(
                "expected {} symmetric functions, got {}",
                params.n_particles,
                y.len()
            )));
        }
        Ok(Self { y, params })
    }

    pub fn from_config(x: &Configuration, params: ModelParams) -> Result<Self> {
        let all = elementary_symmetric_all(x.as_slice());
        Self::new(all[1..].to_vec(), params)
    }

    /// Whether every mode decays, i.e. all rates `c(m) = m(2a+m-1)` are
    /// positive. This is exactly `a > 0`; otherwise the flow is not
    /// attracted to the stationary point.
    pub fn is_attracting(&self) -> bool {
        (1..=self.params.n_particles).all(|m| rate(m, self.params.a) > 0.0)
    }

    fn at(&self, m: isize) -> f64 {
        match m {
            m if m < 0 => 0.0,
            0 => 1.0,
            m => self.y[m as usize - 1],
        }
    }
}

fn rate(m: usize, a: f64) -> f64 {
    let m = m as f64;
    m * (2.0 * a + m - 1.0)
}

/// `dy_m = -c(m) y_m + 2b(N-m+1) y_{m-1} - (N-m+2)(N-m+1) y_{m-2}`.
pub fn esp_rhs(s: &EspState) -> Vec<f64> {
    let n = s.params.n_particles;
    let (a, b) = (s.params.a, s.params.b);
    (1..=n)
        .map(|m| {
            let mi = m as isize;
            let nm = (n - m) as f64;
            -rate(m, a) * s.at(mi) + 2.0 * b * (nm + 1.0) * s.at(mi - 1)
                - (nm + 2.0) * (nm + 1.0) * s.at(mi - 2)
        })
        .collect()
}

/// Sum of terms `c · t^p · e^{-λ t}`.
#[derive(Debug, Clone, Default)]
struct QuasiPoly(Vec<(f64, u32, f64)>);

impl QuasiPoly {
    fn add(&mut self, c: f64, p: u32, lambda: f64) {
        if c == 0.0 {
            return;
        }
        match self.0.iter_mut().find(|(_, q, l)| *q == p && same_rate(*l, lambda)) {
            Some(term) => term.0 += c,
            None => self.0.push((c, p, lambda)),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        self.0.iter().map(|&(c, p, l)| c * t.powi(p as i32) * (-l * t).exp()).sum()
    }

    fn scaled(&self, s: f64) -> impl Iterator<Item = (f64, u32, f64)> + '_ {
        self.0.iter().map(move |&(c, p, l)| (c * s, p, l))
    }
}

/// Rates that agree to this relative accuracy are treated as resonant.
fn same_rate(u: f64, v: f64) -> bool {
    (u - v).abs() <= 1e-12 * (1.0 + u.abs().max(v.abs()))
}

/// Solution of `y' = -c y + g(t)` with `y(0) = y0` for quasi-polynomial `g`:
/// `y(t) = y0 e^{-ct} + ∫_0^t e^{-c(t-r)} g(r) dr`, term by term.
fn duhamel(c: f64, y0: f64, g: &QuasiPoly) -> QuasiPoly {
    let mut out = QuasiPoly::default();
    out.add(y0, 0, c);
    for &(coef, p, lambda) in &g.0 {
        if same_rate(c, lambda) {
            out.add(coef / (p + 1) as f64, p + 1, c);
            continue;
        }
        // ∫_0^t r^p e^{d r} dr with d = c - λ
        let d = c - lambda;
        let mut falling = 1.0; // p!/(p-k)!
        for k in 0..=p {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            out.add(coef * sign * falling / d.powi(k as i32 + 1), p - k, lambda);
            if k < p {
                falling *= (p - k) as f64;
            }
        }
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        out.add(-coef * sign * falling / d.powi(p as i32 + 1), 0, c);
    }
    out
}

/// Exact solution of the triangular system [`esp_rhs`] at time `t`, built
/// as a cascade of exponential polynomials.
pub fn esp_closed_form(s0: &EspState, t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and non-negative, got {t}")));
    }
    let n = s0.params.n_particles;
    let (a, b) = (s0.params.a, s0.params.b);
    let mut sols: Vec<QuasiPoly> = Vec::with_capacity(n + 1);
    let mut one = QuasiPoly::default();
    one.add(1.0, 0, 0.0);
    sols.push(one);
    for m in 1..=n {
        let nm = (n - m) as f64;
        let mut g = QuasiPoly::default();
        for (c, p, l) in sols[m - 1].scaled(2.0 * b * (nm + 1.0)) {
            g.add(c, p, l);
        }
        if m >= 2 {
            for (c, p, l) in sols[m - 2].scaled(-(nm + 2.0) * (nm + 1.0)) {
                g.add(c, p, l);
            }
        }
        sols.push(duhamel(rate(m, a), s0.y[m - 1], &g));
    }
    let out: Vec<f64> = sols[1..].iter().map(|q| q.eval(t)).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence(format!("symmetric functions overflow at t = {t}")));
    }
    Ok(out)
}

/// Numerical solution of the same system, for cross-checks.
pub fn esp_rk_solution(s0: &EspState, t: f64, tol: f64) -> Result<Vec<f64>> {
    if t == 0.0 {
        return Ok(s0.y.clone());
    }
    let params = s0.params;
    ode::integrate(
        |_, y, dy| {
            let s = EspState { y: y.to_vec(), params };
            dy.copy_from_slice(&esp_rhs(&s));
            Ok(())
        },
        0.0,
        &s0.y,
        t,
        StepControl { dt_init: 1e-3, dt_min: 1e-14, dt_max: f64::INFINITY, tol },
        |_, _| true,
        |_, _| {},
    )
}

/// Recovers the configuration as the ordered roots of
/// `z^N - y_1 z^{N-1} + y_2 z^{N-2} - ... `.
pub fn config_from_esp(s: &EspState) -> Result<Configuration> {
    let n = s.y.len();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    for (m, ym) in s.y.iter().enumerate() {
        let m = m + 1;
        coeffs[n - m] = if m % 2 == 0 { *ym } else { -*ym };
    }
    let mut roots = poly::real_roots(&coeffs, 1e-8)?;
    roots.sort_by(f64::total_cmp);
    Ok(Configuration::new(roots))
}
