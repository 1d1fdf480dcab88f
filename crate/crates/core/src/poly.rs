//! Real polynomials in the monomial basis (ascending coefficients).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Horner evaluation of `Σ c_k x^k`.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Value and first derivative in one Horner pass.
pub fn eval_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// `Σ |c_k| |x|^k`, the scale against which rounding in [`eval`] is measured.
pub fn eval_abs(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
}

/// Multiplies two coefficient vectors.
pub fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Drops trailing zero coefficients.
pub fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    c
}

/// Sorted real roots of a polynomial whose roots are all real.
///
/// Roots come from the eigenvalues of the companion matrix of the monic
/// polynomial and are then polished by Newton's method. A polishing step is
/// kept only if it lowers `|p|` and does not cross a neighbouring root.
/// Eigenvalues with `|Im| > imag_tol · (1 + |Re|)` make the call fail.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Result<Vec<f64>> {
    let c = trim(coeffs.to_vec());
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -c[i] / lead;
    }
    let eig = companion.complex_eigenvalues();
    let mut max_imag: f64 = 0.0;
    let mut roots = Vec::with_capacity(n);
    for z in eig.iter() {
        max_imag = max_imag.max(z.im.abs() / (1.0 + z.re.abs()));
        roots.push(z.re);
    }
    if max_imag > imag_tol {
        return Err(Error::NonRealRoots { max_imag });
    }
    roots.sort_by(f64::total_cmp);
    polish(&c, &mut roots);
    Ok(roots)
}

fn polish(c: &[f64], roots: &mut [f64]) {
    let n = roots.len();
    for j in 0..n {
        let lo = if j > 0 { 0.5 * (roots[j - 1] + roots[j]) } else { f64::NEG_INFINITY };
        let hi = if j + 1 < n { 0.5 * (roots[j] + roots[j + 1]) } else { f64::INFINITY };
        let mut x = roots[j];
        let (mut p, _) = eval_with_derivative(c, x);
        for _ in 0..8 {
            let (_, dp) = eval_with_derivative(c, x);
            if dp == 0.0 || p == 0.0 {
                break;
            }
            let trial = x - p / dp;
            if !(trial > lo && trial < hi) {
                break;
            }
            let pt = eval(c, trial);
            if pt.abs() >= p.abs() {
                break;
            }
            x = trial;
            p = pt;
        }
        roots[j] = x;
    }
}
