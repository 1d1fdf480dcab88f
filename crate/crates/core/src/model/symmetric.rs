//! Elementary symmetric polynomials, power sums and the identities used in
//! the elementary-symmetric reduction of the frozen flow.

use serde::Serialize;

use crate::error::{Error, Result};

/// Identity checks divide by coordinate differences and refuse gaps below this.
pub const MIN_IDENTITY_GAP: f64 = 1e-12;

/// All `e_0, ..., e_N` of `x` in one Newton-triangle pass.
pub fn elementary_symmetric_all(x: &[f64]) -> Vec<f64> {
    elementary_symmetric_upto(x, x.len())
}

fn elementary_symmetric_upto(x: &[f64], n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for k in (1..=n.min(i + 1)).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e
}

/// `e_n(x)`, with `e_0 = 1` and `e_{-1} = 0`.
pub fn elementary_symmetric(x: &[f64], n: i64) -> Result<f64> {
    if n == -1 {
        return Ok(0.0);
    }
    if n < -1 || n as usize > x.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: x.len(),
        });
    }
    Ok(elementary_symmetric_upto(x, n as usize)[n as usize])
}

/// `e_n` of the vector with the (0-based) `excluded` coordinates removed.
pub fn elementary_symmetric_excluding(x: &[f64], n: i64, excluded: &[usize]) -> Result<f64> {
    for (k, &i) in excluded.iter().enumerate() {
        if i >= x.len() {
            return Err(Error::IndexOutOfRange {
                index: i as i64,
                len: x.len(),
            });
        }
        if excluded[..k].contains(&i) {
            return Err(Error::InvalidArgument(format!("index {i} excluded twice")));
        }
    }
    let rest: Vec<f64> = x
        .iter()
        .enumerate()
        .filter(|(i, _)| !excluded.contains(i))
        .map(|(_, &v)| v)
        .collect();
    elementary_symmetric(&rest, n)
}

/// `p_k(x) = Σ_j x_j^k`.
pub fn power_sum(x: &[f64], k: u32) -> f64 {
    x.iter().map(|v| v.powi(k as i32)).sum()
}

/// `e_n` of a sub-vector, zero outside `0..=len` (the convention the
/// identities use at the edges of the index range).
fn e_lenient(x: &[f64], n: i64) -> f64 {
    if n < 0 || n as usize > x.len() {
        0.0
    } else {
        elementary_symmetric_upto(x, n as usize)[n as usize]
    }
}

fn without(x: &[f64], skip: &[usize]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, &v)| v)
        .collect()
}

/// Accumulates `|LHS - RHS|` relative to the size of the summands.
#[derive(Default)]
struct Residual {
    worst: f64,
}

impl Residual {
    fn record(&mut self, lhs: f64, rhs: f64, scale: f64) {
        let r = (lhs - rhs).abs() / (1.0 + scale);
        if r > self.worst || r.is_nan() {
            self.worst = r;
        }
    }
}

/// Worst residual over `k = 1..=N` of each identity. Residuals are
/// `|LHS - RHS| / (1 + S)` where `S` is the sum of absolute values of all
/// summands on both sides, so they measure agreement at working precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `Σ_i e_{k-1}(x^{(i)}) = (N-k+1) e_{k-1}(x)`
    pub sum_excluded: f64,
    /// `Σ_i e_{k-1}(x^{(i)}) x_i = k e_k(x)`
    pub weighted_sum_excluded: f64,
    /// `e_{k-1}(x^{(i)}) - e_{k-1}(x^{(j)}) = -(x_i - x_j) e_{k-2}(x^{(i,j)})`
    pub telescoping: f64,
    /// `Σ_{i≠j} e_{k-1}(x^{(i)}) / (x_i - x_j) = -((N-k+2)(N-k+1)/2) e_{k-2}(x)`
    pub pair_reciprocal: f64,
    /// `Σ_{i≠j} e_{k-1}(x^{(i)}) x_i x_j / (x_i - x_j) = -(k(k-1)/2) e_k(x)`
    pub pair_product: f64,
    /// `Σ_{i<j} (x_i + x_j) e_{k-2}(x^{(i,j)}) = (k-1)(N-k+1) e_{k-1}(x)`
    pub pair_sum: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [
            self.sum_excluded,
            self.weighted_sum_excluded,
            self.telescoping,
            self.pair_reciprocal,
            self.pair_product,
            self.pair_sum,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Evaluates both sides of the elementary-symmetric identities at `x`.
pub fn symmetric_identity_residuals(x: &[f64]) -> Result<IdentityResiduals> {
    crate::model::check_distinct(x, MIN_IDENTITY_GAP)?;
    let n = x.len();
    let e_full = elementary_symmetric_all(x);
    let e = |k: i64| -> f64 {
        if k < 0 || k as usize > n {
            0.0
        } else {
            e_full[k as usize]
        }
    };
    let drop_one: Vec<Vec<f64>> = (0..n).map(|i| without(x, &[i])).collect();

    let mut r1a = Residual::default();
    let mut r1b = Residual::default();
    let mut rt = Residual::default();
    let mut r2 = Residual::default();
    let mut r3 = Residual::default();
    let mut r4 = Residual::default();

    for k in 1..=n as i64 {
        let e_excl: Vec<f64> = drop_one.iter().map(|v| e_lenient(v, k - 1)).collect();

        let lhs: f64 = e_excl.iter().sum();
        let rhs = (n as i64 - k + 1) as f64 * e(k - 1);
        let scale = e_excl.iter().map(|v| v.abs()).sum::<f64>() + rhs.abs();
        r1a.record(lhs, rhs, scale);

        let terms: Vec<f64> = e_excl.iter().zip(x).map(|(ev, xi)| ev * xi).collect();
        let lhs: f64 = terms.iter().sum();
        let rhs = k as f64 * e(k);
        let scale = terms.iter().map(|v| v.abs()).sum::<f64>() + rhs.abs();
        r1b.record(lhs, rhs, scale);

        let (mut l2, mut s2) = (0.0, 0.0);
        let (mut l3, mut s3) = (0.0, 0.0);
        let (mut l4, mut s4) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = x[i] - x[j];
                let t2 = e_excl[i] / d;
                l2 += t2;
                s2 += t2.abs();
                let t3 = e_excl[i] * x[i] * x[j] / d;
                l3 += t3;
                s3 += t3.abs();
                if i < j {
                    let e_pair = e_lenient(&without(x, &[i, j]), k - 2);
                    let lhs = e_excl[i] - e_excl[j];
                    let rhs = -d * e_pair;
                    rt.record(lhs, rhs, e_excl[i].abs() + e_excl[j].abs() + rhs.abs());
                    let t4 = (x[i] + x[j]) * e_pair;
                    l4 += t4;
                    s4 += t4.abs();
                }
            }
        }
        let kf = k as f64;
        let nf = n as f64;
        let rhs2 = -((nf - kf + 2.0) * (nf - kf + 1.0) / 2.0) * e(k - 2);
        r2.record(l2, rhs2, s2 + rhs2.abs());
        let rhs3 = -(kf * (kf - 1.0) / 2.0) * e(k);
        r3.record(l3, rhs3, s3 + rhs3.abs());
        let rhs4 = (kf - 1.0) * (nf - kf + 1.0) * e(k - 1);
        r4.record(l4, rhs4, s4 + rhs4.abs());
    }

    Ok(IdentityResiduals {
        sum_excluded: r1a.worst,
        weighted_sum_excluded: r1b.worst,
        telescoping: rt.worst,
        pair_reciprocal: r2.worst,
        pair_product: r3.worst,
        pair_sum: r4.worst,
    })
}

/// Residual of `2 Σ_{j≠l} x_j^{m+1}/(x_j - x_l) = Σ_{k=0}^m p_k p_{m-k} - (m+1) p_m`,
/// relative to the summand magnitudes as in [`IdentityResiduals`].
pub fn stieltjes_power_identity_residual(x: &[f64], m: u32) -> Result<f64> {
    crate::model::check_distinct(x, MIN_IDENTITY_GAP)?;
    let (mut lhs, mut lscale) = (0.0, 0.0);
    for (j, &xj) in x.iter().enumerate() {
        for (l, &xl) in x.iter().enumerate() {
            if j != l {
                let t = 2.0 * xj.powi(m as i32 + 1) / (xj - xl);
                lhs += t;
                lscale += t.abs();
            }
        }
    }
    let p: Vec<f64> = (0..=m).map(|k| power_sum(x, k)).collect();
    let (mut rhs, mut rscale) = (0.0, 0.0);
    for k in 0..=m as usize {
        let t = p[k] * p[m as usize - k];
        rhs += t;
        rscale += t.abs();
    }
    let tail = (m as f64 + 1.0) * p[m as usize];
    rhs -= tail;
    rscale += tail.abs();
    Ok((lhs - rhs).abs() / (1.0 + lscale + rscale))
}
