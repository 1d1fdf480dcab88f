use crate::error::{Error, Result};
use crate::model::{check_separated, power_sum, Configuration, ModelParams};

/// Drift of the `n`-th empirical moment `S_n = (1/N) Σ x_j^n` under the
/// N-rescaled dynamics, with `params.a`, `params.b` playing `a_N`, `b_N`:
///
/// `n[(-2(a_N-1)/N - (n+1)/N + 2(n-1)/(βN)) S_n + 2 b_N/N S_{n-1}
///   + (2/β - 1)(n-1)/N S_{n-2} + Σ_{k=1}^{n-1} S_k S_{n-k} + Σ_{k=0}^{n-2} S_k S_{n-2-k}]`.
pub fn empirical_moment_drift(x: &Configuration, params: &ModelParams, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    check_separated(x.as_slice(), 0.0)?;
    let big_n = x.len() as f64;
    let s: Vec<f64> = (0..=n).map(|k| power_sum(x.as_slice(), k) / big_n).collect();
    let at = |k: i64| if k < 0 { 0.0 } else { s[k as usize] };
    let nn = n as i64;
    let nf = n as f64;
    let ib = params.beta.inverse();
    let (a, b) = (params.a, params.b);
    let mut v = (-2.0 * (a - 1.0) / big_n - (nf + 1.0) / big_n + 2.0 * (nf - 1.0) * ib / big_n) * at(nn)
        + 2.0 * b / big_n * at(nn - 1)
        + (2.0 * ib - 1.0) * (nf - 1.0) / big_n * at(nn - 2);
    for k in 1..nn {
        v += at(k) * at(nn - k);
    }
    for k in 0..=(nn - 2) {
        v += at(k) * at(nn - 2 - k);
    }
    Ok(nf * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::frozen_rhs;
    use crate::model::BetaParam;
    use proptest::prelude::*;

    /// `(1/N) Σ n x_j^{n-1} (1/N) f_j` with `f` the frozen right-hand side.
    fn chain_rule(x: &Configuration, p: &ModelParams, n: u32) -> f64 {
        let f = frozen_rhs(x, p).unwrap();
        let big_n = x.len() as f64;
        x.as_slice()
            .iter()
            .zip(&f)
            .map(|(xj, fj)| n as f64 * xj.powi(n as i32 - 1) * fj / big_n)
            .sum::<f64>()
            / big_n
    }

    #[test]
    fn two_particles_second_moment() {
        let x = Configuration::new(vec![-1.0, 1.0]);
        let p = ModelParams::frozen(2, 0.0, 0.0).unwrap();
        let d = empirical_moment_drift(&x, &p, 2).unwrap();
        assert!((d - chain_rule(&x, &p, 2)).abs() < 1e-13);
    }

    #[test]
    fn ito_terms_are_the_beta_difference() {
        let x = Configuration::new(vec![-1.3, -0.2, 0.4, 2.1]);
        let frozen = ModelParams::frozen(4, 3.0, 1.0).unwrap();
        let finite = frozen.with_beta(BetaParam::finite(2.0).unwrap());
        let big_n = 4.0;
        let s = |k: u32| power_sum(x.as_slice(), k) / big_n;
        for n in 1..6u32 {
            let diff = empirical_moment_drift(&x, &finite, n).unwrap() - empirical_moment_drift(&x, &frozen, n).unwrap();
            let nf = n as f64;
            let s2 = if n >= 2 { s(n - 2) } else { 0.0 };
            let want = nf * (2.0 * (nf - 1.0) / (2.0 * big_n) * s(n) + (2.0 / 2.0) * (nf - 1.0) / big_n * s2);
            assert!((diff - want).abs() < 1e-12 * (1.0 + want.abs()), "n={n}");
        }
    }

    #[test]
    fn rejects_collisions() {
        let x = Configuration::new(vec![0.5, 0.5]);
        let p = ModelParams::frozen(2, 1.0, 0.0).unwrap();
        assert!(empirical_moment_drift(&x, &p, 2).is_err());
    }

    proptest! {
        #[test]
        fn frozen_drift_is_chain_rule(
            mut v in proptest::collection::vec(-3.0f64..3.0, 2..9),
            a in -2.0f64..10.0,
            b in -3.0f64..3.0,
            n in 1u32..7,
        ) {
            v.sort_by(f64::total_cmp);
            prop_assume!(v.windows(2).all(|w| w[1] - w[0] > 1e-2));
            let x = Configuration::new(v);
            let p = ModelParams::frozen(x.len(), a, b).unwrap();
            let d = empirical_moment_drift(&x, &p, n).unwrap();
            let c = chain_rule(&x, &p, n);
            let scale = 1.0 + x.as_slice().iter().map(|u| u.abs()).fold(0.0, f64::max).powi(n as i32 + 1) * 100.0;
            prop_assert!((d - c).abs() < 1e-12 * scale, "{} vs {}", d, c);
        }
    }
}
