//! Asymptotic variance of the pass@k estimator.
//!
//! `rho(n, c, k)` is a U-statistic with kernel `max(x_1, ..., x_k)` over
//! Bernoulli(nu) correctness. Its first-order projection has variance
//! `zeta1 = nu (1 - nu)^(2k - 1)`, so `Var(rho) ~ k^2 zeta1 / n` as `n` grows.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::stats::variance_with_stderr;
use crate::transforms::pass_at_k_binary;

/// Minimum number of Monte Carlo trials accepted by [`empirical_rho_variance`].
pub const MIN_TRIALS: usize = 1000;

/// i.i.d. Bernoulli(nu) correctness with `n` samples per task and target `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliWorld {
    nu: f64,
    k: usize,
    n: usize,
}

impl BernoulliWorld {
    pub fn new(nu: f64, k: usize, n: usize) -> Result<Self> {
        check_nu(nu)?;
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if k > n {
            return Err(Error::NotEstimable { n, k });
        }
        Ok(Self { nu, k, n })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::Domain(format!(
            "pass rate must lie in [0, 1], got {nu}"
        )));
    }
    Ok(())
}

/// Variance of the kernel's first-order projection, `nu (1 - nu)^(2k - 1)`.
pub fn zeta1(nu: f64, k: usize) -> Result<f64> {
    check_nu(nu)?;
    if k == 0 {
        return Err(Error::ZeroK);
    }
    Ok(nu * (1.0 - nu).powi(2 * k as i32 - 1))
}

/// `k^2 zeta1(nu, k) / n`.
pub fn asymptotic_variance(world: &BernoulliWorld) -> f64 {
    let k = world.k as f64;
    k * k * world.nu * (1.0 - world.nu).powi(2 * world.k as i32 - 1) / world.n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub variance: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Sample variance over `trials` draws of `rho(n, c, k)` with `c ~ Binomial(n, nu)`.
pub fn empirical_rho_variance(
    world: &BernoulliWorld,
    trials: usize,
    seed: u64,
) -> Result<VarianceEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let binomial =
        Binomial::new(world.n as u64, world.nu).map_err(|e| Error::Domain(e.to_string()))?;
    let draws: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let c = binomial.sample(&mut stream_rng(seed, t as u64)) as usize;
            pass_at_k_binary(world.n, c, world.k)
        })
        .collect::<Result<_>>()?;
    let (variance, stderr) = variance_with_stderr(&draws);
    Ok(VarianceEstimate {
        variance,
        stderr,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn zeta1_examples() {
        assert_eq!(zeta1(0.5, 1).unwrap(), 0.25);
        assert_eq!(zeta1(0.0, 3).unwrap(), 0.0);
        assert_eq!(zeta1(1.0, 3).unwrap(), 0.0);
        assert_eq!(zeta1(0.5, 2).unwrap(), 0.0625);
        assert!(zeta1(1.5, 2).is_err());
        assert!(zeta1(-0.1, 2).is_err());
        assert_eq!(zeta1(0.5, 0), Err(Error::ZeroK));
    }

    #[test]
    fn zeta1_matches_monte_carlo_projection() {
        // h1(1) = 1, h1(0) = 1 - (1 - nu)^(k-1); Var(h1(X)) by direct simulation.
        let (nu, k) = (0.5, 2);
        let h0 = 1.0 - (1.0f64 - nu).powi(k - 1);
        let mut rng = stream_rng(17, 0);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < nu { 1.0 } else { h0 })
            .collect();
        let (var, se) = variance_with_stderr(&xs);
        assert!((var - 0.0625).abs() < 4.0 * se, "{var} ± {se}");
    }

    #[test]
    fn zeta1_peaks_at_one_over_2k() {
        for k in [1usize, 2, 4, 8] {
            let grid: Vec<f64> = (0..=100_000).map(|i| i as f64 / 100_000.0).collect();
            let best = grid
                .iter()
                .copied()
                .max_by(|a, b| zeta1(*a, k).unwrap().total_cmp(&zeta1(*b, k).unwrap()))
                .unwrap();
            assert!((best - 1.0 / (2 * k) as f64).abs() < 1e-3, "k={k}: {best}");
        }
    }

    #[test]
    fn asymptotic_variance_examples() {
        let v = |nu, k, n| asymptotic_variance(&BernoulliWorld::new(nu, k, n).unwrap());
        assert!((v(0.5, 1, 100) - 0.0025).abs() < 1e-18);
        assert!((v(0.5, 2, 1000) - 0.00025).abs() < 1e-18);
        assert_eq!(v(1.0, 3, 10), 0.0);
    }

    #[test]
    fn world_validation() {
        assert_eq!(
            BernoulliWorld::new(0.5, 5, 4),
            Err(Error::NotEstimable { n: 4, k: 5 })
        );
        assert!(BernoulliWorld::new(2.0, 1, 4).is_err());
    }

    #[test]
    fn empirical_variance_behaviour() {
        let w = BernoulliWorld::new(0.5, 1, 1000).unwrap();
        let e = empirical_rho_variance(&w, 20_000, 1).unwrap();
        assert!((e.variance / 0.00025 - 1.0).abs() < 0.1, "{e:?}");
        let small = empirical_rho_variance(&w, 2_000, 1).unwrap();
        assert!(small.stderr > e.stderr);
        assert_eq!(e, empirical_rho_variance(&w, 20_000, 1).unwrap());

        let dead = BernoulliWorld::new(0.0, 2, 1000).unwrap();
        assert_eq!(
            empirical_rho_variance(&dead, 1000, 1).unwrap().variance,
            0.0
        );
        assert!(empirical_rho_variance(&w, 999, 1).is_err());
    }
}
