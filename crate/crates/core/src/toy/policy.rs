use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::batch::RewardBatch;
use crate::error::{Error, Result};

/// Gaussian policy `x ~ N(theta, sigma^2)` over a scalar action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy1D {
    theta: f64,
    sigma: f64,
}

impl Policy1D {
    pub const DEFAULT_SIGMA: f64 = 0.1;

    pub fn new(theta: f64, sigma: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("theta must be finite, got {theta}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self { theta, sigma })
    }

    pub fn with_theta(theta: f64) -> Result<Self> {
        Self::new(theta, Self::DEFAULT_SIGMA)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// d/dtheta of log N(x; theta, sigma^2).
    pub fn score(&self, x: f64) -> f64 {
        (x - self.theta) / (self.sigma * self.sigma)
    }
}

/// `x^2` on `[0, 1]`, zero elsewhere.
pub fn toy_reward(x: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        x * x
    } else {
        0.0
    }
}

/// Draws `n` actions from the policy and scores them with [`toy_reward`].
pub fn sample_batch<R: Rng + ?Sized>(
    policy: &Policy1D,
    n: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, RewardBatch)> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    let normal =
        Normal::new(policy.theta, policy.sigma).map_err(|e| Error::Domain(e.to_string()))?;
    let samples: Vec<f64> = (0..n).map(|_| normal.sample(rng)).collect();
    let rewards = RewardBatch::new(samples.iter().map(|&x| toy_reward(x)).collect())?;
    Ok((samples, rewards))
}
