//! Score-function gradient estimators of maxg@k built from the different
//! reward transformations.

use std::fmt;
use std::str::FromStr;

use crate::batch::RewardBatch;
use crate::error::{Error, Result};
use crate::toy::policy::Policy1D;
use crate::transforms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorVariant {
    /// `s^loo` over all size-k subsets.
    AllSubsetsLoo,
    /// `s` over all size-k subsets, no baseline.
    AllSubsetsNoBaseline,
    /// Disjoint k-blocks, each member gets its block max, minus the mean block max
    /// of the other blocks.
    NaivePartitionedBaselined,
    /// Disjoint k-blocks, each member gets its block max.
    NaivePartitionedNoBaseline,
    /// `s^loo-1` applied within each disjoint k-block.
    LooMinusOnePartitioned,
    /// `s^loo-1` over all size-k subsets.
    LooMinusOneAllSubsets,
}

impl EstimatorVariant {
    pub const ALL: [EstimatorVariant; 6] = [
        EstimatorVariant::AllSubsetsLoo,
        EstimatorVariant::AllSubsetsNoBaseline,
        EstimatorVariant::NaivePartitionedBaselined,
        EstimatorVariant::NaivePartitionedNoBaseline,
        EstimatorVariant::LooMinusOnePartitioned,
        EstimatorVariant::LooMinusOneAllSubsets,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorVariant::AllSubsetsLoo => "all_subsets_loo",
            EstimatorVariant::AllSubsetsNoBaseline => "all_subsets_no_baseline",
            EstimatorVariant::NaivePartitionedBaselined => "naive_partitioned_baselined",
            EstimatorVariant::NaivePartitionedNoBaseline => "naive_partitioned_no_baseline",
            EstimatorVariant::LooMinusOnePartitioned => "loo_minus_one_partitioned",
            EstimatorVariant::LooMinusOneAllSubsets => "loo_minus_one_all_subsets",
        }
    }

    pub fn is_partitioned(self) -> bool {
        matches!(
            self,
            EstimatorVariant::NaivePartitionedBaselined
                | EstimatorVariant::NaivePartitionedNoBaseline
                | EstimatorVariant::LooMinusOnePartitioned
        )
    }

    /// Checks that the variant is defined for `n` samples at subset size `k`.
    pub fn validate(self, n: usize, k: usize) -> Result<()> {
        let invalid = |why: &str| {
            Err(Error::InvalidVariant(format!(
                "{} with n={n}, k={k}: {why}",
                self.name()
            )))
        };
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if k > n {
            return Err(Error::NotEstimable { n, k });
        }
        if self.is_partitioned() && !n.is_multiple_of(k) {
            return invalid("partitioned variants need k to divide n");
        }
        match self {
            EstimatorVariant::AllSubsetsLoo if k >= n => invalid("baseline needs k < n"),
            EstimatorVariant::NaivePartitionedBaselined if n / k < 2 => {
                invalid("cross-block baseline needs at least two blocks")
            }
            EstimatorVariant::LooMinusOnePartitioned | EstimatorVariant::LooMinusOneAllSubsets
                if k < 2 =>
            {
                invalid("the k-1 baseline needs k >= 2")
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EstimatorVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown estimator variant '{s}'")))
    }
}

/// Per-sample weights `t_i` such that the gradient estimate is `sum_i t_i * score(x_i)`.
pub fn transformed_rewards(
    variant: EstimatorVariant,
    rewards: &RewardBatch,
    k: usize,
) -> Result<Vec<f64>> {
    let n = rewards.len();
    variant.validate(n, k)?;
    let out = match variant {
        EstimatorVariant::AllSubsetsNoBaseline => transforms::transform_s(rewards, k)?.into_inner(),
        EstimatorVariant::AllSubsetsLoo => transforms::transform_sloo(rewards, k)?.into_inner(),
        EstimatorVariant::LooMinusOneAllSubsets => {
            transforms::transform_sloo_minus_one(rewards, k)?.into_inner()
        }
        EstimatorVariant::NaivePartitionedNoBaseline => {
            let blocks = n / k;
            let maxima = block_maxima(rewards, k);
            (0..n).map(|i| maxima[i / k] / blocks as f64).collect()
        }
        EstimatorVariant::NaivePartitionedBaselined => {
            let blocks = n / k;
            let maxima = block_maxima(rewards, k);
            let total: f64 = maxima.iter().sum();
            // every one of the other n-k samples carries its block max, so their
            // mean is the mean of the other blocks' maxima
            (0..n)
                .map(|i| {
                    let own = maxima[i / k];
                    let baseline = (total - own) / (blocks - 1) as f64;
                    (own - baseline) / blocks as f64
                })
                .collect()
        }
        EstimatorVariant::LooMinusOnePartitioned => {
            let blocks = n / k;
            let mut out = Vec::with_capacity(n);
            for chunk in rewards.chunks(k) {
                let block = RewardBatch::new(chunk.to_vec())?;
                let t = transforms::transform_sloo_minus_one(&block, k)?;
                out.extend(t.iter().map(|v| v / blocks as f64));
            }
            out
        }
    };
    Ok(out)
}

fn block_maxima(rewards: &[f64], k: usize) -> Vec<f64> {
    rewards
        .chunks(k)
        .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

/// `sum_i t_i * d/dtheta log p(x_i | theta)` for the variant's weights `t`.
pub fn grad_estimate(
    policy: &Policy1D,
    samples: &[f64],
    rewards: &RewardBatch,
    k: usize,
    variant: EstimatorVariant,
) -> Result<f64> {
    if samples.len() != rewards.len() {
        return Err(Error::Domain(format!(
            "{} samples but {} rewards",
            samples.len(),
            rewards.len()
        )));
    }
    let t = transformed_rewards(variant, rewards, k)?;
    Ok(weighted_score(policy, samples, &t))
}

pub(crate) fn weighted_score(policy: &Policy1D, samples: &[f64], weights: &[f64]) -> f64 {
    samples
        .iter()
        .zip(weights)
        .map(|(&x, &t)| t * policy.score(x))
        .sum()
}
