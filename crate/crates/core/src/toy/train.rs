//! Plain stochastic gradient ascent on the toy policy with a step-indexed k schedule.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::stats::{mean, variance_with_stderr};
use crate::toy::estimator::{transformed_rewards, weighted_score, EstimatorVariant};
use crate::toy::policy::{sample_batch, Policy1D};
use crate::transforms::transform_basic_loo;

/// Piecewise-constant `step -> k`. The first entry starts at step 0 and steps
/// strictly increase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSchedule(Vec<(usize, usize)>);

impl KSchedule {
    pub fn new(points: Vec<(usize, usize)>) -> Result<Self> {
        match points.first() {
            None => return Err(Error::Domain("empty k schedule".into())),
            Some(&(start, _)) if start != 0 => {
                return Err(Error::Domain("k schedule must start at step 0".into()))
            }
            _ => {}
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Domain(
                "k schedule steps must strictly increase".into(),
            ));
        }
        if points.iter().any(|&(_, k)| k == 0) {
            return Err(Error::ZeroK);
        }
        Ok(Self(points))
    }

    pub fn constant(k: usize) -> Result<Self> {
        Self::new(vec![(0, k)])
    }

    pub fn k_at(&self, step: usize) -> usize {
        self.0
            .iter()
            .take_while(|&&(start, _)| start <= step)
            .last()
            .map(|&(_, k)| k)
            .expect("schedule starts at step 0")
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.0
    }
}

/// Parses `"0:8,1500:1"`.
impl FromStr for KSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let points = s
            .split(',')
            .map(|part| {
                let (step, k) = part.trim().split_once(':').ok_or_else(|| {
                    Error::Domain(format!("bad schedule entry '{part}', want step:k"))
                })?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Domain(format!("bad schedule entry '{part}': {e}")))
                };
                Ok((parse(step)?, parse(k)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }
}

/// Trainer settings. Steps whose scheduled k is 1 use basic LOO mean
/// centering whatever the variant, since every maxg@1 transform reduces to the
/// raw reward.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub k_schedule: KSchedule,
    pub n: usize,
    pub learning_rate: f64,
    pub steps: usize,
    pub seed: u64,
    pub variant: EstimatorVariant,
    pub theta0: f64,
    pub sigma: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            k_schedule: KSchedule(vec![(0, 1)]),
            n: 16,
            learning_rate: 1e-3,
            steps: 2000,
            seed: 0,
            variant: EstimatorVariant::LooMinusOneAllSubsets,
            theta0: 0.2,
            sigma: Policy1D::DEFAULT_SIGMA,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Domain(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Policy1D::new(self.theta0, self.sigma)?;
        for &(_, k) in self.k_schedule.points() {
            if k == 1 {
                if self.n < 2 {
                    return Err(Error::TooFewSamples { n: self.n, need: 2 });
                }
            } else {
                self.variant.validate(self.n, k)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainStep {
    pub step: usize,
    pub k: usize,
    /// Policy mean after this step's update.
    pub theta: f64,
    pub reward_mean: f64,
    pub transformed_mean: f64,
    pub transformed_std: f64,
}

pub fn train(config: &TrainConfig) -> Result<Vec<TrainStep>> {
    config.validate()?;
    let mut theta = config.theta0;
    let mut trajectory = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let k = config.k_schedule.k_at(step);
        let policy = Policy1D::new(theta, config.sigma)?;
        let mut rng = stream_rng(config.seed, step as u64);
        let (xs, rewards) = sample_batch(&policy, config.n, &mut rng)?;
        let t = if k == 1 {
            transform_basic_loo(&rewards)?.into_inner()
        } else {
            transformed_rewards(config.variant, &rewards, k)?
        };
        theta += config.learning_rate * weighted_score(&policy, &xs, &t);
        trajectory.push(TrainStep {
            step,
            k,
            theta,
            reward_mean: mean(&rewards),
            transformed_mean: mean(&t),
            transformed_std: variance_with_stderr(&t).0.sqrt(),
        });
    }
    Ok(trajectory)
}
