//! Validated batch types shared by the estimators and transforms.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Per-sample real rewards for one task. Non-empty, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardBatch(Vec<f64>);

impl RewardBatch {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for RewardBatch {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl TryFrom<&[f64]> for RewardBatch {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}

impl Deref for RewardBatch {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<&BinaryBatch> for RewardBatch {
    fn from(flags: &BinaryBatch) -> Self {
        Self(flags.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect())
    }
}

/// Correctness indicators for one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryBatch {
    flags: Vec<bool>,
    correct: usize,
}

impl BinaryBatch {
    pub fn new(flags: Vec<bool>) -> Result<Self> {
        if flags.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let correct = flags.iter().filter(|&&f| f).count();
        Ok(Self { flags, correct })
    }

    /// Builds a batch from numeric flags, each of which must be exactly 0 or 1.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let flags = values
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                if value == 0.0 {
                    Ok(false)
                } else if value == 1.0 {
                    Ok(true)
                } else {
                    Err(Error::InvalidFlag { index, value })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(flags)
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// Number of correct samples, `c`.
    pub fn correct(&self) -> usize {
        self.correct
    }
}

impl Deref for BinaryBatch {
    type Target = [bool];

    fn deref(&self) -> &[bool] {
        &self.flags
    }
}

/// Per-sample transformed rewards, aligned with the source batch's original order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedBatch(Vec<f64>);

impl TransformedBatch {
    pub(crate) fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for TransformedBatch {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Reward transformation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Subtract the mean of the other n-1 rewards.
    BasicLoo,
    /// All-subsets maxg@k attribution `s`.
    S,
    /// `s` baselined by the maxg@k over subsets excluding the sample.
    Sloo,
    /// `s` baselined by maxg@(k-1) subset maxima excluding the sample.
    SlooMinusOne,
    /// Closed-form pass@k gradient weights for 0/1 rewards.
    BinaryWeights,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::BasicLoo,
        Method::S,
        Method::Sloo,
        Method::SlooMinusOne,
        Method::BinaryWeights,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::BasicLoo => "basic_loo",
            Method::S => "s",
            Method::Sloo => "sloo",
            Method::SlooMinusOne => "sloo_minus_one",
            Method::BinaryWeights => "binary_weights",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown method '{s}'")))
    }
}

/// Subset size and transformation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformConfig {
    k: usize,
    method: Method,
}

impl TransformConfig {
    pub fn new(k: usize, method: Method) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        Ok(Self { k, method })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Checks the method-specific constraints for a batch of `n` samples.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        let k = self.k;
        match self.method {
            Method::BasicLoo => {
                if n < 2 {
                    return Err(Error::TooFewSamples { n, need: 2 });
                }
            }
            Method::S | Method::BinaryWeights => check_estimable(n, k)?,
            Method::Sloo => {
                if k >= n {
                    return Err(Error::BaselineUndefined { n, k });
                }
            }
            Method::SlooMinusOne => {
                if k < 2 {
                    return Err(Error::ExcludedMaxUndefined { k });
                }
                check_estimable(n, k)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_estimable(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > n {
        return Err(Error::NotEstimable { n, k });
    }
    Ok(())
}
