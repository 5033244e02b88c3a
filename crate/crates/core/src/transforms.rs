//! pass@k / maxg@k estimators and the gradient reward transformations.
//!
//! Continuous transforms sort the batch ascending (stable, so ties keep their
//! original index order), evaluate in sorted space and scatter the result back
//! to the caller's order. All of them are `O(n log n)` with the default
//! [`Evaluation::Lazy`] weights.

use crate::batch::{
    check_estimable, BinaryBatch, Method, RewardBatch, TransformConfig, TransformedBatch,
};
use crate::error::{Error, Result};
use crate::weights::{self, Evaluation, WeightTable};

/// Unbiased pass@k estimate `1 - C(n-c, k) / C(n, k)` from `n` samples with `c` correct.
pub fn pass_at_k_binary(n: usize, c: usize, k: usize) -> Result<f64> {
    if c > n {
        return Err(Error::Domain(format!("c={c} exceeds n={n}")));
    }
    check_estimable(n, k)?;
    Ok(rho(n, c, k))
}

// k = 0 gives 0, which binary_reward_weights relies on for k = 1.
fn rho(n: usize, c: usize, k: usize) -> f64 {
    let p = 1.0 - weights::miss_all_ratio(n, c, k);
    if p < 0.0 && p > -1e-12 {
        0.0
    } else if p > 1.0 && p < 1.0 + 1e-12 {
        1.0
    } else {
        p
    }
}

/// Per-sample pass@k gradient weights: `k/n` for correct samples and
/// `k/n * rho(n-1, c, k-1)` for incorrect ones.
pub fn binary_reward_weights(flags: &BinaryBatch, k: usize) -> Result<TransformedBatch> {
    let n = flags.len();
    check_estimable(n, k)?;
    let c = flags.correct();
    let hit = k as f64 / n as f64;
    let miss = if c == n {
        // unused: no incorrect samples
        0.0
    } else {
        hit * rho(n - 1, c, k - 1)
    };
    Ok(TransformedBatch::new(
        flags.iter().map(|&f| if f { hit } else { miss }).collect(),
    ))
}

/// Unbiased maxg@k estimate: the mean of the maximum over all size-k subsets.
pub fn maxg_at_k(batch: &RewardBatch, k: usize) -> Result<f64> {
    maxg_at_k_with(batch, k, Evaluation::Lazy)
}

pub fn maxg_at_k_with(batch: &RewardBatch, k: usize, evaluation: Evaluation) -> Result<f64> {
    check_estimable(batch.len(), k)?;
    let mut sorted = batch.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted_maxg(&sorted, k, evaluation))
}

fn sorted_maxg(sorted: &[f64], k: usize, evaluation: Evaluation) -> f64 {
    let w = weights::diagonal(sorted.len(), k, evaluation);
    sorted.iter().zip(&w).map(|(g, w)| g * w).sum()
}

/// `s_i`: the average over size-k subsets of the subset max, credited to every
/// member of the subset.
pub fn transform_s(batch: &RewardBatch, k: usize) -> Result<TransformedBatch> {
    transform_s_with(batch, k, Evaluation::Lazy)
}

pub fn transform_s_with(
    batch: &RewardBatch,
    k: usize,
    evaluation: Evaluation,
) -> Result<TransformedBatch> {
    check_estimable(batch.len(), k)?;
    Ok(sorted_apply(batch, |g| sorted_s(g, k, evaluation)))
}

/// `g_i` minus the mean of the other `n - 1` rewards.
pub fn transform_basic_loo(batch: &RewardBatch) -> Result<TransformedBatch> {
    let n = batch.len();
    if n < 2 {
        return Err(Error::TooFewSamples { n, need: 2 });
    }
    if is_constant(batch) {
        return Ok(TransformedBatch::new(vec![0.0; n]));
    }
    let total: f64 = batch.iter().sum();
    let m = (n - 1) as f64;
    Ok(TransformedBatch::new(
        batch.iter().map(|&g| g - (total - g) / m).collect(),
    ))
}

/// `s_i` minus `1/(n-1)` times the summed `s_j` of the batch with `i` removed.
///
/// The two terms are on slightly different scales (`k/n` versus `k/(n-1)`
/// times a maxg@k), so a constant batch `c` maps to `-c k / (n (n-1))` rather
/// than zero. The offset does not depend on any single sample and so leaves
/// the gradient estimate unbiased.
pub fn transform_sloo(batch: &RewardBatch, k: usize) -> Result<TransformedBatch> {
    transform_sloo_with(batch, k, Evaluation::Lazy)
}

pub fn transform_sloo_with(
    batch: &RewardBatch,
    k: usize,
    evaluation: Evaluation,
) -> Result<TransformedBatch> {
    let n = batch.len();
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k >= n {
        return Err(Error::BaselineUndefined { n, k });
    }
    Ok(sorted_apply(batch, |g| {
        let mut s = sorted_s(g, k, evaluation);
        let b = sorted_loo_baseline(g, k, evaluation);
        let scale = 1.0 / (n - 1) as f64;
        for (s, b) in s.iter_mut().zip(&b) {
            *s -= scale * b;
        }
        s
    }))
}

/// `s_i` minus the average over size-k subsets containing `i` of the max over
/// the subset's other `k - 1` members.
pub fn transform_sloo_minus_one(batch: &RewardBatch, k: usize) -> Result<TransformedBatch> {
    transform_sloo_minus_one_with(batch, k, Evaluation::Lazy)
}

pub fn transform_sloo_minus_one_with(
    batch: &RewardBatch,
    k: usize,
    evaluation: Evaluation,
) -> Result<TransformedBatch> {
    let n = batch.len();
    if k < 2 {
        return Err(Error::ExcludedMaxUndefined { k });
    }
    check_estimable(n, k)?;
    if is_constant(batch) {
        return Ok(TransformedBatch::new(vec![0.0; n]));
    }
    Ok(sorted_apply(batch, |g| {
        let mut s = sorted_s(g, k, evaluation);
        let b = sorted_loo_baseline(g, k - 1, evaluation);
        let scale = k as f64 / (n as f64 * (k - 1) as f64);
        for (s, b) in s.iter_mut().zip(&b) {
            *s -= scale * b;
        }
        s
    }))
}

/// Runs the configured transformation. `BinaryWeights` requires 0/1 rewards.
pub fn apply(config: &TransformConfig, batch: &RewardBatch) -> Result<TransformedBatch> {
    apply_with(config, batch, Evaluation::Lazy)
}

pub fn apply_with(
    config: &TransformConfig,
    batch: &RewardBatch,
    evaluation: Evaluation,
) -> Result<TransformedBatch> {
    config.validate_for(batch.len())?;
    let k = config.k();
    match config.method() {
        Method::BasicLoo => transform_basic_loo(batch),
        Method::S => transform_s_with(batch, k, evaluation),
        Method::Sloo => transform_sloo_with(batch, k, evaluation),
        Method::SlooMinusOne => transform_sloo_minus_one_with(batch, k, evaluation),
        Method::BinaryWeights => binary_reward_weights(&BinaryBatch::from_values(batch)?, k),
    }
}

// Baselined transforms vanish identically on a constant batch; returning the
// zeros directly keeps them exact instead of a few ulps off.
fn is_constant(batch: &RewardBatch) -> bool {
    batch.iter().all(|&g| g == batch[0])
}

fn sorted_apply(batch: &RewardBatch, f: impl FnOnce(&[f64]) -> Vec<f64>) -> TransformedBatch {
    let mut order: Vec<usize> = (0..batch.len()).collect();
    order.sort_by(|&a, &b| batch[a].total_cmp(&batch[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| batch[i]).collect();
    let out = f(&sorted);
    let mut scattered = vec![0.0; out.len()];
    for (&i, v) in order.iter().zip(out) {
        scattered[i] = v;
    }
    TransformedBatch::new(scattered)
}

// s_r = diag[r] g_r + sum_{t > r} off[t] g_t, accumulated right to left.
fn sorted_s(g: &[f64], k: usize, evaluation: Evaluation) -> Vec<f64> {
    let n = g.len();
    let w = WeightTable::new(n, k, evaluation);
    let mut s = vec![0.0; n];
    let mut tail = 0.0;
    for r in (0..n).rev() {
        s[r] = w.diag[r] * g[r] + tail;
        tail += w.off[r] * g[r];
    }
    s
}

// b_r = sum over j != r of s_j computed on the batch with rank r removed,
// which equals k * maxg@k of that reduced batch. Requires k <= n - 1.
//
// Removing rank 0 shifts every other rank down by one; moving the removed rank
// from r to r+1 only swaps which of g_r, g_{r+1} occupies reduced rank r, so
// b_{r+1} = b_r + k * w_r * (g_r - g_{r+1}), left to right.
fn sorted_loo_baseline(g: &[f64], k: usize, evaluation: Evaluation) -> Vec<f64> {
    let n = g.len();
    debug_assert!(k < n);
    let w = weights::diagonal(n - 1, k, evaluation);
    let kf = k as f64;
    let mut b = vec![0.0; n];
    b[0] = kf * g[1..].iter().zip(&w).map(|(g, w)| g * w).sum::<f64>();
    for r in 0..n - 1 {
        b[r + 1] = b[r] + kf * w[r] * (g[r] - g[r + 1]);
    }
    b
}
