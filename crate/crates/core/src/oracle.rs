//! Exhaustive subset enumeration: exponential-time reference values for every
//! estimator and transform, used as ground truth in tests and `oracle-diff`.
//!
//! Subsets are visited in lexicographic order and all sums use Neumaier
//! compensated accumulation.

use crate::batch::{check_estimable, BinaryBatch, RewardBatch};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
    pub max_subsets: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_n: 20,
            max_subsets: 2_000_000,
        }
    }
}

impl OracleBudget {
    /// Errors unless an `n`-sample batch enumerated at subset size `k` fits the budget.
    pub fn check(&self, n: usize, k: usize) -> Result<()> {
        let subsets = binomial_exact(n, k);
        if n > self.max_n || subsets > self.max_subsets {
            return Err(Error::OracleBudget {
                n,
                subsets,
                max_n: self.max_n,
                max_subsets: self.max_subsets,
            });
        }
        Ok(())
    }
}

fn binomial_exact(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    // saturating keeps absurd n from panicking; anything that large fails the budget anyway
    (0..k).fold(1u128, |acc, j| acc.saturating_mul(n - j) / (j + 1))
}

#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Lexicographic size-k combinations of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        Some(&self.idx)
    }

    fn advance(&mut self) {
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

/// Calls `f` on each size-k subset of `0..n` in lexicographic order; returns the count.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) -> u64 {
    let mut combos = Combinations::new(n, k);
    let mut count = 0;
    while let Some(subset) = combos.next() {
        f(subset);
        count += 1;
        combos.advance();
    }
    count
}

fn subset_max(g: &[f64], subset: &[usize]) -> f64 {
    subset
        .iter()
        .map(|&i| g[i])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn prepare(n: usize, k: usize, budget: &OracleBudget) -> Result<()> {
    check_estimable(n, k)?;
    budget.check(n, k)
}

/// Mean over size-k subsets of `1 - prod(1 - f_i)`.
pub fn oracle_pass_at_k_binary(
    flags: &BinaryBatch,
    k: usize,
    budget: &OracleBudget,
) -> Result<f64> {
    prepare(flags.len(), k, budget)?;
    let mut acc = CompensatedSum::default();
    let count = for_each_subset(flags.len(), k, |sub| {
        acc.add(if sub.iter().any(|&i| flags[i]) {
            1.0
        } else {
            0.0
        });
    });
    Ok(acc.value() / count as f64)
}

/// Mean over size-k subsets of the subset max.
pub fn oracle_maxg_at_k(batch: &RewardBatch, k: usize, budget: &OracleBudget) -> Result<f64> {
    prepare(batch.len(), k, budget)?;
    let mut acc = CompensatedSum::default();
    let count = for_each_subset(batch.len(), k, |sub| acc.add(subset_max(batch, sub)));
    Ok(acc.value() / count as f64)
}

/// Per sample: the sum of subset maxima over size-k subsets containing it, divided by `C(n, k)`.
pub fn oracle_s(batch: &RewardBatch, k: usize, budget: &OracleBudget) -> Result<Vec<f64>> {
    prepare(batch.len(), k, budget)?;
    Ok(subset_credit(batch, k, &all_indices(batch.len())))
}

/// Per-sample pass@k gradient weights by enumerating subset pass indicators.
pub fn oracle_binary_weights(
    flags: &BinaryBatch,
    k: usize,
    budget: &OracleBudget,
) -> Result<Vec<f64>> {
    oracle_s(&RewardBatch::from(flags), k, budget)
}

/// `g_i` minus the mean of the other rewards, evaluated term by term.
pub fn oracle_basic_loo(batch: &RewardBatch) -> Result<Vec<f64>> {
    let n = batch.len();
    if n < 2 {
        return Err(Error::TooFewSamples { n, need: 2 });
    }
    Ok((0..n)
        .map(|i| {
            let mut acc = CompensatedSum::default();
            for (j, &g) in batch.iter().enumerate() {
                if j != i {
                    acc.add(g);
                }
            }
            batch[i] - acc.value() / (n - 1) as f64
        })
        .collect())
}

/// `S(i, k, all) - 1/(n-1) * sum_{j != i} S(j, k, all \ i)` by enumeration.
pub fn oracle_sloo(batch: &RewardBatch, k: usize, budget: &OracleBudget) -> Result<Vec<f64>> {
    let n = batch.len();
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k >= n {
        return Err(Error::BaselineUndefined { n, k });
    }
    budget.check(n, k)?;
    let s = subset_credit(batch, k, &all_indices(n));
    Ok((0..n)
        .map(|i| {
            let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let credit = subset_credit(batch, k, &rest);
            let mut acc = CompensatedSum::default();
            for j in rest {
                acc.add(credit[j]);
            }
            s[i] - acc.value() / (n - 1) as f64
        })
        .collect())
}

/// Mean over size-k subsets of `max(I) - max(I \ i)`, counted for subsets containing `i`
/// and normalised by `C(n, k)`.
pub fn oracle_sloo_minus_one(
    batch: &RewardBatch,
    k: usize,
    budget: &OracleBudget,
) -> Result<Vec<f64>> {
    let n = batch.len();
    if k < 2 {
        return Err(Error::ExcludedMaxUndefined { k });
    }
    prepare(n, k, budget)?;
    let mut acc = vec![CompensatedSum::default(); n];
    let count = for_each_subset(n, k, |sub| {
        let top = subset_max(batch, sub);
        for (pos, &i) in sub.iter().enumerate() {
            let without = sub
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != pos)
                .map(|(_, &j)| batch[j])
                .fold(f64::NEG_INFINITY, f64::max);
            acc[i].add(top - without);
        }
    });
    Ok(acc.iter().map(|a| a.value() / count as f64).collect())
}

fn all_indices(n: usize) -> Vec<usize> {
    (0..n).collect()
}

// S(i, k, pool) for every i in `pool`: sum over size-k subsets of `pool`
// containing i of the subset max, divided by C(|pool|, k). Entries outside the
// pool are left at zero.
fn subset_credit(batch: &RewardBatch, k: usize, pool: &[usize]) -> Vec<f64> {
    let mut acc = vec![CompensatedSum::default(); batch.len()];
    let mut members = Vec::with_capacity(k);
    let count = for_each_subset(pool.len(), k, |sub| {
        members.clear();
        members.extend(sub.iter().map(|&p| pool[p]));
        let top = subset_max(batch, &members);
        for &i in &members {
            acc[i].add(top);
        }
    });
    acc.iter().map(|a| a.value() / count as f64).collect()
}
