//! Normalised subset-count weights for samples sorted in ascending order.
//!
//! For a sorted batch of `n` rewards and subset size `k`, with 0-based sorted
//! rank `r`:
//!
//! * `diag[r] = C(r, k-1) / C(n, k)`: the share of size-k subsets whose
//!   maximum sits at rank `r`.
//! * `off[r] = C(r-1, k-2) / C(n, k)` (zero unless `k >= 2` and `r >= k-1`):
//!   the share of size-k subsets with maximum at rank `r` that also contain a
//!   fixed lower rank.
//!
//! Every entry lies in `[0, 1]`. Nothing is formed as a factorial quotient:
//! [`WeightTable::product`] multiplies `k` per-factor ratios per entry
//! (`O(nk)`), and [`WeightTable::lazy`] starts from the closed-form top entry
//! and walks down by one ratio per rank (`O(n)`). Walking from the top keeps
//! the large weights exact and lets the negligible ones underflow towards
//! zero, which is what makes `n = 10^5, k = n/2` usable.

/// How the weight tables are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// One ratio per rank, `O(n)` total.
    #[default]
    Lazy,
    /// Explicit product of `k` ratios per rank, `O(nk)` total.
    Product,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl WeightTable {
    pub fn new(n: usize, k: usize, evaluation: Evaluation) -> Self {
        match evaluation {
            Evaluation::Lazy => Self::lazy(n, k),
            Evaluation::Product => Self::product(n, k),
        }
    }

    pub fn lazy(n: usize, k: usize) -> Self {
        Self {
            diag: diagonal(n, k, Evaluation::Lazy),
            off: off_diagonal_lazy(n, k),
        }
    }

    pub fn product(n: usize, k: usize) -> Self {
        Self {
            diag: diagonal(n, k, Evaluation::Product),
            off: off_diagonal_product(n, k),
        }
    }
}

/// `C(r, k-1) / C(n, k)` for `r = 0..n`, i.e. the maxg@k weight of sorted rank `r`.
pub fn diagonal(n: usize, k: usize, evaluation: Evaluation) -> Vec<f64> {
    debug_assert!(1 <= k && k <= n);
    match evaluation {
        Evaluation::Lazy => diagonal_lazy(n, k),
        Evaluation::Product => (0..n).map(|r| diagonal_entry(n, k, r)).collect(),
    }
}

fn diagonal_lazy(n: usize, k: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    // C(n-1, k-1) / C(n, k) = k / n
    w[n - 1] = k as f64 / n as f64;
    for r in (1..n).rev() {
        if r < k {
            break;
        }
        // C(r-1, k-1) / C(r, k-1) = (r-k+1) / r
        w[r - 1] = w[r] * (r + 1 - k) as f64 / r as f64;
    }
    w
}

fn diagonal_entry(n: usize, k: usize, r: usize) -> f64 {
    if r + 1 < k {
        return 0.0;
    }
    let p = r + 1;
    let mut w = k as f64 / (n - k + 1) as f64;
    for j in 1..k {
        w *= (p - j) as f64 / (n - j + 1) as f64;
    }
    w
}

fn off_diagonal_lazy(n: usize, k: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if k < 2 {
        return w;
    }
    // C(n-2, k-2) / C(n, k) = k(k-1) / (n(n-1))
    w[n - 1] = (k as f64 / n as f64) * ((k - 1) as f64 / (n - 1) as f64);
    for r in (2..n).rev() {
        if r < k {
            break;
        }
        // C(r-2, k-2) / C(r-1, k-2) = (r-k+1) / (r-1)
        w[r - 1] = w[r] * (r + 1 - k) as f64 / (r - 1) as f64;
    }
    w
}

fn off_diagonal_product(n: usize, k: usize) -> Vec<f64> {
    (0..n)
        .map(|r| {
            if k < 2 || r + 1 < k {
                return 0.0;
            }
            let mut w = (k as f64 / n as f64) * ((k - 1) as f64 / (n - 1) as f64);
            for j in 0..k - 2 {
                w *= (r - 1 - j) as f64 / (n - 2 - j) as f64;
            }
            w
        })
        .collect()
}

/// `C(n-c, k) / C(n, k)`: the chance that a uniformly random size-k subset
/// misses all `c` marked elements. Defined as 1 for `k = 0`.
pub fn miss_all_ratio(n: usize, c: usize, k: usize) -> f64 {
    debug_assert!(c <= n && k <= n);
    if k > n - c {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, j| acc * (n - c - j) as f64 / (n - j) as f64)
}
