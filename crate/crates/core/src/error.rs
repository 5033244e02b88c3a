use thiserror::Error;

/// Errors raised by the estimators, transforms, oracle and toy laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("batch is empty")]
    EmptyBatch,

    #[error("reward at index {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("flag at index {index} is {value}, expected 0 or 1")]
    InvalidFlag { index: usize, value: f64 },

    #[error("k must be at least 1")]
    ZeroK,

    /// pass@k (and maxg@k) is unbiasedly estimable from n samples iff n >= k.
    #[error("not unbiasedly estimable: k={k} exceeds the number of samples n={n}")]
    NotEstimable { n: usize, k: usize },

    /// The leave-one-out baseline averages size-k subsets of the other n-1 samples.
    #[error("leave-one-out baseline undefined: needs k < n, got n={n}, k={k}")]
    BaselineUndefined { n: usize, k: usize },

    #[error("max over the other k-1 samples is undefined for k={k}; use basic_loo for k=1")]
    ExcludedMaxUndefined { k: usize },

    #[error("need at least {need} samples, got {n}")]
    TooFewSamples { n: usize, need: usize },

    #[error("oracle budget exceeded: n={n}, C(n,k)={subsets} (limits: n <= {max_n}, subsets <= {max_subsets})")]
    OracleBudget {
        n: usize,
        subsets: u128,
        max_n: usize,
        max_subsets: u128,
    },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {err:e}) within {intervals} intervals")]
    Quadrature {
        tol: f64,
        err: f64,
        intervals: usize,
    },

    #[error("invalid estimator configuration: {0}")]
    InvalidVariant(String),

    #[error("invalid argument: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
