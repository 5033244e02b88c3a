//! Unbiased pass@k and maxg@k estimators, and the reward transformations whose
//! score-function gradients are unbiased for them.
//!
//! Given `n` sampled rewards for one task, the transforms in [`transforms`]
//! return per-sample weights to plug into a REINFORCE-style update in place of
//! the raw rewards:
//!
//! * [`transform_s`]: credit each sample with the mean max over size-k subsets it belongs to.
//! * [`transform_sloo`]: the same, minus a leave-one-out baseline over size-k subsets.
//! * [`transform_sloo_minus_one`]: the same, minus the max over the other k-1 subset members.
//! * [`binary_reward_weights`]: the closed form for 0/1 rewards.
//!
//! [`oracle`] recomputes everything by subset enumeration, [`toy`] is a
//! one-dimensional policy laboratory, and [`analytics`] holds the asymptotic
//! variance of the pass@k estimator.
//!
//! ```
//! use passk::{transform_s, maxg_at_k, RewardBatch};
//!
//! let g = RewardBatch::new(vec![1.0, 2.0, 3.0]).unwrap();
//! assert!((maxg_at_k(&g, 2).unwrap() - 8.0 / 3.0).abs() < 1e-12);
//! let s = transform_s(&g, 2).unwrap();
//! assert!((s[2] - 2.0).abs() < 1e-12);
//! ```

pub mod analytics;
pub mod batch;
pub mod error;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod toy;
pub mod transforms;
pub mod weights;

pub use batch::{BinaryBatch, Method, RewardBatch, TransformConfig, TransformedBatch};
pub use error::{Error, Result};
pub use transforms::{
    apply, apply_with, binary_reward_weights, maxg_at_k, maxg_at_k_with, pass_at_k_binary,
    transform_basic_loo, transform_s, transform_s_with, transform_sloo, transform_sloo_minus_one,
    transform_sloo_minus_one_with, transform_sloo_with,
};
pub use weights::Evaluation;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
