//! One-dimensional toy laboratory: a Gaussian policy over a scalar action with
//! reward `x^2` on `[0, 1]`, used to measure estimator variance, the maxg@k
//! landscape and short training runs.

pub mod estimator;
pub mod experiment;
pub mod policy;
pub mod quadrature;
pub mod train;

pub use estimator::{grad_estimate, transformed_rewards, EstimatorVariant};
pub use experiment::{
    argmax_theta, gradient_samples, landscape_sweep, linspace, variance_experiment, LandscapePoint,
    VarianceReport, VarianceRow, VarianceSetup,
};
pub use policy::{sample_batch, toy_reward, Policy1D};
pub use quadrature::{true_grad_fd, true_maxg_quadrature, DEFAULT_FD_STEP, DEFAULT_TOL};
pub use train::{train, KSchedule, TrainConfig, TrainStep};
