//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.
//!
//!     cargo test -p passk --test acceptance

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use passk::analytics::{asymptotic_variance, empirical_rho_variance, BernoulliWorld};
use passk::oracle::{self, OracleBudget};
use passk::rng::stream_rng;
use passk::stats::mean_with_stderr;
use passk::toy::{
    argmax_theta, gradient_samples, landscape_sweep, linspace, train, true_grad_fd,
    true_maxg_quadrature, variance_experiment, EstimatorVariant, KSchedule, Policy1D, TrainConfig,
    VarianceSetup, DEFAULT_FD_STEP, DEFAULT_TOL,
};
use passk::{
    binary_reward_weights, maxg_at_k, pass_at_k_binary, transform_basic_loo, transform_s,
    transform_sloo, transform_sloo_minus_one, BinaryBatch, Error, RewardBatch,
};

type Transform = fn(&RewardBatch, usize) -> passk::Result<passk::TransformedBatch>;
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn uniform_batch(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> RewardBatch {
    RewardBatch::new((0..n).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

fn oracle_equivalence() -> Outcome {
    const TOL: f64 = 1e-9;
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for n in 1..=12 {
        for k in 1..=n {
            let mut rng = stream_rng(1, (n * 100 + k) as u64);
            for _ in 0..200 {
                let g = uniform_batch(&mut rng, n, -1.0, 1.0);
                worst = worst.max(
                    (maxg_at_k(&g, k).unwrap() - oracle::oracle_maxg_at_k(&g, k, &budget).unwrap())
                        .abs(),
                );
                worst = worst.max(max_abs_diff(
                    &transform_s(&g, k).unwrap(),
                    &oracle::oracle_s(&g, k, &budget).unwrap(),
                ));
                if k < n {
                    worst = worst.max(max_abs_diff(
                        &transform_sloo(&g, k).unwrap(),
                        &oracle::oracle_sloo(&g, k, &budget).unwrap(),
                    ));
                }
                if k >= 2 {
                    worst = worst.max(max_abs_diff(
                        &transform_sloo_minus_one(&g, k).unwrap(),
                        &oracle::oracle_sloo_minus_one(&g, k, &budget).unwrap(),
                    ));
                }
                if n >= 2 {
                    worst = worst.max(max_abs_diff(
                        &transform_basic_loo(&g).unwrap(),
                        &oracle::oracle_basic_loo(&g).unwrap(),
                    ));
                }
                let flags =
                    BinaryBatch::new((0..n).map(|_| rng.random_bool(0.4)).collect()).unwrap();
                worst = worst.max(
                    (pass_at_k_binary(n, flags.correct(), k).unwrap()
                        - oracle::oracle_pass_at_k_binary(&flags, k, &budget).unwrap())
                    .abs(),
                );
                worst = worst.max(max_abs_diff(
                    &binary_reward_weights(&flags, k).unwrap(),
                    &oracle::oracle_binary_weights(&flags, k, &budget).unwrap(),
                ));
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= TOL && elapsed < Duration::from_secs(60),
        format!(
            "{checked} batches, max |diff| = {worst:.3e} (tol {TOL:e}), {elapsed:.2?} (limit 60 s)"
        ),
    )
}

fn binary_estimator() -> Outcome {
    let v = pass_at_k_binary(5, 2, 2).unwrap();
    let err = pass_at_k_binary(3, 1, 4);
    let ok = (v - 0.7).abs() <= 1e-12 && err == Err(Error::NotEstimable { n: 3, k: 4 });
    outcome(ok, format!("rho(5,2,2) = {v:.17}; n=3,k=4 -> {err:?}"))
}

fn binary_continuous_consistency() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for n in 1..=12usize {
        for pattern in 0u32..(1 << n) {
            let bits: Vec<bool> = (0..n).map(|i| pattern >> i & 1 == 1).collect();
            let flags = BinaryBatch::new(bits).unwrap();
            let rewards = RewardBatch::from(&flags);
            for k in 1..=n {
                let s = transform_s(&rewards, k).unwrap();
                let w = binary_reward_weights(&flags, k).unwrap();
                worst = worst.max(max_abs_diff(&s, &w));
                cases += 1;
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{cases} (pattern, k) cases, max |s - r| = {worst:.3e}"),
    )
}

fn sum_and_translation() -> Outcome {
    const TOL: f64 = 1e-9;
    let mut rng = stream_rng(2, 0);
    let (mut sum_worst, mut shift_worst) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(2..=64);
        let k = rng.random_range(2..=n);
        let g = uniform_batch(&mut rng, n, -1.0, 1.0);
        let s: f64 = transform_s(&g, k).unwrap().iter().sum();
        sum_worst = sum_worst.max((s - k as f64 * maxg_at_k(&g, k).unwrap()).abs());
        let c = rng.random_range(-5.0..5.0);
        let shifted = RewardBatch::new(g.iter().map(|v| v + c).collect()).unwrap();
        shift_worst = shift_worst.max(max_abs_diff(
            &transform_sloo_minus_one(&g, k).unwrap(),
            &transform_sloo_minus_one(&shifted, k).unwrap(),
        ));
    }
    outcome(
        sum_worst <= TOL && shift_worst <= TOL,
        format!("sum identity max err {sum_worst:.3e}, sloo-1 shift max err {shift_worst:.3e} (tol {TOL:e})"),
    )
}

fn unbiasedness() -> Outcome {
    let start = Instant::now();
    let (theta, sigma, n, k, trials) = (1.0, 0.1, 8, 4, 10_000);
    let truth = true_grad_fd(theta, sigma, k, DEFAULT_FD_STEP, DEFAULT_TOL).unwrap();
    let variants = [
        EstimatorVariant::AllSubsetsNoBaseline,
        EstimatorVariant::AllSubsetsLoo,
        EstimatorVariant::LooMinusOneAllSubsets,
    ];
    let policy = Policy1D::new(theta, sigma).unwrap();
    let samples = gradient_samples(&policy, n, k, trials, &variants, 11).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (v, xs) in variants.iter().zip(&samples) {
        let (m, se) = mean_with_stderr(xs);
        let z = (m - truth) / se;
        ok &= z.abs() <= 4.0;
        parts.push(format!("{v}: {m:.4} (z={z:+.2})"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    outcome(
        ok,
        format!("truth {truth:.4}; {}; {elapsed:.2?}", parts.join(", ")),
    )
}

fn variance_ordering() -> Outcome {
    let setup = VarianceSetup {
        theta: 1.0,
        k: 4,
        n_list: vec![32],
        trials: 10_000,
        variants: vec![
            EstimatorVariant::LooMinusOneAllSubsets,
            EstimatorVariant::AllSubsetsLoo,
            EstimatorVariant::AllSubsetsNoBaseline,
        ],
        seed: 7,
        ..VarianceSetup::default()
    };
    let report = variance_experiment(&setup).unwrap();
    let row = |v| report.get(v, 32).unwrap();
    let a = row(EstimatorVariant::LooMinusOneAllSubsets);
    let b = row(EstimatorVariant::AllSubsetsLoo);
    let c = row(EstimatorVariant::AllSubsetsNoBaseline);
    let ordered = a.variance <= b.variance && b.variance <= c.variance;
    let sep = |lo: &passk::toy::VarianceRow, hi: &passk::toy::VarianceRow| {
        (hi.variance - lo.variance) / lo.stderr.hypot(hi.stderr)
    };
    let (s1, s2) = (sep(a, b), sep(b, c));
    let flag = |s: f64| if s >= 2.0 { "" } else { " [FLAG: < 2 stderr]" };
    outcome(
        ordered,
        format!(
            "Var(sloo-1)={:.4e} <= Var(sloo)={:.4e} ({s1:.1} se{}) <= Var(s)={:.4e} ({s2:.1} se{})",
            a.variance,
            b.variance,
            flag(s1),
            c.variance,
            flag(s2)
        ),
    )
}

fn landscape() -> Outcome {
    let ks = [1, 2, 4, 8, 16];
    let grid = linspace(0.0, 1.5, 151);
    let points = landscape_sweep(&ks, &grid, 0.1, 1e-10).unwrap();
    let argmax: Vec<f64> = ks
        .iter()
        .map(|&k| argmax_theta(&points, k).unwrap())
        .collect();
    let monotone = argmax.windows(2).all(|w| w[0] <= w[1]);
    let strict = argmax[4] > argmax[0];
    let bounded = points.iter().all(|p| (0.0..=1.0).contains(&p.value));
    outcome(
        monotone && strict && bounded,
        format!("argmax theta for k={ks:?}: {argmax:?}"),
    )
}

fn hoeffding() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for nu in [0.1, 0.5] {
        for k in [1, 2, 4] {
            let world = BernoulliWorld::new(nu, k, 1000).unwrap();
            let emp = empirical_rho_variance(&world, 20_000, 3).unwrap();
            let ratio = emp.variance / asymptotic_variance(&world);
            ok &= (ratio - 1.0).abs() <= 0.1;
            parts.push(format!("nu={nu},k={k}: {ratio:.3}"));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    outcome(
        ok,
        format!(
            "n*Var/k^2 zeta1 ratios [{}]; {elapsed:.2?}",
            parts.join(", ")
        ),
    )
}

fn performance() -> Outcome {
    let n = 100_000;
    let k = n / 2;
    let g = uniform_batch(&mut stream_rng(4, 0), n, 0.0, 1.0);
    let mut ok = true;
    let mut parts = Vec::new();
    let runs: [(&str, Transform); 3] = [
        ("s", transform_s),
        ("sloo", transform_sloo),
        ("sloo_minus_one", transform_sloo_minus_one),
    ];
    for (name, f) in runs {
        let start = Instant::now();
        let out = f(&g, k).unwrap();
        let elapsed = start.elapsed();
        let finite = out.iter().all(|v| v.is_finite());
        ok &= finite && elapsed < Duration::from_millis(100);
        parts.push(format!(
            "{name}: {elapsed:.2?}{}",
            if finite { "" } else { " NON-FINITE" }
        ));
    }
    outcome(ok, format!("n={n}, k={k}: {}", parts.join(", ")))
}

fn annealed_training() -> Outcome {
    let base = TrainConfig::default();
    let final_maxg1 = |cfg: &TrainConfig| {
        let theta = train(cfg).unwrap().last().unwrap().theta;
        true_maxg_quadrature(theta, cfg.sigma, 1, 1e-10).unwrap()
    };
    let annealed_cfg = |seed| TrainConfig {
        k_schedule: "0:8,1500:1".parse().unwrap(),
        seed,
        ..base.clone()
    };
    let fixed_cfg = |seed| TrainConfig {
        k_schedule: KSchedule::constant(8).unwrap(),
        seed,
        ..base.clone()
    };
    let deterministic = train(&annealed_cfg(0)).unwrap() == train(&annealed_cfg(0)).unwrap();
    let annealed: Vec<f64> = (0..5).map(|s| final_maxg1(&annealed_cfg(s))).collect();
    let fixed: Vec<f64> = (0..5).map(|s| final_maxg1(&fixed_cfg(s))).collect();
    let (ma, sa) = mean_with_stderr(&annealed);
    let (mf, sf) = mean_with_stderr(&fixed);
    let spread = sa.hypot(sf);
    outcome(
        deterministic && ma >= mf - 2.0 * spread,
        format!("final maxg@1: annealed {ma:.4} ± {sa:.4}, k=8 fixed {mf:.4} ± {sf:.4}; deterministic={deterministic}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "AC1 oracle equivalence (n,k <= 12, 200 batches, 1e-9)",
            oracle_equivalence,
        ),
        (
            "AC2 binary estimator rho(5,2,2) = 0.7, n < k rejected",
            binary_estimator,
        ),
        (
            "AC3 binary/continuous consistency (n <= 12)",
            binary_continuous_consistency,
        ),
        (
            "AC4 sum identity and sloo-1 translation (1000 batches)",
            sum_and_translation,
        ),
        ("AC5 unbiasedness at n=8, k=4, theta=1", unbiasedness),
        ("AC6 variance ordering at n=32, k=4", variance_ordering),
        ("AC7 landscape argmax nondecreasing in k", landscape),
        ("AC8 Hoeffding asymptotic variance within 10%", hoeffding),
        ("AC9 n=100000, k=n/2 transforms under 100 ms", performance),
        (
            "AC10 annealed 0:8,1500:1 training smoke test",
            annealed_training,
        ),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!(
            "[{}] {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
