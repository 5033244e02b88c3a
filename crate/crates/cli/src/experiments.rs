//! `toy variance`, `toy landscape`, `toy train` and `hoeffding`: CSV writers.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use passk::analytics::{asymptotic_variance, empirical_rho_variance, BernoulliWorld};
use passk::toy::{
    landscape_sweep, linspace, train, true_maxg_quadrature, variance_experiment, TrainConfig,
    VarianceSetup,
};

#[derive(Serialize)]
struct VarianceCsv {
    variant: String,
    n: usize,
    k: usize,
    theta: f64,
    variance: f64,
    stderr: f64,
    trials: usize,
}

#[derive(Serialize)]
struct LandscapeCsv {
    k: usize,
    theta: f64,
    value: f64,
    gradient: f64,
}

#[derive(Serialize)]
struct TrainCsv {
    step: usize,
    k: usize,
    theta: f64,
    maxg_quadrature: f64,
}

#[derive(Serialize)]
struct HoeffdingCsv {
    nu: f64,
    k: usize,
    n: usize,
    empirical: f64,
    theoretical: f64,
    ratio: f64,
}

fn write_rows<T: Serialize>(out: impl Write, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn variance(setup: &VarianceSetup, out: impl Write) -> Result<()> {
    let report = variance_experiment(setup)?;
    write_rows(
        out,
        report.rows.into_iter().map(|r| VarianceCsv {
            variant: r.variant.to_string(),
            n: r.n,
            k: r.k,
            theta: r.theta,
            variance: r.variance,
            stderr: r.stderr,
            trials: r.trials,
        }),
    )
}

pub struct LandscapeArgs {
    pub k_list: Vec<usize>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub points: usize,
    pub sigma: f64,
    pub tol: f64,
}

pub fn landscape(args: &LandscapeArgs, out: impl Write) -> Result<()> {
    let grid = linspace(args.theta_min, args.theta_max, args.points);
    let points = landscape_sweep(&args.k_list, &grid, args.sigma, args.tol)?;
    write_rows(
        out,
        points.into_iter().map(|p| LandscapeCsv {
            k: p.k,
            theta: p.theta,
            value: p.value,
            gradient: p.gradient,
        }),
    )
}

/// Writes every `every`-th step (and the last), with the quadrature maxg@`eval_k`
/// at the updated theta.
pub fn train_run(
    config: &TrainConfig,
    eval_k: usize,
    every: usize,
    tol: f64,
    out: impl Write,
) -> Result<()> {
    let steps = train(config)?;
    let last = steps.len().saturating_sub(1);
    let rows = steps
        .iter()
        .enumerate()
        .filter(|&(i, _)| i % every == 0 || i == last)
        .map(|(_, s)| {
            Ok(TrainCsv {
                step: s.step,
                k: s.k,
                theta: s.theta,
                maxg_quadrature: true_maxg_quadrature(s.theta, config.sigma, eval_k, tol)?,
            })
        })
        .collect::<passk::Result<Vec<_>>>()?;
    write_rows(out, rows)
}

pub struct HoeffdingArgs {
    pub nu: Vec<f64>,
    pub k: Vec<usize>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

pub fn hoeffding(args: &HoeffdingArgs, out: impl Write) -> Result<()> {
    let mut rows = Vec::new();
    for &nu in &args.nu {
        for &k in &args.k {
            let world = BernoulliWorld::new(nu, k, args.n)?;
            let empirical = empirical_rho_variance(&world, args.trials, args.seed)?.variance;
            let theoretical = asymptotic_variance(&world);
            rows.push(HoeffdingCsv {
                nu,
                k,
                n: args.n,
                empirical,
                theoretical,
                ratio: empirical / theoretical,
            });
        }
    }
    write_rows(out, rows)
}
