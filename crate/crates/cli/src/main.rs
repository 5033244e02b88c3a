//! `passk`: reward transformations, estimators, oracle cross-checks and toy
//! experiments from the command line.
//!
//! Exit codes: 0 on success, 2 on invalid configuration or any invalid record,
//! 3 if any input line failed to parse. `PKPO_THREADS` caps the worker count.

mod batch_cmds;
mod experiments;
mod records;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use passk::oracle::OracleBudget;
use passk::toy::{EstimatorVariant, KSchedule, Policy1D, TrainConfig, VarianceSetup};
use passk::{Method, TransformConfig};

use experiments::{HoeffdingArgs, LandscapeArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok,
    Invalid,
    ParseError,
}

impl From<ExitStatus> for ExitCode {
    fn from(s: ExitStatus) -> Self {
        ExitCode::from(match s {
            ExitStatus::Ok => 0,
            ExitStatus::Invalid => 2,
            ExitStatus::ParseError => 3,
        })
    }
}

#[derive(Parser)]
#[command(
    name = "passk",
    version,
    about = "Unbiased pass@k / maxg@k estimators and reward transformations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// JSONL input, one record per line (stdin if omitted or "-")
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file (stdout if omitted or "-")
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OutputOnly {
    /// Output file (stdout if omitted or "-")
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Append "transformed" to every record
    Transform {
        /// basic_loo, s, sloo, sloo_minus_one or binary_weights
        #[arg(long)]
        method: Method,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Append "pass_at_k" (flag records) or "maxg_at_k" (reward records)
    Estimate {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Compare transforms against subset enumeration and report the largest deviation
    OracleDiff {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        k: usize,
        /// Largest batch size the oracle will enumerate
        #[arg(long, default_value_t = OracleBudget::default().max_n)]
        max_n: usize,
        #[command(flatten)]
        io: Io,
    },
    /// One-dimensional toy policy experiments
    #[command(subcommand)]
    Toy(Toy),
    /// Empirical vs asymptotic variance of the pass@k estimator
    Hoeffding {
        /// Pass rates, comma separated
        #[arg(long, required = true, value_delimiter = ',')]
        nu: Vec<f64>,
        /// Subset sizes, comma separated
        #[arg(long, required = true, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputOnly,
    },
}

#[derive(Subcommand)]
enum Toy {
    /// Gradient-estimator variance across batch sizes
    Variance {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32])]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = Policy1D::DEFAULT_SIGMA)]
        sigma: f64,
        /// Estimator variants, comma separated (all by default)
        #[arg(long, value_delimiter = ',')]
        variants: Vec<EstimatorVariant>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputOnly,
    },
    /// Quadrature maxg@k and its gradient over a theta grid
    Landscape {
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8, 16])]
        k_list: Vec<usize>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_min: f64,
        #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
        theta_max: f64,
        #[arg(long, default_value_t = 151)]
        points: usize,
        #[arg(long, default_value_t = Policy1D::DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutputOnly,
    },
    /// Gradient ascent on the toy policy
    Train {
        /// Constant subset size
        #[arg(long, conflicts_with = "anneal")]
        k: Option<usize>,
        /// Piecewise-constant k schedule, e.g. 0:8,1500:1
        #[arg(long)]
        anneal: Option<KSchedule>,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = EstimatorVariant::LooMinusOneAllSubsets)]
        variant: EstimatorVariant,
        #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
        theta0: f64,
        #[arg(long, default_value_t = Policy1D::DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Subset size for the reported quadrature maxg
        #[arg(long, default_value_t = 1)]
        eval_k: usize,
        /// Write every n-th step (the final step is always written)
        #[arg(long, default_value_t = 1)]
        every: usize,
        #[command(flatten)]
        out: OutputOnly,
    },
}

fn open_input(path: &Option<PathBuf>) -> Result<Box<dyn BufRead>> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            Ok(Box::new(BufReader::new(f)))
        }
        _ => Ok(Box::new(BufReader::new(io::stdin().lock()))),
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PKPO_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .with_context(|| format!("PKPO_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitStatus> {
    configure_threads()?;
    match cli.command {
        Command::Transform { method, k, io } => {
            let config = TransformConfig::new(k, method)?;
            let tally = batch_cmds::transform(
                &config,
                open_input(&io.input)?,
                &mut open_output(&io.output)?,
            )?;
            Ok(tally.status())
        }
        Command::Estimate { k, io } => {
            if k == 0 {
                bail!(passk::Error::ZeroK);
            }
            let tally =
                batch_cmds::estimate(k, open_input(&io.input)?, &mut open_output(&io.output)?)?;
            Ok(tally.status())
        }
        Command::OracleDiff {
            method,
            k,
            max_n,
            io,
        } => {
            let config = TransformConfig::new(k, method)?;
            let budget = OracleBudget {
                max_n,
                ..OracleBudget::default()
            };
            let report = batch_cmds::oracle_diff(&config, &budget, open_input(&io.input)?)?;
            let mut out = open_output(&io.output)?;
            serde_json::to_writer(&mut out, &report.to_json())?;
            writeln!(out)?;
            out.flush()?;
            Ok(report.status())
        }
        Command::Toy(Toy::Variance {
            k,
            n_list,
            trials,
            theta,
            sigma,
            variants,
            seed,
            out,
        }) => {
            let setup = VarianceSetup {
                theta,
                sigma,
                k,
                n_list,
                trials,
                variants: if variants.is_empty() {
                    EstimatorVariant::ALL.to_vec()
                } else {
                    variants
                },
                seed,
            };
            experiments::variance(&setup, open_output(&out.output)?)?;
            Ok(ExitStatus::Ok)
        }
        Command::Toy(Toy::Landscape {
            k_list,
            theta_min,
            theta_max,
            points,
            sigma,
            tol,
            out,
        }) => {
            let args = LandscapeArgs {
                k_list,
                theta_min,
                theta_max,
                points,
                sigma,
                tol,
            };
            experiments::landscape(&args, open_output(&out.output)?)?;
            Ok(ExitStatus::Ok)
        }
        Command::Toy(Toy::Train {
            k,
            anneal,
            n,
            lr,
            steps,
            variant,
            theta0,
            sigma,
            seed,
            eval_k,
            every,
            out,
        }) => {
            if every == 0 {
                bail!("--every must be at least 1");
            }
            let k_schedule = match (anneal, k) {
                (Some(s), _) => s,
                (None, k) => KSchedule::constant(k.unwrap_or(1))?,
            };
            let config = TrainConfig {
                k_schedule,
                n,
                learning_rate: lr,
                steps,
                seed,
                variant,
                theta0,
                sigma,
            };
            experiments::train_run(&config, eval_k, every, 1e-10, open_output(&out.output)?)?;
            Ok(ExitStatus::Ok)
        }
        Command::Hoeffding {
            nu,
            k,
            n,
            trials,
            seed,
            out,
        } => {
            let args = HoeffdingArgs {
                nu,
                k,
                n,
                trials,
                seed,
            };
            experiments::hoeffding(&args, open_output(&out.output)?)?;
            Ok(ExitStatus::Ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitStatus::Invalid.into()
        }
    }
}
