//! `gsig`: one-sample significance tests that keep their level when the data
//! source can steer its own dispersion inside a band `[sigma_lower,
//! sigma_upper]`.
//!
//! Subcommands: `critical-value` prints robust thresholds, `test` evaluates
//! both the robust and the classical rule on a data file, `estimate-bounds`
//! recovers the band from data, `simulate` reproduces the rejection-rate
//! tables and power curves as CSV + JSON, and `oracle` cross-checks the
//! closed-form tail laws against two independent numerical solvers.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 resource error.
//! Every randomized command takes an explicit `--seed` and is bit-for-bit
//! reproducible, independently of `--workers`.

mod data;
mod error;
mod report;
mod sim;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use gsig::adversary::NoiseModel;
use gsig::bounds::{self, BlockConfig};
use gsig::gnormal::{self, TestKind, TestSpec, VarianceBand};
use gsig::mc::{AdversaryTarget, Scenario, SimulationConfig, DEFAULT_N_GRID, DEFAULT_REPS};
use gsig::oracle::{self, PdeGrid};
use gsig::rules;

use crate::error::{CliError, Result};
use crate::report::{EstimateDoc, TestDoc};
use crate::sim::SimulateOutputs;

/// Plain-decimal rendering with `digits` significant digits.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

#[derive(Parser)]
#[command(
    name = "gsig",
    version,
    about = "Robust one-sample significance tests under variance uncertainty"
)]
struct Cli {
    /// Worker threads for the parallel sections (default: all cores).
    /// Never changes any numeric output.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the robust critical value for a kind, level and variance band
    CriticalValue(CriticalValueArgs),
    /// Run the robust and the classical test on a data file
    Test(TestArgs),
    /// Estimate the variance band from a data file
    EstimateBounds(EstimateBoundsArgs),
    /// Monte Carlo rejection-rate tables and power curves (CSV + JSON)
    Simulate(SimulateArgs),
    /// Cross-check the closed-form tail laws against numerical solvers
    Oracle(OracleArgs),
}

/// Hypothesis kind: `I` tests `mu <= mu0` (reject for large statistics),
/// `II` tests `mu >= mu0`, `III` tests `mu = mu0` two-sidedly.
#[derive(Debug, Clone, Copy, ValueEnum)]
#[allow(clippy::upper_case_acronyms)]
enum KindArg {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "II", alias = "ii")]
    II,
    #[value(name = "III", alias = "iii")]
    III,
}

impl From<KindArg> for TestKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::I => TestKind::I,
            KindArg::II => TestKind::II,
            KindArg::III => TestKind::III,
        }
    }
}

#[derive(Args)]
struct CriticalValueArgs {
    /// Hypothesis kind
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Significance level, in (0, 0.5)
    #[arg(long)]
    alpha: f64,
    /// Lower edge of the standard-deviation band
    #[arg(long)]
    sigma_lower: f64,
    /// Upper edge of the standard-deviation band
    #[arg(long)]
    sigma_upper: f64,
}

#[derive(Args)]
struct TestArgs {
    /// Hypothesis kind
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Null-hypothesis mean
    #[arg(long, default_value_t = 0.0)]
    mu0: f64,
    /// Significance level, in (0, 0.5)
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Input file, one numeric observation per line
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Skip a single header line in the data file
    #[arg(long)]
    header: bool,
    /// Lower band edge (known band; requires --sigma-upper)
    #[arg(long)]
    sigma_lower: Option<f64>,
    /// Upper band edge (known band; requires --sigma-lower)
    #[arg(long)]
    sigma_upper: Option<f64>,
    /// Estimate the band from the data with moving blocks of this length
    #[arg(long, value_name = "M")]
    block_length: Option<usize>,
}

#[derive(Args)]
struct EstimateBoundsArgs {
    /// Input file, one numeric observation per line
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Skip a single header line in the data file
    #[arg(long)]
    header: bool,
    /// Moving-block window length
    #[arg(long, value_name = "M")]
    block_length: Option<usize>,
    /// Split into this many equal consecutive subsamples (must divide n)
    #[arg(long, value_name = "K")]
    subsamples: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    /// Adversary aims at the classical threshold, band (0.5, 1)
    Sim1,
    /// Adversary aims at the robust threshold, band (0.5, 1)
    Sim2,
    /// Explicit band and adversary threshold
    Custom,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experimental design
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// Repetitions per table cell
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: u64,
    /// Master seed; reruns with the same seed are byte-identical
    #[arg(long)]
    seed: u64,
    /// Output directory for the CSV and JSON artifacts
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Null-hypothesis mean
    #[arg(long, default_value_t = 0.0)]
    mu0: f64,
    /// Significance level, in (0, 0.5)
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Comma-separated sample sizes (default: the standard table grid)
    #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
    n_list: Option<Vec<usize>>,
    /// Lower band edge (custom scenario only)
    #[arg(long)]
    sigma_lower: Option<f64>,
    /// Upper band edge (custom scenario only)
    #[arg(long)]
    sigma_upper: Option<f64>,
    /// Threshold the adversary aims at, on the statistic scale (custom only)
    #[arg(long)]
    adversary_c: Option<f64>,
    /// Also write the power sweeps power_mu.csv and power_n.csv
    #[arg(long)]
    power: bool,
    /// Sample size for the power-versus-mu sweep
    #[arg(long, default_value_t = 100, value_name = "N")]
    power_n: usize,
    /// Alternative mean for the power-versus-n sweep
    #[arg(long, default_value_t = 0.1, value_name = "MU")]
    power_mu: f64,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    which: OracleCommand,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact finite-horizon supremum over two-point designs (backward induction)
    Dp(DpArgs),
    /// Explicit finite-difference solve of the nonlinear heat equation
    Pde(PdeArgs),
}

#[derive(Args)]
struct DpArgs {
    /// Horizon (number of observations), at most 200
    #[arg(long)]
    n: usize,
    /// Threshold on the statistic scale
    #[arg(long)]
    c: f64,
    #[arg(long)]
    sigma_lower: f64,
    #[arg(long)]
    sigma_upper: f64,
}

#[derive(Args)]
struct PdeArgs {
    /// Threshold on the statistic scale
    #[arg(long)]
    c: f64,
    #[arg(long)]
    sigma_lower: f64,
    #[arg(long)]
    sigma_upper: f64,
    /// Space step (default 0.01)
    #[arg(long)]
    dx: Option<f64>,
    /// Time step (default dx^2 / (2 sigma_upper^2), the stability bound)
    #[arg(long)]
    dt: Option<f64>,
    /// March start time in (0, 1) (default 0.01)
    #[arg(long)]
    t0: Option<f64>,
    /// Half-width of the spatial domain (default max(c, 0) + 8 sigma_upper)
    #[arg(long)]
    half_width: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Resource(format!("cannot configure thread pool: {e}")))?;
    }
    match &cli.command {
        Command::CriticalValue(args) => cmd_critical_value(args),
        Command::Test(args) => cmd_test(args),
        Command::EstimateBounds(args) => cmd_estimate_bounds(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Oracle(args) => match &args.which {
            OracleCommand::Dp(dp) => cmd_oracle_dp(dp),
            OracleCommand::Pde(pde) => cmd_oracle_pde(pde),
        },
    }
}

fn cmd_critical_value(args: &CriticalValueArgs) -> Result<()> {
    let spec = TestSpec::new(args.kind.into(), 0.0, args.alpha)?;
    let band = VarianceBand::new(args.sigma_lower, args.sigma_upper)?;
    println!("{}", fmt_sig(gnormal::critical_value(spec, band), 12));
    Ok(())
}

fn cmd_test(args: &TestArgs) -> Result<()> {
    let spec = TestSpec::new(args.kind.into(), args.mu0, args.alpha)?;
    let observations = data::read_data_file(&args.data, args.header)?;
    let report = match (args.sigma_lower, args.sigma_upper, args.block_length) {
        (Some(lo), Some(up), None) => {
            rules::decide(&observations, spec, VarianceBand::new(lo, up)?)?
        }
        (None, None, Some(m)) => bounds::estimate_then_test(&observations, BlockConfig::new(m), spec)?,
        (None, None, None) => {
            return Err(CliError::Usage(
                "supply a band (--sigma-lower with --sigma-upper) or --block-length".into(),
            ))
        }
        _ => {
            return Err(CliError::Usage(
                "--sigma-lower and --sigma-upper must be given together, and not with \
                 --block-length"
                    .into(),
            ))
        }
    };
    println!("{}", serde_json::to_string_pretty(&TestDoc::from(report))?);
    Ok(())
}

fn cmd_estimate_bounds(args: &EstimateBoundsArgs) -> Result<()> {
    let observations = data::read_data_file(&args.data, args.header)?;
    let estimate = match (args.block_length, args.subsamples) {
        (Some(m), None) => bounds::moving_block_bounds(&observations, BlockConfig::new(m))?,
        (None, Some(k)) => bounds::subsample_bounds(&observations, k)?,
        (None, None) => {
            return Err(CliError::Usage(
                "supply --block-length or --subsamples".into(),
            ))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--block-length conflicts with --subsamples".into(),
            ))
        }
    };
    println!("{}", serde_json::to_string_pretty(&EstimateDoc::from(estimate))?);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (scenario, band) = match args.scenario {
        ScenarioArg::Sim1 | ScenarioArg::Sim2 => {
            if args.sigma_lower.is_some() || args.sigma_upper.is_some() || args.adversary_c.is_some()
            {
                return Err(CliError::Usage(
                    "--sigma-lower, --sigma-upper and --adversary-c apply to --scenario custom \
                     only"
                        .into(),
                ));
            }
            let scenario = match args.scenario {
                ScenarioArg::Sim1 => Scenario::Sim1,
                _ => Scenario::Sim2,
            };
            (scenario, VarianceBand::new(0.5, 1.0).expect("static band is valid"))
        }
        ScenarioArg::Custom => {
            let (Some(lo), Some(up), Some(c)) = (args.sigma_lower, args.sigma_upper, args.adversary_c)
            else {
                return Err(CliError::Usage(
                    "--scenario custom requires --sigma-lower, --sigma-upper and --adversary-c"
                        .into(),
                ));
            };
            (
                Scenario::Custom(AdversaryTarget::Fixed(c)),
                VarianceBand::new(lo, up)?,
            )
        }
    };

    let n_list = args.n_list.clone().unwrap_or_else(|| DEFAULT_N_GRID.to_vec());
    // The power-versus-mu sweep walks mu0 + 0.05 k, k = 1..8.
    let mu_list: Vec<f64> = if args.power {
        (1..=8).map(|k| args.mu0 + 0.05 * k as f64).collect()
    } else {
        Vec::new()
    };

    let cfg = SimulationConfig::new(
        scenario,
        band,
        args.mu0,
        args.alpha,
        n_list,
        mu_list,
        args.reps,
        args.seed,
        NoiseModel::StandardNormal,
    )?;
    sim::run(
        &cfg,
        &SimulateOutputs {
            out_dir: args.out.clone(),
            power_n: args.power_n,
            power_mu: args.power_mu,
            with_power: args.power,
        },
    )
}

fn cmd_oracle_dp(args: &DpArgs) -> Result<()> {
    let band = VarianceBand::new(args.sigma_lower, args.sigma_upper)?;
    let max = oracle::dp_max_rejection(args.n, args.c, band)?;
    let policy = oracle::dp_policy_value(args.n, args.c, band, TestKind::I)?;
    let p1 = gnormal::max_rejection_upper(args.c, band);
    println!("dp max value    = {}", fmt_sig(max, 12));
    println!("dp policy value = {}", fmt_sig(policy, 12));
    println!("closed-form p1  = {}", fmt_sig(p1, 12));
    println!("|dp max - p1|   = {}", fmt_sig((max - p1).abs(), 12));
    println!("max - policy    = {}", fmt_sig(max - policy, 12));
    Ok(())
}

fn cmd_oracle_pde(args: &PdeArgs) -> Result<()> {
    let band = VarianceBand::new(args.sigma_lower, args.sigma_upper)?;
    let auto = PdeGrid::auto(args.c, band);
    let dx = args.dx.unwrap_or_else(|| auto.dx());
    let dt = args
        .dt
        .unwrap_or_else(|| 0.5 * dx * dx / (band.sigma_upper() * band.sigma_upper()));
    let grid = PdeGrid::new(
        args.half_width.unwrap_or_else(|| auto.half_width()),
        dx,
        dt,
        args.t0.unwrap_or_else(|| auto.t0()),
    )?;
    let value = oracle::g_heat_solve(args.c, band, grid)?;
    let p1 = gnormal::max_rejection_upper(args.c, band);
    println!("pde value      = {}", fmt_sig(value, 12));
    println!("closed-form p1 = {}", fmt_sig(p1, 12));
    println!("|pde - p1|     = {}", fmt_sig((value - p1).abs(), 12));
    Ok(())
}
