//! `fringe`: exact distributions, seeded Monte Carlo runs, and curve sweeps
//! for two-outcome interference experiments.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};

use config::{
    resolve_scenario, resolve_seed, OutputFormat, ResolvedScenario, RunConfig, ScenarioConfig,
    TauParam,
};
use fringe_core::{
    compare_to_oracle, exact_distribution, finite_env_overlap,
    finite_env_overlap_difference_form, overlap_estimate, run_many, BlockHamiltonian,
    CollapsePolicy, Distribution, Scenario,
};
use output::{fmt_g, Sink};

#[derive(Parser)]
#[command(
    name = "fringe",
    version,
    about = "Simulator for two-outcome interference experiments (double slit, Mach-Zehnder)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact outcome distribution of a scenario.
    Exact(ScenarioArgs),
    /// Run seeded trials, compare frequencies against the exact oracle.
    Run(RunArgs),
    /// Evaluate exact curves over a tau grid and emit CSV rows.
    Sweep(ScenarioArgs),
    /// Batch the interaction-free bomb certification loop.
    BombProtocol(BombProtocolArgs),
    /// Log-domain estimate of the N-atom pointer overlap.
    EnvOverlap(EnvOverlapArgs),
}

#[derive(Args, Clone, Default)]
struct ScenarioArgs {
    /// single-slit-left | single-slit-right | double-slit | which-path |
    /// bomb | bomb-protocol | idler | decoherence | rotating-idler | finite-env
    #[arg(long)]
    scenario: Option<String>,
    /// unitary | collapse | threshold
    #[arg(long)]
    policy: Option<String>,
    /// Collapse time for the threshold policy.
    #[arg(long = "tau-star")]
    tau_star: Option<f64>,
    /// Decoherence rate.
    #[arg(long)]
    lambda: Option<f64>,
    /// Idler rotation frequency.
    #[arg(long)]
    omega: Option<f64>,
    /// Pointer overlap <D_L|D_R>.
    #[arg(long)]
    epsilon: Option<f64>,
    /// which-path | plus-minus
    #[arg(long = "idler-basis")]
    idler_basis: Option<String>,
    /// screen-first | idler-first
    #[arg(long)]
    order: Option<String>,
    /// real | dud
    #[arg(long)]
    bomb: Option<String>,
    /// Hit time: a value, or start:stop:step for sweeps.
    #[arg(long)]
    tau: Option<String>,
    /// Environment dimension for finite-env.
    #[arg(long = "env-dim")]
    env_dim: Option<usize>,
    /// Seed for the random environment Hamiltonian.
    #[arg(long = "env-seed")]
    env_seed: Option<u64>,
    /// Round budget for the bomb protocol.
    #[arg(long = "max-rounds")]
    max_rounds: Option<u32>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | table
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Number of trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Alias for --trials when batching bombs.
    #[arg(long)]
    bombs: Option<u64>,
    /// Master seed (fallback: SIM_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BombProtocolArgs {
    /// real | dud
    #[arg(long)]
    bomb: Option<String>,
    /// Ensemble size.
    #[arg(long)]
    bombs: Option<u64>,
    /// Round budget per bomb.
    #[arg(long = "max-rounds")]
    max_rounds: Option<u32>,
    /// Master seed (fallback: SIM_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | table
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct EnvOverlapArgs {
    /// Per-atom overlap in (0, 1].
    #[arg(long = "lambda-atom")]
    lambda_atom: f64,
    /// Number of atoms.
    #[arg(long)]
    n: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Config assembled from file plus flag overrides.
struct Effective {
    resolved: ResolvedScenario,
    trials: Option<u64>,
    seed: u64,
    format: OutputFormat,
    out_path: Option<PathBuf>,
}

fn scenario_flags(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    Ok(ScenarioConfig {
        kind: args.scenario.clone(),
        policy: args.policy.clone(),
        tau_star: args.tau_star,
        epsilon: args.epsilon,
        bomb: args.bomb.clone(),
        idler_basis: args.idler_basis.clone(),
        order: args.order.clone(),
        lambda: args.lambda,
        omega: args.omega,
        tau: args.tau.as_deref().map(TauParam::parse).transpose()?,
        env_dim: args.env_dim,
        env_seed: args.env_seed,
        max_rounds: args.max_rounds,
    })
}

fn effective_config(
    args: &ScenarioArgs,
    trials: Option<u64>,
    seed: Option<u64>,
) -> Result<Effective> {
    let base = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let scenario = base.scenario.overlay(&scenario_flags(args)?);
    let format = match &args.format {
        Some(text) => OutputFormat::parse(text)?,
        None => base.output.unwrap_or(OutputFormat::Table),
    };
    Ok(Effective {
        resolved: resolve_scenario(&scenario)?,
        trials: trials.or(base.trials),
        seed: resolve_seed(seed.or(base.seed))?,
        format,
        out_path: args.out.clone().or(base.out_path),
    })
}

fn require_point(resolved: &ResolvedScenario, command: &str) -> Result<()> {
    if resolved.grid.is_some() {
        bail!("{command} evaluates a single hit time; give --tau one value, not a range");
    }
    Ok(())
}

fn cmd_exact(args: &ScenarioArgs) -> Result<()> {
    let eff = effective_config(args, None, None)?;
    require_point(&eff.resolved, "exact")?;
    let dist = exact_distribution(&eff.resolved.scenario)?;
    let mut sink = Sink::new(eff.out_path.as_deref());
    if eff.format == OutputFormat::Csv {
        sink.line("outcome,probability");
    }
    for (key, p) in dist.keyed_cells() {
        sink.line(format!("{key},{}", fmt_g(p)));
    }
    if eff.format == OutputFormat::Table && dist.events().len() > 1 {
        for event in dist.events() {
            for (label, p) in dist.marginal(event)? {
                sink.line(format!("marginal,{event}={label},{}", fmt_g(p)));
            }
        }
    }
    sink.finish()
}

/// Shared by `run` and `bomb-protocol`: batch, compare, render, and signal
/// statistical failure through the exit code.
fn run_and_report(eff: &Effective, trials: u64) -> Result<ExitCode> {
    let scenario = &eff.resolved.scenario;
    let summary = run_many(scenario, trials, eff.seed)?;
    let exact = exact_distribution(scenario)?;
    let report = compare_to_oracle(&summary, &exact)?;
    let mut sink = Sink::new(eff.out_path.as_deref());
    sink.line("outcome,count,freq,wilson95,expected,z,pass");
    for cell in &report.cells {
        let z = cell.z.map(fmt_g).unwrap_or_default();
        sink.line(format!(
            "{},{},{},{},{},{},{}",
            cell.key,
            cell.count,
            fmt_g(cell.freq),
            fmt_g(summary.ci_halfwidth(&cell.key)),
            fmt_g(cell.expected),
            z,
            cell.pass
        ));
    }
    if eff.format == OutputFormat::Table {
        sink.line(format!("trials,{trials}"));
        sink.line(format!("seed,{}", eff.seed));
        sink.line(format!("all_pass,{}", report.all_pass()));
    }
    sink.finish()?;
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let trials = args.trials.or(args.bombs);
    let eff = effective_config(&args.scenario, trials, args.seed)?;
    require_point(&eff.resolved, "run")?;
    let trials = eff
        .trials
        .ok_or_else(|| anyhow!("run requires --trials (or --bombs for bomb batches)"))?;
    run_and_report(&eff, trials)
}

fn cmd_bomb_protocol(args: &BombProtocolArgs) -> Result<ExitCode> {
    let scenario_args = ScenarioArgs {
        scenario: Some("bomb-protocol".to_string()),
        bomb: args.bomb.clone(),
        max_rounds: args.max_rounds,
        config: args.config.clone(),
        out: args.out.clone(),
        format: args.format.clone(),
        ..Default::default()
    };
    let eff = effective_config(&scenario_args, args.bombs, args.seed)?;
    let trials = eff
        .trials
        .ok_or_else(|| anyhow!("bomb-protocol requires --bombs"))?;
    run_and_report(&eff, trials)
}

fn screen_cell(dist: &Distribution, label: &str) -> Result<f64> {
    dist.probability(&[("screen", label)])
        .ok_or_else(|| anyhow!("distribution has no screen cell {label}"))
}

fn cmd_sweep(args: &ScenarioArgs) -> Result<()> {
    let eff = effective_config(args, None, None)?;
    let grid = match &eff.resolved.grid {
        Some(grid) => grid.clone(),
        None => match &eff.resolved.scenario {
            Scenario::DecoherenceSweep { tau, .. }
            | Scenario::RotatingIdler { tau, .. }
            | Scenario::FiniteEnvironment { tau, .. } => vec![*tau],
            _ => bail!(
                "sweep needs a time-dependent scenario (decoherence, rotating-idler, finite-env)"
            ),
        },
    };
    let mut sink = Sink::new(eff.out_path.as_deref());
    match &eff.resolved.scenario {
        Scenario::DecoherenceSweep {
            lambda_rate,
            policy,
            ..
        } => {
            sink.line("tau,p_A_exact_unitary,p_A_exact_policy,p_B_exact_unitary,c_tau");
            for &tau in &grid {
                let unitary = exact_distribution(&Scenario::DecoherenceSweep {
                    lambda_rate: *lambda_rate,
                    policy: CollapsePolicy::Unitary,
                    tau,
                })?;
                let with_policy = exact_distribution(&Scenario::DecoherenceSweep {
                    lambda_rate: *lambda_rate,
                    policy: *policy,
                    tau,
                })?;
                let c = (-lambda_rate * tau).exp();
                sink.line(format!(
                    "{},{},{},{},{}",
                    fmt_g(tau),
                    fmt_g(screen_cell(&unitary, "A")?),
                    fmt_g(screen_cell(&with_policy, "A")?),
                    fmt_g(screen_cell(&unitary, "B")?),
                    fmt_g(c)
                ));
            }
        }
        Scenario::RotatingIdler { omega, .. } => {
            sink.line("tau,p_A,p_B");
            for &tau in &grid {
                let dist = exact_distribution(&Scenario::RotatingIdler { omega: *omega, tau })?;
                sink.line(format!(
                    "{},{},{}",
                    fmt_g(tau),
                    fmt_g(screen_cell(&dist, "A")?),
                    fmt_g(screen_cell(&dist, "B")?)
                ));
            }
        }
        Scenario::FiniteEnvironment {
            dim_env, env_seed, ..
        } => {
            sink.line("t,re_c,im_c,abs_c,abs_c_paperform");
            let bh = BlockHamiltonian::random(*dim_env, *env_seed)?;
            for &t in &grid {
                let c = finite_env_overlap(&bh, t)?;
                let paper = finite_env_overlap_difference_form(&bh, t)?;
                sink.line(format!(
                    "{},{},{},{},{}",
                    fmt_g(t),
                    fmt_g(c.re),
                    fmt_g(c.im),
                    fmt_g(c.norm()),
                    fmt_g(paper.norm())
                ));
            }
        }
        _ => bail!(
            "sweep needs a time-dependent scenario (decoherence, rotating-idler, finite-env)"
        ),
    }
    sink.finish()
}

fn cmd_env_overlap(args: &EnvOverlapArgs) -> Result<()> {
    let est = overlap_estimate(args.lambda_atom, args.n)?;
    let mut sink = Sink::new(args.out.as_deref());
    sink.line(format!("log10_overlap,{}", fmt_g(est.log10_overlap)));
    sink.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Exact(args) => cmd_exact(args).map(|()| ExitCode::SUCCESS),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args).map(|()| ExitCode::SUCCESS),
        Command::BombProtocol(args) => cmd_bomb_protocol(args),
        Command::EnvOverlap(args) => cmd_env_overlap(args).map(|()| ExitCode::SUCCESS),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
