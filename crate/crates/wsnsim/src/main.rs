use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wsn_core::{
    death_milestones, default_milestones, lifetime, run_simulation, LwbNormalization, StrategyKind,
};
use wsnsim::config::{parse_size, parse_switch};
use wsnsim::output::{lifetimes, summarize, summary_csv};
use wsnsim::{
    emit_results, parse_config, read_milestones, run_grid_with_jobs, ExperimentPlan, HarnessError,
};

const DEFAULT_OUT: &str = "wsnsim-results";

#[derive(Parser)]
#[command(
    name = "wsnsim",
    version,
    about = "Cluster-based WSN lifetime simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single simulation and print its death milestones.
    Simulate(SimulateArgs),
    /// Sweep the configured grid and write result files.
    Grid(GridArgs),
    /// Print improvement statistics and lifetimes from a results directory.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value configuration file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Area as WxH meters, e.g. 200x200.
    #[arg(long, value_parser = parse_size)]
    size: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_kind)]
    strategy: Option<StrategyKind>,
    #[arg(long)]
    seed: Option<u64>,
    /// Charge clustering control traffic (on|off).
    #[arg(long, value_parser = parse_switch)]
    overhead: Option<bool>,
    #[arg(long, value_parser = parse_mode)]
    lwb_mode: Option<LwbNormalization>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory. Falls back to $WSNSIM_OUT, then the config's
    /// output_dir, then ./wsnsim-results.
    #[arg(long, env = "WSNSIM_OUT")]
    out: Option<PathBuf>,
    /// Maximum worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Directory containing milestones.csv.
    #[arg(long = "in")]
    input: PathBuf,
}

fn parse_kind(s: &str) -> Result<StrategyKind, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<LwbNormalization, String> {
    s.parse()
}

fn load_plan(path: Option<&Path>) -> Result<ExperimentPlan, HarnessError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| HarnessError::Io {
                path: p.to_path_buf(),
                source: e,
            })?;
            Ok(parse_config(&text)?)
        }
        None => Ok(ExperimentPlan::default()),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), HarnessError> {
    let mut plan = load_plan(args.config.as_deref())?;
    if let Some(on) = args.overhead {
        plan.params.overhead = on;
    }
    if let Some(mode) = args.lwb_mode {
        plan.params.lwb_mode = mode;
    }
    let size = args.size.unwrap_or(plan.sizes[0]);
    let kind = args.strategy.unwrap_or(plan.strategies[0]);
    let seed = args.seed.unwrap_or(plan.seed_base);

    let result = run_simulation(plan.run_config(size, kind, seed))?;
    let table = death_milestones(&result, &default_milestones(result.node_count))?;
    let ledger = result.energy_ledger;

    println!("size={}x{}", size.0, size.1);
    println!("strategy={kind}");
    println!("seed={seed}");
    println!("rounds_completed={}", result.rounds_completed);
    println!("truncated={}", result.truncated);
    match lifetime(&table, result.node_count) {
        Ok(r) => println!("lifetime={r}"),
        Err(_) => println!("lifetime="),
    }
    println!("energy.member_tx={}", ledger.member_tx);
    println!("energy.head_rx={}", ledger.head_rx);
    println!("energy.aggregation={}", ledger.aggregation);
    println!("energy.head_tx_bs={}", ledger.head_tx_bs);
    println!("energy.overhead={}", ledger.overhead);
    println!("conservation_error={}", result.conservation_error());
    println!("milestone,round");
    for (k, round) in table.iter() {
        println!("{k},{}", round.map(|r| r.to_string()).unwrap_or_default());
    }
    Ok(())
}

fn grid(args: GridArgs) -> Result<(), HarnessError> {
    let plan = load_plan(args.config.as_deref())?;
    let out = args
        .out
        .or_else(|| plan.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let rows = run_grid_with_jobs(&plan, args.jobs)?;
    let truncated = rows.iter().filter(|r| r.truncated).count();
    let records: Vec<_> = rows.into_iter().map(|r| r.record).collect();
    let written = emit_results(&records, &out)?;
    eprintln!(
        "{} runs ({} truncated), {} files written to {}",
        records.len(),
        truncated,
        written.len(),
        out.display()
    );
    Ok(())
}

fn summarize_dir(args: SummarizeArgs) -> Result<(), HarnessError> {
    let records = read_milestones(&args.input)?;
    print!(
        "{}",
        String::from_utf8_lossy(&summary_csv(&summarize(&records)))
    );
    println!();
    println!("width,height,strategy,runs,mean_lifetime");
    for row in lifetimes(&records) {
        println!(
            "{},{},{},{},{}",
            row.width,
            row.height,
            row.strategy,
            row.runs,
            row.mean_lifetime.map(|v| v.to_string()).unwrap_or_default()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Grid(a) => grid(a),
        Command::Summarize(a) => summarize_dir(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
