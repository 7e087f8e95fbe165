use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hcbf_core::allocation::AllocStrategy;
use hcbf_core::harness::io::{load_scenario, PAIRS_HEADER, TRAJECTORY_HEADER};
use hcbf_core::harness::{
    random_scenario, run_random_trials, run_trial, LogLevel, Method, SimConfig, SuiteReport,
    TrialOutput,
};
use hcbf_core::nominal::NominalConfig;
use hcbf_core::Error;

#[derive(Parser)]
#[command(name = "hcbf", version, about = "Heterogeneous multi-robot barrier-filter benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file or a batch of random scenarios.
    Run(RunArgs),
    /// Print a random scenario as JSON.
    Scenario {
        /// Number of robots.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "random")]
    scenario: Option<PathBuf>,
    /// Random scenarios with this many robots.
    #[arg(long, value_name = "N", required_unless_present = "scenario")]
    random: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum)]
    alloc: Option<AllocArg>,
    /// Attractive weight of the potential field.
    #[arg(long)]
    w: Option<f64>,
    /// Number of random trials.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Step budget per trial.
    #[arg(long)]
    steps: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = LogArg::Metrics)]
    log_level: LogArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Cahcbf,
    Apf,
    Hocbf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AllocArg {
    Equal,
    Cap,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogArg {
    Metrics,
    Traj,
    Pairs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Scenario { n, seed } => print_scenario(n, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidSpec { .. } => 2,
                Error::Scenario(_) => 3,
                _ => 1,
            })
        }
    }
}

fn print_scenario(n: usize, seed: u64) -> Result<(), Error> {
    let scenario = random_scenario(n, seed)?;
    println!("{}", serde_json::to_string_pretty(&scenario)?);
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Error> {
    let (file, mut sim, mut nominal) = match &args.scenario {
        Some(path) => {
            let f = load_scenario(path)?;
            let (sim, nominal) = (f.sim, f.nominal);
            (Some(f), sim, nominal)
        }
        None => (None, SimConfig::default(), NominalConfig::default()),
    };
    if let Some(seed) = args.seed {
        sim.seed = seed;
    }
    if let Some(m) = args.method {
        sim.method = match m {
            MethodArg::Cahcbf => Method::CaHcbf,
            MethodArg::Apf => Method::ApfTracking,
            MethodArg::Hocbf => Method::ApfHocbf,
        };
    }
    if let Some(a) = args.alloc {
        sim.alloc.strategy = match a {
            AllocArg::Equal => AllocStrategy::Equal,
            AllocArg::Cap => AllocStrategy::CapabilityOnly,
            AllocArg::Full => AllocStrategy::Full,
        };
    }
    if let Some(w) = args.w {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Config(format!("w = {w} must lie in [0, 1]")));
        }
        nominal.w = w;
    }
    if let Some(steps) = args.steps {
        sim.max_steps = steps;
    }
    if args.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    sim.validate()?;
    let log = match args.log_level {
        LogArg::Metrics => LogLevel::Metrics,
        LogArg::Traj => LogLevel::Trajectory,
        LogArg::Pairs => LogLevel::Pairs,
    };

    let (n, outputs) = match (&file, args.random) {
        (Some(f), _) => {
            let scenario = f.scenario();
            (scenario.agents.len(), vec![run_trial(0, &scenario, sim, nominal, log)?])
        }
        (None, Some(n)) => (n, run_random_trials(n, args.trials, sim, nominal, log)?),
        (None, None) => unreachable!("clap requires one of --scenario / --random"),
    };
    write_outputs(&args.out, &sim, &nominal, n, &outputs)?;

    let report = SuiteReport::new(&sim, &nominal, n, Vec::new());
    let agg = hcbf_core::harness::Aggregate::of(
        &outputs.iter().map(|o| o.metrics.clone()).collect::<Vec<_>>(),
    );
    let wall: f64 = outputs.iter().map(|o| o.metrics.wall_time.as_secs_f64()).sum();
    println!(
        "method={} alloc={:?} n={} trials={} AR={:.1}% viol={:.2} meanV={:.4} infeasible={:.1} wall={:.2}s",
        report.method.label(),
        report.strategy,
        n,
        outputs.len(),
        100.0 * agg.arrival_rate.mean,
        agg.violations.mean,
        agg.mean_violation_depth.mean,
        agg.qp_infeasible_events.mean,
        wall,
    );
    Ok(())
}

fn write_outputs(
    dir: &Path,
    sim: &SimConfig,
    nominal: &NominalConfig,
    n: usize,
    outputs: &[TrialOutput],
) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let report = SuiteReport::new(
        sim,
        nominal,
        n,
        outputs.iter().map(|o| o.metrics.clone()).collect(),
    );
    fs::write(dir.join("metrics.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    let csv = |name: &str, header: &str, pick: fn(&TrialOutput) -> Option<&String>| {
        if outputs.iter().all(|o| pick(o).is_none()) {
            return Ok::<(), Error>(());
        }
        let mut text = String::from(header);
        text.push('\n');
        for o in outputs {
            text.push_str(pick(o).map(String::as_str).unwrap_or(""));
        }
        fs::write(dir.join(name), text)?;
        Ok(())
    };
    csv("trajectory.csv", TRAJECTORY_HEADER, |o| o.trajectory.as_ref())?;
    csv("pairs.csv", PAIRS_HEADER, |o| o.pairs.as_ref())?;
    Ok(())
}
