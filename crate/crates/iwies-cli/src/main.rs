//! Command-line interface: `train`, `incremental`, `experiment`, `timing`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use iwies::engine::{run_incremental, Method};
use iwies::error::{Error, Result};
use iwies::Real;

use iwies_cli::config::{CliOverrides, HarnessConfig};
use iwies_cli::experiment::{
    run_experiment, write_artifacts, write_partial_marker, ExperimentConfig,
};
use iwies_cli::report::{render_csv, CsvRow};
use iwies_cli::timing::timing_sweep;

#[derive(Parser)]
#[command(
    name = "iwies",
    about = "Instance-weighted incremental evolution strategies for policy search \
             in changing environments",
    version
)]
struct Cli {
    /// Configuration file (flat `key = value` lines with dotted keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread count (overrides the config file).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Navigation task family.
    #[arg(long, global = true, value_parser = ["case1", "case2", "puddle"])]
    task: Option<String>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Generations per phase (overrides the per-task default).
    #[arg(long, global = true)]
    generations: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a single phase from scratch and write a checkpoint.
    Train,
    /// Run a multi-phase changing environment with one adaptation method.
    Incremental {
        /// Adaptation method.
        #[arg(long, value_parser = ["fs", "ca", "iwies-n", "iwies-qu", "iwies-mix"])]
        method: String,
        /// Number of phases (overrides the config file).
        #[arg(long)]
        phases: Option<usize>,
    },
    /// Run the full statistical protocol over all configured methods.
    Experiment,
    /// Time the identical seeded workload at several worker counts.
    Timing {
        /// Comma-separated worker counts to sweep.
        #[arg(long, default_value = "1,2,4")]
        worker_counts: String,
    },
}

fn load_config(cli: &Cli) -> Result<HarnessConfig> {
    let mut config = match &cli.config {
        Some(path) => HarnessConfig::from_file(path)?,
        None => HarnessConfig::default(),
    };
    config.apply_overrides(&CliOverrides {
        task: cli.task.clone(),
        seed: cli.seed,
        workers: cli.workers,
        out: cli.out.clone(),
        generations: cli.generations,
    })?;
    Ok(config)
}

fn cmd_train(config: &HarnessConfig) -> Result<()> {
    let experiment = ExperimentConfig::from_harness(config)?;
    let task = experiment.task_for(0, 0)?;
    let objective = iwies::objective::NavigationObjective::new(&experiment.arch, &task);
    let cfg = iwies::engine::EsConfig {
        master_seed: iwies::engine::phase_seed(experiment.es_seed_for(0, 0), 0),
        ..experiment.es.clone()
    };
    let result = iwies::engine::train_from_scratch(&objective, &cfg, experiment.workers)?;

    std::fs::create_dir_all(&experiment.output_dir)?;
    let rows: Vec<CsvRow> = result
        .reports
        .iter()
        .map(|r| CsvRow::from_report(0, Method::Fs, 0, r))
        .collect();
    std::fs::write(
        experiment.output_dir.join("results.csv"),
        render_csv(&rows),
    )?;
    std::fs::write(
        experiment.output_dir.join("tasks.log"),
        format!("run=0 {task}\n"),
    )?;
    iwies::checkpoint::save_checkpoint(
        experiment.output_dir.join("theta.txt"),
        &experiment.arch,
        &result.theta_star,
    )?;
    println!(
        "trained {} generations; final return {:.4}; average return {:.4}",
        cfg.generations,
        result
            .reports
            .last()
            .map(|r| r.unperturbed_return)
            .unwrap_or(Real::NAN),
        result.average_return
    );
    println!("wrote {}", experiment.output_dir.display());
    Ok(())
}

fn cmd_incremental(config: &HarnessConfig, method: &str, phases: Option<usize>) -> Result<()> {
    let method: Method = method.parse()?;
    let mut config = config.clone();
    if let Some(p) = phases {
        config.phases = p;
    }
    let experiment = ExperimentConfig::from_harness(&config)?;
    let tasks: Vec<_> = (0..experiment.phases)
        .map(|phase| experiment.task_for(0, phase))
        .collect::<Result<_>>()?;
    let es = iwies::engine::EsConfig {
        master_seed: experiment.es_seed_for(0, 0),
        ..experiment.es.clone()
    };
    let results = run_incremental(&experiment.arch, &tasks, &es, method, experiment.workers)?;

    std::fs::create_dir_all(&experiment.output_dir)?;
    let mut rows = Vec::new();
    for (phase, result) in results.iter().enumerate() {
        for report in &result.reports {
            rows.push(CsvRow::from_report(0, method, phase, report));
        }
    }
    std::fs::write(
        experiment.output_dir.join("results.csv"),
        render_csv(&rows),
    )?;
    let task_log: Vec<String> = tasks.iter().map(|t| format!("run=0 {t}")).collect();
    std::fs::write(
        experiment.output_dir.join("tasks.log"),
        task_log.join("\n") + "\n",
    )?;
    iwies::checkpoint::save_checkpoint(
        experiment.output_dir.join("theta.txt"),
        &experiment.arch,
        &results.last().expect("at least one phase").theta_star,
    )?;
    for (phase, result) in results.iter().enumerate() {
        println!(
            "phase {phase}: average return {:.4}",
            result.average_return
        );
    }
    println!("wrote {}", experiment.output_dir.display());
    Ok(())
}

fn cmd_experiment(config: &HarnessConfig) -> Result<()> {
    let experiment = ExperimentConfig::from_harness(config)?;
    match run_experiment(&experiment) {
        Ok(outcome) => {
            write_artifacts(&experiment, &outcome)?;
            print!("{}", outcome.summary.render_table());
            println!("wrote {}", experiment.output_dir.display());
            Ok(())
        }
        Err(error) => {
            write_partial_marker(&experiment, &error);
            Err(error)
        }
    }
}

fn cmd_timing(config: &HarnessConfig, worker_counts: &str) -> Result<()> {
    let counts: Vec<usize> = worker_counts
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad worker count `{w}`")))
        })
        .collect::<Result<_>>()?;
    let experiment = ExperimentConfig::from_harness(config)?;
    let report = timing_sweep(&experiment, &counts)?;
    let table = report.render_table(&counts);
    print!("{table}");
    std::fs::create_dir_all(&experiment.output_dir)?;
    std::fs::write(experiment.output_dir.join("timing.txt"), table)?;
    println!("wrote {}", experiment.output_dir.display());
    Ok(())
}

/// Exit-code categories: 2 config/parse, 3 I/O, 4 protocol/determinism,
/// 5 shape or numeric input, 6 sampling.
fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Parse { .. } | Error::InvalidArgument(_) => 2,
        Error::Io(_) => 3,
        Error::Protocol(_) => 4,
        Error::ShapeMismatch { .. } | Error::NonFinite(_) | Error::BehaviorMismatch(_) => 5,
        Error::SamplingExhausted { .. } => 6,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|config| match &cli.command {
        Command::Train => cmd_train(&config),
        Command::Incremental { method, phases } => cmd_incremental(&config, method, *phases),
        Command::Experiment => cmd_experiment(&config),
        Command::Timing { worker_counts } => cmd_timing(&config, worker_counts),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}
