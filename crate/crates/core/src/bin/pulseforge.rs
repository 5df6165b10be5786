//! `pulseforge` command line. Precedence: built-in defaults, then the
//! `--config` file, then flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pulseforge::dynamics::Model;
use pulseforge::experiments::{self as ex, ExperimentConfig, Outcome, WeylBuilder};
use pulseforge::problems::EstimatorMode;
use pulseforge::Result;

#[derive(Parser)]
#[command(name = "pulseforge", version, about = "Native-pulse variational algorithms on a simulated transmon device")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run a single seed instead of the configured list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Device description (JSON).
    #[arg(long, global = true)]
    device: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads for independent runs (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// `full` or `effective`.
    #[arg(long, global = true)]
    model: Option<Model>,
    /// Estimate from this many shots per measurement setting.
    #[arg(long, global = true, conflicts_with = "exact")]
    shots: Option<u64>,
    /// Exact expectation values.
    #[arg(long, global = true)]
    exact: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Progressive pulse VQE (or a gate baseline) on a molecule.
    Vqe {
        /// Molecule file.
        task: Option<PathBuf>,
    },
    /// Pulse ansatz against the Ry/CZ gate ansatz on a graph.
    Maxcut { graph: Option<PathBuf> },
    /// Energy against one pulse detuning.
    ScanDetuning {
        task: Option<PathBuf>,
        #[arg(long)]
        points: Option<usize>,
        /// Half-width of the sweep, Hz.
        #[arg(long)]
        range_hz: Option<f64>,
        #[arg(long)]
        parameter: Option<String>,
        /// Sweep the untrained zero ansatz.
        #[arg(long)]
        untrained: bool,
    },
    /// Detuned CX·H·H·CX identity check.
    Verify {
        #[arg(long)]
        points: Option<usize>,
    },
    /// VQE over a set of geometry files.
    Dissociation { geometries: Vec<PathBuf> },
    /// Weyl-chamber coverage of a CR builder.
    Weyl {
        /// `single-cr` or `multi-cr`.
        #[arg(long)]
        builder: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Fit effective CR rates from simulated trajectories.
    Tomography {
        #[arg(long)]
        amp: Option<f64>,
    },
    /// Lower gates such as "cx 0 1" to pulses.
    Lower { gates: Vec<String> },
    /// Tabulate run summaries.
    Report { summaries: Vec<PathBuf> },
}

fn configure(cli: &Cli) -> Result<ExperimentConfig> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seeds = vec![s];
    }
    if let Some(d) = &c.device {
        cfg.device = Some(d.clone());
    }
    if let Some(o) = &c.output_dir {
        cfg.output_dir = o.clone();
    }
    if let Some(j) = c.jobs {
        cfg.jobs = j;
    }
    if let Some(m) = c.model {
        cfg.model = m;
    }
    if let Some(n) = c.shots {
        cfg.estimator.mode = EstimatorMode::Shots;
        cfg.estimator.shots = n;
        cfg.tomography.shots = Some(n);
    }
    if c.exact {
        cfg.estimator.mode = EstimatorMode::Exact;
        cfg.tomography.shots = None;
    }
    match &cli.command {
        Command::Vqe { task } | Command::Maxcut { graph: task } => {
            if let Some(t) = task {
                cfg.task = Some(t.clone());
            }
        }
        Command::ScanDetuning {
            task,
            points,
            range_hz,
            parameter,
            untrained,
        } => {
            if let Some(t) = task {
                cfg.task = Some(t.clone());
            }
            cfg.scan.points = points.unwrap_or(cfg.scan.points);
            cfg.scan.range_hz = range_hz.unwrap_or(cfg.scan.range_hz);
            if parameter.is_some() {
                cfg.scan.parameter = parameter.clone();
            }
            if *untrained {
                cfg.scan.train = false;
            }
        }
        Command::Verify { points } => cfg.verify.points = points.unwrap_or(cfg.verify.points),
        Command::Dissociation { geometries } if !geometries.is_empty() => cfg.geometries = geometries.clone(),
        Command::Weyl { builder, samples } => {
            if let Some(b) = builder {
                cfg.weyl.builder = match b.replace('_', "-").as_str() {
                    "single-cr" => WeylBuilder::SingleCr,
                    "multi-cr" => WeylBuilder::MultiCr,
                    _ => return Err(pulseforge::Error::Validation(format!("unknown builder `{b}`"))),
                };
            }
            cfg.weyl.samples = samples.unwrap_or(cfg.weyl.samples);
        }
        Command::Tomography { amp } => cfg.tomography.amp = amp.unwrap_or(cfg.tomography.amp),
        Command::Lower { gates } if !gates.is_empty() => cfg.gates = gates.clone(),
        Command::Report { summaries } if !summaries.is_empty() => cfg.runlogs = summaries.clone(),
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = configure(cli)?;
    match cli.command {
        Command::Vqe { .. } => ex::cmd_vqe(&cfg),
        Command::Maxcut { .. } => ex::cmd_maxcut(&cfg),
        Command::ScanDetuning { .. } => ex::cmd_scan_detuning(&cfg),
        Command::Verify { .. } => ex::cmd_verify(&cfg),
        Command::Dissociation { .. } => ex::cmd_dissociation(&cfg),
        Command::Weyl { .. } => ex::cmd_weyl(&cfg),
        Command::Tomography { .. } => ex::cmd_tomography(&cfg),
        Command::Lower { .. } => ex::cmd_lower(&cfg),
        Command::Report { .. } => ex::cmd_report(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PULSEFORGE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = run(&cli);
    match &result {
        Ok(out) => {
            for c in &out.checks {
                eprintln!("{}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for f in &out.files {
                log::info!("wrote {}", f.display());
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(ex::exit_code(&result) as u8)
}
