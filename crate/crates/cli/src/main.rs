use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use explore_cli::commands::{self, ExportRequest, Overrides};
use explore_cli::export::{ExportKind, SLICE_HEIGHT};
use explore_cli::{CliError, OUT_ENV};
use explore_core::link::LinkConfig;

#[derive(Parser)]
#[command(name = "explore", version, about = "Frontier exploration simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a builtin scenario or scenario file.
    Run {
        /// Builtin name or path to a .toml scenario.
        scenario: String,
        /// Output root; results go to <out>/<scenario name>/.
        #[arg(long, env = OUT_ENV, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        sense_hz: Option<f64>,
        #[arg(long)]
        plan_hz: Option<f64>,
        #[arg(long)]
        control_hz: Option<f64>,
        /// Sensor noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Fixed attraction rate k_e for every path.
        #[arg(long)]
        k_e: Option<f64>,
        /// Tracker step size.
        #[arg(long)]
        theta: Option<f64>,
        /// Clustering gap and scene-change tolerance, meters.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Simulated seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Keep every n-th point of the point map.
        #[arg(long, default_value_t = 1)]
        filter_n: usize,
    },
    /// Derive an artifact from a trace file.
    Export {
        trace: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, default_value_t = 1)]
        filter_n: usize,
        /// Tick for the field panel; defaults to the first tick with a path.
        #[arg(long)]
        tick: Option<u64>,
        /// Height of the planar slice in the point map.
        #[arg(long, default_value_t = SLICE_HEIGHT)]
        height: f64,
        /// Destination; defaults to a file next to the trace.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-run a trace's scenario and compare bit for bit.
    Replay {
        trace: PathBuf,
        #[arg(long, default_value_t = LinkConfig::default().loss_probability)]
        link_loss: f64,
        #[arg(long, default_value_t = LinkConfig::default().latency)]
        link_latency: f64,
        #[arg(long, default_value_t = LinkConfig::default().seed)]
        link_seed: u64,
    },
    /// List builtin scenarios.
    ListScenarios,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    TrajectoryTable,
    PointMap,
    FieldSvg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run {
            scenario,
            out,
            sense_hz,
            plan_hz,
            control_hz,
            seed,
            k_e,
            theta,
            epsilon,
            duration,
            filter_n,
        } => {
            let o = Overrides {
                sense_hz,
                plan_hz,
                control_hz,
                seed,
                attraction_rate: k_e,
                step_size: theta,
                epsilon,
                duration,
            };
            let r = commands::cmd_run(&scenario, &o, &out, filter_n)?;
            let rep = &r.report;
            println!(
                "{}: {} (expected {}), coverage {:.3}, distance {:.1} m, {:.1} s simulated, {} paths",
                rep.scenario,
                rep.outcome.as_deref().unwrap_or("none"),
                rep.expected.as_deref().unwrap_or("complete"),
                rep.coverage,
                rep.distance,
                rep.sim_time,
                rep.paths
            );
            println!("wrote {}", r.dir.display());
            Ok(r.exit_code)
        }
        Command::Export { trace, what, filter_n, tick, height, output } => {
            let kind = match what {
                What::TrajectoryTable => ExportKind::Trajectory,
                What::PointMap => ExportKind::PointMap,
                What::FieldSvg => ExportKind::FieldSvg,
            };
            let req = ExportRequest { kind, filter_n, tick, height };
            let dest = commands::cmd_export(&trace, &req, output.as_deref())?;
            println!("wrote {}", dest.display());
            Ok(0)
        }
        Command::Replay { trace, link_loss, link_latency, link_seed } => {
            let link = LinkConfig { loss_probability: link_loss, latency: link_latency, seed: link_seed, ..LinkConfig::default() };
            let r = commands::cmd_replay(&trace, link)?;
            match r.first_divergence {
                None => println!("match: {} ticks", r.ticks),
                Some(k) => println!("mismatch at tick {k}"),
            }
            Ok(r.exit_code())
        }
        Command::ListScenarios => {
            for (name, text) in commands::list_scenarios() {
                println!("{name:<18} {text}");
            }
            Ok(0)
        }
    }
}
