//! Command-line front end for the tracking-data pipeline.
//!
//! Exit codes: 0 on success, 2 for user-input problems (missing files, bad
//! flags, malformed data), 1 for internal contract violations.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "hooptrack",
    version,
    about = "Reduce basketball tracking data to active play, segment and label actions, \
             calibrate thresholds, and report spacing/velocity statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Manifest mapping record files to players (JSON).
    #[arg(long, conflicts_with = "wide")]
    manifest: Option<PathBuf>,
    /// Wide-matrix file produced by `ingest` (CSV).
    #[arg(long)]
    wide: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CourtArgs {
    /// Court geometry configuration (JSON); defaults describe a FIBA court.
    #[arg(long)]
    court_config: Option<PathBuf>,
    /// Transition band half-width in meters (overrides the config file).
    #[arg(long)]
    band_m: Option<f64>,
}

#[derive(Args, Clone)]
struct ThresholdArgs {
    /// Free-throw dwell threshold, seconds.
    #[arg(long, default_value_t = 10.0)]
    h1_s: f64,
    /// All-five speed threshold, km/h.
    #[arg(long, default_value_t = 9.0)]
    h2_kmh: f64,
    /// Slow-run duration threshold, seconds.
    #[arg(long, default_value_t = 2.5)]
    h3_s: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse per-player record files and write the wide matrix.
    Ingest {
        /// Manifest mapping record files to players (JSON).
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce a game to active play and segment it into labeled actions.
    Filter {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        court: CourtArgs,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// Half-time instant in ms; inferred from the longest stoppage when
        /// absent.
        #[arg(long)]
        halftime_ms: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the (h2, h3) grid and recommend thresholds for a target of
    /// active minutes.
    Calibrate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        court: CourtArgs,
        /// Free-throw dwell threshold, seconds.
        #[arg(long, default_value_t = 10.0)]
        h1_s: f64,
        /// Speed axis as min:max:step, km/h.
        #[arg(long, default_value = "8:11:0.2")]
        grid_h2: String,
        /// Run-duration axis as min:max:step, seconds.
        #[arg(long, default_value = "1:4:0.25")]
        grid_h3: String,
        /// Active-minutes target (regulation play).
        #[arg(long, default_value_t = 40.0)]
        target_minutes: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize spacing, hull and velocity distributions plus action
    /// durations from a filtered game.
    Stats {
        /// Reduced wide matrix written by `filter`.
        #[arg(long)]
        reduced: PathBuf,
        /// Per-frame label/action table written by `filter`.
        #[arg(long)]
        frames: PathBuf,
        #[command(flatten)]
        court: CourtArgs,
        /// External reference list of action durations (one per line) for a
        /// side-by-side comparison.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Plausibility window for action durations, min:max seconds.
        #[arg(long, default_value = "4:38")]
        duration_window_s: String,
        /// Histogram bin width for durations, seconds.
        #[arg(long, default_value_t = 2.0)]
        duration_bin_s: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic game with ground truth.
    Synth {
        /// Plan file (JSON).
        #[arg(long, conflicts_with = "preset")]
        plan: Option<PathBuf>,
        /// Built-in plan: regulation, demo or spacing.
        #[arg(long)]
        preset: Option<String>,
        /// Override the plan's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest { manifest, out } => commands::ingest(&manifest, &out),
        Command::Filter {
            input,
            court,
            thresholds,
            halftime_ms,
            out,
        } => commands::filter(&input, &court, &thresholds, halftime_ms, &out),
        Command::Calibrate {
            input,
            court,
            h1_s,
            grid_h2,
            grid_h3,
            target_minutes,
            out,
        } => commands::calibrate(
            &input,
            &court,
            h1_s,
            &grid_h2,
            &grid_h3,
            target_minutes,
            &out,
        ),
        Command::Stats {
            reduced,
            frames,
            court,
            reference,
            duration_window_s,
            duration_bin_s,
            out,
        } => commands::stats(
            &reduced,
            &frames,
            &court,
            reference.as_deref(),
            &duration_window_s,
            duration_bin_s,
            &out,
        ),
        Command::Synth {
            plan,
            preset,
            seed,
            out,
        } => commands::synth(plan.as_deref(), preset.as_deref(), seed, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
