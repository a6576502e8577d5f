//! Command implementations: wire files to the core pipeline.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use hooptrack_core::calibrate::{recommend, sweep_grid, write_contour, CalibrateError, GridSpec};
use hooptrack_core::court::{CourtError, CourtSpec};
use hooptrack_core::filter::{
    reduce_to_active, ActivePlay, FilterError, FilterParams, FilterReport,
};
use hooptrack_core::ingest::{load_game, read_wide, write_wide, GameTimeline, IngestError};
use hooptrack_core::segment::{
    assign_actions, infer_halftime_ms, label_phases, summarize_actions, write_action_table,
    write_frame_table, Phase, SegmentError, SideConfig,
};
use hooptrack_core::stats::{
    compare_with_reference, compute_frame_metrics, duration_stats, read_reference_list,
    summarize_by_phase, write_histograms, StatsBins, StatsError,
};
use hooptrack_core::synth::{generate, SynthError, SynthPlan};

use crate::{CourtArgs, InputArgs, ThresholdArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad input from the user: exit code 2.
    User(String),
    /// A pipeline contract was violated: exit code 1.
    Internal(String),
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<CourtError> for CliError {
    fn from(e: CourtError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<CalibrateError> for CliError {
    fn from(e: CalibrateError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Io(e) => CliError::User(e.to_string()),
            other => CliError::User(other.to_string()),
        }
    }
}

impl From<FilterError> for CliError {
    fn from(e: FilterError) -> Self {
        match e {
            FilterError::InvalidParams(_) => CliError::User(e.to_string()),
            FilterError::NotFiveOnCourt { .. } => CliError::Internal(format!("filter stage: {e}")),
        }
    }
}

impl From<SegmentError> for CliError {
    fn from(e: SegmentError) -> Self {
        CliError::Internal(format!("segment stage: {e}"))
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::User(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    Ok(BufWriter::new(
        fs::File::create(path).map_err(|e| io_err(path, e))?,
    ))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| CliError::Internal(format!("serializing {}: {e}", path.display())))?;
    out.write_all(b"\n").map_err(|e| io_err(path, e))?;
    Ok(())
}

fn load_court(args: &CourtArgs) -> Result<CourtSpec, CliError> {
    let mut court = match &args.court_config {
        Some(path) => CourtSpec::from_json_str(&read_text(path)?)?,
        None => CourtSpec::default(),
    };
    if let Some(band) = args.band_m {
        court.transition_half_width = band;
        court.validate()?;
    }
    Ok(court)
}

fn load_timeline(input: &InputArgs) -> Result<GameTimeline, CliError> {
    match (&input.manifest, &input.wide) {
        (Some(manifest), None) => Ok(load_game(manifest)?),
        (None, Some(wide)) => {
            let file = fs::File::open(wide).map_err(|e| io_err(wide, e))?;
            Ok(read_wide(BufReader::new(file))?)
        }
        _ => Err(CliError::User(
            "exactly one of --manifest or --wide is required".into(),
        )),
    }
}

fn build_params(thresholds: &ThresholdArgs) -> Result<FilterParams, CliError> {
    let params = FilterParams {
        ft_dwell_s: thresholds.h1_s,
        slow_speed_kmh: thresholds.h2_kmh,
        slow_run_s: thresholds.h3_s,
        ..FilterParams::default()
    };
    params.validate()?;
    for warning in params.feasibility_warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(params)
}

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| io_err(out, e))
}

fn parse_range(text: &str, flag: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::User(format!(
            "{flag} must look like min:max:step, got '{text}'"
        )));
    }
    let mut vals = [0.0f64; 3];
    for (v, part) in vals.iter_mut().zip(&parts) {
        *v = part
            .trim()
            .parse()
            .map_err(|_| CliError::User(format!("{flag}: '{part}' is not a number")))?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn parse_window(text: &str, flag: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::User(format!(
            "{flag} must look like min:max, got '{text}'"
        )));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::User(format!("{flag}: '{}' is not a number", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::User(format!("{flag}: '{}' is not a number", parts[1])))?;
    if hi < lo {
        return Err(CliError::User(format!("{flag}: window is empty")));
    }
    Ok((lo, hi))
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct IngestReport {
    team: String,
    date: String,
    players: usize,
    roster: Vec<String>,
    frames: usize,
    first_ms: Option<u64>,
    last_ms: Option<u64>,
}

pub fn ingest(manifest: &Path, out: &Path) -> Result<(), CliError> {
    let timeline = load_game(manifest)?;
    ensure_out_dir(out)?;

    let wide_path = out.join("wide.csv");
    let mut wide = create(&wide_path)?;
    write_wide(&timeline, &mut wide).map_err(CliError::from)?;
    wide.flush().map_err(|e| io_err(&wide_path, e))?;

    let report = IngestReport {
        team: timeline.metadata.team.clone(),
        date: timeline.metadata.date.clone(),
        players: timeline.roster.len(),
        roster: timeline.roster.clone(),
        frames: timeline.len(),
        first_ms: timeline.frames.first().map(|f| f.ms),
        last_ms: timeline.frames.last().map(|f| f.ms),
    };
    write_json(&out.join("ingest_report.json"), &report)?;
    println!(
        "ingest: {} players, {} frames -> {}",
        report.players,
        report.frames,
        wide_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FilterRunReport {
    params: FilterParams,
    warnings: Vec<String>,
    halftime_ms: Option<u64>,
    halftime_inferred: bool,
    reduction: FilterReport,
    actions: usize,
    in_window_share: f64,
    duration_window_s: (f64, f64),
    notes: Vec<String>,
}

pub fn filter(
    input: &InputArgs,
    court_args: &CourtArgs,
    thresholds: &ThresholdArgs,
    halftime_ms: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    let court = load_court(court_args)?;
    let params = build_params(thresholds)?;
    let timeline = load_timeline(input)?;
    ensure_out_dir(out)?;

    let (reduced, report) = reduce_to_active(&timeline, &court, &params);
    let inferred = halftime_ms.is_none();
    let sides = SideConfig {
        halftime_ms,
        attack_positive_x_first_half: court.attack_positive_x_first_half,
    };
    let resolved_halftime = halftime_ms.or_else(|| infer_halftime_ms(&reduced));
    let labels = label_phases(&reduced, &court, &sides);
    let segments = assign_actions(&reduced, &labels, &court)?;
    let summary = summarize_actions(
        &segments,
        hooptrack_core::segment::DEFAULT_DURATION_WINDOW_S,
    );

    let reduced_path = out.join("reduced.csv");
    let mut w = create(&reduced_path)?;
    write_wide(&reduced.timeline, &mut w).map_err(CliError::from)?;
    w.flush().map_err(|e| io_err(&reduced_path, e))?;

    let frames_path = out.join("frames.csv");
    let mut w = create(&frames_path)?;
    write_frame_table(&reduced, &labels, &segments, &mut w).map_err(|e| io_err(&frames_path, e))?;
    w.flush().map_err(|e| io_err(&frames_path, e))?;

    let actions_path = out.join("actions.csv");
    let mut w = create(&actions_path)?;
    write_action_table(&segments, &mut w).map_err(|e| io_err(&actions_path, e))?;
    w.flush().map_err(|e| io_err(&actions_path, e))?;

    let run_report = FilterRunReport {
        params,
        warnings: params.feasibility_warnings(),
        halftime_ms: resolved_halftime,
        halftime_inferred: inferred,
        reduction: report,
        actions: segments.len(),
        in_window_share: summary.in_window_share,
        duration_window_s: summary.window_s,
        notes: vec![
            "per-action dominant_phase extends the per-row labelling: it is the \
             offense/defense reading of the action's committed side"
                .into(),
        ],
    };
    write_json(&out.join("filter_report.json"), &run_report)?;
    println!(
        "filter: {} of {} rows retained, {:.2} active minutes, {} actions",
        report.rows_out, report.rows_in, report.active_minutes, run_report.actions
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CalibrationReport {
    grid_h2_kmh: Vec<f64>,
    grid_h3_s: Vec<f64>,
    target_minutes: f64,
    recommended_h2_kmh: f64,
    recommended_h3_s: f64,
    achieved_minutes: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn calibrate(
    input: &InputArgs,
    court_args: &CourtArgs,
    h1_s: f64,
    grid_h2: &str,
    grid_h3: &str,
    target_minutes: f64,
    out: &Path,
) -> Result<(), CliError> {
    let court = load_court(court_args)?;
    let base = FilterParams {
        ft_dwell_s: h1_s,
        ..FilterParams::default()
    };
    base.validate()?;
    let speed = parse_range(grid_h2, "--grid-h2")?;
    let run = parse_range(grid_h3, "--grid-h3")?;
    let grid = GridSpec::from_ranges(speed, run)?;
    let timeline = load_timeline(input)?;
    ensure_out_dir(out)?;

    let swept = sweep_grid(&timeline, &court, &base, &grid)?;
    let rec = recommend(&swept, target_minutes)?;

    let contour_path = out.join("contour.csv");
    let mut w = create(&contour_path)?;
    write_contour(&swept, &mut w).map_err(|e| io_err(&contour_path, e))?;
    w.flush().map_err(|e| io_err(&contour_path, e))?;

    let report = CalibrationReport {
        grid_h2_kmh: swept.speed_kmh.clone(),
        grid_h3_s: swept.run_s.clone(),
        target_minutes,
        recommended_h2_kmh: rec.speed_kmh,
        recommended_h3_s: rec.run_s,
        achieved_minutes: rec.active_minutes,
    };
    write_json(&out.join("calibration.json"), &report)?;
    println!(
        "calibrate: recommend h2 = {} km/h, h3 = {} s ({:.2} minutes vs target {})",
        rec.speed_kmh, rec.run_s, rec.active_minutes, target_minutes
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct StatsReport {
    frames: usize,
    phases: hooptrack_core::stats::PhaseSummaries,
    durations: hooptrack_core::stats::DurationStats,
    action_count: usize,
    in_window_share: f64,
    duration_window_s: (f64, f64),
    comparison: Option<hooptrack_core::stats::ComparisonReport>,
}

/// Rebuild per-frame labels and action durations from the frame table.
fn read_frame_table(path: &Path) -> Result<(Vec<Phase>, Vec<f64>), CliError> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("ms,avg_pos_x,avg_pos_y,label,act_id") => {}
        _ => {
            return Err(CliError::User(format!(
                "{}: not a frame table (unexpected header)",
                path.display()
            )))
        }
    }
    let mut labels = Vec::new();
    let mut actions: Vec<(u32, u64, u64)> = Vec::new(); // act_id, first_ms, last_ms
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::User(format!(
                "{}: bad row at line {}",
                path.display(),
                i + 2
            )));
        }
        let ms: u64 = fields[0]
            .parse()
            .map_err(|_| CliError::User(format!("{}: bad ms at line {}", path.display(), i + 2)))?;
        let label = match fields[3] {
            "O" => Phase::Offense,
            "D" => Phase::Defense,
            "Tr" => Phase::Transition,
            other => {
                return Err(CliError::User(format!(
                    "{}: unknown label '{other}' at line {}",
                    path.display(),
                    i + 2
                )))
            }
        };
        let act_id: u32 = fields[4].parse().map_err(|_| {
            CliError::User(format!("{}: bad act_id at line {}", path.display(), i + 2))
        })?;
        labels.push(label);
        match actions.last_mut() {
            Some((id, _, last)) if *id == act_id => *last = ms,
            _ => actions.push((act_id, ms, ms)),
        }
    }
    let durations = actions
        .iter()
        .map(|&(_, first, last)| (last - first) as f64 / 1000.0)
        .collect();
    Ok((labels, durations))
}

pub fn stats(
    reduced: &Path,
    frames: &Path,
    court_args: &CourtArgs,
    reference: Option<&Path>,
    duration_window_s: &str,
    duration_bin_s: f64,
    out: &Path,
) -> Result<(), CliError> {
    let court = load_court(court_args)?;
    let window = parse_window(duration_window_s, "--duration-window-s")?;
    let file = fs::File::open(reduced).map_err(|e| io_err(reduced, e))?;
    let timeline = read_wide(BufReader::new(file))?;
    let active = ActivePlay::from_reduced(timeline, &court)?;
    let (labels, durations) = read_frame_table(frames)?;
    if labels.len() != active.len() {
        return Err(CliError::User(format!(
            "frame table has {} rows but the reduced matrix has {}",
            labels.len(),
            active.len()
        )));
    }
    ensure_out_dir(out)?;

    let bins = StatsBins {
        duration_s: duration_bin_s,
        ..StatsBins::default()
    };
    let metrics = compute_frame_metrics(&active, &labels);
    let phases = summarize_by_phase(&metrics, &bins);
    let duration_summary = duration_stats(&durations, bins.duration_s);
    let in_window = durations
        .iter()
        .filter(|&&d| d >= window.0 && d <= window.1)
        .count();
    let in_window_share = if durations.is_empty() {
        0.0
    } else {
        in_window as f64 / durations.len() as f64
    };

    let comparison = match reference {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
            let reference_durations = read_reference_list(BufReader::new(file))?;
            let reference_stats = duration_stats(&reference_durations, bins.duration_s);
            Some(compare_with_reference(&duration_summary, &reference_stats)?)
        }
        None => None,
    };

    let hist_path = out.join("histograms.csv");
    let mut w = create(&hist_path)?;
    write_histograms(&phases, &duration_summary, &mut w).map_err(|e| io_err(&hist_path, e))?;
    w.flush().map_err(|e| io_err(&hist_path, e))?;

    let report = StatsReport {
        frames: active.len(),
        phases,
        durations: duration_summary,
        action_count: durations.len(),
        in_window_share,
        duration_window_s: window,
        comparison,
    };
    write_json(&out.join("stats.json"), &report)?;
    println!(
        "stats: {} frames, {} actions, {:.1}% in the {}..{} s window",
        report.frames,
        report.action_count,
        report.in_window_share * 100.0,
        window.0,
        window.1
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

pub fn synth(
    plan_path: Option<&Path>,
    preset: Option<&str>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    let mut plan = match (plan_path, preset) {
        (Some(path), None) => SynthPlan::from_json_str(&read_text(path)?)?,
        (None, Some(name)) => match name {
            "regulation" => SynthPlan::regulation_game(seed.unwrap_or(1)),
            "demo" => SynthPlan::two_minute_demo(seed.unwrap_or(1)),
            "spacing" => SynthPlan::spacing_probe(seed.unwrap_or(1)),
            other => {
                return Err(CliError::User(format!(
                    "unknown preset '{other}' (expected regulation, demo or spacing)"
                )))
            }
        },
        _ => {
            return Err(CliError::User(
                "exactly one of --plan or --preset is required".into(),
            ))
        }
    };
    if let Some(seed) = seed {
        plan.seed = seed;
    }
    let court = CourtSpec::default();
    let game = generate(&plan, &court)?;
    ensure_out_dir(out)?;
    game.write_to_dir(out)?;
    write_json(&out.join("plan.json"), &plan)?;
    println!(
        "synth: {} players, {} actions, session of {:.1} minutes -> {}",
        plan.roster_size,
        game.truth.n_actions,
        game.truth.session_end_ms as f64 / 60_000.0,
        out.display()
    );
    Ok(())
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::User(e.to_string())
    }
}
