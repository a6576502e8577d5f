//! Reduction of a timeline to active play.
//!
//! Three passes run in a fixed order on the progressively reduced matrix:
//!
//! 1. lineup — keep only frames with exactly five players on the court;
//! 2. free throws — drop runs where someone camps in a free-throw circle
//!    for at least the dwell threshold;
//! 3. slow runs — drop runs where all five on-court players stay below the
//!    speed threshold for at least the run-duration threshold.
//!
//! Run durations are wall-clock spans over consecutive retained frames; a
//! run breaks whenever the gap between retained frames exceeds
//! `run_gap_break_ms`, so intervals removed by an earlier pass are never
//! counted as dwell time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::court::{kmh, speed, CourtSpec};
use crate::ingest::{GameFrame, GameTimeline};

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("invalid filter params: {0}")]
    InvalidParams(String),
    #[error("frame at ms {ms} has {got} on-court players, expected 5")]
    NotFiveOnCourt { ms: u64, got: usize },
}

/// Thresholds governing the free-throw and slow-run passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    /// Free-throw dwell threshold in seconds (the h1 parameter).
    pub ft_dwell_s: f64,
    /// Speed threshold in km/h (the h2 parameter): a frame is slow when all
    /// five on-court players move strictly below it.
    pub slow_speed_kmh: f64,
    /// Slow-run duration threshold in seconds (the h3 parameter).
    pub slow_run_s: f64,
    /// Gap between consecutive retained frames that breaks a run.
    pub run_gap_break_ms: u64,
    /// Cap applied to each inter-frame gap when summing active minutes.
    pub active_gap_cap_ms: u64,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            ft_dwell_s: 10.0,
            slow_speed_kmh: 9.0,
            slow_run_s: 2.5,
            run_gap_break_ms: 1000,
            active_gap_cap_ms: 1000,
        }
    }
}

impl FilterParams {
    pub fn with_thresholds(slow_speed_kmh: f64, slow_run_s: f64) -> Self {
        FilterParams {
            slow_speed_kmh,
            slow_run_s,
            ..FilterParams::default()
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        let positive = [
            ("ft_dwell_s", self.ft_dwell_s),
            ("slow_speed_kmh", self.slow_speed_kmh),
            ("slow_run_s", self.slow_run_s),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(FilterError::InvalidParams(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.run_gap_break_ms == 0 || self.active_gap_cap_ms == 0 {
            return Err(FilterError::InvalidParams(
                "gap parameters must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Thresholds outside the plausible ranges still run, but deserve a
    /// warning: a walking player stays under 8 km/h, and sub-second slow
    /// runs occur inside live play.
    pub fn feasibility_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if self.slow_speed_kmh <= 8.0 {
            warnings.push(format!(
                "speed threshold {} km/h is at or below walking pace (8 km/h); \
                 slow stoppages may survive the filter",
                self.slow_speed_kmh
            ));
        }
        if self.slow_run_s <= 1.0 {
            warnings.push(format!(
                "slow-run threshold {} s is at or below 1 s; live play contains \
                 sub-second lulls and may be dropped",
                self.slow_run_s
            ));
        }
        warnings
    }
}

/// Row bookkeeping for one reduction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    pub rows_in: usize,
    pub rows_removed_lineup: usize,
    pub rows_removed_free_throw: usize,
    pub rows_removed_slow: usize,
    pub rows_out: usize,
    /// Gap-capped wall-clock estimate of retained play, in minutes.
    pub active_minutes: f64,
}

/// A reduced timeline where every frame is known to have exactly five
/// on-court players, paired with their roster indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivePlay {
    pub timeline: GameTimeline,
    /// Roster indices of the five on-court players, per frame, ascending.
    pub on_court: Vec<[usize; 5]>,
}

impl ActivePlay {
    pub fn len(&self) -> usize {
        self.timeline.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timeline.frames.is_empty()
    }

    /// Rebuild the pairing from an already-reduced timeline (for example one
    /// read back from a wide export). Fails on any frame that does not have
    /// exactly five on-court players, which signals a contract violation
    /// upstream.
    pub fn from_reduced(timeline: GameTimeline, court: &CourtSpec) -> Result<Self, FilterError> {
        let mut on_court = Vec::with_capacity(timeline.frames.len());
        for frame in &timeline.frames {
            match on_court_set(frame, court) {
                Some(ids) => on_court.push(ids),
                None => {
                    let got = count_on_court(frame, court);
                    return Err(FilterError::NotFiveOnCourt { ms: frame.ms, got });
                }
            }
        }
        Ok(ActivePlay { timeline, on_court })
    }

    /// Positions of the five on-court players in a frame.
    pub fn court_positions(&self, idx: usize) -> [[f64; 2]; 5] {
        let frame = &self.timeline.frames[idx];
        self.on_court[idx].map(|p| frame.players[p].pos)
    }

    /// km/h speeds of the five on-court players in a frame.
    pub fn court_speeds_kmh(&self, idx: usize) -> [f64; 5] {
        let frame = &self.timeline.frames[idx];
        self.on_court[idx].map(|p| kmh(speed(frame.players[p].vel)))
    }
}

fn count_on_court(frame: &GameFrame, court: &CourtSpec) -> usize {
    frame
        .players
        .iter()
        .filter(|p| p.observed && court.on_court(p.pos))
        .count()
}

fn on_court_set(frame: &GameFrame, court: &CourtSpec) -> Option<[usize; 5]> {
    let mut ids = [0usize; 5];
    let mut n = 0;
    for (i, p) in frame.players.iter().enumerate() {
        if p.observed && court.on_court(p.pos) {
            if n == 5 {
                return None;
            }
            ids[n] = i;
            n += 1;
        }
    }
    (n == 5).then_some(ids)
}

/// Mark frames for removal: maximal runs of flagged frames, broken on gaps
/// larger than `gap_break_ms`, whose wall-clock span meets `min_span_ms`
/// (inclusive).
fn qualifying_run_mask(
    ms: &[u64],
    flagged: &[bool],
    gap_break_ms: u64,
    min_span_ms: f64,
) -> Vec<bool> {
    debug_assert_eq!(ms.len(), flagged.len());
    let mut remove = vec![false; ms.len()];
    let mut i = 0;
    while i < ms.len() {
        if !flagged[i] {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i;
        while end + 1 < ms.len() && flagged[end + 1] && ms[end + 1] - ms[end] <= gap_break_ms {
            end += 1;
        }
        if (ms[end] - ms[start]) as f64 >= min_span_ms {
            remove[start..=end].fill(true);
        }
        i = end + 1;
    }
    remove
}

/// Pass 1: retain exactly the frames with five on-court players, recording
/// who the five are. Unobserved players count as off-court.
pub fn retain_full_lineups(timeline: &GameTimeline, court: &CourtSpec) -> ActivePlay {
    let mut frames = Vec::new();
    let mut on_court = Vec::new();
    for frame in &timeline.frames {
        if let Some(ids) = on_court_set(frame, court) {
            frames.push(frame.clone());
            on_court.push(ids);
        }
    }
    ActivePlay {
        timeline: GameTimeline {
            frames,
            roster: timeline.roster.clone(),
            metadata: timeline.metadata.clone(),
        },
        on_court,
    }
}

fn ft_flags(active: &ActivePlay, court: &CourtSpec) -> Vec<bool> {
    (0..active.len())
        .map(|i| {
            active
                .court_positions(i)
                .iter()
                .any(|&p| court.in_ft_circle(p))
        })
        .collect()
}

fn slow_flags(active: &ActivePlay, slow_speed_kmh: f64) -> Vec<bool> {
    (0..active.len())
        .map(|i| {
            active
                .court_speeds_kmh(i)
                .iter()
                .all(|&s| s < slow_speed_kmh)
        })
        .collect()
}

fn frame_ms(active: &ActivePlay) -> Vec<u64> {
    active.timeline.frames.iter().map(|f| f.ms).collect()
}

fn retain_unmasked(active: &ActivePlay, remove: &[bool]) -> ActivePlay {
    let mut frames = Vec::new();
    let mut on_court = Vec::new();
    for (i, frame) in active.timeline.frames.iter().enumerate() {
        if !remove[i] {
            frames.push(frame.clone());
            on_court.push(active.on_court[i]);
        }
    }
    ActivePlay {
        timeline: GameTimeline {
            frames,
            roster: active.timeline.roster.clone(),
            metadata: active.timeline.metadata.clone(),
        },
        on_court,
    }
}

/// Pass 2: drop free-throw dwells. A frame is flagged when any on-court
/// player sits inside a free-throw circle; flagged runs spanning at least
/// `ft_dwell_s` are removed whole.
pub fn remove_free_throw_dwells(
    active: &ActivePlay,
    court: &CourtSpec,
    params: &FilterParams,
) -> ActivePlay {
    let flags = ft_flags(active, court);
    let remove = qualifying_run_mask(
        &frame_ms(active),
        &flags,
        params.run_gap_break_ms,
        params.ft_dwell_s * 1000.0,
    );
    retain_unmasked(active, &remove)
}

/// Pass 3: drop all-slow runs. A frame is flagged when every on-court player
/// moves strictly below the speed threshold; flagged runs spanning at least
/// `slow_run_s` are removed whole.
pub fn remove_slow_runs(active: &ActivePlay, params: &FilterParams) -> ActivePlay {
    let flags = slow_flags(active, params.slow_speed_kmh);
    let remove = qualifying_run_mask(
        &frame_ms(active),
        &flags,
        params.run_gap_break_ms,
        params.slow_run_s * 1000.0,
    );
    retain_unmasked(active, &remove)
}

/// Gap-capped estimate of elapsed play over a retained frame sequence, in
/// minutes: each inter-frame gap contributes at most `cap_ms`.
pub fn active_minutes<I: IntoIterator<Item = u64>>(ms: I, cap_ms: u64) -> f64 {
    let mut total: u64 = 0;
    let mut prev: Option<u64> = None;
    for t in ms {
        if let Some(p) = prev {
            total += (t - p).min(cap_ms);
        }
        prev = Some(t);
    }
    total as f64 / 60_000.0
}

/// Run the three passes in order and account for every row.
pub fn reduce_to_active(
    timeline: &GameTimeline,
    court: &CourtSpec,
    params: &FilterParams,
) -> (ActivePlay, FilterReport) {
    let rows_in = timeline.frames.len();

    let after_lineup = retain_full_lineups(timeline, court);
    let rows_removed_lineup = rows_in - after_lineup.len();

    let after_ft = remove_free_throw_dwells(&after_lineup, court, params);
    let rows_removed_free_throw = after_lineup.len() - after_ft.len();

    let reduced = remove_slow_runs(&after_ft, params);
    let rows_removed_slow = after_ft.len() - reduced.len();

    let report = FilterReport {
        rows_in,
        rows_removed_lineup,
        rows_removed_free_throw,
        rows_removed_slow,
        rows_out: reduced.len(),
        active_minutes: active_minutes(
            reduced.timeline.frames.iter().map(|f| f.ms),
            params.active_gap_cap_ms,
        ),
    };
    (reduced, report)
}

/// Retained frame timestamps plus per-frame max on-court speed, shared by
/// the calibration sweep: the lineup and free-throw passes do not depend on
/// the slow-run thresholds, so they run once.
pub(crate) fn post_free_throw_profile(
    timeline: &GameTimeline,
    court: &CourtSpec,
    params: &FilterParams,
) -> (Vec<u64>, Vec<f64>) {
    let after_lineup = retain_full_lineups(timeline, court);
    let after_ft = remove_free_throw_dwells(&after_lineup, court, params);
    let ms = frame_ms(&after_ft);
    let max_kmh = (0..after_ft.len())
        .map(|i| {
            after_ft
                .court_speeds_kmh(i)
                .iter()
                .fold(0.0f64, |a, &b| a.max(b))
        })
        .collect();
    (ms, max_kmh)
}

/// Slow-run removal on a precomputed (ms, max-speed) profile; used by the
/// calibration sweep. Returns the retained timestamps.
pub(crate) fn retained_ms_for_thresholds(
    ms: &[u64],
    max_kmh: &[f64],
    params: &FilterParams,
) -> Vec<u64> {
    let flags: Vec<bool> = max_kmh.iter().map(|&s| s < params.slow_speed_kmh).collect();
    let remove = qualifying_run_mask(
        ms,
        &flags,
        params.run_gap_break_ms,
        params.slow_run_s * 1000.0,
    );
    ms.iter()
        .zip(&remove)
        .filter(|(_, &r)| !r)
        .map(|(&t, _)| t)
        .collect()
}
