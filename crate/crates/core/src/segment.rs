//! Phase labelling and action segmentation of the reduced timeline.
//!
//! Each retained frame gets an offense/defense/transition label from the
//! team's mean position, and the game splits into numbered actions wherever
//! that mean fully traverses the transition band around the half-court line.
//! Dipping into the band and returning to the same side never splits an
//! action; the committed side only changes on a full crossing.

use std::fmt;
use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::court::CourtSpec;
use crate::filter::ActivePlay;

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("labels length {labels} does not match frame count {frames}")]
    LabelMismatch { labels: usize, frames: usize },
}

/// Per-frame game phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "O")]
    Offense,
    #[serde(rename = "D")]
    Defense,
    #[serde(rename = "Tr")]
    Transition,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Offense => "O",
            Phase::Defense => "D",
            Phase::Transition => "Tr",
        })
    }
}

/// Which way the tracked team attacks, and when the sides swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideConfig {
    /// Instant of the half-time side swap. When absent it is inferred as the
    /// midpoint of the longest gap between consecutive retained frames (the
    /// half-time break is the longest stoppage of a game).
    pub halftime_ms: Option<u64>,
    pub attack_positive_x_first_half: bool,
}

impl Default for SideConfig {
    fn default() -> Self {
        SideConfig {
            halftime_ms: None,
            attack_positive_x_first_half: true,
        }
    }
}

/// Midpoint of the longest gap between consecutive retained frames, or None
/// for timelines with fewer than two frames.
pub fn infer_halftime_ms(active: &ActivePlay) -> Option<u64> {
    let frames = &active.timeline.frames;
    if frames.len() < 2 {
        return None;
    }
    let mut best_gap = 0;
    let mut best_mid = None;
    for pair in frames.windows(2) {
        let gap = pair[1].ms - pair[0].ms;
        if gap > best_gap {
            best_gap = gap;
            best_mid = Some(pair[0].ms + gap / 2);
        }
    }
    best_mid
}

/// Mean on-court position per frame.
pub fn frame_means(active: &ActivePlay) -> Vec<[f64; 2]> {
    (0..active.len())
        .map(|i| {
            let mut sum = [0.0, 0.0];
            for p in active.court_positions(i) {
                sum[0] += p[0];
                sum[1] += p[1];
            }
            [sum[0] / 5.0, sum[1] / 5.0]
        })
        .collect()
}

/// Label every retained frame offense, defense or transition.
///
/// A frame is `Tr` when the team mean sits inside the closed transition
/// band; otherwise it is `O` on the attacking side for the current half and
/// `D` on the other, with the attacking side flipping at half-time.
pub fn label_phases(active: &ActivePlay, court: &CourtSpec, sides: &SideConfig) -> Vec<Phase> {
    let halftime = sides.halftime_ms.or_else(|| infer_halftime_ms(active));
    let means = frame_means(active);
    means
        .iter()
        .zip(&active.timeline.frames)
        .map(|(mean, frame)| {
            let x = mean[0];
            if x.abs() <= court.transition_half_width {
                return Phase::Transition;
            }
            let second_half = halftime.is_some_and(|h| frame.ms >= h);
            let attack_positive = sides.attack_positive_x_first_half ^ second_half;
            if (x > 0.0) == attack_positive {
                Phase::Offense
            } else {
                Phase::Defense
            }
        })
        .collect()
}

/// One action: a maximal span of frames sharing a committed court side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSegment {
    /// 1-based, consecutive over the game in chronological order.
    pub act_id: u32,
    pub start_ms: u64,
    pub end_ms: u64,
    /// Index range into the reduced timeline.
    pub frame_span: Range<usize>,
    /// Offense/defense reading of the segment's committed side, taken at the
    /// first committed frame. None only when the whole game stays inside the
    /// transition band. Per-action phase is an extension of the per-row
    /// labelling (see output metadata).
    pub dominant_phase: Option<Phase>,
    pub duration_s: f64,
}

/// Split the reduced timeline into actions.
///
/// The committed side updates only when |mean x| exceeds the band, and the
/// action id increments exactly when the committed side flips sign. Frames
/// inside the band belong to the outgoing action; frames before any side is
/// committed belong to action 1.
pub fn assign_actions(
    active: &ActivePlay,
    labels: &[Phase],
    court: &CourtSpec,
) -> Result<Vec<ActionSegment>, SegmentError> {
    assign_actions_with_gap_split(active, labels, court, None)
}

/// [`assign_actions`] with an optional time-based split: when set, a gap
/// larger than `max_intra_action_gap_ms` between consecutive retained frames
/// also starts a new action. The splitting criterion is purely spatial by
/// default; this knob exists for practitioners who want quarter boundaries
/// or long stoppages to cut possessions, and stays off everywhere else.
pub fn assign_actions_with_gap_split(
    active: &ActivePlay,
    labels: &[Phase],
    court: &CourtSpec,
    max_intra_action_gap_ms: Option<u64>,
) -> Result<Vec<ActionSegment>, SegmentError> {
    if labels.len() != active.len() {
        return Err(SegmentError::LabelMismatch {
            labels: labels.len(),
            frames: active.len(),
        });
    }
    if active.is_empty() {
        return Ok(Vec::new());
    }

    let means = frame_means(active);
    let band = court.transition_half_width;

    // Per-frame action ids from committed-side flips (and, optionally, from
    // oversized frame gaps).
    let mut act_of_frame = Vec::with_capacity(active.len());
    let mut committed: Option<bool> = None; // side as "x is positive"
    let mut act: u32 = 1;
    let mut prev_ms: Option<u64> = None;
    for (mean, frame) in means.iter().zip(&active.timeline.frames) {
        let gap_split = match (max_intra_action_gap_ms, prev_ms) {
            (Some(max_gap), Some(prev)) => frame.ms - prev > max_gap,
            _ => false,
        };
        prev_ms = Some(frame.ms);
        let mut side_flip = false;
        if mean[0].abs() > band {
            let side = mean[0] > 0.0;
            side_flip = committed.is_some_and(|prev| prev != side);
            committed = Some(side);
        }
        // A gap and a flip landing on the same frame still open one action.
        if gap_split || side_flip {
            act += 1;
        }
        act_of_frame.push(act);
    }

    let frames = &active.timeline.frames;
    let mut segments: Vec<ActionSegment> = Vec::new();
    let mut start = 0usize;
    for i in 1..=act_of_frame.len() {
        if i == act_of_frame.len() || act_of_frame[i] != act_of_frame[start] {
            let span = start..i;
            let dominant_phase = span
                .clone()
                .map(|f| labels[f])
                .find(|&l| l != Phase::Transition);
            let (start_ms, end_ms) = (frames[span.start].ms, frames[span.end - 1].ms);
            segments.push(ActionSegment {
                act_id: act_of_frame[start],
                start_ms,
                end_ms,
                frame_span: span,
                dominant_phase,
                duration_s: (end_ms - start_ms) as f64 / 1000.0,
            });
            start = i;
        }
    }
    Ok(segments)
}

/// Action counts and the share of durations inside a plausibility window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSummary {
    pub count: usize,
    pub durations_s: Vec<f64>,
    /// Closed duration window in seconds.
    pub window_s: (f64, f64),
    /// Fraction of actions with duration inside the window; 0 when empty.
    pub in_window_share: f64,
}

/// Default plausibility window: 4 s to 38 s (24 s shot clock, plus 14 s
/// after an offensive-rebound reset twice over).
pub const DEFAULT_DURATION_WINDOW_S: (f64, f64) = (4.0, 38.0);

pub fn summarize_actions(segments: &[ActionSegment], window_s: (f64, f64)) -> ActionSummary {
    let durations_s: Vec<f64> = segments.iter().map(|s| s.duration_s).collect();
    let in_window = durations_s
        .iter()
        .filter(|&&d| d >= window_s.0 && d <= window_s.1)
        .count();
    let in_window_share = if durations_s.is_empty() {
        0.0
    } else {
        in_window as f64 / durations_s.len() as f64
    };
    ActionSummary {
        count: segments.len(),
        durations_s,
        window_s,
        in_window_share,
    }
}

/// Write the per-frame table: ms, mean position, label, action id.
pub fn write_frame_table<W: Write>(
    active: &ActivePlay,
    labels: &[Phase],
    segments: &[ActionSegment],
    out: &mut W,
) -> std::io::Result<()> {
    let means = frame_means(active);
    let mut act_of_frame = vec![0u32; active.len()];
    for seg in segments {
        act_of_frame[seg.frame_span.clone()].fill(seg.act_id);
    }
    writeln!(out, "ms,avg_pos_x,avg_pos_y,label,act_id")?;
    for (i, frame) in active.timeline.frames.iter().enumerate() {
        writeln!(
            out,
            "{},{:.4},{:.4},{},{}",
            frame.ms, means[i][0], means[i][1], labels[i], act_of_frame[i]
        )?;
    }
    Ok(())
}

/// Write the per-action table.
pub fn write_action_table<W: Write>(
    segments: &[ActionSegment],
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(
        out,
        "act_id,start_ms,end_ms,n_frames,dominant_phase,duration_s"
    )?;
    for seg in segments {
        writeln!(
            out,
            "{},{},{},{},{},{:.3}",
            seg.act_id,
            seg.start_ms,
            seg.end_ms,
            seg.frame_span.len(),
            seg.dominant_phase.map_or("NA".into(), |p| p.to_string()),
            seg.duration_s
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::retain_full_lineups;
    use crate::ingest::{GameFrame, GameMetadata, GameTimeline, PlayerState};

    fn player(pos: [f64; 2]) -> PlayerState {
        PlayerState {
            pos,
            vel: [3.0, 0.0],
            last_update_ms: 0,
            observed: true,
        }
    }

    /// Five players centered on `mean_x`, two benched.
    fn frame_at(ms: u64, mean_x: f64) -> GameFrame {
        let players = (0..5)
            .map(|i| player([mean_x + (i as f64 - 2.0) * 0.5, i as f64 - 2.0]))
            .chain([player([15.25, 8.98]), player([15.25, -8.98])])
            .collect();
        GameFrame { ms, players }
    }

    fn active_from_means(path: &[(u64, f64)]) -> ActivePlay {
        let frames = path.iter().map(|&(ms, x)| frame_at(ms, x)).collect();
        let tl = GameTimeline {
            frames,
            roster: (0..7).map(|i| format!("p{i}")).collect(),
            metadata: GameMetadata::default(),
        };
        retain_full_lineups(&tl, &CourtSpec::default())
    }

    fn court() -> CourtSpec {
        CourtSpec::default()
    }

    fn first_half_sides() -> SideConfig {
        SideConfig {
            halftime_ms: Some(1_000_000),
            attack_positive_x_first_half: true,
        }
    }

    #[test]
    fn label_examples() {
        let active = active_from_means(&[(0, 9.0), (25, -2.0), (50, -9.0), (75, 4.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        assert_eq!(
            labels,
            vec![
                Phase::Offense,
                Phase::Transition,
                Phase::Defense,
                Phase::Transition
            ]
        );
    }

    #[test]
    fn labels_flip_after_halftime() {
        let sides = SideConfig {
            halftime_ms: Some(100),
            attack_positive_x_first_half: true,
        };
        let active = active_from_means(&[(0, 9.0), (200, 9.0)]);
        let labels = label_phases(&active, &court(), &sides);
        assert_eq!(labels, vec![Phase::Offense, Phase::Defense]);
    }

    #[test]
    fn halftime_inferred_from_longest_gap() {
        let active = active_from_means(&[(0, 9.0), (100, 9.0), (900_100, 9.0)]);
        assert_eq!(infer_halftime_ms(&active), Some(100 + 450_000));
        let labels = label_phases(&active, &court(), &SideConfig::default());
        assert_eq!(labels, vec![Phase::Offense, Phase::Offense, Phase::Defense]);
    }

    #[test]
    fn transition_band_is_definitional() {
        let xs = [-4.1, -4.0, -2.0, 0.0, 4.0, 4.1];
        let path: Vec<(u64, f64)> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| (i as u64 * 25, x))
            .collect();
        let active = active_from_means(&path);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let means = frame_means(&active);
        for (label, mean) in labels.iter().zip(&means) {
            assert_eq!(
                *label == Phase::Transition,
                mean[0].abs() <= court().transition_half_width,
                "band test failed at mean x {}",
                mean[0]
            );
        }
    }

    #[test]
    fn incursion_without_crossing_keeps_action() {
        let active = active_from_means(&[(0, 9.0), (25, 2.0), (50, -1.0), (75, 8.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].act_id, 1);
        assert_eq!(segments[0].frame_span, 0..4);
    }

    #[test]
    fn full_traversal_increments_at_crossing_frame() {
        let active = active_from_means(&[(0, 9.0), (25, 1.0), (50, -5.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();
        assert_eq!(segments.len(), 2);
        // The in-band frame belongs to the outgoing action.
        assert_eq!(segments[0].frame_span, 0..2);
        assert_eq!(segments[1].frame_span, 2..3);
        assert_eq!(segments[1].act_id, 2);
        assert_eq!(segments[1].start_ms, 50);
    }

    #[test]
    fn all_band_game_is_single_action() {
        let active = active_from_means(&[(0, 1.0), (25, -1.0), (50, 3.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].act_id, 1);
        assert_eq!(segments[0].dominant_phase, None);
    }

    #[test]
    fn opening_band_frames_join_first_action() {
        let active = active_from_means(&[(0, 0.0), (25, 2.0), (50, -6.0), (75, -7.0), (100, 6.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();
        assert_eq!(segments.len(), 2);
        assert_eq!(segments[0].frame_span, 0..4);
        // First committed side is negative x = defense under these sides.
        assert_eq!(segments[0].dominant_phase, Some(Phase::Defense));
        assert_eq!(segments[1].dominant_phase, Some(Phase::Offense));
    }

    #[test]
    fn exact_band_edge_does_not_commit() {
        let active = active_from_means(&[(0, 9.0), (25, -4.0), (50, 9.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();
        assert_eq!(segments.len(), 1, "|x| = band is inside the band");
    }

    #[test]
    fn segments_partition_frames() {
        let path: Vec<(u64, f64)> = (0..40)
            .map(|i| (i as u64 * 25, ((i as f64) * 0.7).sin() * 9.0))
            .collect();
        let active = active_from_means(&path);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();

        let mut covered = 0;
        for (k, seg) in segments.iter().enumerate() {
            assert_eq!(seg.frame_span.start, covered);
            assert_eq!(seg.act_id, k as u32 + 1);
            assert!(seg.frame_span.end > seg.frame_span.start);
            covered = seg.frame_span.end;
        }
        assert_eq!(covered, active.len());
    }

    #[test]
    fn empty_timeline_yields_no_segments() {
        let active = active_from_means(&[]);
        let segments = assign_actions(&active, &[], &court()).unwrap();
        assert!(segments.is_empty());
    }

    #[test]
    fn mirror_symmetry_preserves_actions_and_labels() {
        let path: Vec<(u64, f64)> = (0..60)
            .map(|i| (i as u64 * 25, ((i as f64) * 0.37).sin() * 10.0 - 1.0))
            .collect();
        let active = active_from_means(&path);
        let mirrored_path: Vec<(u64, f64)> = path.iter().map(|&(ms, x)| (ms, -x)).collect();
        let mirrored = active_from_means(&mirrored_path);

        let sides = first_half_sides();
        let flipped = SideConfig {
            attack_positive_x_first_half: !sides.attack_positive_x_first_half,
            ..sides
        };

        let labels = label_phases(&active, &court(), &sides);
        let labels_m = label_phases(&mirrored, &court(), &flipped);
        assert_eq!(labels, labels_m);

        let segments = assign_actions(&active, &labels, &court()).unwrap();
        let segments_m = assign_actions(&mirrored, &labels_m, &court()).unwrap();
        assert_eq!(segments, segments_m);
    }

    #[test]
    fn gap_split_is_off_by_default() {
        let active = active_from_means(&[(0, 9.0), (25, 9.0), (8_000, 9.0), (8_025, 9.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();
        assert_eq!(
            segments.len(),
            1,
            "the crossing criterion is purely spatial"
        );

        let split = assign_actions_with_gap_split(&active, &labels, &court(), Some(5_000)).unwrap();
        assert_eq!(split.len(), 2);
        assert_eq!(split[0].frame_span, 0..2);
        assert_eq!(split[1].frame_span, 2..4);
        assert_eq!(split[1].act_id, 2);
        assert_eq!(split[1].dominant_phase, Some(Phase::Offense));

        // A gap and a committed-side flip on the same frame open one action.
        let active = active_from_means(&[(0, 9.0), (25, 9.0), (8_000, -9.0), (8_025, -9.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let split = assign_actions_with_gap_split(&active, &labels, &court(), Some(5_000)).unwrap();
        assert_eq!(split.len(), 2);
        assert_eq!(split.last().unwrap().act_id, 2);
    }

    #[test]
    fn summary_examples() {
        let seg = |act_id, start_ms, end_ms| ActionSegment {
            act_id,
            start_ms,
            end_ms,
            frame_span: 0..1,
            dominant_phase: Some(Phase::Offense),
            duration_s: (end_ms - start_ms) as f64 / 1000.0,
        };
        let segments = vec![
            seg(1, 0, 5_000),
            seg(2, 6_000, 16_000),
            seg(3, 17_000, 57_000),
        ];
        let summary = summarize_actions(&segments, DEFAULT_DURATION_WINDOW_S);
        assert_eq!(summary.count, 3);
        assert!((summary.in_window_share - 2.0 / 3.0).abs() < 1e-12);

        let empty = summarize_actions(&[], DEFAULT_DURATION_WINDOW_S);
        assert_eq!(empty.count, 0);
        assert_eq!(empty.in_window_share, 0.0);
    }

    #[test]
    fn label_mismatch_is_rejected() {
        let active = active_from_means(&[(0, 9.0)]);
        let err = assign_actions(&active, &[], &court()).unwrap_err();
        assert_eq!(
            err,
            SegmentError::LabelMismatch {
                labels: 0,
                frames: 1
            }
        );
    }

    #[test]
    fn frame_table_layout() {
        let active = active_from_means(&[(0, 9.0), (25, -5.0)]);
        let labels = label_phases(&active, &court(), &first_half_sides());
        let segments = assign_actions(&active, &labels, &court()).unwrap();
        let mut buf = Vec::new();
        write_frame_table(&active, &labels, &segments, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("ms,avg_pos_x,avg_pos_y,label,act_id"));
        assert_eq!(lines.next(), Some("0,9.0000,0.0000,O,1"));
        assert_eq!(lines.next(), Some("25,-5.0000,0.0000,D,2"));
    }
}
