//! Shared fixtures and independent oracles for the acceptance suite.
//!
//! Everything here deliberately reimplements logic from first principles
//! (exhaustive subsets, literal window scans, integer-millisecond
//! bookkeeping) so it can stand as a check on the production path.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use hooptrack_core::court::CourtSpec;
use hooptrack_core::filter::{retain_full_lineups, ActivePlay};
use hooptrack_core::ingest::{GameFrame, GameMetadata, GameTimeline, PlayerState};
use hooptrack_core::synth::builder::TimelineBuilder;

/// Exhaustive convex-hull-area oracle for up to ~10 points: the maximum
/// shoelace area over every point subset that forms a convex polygon when
/// ordered around its centroid.
pub fn hull_area_oracle(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() < 3 {
            continue;
        }
        let subset: Vec<[f64; 2]> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| points[i])
            .collect();
        let cx = subset.iter().map(|p| p[0]).sum::<f64>() / subset.len() as f64;
        let cy = subset.iter().map(|p| p[1]).sum::<f64>() / subset.len() as f64;
        let mut ordered = subset;
        ordered.sort_by(|a, b| {
            (a[1] - cy)
                .atan2(a[0] - cx)
                .total_cmp(&(b[1] - cy).atan2(b[0] - cx))
        });
        let mut twice = 0.0;
        for i in 0..ordered.len() {
            let [x1, y1] = ordered[i];
            let [x2, y2] = ordered[(i + 1) % ordered.len()];
            twice += x1 * y2 - x2 * y1;
        }
        best = best.max(twice.abs() / 2.0);
    }
    best
}

/// Naive removal oracle: a frame is removed iff some window of consecutive
/// flagged frames (gaps at most `gap_break_ms`) contains it and spans at
/// least `min_span_ms`. Scans from every start, quadratically.
pub fn naive_run_removal_oracle(
    ms: &[u64],
    flags: &[bool],
    gap_break_ms: u64,
    min_span_ms: f64,
) -> BTreeSet<u64> {
    let mut removed = BTreeSet::new();
    for start in 0..ms.len() {
        if !flags[start] {
            continue;
        }
        let mut end = start;
        loop {
            if (ms[end] - ms[start]) as f64 >= min_span_ms {
                for &m in &ms[start..=end] {
                    removed.insert(m);
                }
            }
            if end + 1 >= ms.len() || !flags[end + 1] || ms[end + 1] - ms[end] > gap_break_ms {
                break;
            }
            end += 1;
        }
    }
    removed
}

/// A random scripted game mixing live play, slow stretches, free-throw
/// dwells, partial lineups and dead time.
pub fn random_play_timeline(rng: &mut ChaCha8Rng, _tag: usize) -> GameTimeline {
    let mut b = TimelineBuilder::with(CourtSpec::default(), 50, 7);
    let blocks = rng.gen_range(8..16);
    for _ in 0..blocks {
        let center = rng.gen_range(-10.0..10.0);
        match rng.gen_range(0..10) {
            0..=4 => {
                let speed = rng.gen_range(2.0..13.0);
                b.active(rng.gen_range(1_000..8_000), center, speed);
            }
            5 => {
                let speeds = std::array::from_fn(|_| rng.gen_range(2.0..13.0));
                b.active_speeds(rng.gen_range(1_000..6_000), center, speeds);
            }
            6 => {
                let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                b.ft_dwell(rng.gen_range(2_000..14_000), side, 12.0);
            }
            7 => {
                let n = *[3usize, 4, 6].choose(rng).unwrap();
                b.partial_lineup(rng.gen_range(1_000..3_000), n, center);
            }
            8 => {
                b.off_court(rng.gen_range(1_000..4_000));
            }
            _ => {
                b.gap(rng.gen_range(1_500..8_000));
            }
        }
    }
    // Always end with something retained so the timeline is never trivial.
    b.active(2_000, 5.0, 12.0);
    b.build()
}

/// A random already-reduced timeline (every frame has five on court) whose
/// team mean wanders across both halves, plus a halftime instant.
pub fn random_reduced_play(rng: &mut ChaCha8Rng) -> (ActivePlay, u64) {
    let mut b = TimelineBuilder::with(CourtSpec::default(), 50, 7);
    let blocks = rng.gen_range(10..30);
    for _ in 0..blocks {
        let center = rng.gen_range(-10.0..10.0);
        b.active(rng.gen_range(500..4_000), center, 12.0);
    }
    let halftime = b.cursor_ms() / 2;
    let timeline = b.build();
    (
        retain_full_lineups(&timeline, &CourtSpec::default()),
        halftime,
    )
}

/// Mirror a reduced timeline through the half-court line.
pub fn mirror_x(active: &ActivePlay) -> ActivePlay {
    let mut timeline = active.timeline.clone();
    for frame in &mut timeline.frames {
        for p in &mut frame.players {
            p.pos[0] = -p.pos[0];
            p.vel[0] = -p.vel[0];
        }
    }
    retain_full_lineups(&timeline, &CourtSpec::default())
}

/// One-frame timeline with five on-court players at the given positions.
pub fn frame_with_positions(positions: &[[f64; 2]; 5]) -> GameTimeline {
    let players = positions
        .iter()
        .map(|&pos| PlayerState {
            pos,
            vel: [1.0, 0.5],
            last_update_ms: 0,
            observed: true,
        })
        .chain([
            PlayerState {
                pos: [15.25, 8.98],
                vel: [0.0, 0.0],
                last_update_ms: 0,
                observed: true,
            },
            PlayerState::default(),
        ])
        .collect();
    GameTimeline {
        frames: vec![GameFrame { ms: 0, players }],
        roster: (0..7).map(|i| format!("p{i:02}")).collect(),
        metadata: GameMetadata::default(),
    }
}

/// A session engineered so the default thresholds (9.0 km/h, 2.5 s) recover
/// exactly 40 active minutes, with slow content layered across the grid so
/// every neighboring cell misses the target.
///
/// The arithmetic is exact: frames sit on a 25 ms grid and a planted stop of
/// span D contributes D + dt of wall clock, so the active balance solves in
/// integer milliseconds.
pub fn calibration_fixture(court: &CourtSpec) -> (GameTimeline, f64) {
    const DT: u64 = 25;
    const CAP: u64 = 1000;
    const BASE_SPEED: f64 = 9.0;
    const BASE_RUN_MS: u64 = 2_500;

    struct Stop {
        speed_kmh: f64,
        span_ms: u64,
    }

    let mut stops: Vec<Stop> = Vec::new();
    // Speed layers: one band per 0.2 km/h grid step on each side of 9.0,
    // planted mid-band so removal flips exactly at the intended cells. Spans
    // exceed the largest run threshold (4 s), so these react to h2 only.
    let band_blocks: [&[u64]; 5] = [
        &[9_000, 9_000],
        &[9_000, 9_000],
        &[10_000, 10_000, 10_000],
        &[12_000, 12_000, 12_000],
        &[10_500, 10_500, 10_500, 10_500],
    ];
    for (k, blocks) in band_blocks.iter().enumerate() {
        for sign in [1.0, -1.0] {
            let speed = BASE_SPEED + sign * (0.1 + 0.2 * k as f64);
            for &span in *blocks {
                stops.push(Stop {
                    speed_kmh: speed,
                    span_ms: span,
                });
            }
        }
    }
    // Duration layers at a deeply slow speed: spans planted between run-
    // threshold grid steps, so these react to h3 only.
    let duration_layers: [(u64, usize); 6] = [
        (2_625, 8),
        (2_875, 13),
        (3_125, 12),
        (2_375, 8),
        (2_125, 18),
        (1_875, 20),
    ];
    for (span, count) in duration_layers {
        for _ in 0..count {
            stops.push(Stop {
                speed_kmh: 6.0,
                span_ms: span,
            });
        }
    }

    // Active balance for exactly 40 minutes at the base cell.
    let removed_at_base = |s: &Stop| s.speed_kmh < BASE_SPEED && s.span_ms >= BASE_RUN_MS;
    let retained_ms: u64 = stops
        .iter()
        .filter(|s| !removed_at_base(s))
        .map(|s| s.span_ms + DT)
        .sum();
    let gaps: u64 = stops.iter().filter(|s| removed_at_base(s)).count() as u64;
    let target_ms: u64 = 40 * 60 * 1000;
    let active_total = target_ms - retained_ms + DT - (CAP - DT) * gaps;
    assert_eq!(
        active_total % DT,
        0,
        "fixture arithmetic must stay on the grid"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    stops.shuffle(&mut rng);

    let n_active_blocks = stops.len() as u64 + 1;
    let nominal = active_total / n_active_blocks / DT * DT;
    let mut b = TimelineBuilder::with(court.clone(), DT, 7);
    let mut remaining = active_total;
    for stop in &stops {
        b.active(nominal, 6.0, 12.5);
        remaining -= nominal;
        b.active(stop.span_ms + DT, 6.0, stop.speed_kmh);
    }
    b.active(remaining, 6.0, 12.5);
    (b.build(), 40.0)
}
