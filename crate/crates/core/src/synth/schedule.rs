//! Session layout and motion scripting for synthetic games.
//!
//! The layout pass turns a plan into a contiguous list of timed windows
//! (holds, travels, stoppages, walk legs) plus the per-action bookkeeping
//! the ground truth needs. The script pass then walks the windows and gives
//! every roster player a continuous motion chain, reporting back the exact
//! court-entry, court-exit and circle-entry instants that depend on actual
//! positions.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::court::CourtSpec;
use crate::segment::Phase;

use super::motion::{dist, on_circle, PlayerScript};
use super::plan::{StoppageKind, StoppageSpec, SynthPlan};
use super::SynthError;

const ANCHOR_ABS_X: f64 = 7.9;
const ANCHOR_JITTER_X: f64 = 0.2;
const ANCHOR_Y_MAX: f64 = 0.6;
/// Mean pairwise distance of a regular pentagon with unit circumradius.
const PENTAGON_MEAN_FACTOR: f64 = 1.538_841_768_587_627;
const WALK_MPS: f64 = 3.3;
const WALKOUT_DUR_S: f64 = 10.5;
const WALKIN_DUR_S: f64 = 12.5;
const FT_WALK_S: f64 = 3.5;
/// Budgeted lead from free-throw window start to circle entry.
const FT_LEAD_S: f64 = 2.2;
/// Budget estimates for span edges refined later by the script pass.
const WALKIN_LEAD_S: f64 = 1.0;
const WALKOUT_LEAD_S: f64 = 0.6;
const TRAVEL_FAST_MPS: f64 = 8.0;
const TRAVEL_NORMAL_MPS: f64 = 5.4;
const MIN_HOLD_S: f64 = 0.7;
const BENCH_Y: f64 = 9.3;
const STAGE_Y: f64 = 8.3;
const ORBIT_WOBBLE_M: f64 = 0.18;
const ORBIT_R_SLACK_M: f64 = 0.2;

fn spacing_radius(spacing_m: f64) -> f64 {
    spacing_m / PENTAGON_MEAN_FACTOR
}

#[derive(Debug, Clone)]
pub(crate) struct Window {
    pub t0: f64,
    pub t1: f64,
    pub lineup: [usize; 5],
    pub kind: WKind,
}

#[derive(Debug, Clone)]
pub(crate) enum WKind {
    /// Everyone parked at their seats; no script work needed.
    ParkAll,
    WalkIn {
        anchor: [f64; 2],
        radius: f64,
        theta0: f64,
    },
    WalkOut,
    Hold {
        anchor: [f64; 2],
        radius: f64,
    },
    Travel {
        to_anchor: [f64; 2],
        to_radius: f64,
        theta1: f64,
    },
    FreeThrow {
        circle: [f64; 2],
        shooter_slot: usize,
        /// Where the shooter dashes after the throw (back toward the hold).
        anchor: [f64; 2],
    },
    SlowDrift {
        speed_kmh: f64,
        removed_at_base: bool,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct ActionLayout {
    pub phase: Phase,
    /// Span edges; bench-adjacent edges are budget estimates until refined.
    pub start_s: f64,
    pub end_s: f64,
    /// Window index of the WalkIn that opens this action, when it starts
    /// from a bench stoppage (or the pre-game walk-in).
    pub start_walkin: Option<usize>,
    /// Window index of the WalkOut that closes this action.
    pub end_walkout: Option<usize>,
}

#[derive(Debug)]
pub(crate) struct Layout {
    pub windows: Vec<Window>,
    pub session_end_s: f64,
    pub halftime_flip_s: Option<f64>,
    pub actions: Vec<ActionLayout>,
}

/// Per-action stop assignment produced before time layout.
struct StopPlan {
    /// Boundary index b (1..n) -> bench-like stop placed before action b.
    bench_at_boundary: BTreeMap<usize, StoppageSpec>,
    /// Action index -> embedded stops in play order.
    embedded: Vec<Vec<StoppageSpec>>,
}

fn draw_durations(plan: &SynthPlan, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<bool>) {
    let spec = &plan.durations;
    let n = plan.n_actions;
    let outliers: Vec<f64> = spec
        .short_outliers_s
        .iter()
        .chain(&spec.long_outliers_s)
        .copied()
        .collect();
    let n_core = n - outliers.len();

    let normal = rand_distr::Normal::new(0.0, 1.0).expect("unit normal");
    let mut durations: Vec<f64> = (0..n_core)
        .map(|_| {
            let z: f64 = normal.sample(rng);
            // Clamp the core so no draw collides with the outlier window.
            (spec.median_s * (spec.sigma_log * z).exp()).clamp(4.6, 36.0)
        })
        .collect();
    let mut is_outlier = vec![false; n_core];

    // Outliers go to interior positions, spread out deterministically.
    for (k, d) in outliers.iter().enumerate() {
        let pos = if n > 2 {
            1 + ((k * 2 + 1) * (n - 2) / (outliers.len() * 2 + 1)).min(n - 2)
        } else {
            0
        };
        let pos = pos.min(durations.len());
        durations.insert(pos, *d);
        is_outlier.insert(pos, true);
    }
    (durations, is_outlier)
}

fn assign_stops(
    plan: &SynthPlan,
    durations: &mut [f64],
    is_outlier: &[bool],
    rng: &mut ChaCha8Rng,
) -> Result<StopPlan, SynthError> {
    let n = plan.n_actions;
    let mut bench_like: Vec<StoppageSpec> = Vec::new();
    let mut embedded_stops: Vec<StoppageSpec> = Vec::new();
    for stop in &plan.stoppages {
        match stop.kind {
            StoppageKind::Bench | StoppageKind::Halftime => bench_like.push(*stop),
            StoppageKind::FreeThrow | StoppageKind::SlowRun => embedded_stops.push(*stop),
        }
    }

    // Bench boundaries: halftime dead center, the rest spread over the game.
    if !bench_like.is_empty() && n < 2 {
        return Err(SynthError::InfeasiblePlan(
            "bench stoppages need at least two actions".into(),
        ));
    }
    let mut bench_at_boundary = BTreeMap::new();
    let mut claim = |want: usize, stop: StoppageSpec| -> Result<(), SynthError> {
        let mut b = want.clamp(1, n - 1);
        for _ in 0..n {
            if let std::collections::btree_map::Entry::Vacant(e) = bench_at_boundary.entry(b) {
                e.insert(stop);
                return Ok(());
            }
            b = b % (n - 1) + 1;
        }
        Err(SynthError::InfeasiblePlan(
            "more bench stoppages than action boundaries".into(),
        ))
    };
    let halftime_idx = bench_like
        .iter()
        .position(|s| s.kind == StoppageKind::Halftime);
    if let Some(i) = halftime_idx {
        claim(n / 2, bench_like[i])?;
    }
    let others: Vec<StoppageSpec> = bench_like
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != halftime_idx)
        .map(|(_, s)| *s)
        .collect();
    for (k, stop) in others.iter().enumerate() {
        let want = (k + 1) * n / (others.len() + 1);
        claim(want.max(1), *stop)?;
    }

    // Embedded stops go to core actions with room to spare, longest first.
    // The required budget covers the boundary edges, the stop walls and a
    // minimum hold between them.
    let edge_budget = 3.45;
    let needed =
        |walls: f64, slots: usize| walls + edge_budget + MIN_HOLD_S * (slots as f64 + 1.0) + 0.3;
    let mut embedded: Vec<Vec<StoppageSpec>> = vec![Vec::new(); n];
    embedded_stops.sort_by(|a, b| wall_estimate(b).total_cmp(&wall_estimate(a)));
    let hosts: Vec<usize> = (0..n).filter(|&i| !is_outlier[i]).collect();
    if !embedded_stops.is_empty() && hosts.is_empty() {
        return Err(SynthError::InfeasiblePlan(
            "no core actions available to host stoppages".into(),
        ));
    }
    for stop in embedded_stops {
        let wall = wall_estimate(&stop);
        let max_per_host = if wall <= 5.0 { 2 } else { 1 };
        let mut placed = false;
        let start = rng.gen_range(0..hosts.len());
        for probe in 0..hosts.len() {
            let host = hosts[(start + probe) % hosts.len()];
            let walls: f64 = embedded[host].iter().map(wall_estimate).sum();
            let slots = embedded[host].len();
            if slots < max_per_host
                && embedded[host]
                    .iter()
                    .all(|s| wall_estimate(s) <= 5.0 || wall <= 5.0)
                && durations[host] >= needed(walls + wall, slots + 2)
            {
                embedded[host].push(stop);
                placed = true;
                break;
            }
        }
        if !placed {
            // Grow the longest stop-free core action to fit, paying for the
            // growth by shrinking the other cores so the total stays put.
            let host = match hosts
                .iter()
                .copied()
                .filter(|&h| embedded[h].is_empty())
                .max_by(|&a, &b| durations[a].total_cmp(&durations[b]))
            {
                Some(h) => h,
                None => {
                    return Err(SynthError::InfeasiblePlan(format!(
                        "no action can host a {wall:.1} s stoppage"
                    )))
                }
            };
            let target = needed(wall, 3);
            if target > 35.0 {
                return Err(SynthError::InfeasiblePlan(format!(
                    "a {wall:.1} s stoppage does not fit in any plausible action"
                )));
            }
            let delta = target - durations[host];
            let others_total: f64 = hosts
                .iter()
                .filter(|&&h| h != host)
                .map(|&h| durations[h])
                .sum();
            if delta <= 0.0 || others_total <= delta + 5.0 {
                return Err(SynthError::InfeasiblePlan(
                    "not enough action time to rebalance for stoppage hosting".into(),
                ));
            }
            let shrink = 1.0 - delta / others_total;
            for &h in &hosts {
                if h != host {
                    durations[h] *= shrink;
                }
            }
            durations[host] = target;
            if durations
                .iter()
                .zip(is_outlier)
                .any(|(&d, &o)| !o && d < 3.4)
            {
                return Err(SynthError::InfeasiblePlan(
                    "rebalancing for stoppage hosting squeezed an action below 3.4 s".into(),
                ));
            }
            embedded[host].push(stop);
        }
    }
    for stops in embedded.iter_mut() {
        stops.shuffle(rng);
    }
    Ok(StopPlan {
        bench_at_boundary,
        embedded,
    })
}

/// Budgeted wall-clock cost of an embedded stop inside its action.
fn wall_estimate(stop: &StoppageSpec) -> f64 {
    match stop.kind {
        StoppageKind::FreeThrow => stop.duration_s + FT_LEAD_S,
        StoppageKind::SlowRun => stop.duration_s,
        _ => 0.0,
    }
}

/// Removed-at-base span estimate of an embedded stop.
fn removed_estimate(stop: &StoppageSpec, plan: &SynthPlan) -> f64 {
    match stop.kind {
        StoppageKind::FreeThrow => stop.duration_s + 0.7,
        StoppageKind::SlowRun
            if stop.speed_kmh < plan.base_params.slow_speed_kmh
                && stop.duration_s >= plan.base_params.slow_run_s =>
        {
            stop.duration_s
        }
        _ => 0.0,
    }
}

pub(crate) fn build_layout(plan: &SynthPlan, court: &CourtSpec) -> Result<Layout, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed ^ 0x1a70_u64);
    let band = court.transition_half_width;

    let (mut durations, is_outlier) = draw_durations(plan, &mut rng);

    // Tuner: pipeline minutes at base = sum(spans) - removed-in-action + gap
    // contributions. Both correction terms depend only on the stop set, so
    // the core scale is solvable before stops are placed.
    if let Some(target_min) = plan.target_active_minutes {
        let removed_in_action: f64 = plan
            .stoppages
            .iter()
            .map(|s| removed_estimate(s, plan))
            .sum();
        let n_gaps = plan
            .stoppages
            .iter()
            .filter(|s| {
                matches!(s.kind, StoppageKind::Bench | StoppageKind::Halftime)
                    || removed_estimate(s, plan) > 0.0
            })
            .count();
        let cap_s = plan.base_params.active_gap_cap_ms as f64 / 1000.0;
        let fixed: f64 = durations
            .iter()
            .zip(&is_outlier)
            .filter(|(_, &o)| o)
            .map(|(d, _)| d)
            .sum();
        let core: f64 = durations
            .iter()
            .zip(&is_outlier)
            .filter(|(_, &o)| !o)
            .map(|(d, _)| d)
            .sum();
        let scale = (target_min * 60.0 + removed_in_action - n_gaps as f64 * cap_s - fixed) / core;
        if !(0.6..=1.4).contains(&scale) {
            return Err(SynthError::InfeasiblePlan(format!(
                "target of {target_min} min needs core durations scaled by {scale:.2}; \
                 adjust n_actions or the duration spec"
            )));
        }
        for (d, &o) in durations.iter_mut().zip(&is_outlier) {
            if !o {
                *d *= scale;
            }
        }
    }

    let stop_plan = assign_stops(plan, &mut durations, &is_outlier, &mut rng)?;
    build_with_durations(plan, court, band, durations, stop_plan, &mut rng)
}

#[allow(clippy::too_many_arguments)]
fn build_with_durations(
    plan: &SynthPlan,
    court: &CourtSpec,
    band: f64,
    durations: Vec<f64>,
    stop_plan: StopPlan,
    rng: &mut ChaCha8Rng,
) -> Result<Layout, SynthError> {
    let n = plan.n_actions;

    // Lineup management.
    let mut pool: Vec<usize> = (0..plan.roster_size).collect();
    pool.shuffle(rng);
    let mut lineup: [usize; 5] = [pool[0], pool[1], pool[2], pool[3], pool[4]];
    lineup.sort_unstable();
    let mut bench: Vec<usize> = pool[5..].to_vec();
    let rotate = |lineup: &mut [usize; 5], bench: &mut Vec<usize>, rng: &mut ChaCha8Rng| {
        let swaps = rng.gen_range(1..=2usize.min(bench.len()));
        for _ in 0..swaps {
            let out_slot = rng.gen_range(0..5);
            let in_idx = rng.gen_range(0..bench.len());
            std::mem::swap(&mut lineup[out_slot], &mut bench[in_idx]);
        }
        lineup.sort_unstable();
    };

    // Halftime boundary, for phase accounting.
    let halftime_boundary: Option<usize> = stop_plan
        .bench_at_boundary
        .iter()
        .find(|(_, s)| s.kind == StoppageKind::Halftime)
        .map(|(&b, _)| b);

    let mut windows: Vec<Window> = Vec::new();
    let mut actions: Vec<ActionLayout> = Vec::with_capacity(n);
    let mut halftime_flip_s = None;

    let mut side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut anchor = action_anchor(side, rng);
    let mut radius;
    let mut cursor;
    // Trailing share of the incoming travel window, set by the previous
    // boundary; None when the action opens with a walk-in.
    let mut carry_r_in: Option<f64> = None;

    // Pre-game: sit, then walk in for action 1.
    {
        let phase0 = phase_of(0, halftime_boundary, side, plan);
        radius = spacing_radius(spacing_for(phase0, plan));
        let park_end = plan.pre_game_s - WALKIN_DUR_S;
        windows.push(Window {
            t0: 0.0,
            t1: park_end.max(1.0),
            lineup,
            kind: WKind::ParkAll,
        });
        windows.push(Window {
            t0: park_end.max(1.0),
            t1: plan.pre_game_s.max(park_end.max(1.0) + WALKIN_DUR_S),
            lineup,
            kind: WKind::WalkIn {
                anchor,
                radius,
                theta0: rng.gen_range(0.0..std::f64::consts::TAU),
            },
        });
        cursor = windows.last().unwrap().t1;
    }

    for i in 0..n {
        let d = durations[i];
        let phase = phase_of(i, halftime_boundary, side, plan);
        let start_walkin = if i == 0 || stop_plan.bench_at_boundary.contains_key(&i) {
            // The WalkIn window just emitted is the one that opens action i.
            Some(windows.len() - 1)
        } else {
            None
        };
        let bench_next = stop_plan.bench_at_boundary.get(&(i + 1)).copied();
        let is_last = i == n - 1;

        // Edge budgets.
        let r_in = match carry_r_in.take() {
            Some(r) => r,
            None => WALKIN_LEAD_S,
        };
        let stops = &stop_plan.embedded[i];
        let walls: f64 = stops.iter().map(wall_estimate).sum();

        // Outgoing edge: bench/post walk-out lead, or the leading share of
        // the outgoing travel (whose duration depends on the next anchor).
        let next_anchor = action_anchor(-side, rng);
        let travel_speed = if d.min(if is_last { f64::MAX } else { durations[i + 1] }) < 6.0 {
            TRAVEL_FAST_MPS
        } else {
            TRAVEL_NORMAL_MPS
        };
        let travel_dur = dist(anchor, next_anchor) / travel_speed;
        let commit_frac = (anchor[0].abs() + band) / (anchor[0].abs() + next_anchor[0].abs());
        let r_out = if is_last || bench_next.is_some() {
            WALKOUT_LEAD_S
        } else {
            travel_dur * commit_frac
        };

        let hold_total = d - r_in - r_out - walls;
        let pieces = stops.len() + 1;
        let hold = hold_total / pieces as f64;
        if hold < MIN_HOLD_S {
            return Err(SynthError::InfeasiblePlan(format!(
                "action of {d:.1} s cannot fit its stoppages ({walls:.1} s of walls)"
            )));
        }

        let span_start = cursor - r_in;
        // Content: hold, then stop+hold pairs.
        let push_hold = |cursor: &mut f64, windows: &mut Vec<Window>| {
            windows.push(Window {
                t0: *cursor,
                t1: *cursor + hold,
                lineup,
                kind: WKind::Hold { anchor, radius },
            });
            *cursor += hold;
        };
        push_hold(&mut cursor, &mut windows);
        for stop in stops {
            let wall = wall_estimate(stop);
            let kind = match stop.kind {
                StoppageKind::FreeThrow => WKind::FreeThrow {
                    circle: [court.ft_circle_center_abs_x * side, 0.0],
                    shooter_slot: rng.gen_range(0..5),
                    anchor,
                },
                StoppageKind::SlowRun => WKind::SlowDrift {
                    speed_kmh: stop.speed_kmh,
                    removed_at_base: removed_estimate(stop, plan) > 0.0,
                },
                _ => unreachable!("bench stops are not embedded"),
            };
            windows.push(Window {
                t0: cursor,
                t1: cursor + wall,
                lineup,
                kind,
            });
            cursor += wall;
            push_hold(&mut cursor, &mut windows);
        }

        // Outgoing boundary.
        let mut action = ActionLayout {
            phase,
            start_s: span_start,
            end_s: 0.0,
            start_walkin,
            end_walkout: None,
        };
        if is_last || bench_next.is_some() {
            action.end_s = cursor + WALKOUT_LEAD_S;
            action.end_walkout = Some(windows.len());
            windows.push(Window {
                t0: cursor,
                t1: cursor + WALKOUT_DUR_S,
                lineup,
                kind: WKind::WalkOut,
            });
            cursor += WALKOUT_DUR_S;
            if let Some(stop) = bench_next {
                let sit_end = windows.last().unwrap().t0 + stop.duration_s - WALKIN_DUR_S;
                if sit_end < cursor + 0.2 {
                    return Err(SynthError::InfeasiblePlan(format!(
                        "bench stoppage of {} s leaves no sit time",
                        stop.duration_s
                    )));
                }
                if stop.kind == StoppageKind::Halftime {
                    halftime_flip_s = Some((cursor + sit_end) / 2.0);
                }
                windows.push(Window {
                    t0: cursor,
                    t1: sit_end,
                    lineup,
                    kind: WKind::ParkAll,
                });
                cursor = sit_end;
                rotate(&mut lineup, &mut bench, rng);
                side = -side;
                anchor = next_anchor;
                let next_phase = phase_of(i + 1, halftime_boundary, side, plan);
                radius = spacing_radius(spacing_for(next_phase, plan));
                windows.push(Window {
                    t0: cursor,
                    t1: cursor + WALKIN_DUR_S,
                    lineup,
                    kind: WKind::WalkIn {
                        anchor,
                        radius,
                        theta0: rng.gen_range(0.0..std::f64::consts::TAU),
                    },
                });
                cursor += WALKIN_DUR_S;
            } else {
                // Post-game: sit out the rest of the session.
                let end = windows.last().unwrap().t0 + plan.post_game_s;
                windows.push(Window {
                    t0: cursor,
                    t1: end.max(cursor + 1.0),
                    lineup,
                    kind: WKind::ParkAll,
                });
                cursor = windows.last().unwrap().t1;
            }
        } else {
            let commit = cursor + travel_dur * commit_frac;
            action.end_s = commit;
            carry_r_in = Some(travel_dur * (1.0 - commit_frac));
            side = -side;
            let next_phase = phase_of(i + 1, halftime_boundary, side, plan);
            let next_radius = spacing_radius(spacing_for(next_phase, plan));
            windows.push(Window {
                t0: cursor,
                t1: cursor + travel_dur,
                lineup,
                kind: WKind::Travel {
                    to_anchor: next_anchor,
                    to_radius: next_radius,
                    theta1: rng.gen_range(0.0..std::f64::consts::TAU),
                },
            });
            cursor += travel_dur;
            anchor = next_anchor;
            radius = next_radius;
        }
        actions.push(action);
    }

    // Travel-start actions begin at the previous action's commit instant.
    for i in 1..n {
        if actions[i].start_walkin.is_none() {
            actions[i].start_s = actions[i - 1].end_s;
        }
    }

    let session_end_s = cursor;
    Ok(Layout {
        windows,
        session_end_s,
        halftime_flip_s,
        actions,
    })
}

fn phase_of(
    action_idx: usize,
    halftime_boundary: Option<usize>,
    side: f64,
    plan: &SynthPlan,
) -> Phase {
    let second_half = halftime_boundary.is_some_and(|b| action_idx >= b);
    let attack_positive = plan.attack_positive_x_first_half ^ second_half;
    if (side > 0.0) == attack_positive {
        Phase::Offense
    } else {
        Phase::Defense
    }
}

fn spacing_for(phase: Phase, plan: &SynthPlan) -> f64 {
    match phase {
        Phase::Offense => plan.offense_spacing_m,
        _ => plan.defense_spacing_m,
    }
}

fn action_anchor(side: f64, rng: &mut ChaCha8Rng) -> [f64; 2] {
    [
        side * (ANCHOR_ABS_X + rng.gen_range(-ANCHOR_JITTER_X..ANCHOR_JITTER_X)),
        rng.gen_range(-ANCHOR_Y_MAX..ANCHOR_Y_MAX),
    ]
}

// ---------------------------------------------------------------------------
// Script pass
// ---------------------------------------------------------------------------

pub(crate) struct ScriptOutput {
    pub scripts: Vec<PlayerScript>,
    pub walkout_first_exit: BTreeMap<usize, f64>,
    pub walkin_last_entry: BTreeMap<usize, f64>,
    pub ft_circle_enter: BTreeMap<usize, f64>,
}

fn seat_of(player: usize) -> [f64; 2] {
    [-5.0 + player as f64 * 0.9, BENCH_Y]
}

pub(crate) fn build_scripts(
    plan: &SynthPlan,
    court: &CourtSpec,
    layout: &Layout,
) -> Result<ScriptOutput, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed ^ 0x5c41_u64);
    let half_width = court.half_width;
    let mut scripts: Vec<PlayerScript> = (0..plan.roster_size)
        .map(|p| PlayerScript::starting_at(seat_of(p)))
        .collect();
    let mut out = ScriptOutput {
        scripts: Vec::new(),
        walkout_first_exit: BTreeMap::new(),
        walkin_last_entry: BTreeMap::new(),
        ft_circle_enter: BTreeMap::new(),
    };

    for (widx, w) in layout.windows.iter().enumerate() {
        match &w.kind {
            WKind::ParkAll => {}
            WKind::WalkIn {
                anchor,
                radius,
                theta0,
            } => {
                let mut last_entry: f64 = w.t0;
                for (slot, &player) in w.lineup.iter().enumerate() {
                    let target = on_circle(
                        *anchor,
                        *radius,
                        theta0 + slot as f64 * std::f64::consts::TAU / 5.0,
                    );
                    let stage = [target[0], STAGE_Y];
                    let s = &mut scripts[player];
                    let leg1 = dist(s.end_pos(), stage) / WALK_MPS;
                    let plunge_len = dist(stage, target);
                    let leg2 = plunge_len / WALK_MPS;
                    let start = w.t1 - leg1 - leg2;
                    if start < w.t0 - 1e-6 {
                        return Err(SynthError::InfeasiblePlan(format!(
                            "walk-in window too short for a {:.0} m walk",
                            (leg1 + leg2) * WALK_MPS
                        )));
                    }
                    s.park_until(start.max(w.t0), 0.2, 0.1);
                    s.line_to(start + leg1, stage);
                    s.line_to(w.t1, target);
                    // Court entry happens on the plunge when y crosses the
                    // sideline.
                    let entry_frac = (STAGE_Y - half_width) / (STAGE_Y - target[1]);
                    let entry = (start + leg1) + leg2 * entry_frac;
                    last_entry = last_entry.max(entry);
                }
                out.walkin_last_entry.insert(widx, last_entry);
            }
            WKind::WalkOut => {
                let mut first_exit = f64::MAX;
                for (slot, &player) in w.lineup.iter().enumerate() {
                    let start = w.t0 + 0.15 * slot as f64;
                    let s = &mut scripts[player];
                    let p = s.end_pos();
                    let stage = [p[0].clamp(-12.5, 12.5), STAGE_Y];
                    let seat = seat_of(player);
                    let leg1 = dist(p, stage) / WALK_MPS;
                    let leg2 = dist(stage, seat) / WALK_MPS;
                    if start + leg1 + leg2 > w.t1 - 0.05 {
                        return Err(SynthError::InfeasiblePlan(
                            "walk-out window too short".into(),
                        ));
                    }
                    s.park_until(start, 0.15, 0.35);
                    s.line_to(start + leg1, stage);
                    s.line_to(start + leg1 + leg2, seat);
                    s.park_until(w.t1, 0.2, 0.1);
                    let exit_frac = (half_width - p[1]) / (STAGE_Y - p[1]);
                    first_exit = first_exit.min(start + leg1 * exit_frac);
                }
                out.walkout_first_exit.insert(widx, first_exit);
            }
            WKind::Hold { anchor, radius } => {
                for (slot, &player) in w.lineup.iter().enumerate() {
                    let s = &mut scripts[player];
                    let p = s.end_pos();
                    let d_now = dist(p, *anchor);
                    let r = d_now.clamp(radius - ORBIT_R_SLACK_M, radius + ORBIT_R_SLACK_M);
                    // Short connector onto the circle, then orbit.
                    let q = on_circle(*anchor, r, (p[1] - anchor[1]).atan2(p[0] - anchor[0]));
                    let gap = dist(p, q);
                    if gap > 0.05 {
                        let dur = (gap / 3.5).clamp(0.1, 0.8).min((w.t1 - w.t0) * 0.4);
                        s.line_to(w.t0 + dur, q);
                    }
                    let v_kmh = 11.5 + 0.8 * slot as f64 + rng.gen_range(-0.3..0.3);
                    let omega = (v_kmh / 3.6) / r * if slot % 2 == 0 { 1.0 } else { -1.0 };
                    s.orbit_until(
                        w.t1,
                        *anchor,
                        r,
                        omega,
                        ORBIT_WOBBLE_M,
                        0.8 + 0.12 * slot as f64,
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    );
                }
            }
            WKind::Travel {
                to_anchor,
                to_radius,
                theta1,
            } => {
                for (slot, &player) in w.lineup.iter().enumerate() {
                    let target = on_circle(
                        *to_anchor,
                        *to_radius,
                        theta1 + slot as f64 * std::f64::consts::TAU / 5.0,
                    );
                    scripts[player].line_to(w.t1, target);
                }
            }
            WKind::FreeThrow {
                circle,
                shooter_slot,
                anchor,
            } => {
                let shooter = w.lineup[*shooter_slot];
                let d_shooter = dist(scripts[shooter].end_pos(), *circle);
                let walk_to_circle =
                    FT_WALK_S * (d_shooter - court.ft_circle_radius).max(0.0) / d_shooter.max(1e-9);
                let t_cross = w.t0 + walk_to_circle;
                if w.t1 - t_cross < plan.base_params.ft_dwell_s + 1.0 {
                    return Err(SynthError::InfeasiblePlan(format!(
                        "free-throw dwell of {:.1} s leaves too little in-circle time",
                        w.t1 - w.t0
                    )));
                }
                out.ft_circle_enter.insert(widx, t_cross);
                scripts[shooter].line_to(w.t0 + FT_WALK_S, *circle);
                // Dash clear of the circle just before the window ends so the
                // flagged run closes inside it.
                let dash_s = 0.45;
                let dir = [anchor[0] - circle[0], anchor[1] - circle[1]];
                let norm = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt().max(1e-9);
                let reach = court.ft_circle_radius + 0.35;
                let exit_point = [
                    circle[0] + dir[0] / norm * reach,
                    circle[1] + dir[1] / norm * reach,
                ];
                scripts[shooter].park_until(w.t1 - dash_s, 0.22, 0.25);
                scripts[shooter].line_to(w.t1, exit_point);
                for (slot, &player) in w.lineup.iter().enumerate() {
                    if slot == *shooter_slot {
                        continue;
                    }
                    let s = &mut scripts[player];
                    let p = s.end_pos();
                    // Keep moving until the shooter reaches the circle, then
                    // stand and watch the throw.
                    let anchor_now = [p[0] - 0.5, p[1]];
                    s.orbit_until(t_cross, anchor_now, 0.5, (12.0 / 3.6) / 0.5, 0.0, 0.0, 0.0);
                    s.park_until(w.t1, 0.35, 0.7);
                }
            }
            WKind::SlowDrift { speed_kmh, .. } => {
                for (slot, &player) in w.lineup.iter().enumerate() {
                    let factor = 0.85 + 0.15 * slot as f64 / 4.0;
                    let mps = speed_kmh / 3.6 * factor;
                    scripts[player].park_until(w.t1, 0.35, mps);
                }
            }
        }
    }

    out.scripts = scripts;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Ground-truth assembly
// ---------------------------------------------------------------------------

pub(crate) fn assemble_truth(
    plan: &SynthPlan,
    layout: &Layout,
    scripts: &ScriptOutput,
) -> super::GroundTruth {
    let ms = |t: f64| -> u64 { (t * 1000.0).round() as u64 };

    #[derive(Clone, Copy)]
    enum Removal {
        FreeThrow,
        Slow,
        Bench,
    }

    // Removal intervals at base params, in time order.
    let mut removals: Vec<(f64, f64, Removal)> = Vec::new();
    let mut active_open: Option<f64> = None;
    let mut first_open: Option<f64> = None;
    let mut last_close: Option<f64> = None;
    let mut pending_bench_start: Option<f64> = None;

    for (widx, w) in layout.windows.iter().enumerate() {
        match &w.kind {
            WKind::WalkIn { .. } => {
                let entry = scripts.walkin_last_entry[&widx];
                if let Some(start) = pending_bench_start.take() {
                    removals.push((start, entry, Removal::Bench));
                }
                active_open = Some(entry);
                first_open.get_or_insert(entry);
            }
            WKind::WalkOut => {
                let exit = scripts.walkout_first_exit[&widx];
                if active_open.is_some() {
                    pending_bench_start = Some(exit);
                    last_close = Some(exit);
                }
            }
            WKind::FreeThrow { .. } => {
                removals.push((scripts.ft_circle_enter[&widx], w.t1, Removal::FreeThrow));
            }
            WKind::SlowDrift {
                removed_at_base, ..
            } if *removed_at_base => {
                removals.push((w.t0, w.t1, Removal::Slow));
            }
            _ => {}
        }
    }

    // Active intervals: [first_open, last_close] minus all removals that are
    // not the trailing bench (pending_bench_start at the post-game walk-out
    // never reopens).
    let open = first_open.unwrap_or(0.0);
    let close = last_close.unwrap_or(open);
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut cursor = open;
    for &(a, b, _) in &removals {
        if a >= close {
            break;
        }
        if a > cursor {
            intervals.push((cursor, a));
        }
        cursor = cursor.max(b);
    }
    if close > cursor {
        intervals.push((cursor, close));
    }

    let cap_s = plan.base_params.active_gap_cap_ms as f64 / 1000.0;
    let inner_gaps = intervals.len().saturating_sub(1);
    let expected_active_minutes =
        (intervals.iter().map(|(a, b)| b - a).sum::<f64>() + inner_gaps as f64 * cap_s) / 60.0;

    // Per-action spans with refined bench edges.
    let mut action_starts = Vec::with_capacity(layout.actions.len());
    let mut spans = Vec::with_capacity(layout.actions.len());
    let mut phases = Vec::with_capacity(layout.actions.len());
    let mut prev_end = 0.0;
    for a in &layout.actions {
        let start = match a.start_walkin {
            Some(widx) => scripts.walkin_last_entry[&widx],
            None => prev_end,
        };
        let end = match a.end_walkout {
            Some(widx) => scripts.walkout_first_exit[&widx],
            None => a.end_s,
        };
        action_starts.push(ms(start));
        spans.push(end - start);
        phases.push(a.phase);
        prev_end = end;
    }

    super::GroundTruth {
        session_end_ms: ms(layout.session_end_s),
        halftime_flip_ms: layout.halftime_flip_s.map(ms),
        base_params: plan.base_params,
        expected_active_minutes,
        n_actions: layout.actions.len(),
        active_intervals_ms: intervals.iter().map(|&(a, b)| (ms(a), ms(b))).collect(),
        action_starts_ms: action_starts,
        planted_spans_s: spans,
        action_phases: phases,
        removed_free_throw_ms: removals
            .iter()
            .filter(|(_, _, k)| matches!(k, Removal::FreeThrow))
            .map(|&(a, b, _)| (ms(a), ms(b)))
            .collect(),
        removed_slow_ms: removals
            .iter()
            .filter(|(_, _, k)| matches!(k, Removal::Slow))
            .map(|&(a, b, _)| (ms(a), ms(b)))
            .collect(),
        removed_bench_ms: removals
            .iter()
            .filter(|(_, _, k)| matches!(k, Removal::Bench))
            .map(|&(a, b, _)| (ms(a), ms(b)))
            .collect(),
    }
}
