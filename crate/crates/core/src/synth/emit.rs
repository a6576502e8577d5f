//! Tick sampling: motion scripts to per-player sensor records.
//!
//! Detection instants arrive at the plan's nominal rate with ±30% jitter,
//! and different players are recorded at different instants: each tick
//! samples the round-robin pick from the current window's lineup plus,
//! every other tick, one roster player. Positions are quantized to the
//! centimeter and velocities carry bounded noise, the way a tracking stack
//! would deliver them.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::court::CourtSpec;
use crate::ingest::{RawRecord, RecordLabel};

use super::motion::PlayerScript;
use super::plan::SynthPlan;
use super::schedule::Layout;

fn quantize(v: f64, step: f64) -> f64 {
    (v / step).round() * step
}

pub(crate) fn emit_records(
    plan: &SynthPlan,
    court: &CourtSpec,
    layout: &Layout,
    scripts: &[PlayerScript],
) -> BTreeMap<String, Vec<RawRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed ^ 0xe317_u64);
    let k = plan.roster_size;
    let y_shift = match court.y_origin {
        crate::court::YOrigin::Center => 0.0,
        crate::court::YOrigin::Corner => court.half_width,
    };

    let mut per_player: Vec<Vec<RawRecord>> = vec![Vec::new(); k];
    let dt = 1.0 / plan.sampling_hz;
    let mut t = dt;
    let mut tick: usize = 0;
    let mut widx = 0usize;
    let mut prev_ms = 0u64;

    while t < layout.session_end_s {
        while widx + 1 < layout.windows.len() && layout.windows[widx].t1 <= t {
            widx += 1;
        }
        let window = &layout.windows[widx];
        let ms = (t * 1000.0).round() as u64;
        if ms > prev_ms {
            prev_ms = ms;
            let primary = window.lineup[tick % 5];
            let secondary = if tick.is_multiple_of(2) {
                let p = (tick / 2) % k;
                (p != primary).then_some(p)
            } else {
                None
            };
            for player in std::iter::once(primary).chain(secondary) {
                let (pos, vel) = scripts[player].eval(t);
                let records = &mut per_player[player];
                records.push(RawRecord {
                    label: RecordLabel::PosX,
                    ms,
                    value: quantize(pos[0] + rng.gen_range(-0.01..0.01), 0.01),
                });
                records.push(RawRecord {
                    label: RecordLabel::PosY,
                    ms,
                    value: quantize(pos[1] + y_shift + rng.gen_range(-0.01..0.01), 0.01),
                });
                records.push(RawRecord {
                    label: RecordLabel::VelX,
                    ms,
                    value: quantize(vel[0] + rng.gen_range(-0.015..0.015), 0.001),
                });
                records.push(RawRecord {
                    label: RecordLabel::VelY,
                    ms,
                    value: quantize(vel[1] + rng.gen_range(-0.015..0.015), 0.001),
                });
                // Vertical and acceleration channels appear in real feeds;
                // they must survive parsing and vanish in the merge.
                if tick.is_multiple_of(97) {
                    records.push(RawRecord {
                        label: RecordLabel::PosZ,
                        ms,
                        value: quantize(0.3 + rng.gen_range(-0.1..0.1), 0.01),
                    });
                }
                if tick.is_multiple_of(131) {
                    records.push(RawRecord {
                        label: RecordLabel::AccX,
                        ms,
                        value: quantize(rng.gen_range(-2.0..2.0), 0.01),
                    });
                }
            }
        }
        t += dt * (1.0 + 0.3 * rng.gen_range(-1.0..1.0));
        tick += 1;
    }

    (0..k)
        .map(|p| (player_id(p), std::mem::take(&mut per_player[p])))
        .collect()
}

pub(crate) fn player_id(index: usize) -> String {
    format!("p{index:02}")
}
