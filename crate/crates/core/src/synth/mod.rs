//! Synthetic games with exact ground truth.
//!
//! Real tracking data is proprietary, so the pipeline is validated against
//! generated sessions where every planted quantity is known: which wall
//! intervals are active play, where each free-throw dwell and slow run sits,
//! where the actions change sides, and how the team spaces itself per phase.
//! Generation is deterministic per seed, down to the emitted bytes.

mod emit;
mod motion;
mod plan;
mod schedule;

pub mod builder;

pub use plan::{DurationSpec, StoppageKind, StoppageSpec, SynthPlan};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::court::CourtSpec;
use crate::filter::FilterParams;
use crate::ingest::{
    merge_timeline, GameMetadata, GameTimeline, Manifest, ManifestEntry, RawRecord,
};
use crate::segment::Phase;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible plan: {0}")]
    InfeasiblePlan(String),
    #[error("bad plan: {0}")]
    BadPlan(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Everything the generator knows about the session it produced, at the
/// plan's base thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub session_end_ms: u64,
    /// Instant of the attack-direction swap, inside the half-time gap.
    pub halftime_flip_ms: Option<u64>,
    pub base_params: FilterParams,
    /// What the reduction's gap-capped active minutes should come to.
    pub expected_active_minutes: f64,
    pub n_actions: usize,
    /// Wall intervals expected to survive the reduction.
    pub active_intervals_ms: Vec<(u64, u64)>,
    /// Expected start of each action's retained span.
    pub action_starts_ms: Vec<u64>,
    /// Expected recovered duration of each action, seconds.
    pub planted_spans_s: Vec<f64>,
    /// Offense/defense of each action at its opening instant.
    pub action_phases: Vec<Phase>,
    /// Intervals the free-throw pass should drop.
    pub removed_free_throw_ms: Vec<(u64, u64)>,
    /// Intervals the slow-run pass should drop at base thresholds.
    pub removed_slow_ms: Vec<(u64, u64)>,
    /// Off-floor intervals the lineup pass should drop (between walk-out and
    /// walk-in; pre/post-game tails are outside the active range entirely).
    pub removed_bench_ms: Vec<(u64, u64)>,
}

/// A generated game: per-player record streams plus the ground truth and a
/// ready-made manifest.
#[derive(Debug, Clone)]
pub struct SynthGame {
    pub plan: SynthPlan,
    pub records: BTreeMap<String, Vec<RawRecord>>,
    pub truth: GroundTruth,
    pub manifest: Manifest,
}

/// Generate a game. Deterministic for a fixed plan (including its seed).
pub fn generate(plan: &SynthPlan, court: &CourtSpec) -> Result<SynthGame, SynthError> {
    plan.validate()?;
    let layout = schedule::build_layout(plan, court)?;
    let scripts = schedule::build_scripts(plan, court, &layout)?;
    let truth = schedule::assemble_truth(plan, &layout, &scripts);
    let records = emit::emit_records(plan, court, &layout, &scripts.scripts);

    let manifest = Manifest {
        team: "synthetic".into(),
        date: format!("seed-{}", plan.seed),
        delimiter: None,
        players: records
            .keys()
            .map(|id| ManifestEntry {
                player_id: id.clone(),
                file: format!("{id}.csv"),
            })
            .collect(),
    };
    Ok(SynthGame {
        plan: plan.clone(),
        records,
        truth,
        manifest,
    })
}

impl SynthGame {
    /// Merge the generated record streams into the wide timeline.
    pub fn timeline(&self) -> GameTimeline {
        merge_timeline(
            &self.records,
            GameMetadata {
                team: self.manifest.team.clone(),
                date: self.manifest.date.clone(),
            },
        )
        .expect("generated games always have players")
    }

    /// Render one player's record file in the ingest format.
    pub fn render_record_file(&self, player_id: &str) -> Option<String> {
        let records = self.records.get(player_id)?;
        let mut text = String::with_capacity(records.len() * 24 + 16);
        text.push_str("label,ms,value\n");
        for r in records {
            let label = match r.label {
                crate::ingest::RecordLabel::PosX => "pos_x",
                crate::ingest::RecordLabel::PosY => "pos_y",
                crate::ingest::RecordLabel::VelX => "vel_x",
                crate::ingest::RecordLabel::VelY => "vel_y",
                crate::ingest::RecordLabel::PosZ => "pos_z",
                crate::ingest::RecordLabel::AccX => "acc_x",
                crate::ingest::RecordLabel::AccY => "acc_y",
                crate::ingest::RecordLabel::AccZ => "acc_z",
            };
            text.push_str(&format!("{label},{},{}\n", r.ms, r.value));
        }
        Some(text)
    }

    /// Write the record files, manifest and ground truth into a directory.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), SynthError> {
        std::fs::create_dir_all(dir)?;
        for id in self.records.keys() {
            let text = self.render_record_file(id).expect("known player");
            std::fs::write(dir.join(format!("{id}.csv")), text)?;
        }
        let mut manifest_file = std::fs::File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(&mut manifest_file, &self.manifest)
            .map_err(|e| SynthError::BadPlan(e.to_string()))?;
        manifest_file.write_all(b"\n")?;
        let mut truth_file = std::fs::File::create(dir.join("ground_truth.json"))?;
        serde_json::to_writer_pretty(&mut truth_file, &self.truth)
            .map_err(|e| SynthError::BadPlan(e.to_string()))?;
        truth_file.write_all(b"\n")?;
        Ok(())
    }
}
