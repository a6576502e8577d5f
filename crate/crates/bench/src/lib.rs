//! Benchmark fixtures: mid-size sessions built once and shared across
//! benchmark groups.

use hooptrack_core::court::CourtSpec;
use hooptrack_core::ingest::GameTimeline;
use hooptrack_core::synth::builder::TimelineBuilder;
use hooptrack_core::synth::{generate, SynthGame, SynthPlan};

/// A scripted session of roughly `minutes` minutes at 40 Hz, alternating
/// possessions with planted free throws and slow stretches.
pub fn scripted_session(minutes: u64) -> GameTimeline {
    let mut b = TimelineBuilder::with(CourtSpec::default(), 25, 10);
    let cycle_ms = 60_000u64;
    for i in 0..minutes {
        let side = if i % 2 == 0 { 1.0 } else { -1.0 };
        b.active(cycle_ms / 2 - 8_000, side * 7.0, 12.0)
            .active(6_000, side * 7.0, 5.0)
            .active(cycle_ms / 2 - 12_000, -side * 7.0, 12.5)
            .ft_dwell(12_000, -side, 3.0)
            .off_court(2_000);
    }
    b.build()
}

/// A generated two-minute game, for merge and parse benchmarks.
pub fn demo_game() -> SynthGame {
    generate(&SynthPlan::two_minute_demo(9), &CourtSpec::default()).expect("demo plan generates")
}
