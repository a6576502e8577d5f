//! Scripted desk-scale timelines.
//!
//! Where the full generator produces physically coherent sessions, this
//! builder produces exactly-controlled ones: frames on a fixed millisecond
//! grid, velocities set directly, blocks that teleport between appended
//! states. That makes boundary cases (a dwell of exactly the threshold, a
//! run one frame short) constructible to the millisecond, which the oracle
//! suites need.

use crate::court::CourtSpec;
use crate::ingest::{GameFrame, GameMetadata, GameTimeline, PlayerState};

/// Appends fixed-grid blocks of frames. A block of duration `d` contributes
/// frames at `t, t+dt, ..., t+d-dt`, so consecutive blocks stay seamless on
/// the grid and a flagged block's wall-clock span is `d - dt`.
#[derive(Debug, Clone)]
pub struct TimelineBuilder {
    court: CourtSpec,
    dt_ms: u64,
    cursor_ms: u64,
    roster_size: usize,
    frames: Vec<GameFrame>,
}

impl TimelineBuilder {
    pub fn new() -> Self {
        Self::with(CourtSpec::default(), 25, 7)
    }

    pub fn with(court: CourtSpec, dt_ms: u64, roster_size: usize) -> Self {
        assert!(dt_ms > 0);
        assert!(roster_size >= 5);
        TimelineBuilder {
            court,
            dt_ms,
            cursor_ms: 0,
            roster_size,
            frames: Vec::new(),
        }
    }

    pub fn cursor_ms(&self) -> u64 {
        self.cursor_ms
    }

    pub fn dt_ms(&self) -> u64 {
        self.dt_ms
    }

    fn bench_state(&self, idx: usize) -> PlayerState {
        PlayerState {
            pos: [
                self.court.half_length + 1.25,
                self.court.half_width + 1.48 + 0.3 * idx as f64,
            ],
            vel: [0.0, 0.0],
            last_update_ms: self.cursor_ms,
            observed: true,
        }
    }

    fn push_block(&mut self, dur_ms: u64, on_court: impl Fn(usize) -> Option<PlayerState>) {
        let start = self.cursor_ms;
        let mut t = start;
        while t < start + dur_ms {
            let players = (0..self.roster_size)
                .map(|i| {
                    on_court(i)
                        .map(|mut p| {
                            p.last_update_ms = t;
                            p
                        })
                        .unwrap_or_else(|| self.bench_state(i))
                })
                .collect();
            self.frames.push(GameFrame { ms: t, players });
            t += self.dt_ms;
        }
        self.cursor_ms = start + dur_ms;
    }

    /// Five on-court players around `center_x`, each moving at the speed
    /// from `speeds_kmh` (velocity channels set directly).
    pub fn active_speeds(&mut self, dur_ms: u64, center_x: f64, speeds_kmh: [f64; 5]) -> &mut Self {
        // All offsets keep |y| >= 2.1 m so no formation member can sit inside
        // a free-throw circle, whatever the block's center.
        let offsets = [
            [-1.4, -2.8],
            [0.9, -2.1],
            [-0.5, 2.2],
            [1.6, 2.6],
            [-0.6, 3.0],
        ];
        self.push_block(dur_ms, move |i| {
            (i < 5).then(|| PlayerState {
                pos: [center_x + offsets[i][0], offsets[i][1]],
                vel: [speeds_kmh[i] / 3.6, 0.0],
                last_update_ms: 0,
                observed: true,
            })
        });
        self
    }

    /// All five at a common speed.
    pub fn active(&mut self, dur_ms: u64, center_x: f64, speed_kmh: f64) -> &mut Self {
        self.active_speeds(dur_ms, center_x, [speed_kmh; 5])
    }

    /// Player 0 parked in the free-throw circle on the given side while the
    /// other four stand around it.
    pub fn ft_dwell(&mut self, dur_ms: u64, side: f64, others_speed_kmh: f64) -> &mut Self {
        let circle_x = self.court.ft_circle_center_abs_x * side;
        let offsets = [
            [0.0, 0.0],
            [-2.6, -2.2],
            [-2.4, 2.3],
            [2.5, -2.0],
            [2.3, 2.4],
        ];
        self.push_block(dur_ms, move |i| {
            (i < 5).then(|| PlayerState {
                pos: [circle_x + offsets[i][0], offsets[i][1]],
                vel: [if i == 0 { 0.1 } else { others_speed_kmh / 3.6 }, 0.0],
                last_update_ms: 0,
                observed: true,
            })
        });
        self
    }

    /// `n_on_court` players inside the court (everyone else benched).
    pub fn partial_lineup(&mut self, dur_ms: u64, n_on_court: usize, center_x: f64) -> &mut Self {
        assert!(n_on_court <= self.roster_size);
        self.push_block(dur_ms, move |i| {
            (i < n_on_court).then_some(PlayerState {
                pos: [center_x + i as f64 * 0.7, i as f64 - 2.0],
                vel: [3.4, 0.0],
                last_update_ms: 0,
                observed: true,
            })
        });
        self
    }

    /// Everyone off the floor.
    pub fn off_court(&mut self, dur_ms: u64) -> &mut Self {
        self.push_block(dur_ms, |_| None);
        self
    }

    /// Advance the clock without emitting frames.
    pub fn gap(&mut self, dur_ms: u64) -> &mut Self {
        self.cursor_ms += dur_ms;
        self
    }

    pub fn build(&self) -> GameTimeline {
        GameTimeline {
            frames: self.frames.clone(),
            roster: (0..self.roster_size).map(|i| format!("p{i:02}")).collect(),
            metadata: GameMetadata {
                team: "scripted".into(),
                date: String::new(),
            },
        }
    }
}

impl Default for TimelineBuilder {
    fn default() -> Self {
        Self::new()
    }
}
