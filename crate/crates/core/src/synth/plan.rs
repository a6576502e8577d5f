//! Plans for synthetic games.
//!
//! A plan is plain data: how many actions, how their durations distribute,
//! which stoppages to plant and how the team spaces itself per phase. The
//! presets below are concrete fixtures used across the test suites.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::filter::FilterParams;

use super::SynthError;

/// Distribution of planted action durations: a lognormal core plus explicit
/// outliers outside the plausibility window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationSpec {
    /// Median of the lognormal core, seconds.
    pub median_s: f64,
    /// Log-space sigma of the core.
    pub sigma_log: f64,
    /// Planted durations kept fixed (not rescaled), below the window.
    pub short_outliers_s: Vec<f64>,
    /// Planted durations kept fixed (not rescaled), above the window.
    pub long_outliers_s: Vec<f64>,
}

impl Default for DurationSpec {
    fn default() -> Self {
        DurationSpec {
            median_s: 15.66,
            sigma_log: 0.21,
            short_outliers_s: Vec::new(),
            long_outliers_s: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppageKind {
    /// Everyone leaves the floor (timeout, quarter break, dead ball).
    Bench,
    /// One player dwells in a free-throw circle while the rest stand.
    FreeThrow,
    /// All five on-court players drop below a speed level for a while.
    SlowRun,
    /// The long mid-game break; the attack direction flips across it.
    Halftime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppageSpec {
    pub kind: StoppageKind,
    /// Bench/Halftime: total off-floor window. FreeThrow: in-circle span.
    /// SlowRun: all-slow span.
    pub duration_s: f64,
    /// SlowRun only: the fastest on-court speed during the stop, km/h.
    #[serde(default)]
    pub speed_kmh: f64,
}

impl StoppageSpec {
    pub fn bench(duration_s: f64) -> Self {
        StoppageSpec {
            kind: StoppageKind::Bench,
            duration_s,
            speed_kmh: 0.0,
        }
    }

    pub fn halftime(duration_s: f64) -> Self {
        StoppageSpec {
            kind: StoppageKind::Halftime,
            duration_s,
            speed_kmh: 0.0,
        }
    }

    pub fn free_throw(dwell_s: f64) -> Self {
        StoppageSpec {
            kind: StoppageKind::FreeThrow,
            duration_s: dwell_s,
            speed_kmh: 0.0,
        }
    }

    pub fn slow_run(duration_s: f64, speed_kmh: f64) -> Self {
        StoppageSpec {
            kind: StoppageKind::SlowRun,
            duration_s,
            speed_kmh,
        }
    }
}

/// Everything needed to generate one synthetic game deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPlan {
    pub seed: u64,
    /// Target rate of distinct detection instants across the squad.
    pub sampling_hz: f64,
    pub roster_size: usize,
    pub n_actions: usize,
    pub durations: DurationSpec,
    pub stoppages: Vec<StoppageSpec>,
    /// Target mean pairwise distance while attacking, meters.
    pub offense_spacing_m: f64,
    /// Target mean pairwise distance while defending, meters.
    pub defense_spacing_m: f64,
    pub attack_positive_x_first_half: bool,
    pub pre_game_s: f64,
    pub post_game_s: f64,
    /// When set, core action durations are rescaled so the reduction at
    /// `base_params` lands on this many active minutes.
    pub target_active_minutes: Option<f64>,
    /// Thresholds the ground truth's removal expectations are computed for.
    pub base_params: FilterParams,
}

impl SynthPlan {
    pub fn from_json_str(s: &str) -> Result<Self, SynthError> {
        let plan: SynthPlan =
            serde_json::from_str(s).map_err(|e| SynthError::BadPlan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |msg: String| Err(SynthError::InfeasiblePlan(msg));
        if !self.sampling_hz.is_finite() || self.sampling_hz <= 0.0 || self.sampling_hz > 1000.0 {
            return fail(format!("sampling_hz {} out of range", self.sampling_hz));
        }
        if self.roster_size < 7 {
            return fail(format!("roster_size {} below 7", self.roster_size));
        }
        if self.n_actions == 0 {
            return fail("n_actions must be at least 1".into());
        }
        let min_action_s = 2.0 / self.sampling_hz;
        let outliers = self
            .durations
            .short_outliers_s
            .iter()
            .chain(&self.durations.long_outliers_s);
        for &d in outliers {
            if d < min_action_s.max(2.8) {
                return fail(format!(
                    "action of {d} s is shorter than two samples or the minimum 2.8 s trajectory"
                ));
            }
        }
        let n_outliers =
            self.durations.short_outliers_s.len() + self.durations.long_outliers_s.len();
        if n_outliers >= self.n_actions {
            return fail("more outlier actions than actions".into());
        }
        if !(self.durations.median_s.is_finite() && self.durations.median_s > 3.0)
            || !(self.durations.sigma_log.is_finite() && self.durations.sigma_log >= 0.0)
        {
            return fail("duration core must have median > 3 s and sigma >= 0".into());
        }
        if self.offense_spacing_m < 4.0
            || self.offense_spacing_m > 8.6
            || self.defense_spacing_m < 4.0
            || self.defense_spacing_m > 8.6
        {
            return fail("spacing targets must lie in [4.0, 8.6] m".into());
        }
        if self.pre_game_s < 15.0 || self.post_game_s < 12.0 {
            return fail(
                "pre_game_s needs >= 15 s and post_game_s >= 12 s for the walk legs".into(),
            );
        }

        let base = &self.base_params;
        let mut halftimes = 0;
        for stop in &self.stoppages {
            match stop.kind {
                StoppageKind::Halftime => {
                    halftimes += 1;
                    if stop.duration_s < 30.0 {
                        return fail("halftime shorter than 30 s".into());
                    }
                }
                StoppageKind::Bench => {
                    if stop.duration_s < 25.0 {
                        return fail(format!(
                            "bench stoppage of {} s leaves no time for the walk legs (need >= 25 s)",
                            stop.duration_s
                        ));
                    }
                }
                StoppageKind::FreeThrow => {
                    if stop.duration_s < base.ft_dwell_s + 1.5 {
                        return fail(format!(
                            "free-throw dwell {} s must exceed the {} s threshold by 1.5 s",
                            stop.duration_s, base.ft_dwell_s
                        ));
                    }
                }
                StoppageKind::SlowRun => {
                    if stop.duration_s < 0.8 {
                        return fail("slow run shorter than 0.8 s".into());
                    }
                    if (stop.duration_s - base.slow_run_s).abs() < 0.1 {
                        return fail(format!(
                            "slow-run duration {} s sits within 0.1 s of the base threshold; \
                             its removal would be ambiguous",
                            stop.duration_s
                        ));
                    }
                    if !stop.speed_kmh.is_finite() || stop.speed_kmh <= 0.0 || stop.speed_kmh > 11.2
                    {
                        return fail(format!(
                            "slow-run speed {} km/h outside (0, 11.2]",
                            stop.speed_kmh
                        ));
                    }
                    if (stop.speed_kmh - base.slow_speed_kmh).abs() < 0.09 {
                        return fail(format!(
                            "slow-run speed {} km/h sits within 0.09 km/h of the base threshold",
                            stop.speed_kmh
                        ));
                    }
                }
            }
        }
        if halftimes > 1 {
            return fail("at most one halftime stoppage".into());
        }
        if let Some(t) = self.target_active_minutes {
            if !t.is_finite() || t <= 1.0 {
                return fail(format!("target_active_minutes {t} too small"));
            }
        }
        Ok(())
    }

    /// A full regulation-scale game: 151 actions across four quarters with
    /// the usual traffic of timeouts, free throws and dead balls, tuned so
    /// the default thresholds recover about 40 active minutes.
    pub fn regulation_game(seed: u64) -> SynthPlan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_91a4);
        let mut stoppages = vec![
            StoppageSpec::halftime(900.0),
            StoppageSpec::bench(120.0),
            StoppageSpec::bench(120.0),
        ];
        for _ in 0..15 {
            stoppages.push(StoppageSpec::bench(rng.gen_range(45.0..75.0)));
        }
        for _ in 0..9 {
            stoppages.push(StoppageSpec::bench(rng.gen_range(30.0..42.0)));
        }
        for _ in 0..10 {
            stoppages.push(StoppageSpec::free_throw(rng.gen_range(12.0..14.5)));
        }
        for _ in 0..14 {
            stoppages.push(StoppageSpec::slow_run(
                rng.gen_range(3.2..7.5),
                rng.gen_range(4.5..7.0),
            ));
        }
        for _ in 0..6 {
            stoppages.push(StoppageSpec::slow_run(
                rng.gen_range(1.4..2.2),
                rng.gen_range(4.5..7.0),
            ));
        }
        SynthPlan {
            seed,
            sampling_hz: 80.0,
            roster_size: 12,
            n_actions: 151,
            durations: DurationSpec {
                median_s: 15.66,
                sigma_log: 0.21,
                short_outliers_s: vec![3.0, 3.4],
                long_outliers_s: vec![40.5, 43.0],
            },
            stoppages,
            offense_spacing_m: 8.0,
            defense_spacing_m: 6.2,
            attack_positive_x_first_half: true,
            pre_game_s: 300.0,
            post_game_s: 240.0,
            target_active_minutes: Some(40.0),
            base_params: FilterParams::default(),
        }
    }

    /// A light game with a pronounced offense/defense spacing gap, for
    /// directional statistics checks.
    pub fn spacing_probe(seed: u64) -> SynthPlan {
        SynthPlan {
            seed,
            sampling_hz: 80.0,
            roster_size: 10,
            n_actions: 30,
            durations: DurationSpec {
                median_s: 12.0,
                sigma_log: 0.18,
                short_outliers_s: Vec::new(),
                long_outliers_s: Vec::new(),
            },
            stoppages: vec![StoppageSpec::halftime(300.0)],
            offense_spacing_m: 8.4,
            defense_spacing_m: 5.6,
            attack_positive_x_first_half: true,
            pre_game_s: 20.0,
            post_game_s: 15.0,
            target_active_minutes: None,
            base_params: FilterParams::default(),
        }
    }

    /// A couple of minutes of play exercising every stoppage type; small
    /// enough for command-line round-trip tests.
    pub fn two_minute_demo(seed: u64) -> SynthPlan {
        SynthPlan {
            seed,
            sampling_hz: 80.0,
            roster_size: 9,
            n_actions: 6,
            durations: DurationSpec {
                median_s: 10.0,
                sigma_log: 0.15,
                short_outliers_s: Vec::new(),
                long_outliers_s: Vec::new(),
            },
            stoppages: vec![
                StoppageSpec::bench(35.0),
                StoppageSpec::free_throw(12.5),
                StoppageSpec::slow_run(4.0, 6.0),
            ],
            offense_spacing_m: 7.8,
            defense_spacing_m: 6.0,
            attack_positive_x_first_half: true,
            pre_game_s: 16.0,
            post_game_s: 12.0,
            target_active_minutes: None,
            base_params: FilterParams::default(),
        }
    }
}
