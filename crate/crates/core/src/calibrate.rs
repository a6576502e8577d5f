//! Threshold calibration: sweep the (speed, run-duration) grid and pick the
//! cell whose active minutes land closest to a regulation target.
//!
//! The lineup and free-throw passes do not depend on the swept thresholds,
//! so they run once; each cell then replays only the slow-run pass over a
//! precomputed per-frame max-speed profile. Cells are independent and are
//! evaluated in parallel; assembly order is fixed, so repeated sweeps are
//! identical.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::court::CourtSpec;
use crate::filter::{
    active_minutes, post_free_throw_profile, retained_ms_for_thresholds, FilterParams,
};
use crate::ingest::GameTimeline;

#[derive(Debug, Error, PartialEq)]
pub enum CalibrateError {
    #[error("empty calibration grid")]
    EmptyGrid,
    #[error("bad grid range: {0}")]
    BadRange(String),
}

/// Axes of the sweep. `speed_kmh` is the h2 axis, `run_s` the h3 axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub speed_kmh: Vec<f64>,
    pub run_s: Vec<f64>,
}

impl Default for GridSpec {
    /// 8 to 11 km/h by 0.2 and 1 to 4 s by 0.25: speeds below 8 km/h are
    /// walking pace and runs under 1 s occur inside live play, while the
    /// 0.2 km/h step still resolves per-game optima exactly.
    fn default() -> Self {
        GridSpec {
            speed_kmh: axis(8.0, 11.0, 0.2).expect("static range"),
            run_s: axis(1.0, 4.0, 0.25).expect("static range"),
        }
    }
}

impl GridSpec {
    pub fn from_ranges(
        speed: (f64, f64, f64),
        run: (f64, f64, f64),
    ) -> Result<Self, CalibrateError> {
        Ok(GridSpec {
            speed_kmh: axis(speed.0, speed.1, speed.2)?,
            run_s: axis(run.0, run.1, run.2)?,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.speed_kmh.is_empty() || self.run_s.is_empty()
    }
}

/// Inclusive arithmetic axis, rounded to a milli-unit grid so printed values
/// stay clean.
pub fn axis(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CalibrateError> {
    if !step.is_finite() || step <= 0.0 || !min.is_finite() || !max.is_finite() {
        return Err(CalibrateError::BadRange(format!(
            "min {min}, max {max}, step {step}"
        )));
    }
    if max < min {
        return Err(CalibrateError::BadRange(format!("max {max} < min {min}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((min + i as f64 * step) * 1000.0).round() / 1000.0)
        .collect())
}

/// Active minutes per grid cell, rows indexed by speed threshold, columns by
/// run-duration threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationGrid {
    pub speed_kmh: Vec<f64>,
    pub run_s: Vec<f64>,
    /// `cells[i][j]` = active minutes at (speed_kmh[i], run_s[j]).
    pub cells: Vec<Vec<f64>>,
}

/// Evaluate active minutes over the whole grid.
pub fn sweep_grid(
    timeline: &GameTimeline,
    court: &CourtSpec,
    base: &FilterParams,
    grid: &GridSpec,
) -> Result<CalibrationGrid, CalibrateError> {
    if grid.is_empty() {
        return Err(CalibrateError::EmptyGrid);
    }
    let (ms, max_kmh) = post_free_throw_profile(timeline, court, base);

    let cells: Vec<Vec<f64>> = grid
        .speed_kmh
        .par_iter()
        .map(|&speed| {
            grid.run_s
                .iter()
                .map(|&run| {
                    let params = FilterParams {
                        slow_speed_kmh: speed,
                        slow_run_s: run,
                        ..*base
                    };
                    let retained = retained_ms_for_thresholds(&ms, &max_kmh, &params);
                    active_minutes(retained, base.active_gap_cap_ms)
                })
                .collect()
        })
        .collect();

    Ok(CalibrationGrid {
        speed_kmh: grid.speed_kmh.clone(),
        run_s: grid.run_s.clone(),
        cells,
    })
}

/// The cell recommended for a game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub speed_kmh: f64,
    pub run_s: f64,
    pub active_minutes: f64,
    pub target_minutes: f64,
}

/// Pick the cell whose active minutes sit closest to the target.
///
/// Ties break toward the center of the grid ranges (9.5 km/h, 2.5 s on the
/// default grid), then toward lower thresholds, so the choice is total.
pub fn recommend(
    grid: &CalibrationGrid,
    target_minutes: f64,
) -> Result<Recommendation, CalibrateError> {
    if grid.speed_kmh.is_empty() || grid.run_s.is_empty() {
        return Err(CalibrateError::EmptyGrid);
    }
    let center_speed = (grid.speed_kmh[0] + grid.speed_kmh[grid.speed_kmh.len() - 1]) / 2.0;
    let center_run = (grid.run_s[0] + grid.run_s[grid.run_s.len() - 1]) / 2.0;
    let speed_span = (grid.speed_kmh[grid.speed_kmh.len() - 1] - grid.speed_kmh[0]).max(1e-9);
    let run_span = (grid.run_s[grid.run_s.len() - 1] - grid.run_s[0]).max(1e-9);

    let mut best: Option<(f64, f64, usize, usize)> = None;
    for (i, &speed) in grid.speed_kmh.iter().enumerate() {
        for (j, &run) in grid.run_s.iter().enumerate() {
            let miss = (grid.cells[i][j] - target_minutes).abs();
            let ds = (speed - center_speed) / speed_span;
            let dr = (run - center_run) / run_span;
            let off_center = ds * ds + dr * dr;
            let candidate = (miss, off_center, i, j);
            let better = match best {
                None => true,
                Some(b) => (candidate.0, candidate.1) < (b.0, b.1),
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    let (_, _, i, j) = best.expect("grid is non-empty");
    Ok(Recommendation {
        speed_kmh: grid.speed_kmh[i],
        run_s: grid.run_s[j],
        active_minutes: grid.cells[i][j],
        target_minutes,
    })
}

/// Long-format contour export: one `h2,h3,active_minutes` row per cell.
pub fn write_contour<W: Write>(grid: &CalibrationGrid, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "h2,h3,active_minutes")?;
    for (i, &speed) in grid.speed_kmh.iter().enumerate() {
        for (j, &run) in grid.run_s.iter().enumerate() {
            writeln!(out, "{},{},{:.4}", speed, run, grid.cells[i][j])?;
        }
    }
    Ok(())
}
