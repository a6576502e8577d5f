//! Descriptive statistics of the reduced timeline.
//!
//! Per frame: mean pairwise distance among the on-court five, their convex
//! hull area, and their mean speed. Distributions are reported separately
//! for offense and defense frames (transition rows are excluded from the
//! split), plus action-duration summaries and a side-by-side comparison
//! against an externally supplied reference list.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::court::{convex_hull_area, kmh, pair_distance, speed};
use crate::filter::ActivePlay;
use crate::segment::Phase;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("histogram bins do not match: {0}")]
    BinMismatch(String),
    #[error("bad reference list at line {line}: {reason}")]
    BadReference { line: usize, reason: String },
}

/// Spacing and velocity measurements for one retained frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMetrics {
    /// Mean distance over the n^2 - n ordered pairs of on-court players,
    /// in meters. Identical to the unordered-pair mean.
    pub d_avg_m: f64,
    /// Convex hull area of the on-court five, in square meters.
    pub con_hull_m2: f64,
    /// Mean speed of the on-court five, in km/h.
    pub vel_avg_kmh: f64,
    pub phase: Phase,
}

/// Compute per-frame metrics; bench players never contribute.
pub fn compute_frame_metrics(active: &ActivePlay, labels: &[Phase]) -> Vec<FrameMetrics> {
    debug_assert_eq!(labels.len(), active.len());
    (0..active.len())
        .map(|i| {
            let positions = active.court_positions(i);
            // Sum the 10 unordered distances and count each twice: the 20
            // ordered pairs share the same mean exactly.
            let mut unordered_sum = 0.0;
            for a in 0..5 {
                for b in (a + 1)..5 {
                    unordered_sum += pair_distance(positions[a], positions[b]);
                }
            }
            let d_avg_m = (2.0 * unordered_sum) / 20.0;

            let frame = &active.timeline.frames[i];
            let mut speed_sum = 0.0;
            for p in active.on_court[i] {
                speed_sum += kmh(speed(frame.players[p].vel));
            }

            FrameMetrics {
                d_avg_m,
                con_hull_m2: convex_hull_area(&positions).m2,
                vel_avg_kmh: speed_sum / 5.0,
                phase: labels[i],
            }
        })
        .collect()
}

/// Fixed-width histogram anchored at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// Bin edges; `counts[i]` covers `[edges[i], edges[i+1])`.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn build(values: &[f64], bin_width: f64) -> Histogram {
        if values.is_empty() {
            return Histogram {
                bin_width,
                edges: Vec::new(),
                counts: Vec::new(),
            };
        }
        let max = values.iter().fold(0.0f64, |a, &b| a.max(b));
        let n_bins = (max / bin_width).floor() as usize + 1;
        let mut counts = vec![0u64; n_bins];
        for &v in values {
            let idx = ((v / bin_width).floor() as usize).min(n_bins - 1);
            counts[idx] += 1;
        }
        let edges = (0..=n_bins).map(|i| i as f64 * bin_width).collect();
        Histogram {
            bin_width,
            edges,
            counts,
        }
    }
}

/// Location summary plus histogram for one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub histogram: Histogram,
}

/// Quantile with the midpoint convention: when p·n lands on an integer k,
/// average the k-th and (k+1)-th order statistics, otherwise take the one
/// the position falls into. Even-sized medians are midpoints, and golden
/// outputs stay reproducible.
fn quantile_midpoint(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let h = p * n as f64;
    let k = h.floor();
    if (h - k).abs() < 1e-12 {
        let k = k as usize;
        if k == 0 {
            return sorted[0];
        }
        if k >= n {
            return sorted[n - 1];
        }
        (sorted[k - 1] + sorted[k]) / 2.0
    } else {
        sorted[(h.ceil() as usize - 1).min(n - 1)]
    }
}

/// Summarize a sample; None when it is empty.
pub fn summarize(values: &[f64], bin_width: f64) -> Option<DistributionSummary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Some(DistributionSummary {
        n: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        median: quantile_midpoint(&sorted, 0.5),
        q25: quantile_midpoint(&sorted, 0.25),
        q75: quantile_midpoint(&sorted, 0.75),
        histogram: Histogram::build(&sorted, bin_width),
    })
}

/// Histogram bin widths per metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StatsBins {
    pub distance_m: f64,
    pub hull_m2: f64,
    pub velocity_kmh: f64,
    pub duration_s: f64,
}

impl Default for StatsBins {
    fn default() -> Self {
        StatsBins {
            distance_m: 1.0,
            hull_m2: 5.0,
            velocity_kmh: 0.5,
            duration_s: 2.0,
        }
    }
}

/// The three per-frame metrics summarized for one phase class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummaries {
    pub d_avg: DistributionSummary,
    pub con_hull: DistributionSummary,
    pub vel_avg: DistributionSummary,
}

/// Offense/defense split; a class with no frames is absent, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummaries {
    pub offense: Option<MetricSummaries>,
    pub defense: Option<MetricSummaries>,
}

pub fn summarize_by_phase(metrics: &[FrameMetrics], bins: &StatsBins) -> PhaseSummaries {
    let class = |phase: Phase| -> Option<MetricSummaries> {
        let selected: Vec<&FrameMetrics> = metrics.iter().filter(|m| m.phase == phase).collect();
        if selected.is_empty() {
            return None;
        }
        let pick =
            |f: fn(&FrameMetrics) -> f64| -> Vec<f64> { selected.iter().map(|m| f(m)).collect() };
        Some(MetricSummaries {
            d_avg: summarize(&pick(|m| m.d_avg_m), bins.distance_m)?,
            con_hull: summarize(&pick(|m| m.con_hull_m2), bins.hull_m2)?,
            vel_avg: summarize(&pick(|m| m.vel_avg_kmh), bins.velocity_kmh)?,
        })
    };
    PhaseSummaries {
        offense: class(Phase::Offense),
        defense: class(Phase::Defense),
    }
}

/// Shares of action durations below 10 s, in the closed 10-20 s band, and
/// above 20 s. They sum to 1 on any non-empty duration list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandShares {
    pub below_10s: f64,
    pub from_10_to_20s: f64,
    pub above_20s: f64,
}

/// Action-duration distribution with the three reporting bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationStats {
    pub count: usize,
    pub summary: Option<DistributionSummary>,
    pub bands: BandShares,
}

pub fn duration_stats(durations_s: &[f64], bin_width_s: f64) -> DurationStats {
    let n = durations_s.len();
    let share = |pred: &dyn Fn(f64) -> bool| -> f64 {
        if n == 0 {
            0.0
        } else {
            durations_s.iter().filter(|&&d| pred(d)).count() as f64 / n as f64
        }
    };
    DurationStats {
        count: n,
        summary: summarize(durations_s, bin_width_s),
        bands: BandShares {
            below_10s: share(&|d| d < 10.0),
            from_10_to_20s: share(&|d| (10.0..=20.0).contains(&d)),
            above_20s: share(&|d| d > 20.0),
        },
    }
}

/// Side-by-side deltas (computed minus reference). Carries no pass/fail
/// judgment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mean_delta: f64,
    pub median_delta: f64,
    pub q25_delta: f64,
    pub q75_delta: f64,
    pub band_deltas: BandShares,
}

pub fn compare_with_reference(
    computed: &DurationStats,
    reference: &DurationStats,
) -> Result<ComparisonReport, StatsError> {
    let (c, r) = match (&computed.summary, &reference.summary) {
        (Some(c), Some(r)) => (c, r),
        _ => {
            return Err(StatsError::BinMismatch(
                "cannot compare empty distributions".into(),
            ))
        }
    };
    if (c.histogram.bin_width - r.histogram.bin_width).abs() > 1e-12 {
        return Err(StatsError::BinMismatch(format!(
            "bin width {} vs {}",
            c.histogram.bin_width, r.histogram.bin_width
        )));
    }
    Ok(ComparisonReport {
        mean_delta: c.mean - r.mean,
        median_delta: c.median - r.median,
        q25_delta: c.q25 - r.q25,
        q75_delta: c.q75 - r.q75,
        band_deltas: BandShares {
            below_10s: computed.bands.below_10s - reference.bands.below_10s,
            from_10_to_20s: computed.bands.from_10_to_20s - reference.bands.from_10_to_20s,
            above_20s: computed.bands.above_20s - reference.bands.above_20s,
        },
    })
}

/// Read an external reference list: one duration (seconds) per line, blank
/// lines and `#` comments skipped.
pub fn read_reference_list<R: Read>(source: R) -> Result<Vec<f64>, StatsError> {
    let mut values = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line.map_err(|e| StatsError::BadReference {
            line: i + 1,
            reason: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|_| StatsError::BadReference {
            line: i + 1,
            reason: format!("'{trimmed}' is not a number"),
        })?;
        if !v.is_finite() || v < 0.0 {
            return Err(StatsError::BadReference {
                line: i + 1,
                reason: format!("duration {v} out of range"),
            });
        }
        values.push(v);
    }
    Ok(values)
}

/// Long-format histogram export: metric, phase, bin bounds, count.
pub fn write_histograms<W: Write>(
    phases: &PhaseSummaries,
    durations: &DurationStats,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "metric,phase,bin_lo,bin_hi,count")?;
    let mut dump = |metric: &str, phase: &str, h: &Histogram| -> std::io::Result<()> {
        for (i, &count) in h.counts.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                metric,
                phase,
                h.edges[i],
                h.edges[i + 1],
                count
            )?;
        }
        Ok(())
    };
    for (phase_name, class) in [("O", &phases.offense), ("D", &phases.defense)] {
        if let Some(class) = class {
            dump("d_avg_m", phase_name, &class.d_avg.histogram)?;
            dump("con_hull_m2", phase_name, &class.con_hull.histogram)?;
            dump("vel_avg_kmh", phase_name, &class.vel_avg.histogram)?;
        }
    }
    if let Some(summary) = &durations.summary {
        dump("duration_s", "all", &summary.histogram)?;
    }
    Ok(())
}
