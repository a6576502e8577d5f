//! Court model and geometric primitives.
//!
//! Everything downstream of ingestion reasons in court coordinates: meters,
//! x along the court length measured from the half-court line, y along the
//! width. All predicates treat region boundaries as inside, so measurement
//! jitter at a painted line never flips a frame's classification.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CourtError {
    #[error("invalid court spec: {0}")]
    InvalidSpec(String),
    #[error("mean position requires exactly 5 positions, got {0}")]
    NotFivePositions(usize),
}

/// Which convention the input y coordinates follow.
///
/// `Center` puts y = 0 on the court's long axis (y spans ±half_width).
/// `Corner` puts y = 0 on one sideline (y spans 0..2·half_width); inputs are
/// shifted internally so all geometry runs in the centered frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YOrigin {
    #[default]
    Center,
    Corner,
}

/// Court geometry and orientation.
///
/// Defaults describe a FIBA 28 m x 15 m court centered on the half-court
/// line, with free-throw circles of radius 1.8 m centered 8.2 m from
/// mid-court on each side, and a ±4 m transition band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CourtSpec {
    /// Half the court length: x spans ±half_length. Default 14.0.
    pub half_length: f64,
    /// Half the court width: centered y spans ±half_width. Default 7.5.
    pub half_width: f64,
    /// |x| of each free-throw circle center. Default 8.2.
    pub ft_circle_center_abs_x: f64,
    /// Free-throw circle radius. Default 1.8.
    pub ft_circle_radius: f64,
    /// Half-width of the transition band around the half-court line. Default 4.0.
    pub transition_half_width: f64,
    /// Whether the tracked team attacks positive x in the first half.
    pub attack_positive_x_first_half: bool,
    /// Coordinate convention of incoming y values.
    pub y_origin: YOrigin,
}

impl Default for CourtSpec {
    fn default() -> Self {
        CourtSpec {
            half_length: 14.0,
            half_width: 7.5,
            ft_circle_center_abs_x: 8.2,
            ft_circle_radius: 1.8,
            transition_half_width: 4.0,
            attack_positive_x_first_half: true,
            y_origin: YOrigin::Center,
        }
    }
}

impl CourtSpec {
    pub fn validate(&self) -> Result<(), CourtError> {
        let positive = [
            ("half_length", self.half_length),
            ("half_width", self.half_width),
            ("ft_circle_center_abs_x", self.ft_circle_center_abs_x),
            ("ft_circle_radius", self.ft_circle_radius),
            ("transition_half_width", self.transition_half_width),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(CourtError::InvalidSpec(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.ft_circle_center_abs_x + self.ft_circle_radius >= self.half_length {
            return Err(CourtError::InvalidSpec(
                "free-throw circle must lie inside the court".into(),
            ));
        }
        if self.transition_half_width >= self.half_length {
            return Err(CourtError::InvalidSpec(
                "transition band must be narrower than the court".into(),
            ));
        }
        Ok(())
    }

    /// Load a spec from a JSON document; absent fields keep their defaults.
    pub fn from_json_str(s: &str) -> Result<Self, CourtError> {
        let spec: CourtSpec =
            serde_json::from_str(s).map_err(|e| CourtError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Shift a raw y coordinate into the centered convention.
    #[inline]
    pub fn center_y(&self, y: f64) -> f64 {
        match self.y_origin {
            YOrigin::Center => y,
            YOrigin::Corner => y - self.half_width,
        }
    }

    /// True iff the point lies on the court, boundary inclusive.
    #[inline]
    pub fn on_court(&self, p: [f64; 2]) -> bool {
        p[0].abs() <= self.half_length && self.center_y(p[1]).abs() <= self.half_width
    }

    /// True iff the point lies inside either free-throw circle, boundary
    /// inclusive.
    #[inline]
    pub fn in_ft_circle(&self, p: [f64; 2]) -> bool {
        let y = self.center_y(p[1]);
        let dx_pos = p[0] - self.ft_circle_center_abs_x;
        let dx_neg = p[0] + self.ft_circle_center_abs_x;
        let r2 = self.ft_circle_radius * self.ft_circle_radius;
        dx_pos * dx_pos + y * y <= r2 || dx_neg * dx_neg + y * y <= r2
    }

    /// Total playing surface in square meters.
    pub fn area_m2(&self) -> f64 {
        4.0 * self.half_length * self.half_width
    }
}

/// Euclidean norm of a velocity vector, in the vector's own units.
#[inline]
pub fn speed(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Convert meters per second to kilometers per hour.
#[inline]
pub fn kmh(mps: f64) -> f64 {
    mps * 3.6
}

/// Euclidean distance between two points in meters.
#[inline]
pub fn pair_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Component-wise mean of exactly five positions.
pub fn mean_position(positions: &[[f64; 2]]) -> Result<[f64; 2], CourtError> {
    if positions.len() != 5 {
        return Err(CourtError::NotFivePositions(positions.len()));
    }
    let mut sum = [0.0, 0.0];
    for p in positions {
        sum[0] += p[0];
        sum[1] += p[1];
    }
    Ok([sum[0] / 5.0, sum[1] / 5.0])
}

/// Area of the convex hull of a point set, in square meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HullArea {
    pub m2: f64,
}

/// Convex hull via monotone chain, counter-clockwise, without collinear
/// boundary points. Degenerate inputs yield fewer than 3 vertices.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let n = pts.len();
    if n < 3 {
        return pts;
    }

    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };

    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * n);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Convex hull area of a point set.
///
/// Fewer than 3 distinct points, or a collinear set, have area 0; such
/// frames occur in real data and are not errors.
pub fn convex_hull_area(points: &[[f64; 2]]) -> HullArea {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return HullArea { m2: 0.0 };
    }
    let mut twice_area = 0.0;
    for i in 0..hull.len() {
        let [x1, y1] = hull[i];
        let [x2, y2] = hull[(i + 1) % hull.len()];
        twice_area += x1 * y2 - x2 * y1;
    }
    HullArea {
        m2: twice_area.abs() / 2.0,
    }
}
