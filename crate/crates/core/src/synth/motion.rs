//! Closed-form piecewise motion for generated players.
//!
//! Every player's whole session is a chain of segments, each with an
//! analytic position and velocity. Chains are built strictly forward in
//! time and each segment starts where the previous one ended, so emitted
//! positions are continuous and emitted velocities match the motion.

/// One motion segment over `[t0, t1)`.
#[derive(Debug, Clone)]
pub(crate) struct Seg {
    pub t0: f64,
    pub t1: f64,
    pub kind: SegKind,
}

#[derive(Debug, Clone)]
pub(crate) enum SegKind {
    /// Straight constant-velocity walk from `a` to `b`.
    Line { a: [f64; 2], b: [f64; 2] },
    /// Circle around `center` with a radial wobble. A zero-wobble orbit with
    /// a small radius doubles as a parked sway or a slow drift.
    Orbit {
        center: [f64; 2],
        r: f64,
        omega: f64,
        phi: f64,
        wob_amp: f64,
        wob_omega: f64,
        wob_phi: f64,
    },
}

impl Seg {
    fn eval(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        match &self.kind {
            SegKind::Line { a, b } => {
                let dur = self.t1 - self.t0;
                if dur <= 0.0 {
                    return (*b, [0.0, 0.0]);
                }
                let u = ((t - self.t0) / dur).clamp(0.0, 1.0);
                let pos = [a[0] + (b[0] - a[0]) * u, a[1] + (b[1] - a[1]) * u];
                let vel = [(b[0] - a[0]) / dur, (b[1] - a[1]) / dur];
                (pos, vel)
            }
            SegKind::Orbit {
                center,
                r,
                omega,
                phi,
                wob_amp,
                wob_omega,
                wob_phi,
            } => {
                let dt = t - self.t0;
                let theta = phi + omega * dt;
                let (sin_t, cos_t) = theta.sin_cos();
                let wob_arg = wob_omega * dt + wob_phi;
                let r_t = r + wob_amp * wob_arg.sin();
                let r_dot = wob_amp * wob_omega * wob_arg.cos();
                let pos = [center[0] + r_t * cos_t, center[1] + r_t * sin_t];
                let vel = [
                    r_dot * cos_t - r_t * omega * sin_t,
                    r_dot * sin_t + r_t * omega * cos_t,
                ];
                (pos, vel)
            }
        }
    }

    fn end_pos(&self) -> [f64; 2] {
        self.eval(self.t1).0
    }
}

/// A player's full-session motion.
#[derive(Debug, Clone, Default)]
pub(crate) struct PlayerScript {
    segs: Vec<Seg>,
}

impl PlayerScript {
    pub fn starting_at(pos: [f64; 2]) -> Self {
        // A zero-length anchor so end_pos is defined before the first push.
        PlayerScript {
            segs: vec![Seg {
                t0: 0.0,
                t1: 0.0,
                kind: SegKind::Line { a: pos, b: pos },
            }],
        }
    }

    pub fn end_time(&self) -> f64 {
        self.segs.last().map_or(0.0, |s| s.t1)
    }

    pub fn end_pos(&self) -> [f64; 2] {
        self.segs.last().map(|s| s.end_pos()).unwrap_or([0.0, 0.0])
    }

    fn push(&mut self, t1: f64, kind: SegKind) {
        let t0 = self.end_time();
        debug_assert!(t1 >= t0, "segments must move forward: {t0} -> {t1}");
        if t1 > t0 {
            self.segs.push(Seg { t0, t1, kind });
        }
    }

    /// Straight walk from the current position, arriving at `t1`.
    pub fn line_to(&mut self, t1: f64, target: [f64; 2]) {
        let a = self.end_pos();
        self.push(t1, SegKind::Line { a, b: target });
    }

    /// Sway or drift in place at roughly `speed_mps` until `t1`. The drift
    /// circle curls toward mid-court so a player parked at the sideline
    /// never wanders out of bounds.
    pub fn park_until(&mut self, t1: f64, radius: f64, speed_mps: f64) {
        let p = self.end_pos();
        let r = radius.max(1e-3);
        let toward_center = if p[0] >= 0.0 { -1.0 } else { 1.0 };
        let center = [p[0] + toward_center * r, p[1]];
        self.push(
            t1,
            SegKind::Orbit {
                center,
                r,
                omega: speed_mps / r,
                phi: if toward_center < 0.0 {
                    0.0
                } else {
                    std::f64::consts::PI
                },
                wob_amp: 0.0,
                wob_omega: 0.0,
                wob_phi: 0.0,
            },
        );
    }

    /// Orbit `center` at radius `r` until `t1`, entering along the current
    /// radial direction. The caller lines up to the entry point first; a
    /// small residual mismatch only shifts the starting radius.
    #[allow(clippy::too_many_arguments)]
    pub fn orbit_until(
        &mut self,
        t1: f64,
        center: [f64; 2],
        r: f64,
        omega: f64,
        wob_amp: f64,
        wob_omega: f64,
        wob_phi: f64,
    ) {
        let p = self.end_pos();
        let phi = (p[1] - center[1]).atan2(p[0] - center[0]);
        self.push(
            t1,
            SegKind::Orbit {
                center,
                r,
                omega,
                phi,
                wob_amp,
                wob_omega,
                wob_phi,
            },
        );
    }

    /// Position and velocity at time `t` (clamped to the covered range).
    pub fn eval(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        let idx = self.segs.partition_point(|s| s.t1 <= t);
        let seg = &self.segs[idx.min(self.segs.len() - 1)];
        seg.eval(t)
    }
}

/// Point on a circle at a given angle.
pub(crate) fn on_circle(center: [f64; 2], r: f64, angle: f64) -> [f64; 2] {
    [center[0] + r * angle.cos(), center[1] + r * angle.sin()]
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
