//! Constant-speed point-mass kinematics with an ideal inner loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{normalize_angle, Pose, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub pose: Pose,
    /// Constant ground speed, m/s.
    pub speed: f64,
    pub time: f64,
}

impl VehicleState {
    pub fn new(position: Vec2, heading: f64, speed: f64) -> Self {
        Self {
            pose: Pose::new(position, heading),
            speed,
            time: 0.0,
        }
    }

    #[inline]
    pub fn position(&self) -> Vec2 {
        self.pose.position
    }

    #[inline]
    pub fn heading(&self) -> f64 {
        self.pose.heading
    }

    /// Unit vector along the velocity.
    #[inline]
    pub fn direction(&self) -> Vec2 {
        self.pose.direction()
    }

    pub fn velocity(&self) -> Vec2 {
        self.direction() * self.speed
    }
}

/// Lateral acceleration command, anticlockwise-positive, m/s².
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct LataxCommand(pub f64);

impl LataxCommand {
    pub const ZERO: LataxCommand = LataxCommand(0.0);

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Clamps to `±limit` when a limit is given.
    pub fn saturate(self, limit: Option<f64>) -> Self {
        match limit {
            Some(a) => LataxCommand(self.0.clamp(-a, a)),
            None => self,
        }
    }
}

// (ẋ, ẏ, ψ̇) for a held command
#[inline]
fn rates(heading: f64, speed: f64, turn_rate: f64) -> (f64, f64, f64) {
    let (s, c) = heading.sin_cos();
    (speed * c, speed * s, turn_rate)
}

/// Advances the state by `dt` under a zero-order-hold command using classical RK4.
pub fn step(state: &VehicleState, cmd: LataxCommand, dt: f64) -> Result<VehicleState> {
    if !cmd.0.is_finite() {
        return Err(Error::InvalidCommand(cmd.0));
    }
    let v = state.speed;
    let w = cmd.0 / v;
    let p = state.pose.position;
    let psi = state.pose.heading;

    let k1 = rates(psi, v, w);
    let k2 = rates(psi + 0.5 * dt * k1.2, v, w);
    let k3 = rates(psi + 0.5 * dt * k2.2, v, w);
    let k4 = rates(psi + dt * k3.2, v, w);

    let dx = dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
    let dy = dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    let dpsi = dt / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);

    Ok(VehicleState {
        pose: Pose {
            position: Vec2::new(p.x + dx, p.y + dy),
            heading: normalize_angle(psi + dpsi),
        },
        speed: v,
        time: state.time + dt,
    })
}
