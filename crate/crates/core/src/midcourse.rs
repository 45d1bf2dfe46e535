//! Mid-course guidance onto an initiation circle.
//!
//! The initiation circle touches the reference path tangentially at its
//! start point. From a distant pose the vehicle flies a single circular arc
//! that is itself tangent to the initiation circle, then follows the circle
//! until it reaches the path start with the path's heading.
//!
//! Aiming the look-ahead law `a = 2V^2 sin(eta) / L` at a fixed point `W` on the initiation
//! circle produces a constant command along the arc through the vehicle
//! tangent to its velocity. Over all `W` on the circle, the signed command
//! has exactly two stationary points, and both are tangency points of such
//! arcs with the initiation circle. Writing the arc centre as
//! `P + λ·n` (`n` the left normal of the heading, `λ` signed), tangency
//! gives
//!
//! ```text
//! λ = (R² − |P − O|²) / (2 (n·(P − O) ∓ R))
//! ```
//!
//! one solution per sign. The larger `|λ|` needs the smaller command.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{signed_angle, Vec2};
use crate::guidance::latax_l1;
use crate::path::{ReferencePath, Sense};
use crate::vehicle::{LataxCommand, VehicleState};

/// Distance to `W` within which the vehicle counts as arrived on the circle.
pub const ARRIVAL_DISTANCE: f64 = 0.25;
/// Heading tolerance for arrival at `W` and at the path start, radians.
pub const ARRIVAL_HEADING: f64 = 2.0 * PI / 180.0;
/// Below this distance the mid-course command hands over unconditionally.
pub const HANDOVER_DISTANCE: f64 = 0.1;
/// Requested circle-following look-ahead distances at or above `2R` are reduced to `1.8R`.
pub const CIRCLE_L1_CLAMP: f64 = 1.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitiationCircle {
    pub center: Vec2,
    pub radius: f64,
    pub sense: Sense,
}

impl InitiationCircle {
    /// Unit direction of travel along the circle at the point nearest `p`.
    pub fn tangent_at(&self, p: Vec2) -> Vec2 {
        let radial = (p - self.center).normalized().unwrap_or(Vec2::new(1.0, 0.0));
        radial.perp() * self.sense.sign()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.distance(self.center) < self.radius
    }
}

/// Whether the arc meets the initiation circle from outside or encloses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tangency {
    External,
    Internal,
    /// Straight approach along the velocity (infinite arc radius).
    Straight,
    /// Vehicle already on the circle.
    OnCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactSolution {
    /// Contact point on the initiation circle.
    pub contact: Vec2,
    /// Radius of the vehicle's arc, `∞` for a straight approach.
    pub lambda: f64,
    /// Constant command along the arc, signed.
    pub command: f64,
    pub tangency: Tangency,
    /// Sense in which the vehicle moves around the initiation circle on arrival.
    pub arrival: Sense,
    /// Arrival sense matches the circle's traversal sense.
    pub feasible: bool,
}

/// The two circles of radius `radius` tangent to the path at its start.
///
/// The first is centred on the left of the start tangent and traversed
/// anticlockwise, the second on the right and traversed clockwise.
pub fn candidate_circles(path: &ReferencePath, radius: f64) -> (InitiationCircle, InitiationCircle) {
    let start = path.start();
    let n = start.normal();
    (
        InitiationCircle {
            center: start.position + n * radius,
            radius,
            sense: Sense::Anticlockwise,
        },
        InitiationCircle {
            center: start.position - n * radius,
            radius,
            sense: Sense::Clockwise,
        },
    )
}

fn on_circle_tol(radius: f64) -> f64 {
    1e-9 * radius.max(1.0)
}

fn arrival_sense(circle: &InitiationCircle, contact: Vec2, direction: Vec2) -> Sense {
    Sense::of((contact - circle.center).cross(direction))
}

/// Both tangency solutions from the vehicle's pose to `circle`, larger arc radius first.
pub fn contact_solutions(state: &VehicleState, circle: &InitiationCircle) -> Result<Vec<ContactSolution>> {
    let p = state.position();
    let h = state.direction();
    let o = circle.center;
    let r = circle.radius;
    let rel = p - o;
    let d = rel.norm();
    if d < r - on_circle_tol(r) {
        return Err(Error::InsideCircle);
    }
    if h.dot(o - p) < -1e-12 * d.max(1.0) {
        return Err(Error::HeadingAway);
    }
    let solution = |contact: Vec2, lambda: f64, command: f64, tangency: Tangency, arrive_dir: Vec2| {
        let arrival = arrival_sense(circle, contact, arrive_dir);
        ContactSolution {
            contact,
            lambda,
            command,
            tangency,
            arrival,
            feasible: arrival == circle.sense,
        }
    };
    if d <= r + on_circle_tol(r) {
        return Ok(vec![solution(p, f64::INFINITY, 0.0, Tangency::OnCircle, h)]);
    }

    let v2 = state.speed * state.speed;
    let n = h.perp();
    let b = n.dot(rel);
    let num = r * r - d * d;
    let mut out = Vec::with_capacity(2);
    for denom in [2.0 * (b - r), 2.0 * (b + r)] {
        if denom.abs() < 1e-12 * r {
            // heading line tangent to the circle: straight approach
            let contact = p + h * h.dot(o - p);
            out.push(solution(contact, f64::INFINITY, 0.0, Tangency::Straight, h));
            continue;
        }
        let lambda = num / denom;
        let rho = lambda.abs();
        let q = p + n * lambda;
        let oq = q - o;
        let dist = oq.norm();
        let (contact, tangency) = if (dist - (rho + r)).abs() <= (dist - (rho - r).abs()).abs() {
            (o + oq * (r / dist), Tangency::External)
        } else {
            (o - oq * (r / dist), Tangency::Internal)
        };
        let turn = lambda.signum();
        let arrive_dir = (contact - q).perp() * (turn / rho);
        out.push(solution(contact, rho, turn * v2 / rho, tangency, arrive_dir));
    }
    out.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
    Ok(out)
}

/// Signed look-ahead command aimed at the circle point at angle `phi`.
fn command_toward(state: &VehicleState, circle: &InitiationCircle, phi: f64) -> f64 {
    let w = circle.center + Vec2::from_angle(phi) * circle.radius;
    latax_l1(state, w, w.distance(state.position())).unwrap_or(0.0)
}

/// Sweeps `n` candidate aim points around the circle and returns the angle
/// (about the circle centre) of the stationary point of the command with
/// the smaller magnitude. Ties go to the larger angle.
pub fn brute_force_extremum(state: &VehicleState, circle: &InitiationCircle, n: usize) -> f64 {
    let n = n.max(360);
    let rel = state.position() - circle.center;
    if (rel.norm() - circle.radius).abs() <= on_circle_tol(circle.radius) {
        return rel.angle();
    }
    let mut hi = (f64::NEG_INFINITY, 0.0);
    let mut lo = (f64::INFINITY, 0.0);
    for k in 0..n {
        let phi = -PI + TAU * k as f64 / n as f64;
        let a = command_toward(state, circle, phi);
        if a > hi.0 {
            hi = (a, phi);
        }
        if a < lo.0 {
            lo = (a, phi);
        }
    }
    let (ahi, alo) = (hi.0.abs(), lo.0.abs());
    let scale = ahi.max(alo).max(f64::MIN_POSITIVE);
    if (ahi - alo).abs() <= 1e-9 * scale {
        hi.1.max(lo.1)
    } else if ahi < alo {
        hi.1
    } else {
        lo.1
    }
}

/// Picks the feasible contact with the smallest command over both circles.
pub fn select_circle(
    state: &VehicleState,
    candidates: (InitiationCircle, InitiationCircle),
) -> Result<(InitiationCircle, ContactSolution)> {
    let mut best: Option<(InitiationCircle, ContactSolution)> = None;
    let mut notes = Vec::new();
    for circle in [candidates.0, candidates.1] {
        match contact_solutions(state, &circle) {
            Err(e) => notes.push(format!(
                "{:?} circle at ({:.3}, {:.3}): {e}",
                circle.sense, circle.center.x, circle.center.y
            )),
            Ok(solutions) => {
                for sol in solutions {
                    if !sol.feasible {
                        notes.push(format!(
                            "{:?} circle: {:?} contact λ={:.3} arrives {:?}",
                            circle.sense, sol.tangency, sol.lambda, sol.arrival
                        ));
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((bc, bs)) => {
                            let (a, b) = (sol.command.abs(), bs.command.abs());
                            a < b || (a == b && circle.sense == Sense::Anticlockwise && bc.sense == Sense::Clockwise)
                        }
                    };
                    if better {
                        best = Some((circle, sol));
                    }
                }
            }
        }
    }
    best.ok_or_else(|| Error::NoFeasibleGeometry(notes.join("; ")))
}

/// Command toward the fixed contact point; `None` once within the handover distance.
pub fn midcourse_command(state: &VehicleState, sol: &ContactSolution) -> Option<LataxCommand> {
    let l = sol.contact.distance(state.position());
    if l < HANDOVER_DISTANCE {
        return None;
    }
    latax_l1(state, sol.contact, l).ok().map(LataxCommand)
}

/// Effective circle-following look-ahead distance for a requested value.
pub fn circle_lookahead(circle: &InitiationCircle, requested: f64) -> f64 {
    if requested >= 2.0 * circle.radius {
        CIRCLE_L1_CLAMP * circle.radius
    } else {
        requested
    }
}

/// Point on the circle `l1` ahead of the vehicle in the traversal sense.
pub fn circle_target(state: &VehicleState, circle: &InitiationCircle, l1: f64) -> Vec2 {
    let o = circle.center;
    let r = circle.radius;
    let sigma = circle.sense.sign();
    let rel = state.position() - o;
    let d = rel.norm();
    let u = if d > 0.0 {
        rel * (1.0 / d)
    } else {
        state.direction().perp() * -sigma
    };
    if d >= (r - l1).abs() && d <= r + l1 && d > 0.0 {
        let along = (d * d + r * r - l1 * l1) / (2.0 * d);
        let across = (r * r - along * along).max(0.0).sqrt();
        o + u * along + u.perp() * (sigma * across)
    } else {
        // no intersection: a chord of length l1 ahead of the radial foot
        let sweep = 2.0 * (l1 / (2.0 * r)).min(1.0).asin();
        o + Vec2::from_angle(u.angle() + sigma * sweep) * r
    }
}

/// Constant-look-ahead guidance around the initiation circle.
pub fn circle_follow_command(state: &VehicleState, circle: &InitiationCircle, l1_mid: f64) -> LataxCommand {
    let l1 = circle_lookahead(circle, l1_mid);
    let target = circle_target(state, circle, l1);
    let range = target.distance(state.position()).max(l1);
    LataxCommand(latax_l1(state, target, range).unwrap_or(0.0))
}

/// Heading error of the vehicle against the circle's direction of travel at `at`.
pub fn heading_error_on_circle(state: &VehicleState, circle: &InitiationCircle, at: Vec2) -> f64 {
    signed_angle(circle.tangent_at(at), state.direction())
        .unwrap_or(PI)
        .abs()
}
