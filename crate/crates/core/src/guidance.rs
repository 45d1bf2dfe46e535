//! Look-ahead guidance laws.
//!
//! The baseline law steers toward a single look-ahead point at a fixed
//! distance `L1` on the path, producing `a = 2V² sin η / L1`. The
//! corrector-aided law adds a second aim point, the corrector, found by
//! intersecting the path tangent at the vehicle's projection with the line
//! through the look-ahead point perpendicular to the velocity. The two
//! commands are blended with curvature- and offset-dependent weights.
//!
//! Naming of the construction points follows the usual labelling:
//! `p1` vehicle, `p2` look-ahead point, `p3` foot of `p2` on the velocity
//! line, `p4` corrector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{line_intersection, signed_angle, Vec2, PARALLEL_EPS};
use crate::path::{LookaheadStatus, PathPoint, ReferencePath};
use crate::vehicle::{LataxCommand, VehicleState};

/// Smallest corrector distance used in the corrector command, meters.
pub const MIN_CORRECTOR_DISTANCE: f64 = 0.1;
/// Lower bound on |cos β| in the look-ahead speed.
pub const MIN_COS_BETA: f64 = 0.1;
/// Upper bound of the look-ahead speed as a multiple of vehicle speed.
pub const MAX_LOOKAHEAD_SPEED_RATIO: f64 = 5.0;
const MIN_WEIGHT_SUM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceGains {
    pub k1: f64,
    pub k2: f64,
}

impl GuidanceGains {
    /// Gains that reduce the blended law to the baseline law.
    pub const BASELINE: GuidanceGains = GuidanceGains { k1: 1.0, k2: 0.0 };

    pub fn new(k1: f64, k2: f64) -> Self {
        Self { k1, k2 }
    }
}

/// Angle from the velocity to the line of sight toward `target`.
pub fn eta(state: &VehicleState, target: Vec2) -> Result<f64> {
    let los = target - state.position();
    if los.norm_squared() == 0.0 {
        return Err(Error::ZeroLos);
    }
    signed_angle(state.direction(), los)
}

/// `2 V² sin η / L` toward `target`.
pub fn latax_l1(state: &VehicleState, target: Vec2, l: f64) -> Result<f64> {
    let eta = eta(state, target)?;
    Ok(2.0 * state.speed * state.speed * eta.sin() / l)
}

/// Baseline constant-L1 step: returns the command and the look-ahead point.
pub fn baseline_step(
    state: &VehicleState,
    path: &ReferencePath,
    s_min: f64,
    l1: f64,
) -> (LataxCommand, PathPoint, LookaheadStatus) {
    let la = path.lookahead_point(state.position(), s_min, l1);
    let range = aim_range(state.position(), la.point.position, l1);
    // on the fallback branch the target may coincide with the vehicle
    let a = latax_l1(state, la.point.position, range).unwrap_or(0.0);
    (LataxCommand(a), la.point, la.status)
}

/// Range used with a look-ahead target: `L1` when the target sits on the
/// look-ahead circle or inside it, the actual range on the fallback branch.
#[inline]
fn aim_range(p1: Vec2, target: Vec2, l1: f64) -> f64 {
    p1.distance(target).max(l1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectorGeometry {
    pub p1: Vec2,
    /// Closest path point to the vehicle.
    pub proj: PathPoint,
    /// Look-ahead point.
    pub p2: PathPoint,
    pub p3: Vec2,
    /// Corrector point.
    pub p4: Vec2,
    /// Range to the look-ahead point used in its command.
    pub l1: f64,
    pub lc: f64,
    pub l23: f64,
    pub l43: f64,
    pub eta12: f64,
    pub eta14: f64,
    /// Radius of curvature at the look-ahead point.
    pub r_l1: f64,
    pub v_l: f64,
    pub v_m: f64,
    pub lookahead_status: LookaheadStatus,
    /// Tangent at the projection was parallel to the perpendicular line; `p4 = p2`.
    pub degenerate: bool,
}

impl CorrectorGeometry {
    pub fn fallback(&self) -> bool {
        self.degenerate || self.lookahead_status != LookaheadStatus::Found
    }
}

/// Builds the corrector/look-ahead pair for the vehicle at `state`.
///
/// `s_min` is both the projection hint and the start of the forward
/// look-ahead search.
pub fn corrector_geometry(state: &VehicleState, path: &ReferencePath, s_min: f64, l1: f64) -> CorrectorGeometry {
    let proj = path.project(state.position(), Some(s_min)).point;
    corrector_geometry_from(state, path, proj, s_min.max(proj.s), l1)
}

/// [`corrector_geometry`] with a precomputed projection; the look-ahead
/// search starts at `s_search`.
pub fn corrector_geometry_from(
    state: &VehicleState,
    path: &ReferencePath,
    proj: PathPoint,
    s_search: f64,
    l1: f64,
) -> CorrectorGeometry {
    let p1 = state.position();
    let heading = state.direction();
    let la = path.lookahead_point(p1, s_search, l1);
    let p2 = la.point;
    let across = heading.perp();

    let (p4, degenerate) = match line_intersection(p2.position, across, proj.position, proj.tangent) {
        Ok(p) if proj.tangent.cross(across).abs() >= PARALLEL_EPS => (p, false),
        _ => (p2.position, true),
    };
    let p3 = p1 + heading * (p2.position - p1).dot(heading);

    let to2 = p2.position - p1;
    let to4 = p4 - p1;
    let lc = to4.norm();
    let eta12 = signed_angle(heading, to2).unwrap_or(0.0);
    let eta14 = signed_angle(heading, to4).unwrap_or(0.0);

    let mut geom = CorrectorGeometry {
        p1,
        proj,
        p2,
        p3,
        p4,
        l1: aim_range(p1, p2.position, l1),
        lc,
        l23: p2.position.distance(p3),
        l43: p4.distance(p3),
        eta12,
        eta14,
        r_l1: ReferencePath::curvature_radius(&p2),
        v_l: 0.0,
        v_m: 0.0,
        lookahead_status: la.status,
        degenerate,
    };
    geom.v_l = lookahead_speed(state, &geom);
    geom.v_m = 0.5 * (state.speed + geom.v_l);
    geom
}

/// Speed at which the look-ahead point slides along the path so that its
/// range from the vehicle stays constant.
pub fn lookahead_speed(state: &VehicleState, geom: &CorrectorGeometry) -> f64 {
    let v = state.speed;
    let los = geom.p2.position - geom.p1;
    let n = los.norm();
    if n == 0.0 {
        return v;
    }
    let cos_beta = geom.p2.tangent.dot(los) / n;
    let denom = if cos_beta < 0.0 {
        -cos_beta.abs().max(MIN_COS_BETA)
    } else {
        cos_beta.max(MIN_COS_BETA)
    };
    (v * geom.eta12.cos() / denom).clamp(0.0, MAX_LOOKAHEAD_SPEED_RATIO * v)
}

/// Blend weights `(w1, w2)` for the look-ahead and corrector commands.
pub fn weights(geom: &CorrectorGeometry, gains: GuidanceGains) -> (f64, f64) {
    let w1 = gains.k1 * geom.r_l1 / (1.0 + geom.l23);
    let w2 = gains.k2 * geom.v_m / (geom.r_l1 * (1.0 + geom.l43));
    (w1, w2)
}

/// Look-ahead command `a12` and corrector command `a14`.
pub fn component_commands(state: &VehicleState, geom: &CorrectorGeometry) -> (f64, f64) {
    let v2 = state.speed * state.speed;
    let a12 = 2.0 * v2 * geom.eta12.sin() / geom.l1;
    let a14 = 2.0 * v2 * geom.eta14.sin() / geom.lc.max(MIN_CORRECTOR_DISTANCE);
    (a12, a14)
}

/// Weighted average of the look-ahead and corrector commands.
pub fn blended_command(state: &VehicleState, geom: &CorrectorGeometry, gains: GuidanceGains) -> LataxCommand {
    let (a12, a14) = component_commands(state, geom);
    let (w1, w2) = weights(geom, gains);
    let a = if w2 == 0.0 || w1 + w2 < MIN_WEIGHT_SUM {
        a12
    } else if w1 == 0.0 {
        a14
    } else {
        (w1 * a12 + w2 * a14) / (w1 + w2)
    };
    LataxCommand(a)
}

/// Look-ahead points this close to the path end finish the run, meters.
pub const END_MARGIN: f64 = 0.1;

/// Close-range law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Baseline,
    Blended(GuidanceGains),
}

/// One close-range guidance evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingStep {
    pub command: LataxCommand,
    /// Updated lower bound of the path search.
    pub s_min: f64,
    /// Distance to the closest path point near `s_min`.
    pub cte: f64,
    /// The look-ahead point reached the end of the path.
    pub end_of_path: bool,
}

/// Projects the vehicle, advances `s_min` and evaluates `law`.
pub fn tracking_step(state: &VehicleState, path: &ReferencePath, s_min: f64, l1: f64, law: Law) -> TrackingStep {
    let proj = path.project(state.position(), Some(s_min));
    let s_min = s_min.max(proj.point.s);
    let (command, p2, status) = match law {
        Law::Baseline => baseline_step(state, path, s_min, l1),
        Law::Blended(gains) => {
            let geom = corrector_geometry_from(state, path, proj.point, s_min, l1);
            (blended_command(state, &geom, gains), geom.p2, geom.lookahead_status)
        }
    };
    TrackingStep {
        command,
        s_min,
        cte: proj.distance,
        end_of_path: status == LookaheadStatus::EndOfPath || p2.s >= path.length() - END_MARGIN,
    }
}
