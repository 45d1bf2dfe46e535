//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string; failures come back as `{"error": "..."}`.

use cpguide::geom::Vec2;
use cpguide::guidance::{component_commands, corrector_geometry, weights, GuidanceGains};
use cpguide::metrics::{summarize, summarize_mission, Improvements, PhaseKind, RunRecord, Summary};
use cpguide::midcourse::InitiationCircle;
use cpguide::path::ReferencePath;
use cpguide::scenario::ScenarioConfig;
use cpguide::supervisor::{Controller, Mission, MissionConfig, Phase};
use cpguide::vehicle::VehicleState;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keep every n-th sample in returned trajectories.
const DECIMATE: usize = 5;
const PATH_STEP: f64 = 0.5;

#[derive(Debug, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<Vec2> for Point {
    fn from(v: Vec2) -> Self {
        Point { x: v.x, y: v.y }
    }
}

#[derive(Debug, Serialize)]
pub struct Trace {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub a_cmd: Vec<f64>,
    pub cte: Vec<f64>,
    pub phase: Vec<PhaseKind>,
}

fn trace(run: &RunRecord) -> Trace {
    let n = run.samples.len();
    let kept = run
        .samples
        .iter()
        .enumerate()
        .filter(|(k, _)| k % DECIMATE == 0 || k + 1 == n)
        .map(|(_, s)| s);
    let mut t = Trace {
        t: vec![],
        x: vec![],
        y: vec![],
        a_cmd: vec![],
        cte: vec![],
        phase: vec![],
    };
    for s in kept {
        t.t.push(s.t);
        t.x.push(s.x);
        t.y.push(s.y);
        t.a_cmd.push(s.a_cmd);
        t.cte.push(s.cte);
        t.phase.push(s.phase);
    }
    t
}

fn polyline(path: &ReferencePath) -> Vec<Point> {
    let n = (path.length() / PATH_STEP).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| path.point_at(path.length() * k as f64 / n as f64).position.into())
        .collect()
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    let v = match r {
        Ok(v) => serde_json::to_value(v),
        Err(e) => Ok(serde_json::json!({ "error": e })),
    };
    v.and_then(|v| serde_json::to_string(&v))
        .unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

#[derive(Debug, Serialize)]
pub struct CloseRange {
    pub path: Vec<Point>,
    pub baseline: Trace,
    pub proposed: Trace,
    pub baseline_summary: Summary,
    pub proposed_summary: Summary,
    pub improvements: Improvements,
}

/// Baseline and proposed runs from `(-15, 0)` on the default sinusoid.
/// With `optimize` off the proposed law uses `(k1, k2)` throughout.
pub fn close_range(heading_deg: f64, k1: f64, k2: f64, optimize: bool) -> Result<CloseRange, String> {
    let mut config = ScenarioConfig::default();
    config.guidance.optimize = optimize;
    config.guidance.gains = [k1, k2];
    config.validate().map_err(|e| e.to_string())?;
    let path = config.path.build().map_err(|e| e.to_string())?;
    let c = cpguide::scenario::compare(&path, &config, heading_deg).map_err(|e| e.to_string())?;
    Ok(CloseRange {
        path: polyline(&path),
        baseline: trace(&c.baseline),
        proposed: trace(&c.proposed),
        baseline_summary: c.baseline_summary,
        proposed_summary: c.proposed_summary,
        improvements: c.improvements,
    })
}

#[derive(Debug, Serialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
    pub clockwise: bool,
}

impl From<InitiationCircle> for Circle {
    fn from(c: InitiationCircle) -> Self {
        Circle {
            center: c.center.into(),
            radius: c.radius,
            clockwise: c.sense.sign() < 0.0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FullMission {
    pub path: Vec<Point>,
    pub trace: Trace,
    /// Initiation circle and contact point when the start is far enough for mid-course.
    pub circle: Option<Circle>,
    pub contact: Option<Point>,
    pub close_range_summary: Option<Summary>,
    pub mission_summary: Summary,
    pub truncated: bool,
}

/// Complete mission toward the sinusoid over `x ∈ [0, 150]` from an arbitrary pose.
pub fn full_mission(x: f64, y: f64, heading_deg: f64, proposed: bool) -> Result<FullMission, String> {
    let path = ReferencePath::sinusoid(0.0, 150.0).map_err(|e| e.to_string())?;
    let controller = if proposed {
        Controller::Proposed
    } else {
        Controller::Baseline
    };
    let config = MissionConfig::new(5.0, 10.0).with_controller(controller);
    let initial = VehicleState::new(Vec2::new(x, y), heading_deg.to_radians(), 5.0);
    let mission = Mission::new(&path, config.clone(), initial).map_err(|e| e.to_string())?;
    let (circle, contact) = match *mission.phase() {
        Phase::Midcourse { solution, circle } => (Some(circle.into()), Some(solution.contact.into())),
        _ => (None, None),
    };
    let run = mission.run().map_err(|e| e.to_string())?;
    Ok(FullMission {
        path: polyline(&path),
        trace: trace(&run),
        circle,
        contact,
        close_range_summary: summarize(&run).ok(),
        mission_summary: summarize_mission(&run).map_err(|e| e.to_string())?,
        truncated: run.truncated,
    })
}

#[derive(Debug, Serialize)]
pub struct Corrector {
    pub path: Vec<Point>,
    pub vehicle: Point,
    pub projection: Point,
    pub lookahead: Point,
    pub p3: Point,
    pub corrector: Point,
    pub a_lookahead: f64,
    pub a_corrector: f64,
    pub w1: f64,
    pub w2: f64,
    pub degenerate: bool,
}

/// Look-ahead and corrector construction for a pose near the default sinusoid.
pub fn corrector(x: f64, y: f64, heading_deg: f64, l1: f64, k1: f64, k2: f64) -> Result<Corrector, String> {
    if !(l1 > 0.0 && l1.is_finite()) {
        return Err(format!("look-ahead distance must be positive, got {l1}"));
    }
    let path = ScenarioConfig::default().path.build().map_err(|e| e.to_string())?;
    let state = VehicleState::new(Vec2::new(x, y), heading_deg.to_radians(), 5.0);
    let s_min = path.project(state.position(), None).point.s;
    let g = corrector_geometry(&state, &path, s_min, l1);
    let (a12, a14) = component_commands(&state, &g);
    let (w1, w2) = weights(&g, GuidanceGains::new(k1, k2));
    Ok(Corrector {
        path: polyline(&path),
        vehicle: g.p1.into(),
        projection: g.proj.position.into(),
        lookahead: g.p2.position.into(),
        p3: g.p3.into(),
        corrector: g.p4.into(),
        a_lookahead: a12,
        a_corrector: a14,
        w1,
        w2,
        degenerate: g.degenerate,
    })
}

#[wasm_bindgen(js_name = closeRange)]
pub fn close_range_json(heading_deg: f64, k1: f64, k2: f64, optimize: bool) -> String {
    to_json(close_range(heading_deg, k1, k2, optimize))
}

#[wasm_bindgen(js_name = fullMission)]
pub fn full_mission_json(x: f64, y: f64, heading_deg: f64, proposed: bool) -> String {
    to_json(full_mission(x, y, heading_deg, proposed))
}

#[wasm_bindgen(js_name = correctorGeometry)]
pub fn corrector_json(x: f64, y: f64, heading_deg: f64, l1: f64, k1: f64, k2: f64) -> String {
    to_json(corrector(x, y, heading_deg, l1, k1, k2))
}
