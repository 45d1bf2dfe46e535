//! Scenario description shared by the command-line tools and the demo.
//!
//! The defaults reproduce the close-range comparison setup: a vehicle at
//! `(-15, 0)` flying at 5 m/s toward the sinusoid
//! `y = 10 sin(0.078x) + 20 cos(0.082x)` with `L1 = 10 m`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::guidance::GuidanceGains;
use crate::metrics::{improvements, summarize, Improvements, RunRecord, Summary};
use crate::optimizer::OptimizerSettings;
use crate::path::{ReferencePath, Sense};
use crate::supervisor::{run_mission, Controller, MissionConfig, Tolerances};
use crate::vehicle::VehicleState;

/// Initial headings of the close-range comparison, degrees.
pub fn default_headings() -> Vec<f64> {
    (0..11).map(|k| (15_000 * k - 20_882) as f64 / 1000.0).collect()
}

fn default_x_range() -> [f64; 2] {
    [-15.0, 120.0]
}
fn default_a_sin() -> f64 {
    10.0
}
fn default_w_sin() -> f64 {
    0.078
}
fn default_a_cos() -> f64 {
    20.0
}
fn default_w_cos() -> f64 {
    0.082
}
fn anticlockwise() -> Sense {
    Sense::Anticlockwise
}
fn full_turn() -> f64 {
    360.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PathSpec {
    Sinusoid {
        #[serde(default = "default_x_range")]
        x_range: [f64; 2],
        #[serde(default = "default_a_sin")]
        a_sin: f64,
        #[serde(default = "default_w_sin")]
        w_sin: f64,
        #[serde(default = "default_a_cos")]
        a_cos: f64,
        #[serde(default = "default_w_cos")]
        w_cos: f64,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
        #[serde(default = "anticlockwise")]
        sense: Sense,
        #[serde(default)]
        start_angle_deg: f64,
        #[serde(default = "full_turn")]
        sweep_deg: f64,
    },
    Line {
        origin: [f64; 2],
        direction: [f64; 2],
        length: f64,
    },
    /// Samples interpolated by a natural cubic spline. `file` names a
    /// two-column `x,y` CSV, resolved by the loader into `points`.
    Polyline {
        #[serde(default)]
        points: Vec<[f64; 2]>,
        #[serde(default)]
        file: Option<PathBuf>,
    },
}

impl Default for PathSpec {
    fn default() -> Self {
        PathSpec::Sinusoid {
            x_range: default_x_range(),
            a_sin: default_a_sin(),
            w_sin: default_w_sin(),
            a_cos: default_a_cos(),
            w_cos: default_w_cos(),
        }
    }
}

impl PathSpec {
    pub fn build(&self) -> Result<ReferencePath> {
        let v = |p: [f64; 2]| Vec2::new(p[0], p[1]);
        match self {
            PathSpec::Sinusoid {
                x_range,
                a_sin,
                w_sin,
                a_cos,
                w_cos,
            } => ReferencePath::sinusoid_with(*a_sin, *w_sin, *a_cos, *w_cos, x_range[0], x_range[1]),
            PathSpec::Circle {
                center,
                radius,
                sense,
                start_angle_deg,
                sweep_deg,
            } => ReferencePath::circle_arc(
                v(*center),
                *radius,
                start_angle_deg.to_radians(),
                sweep_deg.to_radians(),
                *sense,
            ),
            PathSpec::Line {
                origin,
                direction,
                length,
            } => ReferencePath::line(v(*origin), v(*direction), *length),
            PathSpec::Polyline { points, file } => {
                if points.is_empty() {
                    return Err(Error::InvalidPath(match file {
                        Some(f) => format!("polyline file {} was not loaded", f.display()),
                        None => "polyline needs points or a file".into(),
                    }));
                }
                let pts: Vec<Vec2> = points.iter().map(|&p| v(p)).collect();
                ReferencePath::polyline(&pts)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleSpec {
    pub position: [f64; 2],
    pub heading_deg: f64,
    pub speed: f64,
}

impl Default for VehicleSpec {
    fn default() -> Self {
        Self {
            position: [-15.0, 0.0],
            heading_deg: 39.118,
            speed: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerChoice {
    Baseline,
    Proposed,
    Both,
}

impl ControllerChoice {
    pub fn controllers(self) -> Vec<Controller> {
        match self {
            ControllerChoice::Baseline => vec![Controller::Baseline],
            ControllerChoice::Proposed => vec![Controller::Proposed],
            ControllerChoice::Both => vec![Controller::Baseline, Controller::Proposed],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceSpec {
    pub l1: f64,
    pub dt: f64,
    pub controller: ControllerChoice,
    /// `[k1, k2]` for the proposed law when `optimize` is off.
    pub gains: [f64; 2],
    pub optimize: bool,
    pub initiation_radius: Option<f64>,
    pub circle_lookahead: Option<f64>,
    pub latax_limit: Option<f64>,
    pub max_time: Option<f64>,
    pub tolerances: Tolerances,
}

impl Default for GuidanceSpec {
    fn default() -> Self {
        Self {
            l1: 10.0,
            dt: 0.01,
            controller: ControllerChoice::Both,
            gains: [1.0, 0.0],
            optimize: true,
            initiation_radius: None,
            circle_lookahead: None,
            latax_limit: None,
            max_time: None,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSpec {
    pub k_max: f64,
    pub grid: usize,
    pub refinement_rounds: usize,
    /// `2 L1` when unset.
    pub d_limit: Option<f64>,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        let d = OptimizerSettings::default();
        Self {
            k_max: d.k_max,
            grid: d.grid,
            refinement_rounds: d.refinement_rounds,
            d_limit: None,
        }
    }
}

impl OptimizerSpec {
    pub fn settings(&self, l1: f64) -> OptimizerSettings {
        OptimizerSettings {
            k_max: self.k_max,
            grid: self.grid,
            refinement_rounds: self.refinement_rounds,
            d_limit: self.d_limit.unwrap_or(2.0 * l1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub headings_deg: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            headings_deg: default_headings(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub path: PathSpec,
    pub vehicle: VehicleSpec,
    pub guidance: GuidanceSpec,
    pub optimizer: OptimizerSpec,
    pub sweep: SweepSpec,
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn mission_config(&self, controller: Controller) -> MissionConfig {
        let g = &self.guidance;
        MissionConfig {
            speed: self.vehicle.speed,
            l1: g.l1,
            dt: g.dt,
            initiation_radius: g.initiation_radius,
            circle_lookahead: g.circle_lookahead,
            controller,
            gains: GuidanceGains::new(g.gains[0], g.gains[1]),
            optimizer: g.optimize.then(|| self.optimizer.settings(g.l1)),
            latax_limit: g.latax_limit,
            max_time: g.max_time,
            tolerances: g.tolerances,
        }
    }

    pub fn initial_state(&self, heading_deg: f64) -> VehicleState {
        let p = self.vehicle.position;
        VehicleState::new(Vec2::new(p[0], p[1]), heading_deg.to_radians(), self.vehicle.speed)
    }

    /// Checks everything that can be checked without simulating.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: &[f64]| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite")))
            }
        };
        finite("vehicle.position", &self.vehicle.position)?;
        finite("vehicle.heading_deg", &[self.vehicle.heading_deg])?;
        finite("sweep.headings_deg", &self.sweep.headings_deg)?;
        if let PathSpec::Sinusoid { x_range, .. } = &self.path {
            if !(x_range[0] < x_range[1]) {
                return Err(Error::Config(format!(
                    "path.x_range must be increasing, got [{}, {}]",
                    x_range[0], x_range[1]
                )));
            }
        }
        self.mission_config(Controller::Proposed).validate()?;
        self.optimizer.settings(self.guidance.l1).validate()?;
        self.path.build().map_err(|e| Error::Config(format!("path: {e}")))?;
        Ok(())
    }
}

/// Baseline and proposed runs of one scenario with their summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub baseline: RunRecord,
    pub proposed: RunRecord,
    pub baseline_summary: Summary,
    pub proposed_summary: Summary,
    pub improvements: Improvements,
}

pub fn compare(path: &ReferencePath, config: &ScenarioConfig, heading_deg: f64) -> Result<Comparison> {
    let initial = config.initial_state(heading_deg);
    let baseline = run_mission(path, &config.mission_config(Controller::Baseline), initial)?;
    let proposed = run_mission(path, &config.mission_config(Controller::Proposed), initial)?;
    let baseline_summary = summarize(&baseline)?;
    let proposed_summary = summarize(&proposed)?;
    Ok(Comparison {
        improvements: improvements(&baseline_summary, &proposed_summary)?,
        baseline,
        proposed,
        baseline_summary,
        proposed_summary,
    })
}

/// One heading of a sweep; failed rows keep their error message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub heading_deg: f64,
    pub baseline: Option<Summary>,
    pub proposed: Option<Summary>,
    pub improvements: Option<Improvements>,
    pub error: Option<String>,
}

fn sweep_row(path: &ReferencePath, config: &ScenarioConfig, heading_deg: f64) -> SweepRow {
    match compare(path, config, heading_deg) {
        Ok(c) => SweepRow {
            heading_deg,
            baseline: Some(c.baseline_summary),
            proposed: Some(c.proposed_summary),
            improvements: Some(c.improvements),
            error: None,
        },
        Err(e) => SweepRow {
            heading_deg,
            baseline: None,
            proposed: None,
            improvements: None,
            error: Some(e.to_string()),
        },
    }
}

/// Baseline-versus-proposed comparison for every sweep heading, in heading order.
pub fn sweep(path: &ReferencePath, config: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    let headings = &config.sweep.headings_deg;
    if headings.is_empty() {
        return Err(Error::Config("sweep.headings_deg is empty".into()));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(headings.par_iter().map(|&h| sweep_row(path, config, h)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(headings.iter().map(|&h| sweep_row(path, config, h)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_headings_match_table_labels() {
        let h = default_headings();
        assert_eq!(h.len(), 11);
        assert!((h[4] - 39.118).abs() < 1e-9);
        assert!((h[10] - 129.118).abs() < 1e-9);
    }

    #[test]
    fn default_scenario_is_valid() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        let path = c.path.build().unwrap();
        assert!((path.start().position.x + 15.0).abs() < 1e-12);
        let m = c.mission_config(Controller::Proposed);
        assert_eq!(m.optimizer.unwrap().d_limit, 20.0);
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = ScenarioConfig::default();
        c.vehicle.speed = -1.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = ScenarioConfig::default();
        c.path = PathSpec::Sinusoid {
            x_range: [10.0, 0.0],
            a_sin: 10.0,
            w_sin: 0.078,
            a_cos: 20.0,
            w_cos: 0.082,
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = ScenarioConfig::default();
        c.optimizer.grid = 1;
        assert!(c.validate().is_err());

        let mut c = ScenarioConfig::default();
        c.path = PathSpec::Polyline {
            points: vec![],
            file: None,
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn empty_sweep_is_a_config_error() {
        let mut c = ScenarioConfig::default();
        c.sweep.headings_deg.clear();
        let path = c.path.build().unwrap();
        assert!(matches!(sweep(&path, &c), Err(Error::Config(_))));
    }

    #[test]
    fn failed_rows_are_recorded() {
        let mut c = ScenarioConfig::default();
        c.path = PathSpec::Line {
            origin: [0.0, 0.0],
            direction: [1.0, 0.0],
            length: 5.0,
        };
        c.guidance.optimize = false;
        c.sweep.headings_deg = vec![0.0];
        c.vehicle.position = [-100.0, 0.0];
        let path = c.path.build().unwrap();
        let rows = sweep(&path, &c).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error.is_some());
        assert!(rows[0].baseline.is_none());
    }
}
