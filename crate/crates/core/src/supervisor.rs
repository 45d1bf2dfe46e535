//! Mission phase logic and per-step command dispatch.
//!
//! A mission starting at least `2 R0` from the path start (`R0` the path's
//! radius of curvature there) flies to an initiation circle, follows it to
//! the path start, then tracks the path. Closer starts track immediately.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::signed_angle;
use crate::guidance::{tracking_step, GuidanceGains, Law};
use crate::metrics::{PhaseKind, RunRecord, Sample};
use crate::midcourse::{
    candidate_circles, circle_follow_command, midcourse_command, select_circle, ContactSolution, InitiationCircle,
    ARRIVAL_DISTANCE, ARRIVAL_HEADING,
};
use crate::optimizer::{adaptive_interval, optimize_gains, OptimizerSettings};
use crate::path::ReferencePath;
use crate::vehicle::{step, LataxCommand, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Controller {
    Baseline,
    Proposed,
}

impl Controller {
    pub fn as_str(self) -> &'static str {
        match self {
            Controller::Baseline => "baseline",
            Controller::Proposed => "proposed",
        }
    }
}

/// Arrival tolerances for the phase transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// meters
    pub distance: f64,
    /// degrees
    pub heading_deg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            distance: ARRIVAL_DISTANCE,
            heading_deg: ARRIVAL_HEADING.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    pub speed: f64,
    /// Close-range look-ahead distance, meters.
    pub l1: f64,
    pub dt: f64,
    /// Initiation circle radius; `L1 / 2` when unset.
    pub initiation_radius: Option<f64>,
    /// Circle-following look-ahead distance; the initiation radius when unset.
    pub circle_lookahead: Option<f64>,
    pub controller: Controller,
    /// Gains of the proposed law; the optimizer's starting gains when it is enabled.
    pub gains: GuidanceGains,
    /// Online gain selection for the proposed law; fixed gains when `None`.
    pub optimizer: Option<OptimizerSettings>,
    /// Symmetric command limit, m/s².
    pub latax_limit: Option<f64>,
    /// Simulated-time limit, seconds; derived from the geometry when unset.
    pub max_time: Option<f64>,
    pub tolerances: Tolerances,
}

impl MissionConfig {
    /// Defaults for speed `v` and look-ahead `l1`: proposed law with online gains.
    pub fn new(v: f64, l1: f64) -> Self {
        Self {
            speed: v,
            l1,
            dt: 0.01,
            initiation_radius: None,
            circle_lookahead: None,
            controller: Controller::Proposed,
            gains: GuidanceGains::BASELINE,
            optimizer: Some(OptimizerSettings::for_lookahead(l1)),
            latax_limit: None,
            max_time: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_controller(mut self, controller: Controller) -> Self {
        self.controller = controller;
        self
    }

    /// Proposed law with the given gains held for the whole run.
    pub fn with_fixed_gains(mut self, gains: GuidanceGains) -> Self {
        self.controller = Controller::Proposed;
        self.gains = gains;
        self.optimizer = None;
        self
    }

    pub fn radius(&self) -> f64 {
        self.initiation_radius.unwrap_or(0.5 * self.l1)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("speed", self.speed)?;
        positive("l1", self.l1)?;
        positive("dt", self.dt)?;
        positive("initiation_radius", self.radius())?;
        if let Some(l) = self.circle_lookahead {
            positive("circle_lookahead", l)?;
        }
        if let Some(a) = self.latax_limit {
            positive("latax_limit", a)?;
        }
        if let Some(t) = self.max_time {
            positive("max_time", t)?;
        }
        positive("tolerances.distance", self.tolerances.distance)?;
        positive("tolerances.heading_deg", self.tolerances.heading_deg)?;
        if self.gains.k1 < 0.0 || self.gains.k2 < 0.0 || !(self.gains.k1 + self.gains.k2).is_finite() {
            return Err(Error::Config(format!(
                "gains must be non-negative, got ({}, {})",
                self.gains.k1, self.gains.k2
            )));
        }
        if let Some(o) = &self.optimizer {
            o.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Midcourse {
        solution: ContactSolution,
        circle: InitiationCircle,
    },
    CircleFollow {
        circle: InitiationCircle,
    },
    CloseRange {
        s_min: f64,
    },
    Done,
}

impl Phase {
    pub fn kind(&self) -> PhaseKind {
        match self {
            Phase::Midcourse { .. } => PhaseKind::Midcourse,
            Phase::CircleFollow { .. } => PhaseKind::CircleFollow,
            Phase::CloseRange { .. } => PhaseKind::CloseRange,
            Phase::Done => PhaseKind::Done,
        }
    }
}

/// Mid-course iff the vehicle is at least `2 R0` from the path start.
pub fn classify_phase(state: &VehicleState, path: &ReferencePath, r0: f64) -> PhaseKind {
    if state.position().distance(path.start().position) >= 2.0 * r0 {
        PhaseKind::Midcourse
    } else {
        PhaseKind::CloseRange
    }
}

/// A single mission in progress.
#[derive(Debug, Clone)]
pub struct Mission<'p> {
    path: &'p ReferencePath,
    config: MissionConfig,
    state: VehicleState,
    phase: Phase,
    gains: GuidanceGains,
    next_gain_update: f64,
    // distance to the current arrival target on the previous step
    last_range: f64,
    coast_steps: usize,
    max_time: f64,
    truncated: bool,
}

impl<'p> Mission<'p> {
    pub fn new(path: &'p ReferencePath, config: MissionConfig, initial: VehicleState) -> Result<Self> {
        config.validate()?;
        let mut initial = initial;
        initial.speed = config.speed;
        let r0 = ReferencePath::curvature_radius(&path.start());
        let phase = match classify_phase(&initial, path, r0) {
            PhaseKind::Midcourse => {
                let (circle, solution) = select_circle(&initial, candidate_circles(path, config.radius()))?;
                Phase::Midcourse { solution, circle }
            }
            _ => Phase::CloseRange {
                s_min: path.project(initial.position(), None).point.s,
            },
        };
        let max_time = config.max_time.unwrap_or_else(|| {
            let reach = initial.position().distance(path.start().position);
            let laps = 4.0 * PI * config.radius();
            3.0 * (path.length() + reach + laps) / config.speed + 60.0
        });
        Ok(Self {
            path,
            gains: match config.controller {
                Controller::Baseline => GuidanceGains::BASELINE,
                Controller::Proposed => config.gains,
            },
            config,
            state: initial,
            phase,
            next_gain_update: f64::NEG_INFINITY,
            last_range: f64::INFINITY,
            coast_steps: 0,
            max_time,
            truncated: false,
        })
    }

    pub fn state(&self) -> &VehicleState {
        &self.state
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }

    pub fn gains(&self) -> GuidanceGains {
        self.gains
    }

    pub fn is_finished(&self) -> bool {
        self.truncated || (self.phase == Phase::Done && self.coast_steps == 0)
    }

    fn heading_ok(&self, along: crate::geom::Vec2) -> bool {
        signed_angle(along, self.state.direction())
            .map(|e| e.abs() <= self.config.tolerances.heading_deg.to_radians())
            .unwrap_or(false)
    }

    // arrival at `range`: close and aligned, or close and past the closest approach
    fn arrived(&mut self, range: f64, along: crate::geom::Vec2) -> bool {
        let passing = range > self.last_range;
        self.last_range = range;
        range < self.config.tolerances.distance && (passing || self.heading_ok(along))
    }

    fn enter(&mut self, phase: Phase) {
        self.phase = phase;
        self.last_range = f64::INFINITY;
    }

    fn start_coast(&mut self) {
        self.enter(Phase::Done);
        self.coast_steps = (self.config.l1 / self.config.speed / self.config.dt).round() as usize;
    }

    /// Advances one integration step and returns its telemetry, or `None` once finished.
    pub fn step(&mut self) -> Result<Option<Sample>> {
        if self.is_finished() {
            return Ok(None);
        }
        if self.state.time >= self.max_time {
            log::warn!("mission stopped at the time limit t = {:.2} s", self.state.time);
            self.truncated = true;
            return Ok(None);
        }
        let path = self.path;
        let start = path.start();

        if let Phase::Midcourse { solution, circle } = self.phase {
            let range = self.state.position().distance(solution.contact);
            let along = circle.tangent_at(solution.contact);
            let cmd = midcourse_command(&self.state, &solution);
            if cmd.is_none() || self.arrived(range, along) {
                self.enter(Phase::CircleFollow { circle });
            } else {
                let cte = self.state.position().distance(start.position);
                return self.advance(cmd.unwrap_or(LataxCommand::ZERO), cte).map(Some);
            }
        }

        if let Phase::CircleFollow { circle } = self.phase {
            let range = self.state.position().distance(start.position);
            // hand over once level with the start, not while still behind it
            let abeam = (self.state.position() - start.position).dot(start.tangent) >= 0.0;
            if self.arrived(range, start.tangent) && abeam {
                self.enter(Phase::CloseRange { s_min: 0.0 });
            } else {
                let l1_mid = self.config.circle_lookahead.unwrap_or(circle.radius);
                let cmd = circle_follow_command(&self.state, &circle, l1_mid);
                let cte = path.project(self.state.position(), None).distance;
                return self.advance(cmd, cte).map(Some);
            }
        }

        if let Phase::CloseRange { s_min } = self.phase {
            let law = match self.config.controller {
                Controller::Baseline => Law::Baseline,
                Controller::Proposed => {
                    if let Some(settings) = self.config.optimizer {
                        if self.state.time >= self.next_gain_update {
                            let dt = self.config.dt;
                            self.gains = optimize_gains(&self.state, path, s_min, self.config.l1, dt, &settings).gains;
                            let horizon = adaptive_interval(&self.state, path, s_min, &settings);
                            self.next_gain_update = self.state.time + horizon - 0.5 * dt;
                        }
                    }
                    Law::Blended(self.gains)
                }
            };
            let ts = tracking_step(&self.state, path, s_min, self.config.l1, law);
            if ts.end_of_path {
                self.start_coast();
            } else {
                self.phase = Phase::CloseRange { s_min: ts.s_min };
                return self.advance(ts.command, ts.cte).map(Some);
            }
        }

        // coasting after the end of the path
        let hint = path.project(self.state.position(), None).point.s;
        let cte = path.project(self.state.position(), Some(hint)).distance;
        self.coast_steps -= 1;
        self.advance(LataxCommand::ZERO, cte).map(Some)
    }

    fn advance(&mut self, cmd: LataxCommand, cte: f64) -> Result<Sample> {
        let cmd = cmd.saturate(self.config.latax_limit);
        let s = &self.state;
        let sample = Sample {
            t: s.time,
            x: s.position().x,
            y: s.position().y,
            psi: s.heading(),
            a_cmd: cmd.0,
            cte,
            phase: self.phase.kind(),
            k1: self.gains.k1,
            k2: self.gains.k2,
        };
        self.state = step(&self.state, cmd, self.config.dt)?;
        Ok(sample)
    }

    /// Runs to completion.
    pub fn run(mut self) -> Result<RunRecord> {
        let mut samples = Vec::new();
        while let Some(s) = self.step()? {
            samples.push(s);
        }
        Ok(RunRecord {
            samples,
            truncated: self.truncated,
        })
    }
}

/// Simulates a whole mission from `initial`.
pub fn run_mission(path: &ReferencePath, config: &MissionConfig, initial: VehicleState) -> Result<RunRecord> {
    Mission::new(path, config.clone(), initial)?.run()
}
