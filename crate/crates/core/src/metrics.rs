//! Run records, cross-track error and summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::ReferencePath;
use crate::vehicle::VehicleState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    Midcourse,
    CircleFollow,
    CloseRange,
    Done,
}

impl PhaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::Midcourse => "midcourse",
            PhaseKind::CircleFollow => "circle_follow",
            PhaseKind::CloseRange => "close_range",
            PhaseKind::Done => "done",
        }
    }
}

/// One integration step: the state at the start of the step and the command held over it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub a_cmd: f64,
    pub cte: f64,
    pub phase: PhaseKind,
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub samples: Vec<Sample>,
    /// The run hit its time limit before finishing the path.
    pub truncated: bool,
}

impl RunRecord {
    /// Distinct phases in order of first appearance.
    pub fn phase_sequence(&self) -> Vec<PhaseKind> {
        let mut seq: Vec<PhaseKind> = Vec::new();
        for s in &self.samples {
            if seq.last() != Some(&s.phase) {
                seq.push(s.phase);
            }
        }
        seq
    }

    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }
}

/// Distance to the path start in mid-course, otherwise to the closest path point.
pub fn cross_track_error(state: &VehicleState, path: &ReferencePath, phase: PhaseKind, hint: Option<f64>) -> f64 {
    match phase {
        PhaseKind::Midcourse => state.position().distance(path.start().position),
        _ => path.project(state.position(), hint).distance,
    }
}

/// Table metrics of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub a_rms: f64,
    pub d_rms: f64,
    /// Largest command magnitude.
    pub a_max: f64,
    /// Largest signed command; the peak reported in comparison tables.
    pub a_peak: f64,
}

fn summarize_where(run: &RunRecord, keep: impl Fn(&Sample) -> bool) -> Result<Summary> {
    let (mut a2, mut d2, mut amax, mut peak, mut n) = (0.0, 0.0, 0.0f64, f64::NEG_INFINITY, 0usize);
    for s in run.samples.iter().filter(|s| keep(s)) {
        a2 += s.a_cmd * s.a_cmd;
        d2 += s.cte * s.cte;
        amax = amax.max(s.a_cmd.abs());
        peak = peak.max(s.a_cmd);
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyRun);
    }
    let n = n as f64;
    Ok(Summary {
        a_rms: (a2 / n).sqrt(),
        d_rms: (d2 / n).sqrt(),
        a_max: amax,
        a_peak: peak,
    })
}

/// RMS command, RMS cross-track error and peak command over close-range samples.
pub fn summarize(run: &RunRecord) -> Result<Summary> {
    summarize_where(run, |s| s.phase == PhaseKind::CloseRange)
}

/// [`summarize`] over every guided sample (all phases except the final coast).
pub fn summarize_mission(run: &RunRecord) -> Result<Summary> {
    summarize_where(run, |s| s.phase != PhaseKind::Done)
}

/// Percent improvements of `proposed` over `baseline`, positive when smaller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvements {
    pub a_rms: f64,
    pub d_rms: f64,
    pub a_max: f64,
    pub a_peak: f64,
}

fn relative(baseline: f64, proposed: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok((1.0 - proposed / baseline) * 100.0)
}

pub fn improvements(baseline: &Summary, proposed: &Summary) -> Result<Improvements> {
    Ok(Improvements {
        a_rms: relative(baseline.a_rms, proposed.a_rms)?,
        d_rms: relative(baseline.d_rms, proposed.d_rms)?,
        a_max: relative(baseline.a_max, proposed.a_max)?,
        // a zero signed peak is possible and not an error
        a_peak: relative(baseline.a_peak, proposed.a_peak).unwrap_or(f64::NAN),
    })
}
