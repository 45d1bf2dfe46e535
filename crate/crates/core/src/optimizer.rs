//! Online selection of the blend gains `(k1, k2)`.
//!
//! Each candidate pair is scored by rolling the closed loop forward from the
//! current state for a horizon tied to the local path curvature and taking
//! the RMS cross-track error. The search is a uniform grid over
//! `[0, k_max]²` followed by local refinement around the incumbent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guidance::{tracking_step, GuidanceGains, Law};
use crate::path::ReferencePath;
use crate::vehicle::{step, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    /// Upper bound of both gains.
    pub k_max: f64,
    /// Points per axis of the coarse grid.
    pub grid: usize,
    pub refinement_rounds: usize,
    /// Longest rollout distance, meters.
    pub d_limit: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self::for_lookahead(10.0)
    }
}

impl OptimizerSettings {
    /// Defaults with `d_limit = 2 L1`.
    pub fn for_lookahead(l1: f64) -> Self {
        Self {
            k_max: 10.0,
            grid: 11,
            refinement_rounds: 2,
            d_limit: 2.0 * l1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_max > 0.0 && self.k_max.is_finite()) {
            return Err(Error::Config(format!(
                "optimizer.k_max must be positive, got {}",
                self.k_max
            )));
        }
        if self.grid < 3 {
            return Err(Error::Config(format!(
                "optimizer.grid must be at least 3, got {}",
                self.grid
            )));
        }
        if !(self.d_limit > 0.0 && self.d_limit.is_finite()) {
            return Err(Error::Config(format!(
                "optimizer.d_limit must be positive, got {}",
                self.d_limit
            )));
        }
        Ok(())
    }

    fn spacing(&self) -> f64 {
        self.k_max / (self.grid - 1) as f64
    }
}

/// Rollout horizon: `min(d_limit, R_proj) / V`.
pub fn adaptive_interval(state: &VehicleState, path: &ReferencePath, s_min: f64, settings: &OptimizerSettings) -> f64 {
    let proj = path.project(state.position(), Some(s_min)).point;
    let r_proj = ReferencePath::curvature_radius(&proj);
    settings.d_limit.min(r_proj) / state.speed
}

/// RMS cross-track error of the blended law with fixed `gains` over `horizon` seconds.
///
/// Rollouts stop early when the look-ahead point reaches the end of the
/// path. A non-finite command makes the candidate infeasible (`+∞`).
pub fn rollout_cost(
    state: &VehicleState,
    path: &ReferencePath,
    s_min: f64,
    l1: f64,
    gains: GuidanceGains,
    horizon: f64,
    dt: f64,
) -> f64 {
    let n = ((horizon / dt).round() as usize).max(1);
    let mut s = *state;
    let mut s_min = s_min;
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in 0..=n {
        let ts = tracking_step(&s, path, s_min, l1, Law::Blended(gains));
        s_min = ts.s_min;
        if k > 0 {
            sum += ts.cte * ts.cte;
            count += 1;
        }
        if k == n || ts.end_of_path {
            if count == 0 {
                return ts.cte;
            }
            break;
        }
        s = match step(&s, ts.command, dt) {
            Ok(next) => next,
            Err(_) => return f64::INFINITY,
        };
    }
    let rms = (sum / count as f64).sqrt();
    if rms.is_finite() {
        rms
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainChoice {
    pub gains: GuidanceGains,
    pub cost: f64,
    /// Every candidate was infeasible; `gains` fell back to `(1, 0)`.
    pub all_infeasible: bool,
}

// (cost, k2, k1) lexicographic; NaN never wins
fn better(a: (f64, GuidanceGains), b: (f64, GuidanceGains)) -> bool {
    a.0.total_cmp(&b.0)
        .then(a.1.k2.total_cmp(&b.1.k2))
        .then(a.1.k1.total_cmp(&b.1.k1))
        .is_lt()
}

fn evaluate<F>(candidates: &[GuidanceGains], cost: &F) -> Vec<f64>
where
    F: Fn(GuidanceGains) -> f64 + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        candidates.par_iter().map(|&g| cost(g)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        candidates.iter().map(|&g| cost(g)).collect()
    }
}

/// Coarse-to-fine gain search with a caller-supplied objective.
///
/// Results do not depend on evaluation order: all costs are collected
/// before the reduction.
pub fn search_gains<F>(settings: &OptimizerSettings, cost: F) -> GainChoice
where
    F: Fn(GuidanceGains) -> f64 + Sync,
{
    let k_max = settings.k_max;
    let h = settings.spacing();
    let mut candidates: Vec<GuidanceGains> = (0..settings.grid)
        .flat_map(|i| (0..settings.grid).map(move |j| GuidanceGains::new(i as f64 * h, j as f64 * h)))
        .collect();
    if !candidates.contains(&GuidanceGains::BASELINE) && k_max >= 1.0 {
        candidates.push(GuidanceGains::BASELINE);
    }

    let absorb = |best: &mut Option<(f64, GuidanceGains)>, cands: &[GuidanceGains]| {
        for (&g, c) in cands.iter().zip(evaluate(cands, &cost)) {
            if c.is_finite() && best.is_none_or(|b| better((c, g), b)) {
                *best = Some((c, g));
            }
        }
    };
    let mut best = None;
    absorb(&mut best, &candidates);

    let mut step = h;
    for _ in 0..settings.refinement_rounds {
        let Some((_, center)) = best else { break };
        step *= 0.5;
        let mut local = Vec::with_capacity(8);
        for di in -1..=1 {
            for dj in -1..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let g = GuidanceGains::new(
                    (center.k1 + di as f64 * step).clamp(0.0, k_max),
                    (center.k2 + dj as f64 * step).clamp(0.0, k_max),
                );
                if g != center && !local.contains(&g) {
                    local.push(g);
                }
            }
        }
        absorb(&mut best, &local);
    }

    match best {
        Some((cost, gains)) => GainChoice {
            gains,
            cost,
            all_infeasible: false,
        },
        None => {
            log::warn!("all gain candidates infeasible; using (1, 0)");
            GainChoice {
                gains: GuidanceGains::BASELINE,
                cost: f64::INFINITY,
                all_infeasible: true,
            }
        }
    }
}

/// Gains minimizing the predicted RMS cross-track error over the adaptive horizon.
pub fn optimize_gains(
    state: &VehicleState,
    path: &ReferencePath,
    s_min: f64,
    l1: f64,
    dt: f64,
    settings: &OptimizerSettings,
) -> GainChoice {
    let horizon = adaptive_interval(state, path, s_min, settings);
    search_gains(settings, |g| rollout_cost(state, path, s_min, l1, g, horizon, dt))
}
