//! Trajectories, nullclines and first-quadrant phase portraits.

mod integrate;
mod nullclines;

pub use integrate::{integrate, integrate_with, known_equilibria, IntegrateOptions, Terminal, Trajectory, AXIS_SLACK};
pub use nullclines::{nullclines, nullclines_of, Nullclines, Polyline, MIN_RESOLUTION};

use serde::Serialize;

use crate::classify::{classify_equilibrium, StabilityClass};
use crate::equilibria::{all_equilibria, Equilibrium};
use crate::error::{Error, Result};
use crate::model::{ParamPoint, Rect, StatePoint, SystemModel};
use crate::par::{map_range, Execution};
use crate::tolerances::Tolerances;

/// Number of seeds placed on a small circle around each proper equilibrium.
pub const SEEDS_PER_EQUILIBRIUM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitSpec {
    /// State-space window, inside the closed first quadrant.
    pub window: Rect,
    pub seeds_per_side: usize,
    pub t_max: f64,
    pub escape_radius: f64,
    /// Grid cells per side for the nullclines.
    pub nullcline_resolution: usize,
}

impl PortraitSpec {
    pub fn new(window: Rect) -> Self {
        Self { window, seeds_per_side: 6, t_max: 2e4, escape_radius: 1.0, nullcline_resolution: 96 }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.window;
        if !w.is_ordered() || w.x0 < 0.0 || w.y0 < 0.0 {
            return Err(Error::Validation(format!("portrait window {w:?} must be ordered and inside the first quadrant")));
        }
        if self.seeds_per_side == 0 {
            return Err(Error::Validation("seeds_per_side must be at least 1".into()));
        }
        if self.t_max.is_nan() || self.t_max <= 0.0 || self.escape_radius.is_nan() || self.escape_radius <= 0.0 {
            return Err(Error::Validation("t_max and escape_radius must be positive".into()));
        }
        if self.nullcline_resolution < MIN_RESOLUTION {
            return Err(Error::Validation(format!("nullcline resolution must be at least {MIN_RESOLUTION}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitEquilibrium {
    pub equilibrium: Equilibrium,
    pub class: Option<StabilityClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Portrait {
    pub mu: ParamPoint,
    pub spec: PortraitSpec,
    pub seeds: Vec<StatePoint>,
    /// One trajectory per seed, in seed order.
    pub trajectories: Vec<Trajectory>,
    pub nullclines: Nullclines,
    /// Proper equilibria with their classification.
    pub equilibria: Vec<PortraitEquilibrium>,
}

impl Portrait {
    /// Distinct terminal causes over all trajectories, sorted by first appearance.
    pub fn terminal_inventory(&self) -> Vec<Terminal> {
        let mut out: Vec<Terminal> = Vec::new();
        for t in &self.trajectories {
            if !out.contains(&t.terminal) {
                out.push(t.terminal);
            }
        }
        out
    }
}

/// Seeds on the window boundary at `(k + 1/2) / n` along each side, then
/// [`SEEDS_PER_EQUILIBRIUM`] points around each proper equilibrium in the window.
pub fn portrait_seeds(spec: &PortraitSpec, equilibria: &[StatePoint]) -> Vec<StatePoint> {
    let w = &spec.window;
    if w.is_degenerate() {
        return Vec::new();
    }
    let n = spec.seeds_per_side;
    let mut seeds = Vec::with_capacity(4 * n + SEEDS_PER_EQUILIBRIUM * equilibria.len());
    for k in 0..n {
        let u = (k as f64 + 0.5) / n as f64;
        let x = w.x0 + u * w.width();
        let y = w.y0 + u * w.height();
        seeds.push(StatePoint::new(x, w.y0));
        seeds.push(StatePoint::new(w.x1, y));
        seeds.push(StatePoint::new(w.x1 - u * w.width(), w.y1));
        seeds.push(StatePoint::new(w.x0, w.y1 - u * w.height()));
    }
    let rho = 0.02 * w.width().min(w.height());
    for e in equilibria {
        for k in 0..SEEDS_PER_EQUILIBRIUM {
            let a = std::f64::consts::TAU * (k as f64 + 0.5) / SEEDS_PER_EQUILIBRIUM as f64;
            let p = StatePoint::new(e.xi1 + rho * a.cos(), e.xi2 + rho * a.sin());
            if p.xi1 >= 0.0 && p.xi2 >= 0.0 && w.contains(p.xi1, p.xi2) {
                seeds.push(p);
            }
        }
    }
    seeds
}

/// Phase portrait at `mu`. Trajectories run concurrently and are returned in seed order.
pub fn phase_portrait(
    model: &SystemModel,
    mu: ParamPoint,
    spec: &PortraitSpec,
    tols: &Tolerances,
    exec: Execution,
) -> Result<Portrait> {
    spec.validate()?;
    let coeffs = model.coeffs(mu)?;
    let mut equilibria = Vec::new();
    for (_, eq) in all_equilibria(model, mu, tols)? {
        let eq = eq?;
        if eq.is_proper() {
            let class = classify_equilibrium(model, mu, &eq, tols).ok().map(|c| c.1);
            equilibria.push(PortraitEquilibrium { equilibrium: eq, class });
        }
    }
    let targets = known_equilibria(model, mu, tols)?;
    let in_window: Vec<StatePoint> = equilibria
        .iter()
        .map(|e| e.equilibrium.point)
        .filter(|p| spec.window.contains(p.xi1, p.xi2))
        .collect();
    let seeds = portrait_seeds(spec, &in_window);
    let opts = IntegrateOptions { escape_radius: spec.escape_radius, ..IntegrateOptions::default() };
    let results = map_range(seeds.len(), exec, |k| integrate_with(&coeffs, seeds[k], spec.t_max, &targets, &opts));
    let trajectories = results.into_iter().collect::<Result<Vec<_>>>()?;
    let nullclines = nullclines_of(&coeffs, &spec.window, spec.nullcline_resolution)?;
    Ok(Portrait { mu, spec: spec.clone(), seeds, trajectories, nullclines, equilibria })
}
