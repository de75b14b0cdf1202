//! Adaptive Dormand–Prince 5(4) integration of the planar field.

use serde::Serialize;

use crate::equilibria::{all_equilibria, EquilibriumId};
use crate::error::{Error, Result};
use crate::model::{FieldCoeffs, ParamPoint, StatePoint, SystemModel};
use crate::tolerances::Tolerances;

/// Coordinates below this are treated as having crossed an axis.
pub const AXIS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Terminal {
    TimeLimit,
    EscapedRadius,
    ConvergedToEquilibrium(EquilibriumId),
    HitAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, StatePoint)>,
    pub terminal: Terminal,
    /// A trajectory started strictly inside came within [`AXIS_SLACK`] of an axis.
    pub touched_axis: bool,
}

impl Trajectory {
    pub fn last(&self) -> StatePoint {
        self.samples.last().map(|s| s.1).unwrap_or(StatePoint::ORIGIN)
    }

    /// Most negative coordinate over all samples.
    pub fn min_coordinate(&self) -> f64 {
        self.samples.iter().map(|(_, p)| p.xi1.min(p.xi2)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
    pub escape_radius: f64,
    /// Field norm below which convergence to an equilibrium is checked.
    pub converge_field: f64,
    /// Distance to an equilibrium that counts as converged.
    pub converge_dist: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_min: 1e-14,
            max_steps: 2_000_000,
            escape_radius: 1.0,
            converge_field: 1e-10,
            converge_dist: 1e-6,
        }
    }
}

// Dormand–Prince tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type V = [f64; 2];

fn axpy(y: V, h: f64, terms: &[(f64, V)]) -> V {
    let mut out = y;
    for &(a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

/// Equilibria (with ids) that trajectories may converge to.
pub fn known_equilibria(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<Vec<(EquilibriumId, StatePoint)>> {
    let mut out = Vec::new();
    for (id, eq) in all_equilibria(model, mu, tols)? {
        if let Ok(eq) = eq {
            if eq.exists() && eq.point.is_finite() {
                out.push((id, eq.point));
            }
        }
    }
    Ok(out)
}

/// Integrates from `xi0` until `t_max`, escape, or convergence to one of `targets`.
pub fn integrate_with(
    coeffs: &FieldCoeffs,
    xi0: StatePoint,
    t_max: f64,
    targets: &[(EquilibriumId, StatePoint)],
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !xi0.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::Validation(format!("t_max must be positive, got {t_max}")));
    }
    let f = |y: V| {
        let (a, b) = coeffs.field(y[0], y[1]);
        [a, b]
    };
    let started_inside = xi0.xi1 > AXIS_SLACK && xi0.xi2 > AXIS_SLACK;
    let mut touched_axis = false;
    let mut y = [xi0.xi1, xi0.xi2];
    let mut t = 0.0;
    let mut samples = vec![(0.0, xi0)];
    let mut k1 = f(y);

    let converged = |y: V, k: V| -> Option<EquilibriumId> {
        if k[0].abs().max(k[1].abs()) > opts.converge_field {
            return None;
        }
        let p = StatePoint::new(y[0], y[1]);
        targets
            .iter()
            .filter(|(_, e)| e.dist(&p) <= opts.converge_dist)
            .min_by(|a, b| a.1.dist(&p).total_cmp(&b.1.dist(&p)))
            .map(|(id, _)| *id)
    };
    if let Some(id) = converged(y, k1) {
        return Ok(Trajectory { samples, terminal: Terminal::ConvergedToEquilibrium(id), touched_axis });
    }
    let fnorm = k1[0].abs().max(k1[1].abs());
    let ynorm = y[0].abs().max(y[1].abs());
    let mut h = if fnorm > 0.0 { (0.01 * (ynorm + opts.atol) / fnorm).min(t_max) } else { t_max };
    let mut steps = 0usize;

    loop {
        if t >= t_max {
            return Ok(Trajectory { samples, terminal: Terminal::TimeLimit, touched_axis });
        }
        if steps >= opts.max_steps {
            return Err(Error::Convergence { iterations: steps, residual: k1[0].abs().max(k1[1].abs()) });
        }
        h = h.min(t_max - t);
        let k2 = f(axpy(y, h, &[(A21, k1)]));
        let k3 = f(axpy(y, h, &[(A31, k1), (A32, k2)]));
        let k4 = f(axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = f(axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
        let k6 = f(axpy(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]));
        let yn = axpy(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        let k7 = f(yn);
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(yn[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() || !yn[0].is_finite() || !yn[1].is_finite() {
            h *= 0.25;
            if h < opts.h_min {
                return Err(Error::StepUnderflow { t, h });
            }
            continue;
        }
        steps += 1;
        if err <= 1.0 {
            t += h;
            y = yn;
            k1 = k7;
            samples.push((t, StatePoint::new(y[0], y[1])));
            if y[0] < -AXIS_SLACK || y[1] < -AXIS_SLACK {
                return Ok(Trajectory { samples, terminal: Terminal::HitAxis, touched_axis: true });
            }
            if started_inside && (y[0] <= AXIS_SLACK || y[1] <= AXIS_SLACK) {
                touched_axis = true;
            }
            if y[0].hypot(y[1]) > opts.escape_radius {
                return Ok(Trajectory { samples, terminal: Terminal::EscapedRadius, touched_axis });
            }
            if let Some(id) = converged(y, k1) {
                return Ok(Trajectory { samples, terminal: Terminal::ConvergedToEquilibrium(id), touched_axis });
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < opts.h_min {
            return Err(Error::StepUnderflow { t, h });
        }
    }
}

/// Integrates the model at `mu`; convergence targets are its own equilibria.
pub fn integrate(
    model: &SystemModel,
    mu: ParamPoint,
    xi0: StatePoint,
    t_max: f64,
    opts: &IntegrateOptions,
    tols: &Tolerances,
) -> Result<Trajectory> {
    let coeffs = model.coeffs(mu)?;
    let targets = known_equilibria(model, mu, tols)?;
    integrate_with(&coeffs, xi0, t_max, &targets, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn equilibrium_start_is_constant() {
        let m = presets::mb();
        let mu = ParamPoint::new(-0.02, -0.01);
        let tols = Tolerances::default();
        let e3 = crate::equilibria::equilibrium_e3(&m, mu, &tols).unwrap();
        let tr = integrate(&m, mu, e3.point, 10.0, &IntegrateOptions::default(), &tols).unwrap();
        assert_eq!(tr.samples.len(), 1);
        assert_eq!(tr.terminal, Terminal::ConvergedToEquilibrium(EquilibriumId::E3));
    }

    #[test]
    fn vertical_axis_is_invariant() {
        let m = presets::ma();
        let tr = integrate(&m, ParamPoint::new(0.01, -0.02), StatePoint::new(0.0, 0.01), 1e5, &IntegrateOptions::default(), &Tolerances::default()).unwrap();
        assert!(tr.samples.iter().all(|(_, p)| p.xi1 == 0.0));
        assert_eq!(tr.terminal, Terminal::ConvergedToEquilibrium(EquilibriumId::O));
    }

    #[test]
    fn exponential_growth_matches_exact_solution() {
        // on the xi1 axis with N = theta = 0 the flow is xi1' = mu1 xi1
        let c = FieldCoeffs { mu1: 0.5, mu2: 0.0, theta: 0.0, gamma: -1.0, delta: 0.0, big_m: 0.0, big_n: 0.0, big_s: 0.0, big_p: 0.0, unit: 1.0 };
        let tr = integrate_with(&c, StatePoint::new(1e-3, 0.0), 4.0, &[], &IntegrateOptions::default()).unwrap();
        let (t, p) = *tr.samples.last().unwrap();
        assert_eq!(t, 4.0);
        assert!((p.xi1 / (1e-3 * 2f64.exp()) - 1.0).abs() < 1e-7);
        assert_eq!(tr.terminal, Terminal::TimeLimit);
    }

    #[test]
    fn times_strictly_increase() {
        let m = presets::ma();
        let tr = integrate(&m, ParamPoint::new(0.0004, 0.02), StatePoint::new(0.03, 0.01), 1e3, &IntegrateOptions::default(), &Tolerances::default()).unwrap();
        assert!(tr.samples.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn bad_horizon_rejected() {
        let m = presets::ma();
        assert!(integrate(&m, ParamPoint::ORIGIN, StatePoint::new(0.1, 0.1), 0.0, &IntegrateOptions::default(), &Tolerances::default()).is_err());
    }
}
