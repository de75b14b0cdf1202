//! Bifurcation curves located by one-dimensional root finding on exact
//! residuals, and sign-predicate region labels of the parameter plane.

use std::fmt;

use serde::Serialize;

use crate::classify::axis_eigenvalues;
use crate::equilibria::{
    analysable_case, axis1_equilibria, derived_constants, discriminant, equilibrium_e3, LeadingCoeffs,
};
use crate::error::{Error, Result};
use crate::model::{DegeneracyCase, ParamPoint, SystemModel};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CurveId {
    DeltaPlus,
    DeltaMinus,
    T2,
    T3,
    T4,
    H,
    H1,
    Xplus,
    Xminus,
    Yplus,
    Yminus,
}

impl CurveId {
    pub const ALL: [CurveId; 11] = [
        CurveId::DeltaPlus,
        CurveId::DeltaMinus,
        CurveId::T2,
        CurveId::T3,
        CurveId::T4,
        CurveId::H,
        CurveId::H1,
        CurveId::Xplus,
        CurveId::Xminus,
        CurveId::Yplus,
        CurveId::Yminus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CurveId::DeltaPlus => "Delta+",
            CurveId::DeltaMinus => "Delta-",
            CurveId::T2 => "T2",
            CurveId::T3 => "T3",
            CurveId::T4 => "T4",
            CurveId::H => "H",
            CurveId::H1 => "H1",
            CurveId::Xplus => "X+",
            CurveId::Xminus => "X-",
            CurveId::Yplus => "Y+",
            CurveId::Yminus => "Y-",
        }
    }

    pub fn valid_for(&self, case: DegeneracyCase) -> bool {
        match self {
            CurveId::DeltaPlus | CurveId::DeltaMinus | CurveId::T3 | CurveId::H => case == DegeneracyCase::CaseA,
            CurveId::T4 | CurveId::H1 => case == DegeneracyCase::CaseB,
            _ => matches!(case, DegeneracyCase::CaseA | DegeneracyCase::CaseB),
        }
    }

    pub fn for_case(case: DegeneracyCase) -> Vec<CurveId> {
        CurveId::ALL.iter().copied().filter(|c| c.valid_for(case)).collect()
    }

    /// `true` when the curve is parameterized by `mu2 = s` and located in `mu1`.
    pub fn param_is_mu2(&self) -> bool {
        matches!(self, CurveId::DeltaPlus | CurveId::DeltaMinus | CurveId::T3 | CurveId::H | CurveId::Yplus | CurveId::Yminus)
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub mu: ParamPoint,
    pub residual: f64,
    pub defining: CurveId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionLabel {
    R00,
    R10minus,
    R10plus,
    R20minus,
    R20plus,
    OnCurve(CurveId),
    Q,
    QComplement,
    Outside,
}

impl RegionLabel {
    pub fn name(&self) -> String {
        match self {
            RegionLabel::R00 => "R00".into(),
            RegionLabel::R10minus => "R10-".into(),
            RegionLabel::R10plus => "R10+".into(),
            RegionLabel::R20minus => "R20-".into(),
            RegionLabel::R20plus => "R20+".into(),
            RegionLabel::OnCurve(c) => format!("on:{}", c.name()),
            RegionLabel::Q => "Q".into(),
            RegionLabel::QComplement => "notQ".into(),
            RegionLabel::Outside => "outside".into(),
        }
    }
}

fn side_error(id: CurveId, what: &str) -> Error {
    Error::SideCondition(format!("{} requires {what}", id.name()))
}

/// Exact defining function of a curve at `mu`.
///
/// Discriminant curves return `theta^2 - 4 N mu1`; T2 returns `xi1(E3)`; T3
/// and T4 return `xi2(E3)`; H and H1 return `p` at `E3`; the axes return the
/// vanishing coordinate.
pub fn curve_residual(model: &SystemModel, id: CurveId, mu: ParamPoint, tols: &Tolerances) -> Result<f64> {
    let case = analysable_case(model)?;
    if !id.valid_for(case) {
        return Err(Error::Case { expected: if id.valid_for(DegeneracyCase::CaseA) { "CaseA" } else { "CaseB" }, found: case });
    }
    model.check_mu(mu)?;
    let lc = LeadingCoeffs::of(model);
    let e3 = |tols: &Tolerances| equilibrium_e3(model, mu, tols).and_then(|e| e.require());
    match id {
        CurveId::DeltaPlus | CurveId::DeltaMinus => {
            let want_pos = id == CurveId::DeltaPlus;
            if (want_pos && mu.mu2 < 0.0) || (!want_pos && mu.mu2 > 0.0) {
                return Err(side_error(id, if want_pos { "mu2 >= 0" } else { "mu2 <= 0" }));
            }
            discriminant(model, mu)
        }
        CurveId::T2 => {
            if mu.mu1 < 0.0 {
                return Err(side_error(id, "mu1 >= 0"));
            }
            Ok(e3(tols)?.point.xi1)
        }
        CurveId::T3 => {
            if lc.delta * mu.mu2 < 0.0 {
                return Err(side_error(id, "delta mu2 > 0"));
            }
            Ok(e3(tols)?.point.xi2)
        }
        CurveId::T4 => {
            if lc.theta * mu.mu1 < 0.0 {
                return Err(side_error(id, "theta mu1 > 0"));
            }
            Ok(e3(tols)?.point.xi2)
        }
        CurveId::H => {
            if mu.mu2 > 0.0 {
                return Err(side_error(id, "mu2 < 0"));
            }
            hopf_quantity(model, mu, tols)
        }
        CurveId::H1 => hopf_quantity(model, mu, tols),
        CurveId::Xplus | CurveId::Xminus => {
            let want_pos = id == CurveId::Xplus;
            if (want_pos && mu.mu1 < 0.0) || (!want_pos && mu.mu1 > 0.0) {
                return Err(side_error(id, if want_pos { "mu1 >= 0" } else { "mu1 <= 0" }));
            }
            Ok(mu.mu2)
        }
        CurveId::Yplus | CurveId::Yminus => {
            let want_pos = id == CurveId::Yplus;
            if (want_pos && mu.mu2 < 0.0) || (!want_pos && mu.mu2 > 0.0) {
                return Err(side_error(id, if want_pos { "mu2 >= 0" } else { "mu2 <= 0" }));
            }
            Ok(mu.mu1)
        }
    }
}

/// Half trace of the Jacobian at `E3`.
pub fn hopf_quantity(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<f64> {
    let e3 = equilibrium_e3(model, mu, tols)?.require()?;
    let j = model.jacobian(mu, e3.point)?;
    Ok(0.5 * (j[0][0] + j[1][1]))
}

/// Lowest-order location of the curve coordinate that is solved for, at parameter `s`.
pub fn lowest_terms_location(model: &SystemModel, id: CurveId, s: f64) -> Result<f64> {
    let lc = LeadingCoeffs::of(model);
    let k = derived_constants(model)?;
    Ok(match id {
        CurveId::DeltaPlus | CurveId::DeltaMinus => lc.theta2 * lc.theta2 * s * s / (4.0 * lc.n),
        CurveId::T2 => s / lc.gamma,
        CurveId::T3 => lc.gamma * k.sigma1.unwrap_or(0.0) * s * s,
        CurveId::H => 2.0 * lc.gamma * k.k3.unwrap_or(0.0) * s * s,
        CurveId::T4 => k.sigma2.unwrap_or(0.0) * s * s,
        CurveId::H1 => s / (lc.gamma - 1.0),
        CurveId::Xplus | CurveId::Xminus | CurveId::Yplus | CurveId::Yminus => 0.0,
    })
}

fn check_param_side(model: &SystemModel, id: CurveId, s: f64) -> Result<()> {
    let lc = LeadingCoeffs::of(model);
    let ok = match id {
        CurveId::DeltaPlus | CurveId::Yplus => s > 0.0,
        CurveId::DeltaMinus | CurveId::Yminus | CurveId::H => s < 0.0,
        CurveId::T2 | CurveId::Xplus => s > 0.0,
        CurveId::Xminus => s < 0.0,
        CurveId::T3 => lc.delta * s > 0.0,
        CurveId::T4 => lc.theta * s > 0.0,
        CurveId::H1 => s != 0.0,
    };
    if ok && s.is_finite() {
        Ok(())
    } else {
        Err(side_error(id, &format!("a parameter on its half-line (got s = {s:e})")))
    }
}

/// Safeguarded root finder on `[a, b]` with `f(a) f(b) < 0`: secant steps
/// that stay inside the bracket, bisection otherwise.
pub fn find_root(f: &mut dyn FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<(f64, f64)> {
    if fa == 0.0 {
        return Ok((a, 0.0));
    }
    if fb == 0.0 {
        return Ok((b, 0.0));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!("no sign change on [{a:e}, {b:e}]")));
    }
    let mut bisect_next = false;
    for _ in 0..200 {
        let width = (b - a).abs();
        if width <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) || width == 0.0 {
            break;
        }
        let mut x = if bisect_next { 0.5 * (a + b) } else { b - fb * (b - a) / (fb - fa) };
        let lo = a.min(b);
        let hi = a.max(b);
        let margin = 1e-3 * width;
        if !(x > lo + margin && x < hi - margin) || !x.is_finite() {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok((x, 0.0));
        }
        let old_width = width;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // alternate with bisection whenever the bracket fails to halve
        bisect_next = (b - a).abs() > 0.5 * old_width;
    }
    Ok(if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) })
}

/// A point on the named curve with machine-precision residual.
///
/// Curves parameterized by `mu2 = s` (discriminant, T3, H, vertical axes)
/// are solved in `mu1`; the others in `mu2`. The lowest-order formula is the
/// centre of an expanding bracket that is kept inside the validity disk.
pub fn curve_point(model: &SystemModel, id: CurveId, s: f64, tols: &Tolerances) -> Result<CurveSample> {
    let case = analysable_case(model)?;
    if !id.valid_for(case) {
        return Err(Error::Case { expected: if id.valid_for(DegeneracyCase::CaseA) { "CaseA" } else { "CaseB" }, found: case });
    }
    check_param_side(model, id, s)?;
    if s.abs() > model.radius {
        return Err(Error::Bracket(format!("parameter {s:e} lies outside the validity radius")));
    }
    let at = |t: f64| if id.param_is_mu2() { ParamPoint::new(t, s) } else { ParamPoint::new(s, t) };
    if matches!(id, CurveId::Xplus | CurveId::Xminus | CurveId::Yplus | CurveId::Yminus) {
        let mu = at(0.0);
        return Ok(CurveSample { mu, residual: curve_residual(model, id, mu, tols)?, defining: id });
    }
    let limit = (model.radius * model.radius - s * s).max(0.0).sqrt();
    let centre = lowest_terms_location(model, id, s)?.clamp(-limit, limit);
    let mut eval = |t: f64| curve_residual(model, id, at(t), tols);
    let f0 = eval(centre)?;
    if f0 == 0.0 {
        return Ok(CurveSample { mu: at(centre), residual: 0.0, defining: id });
    }
    let mut w = (0.25 * centre.abs()).max(0.05 * s * s).max(1e-300);
    loop {
        let (lo, hi) = ((centre - w).max(-limit), (centre + w).min(limit));
        for (x, other) in [(lo, centre), (hi, centre)] {
            if x == other {
                continue;
            }
            if let Ok(fx) = eval(x) {
                if fx.signum() != f0.signum() || fx == 0.0 {
                    let (a, b) = if x < other { (x, other) } else { (other, x) };
                    let (fa, fb) = if x < other { (fx, f0) } else { (f0, fx) };
                    let (t, r) = find_root(&mut eval, a, b, fa, fb)?;
                    if r.abs() > tols.on_curve {
                        return Err(Error::Bracket(format!("{} residual {r:e} after root finding", id.name())));
                    }
                    return Ok(CurveSample { mu: at(t), residual: r, defining: id });
                }
            }
        }
        if lo <= -limit && hi >= limit {
            return Err(Error::Bracket(format!("{} has no root at s = {s:e} inside the validity disk", id.name())));
        }
        w *= 2.0;
    }
}

/// `n` evenly spaced samples of a curve over `0 < |s| <= s_max`; parameters
/// where the curve does not exist are skipped.
pub fn sample_curve(model: &SystemModel, id: CurveId, s_max: f64, n: usize, tols: &Tolerances) -> Vec<CurveSample> {
    let lc = LeadingCoeffs::of(model);
    let sign = match id {
        CurveId::DeltaMinus | CurveId::Yminus | CurveId::H | CurveId::Xminus => -1.0,
        CurveId::T3 => lc.delta.signum(),
        CurveId::T4 => lc.theta.signum(),
        _ => 1.0,
    };
    let signs: &[f64] = if id == CurveId::H1 { &[-1.0, 1.0] } else { &[1.0] };
    let mut out = Vec::new();
    for &extra in signs {
        let mut branch: Vec<CurveSample> = (1..=n)
            .filter_map(|k| curve_point(model, id, sign * extra * s_max * k as f64 / n as f64, tols).ok())
            .collect();
        if extra < 0.0 {
            branch.reverse();
        }
        out.extend(branch);
    }
    out
}

/// The alternative T3 characterization: zero of the transverse eigenvalue at
/// `E11` (when `2N - delta theta2 > 0`) or `E12` (otherwise), solved in `mu1` at `mu2 = s`.
pub fn transverse_zero_point(model: &SystemModel, s: f64, tols: &Tolerances) -> Result<ParamPoint> {
    let lc = LeadingCoeffs::of(model);
    let k = derived_constants(model)?;
    check_param_side(model, CurveId::T3, s)?;
    let use_e11 = k.two_n_minus_delta_theta2.unwrap_or(0.0) > 0.0;
    let limit = (model.radius * model.radius - s * s).max(0.0).sqrt();
    let mut eval = |t: f64| -> Result<f64> {
        let mu = ParamPoint::new(t, s);
        let (e11, e12) = axis1_equilibria(model, mu, tols)?;
        let e = if use_e11 { e11 } else { e12 };
        if !e.exists() {
            return Err(Error::Bracket("axis equilibria are complex here".into()));
        }
        Ok(axis_eigenvalues(model, mu, e.point.xi1)?.1)
    };
    let centre = (lc.gamma * k.sigma1.unwrap_or(0.0) * s * s).clamp(-limit, limit);
    let f0 = eval(centre)?;
    if f0 == 0.0 {
        return Ok(ParamPoint::new(centre, s));
    }
    let mut w = (0.25 * centre.abs()).max(0.05 * s * s);
    loop {
        let (lo, hi) = ((centre - w).max(-limit), (centre + w).min(limit));
        for x in [lo, hi] {
            if let Ok(fx) = eval(x) {
                if fx.signum() != f0.signum() {
                    let (a, b, fa, fb) = if x < centre { (x, centre, fx, f0) } else { (centre, x, f0, fx) };
                    let (t, _) = find_root(&mut eval, a, b, fa, fb)?;
                    return Ok(ParamPoint::new(t, s));
                }
            }
        }
        if lo <= -limit && hi >= limit {
            return Err(Error::Bracket("transverse eigenvalue has no zero".into()));
        }
        w *= 2.0;
    }
}

/// Both coordinates of the refined interior equilibrium are positive.
pub fn e3_interior(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<bool> {
    let e3 = equilibrium_e3(model, mu, tols)?;
    Ok(e3.exists() && e3.point.xi1 > 0.0 && e3.point.xi2 > 0.0)
}

/// Region `R` (first case): the interior equilibrium is nontrivial.
pub fn in_region_r(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<bool> {
    if analysable_case(model)? != DegeneracyCase::CaseA {
        return Err(Error::Case { expected: "CaseA", found: analysable_case(model)? });
    }
    e3_interior(model, mu, tols)
}

/// Region `Q` (second case): the interior equilibrium is nontrivial.
pub fn in_region_q(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<bool> {
    if analysable_case(model)? != DegeneracyCase::CaseB {
        return Err(Error::Case { expected: "CaseB", found: analysable_case(model)? });
    }
    e3_interior(model, mu, tols)
}

/// Region label of `mu`.
///
/// The `R20` and `R10` splits use the sign of `xi2(E3)`, i.e. the side of the
/// numerically located T3, not its lowest-order parabola.
pub fn region_of(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<RegionLabel> {
    let case = analysable_case(model)?;
    if !(mu.mu1.is_finite() && mu.mu2.is_finite()) {
        return Err(Error::NonFinite("parameter point"));
    }
    if mu.norm() > model.radius * (1.0 + 1e-12) {
        return Ok(RegionLabel::Outside);
    }
    let tol = tols.on_curve;
    if mu.mu1.abs() <= tol {
        return Ok(RegionLabel::OnCurve(if mu.mu2 >= 0.0 { CurveId::Yplus } else { CurveId::Yminus }));
    }
    if mu.mu2.abs() <= tol {
        return Ok(RegionLabel::OnCurve(if mu.mu1 > 0.0 { CurveId::Xplus } else { CurveId::Xminus }));
    }
    let c = model.coeffs(mu)?;
    let lc = LeadingCoeffs::of(model);
    if case == DegeneracyCase::CaseB {
        let e3 = equilibrium_e3(model, mu, tols)?;
        let real = e3.exists();
        if real && mu.mu1 > 0.0 && e3.point.xi1.abs() <= tol {
            return Ok(RegionLabel::OnCurve(CurveId::T2));
        }
        if real && lc.theta * mu.mu1 > 0.0 && e3.point.xi2.abs() <= tol {
            return Ok(RegionLabel::OnCurve(CurveId::T4));
        }
        return Ok(if real && e3.point.xi1 > 0.0 && e3.point.xi2 > 0.0 { RegionLabel::Q } else { RegionLabel::QComplement });
    }
    let disc = c.theta * c.theta - 4.0 * c.big_n * mu.mu1;
    if disc.abs() <= tol {
        return Ok(RegionLabel::OnCurve(if mu.mu2 > 0.0 { CurveId::DeltaPlus } else { CurveId::DeltaMinus }));
    }
    let e3 = equilibrium_e3(model, mu, tols)?;
    let real = e3.exists();
    if real && mu.mu1 > 0.0 && e3.point.xi1.abs() <= tol {
        return Ok(RegionLabel::OnCurve(CurveId::T2));
    }
    let on_t3 = real && lc.delta * mu.mu2 > 0.0 && e3.point.xi2.abs() <= tol;
    if disc < 0.0 {
        return Ok(RegionLabel::R00);
    }
    let product = mu.mu1 / c.big_n;
    if product < 0.0 {
        if on_t3 {
            return Ok(RegionLabel::OnCurve(CurveId::T3));
        }
        return Ok(if real && lc.delta * mu.mu2 > 0.0 && e3.point.xi2 > 0.0 { RegionLabel::R10plus } else { RegionLabel::R10minus });
    }
    if c.theta / c.big_n > 0.0 {
        if on_t3 {
            return Ok(RegionLabel::OnCurve(CurveId::T3));
        }
        return Ok(if real && e3.point.xi2 > 0.0 { RegionLabel::R20plus } else { RegionLabel::R20minus });
    }
    Ok(RegionLabel::R00)
}
