//! Sotomayor certificates for saddle-node and transcritical curves, and Hopf
//! transversality on the Hopf curve.

use serde::Serialize;

use crate::classify::{eigen2, lyapunov1_numeric, EigenKind};
use crate::curves::{curve_point, CurveId};
use crate::equilibria::{
    analysable_case, axis1_equilibria, derived_constants, equilibrium_e1, equilibrium_e2, equilibrium_e3,
    Equilibrium, LeadingCoeffs,
};
use crate::error::{Error, Result};
use crate::model::{contract2, DegeneracyCase, Mat2, ParamPoint, StatePoint, SystemModel};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    SaddleNode,
    Transcritical,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SotomayorReport {
    pub zero_eigenvalue: f64,
    pub v: [f64; 2],
    pub w: [f64; 2],
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Absolute threshold the constants were compared against.
    pub tol: f64,
    pub verdict: Verdict,
}

impl SotomayorReport {
    /// Re-orients `v` and `w` to have nonnegative projections on reference
    /// vectors. Flipping `w` negates all three constants; flipping `v` only `C2`.
    pub fn align(mut self, v_ref: [f64; 2], w_ref: [f64; 2]) -> Self {
        if self.w[0] * w_ref[0] + self.w[1] * w_ref[1] < 0.0 {
            self.w = [-self.w[0], -self.w[1]];
            self.c1 = -self.c1;
            self.c2 = -self.c2;
            self.c3 = -self.c3;
        }
        if self.v[0] * v_ref[0] + self.v[1] * v_ref[1] < 0.0 {
            self.v = [-self.v[0], -self.v[1]];
            self.c2 = -self.c2;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfReport {
    pub omega: f64,
    pub p: f64,
    pub dp_dbif: f64,
    pub l1: f64,
}

/// Unit vector with its largest-magnitude component positive.
fn normalize(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    let s = if v[0].abs() >= v[1].abs() { v[0].signum() } else { v[1].signum() };
    [s * v[0] / n, s * v[1] / n]
}

/// Right and left null vectors of a singular 2x2 matrix from its adjugate.
fn null_vectors(j: &Mat2) -> ([f64; 2], [f64; 2]) {
    let [[a, b], [c, d]] = *j;
    let pick = |x: [f64; 2], y: [f64; 2]| if x[0].hypot(x[1]) >= y[0].hypot(y[1]) { x } else { y };
    // columns of adj(J) span ker J, rows span ker J^T
    let v = pick([d, -c], [-b, a]);
    let w = pick([d, -b], [-c, a]);
    (normalize(v), normalize(w))
}

/// Sotomayor constants at `(xi0, mu0)` for bifurcation parameter `mu_bif`.
pub fn sotomayor_check(
    model: &SystemModel,
    mu0: ParamPoint,
    xi0: StatePoint,
    bif_param: u8,
    tols: &Tolerances,
) -> Result<SotomayorReport> {
    let j = model.jacobian(mu0, xi0)?;
    let rep = eigen2(&j)?;
    let (l1, l2) = match rep.kind {
        EigenKind::RealPair { l1, l2 } => (l1, l2),
        EigenKind::ComplexPair { .. } => return Err(Error::NotSingular(rep.min_modulus())),
    };
    let z = tols.zero_eigen;
    let zero_eigenvalue = match (l1.abs() <= z, l2.abs() <= z) {
        (true, true) => return Err(Error::DoubleZero),
        (false, false) => return Err(Error::NotSingular(l1.abs().min(l2.abs()))),
        (true, false) => l1,
        (false, true) => l2,
    };
    let (v, w) = null_vectors(&j);
    let f_mu = model.d_mu(mu0, xi0, bif_param)?;
    let df_mu = model.d_mu_jacobian(mu0, xi0, bif_param)?;
    let hv = contract2(&model.hessian(mu0, xi0)?, v);
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    let c1 = dot(w, f_mu);
    let c2 = dot(w, [df_mu[0][0] * v[0] + df_mu[0][1] * v[1], df_mu[1][0] * v[0] + df_mu[1][1] * v[1]]);
    let c3 = dot(w, hv);
    let tol = tols.sotomayor * rep.scale.max(1.0);
    let verdict = if c1.abs() > tol && c3.abs() > tol {
        Verdict::SaddleNode
    } else if c1.abs() <= tol && c2.abs() > tol && c3.abs() > tol {
        Verdict::Transcritical
    } else {
        Verdict::Inconclusive
    };
    Ok(SotomayorReport { zero_eigenvalue, v, w, c1, c2, c3, tol, verdict })
}

/// Hopf quantities at `E3` for a point on the Hopf curve: frequency, total
/// derivative of the half trace along `mu1`, and the first Lyapunov coefficient.
pub fn hopf_check(model: &SystemModel, mu0: ParamPoint, tols: &Tolerances) -> Result<HopfReport> {
    let e3 = equilibrium_e3(model, mu0, tols)?.require()?;
    let x = e3.point;
    let j = model.jacobian(mu0, x)?;
    let rep = eigen2(&j)?;
    let omega = match rep.kind {
        EigenKind::ComplexPair { omega, .. } if rep.p.abs() <= tols.hopf_p => omega,
        _ => return Err(Error::NotOnHopfCurve { p: rep.p, det: rep.det }),
    };
    // dE3/dmu1 = -Dg^-1 dg/dmu1
    let c = model.coeffs(mu0)?;
    let dg = c.factor_jacobian(x.xi1, x.xi2);
    let (g1m, g2m) = model.coeffs_dmu(mu0, 1)?.factors(x.xi1, x.xi2);
    let det = dg[0][0] * dg[1][1] - dg[0][1] * dg[1][0];
    let dx = [-(dg[1][1] * g1m - dg[0][1] * g2m) / det, -(-dg[1][0] * g1m + dg[0][0] * g2m) / det];
    let h = model.hessian(mu0, x)?;
    let dj = model.d_mu_jacobian(mu0, x, 1)?;
    let mut dtrace = dj[0][0] + dj[1][1];
    for (k, dxk) in dx.iter().enumerate() {
        dtrace += (h[0][0][k] + h[1][1][k]) * dxk;
    }
    let l1 = lyapunov1_numeric(model, mu0, tols)?;
    Ok(HopfReport { omega, p: rep.p, dp_dbif: 0.5 * dtrace, l1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl CheckStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateRow {
    pub curve: CurveId,
    pub s: f64,
    pub mu: Option<ParamPoint>,
    pub status: CheckStatus,
    pub detail: String,
}

/// Parameter values at which each curve is certified.
pub const VERIFY_PARAMS: [f64; 6] = [0.02, 0.01, 0.005, -0.005, -0.01, -0.02];

/// Reference orientation and expected constant signs on a curve, derived
/// from the lowest-order forms of the null vectors.
struct Expectation {
    v_ref: [f64; 2],
    w_ref: [f64; 2],
    c2_sign: Option<f64>,
    c3_sign: Option<f64>,
    /// Exact values `(C2, C3)` under unit reference vectors, checked to 1%.
    exact: Option<(f64, f64)>,
}

fn sign_ok(value: f64, expected: Option<f64>) -> bool {
    expected.is_none_or(|s| value * s > 0.0)
}

/// Equilibrium, bifurcation parameter and expectations for a transcritical sample.
fn transcritical_setup(
    model: &SystemModel,
    id: CurveId,
    mu: ParamPoint,
    tols: &Tolerances,
) -> Result<(Equilibrium, u8, Expectation)> {
    let lc = LeadingCoeffs::of(model);
    let case = analysable_case(model)?;
    let k = derived_constants(model)?;
    Ok(match id {
        CurveId::T2 => {
            let e2 = equilibrium_e2(model, mu, tols)?;
            let exp = if case == DegeneracyCase::CaseA {
                Expectation {
                    v_ref: [1.0 / lc.delta, 1.0],
                    w_ref: [1.0, 0.0],
                    c2_sign: Some(lc.delta.signum()),
                    c3_sign: Some((lc.gamma / lc.delta).signum()),
                    exact: None,
                }
            } else {
                Expectation { v_ref: [1.0, 0.0], w_ref: [1.0, 0.0], c2_sign: None, c3_sign: None, exact: None }
            };
            (e2, 1, exp)
        }
        CurveId::T3 => {
            let two_n = k.two_n_minus_delta_theta2.unwrap_or(0.0);
            let (e11, e12) = axis1_equilibria(model, mu, tols)?;
            let e = if two_n > 0.0 { e11 } else { e12 };
            let v1 = lc.gamma * lc.delta / (mu.mu2 * (lc.delta * lc.theta2 - 2.0 * lc.n));
            (
                e,
                1,
                Expectation {
                    v_ref: [v1, 1.0],
                    w_ref: [0.0, 1.0],
                    c2_sign: Some((-lc.delta1 * mu.mu2 / lc.delta).signum()),
                    c3_sign: Some((lc.gamma / (two_n * mu.mu2)).signum()),
                    exact: None,
                },
            )
        }
        CurveId::T4 => (
            equilibrium_e1(model, mu, tols)?,
            2,
            Expectation {
                v_ref: [lc.gamma / lc.theta, 1.0],
                w_ref: [0.0, 1.0],
                c2_sign: Some(1.0),
                c3_sign: Some(1.0),
                exact: None,
            },
        ),
        CurveId::Xplus | CurveId::Xminus => (
            Equilibrium::origin(),
            2,
            Expectation {
                v_ref: [0.0, 1.0],
                w_ref: [0.0, 1.0],
                c2_sign: Some(1.0),
                c3_sign: Some(1.0),
                exact: Some((1.0, 2.0)),
            },
        ),
        CurveId::Yplus | CurveId::Yminus => {
            let theta = model.coeffs(mu)?.theta;
            (
                Equilibrium::origin(),
                1,
                Expectation {
                    v_ref: [1.0, 0.0],
                    w_ref: [1.0, 0.0],
                    c2_sign: Some(1.0),
                    c3_sign: Some(-theta.signum()),
                    exact: Some((1.0, -2.0 * theta)),
                },
            )
        }
        _ => return Err(Error::Validation(format!("{} is not a transcritical curve", id.name()))),
    })
}

/// Aligned report and verdict at one transcritical sample.
pub fn transcritical_certificate(
    model: &SystemModel,
    id: CurveId,
    mu: ParamPoint,
    tols: &Tolerances,
) -> Result<(SotomayorReport, CheckStatus, String)> {
    let (eq, bif, exp) = transcritical_setup(model, id, mu, tols)?;
    let rep = sotomayor_check(model, mu, eq.point, bif, tols)?.align(exp.v_ref, exp.w_ref);
    let strong = 10.0 * rep.tol;
    let mut ok = rep.verdict == Verdict::Transcritical && rep.c2.abs() >= strong && rep.c3.abs() >= strong;
    ok &= sign_ok(rep.c2, exp.c2_sign) && sign_ok(rep.c3, exp.c3_sign);
    if let Some((c2, c3)) = exp.exact {
        ok &= (rep.c2 - c2).abs() <= 0.01 * c2.abs() && (rep.c3 - c3).abs() <= 0.01 * c3.abs();
    }
    let detail = format!("{:?} at {} C1={:.3e} C2={:.3e} C3={:.3e}", rep.verdict, eq.id, rep.c1, rep.c2, rep.c3);
    Ok((rep, if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail))
}

/// Saddle-node certificate at a discriminant-curve sample.
pub fn saddle_node_certificate(
    model: &SystemModel,
    mu: ParamPoint,
    tols: &Tolerances,
) -> Result<(SotomayorReport, CheckStatus, String)> {
    let lc = LeadingCoeffs::of(model);
    let (e11, e12) = axis1_equilibria(model, mu, tols)?;
    let gap = (e11.point.xi1 - e12.point.xi1).abs();
    let xi0 = StatePoint::new(0.5 * (e11.point.xi1 + e12.point.xi1), 0.0);
    let two_n = 2.0 * lc.n - lc.delta * lc.theta2;
    let w_ref = [(lc.delta * lc.theta2 - 2.0 * lc.n) / (lc.gamma * lc.theta2), 1.0];
    let rep = sotomayor_check(model, mu, xi0, 1, tols)?.align([1.0, 0.0], w_ref);
    let c1_low = -mu.mu2 * two_n / (2.0 * lc.n * lc.gamma);
    let c3_low = -mu.mu2 * two_n / lc.gamma;
    let strong = 10.0 * rep.tol;
    let ok = rep.verdict == Verdict::SaddleNode
        && rep.c1.abs() >= strong
        && rep.c3.abs() >= strong
        && (rep.c1 * rep.c3) * (c1_low * c3_low) > 0.0
        && gap <= 1e-6;
    let detail = format!(
        "{:?} C1={:.3e} C3={:.3e} |xi11-xi12|={:.1e}",
        rep.verdict, rep.c1, rep.c3, gap
    );
    Ok((rep, if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail))
}

/// Nondegeneracy hypotheses for each curve; `None` when they hold.
fn hypotheses_fail(model: &SystemModel, id: CurveId) -> Option<String> {
    let lc = LeadingCoeffs::of(model);
    let case = analysable_case(model).ok()?;
    let k = derived_constants(model).ok()?;
    let two_n = k.two_n_minus_delta_theta2.unwrap_or(0.0);
    let need = |cond: bool, what: &str| if cond { None } else { Some(format!("hypothesis {what} fails")) };
    match (case, id) {
        (DegeneracyCase::CaseA, CurveId::DeltaPlus | CurveId::DeltaMinus) => {
            need(lc.theta2 * lc.delta != 0.0 && lc.n != 0.0 && two_n != 0.0, "theta2 delta N (2N - delta theta2) != 0")
        }
        (DegeneracyCase::CaseA, CurveId::T3) => need(
            lc.theta2 * lc.delta * lc.delta1 != 0.0 && lc.n != 0.0 && two_n != 0.0,
            "theta2 delta delta1 N (2N - delta theta2) != 0",
        ),
        (DegeneracyCase::CaseA, CurveId::H) => need(
            lc.delta < 0.0 && k.sigma1.unwrap_or(0.0) < 0.0 && two_n < 0.0 && lc.n != 0.0,
            "delta < 0, sigma1 < 0, 2N - delta theta2 < 0",
        ),
        (DegeneracyCase::CaseA, _) => {
            need(lc.theta2 * lc.delta != 0.0 && lc.n != 0.0 && two_n != 0.0, "theta2 delta N (2N - delta theta2) != 0")
        }
        (DegeneracyCase::CaseB, CurveId::H1) => need(lc.theta < 0.0 && lc.delta1 != 0.0, "theta < 0, delta1 != 0"),
        (DegeneracyCase::CaseB, _) => need(lc.theta * lc.delta1 != 0.0, "theta delta1 != 0"),
        _ => Some("unsupported case".into()),
    }
}

fn hopf_row(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<(CheckStatus, String)> {
    let lc = LeadingCoeffs::of(model);
    let two_n = derived_constants(model)?.two_n_minus_delta_theta2.unwrap_or(0.0);
    let rep = hopf_check(model, mu, tols)?;
    let omega0 = (mu.mu2 / lc.delta) * (-lc.gamma * mu.mu2 * two_n).sqrt();
    let rel = (rep.omega - omega0).abs() / omega0;
    let slope = -1.0 / (2.0 * lc.gamma);
    let slope_rel = (rep.dp_dbif - slope).abs() / slope.abs();
    // both quantities agree with their lowest-order forms up to O(|mu|)
    let budget = 5.0 * mu.norm().max(1e-3);
    let ok = rep.p.abs() <= tols.hopf_p && rel <= budget && slope_rel <= budget && rep.l1.is_finite();
    Ok((
        if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("omega={:.4e} (lowest {:.4e}) dp/dmu1={:.4} l1={:.4e}", rep.omega, omega0, rep.dp_dbif, rep.l1),
    ))
}

fn no_hopf_row(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<(CheckStatus, String)> {
    let e3 = equilibrium_e3(model, mu, tols)?;
    let interior = e3.exists() && e3.point.xi1 > 0.0 && e3.point.xi2 > 0.0;
    Ok((
        if interior { CheckStatus::Fail } else { CheckStatus::Pass },
        format!("E3=({:.3e},{:.3e}) outside Q", e3.point.xi1, e3.point.xi2),
    ))
}

/// Certificates over every case-valid curve at [`VERIFY_PARAMS`].
pub fn verify_all(model: &SystemModel, tols: &Tolerances) -> Result<Vec<CertificateRow>> {
    let case = analysable_case(model)?;
    let mut rows = Vec::new();
    for id in CurveId::for_case(case) {
        if let Some(why) = hypotheses_fail(model, id) {
            rows.push(CertificateRow { curve: id, s: f64::NAN, mu: None, status: CheckStatus::Skip, detail: why });
            continue;
        }
        for &s in VERIFY_PARAMS.iter() {
            let s = s * model.radius / 0.1;
            let sample = match curve_point(model, id, s, tols) {
                Ok(p) => p,
                Err(Error::SideCondition(_)) => continue,
                Err(e) => {
                    rows.push(CertificateRow { curve: id, s, mu: None, status: CheckStatus::Fail, detail: e.to_string() });
                    continue;
                }
            };
            let mu = sample.mu;
            let outcome = match id {
                CurveId::DeltaPlus | CurveId::DeltaMinus => saddle_node_certificate(model, mu, tols).map(|(_, st, d)| (st, d)),
                CurveId::H => hopf_row(model, mu, tols),
                CurveId::H1 => no_hopf_row(model, mu, tols),
                _ => transcritical_certificate(model, id, mu, tols).map(|(_, st, d)| (st, d)),
            };
            let (status, detail) = outcome.unwrap_or_else(|e| (CheckStatus::Fail, e.to_string()));
            rows.push(CertificateRow { curve: id, s, mu: Some(mu), status, detail });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn null_vectors_of_triangular_matrix() {
        let (v, w) = null_vectors(&[[0.0, 2.0], [0.0, 3.0]]);
        assert_eq!(v, [1.0, 0.0]);
        let n = 13f64.sqrt();
        assert!((w[0] - 3.0 / n).abs() < 1e-15 && (w[1] + 2.0 / n).abs() < 1e-15);
    }

    #[test]
    fn align_flips_signs() {
        let r = SotomayorReport {
            zero_eigenvalue: 0.0,
            v: [1.0, 0.0],
            w: [0.0, 1.0],
            c1: 1.0,
            c2: 2.0,
            c3: 3.0,
            tol: 1e-8,
            verdict: Verdict::SaddleNode,
        };
        let a = r.align([-1.0, 0.0], [0.0, 1.0]);
        assert_eq!((a.c1, a.c2, a.c3), (1.0, -2.0, 3.0));
        let b = r.align([1.0, 0.0], [0.0, -1.0]);
        assert_eq!((b.c1, b.c2, b.c3), (-1.0, -2.0, -3.0));
    }

    #[test]
    fn origin_on_vertical_axis() {
        let m = presets::ma();
        let mu = ParamPoint::new(0.0, 0.01);
        let r = sotomayor_check(&m, mu, StatePoint::ORIGIN, 1, &t()).unwrap();
        assert_eq!(r.verdict, Verdict::Transcritical);
        assert!((r.c2 - 1.0).abs() < 1e-12);
        assert!((r.c3 + 0.06).abs() < 1e-12);
    }

    #[test]
    fn saddle_node_on_delta_plus() {
        let m = presets::ma();
        let p = curve_point(&m, CurveId::DeltaPlus, 0.01, &t()).unwrap();
        let (r, st, _) = saddle_node_certificate(&m, p.mu, &t()).unwrap();
        assert_eq!(r.verdict, Verdict::SaddleNode);
        assert_eq!(st, CheckStatus::Pass);
    }

    #[test]
    fn transcritical_on_t3() {
        let m = presets::ma();
        let p = curve_point(&m, CurveId::T3, 0.01, &t()).unwrap();
        let (r, st, d) = transcritical_certificate(&m, CurveId::T3, p.mu, &t()).unwrap();
        assert_eq!(r.verdict, Verdict::Transcritical, "{d}");
        assert_eq!(st, CheckStatus::Pass, "{d}");
    }

    #[test]
    fn singular_point_required() {
        let m = presets::ma();
        assert!(matches!(
            sotomayor_check(&m, ParamPoint::new(0.01, 0.02), StatePoint::ORIGIN, 1, &t()),
            Err(Error::NotSingular(_))
        ));
        assert!(matches!(
            sotomayor_check(&m, ParamPoint::ORIGIN, StatePoint::ORIGIN, 1, &t()),
            Err(Error::DoubleZero)
        ));
    }

    #[test]
    fn hopf_on_mh() {
        let m = presets::mh();
        let p = curve_point(&m, CurveId::H, -0.01, &t()).unwrap();
        let r = hopf_check(&m, p.mu, &t()).unwrap();
        assert!((r.omega - 0.001).abs() <= 0.02 * 0.001, "{}", r.omega);
        assert!((r.dp_dbif - 0.5).abs() <= 0.025, "{}", r.dp_dbif);
    }

    #[test]
    fn verify_all_reference_models() {
        for m in [presets::ma(), presets::mh(), presets::mb()] {
            let rows = verify_all(&m, &t()).unwrap();
            let fails: Vec<_> = rows.iter().filter(|r| r.status == CheckStatus::Fail).collect();
            assert!(fails.is_empty(), "{fails:#?}");
        }
        let rows = verify_all(&presets::mh(), &t()).unwrap();
        assert!(rows.iter().any(|r| r.curve == CurveId::T3 && r.status == CheckStatus::Skip));
    }
}
