//! Eigen-analysis of planar Jacobians, stability classes and Hopf quantities.

use num_complex::Complex64;
use serde::Serialize;

use crate::equilibria::{equilibrium_e3, Equilibrium, EquilibriumId};
use crate::error::{Error, Result};
use crate::model::{Hessian, Mat2, ParamPoint, SystemModel, Third};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EigenKind {
    /// `l1 >= l2`.
    RealPair { l1: f64, l2: f64 },
    /// `p +- i omega` with `omega > 0`.
    ComplexPair { p: f64, omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenReport {
    pub trace: f64,
    pub det: f64,
    pub kind: EigenKind,
    /// Half the trace.
    pub p: f64,
    /// Frobenius norm of the matrix, used to scale the tolerances.
    pub scale: f64,
}

impl EigenReport {
    /// Real parts `(larger, smaller)`.
    pub fn real_parts(&self) -> (f64, f64) {
        match self.kind {
            EigenKind::RealPair { l1, l2 } => (l1, l2),
            EigenKind::ComplexPair { p, .. } => (p, p),
        }
    }

    /// Smallest eigenvalue modulus.
    pub fn min_modulus(&self) -> f64 {
        match self.kind {
            EigenKind::RealPair { l1, l2 } => l1.abs().min(l2.abs()),
            EigenKind::ComplexPair { p, omega } => p.hypot(omega),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityClass {
    Saddle,
    AttractorNode,
    AttractorFocus,
    RepellerNode,
    RepellerFocus,
    NonHyperbolic { zero_count: u8, nonzero_sign: i8 },
}

impl StabilityClass {
    pub fn is_attractor(&self) -> bool {
        matches!(self, StabilityClass::AttractorNode | StabilityClass::AttractorFocus)
    }

    pub fn is_repeller(&self) -> bool {
        matches!(self, StabilityClass::RepellerNode | StabilityClass::RepellerFocus)
    }

    pub fn is_hyperbolic(&self) -> bool {
        !matches!(self, StabilityClass::NonHyperbolic { .. })
    }

    /// One-letter table code: `s`, `a`, `r` or `u` for non-hyperbolic.
    pub fn code(&self) -> char {
        match self {
            StabilityClass::Saddle => 's',
            StabilityClass::AttractorNode | StabilityClass::AttractorFocus => 'a',
            StabilityClass::RepellerNode | StabilityClass::RepellerFocus => 'r',
            StabilityClass::NonHyperbolic { .. } => 'u',
        }
    }

    pub fn name(&self) -> String {
        match self {
            StabilityClass::Saddle => "saddle".into(),
            StabilityClass::AttractorNode => "attractor-node".into(),
            StabilityClass::AttractorFocus => "attractor-focus".into(),
            StabilityClass::RepellerNode => "repeller-node".into(),
            StabilityClass::RepellerFocus => "repeller-focus".into(),
            StabilityClass::NonHyperbolic { zero_count, nonzero_sign } => {
                format!("nonhyperbolic({zero_count},{nonzero_sign:+})")
            }
        }
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Eigenvalues of a 2x2 matrix from trace and determinant.
///
/// The discriminant is formed as `((a - d) / 2)^2 + b c`, which does not lose
/// the small eigenvalue of a nearly triangular matrix, and the smaller real
/// root is recovered from the product of roots.
pub fn eigen2(j: &Mat2) -> Result<EigenReport> {
    let [[a, b], [c, d]] = *j;
    if ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("Jacobian"));
    }
    let trace = a + d;
    let det = a * d - b * c;
    let p = 0.5 * trace;
    let h = 0.5 * (a - d);
    let disc = h * h + b * c;
    let scale = (a * a + b * b + c * c + d * d).sqrt();
    let kind = if disc >= 0.0 {
        let r = disc.sqrt();
        if p >= 0.0 {
            let l1 = p + r;
            let l2 = if l1 != 0.0 { det / l1 } else { p - r };
            EigenKind::RealPair { l1, l2 }
        } else {
            let l2 = p - r;
            let l1 = if l2 != 0.0 { det / l2 } else { p + r };
            EigenKind::RealPair { l1, l2 }
        }
    } else {
        EigenKind::ComplexPair { p, omega: (-disc).sqrt() }
    };
    Ok(EigenReport { trace, det, kind, p, scale })
}

/// Stability class with tolerances relative to the matrix norm.
pub fn stability_class(report: &EigenReport, tols: &Tolerances) -> StabilityClass {
    let tol_p = tols.p * report.scale;
    let tol_det = tols.det * report.scale * report.scale;
    let (p, det) = (report.p, report.det);
    if det.abs() <= tol_det {
        return if p.abs() <= tol_p {
            StabilityClass::NonHyperbolic { zero_count: 2, nonzero_sign: 0 }
        } else {
            StabilityClass::NonHyperbolic { zero_count: 1, nonzero_sign: sign(p) }
        };
    }
    if det < 0.0 {
        return StabilityClass::Saddle;
    }
    if p.abs() <= tol_p {
        return StabilityClass::NonHyperbolic { zero_count: 2, nonzero_sign: 0 };
    }
    let focus = p * p - det < -tol_det;
    match (p < 0.0, focus) {
        (true, false) => StabilityClass::AttractorNode,
        (true, true) => StabilityClass::AttractorFocus,
        (false, false) => StabilityClass::RepellerNode,
        (false, true) => StabilityClass::RepellerFocus,
    }
}

pub fn classify_matrix(j: &Mat2, tols: &Tolerances) -> Result<(EigenReport, StabilityClass)> {
    let r = eigen2(j)?;
    Ok((r, stability_class(&r, tols)))
}

/// Closed-form eigenvalues at an axis point `(x, 0)`:
/// `3N x^2 - 2 theta x + mu1` and `S x^2 - delta x + mu2`.
pub fn axis_eigenvalues(model: &SystemModel, mu: ParamPoint, x: f64) -> Result<(f64, f64)> {
    let c = model.coeffs(mu)?;
    Ok((
        3.0 * c.big_n * x * x - 2.0 * c.theta * x + c.mu1,
        c.big_s * x * x - c.delta * x + c.mu2,
    ))
}

/// Classifies an existing equilibrium. Axis equilibria on `xi2 = 0` are
/// cross-checked against their closed-form eigenvalues.
pub fn classify_equilibrium(
    model: &SystemModel,
    mu: ParamPoint,
    eq: &Equilibrium,
    tols: &Tolerances,
) -> Result<(EigenReport, StabilityClass)> {
    if !eq.exists() {
        return Err(Error::Validation(format!("{} has no real location at this parameter", eq.id)));
    }
    let (f1, f2) = model.eval_field(mu, eq.point)?;
    let residual = f1.abs().max(f2.abs());
    if residual > tols.equilibrium {
        return Err(Error::Convergence { iterations: 0, residual });
    }
    let j = model.jacobian(mu, eq.point)?;
    let out = classify_matrix(&j, tols)?;
    if matches!(eq.id, EquilibriumId::O | EquilibriumId::E1 | EquilibriumId::E11 | EquilibriumId::E12) {
        let (la, lb) = axis_eigenvalues(model, mu, eq.point.xi1)?;
        let gap = (la - j[0][0]).abs().max((lb - j[1][1]).abs());
        if gap > 1e-10 {
            return Err(Error::Convergence { iterations: 0, residual: gap });
        }
    }
    Ok(out)
}

/// Characteristic quantities `p` (half trace) and `L` (determinant) at the interior equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharQuantities {
    pub p: f64,
    pub l: f64,
    /// Difference between `p` and its closed expression, which holds at any
    /// interior equilibrium because both cofactors vanish there.
    pub identity_gap: f64,
}

pub fn char_quantities_e3(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<CharQuantities> {
    let e3 = equilibrium_e3(model, mu, tols)?.require()?;
    let (x, y) = (e3.point.xi1, e3.point.xi2);
    let j = model.jacobian(mu, e3.point)?;
    let c = model.coeffs(mu)?;
    let p = 0.5 * (j[0][0] + j[1][1]);
    let l = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let closed = 0.5 * (y - c.theta * x + 2.0 * c.big_n * x * x - c.big_m * x * y + 2.0 * c.big_p * y * y);
    Ok(CharQuantities { p, l, identity_gap: (p - closed).abs() })
}

fn bilinear(h: &Hessian, u: [Complex64; 2], v: [Complex64; 2]) -> [Complex64; 2] {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (i, hi) in h.iter().enumerate() {
        for j in 0..2 {
            for k in 0..2 {
                out[i] += hi[j][k] * u[j] * v[k];
            }
        }
    }
    out
}

fn trilinear(t: &Third, u: [Complex64; 2], v: [Complex64; 2], w: [Complex64; 2]) -> [Complex64; 2] {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (i, ti) in t.iter().enumerate() {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[i] += ti[j][k][l] * u[j] * v[k] * w[l];
                }
            }
        }
    }
    out
}

fn solve2(m: [[Complex64; 2]; 2], r: [Complex64; 2]) -> Result<[Complex64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() == 0.0 {
        return Err(Error::NonFinite("singular linear system in the Lyapunov coefficient"));
    }
    Ok([(m[1][1] * r[0] - m[0][1] * r[1]) / det, (-m[1][0] * r[0] + m[0][0] * r[1]) / det])
}

fn dot(p: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
    p[0].conj() * v[0] + p[1].conj() * v[1]
}

/// First Lyapunov coefficient of a planar field with linear part `a` (eigenvalues
/// `+-i omega`), second derivatives `h` and third derivatives `t` at the equilibrium.
///
/// Normalized with unit eigenvector `q` and `<p, q> = 1`, so that a system in
/// rotation form with averaged radial equation `r' = a r^3` has `l1 = 2 a / omega`.
pub fn lyapunov1_planar(a: &Mat2, h: &Hessian, t: &Third) -> Result<f64> {
    let rep = eigen2(a)?;
    let omega = match rep.kind {
        EigenKind::ComplexPair { omega, .. } => omega,
        _ => return Err(Error::NotOnHopfCurve { p: rep.p, det: rep.det }),
    };
    let iw = Complex64::new(0.0, omega);
    let [[a11, a12], [a21, a22]] = *a;
    let re = |x: f64| Complex64::new(x, 0.0);
    // A q = i omega q; the larger of the two candidate vectors is used
    let q = if a12.abs() >= a21.abs() { [re(a12), iw - a11] } else { [iw - a22, re(a21)] };
    let qn = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
    let q = [q[0] / qn, q[1] / qn];
    // A^T p = -i omega p
    let mut pv = if a21.abs() >= a12.abs() { [re(a21), -iw - a11] } else { [-iw - a22, re(a12)] };
    let s = dot(pv, q);
    pv = [pv[0] / s.conj(), pv[1] / s.conj()];
    let qb = [q[0].conj(), q[1].conj()];
    let am = [[re(a11), re(a12)], [re(a21), re(a22)]];
    let b_qqb = bilinear(h, q, qb);
    let b_qq = bilinear(h, q, q);
    let x1 = solve2(am, b_qqb)?;
    let m2 = [[2.0 * iw - a11, -re(a12)], [-re(a21), 2.0 * iw - a22]];
    let x2 = solve2(m2, b_qq)?;
    let total = dot(pv, trilinear(t, q, q, qb)) - 2.0 * dot(pv, bilinear(h, q, x1)) + dot(pv, bilinear(h, qb, x2));
    Ok(total.re / (2.0 * omega))
}

/// First Lyapunov coefficient at the interior equilibrium of a point on the Hopf curve.
pub fn lyapunov1_numeric(model: &SystemModel, mu_hopf: ParamPoint, tols: &Tolerances) -> Result<f64> {
    let e3 = equilibrium_e3(model, mu_hopf, tols)?.require()?;
    let j = model.jacobian(mu_hopf, e3.point)?;
    let rep = eigen2(&j)?;
    if rep.p.abs() > tols.hopf_p || rep.det <= 0.0 {
        return Err(Error::NotOnHopfCurve { p: rep.p, det: rep.det });
    }
    // remove the residual real part so the linear part is exactly a centre
    let shift = rep.p;
    let a = [[j[0][0] - shift, j[0][1]], [j[1][0], j[1][1] - shift]];
    let h = model.hessian(mu_hopf, e3.point)?;
    let t = model.third_derivatives(mu_hopf)?;
    lyapunov1_planar(&a, &h, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{axis1_equilibria, Status};
    use crate::presets;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn diagonal_matrix() {
        let r = eigen2(&[[0.01, 0.0], [0.0, -0.02]]).unwrap();
        match r.kind {
            EigenKind::RealPair { l1, l2 } => {
                assert!((l1 - 0.01).abs() < 1e-16);
                assert!((l2 + 0.02).abs() < 1e-16);
            }
            _ => panic!(),
        }
        assert_eq!(stability_class(&r, &t()), StabilityClass::Saddle);
    }

    #[test]
    fn zero_and_rotation() {
        let r = eigen2(&[[0.0; 2]; 2]).unwrap();
        assert_eq!(r.kind, EigenKind::RealPair { l1: 0.0, l2: 0.0 });
        assert_eq!(
            stability_class(&r, &t()),
            StabilityClass::NonHyperbolic { zero_count: 2, nonzero_sign: 0 }
        );
        let r = eigen2(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(r.kind, EigenKind::ComplexPair { p: 0.0, omega: 1.0 });
    }

    #[test]
    fn non_finite_rejected() {
        assert!(eigen2(&[[f64::NAN, 0.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn focus_and_node() {
        let (_, c) = classify_matrix(&[[-0.1, -1.0], [1.0, -0.1]], &t()).unwrap();
        assert_eq!(c, StabilityClass::AttractorFocus);
        let (_, c) = classify_matrix(&[[0.1, 0.0], [0.0, 0.3]], &t()).unwrap();
        assert_eq!(c, StabilityClass::RepellerNode);
        let (_, c) = classify_matrix(&[[0.0, 0.0], [0.0, 0.3]], &t()).unwrap();
        assert_eq!(c, StabilityClass::NonHyperbolic { zero_count: 1, nonzero_sign: 1 });
    }

    #[test]
    fn axis_equilibrium_e11_is_saddle() {
        let m = presets::ma();
        let mu = ParamPoint::new(-0.01, 0.0);
        let (e11, _) = axis1_equilibria(&m, mu, &t()).unwrap();
        let (la, lb) = axis_eigenvalues(&m, mu, e11.point.xi1).unwrap();
        assert!((la - 0.02).abs() < 1e-15);
        assert!((lb + 0.099).abs() < 1e-15);
        let (_, c) = classify_equilibrium(&m, mu, &e11, &t()).unwrap();
        assert_eq!(c, StabilityClass::Saddle);
    }

    #[test]
    fn origin_repeller() {
        let m = presets::ma();
        let (_, c) = classify_equilibrium(&m, ParamPoint::new(0.01, 0.02), &Equilibrium::origin(), &t()).unwrap();
        assert_eq!(c, StabilityClass::RepellerNode);
    }

    #[test]
    fn absent_equilibrium_refused() {
        let m = presets::ma();
        let mu = ParamPoint::new(0.01, 0.01);
        let (e11, _) = axis1_equilibria(&m, mu, &t()).unwrap();
        assert_eq!(e11.status, Status::Absent);
        assert!(classify_equilibrium(&m, mu, &e11, &t()).is_err());
    }

    #[test]
    fn char_quantities_at_origin_and_hopf_point() {
        let q = char_quantities_e3(&presets::ma(), ParamPoint::ORIGIN, &t()).unwrap();
        assert_eq!((q.p, q.l), (0.0, 0.0));
        let q = char_quantities_e3(&presets::mh(), ParamPoint::new(0.0003, -0.01), &t()).unwrap();
        assert!(q.p.abs() < 5e-5);
        assert!(q.l > 0.0);
        assert!(q.identity_gap < 1e-9);
    }

    /// Averaging coefficient `a` of `r' = a r^3` for `x' = -w y + f, y' = w x + g`.
    fn canonical_a(w: f64, h: &Hessian, t: &Third) -> f64 {
        let (fxx, fxy, fyy) = (h[0][0][0], h[0][0][1], h[0][1][1]);
        let (gxx, gxy, gyy) = (h[1][0][0], h[1][0][1], h[1][1][1]);
        let fxxx = t[0][0][0][0];
        let fxyy = t[0][0][1][1];
        let gxxy = t[1][0][0][1];
        let gyyy = t[1][1][1][1];
        (fxxx + fxyy + gxxy + gyyy) / 16.0
            + (fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy) / (16.0 * w)
    }

    #[test]
    fn lyapunov_of_radial_cubic() {
        // x' = -y - x(x^2+y^2), y' = x - y(x^2+y^2): r' = -r^3
        let a = [[0.0, -1.0], [1.0, 0.0]];
        let h = [[[0.0; 2]; 2]; 2];
        let mut t3 = [[[[0.0; 2]; 2]; 2]; 2];
        t3[0][0][0][0] = -6.0;
        for (j, k, l) in [(0, 1, 1), (1, 0, 1), (1, 1, 0)] {
            t3[0][j][k][l] = -2.0;
        }
        t3[1][1][1][1] = -6.0;
        for (j, k, l) in [(0, 0, 1), (0, 1, 0), (1, 0, 0)] {
            t3[1][j][k][l] = -2.0;
        }
        let l1 = lyapunov1_planar(&a, &h, &t3).unwrap();
        assert!((l1 + 2.0).abs() < 1e-12);
        assert!((canonical_a(1.0, &h, &t3) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_matches_averaging_formula_with_quadratic_terms() {
        for (w, seed) in [(1.0, 0.3), (2.5, -0.7), (0.4, 1.1)] {
            let mut h = [[[0.0; 2]; 2]; 2];
            let vals = [seed, 0.5 * seed + 0.2, -0.3, 0.8 - seed, 0.1, 0.6 * seed];
            h[0][0][0] = vals[0];
            h[0][0][1] = vals[1];
            h[0][1][0] = vals[1];
            h[0][1][1] = vals[2];
            h[1][0][0] = vals[3];
            h[1][0][1] = vals[4];
            h[1][1][0] = vals[4];
            h[1][1][1] = vals[5];
            let mut t3 = [[[[0.0; 2]; 2]; 2]; 2];
            let cub = [0.3, -0.2, 0.5 * seed, -0.4];
            #[allow(clippy::needless_range_loop)]
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            let ones = j + k + l;
                            t3[i][j][k][l] = cub[ones] * if i == 0 { 1.0 } else { -0.7 };
                        }
                    }
                }
            }
            let a = [[0.0, -w], [w, 0.0]];
            let l1 = lyapunov1_planar(&a, &h, &t3).unwrap();
            let ga = canonical_a(w, &h, &t3);
            assert!((l1 * w - 2.0 * ga).abs() < 1e-12 * (1.0 + ga.abs()), "w={w}: {l1} vs {ga}");
        }
    }

    #[test]
    fn lyapunov_zero_for_linear_part_only() {
        let a = [[0.0, -1.0], [1.0, 0.0]];
        let l1 = lyapunov1_planar(&a, &[[[0.0; 2]; 2]; 2], &[[[[0.0; 2]; 2]; 2]; 2]).unwrap();
        assert_eq!(l1, 0.0);
    }

    #[test]
    fn lyapunov_needs_centre() {
        let m = presets::mh();
        assert!(matches!(
            lyapunov1_numeric(&m, ParamPoint::new(0.01, -0.01), &t()),
            Err(Error::NotOnHopfCurve { .. })
        ));
    }
}
