//! Equilibria of both degenerate cases: closed lowest-order seeds refined by
//! damped Newton iteration on the exact polynomial equations.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DegeneracyCase, Mat2, ParamPoint, StatePoint, SystemModel};
use crate::poly::univariate_roots;
use crate::tolerances::Tolerances;

pub const MAX_NEWTON_ITERATIONS: usize = 50;
const MAX_HALVINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EquilibriumId {
    O,
    E1,
    E11,
    E12,
    E2,
    E3,
}

impl EquilibriumId {
    pub fn name(&self) -> &'static str {
        match self {
            EquilibriumId::O => "O",
            EquilibriumId::E1 => "E1",
            EquilibriumId::E11 => "E11",
            EquilibriumId::E12 => "E12",
            EquilibriumId::E2 => "E2",
            EquilibriumId::E3 => "E3",
        }
    }

    /// The equilibria tracked for a case, in reporting order.
    pub fn for_case(case: DegeneracyCase) -> &'static [EquilibriumId] {
        use EquilibriumId::*;
        match case {
            DegeneracyCase::CaseA => &[O, E11, E12, E2, E3],
            DegeneracyCase::CaseB => &[O, E1, E2, E3],
            _ => &[O, E2],
        }
    }
}

impl fmt::Display for EquilibriumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Proper,
    Virtual,
    /// No real root. The stored point is then the real part of the complex pair.
    Absent,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Proper => "proper",
            Status::Virtual => "virtual",
            Status::Absent => "absent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Provenance {
    LowestTerms,
    NewtonRefined { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub id: EquilibriumId,
    pub point: StatePoint,
    pub status: Status,
    pub provenance: Provenance,
}

impl Equilibrium {
    fn refined(id: EquilibriumId, point: StatePoint, residual: f64, tie: f64) -> Self {
        let status = if point.is_proper(tie) { Status::Proper } else { Status::Virtual };
        Self { id, point, status, provenance: Provenance::NewtonRefined { residual } }
    }

    pub fn origin() -> Self {
        Self {
            id: EquilibriumId::O,
            point: StatePoint::ORIGIN,
            status: Status::Proper,
            provenance: Provenance::NewtonRefined { residual: 0.0 },
        }
    }

    pub fn exists(&self) -> bool {
        self.status != Status::Absent
    }

    pub fn is_proper(&self) -> bool {
        self.status == Status::Proper
    }

    /// `self` if it has a real location, an [`Error::Absent`] otherwise.
    pub fn require(self) -> Result<Self> {
        if self.exists() {
            Ok(self)
        } else {
            Err(Error::Absent(self.id.name()))
        }
    }
}

/// Constants built from the constant and first-order Taylor coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub k3: Option<f64>,
    pub two_n_minus_delta_theta2: Option<f64>,
}

/// Constant and first-order coefficients under the usual short names.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingCoeffs {
    pub theta: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma: f64,
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub n: f64,
    pub s: f64,
    pub p: f64,
}

impl LeadingCoeffs {
    pub fn of(model: &SystemModel) -> Self {
        let (theta1, theta2) = model.theta.linear_terms();
        let (delta1, delta2) = model.delta.linear_terms();
        Self {
            theta: model.theta.constant_term(),
            theta1,
            theta2,
            gamma: model.gamma.constant_term(),
            delta: model.delta.constant_term(),
            delta1,
            delta2,
            n: model.big_n.constant_term(),
            s: model.big_s.constant_term(),
            p: model.big_p.constant_term(),
        }
    }
}

/// Rejects models outside the two analysable cases.
pub fn analysable_case(model: &SystemModel) -> Result<DegeneracyCase> {
    match model.classify_case()? {
        c @ (DegeneracyCase::CaseA | DegeneracyCase::CaseB) => Ok(c),
        other => Err(Error::Case { expected: "CaseA or CaseB", found: other }),
    }
}

fn require(model: &SystemModel, want: DegeneracyCase, label: &'static str) -> Result<()> {
    let case = model.classify_case()?;
    if case != want {
        return Err(Error::Case { expected: label, found: case });
    }
    Ok(())
}

pub fn derived_constants(model: &SystemModel) -> Result<DerivedConstants> {
    let c = LeadingCoeffs::of(model);
    Ok(match analysable_case(model)? {
        DegeneracyCase::CaseA => {
            let two_n = 2.0 * c.n - c.delta * c.theta2;
            let gd2 = c.gamma * c.delta * c.delta;
            DerivedConstants {
                sigma1: Some((c.delta * c.theta2 - c.n) / gd2),
                sigma2: None,
                k3: Some(-(c.n - c.delta * c.theta2 - c.gamma * two_n) / (2.0 * gd2)),
                two_n_minus_delta_theta2: Some(two_n),
            }
        }
        _ => DerivedConstants {
            sigma1: None,
            sigma2: Some((c.theta * c.delta1 - c.s) / (c.theta * c.theta)),
            k3: None,
            two_n_minus_delta_theta2: None,
        },
    })
}

/// `theta(mu)^2 - 4 N(mu) mu1`.
pub fn discriminant(model: &SystemModel, mu: ParamPoint) -> Result<f64> {
    require(model, DegeneracyCase::CaseA, "CaseA")?;
    let c = model.coeffs(mu)?;
    Ok(c.theta * c.theta - 4.0 * c.big_n * mu.mu1)
}

/// Both roots of `N xi^2 - theta xi + mu1 = 0` on the `xi1` axis.
///
/// `E11` is `(theta + sqrt(D)) / 2N`, `E12` is `(theta - sqrt(D)) / 2N`. The
/// larger-magnitude root is formed first and the other from the product of roots.
pub fn axis1_equilibria(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<(Equilibrium, Equilibrium)> {
    let disc = discriminant(model, mu)?;
    let c = model.coeffs(mu)?;
    let n = c.big_n;
    if n == 0.0 {
        return Err(Error::Validation("N(mu) vanishes; the axis equation is not quadratic".into()));
    }
    let theta = c.theta;
    let make = |id, x: f64, status| Equilibrium {
        id,
        point: StatePoint::new(x, 0.0),
        status,
        provenance: Provenance::NewtonRefined { residual: (mu.mu1 - theta * x + n * x * x).abs() },
    };
    if disc < 0.0 {
        let re = theta / (2.0 * n);
        return Ok((make(EquilibriumId::E11, re, Status::Absent), make(EquilibriumId::E12, re, Status::Absent)));
    }
    let root = disc.sqrt();
    let (plus, minus) = if theta >= 0.0 {
        let q = 0.5 * (theta + root);
        let big = q / n;
        let small = if q != 0.0 { mu.mu1 / q } else { 0.0 };
        (big, small)
    } else {
        let q = 0.5 * (theta - root);
        let big = q / n;
        let small = if q != 0.0 { mu.mu1 / q } else { 0.0 };
        (small, big)
    };
    let polish = |x: f64| {
        let h = mu.mu1 - theta * x + n * x * x;
        let dh = -theta + 2.0 * n * x;
        if dh.abs() > 1e-3 * theta.abs().max(n * x.abs()) && dh != 0.0 {
            x - h / dh
        } else {
            x
        }
    };
    let (x11, x12) = (polish(plus), polish(minus));
    let status = |x: f64| if x >= -tols.properness_tie { Status::Proper } else { Status::Virtual };
    Ok((make(EquilibriumId::E11, x11, status(x11)), make(EquilibriumId::E12, x12, status(x12))))
}

/// Scalar Newton with step halving.
fn newton_1d(
    h: impl Fn(f64) -> (f64, f64),
    mut x: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut r, mut dr) = h(x);
    for it in 0..MAX_NEWTON_ITERATIONS {
        if r == 0.0 {
            break;
        }
        if dr == 0.0 || !dr.is_finite() {
            return Err(Error::Convergence { iterations: it, residual: r.abs() });
        }
        let step = r / dr;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let xn = x - lambda * step;
            let (rn, drn) = h(xn);
            if rn.abs() < r.abs() {
                accepted = Some((xn, rn, drn));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xn, rn, drn)) => {
                let dx = (xn - x).abs();
                x = xn;
                r = rn;
                dr = drn;
                if dx <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            None => break,
        }
    }
    if r.abs() <= tol && x.is_finite() {
        Ok((x, r.abs()))
    } else {
        Err(Error::Convergence { iterations: MAX_NEWTON_ITERATIONS, residual: r.abs() })
    }
}

/// Two-dimensional Newton with step halving; `g` returns residual and Jacobian.
pub(crate) fn newton_2d(
    g: impl Fn([f64; 2]) -> ([f64; 2], Mat2),
    mut x: [f64; 2],
    tol: f64,
) -> Result<([f64; 2], f64)> {
    let norm = |v: [f64; 2]| v[0].abs().max(v[1].abs());
    let (mut r, mut jac) = g(x);
    let mut rn = norm(r);
    for it in 0..MAX_NEWTON_ITERATIONS {
        if rn == 0.0 {
            break;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Convergence { iterations: it, residual: rn });
        }
        let step = [
            (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let xn = [x[0] - lambda * step[0], x[1] - lambda * step[1]];
            let (rr, jj) = g(xn);
            let nn = norm(rr);
            if nn < rn {
                accepted = Some((xn, rr, jj, nn));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xn, rr, jj, nn)) => {
                let dx = norm([xn[0] - x[0], xn[1] - x[1]]);
                x = xn;
                r = rr;
                jac = jj;
                rn = nn;
                if dx <= 4.0 * f64::EPSILON * norm(x).max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            None => break,
        }
    }
    if rn <= tol && x.iter().all(|v| v.is_finite()) {
        Ok((x, rn))
    } else {
        Err(Error::Convergence { iterations: MAX_NEWTON_ITERATIONS, residual: rn })
    }
}

/// `E2 = (0, xi2)` with `mu2 + xi2 + P(mu) xi2^2 = 0`, on the branch through 0.
pub fn equilibrium_e2(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<Equilibrium> {
    let c = model.coeffs(mu)?;
    let (y, residual) = newton_1d(
        |y| (c.mu2 + y + c.big_p * y * y, 1.0 + 2.0 * c.big_p * y),
        -mu.mu2,
        tols.newton,
    )?;
    Ok(Equilibrium::refined(EquilibriumId::E2, StatePoint::new(0.0, y), residual, tols.properness_tie))
}

/// `E1 = (xi1, 0)` with `mu1 - theta xi1 + N xi1^2 = 0`, root nearest the origin.
pub fn equilibrium_e1(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<Equilibrium> {
    require(model, DegeneracyCase::CaseB, "CaseB")?;
    let c = model.coeffs(mu)?;
    let seed = mu.mu1 / model.theta.constant_term();
    let (x, residual) = newton_1d(
        |x| (c.mu1 - c.theta * x + c.big_n * x * x, -c.theta + 2.0 * c.big_n * x),
        seed,
        tols.newton,
    )?;
    Ok(Equilibrium::refined(EquilibriumId::E1, StatePoint::new(x, 0.0), residual, tols.properness_tie))
}

/// Lowest-order closed form of the interior equilibrium for the model's case.
pub fn lowest_terms_e3(model: &SystemModel, mu: ParamPoint) -> Result<StatePoint> {
    model.check_mu(mu)?;
    let lc = LeadingCoeffs::of(model);
    let k = derived_constants(model)?;
    let (m1, m2) = (mu.mu1, mu.mu2);
    Ok(match analysable_case(model)? {
        DegeneracyCase::CaseA => {
            let sigma1 = k.sigma1.unwrap_or(0.0);
            StatePoint::new(
                -(m1 - lc.gamma * m2) / (lc.gamma * lc.delta),
                -(m1 - lc.gamma * sigma1 * m2 * m2) / lc.gamma,
            )
        }
        _ => {
            let sigma2 = k.sigma2.unwrap_or(0.0);
            StatePoint::new((m1 - lc.gamma * m2) / lc.theta, -m2 + sigma2 * m1 * m1)
        }
    })
}

/// Interior equilibrium.
///
/// `g1 = 0` is linear in `xi2`, so eliminating `xi2` leaves a quartic in
/// `xi1`. Its root nearest the lowest-order seed is the local branch: when
/// that root is complex the equilibrium is `Absent` (the stored point is then
/// the real part), otherwise it is polished by Newton on both cofactors.
pub fn equilibrium_e3(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<Equilibrium> {
    let seed = lowest_terms_e3(model, mu)?;
    let c = model.coeffs(mu)?;
    // xi2 = a(x) / d(x) with a = -(mu1 - theta x + N x^2), d = gamma - M x
    let a = [-c.mu1, c.theta, -c.big_n];
    let d = [c.gamma, -c.big_m];
    let b = [c.mu2, -c.delta, c.big_s];
    let mul = |p: &[f64], q: &[f64]| {
        let mut r = vec![0.0; p.len() + q.len() - 1];
        for (i, x) in p.iter().enumerate() {
            for (j, y) in q.iter().enumerate() {
                r[i + j] += x * y;
            }
        }
        r
    };
    // d^2 g2(x, a/d) = b d^2 + unit a d + P a^2
    let mut quartic = vec![0.0; 5];
    for (k, v) in mul(&b, &mul(&d, &d)).into_iter().enumerate() {
        quartic[k] += v;
    }
    for (k, v) in mul(&a, &d).into_iter().enumerate() {
        quartic[k] += c.unit * v;
    }
    for (k, v) in mul(&a, &a).into_iter().enumerate() {
        quartic[k] += c.big_p * v;
    }
    let xi2_of = |x: f64| (a[0] + a[1] * x + a[2] * x * x) / (d[0] + d[1] * x);
    let local = univariate_roots(&quartic)
        .into_iter()
        .filter(|z| (c.gamma - c.big_m * z).norm() > 1e-9 * c.gamma.abs())
        .min_by(|p, q| (p - seed.xi1).norm().total_cmp(&(q - seed.xi1).norm()));
    let Some(root) = local else {
        // the elimination is degenerate; fall back to Newton from the seed
        return newton_e3(&c, [seed.xi1, seed.xi2], tols);
    };
    let scale = seed.xi1.abs().max(root.re.abs()).max(mu.norm());
    if root.im.abs() > 1e-6 * scale {
        let p = StatePoint::new(root.re, xi2_of(root.re));
        let (g1, g2) = c.factors(p.xi1, p.xi2);
        return Ok(Equilibrium {
            id: EquilibriumId::E3,
            point: p,
            status: Status::Absent,
            provenance: Provenance::NewtonRefined { residual: g1.abs().max(g2.abs()) },
        });
    }
    newton_e3(&c, [root.re, xi2_of(root.re)], tols)
}

fn newton_e3(c: &crate::model::FieldCoeffs, start: [f64; 2], tols: &Tolerances) -> Result<Equilibrium> {
    let (x, residual) = newton_2d(
        |v| {
            let (g1, g2) = c.factors(v[0], v[1]);
            ([g1, g2], c.factor_jacobian(v[0], v[1]))
        },
        start,
        tols.newton,
    )?;
    Ok(Equilibrium::refined(EquilibriumId::E3, StatePoint::new(x[0], x[1]), residual, tols.properness_tie))
}

/// Every case-relevant equilibrium at `mu`; individual failures are kept per id.
pub fn all_equilibria(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<Vec<(EquilibriumId, Result<Equilibrium>)>> {
    let case = analysable_case(model)?;
    model.check_mu(mu)?;
    let mut out = Vec::with_capacity(5);
    out.push((EquilibriumId::O, Ok(Equilibrium::origin())));
    match case {
        DegeneracyCase::CaseA => match axis1_equilibria(model, mu, tols) {
            Ok((a, b)) => {
                out.push((EquilibriumId::E11, Ok(a)));
                out.push((EquilibriumId::E12, Ok(b)));
            }
            Err(e) => {
                let msg = e.to_string();
                out.push((EquilibriumId::E11, Err(e)));
                out.push((EquilibriumId::E12, Err(Error::Validation(msg))));
            }
        },
        _ => out.push((EquilibriumId::E1, equilibrium_e1(model, mu, tols))),
    }
    out.push((EquilibriumId::E2, equilibrium_e2(model, mu, tols)));
    out.push((EquilibriumId::E3, equilibrium_e3(model, mu, tols)));
    Ok(out)
}
