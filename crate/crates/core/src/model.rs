//! The two-parameter planar Kolmogorov family
//!
//! ```text
//! dxi1/dt = xi1 (mu1 - theta xi1 + gamma xi2 - M xi1 xi2 + N xi1^2)
//! dxi2/dt = xi2 (mu2 - delta xi1 + xi2 + S xi1^2 + P xi2^2)
//! ```
//!
//! where every coefficient is a [`BivariatePoly`] in `mu = (mu1, mu2)`.
//! All state derivatives are exact; nothing here is finite-differenced.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::BivariatePoly;

pub const DEFAULT_RADIUS: f64 = 0.1;

/// 2x2 matrix, row-major.
pub type Mat2 = [[f64; 2]; 2];
/// `h[i][j][k] = d^2 f_i / dxi_j dxi_k`.
pub type Hessian = [[[f64; 2]; 2]; 2];
/// `t[i][j][k][l] = d^3 f_i / dxi_j dxi_k dxi_l`.
pub type Third = [[[[f64; 2]; 2]; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub mu1: f64,
    pub mu2: f64,
}

impl ParamPoint {
    pub const ORIGIN: ParamPoint = ParamPoint { mu1: 0.0, mu2: 0.0 };

    pub fn new(mu1: f64, mu2: f64) -> Self {
        Self { mu1, mu2 }
    }

    pub fn norm(&self) -> f64 {
        self.mu1.hypot(self.mu2)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.mu1 * c, self.mu2 * c)
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    /// Square `[-r, r]^2`.
    pub fn centered(r: f64) -> Self {
        Self::new(-r, r, -r, r)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn is_finite(&self) -> bool {
        [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite())
    }

    /// Finite and not inverted (zero width or height is allowed).
    pub fn is_ordered(&self) -> bool {
        self.is_finite() && self.x0 <= self.x1 && self.y0 <= self.y1
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    /// Largest distance from the origin over the four corners.
    pub fn max_norm(&self) -> f64 {
        let xs = self.x0.abs().max(self.x1.abs());
        let ys = self.y0.abs().max(self.y1.abs());
        xs.hypot(ys)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub xi1: f64,
    pub xi2: f64,
}

impl StatePoint {
    pub const ORIGIN: StatePoint = StatePoint { xi1: 0.0, xi2: 0.0 };

    pub fn new(xi1: f64, xi2: f64) -> Self {
        Self { xi1, xi2 }
    }

    /// Both coordinates nonnegative, with values within `tie` of zero counted as on the axis.
    pub fn is_proper(&self, tie: f64) -> bool {
        self.xi1 >= -tie && self.xi2 >= -tie
    }

    pub fn dist(&self, other: &StatePoint) -> f64 {
        (self.xi1 - other.xi1).hypot(self.xi2 - other.xi2)
    }

    pub fn is_finite(&self) -> bool {
        self.xi1.is_finite() && self.xi2.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegeneracyCase {
    /// `theta(0) = 0`, `delta(0) != 0`.
    CaseA,
    /// `theta(0) != 0`, `delta(0) = 0`.
    CaseB,
    NonDegenerate,
    DoublyDegenerate,
}

/// Coefficients of the field frozen at one parameter value.
///
/// `unit` is the coefficient of `xi2` inside the second factor; it is 1 for the
/// field itself and 0 for parameter derivatives, which reuse the same formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCoeffs {
    pub mu1: f64,
    pub mu2: f64,
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub big_m: f64,
    pub big_n: f64,
    pub big_s: f64,
    pub big_p: f64,
    pub unit: f64,
}

impl FieldCoeffs {
    /// The two cofactors `(g1, g2)` with `f = (xi1 g1, xi2 g2)`.
    pub fn factors(&self, x: f64, y: f64) -> (f64, f64) {
        let g1 = self.mu1 - self.theta * x + self.gamma * y - self.big_m * x * y + self.big_n * x * x;
        let g2 = self.mu2 - self.delta * x + self.unit * y + self.big_s * x * x + self.big_p * y * y;
        (g1, g2)
    }

    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        let (g1, g2) = self.factors(x, y);
        (x * g1, y * g2)
    }

    pub fn jacobian(&self, x: f64, y: f64) -> Mat2 {
        let (g1, g2) = self.factors(x, y);
        [
            [
                g1 + x * (-self.theta - self.big_m * y + 2.0 * self.big_n * x),
                x * (self.gamma - self.big_m * x),
            ],
            [
                y * (-self.delta + 2.0 * self.big_s * x),
                g2 + y * (self.unit + 2.0 * self.big_p * y),
            ],
        ]
    }

    /// Jacobian of the cofactors `(g1, g2)`; nonsingular at the interior equilibrium.
    pub fn factor_jacobian(&self, x: f64, y: f64) -> Mat2 {
        [
            [-self.theta - self.big_m * y + 2.0 * self.big_n * x, self.gamma - self.big_m * x],
            [-self.delta + 2.0 * self.big_s * x, self.unit + 2.0 * self.big_p * y],
        ]
    }

    pub fn hessian(&self, x: f64, y: f64) -> Hessian {
        let f1_xx = -2.0 * self.theta - 2.0 * self.big_m * y + 6.0 * self.big_n * x;
        let f1_xy = self.gamma - 2.0 * self.big_m * x;
        let f2_xx = 2.0 * self.big_s * y;
        let f2_xy = -self.delta + 2.0 * self.big_s * x;
        let f2_yy = 2.0 * self.unit + 6.0 * self.big_p * y;
        [[[f1_xx, f1_xy], [f1_xy, 0.0]], [[f2_xx, f2_xy], [f2_xy, f2_yy]]]
    }

    /// Third derivatives; constant in the state because the field is cubic.
    pub fn third(&self) -> Third {
        let mut t = [[[[0.0; 2]; 2]; 2]; 2];
        t[0][0][0][0] = 6.0 * self.big_n;
        let m = -2.0 * self.big_m;
        t[0][0][0][1] = m;
        t[0][0][1][0] = m;
        t[0][1][0][0] = m;
        let s = 2.0 * self.big_s;
        t[1][0][0][1] = s;
        t[1][0][1][0] = s;
        t[1][1][0][0] = s;
        t[1][1][1][1] = 6.0 * self.big_p;
        t
    }
}

/// Contracts a Hessian with `(v, v)`.
pub fn contract2(h: &Hessian, v: [f64; 2]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (i, hi) in h.iter().enumerate() {
        for j in 0..2 {
            for k in 0..2 {
                out[i] += hi[j][k] * v[j] * v[k];
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub theta: BivariatePoly,
    pub gamma: BivariatePoly,
    pub delta: BivariatePoly,
    pub big_m: BivariatePoly,
    pub big_n: BivariatePoly,
    pub big_s: BivariatePoly,
    pub big_p: BivariatePoly,
    pub radius: f64,
}

impl SystemModel {
    /// Validates `gamma(0) < 0`, `radius > 0` and finiteness.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theta: BivariatePoly,
        gamma: BivariatePoly,
        delta: BivariatePoly,
        big_m: BivariatePoly,
        big_n: BivariatePoly,
        big_s: BivariatePoly,
        big_p: BivariatePoly,
        radius: f64,
    ) -> Result<Self> {
        let model = Self { theta, gamma, delta, big_m, big_n, big_s, big_p, radius };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Validation(format!("radius must be positive, got {}", self.radius)));
        }
        if !self.polys().iter().all(|(_, p)| p.is_finite()) {
            return Err(Error::Validation("coefficients must be finite".into()));
        }
        let g0 = self.gamma.constant_term();
        if g0 >= 0.0 || g0.is_nan() {
            return Err(Error::Validation(format!("gamma(0) must be negative, got {g0}")));
        }
        Ok(())
    }

    fn polys(&self) -> [(&'static str, &BivariatePoly); 7] {
        [
            ("theta", &self.theta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("M", &self.big_m),
            ("N", &self.big_n),
            ("S", &self.big_s),
            ("P", &self.big_p),
        ]
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        self.radius = radius;
        self.validate()?;
        Ok(self)
    }

    pub fn check_mu(&self, mu: ParamPoint) -> Result<()> {
        if !(mu.mu1.is_finite() && mu.mu2.is_finite()) {
            return Err(Error::NonFinite("parameter point"));
        }
        let norm = mu.norm();
        // a hair of slack so that points constructed as radius * unit vector pass
        if norm > self.radius * (1.0 + 1e-12) {
            return Err(Error::Domain { norm, radius: self.radius });
        }
        Ok(())
    }

    /// Coefficients at `mu` without the domain check.
    pub fn coeffs_unchecked(&self, mu: ParamPoint) -> FieldCoeffs {
        let (a, b) = (mu.mu1, mu.mu2);
        FieldCoeffs {
            mu1: a,
            mu2: b,
            theta: self.theta.eval(a, b),
            gamma: self.gamma.eval(a, b),
            delta: self.delta.eval(a, b),
            big_m: self.big_m.eval(a, b),
            big_n: self.big_n.eval(a, b),
            big_s: self.big_s.eval(a, b),
            big_p: self.big_p.eval(a, b),
            unit: 1.0,
        }
    }

    pub fn coeffs(&self, mu: ParamPoint) -> Result<FieldCoeffs> {
        self.check_mu(mu)?;
        Ok(self.coeffs_unchecked(mu))
    }

    /// Coefficients of `df/dmu_which`; the field formulas apply to them verbatim.
    pub fn coeffs_dmu(&self, mu: ParamPoint, which: u8) -> Result<FieldCoeffs> {
        self.check_mu(mu)?;
        if which != 1 && which != 2 {
            return Err(Error::Validation(format!("parameter index must be 1 or 2, got {which}")));
        }
        let (a, b) = (mu.mu1, mu.mu2);
        let d = |p: &BivariatePoly| p.partial(which).eval(a, b);
        Ok(FieldCoeffs {
            mu1: if which == 1 { 1.0 } else { 0.0 },
            mu2: if which == 2 { 1.0 } else { 0.0 },
            theta: d(&self.theta),
            gamma: d(&self.gamma),
            delta: d(&self.delta),
            big_m: d(&self.big_m),
            big_n: d(&self.big_n),
            big_s: d(&self.big_s),
            big_p: d(&self.big_p),
            unit: 0.0,
        })
    }

    pub fn eval_field(&self, mu: ParamPoint, xi: StatePoint) -> Result<(f64, f64)> {
        let (f1, f2) = self.coeffs(mu)?.field(xi.xi1, xi.xi2);
        finite2([f1, f2], "field").map(|v| (v[0], v[1]))
    }

    pub fn jacobian(&self, mu: ParamPoint, xi: StatePoint) -> Result<Mat2> {
        let j = self.coeffs(mu)?.jacobian(xi.xi1, xi.xi2);
        finite_mat(j, "jacobian")
    }

    pub fn hessian(&self, mu: ParamPoint, xi: StatePoint) -> Result<Hessian> {
        Ok(self.coeffs(mu)?.hessian(xi.xi1, xi.xi2))
    }

    pub fn third_derivatives(&self, mu: ParamPoint) -> Result<Third> {
        Ok(self.coeffs(mu)?.third())
    }

    /// `D^2 f(xi, mu)(v, v)`.
    pub fn second_directional(&self, mu: ParamPoint, xi: StatePoint, v: [f64; 2]) -> Result<[f64; 2]> {
        let h = self.hessian(mu, xi)?;
        finite2(contract2(&h, v), "second derivative")
    }

    /// Exact `df/dmu_which` at `(mu, xi)`.
    pub fn d_mu(&self, mu: ParamPoint, xi: StatePoint, which: u8) -> Result<[f64; 2]> {
        let (a, b) = self.coeffs_dmu(mu, which)?.field(xi.xi1, xi.xi2);
        finite2([a, b], "parameter derivative")
    }

    /// State Jacobian of `df/dmu_which`.
    pub fn d_mu_jacobian(&self, mu: ParamPoint, xi: StatePoint, which: u8) -> Result<Mat2> {
        finite_mat(self.coeffs_dmu(mu, which)?.jacobian(xi.xi1, xi.xi2), "parameter jacobian")
    }

    /// Structural case selection from the stored constant terms (exact zero tests).
    pub fn classify_case(&self) -> Result<DegeneracyCase> {
        if self.gamma.constant_term() >= 0.0 {
            return Err(Error::Validation("gamma(0) must be negative".into()));
        }
        let theta0 = self.theta.constant_term() == 0.0;
        let delta0 = self.delta.constant_term() == 0.0;
        Ok(match (theta0, delta0) {
            (true, false) => DegeneracyCase::CaseA,
            (false, true) => DegeneracyCase::CaseB,
            (true, true) => DegeneracyCase::DoublyDegenerate,
            (false, false) => DegeneracyCase::NonDegenerate,
        })
    }

    /// Model of the variables `eta = c xi`, `tau = t / c`, `mu' = c mu`.
    ///
    /// The family is closed under this change of variables: theta, gamma and
    /// delta keep their values, the cubic coefficients are divided by `c`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Validation(format!("scale factor must be positive, got {c}")));
        }
        SystemModel::new(
            self.theta.rescale_args(c),
            self.gamma.rescale_args(c),
            self.delta.rescale_args(c),
            self.big_m.rescale_args(c).scaled(1.0 / c),
            self.big_n.rescale_args(c).scaled(1.0 / c),
            self.big_s.rescale_args(c).scaled(1.0 / c),
            self.big_p.rescale_args(c).scaled(1.0 / c),
            self.radius * c,
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s)?;
        file.into_model()
    }

    pub fn to_json_string(&self) -> String {
        let file = ModelFile::from_model(self);
        // serialization of plain maps of finite floats cannot fail
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

/// On-disk layout: one `"i,j" -> value` object per coefficient, plus `radius`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default = "default_radius")]
    radius: f64,
    #[serde(default)]
    theta: BTreeMap<String, f64>,
    gamma: BTreeMap<String, f64>,
    #[serde(default)]
    delta: BTreeMap<String, f64>,
    #[serde(rename = "M", default)]
    big_m: BTreeMap<String, f64>,
    #[serde(rename = "N", default)]
    big_n: BTreeMap<String, f64>,
    #[serde(rename = "S", default)]
    big_s: BTreeMap<String, f64>,
    #[serde(rename = "P", default)]
    big_p: BTreeMap<String, f64>,
}

fn default_radius() -> f64 {
    DEFAULT_RADIUS
}

impl ModelFile {
    fn into_model(self) -> Result<SystemModel> {
        SystemModel::new(
            BivariatePoly::from_key_map(&self.theta)?,
            BivariatePoly::from_key_map(&self.gamma)?,
            BivariatePoly::from_key_map(&self.delta)?,
            BivariatePoly::from_key_map(&self.big_m)?,
            BivariatePoly::from_key_map(&self.big_n)?,
            BivariatePoly::from_key_map(&self.big_s)?,
            BivariatePoly::from_key_map(&self.big_p)?,
            self.radius,
        )
    }

    fn from_model(m: &SystemModel) -> Self {
        Self {
            radius: m.radius,
            theta: m.theta.to_key_map(),
            gamma: m.gamma.to_key_map(),
            delta: m.delta.to_key_map(),
            big_m: m.big_m.to_key_map(),
            big_n: m.big_n.to_key_map(),
            big_s: m.big_s.to_key_map(),
            big_p: m.big_p.to_key_map(),
        }
    }
}

fn finite2(v: [f64; 2], what: &'static str) -> Result<[f64; 2]> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn finite_mat(m: Mat2, what: &'static str) -> Result<Mat2> {
    if m.iter().flatten().all(|x| x.is_finite()) {
        Ok(m)
    } else {
        Err(Error::NonFinite(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn origin_is_always_an_equilibrium() {
        let m = presets::ma();
        let f = m.eval_field(ParamPoint::new(0.03, -0.02), StatePoint::ORIGIN).unwrap();
        assert_eq!(f, (0.0, 0.0));
    }

    #[test]
    fn ma_hand_evaluation() {
        let m = presets::ma();
        let f = m.eval_field(ParamPoint::ORIGIN, StatePoint::new(1.0, 1.0)).unwrap();
        assert_eq!(f, (0.0, 0.0));
        let (_, f2) = m.eval_field(ParamPoint::new(0.0004, 0.02), StatePoint::new(0.05236, 0.0)).unwrap();
        assert_eq!(f2, 0.0);
    }

    #[test]
    fn jacobian_at_origin_is_diagonal_mu() {
        let m = presets::mh();
        let mu = ParamPoint::new(0.013, -0.07);
        let j = m.jacobian(mu, StatePoint::ORIGIN).unwrap();
        assert_eq!(j, [[0.013, 0.0], [0.0, -0.07]]);
        let j0 = presets::ma().jacobian(ParamPoint::ORIGIN, StatePoint::ORIGIN).unwrap();
        assert_eq!(j0, [[0.0; 2]; 2]);
    }

    #[test]
    fn second_directional_is_quadratic() {
        let m = presets::mb();
        let mu = ParamPoint::new(0.01, 0.02);
        let xi = StatePoint::new(0.3, 0.2);
        assert_eq!(m.second_directional(mu, xi, [0.0, 0.0]).unwrap(), [0.0, 0.0]);
        let a = m.second_directional(mu, xi, [0.4, -0.9]).unwrap();
        let b = m.second_directional(mu, xi, [0.8, -1.8]).unwrap();
        assert!((b[0] - 4.0 * a[0]).abs() < 1e-14 && (b[1] - 4.0 * a[1]).abs() < 1e-14);
    }

    #[test]
    fn d_mu_examples() {
        let m = presets::ma();
        let mu = ParamPoint::new(0.01, 0.02);
        let x = 0.37;
        assert_eq!(m.d_mu(mu, StatePoint::ORIGIN, 1).unwrap(), [0.0, 0.0]);
        let d1 = m.d_mu(mu, StatePoint::new(x, 0.0), 1).unwrap();
        assert!((d1[0] - x).abs() < 1e-15 && d1[1] == 0.0);
        let d2 = m.d_mu(mu, StatePoint::new(x, 0.0), 2).unwrap();
        assert!((d2[0] + 3.0 * x * x).abs() < 1e-15 && d2[1] == 0.0);
    }

    #[test]
    fn domain_is_enforced() {
        let m = presets::ma();
        let err = m.eval_field(ParamPoint::new(0.2, 0.0), StatePoint::ORIGIN).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn case_tags() {
        assert_eq!(presets::ma().classify_case().unwrap(), DegeneracyCase::CaseA);
        assert_eq!(presets::mb().classify_case().unwrap(), DegeneracyCase::CaseB);
        let mut m = presets::ma();
        m.delta = BivariatePoly::from_terms(&[(1, 0, 1.0)]);
        assert_eq!(m.classify_case().unwrap(), DegeneracyCase::DoublyDegenerate);
        m.theta = BivariatePoly::constant(1.0);
        m.delta = BivariatePoly::constant(1.0);
        assert_eq!(m.classify_case().unwrap(), DegeneracyCase::NonDegenerate);
    }

    #[test]
    fn nonnegative_gamma_is_rejected() {
        let m = presets::ma();
        let r = SystemModel::new(
            m.theta.clone(),
            BivariatePoly::constant(0.0),
            m.delta.clone(),
            m.big_m.clone(),
            m.big_n.clone(),
            m.big_s.clone(),
            m.big_p.clone(),
            0.1,
        );
        assert!(matches!(r, Err(Error::Validation(_))));
        let mut bad = presets::ma();
        bad.gamma = BivariatePoly::constant(1.0);
        assert!(bad.classify_case().is_err());
    }

    #[test]
    fn json_round_trip_is_identity() {
        for m in [presets::ma(), presets::mb(), presets::mh()] {
            let s = m.to_json_string();
            let back = SystemModel::from_json_str(&s).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_json_string(), s);
        }
    }

    #[test]
    fn json_rejects_unknown_fields_and_bad_gamma() {
        assert!(SystemModel::from_json_str(r#"{"gamma": {"0,0": -1}, "zeta": {}}"#).is_err());
        assert!(SystemModel::from_json_str(r#"{"gamma": {"0,0": 1}}"#).is_err());
        assert!(SystemModel::from_json_str(r#"{"gamma": {"0,0": -1}, "radius": -0.1}"#).is_err());
    }
}
