//! Numeric tolerances shared by the analyses. Every field can be overridden
//! from the command line.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max-norm residual accepted from Newton refinement.
    pub newton: f64,
    /// Field residual required before an equilibrium is classified.
    pub equilibrium: f64,
    /// Coordinates within this distance of zero count as on the axis (proper).
    pub properness_tie: f64,
    /// Relative determinant threshold for hyperbolicity (scaled by |J|^2).
    pub det: f64,
    /// Relative trace/2 threshold for hyperbolicity (scaled by |J|).
    pub p: f64,
    /// Absolute residual below which a parameter point is on a curve.
    pub on_curve: f64,
    /// Eigenvalue magnitude treated as zero by the Sotomayor check.
    pub zero_eigen: f64,
    /// Threshold for the Sotomayor constants (scaled by the problem size).
    pub sotomayor: f64,
    /// Allowed |p| at a Hopf point.
    pub hopf_p: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton: 1e-12,
            equilibrium: 1e-10,
            properness_tie: 1e-10,
            det: 1e-9,
            p: 1e-9,
            on_curve: 1e-10,
            zero_eigen: 1e-8,
            sotomayor: 1e-8,
            hopf_p: 1e-8,
        }
    }
}
