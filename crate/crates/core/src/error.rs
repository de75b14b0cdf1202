use thiserror::Error;

use crate::model::DegeneracyCase;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter point |mu| = {norm:.3e} exceeds the validity radius {radius:.3e}")]
    Domain { norm: f64, radius: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid model: {0}")]
    Validation(String),

    #[error("operation requires {expected}, model is {found:?}")]
    Case {
        expected: &'static str,
        found: DegeneracyCase,
    },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("side condition violated: {0}")]
    SideCondition(String),

    #[error("root not bracketed: {0}")]
    Bracket(String),

    #[error("Jacobian has no eigenvalue near zero (smallest |lambda| = {0:.3e})")]
    NotSingular(f64),

    #[error("{0} has no real location at this parameter point")]
    Absent(&'static str),

    #[error("both eigenvalues are near zero; point is too close to a curve intersection")]
    DoubleZero,

    #[error("point is not on the Hopf curve (p = {p:.3e}, det = {det:.3e})")]
    NotOnHopfCurve { p: f64, det: f64 },

    #[error("integration step underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors that stem from bad input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Validation(_)
                | Error::Case { .. }
                | Error::SideCondition(_)
                | Error::Parse(_)
        )
    }
}
