//! Local bifurcation analysis of two-parameter planar Kolmogorov systems
//!
//! ```text
//! xi1' = xi1 (mu1 - theta xi1 + gamma xi2 - M xi1 xi2 + N xi1^2)
//! xi2' = xi2 (mu2 - delta xi1 + xi2 + S xi1^2 + P xi2^2)
//! ```
//!
//! in the two degenerate regimes `theta(0) = 0` and `delta(0) = 0`.

pub mod classify;
pub mod curves;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod par;
pub mod poly;
pub mod portrait;
pub mod presets;
pub mod report;
pub mod sotomayor;
pub mod tolerances;

pub use error::{Error, Result};
pub use model::{DegeneracyCase, ParamPoint, Rect, StatePoint, SystemModel, DEFAULT_RADIUS};
pub use poly::BivariatePoly;
pub use tolerances::Tolerances;
