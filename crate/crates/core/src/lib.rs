//! Boundary geometry of the numerical range `W(A) = {⟨x|Ax⟩ : ‖x‖ = 1}` of a
//! complex square matrix and the maximum-entropy inference map over it.
//!
//! The support function of `W(A)` in direction `e^{iθ}` is the smallest
//! eigenvalue `λ(θ)` of `Re(e^{-iθ}A)`. Tracking the analytic eigenvalue
//! branches of that one-parameter family gives the boundary points, facets,
//! corners and radii of curvature ([`geometry`]), the dual body ([`dual`]),
//! and the points where the maximum-entropy map is discontinuous
//! ([`maxent`]). Independent brute-force references live in [`oracle`].

pub mod dual;
pub mod eigencurves;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod maxent;
pub mod oracle;
pub mod report;

pub use eigencurves::{AngleGrid, EigenCurveTable};
pub use error::{Error, Result};
pub use geometry::NumericalRange;
pub use linalg::Matrix;
