use alloc::string::String;

use crate::quad_control::ChargeValue;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the geometric and control routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid linkage: {0}")]
    InvalidLinkage(String),
    #[error("moduli space is empty: the longest side is not shorter than the sum of the others")]
    EmptyModuliSpace,
    #[error("degenerate linkage: a signed sum of the sides vanishes")]
    Degenerate,
    #[error("diagonals do not satisfy the Cayley-Menger relation (residual {residual:e}, tolerance {tolerance:e})")]
    NotOnCurve { residual: f64, tolerance: f64 },
    #[error("triangle inequality violated: {0}")]
    TriangleViolation(String),
    #[error("degenerate configuration: consecutive vertices coincide")]
    DegenerateConfig,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("vertical tangent: y(x) is not differentiable at this oval point")]
    TangentVertical,
    #[error("pole hit: a charged pair of vertices is (nearly) coincident")]
    PoleHit,
    #[error("invalid exponent {0}: must be positive")]
    InvalidAlpha(f64),
    #[error("invalid charge: {0}")]
    InvalidCharge(String),
    #[error("configuration is not convex")]
    NotConvex,
    #[error("configuration is on the boundary of the convex region; the stabilizing charge is the limit {limit}")]
    Boundary { limit: ChargeValue },
    #[error("gradient flow did not converge within {0} iterations")]
    MaxIterExceeded(usize),
    #[error("chart point is too close to the chart boundary")]
    ChartBoundary,
    #[error("configuration is not strictly convex")]
    NotStrictlyConvex,
    #[error("quadratic in s is degenerate (|C| too small)")]
    QuadraticDegenerate,
    #[error("configuration does not have exactly one aligned vertex")]
    NotAligned,
}
