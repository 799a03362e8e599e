use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the curvature, candle and extremal routines.
///
/// Numerical preconditions (window bounds, positive semidefiniteness,
/// invertibility) are reported as errors rather than panics so the CLI can map
/// them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The matrix that should be positive semidefinite has an eigenvalue below
    /// the clamping tolerance. For `sqrt(ρI − R)` this signals that the
    /// sectional bound `K ≤ ρ` is violated.
    #[error("matrix is not positive semidefinite (λ_min = {lambda_min:.6e}, tolerance {tol:.6e})")]
    NotPositiveSemidefinite { lambda_min: f64, tol: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("incompatible grids: {0}")]
    GridMismatch(String),

    #[error("jacobi integration needs at least 16 steps (got {0})")]
    StepCountTooSmall(usize),

    /// `det Y(r) ≈ 0` under Dirichlet normalization: `r` is conjugate to `0`.
    #[error("endpoint r = {r} is conjugate to 0 (det Y(r) = {det:.6e})")]
    SingularAtEndpoint { r: f64, det: f64 },

    /// The logarithmic candle derivative is undefined past the first conjugate
    /// point.
    #[error("first conjugate point at t = {at} precedes r = {r}")]
    ConjugateBeforeR { at: f64, r: f64 },

    /// `r ≥ π/√κ` in a constant-curvature model with `κ > 0`.
    #[error("model conjugate point reached: r = {r} ≥ π/√κ = {limit}")]
    ConjugateReached { r: f64, limit: f64 },

    #[error("operation requires a homogeneous model")]
    NotHomogeneous,

    #[error("model has positive curvature (λ_max = {0:.6e})")]
    PositiveCurvature(f64),

    #[error("expansion fit failed: {0}")]
    FitFailure(String),

    #[error("Y(t) is numerically singular at t = {0}")]
    SingularY(f64),

    /// `√ρ·r ≥ π`: the energy functional stops being positive definite.
    #[error("outside the positive-definiteness window: √ρ·r = {0:.6} ≥ π")]
    OutOfWindow(f64),

    /// `2r√ρ > π`: outside the window of the refined candle inequality.
    #[error("outside the comparison window: 2r√ρ = {0:.6} > π")]
    WindowViolated(f64),

    #[error("alternating minimization did not converge within {0} iterations")]
    NoConvergence(usize),
}
