//! Numerical toolkit for curvature statistics and candle functions along
//! geodesics.
//!
//! The library works with the curvature operator `R(t)` seen along a single
//! unit-speed geodesic: a field of symmetric `(n-1)×(n-1)` matrices. From that
//! data it computes
//!
//! - the root-Ricci statistic `Tr(sqrt(ρI − R))` and the associated curvature
//!   class `(ρ, κ)` ([`curvature`]),
//! - candle functions `s(γ, r)` and their logarithmic derivatives by
//!   integrating the matrix Jacobi equation `Y'' = −R(t) Y` ([`candle`]),
//! - the comparison conditions `LCD(κ, ℓ)`, `Candle(κ, ℓ)` and `Ball(κ, ℓ)`
//!   against constant-curvature models ([`comparison`]),
//! - the extremal variational problem whose minimizer certifies that the
//!   logarithmic candle derivative of a class-`(ρ, κ)` geodesic is bounded
//!   below by the constant-curvature value ([`extremal`]).
//!
//! Everything is deterministic: integrators use fixed steps, random profile
//! generation is seeded, and all tolerances are explicit.
//!
//! ```
//! use rrc::curvature::{CurvatureProfile, ManifoldModel};
//! use rrc::candle::{integrate_jacobi, candle, Boundary};
//!
//! // Complex hyperbolic plane: curvature operator diag(-4, -1, -1).
//! let model = ManifoldModel::rank_one(rrc::curvature::Family::C, 4).unwrap();
//! let profile = model.profile(1.0).unwrap();
//! let sol = integrate_jacobi(&profile, 1.0, 512, Boundary::InitialVelocity).unwrap();
//! let report = candle(&sol).unwrap();
//!
//! // s(γ, 1) = sinh(2)/2 · sinh(1)²
//! let exact = 2.0_f64.sinh() / 2.0 * 1.0_f64.sinh().powi(2);
//! assert!((report.s - exact).abs() < 1e-10);
//! ```

pub mod candle;
pub mod comparison;
pub mod curvature;
mod error;
pub mod extremal;
pub mod symmat;

pub use error::{Error, Result};

// Matrix paths and Jacobi solutions are expressed in nalgebra types.
pub use nalgebra;
