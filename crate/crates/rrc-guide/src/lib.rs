//! Doc-tested mirror of the guide book under `book/`.
//!
//! Each module embeds one chapter verbatim, so every ```rust block in the
//! book compiles and runs as a doc-test of this crate: the guide cannot
//! drift from the library. To render the book itself, run `mdbook build
//! book/` from the repository root.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/getting-started.md")]
pub mod getting_started {}

#[doc = include_str!("../../../book/src/symmetric-matrices.md")]
pub mod symmetric_matrices {}

#[doc = include_str!("../../../book/src/curvature-models.md")]
pub mod curvature_models {}

#[doc = include_str!("../../../book/src/jacobi-and-candles.md")]
pub mod jacobi_and_candles {}

#[doc = include_str!("../../../book/src/comparison-conditions.md")]
pub mod comparison_conditions {}

#[doc = include_str!("../../../book/src/extremal-problem.md")]
pub mod extremal_problem {}

#[doc = include_str!("../../../book/src/cli-reference.md")]
pub mod cli_reference {}
