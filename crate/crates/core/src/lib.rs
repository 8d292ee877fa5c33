//! Numerical ranges of matrices and essential numerical ranges of block
//! diagonal operators `T = ⊕ Aₙ`.
//!
//! The essential numerical range is computed as the convex hull of the closed
//! limit superior of the blocks' numerical ranges,
//! `W_e(⊕Aₙ) = conv(⋂ₖ closure ⋃_{n≥k} W(Aₙ))`.

pub mod blockop;
pub mod cli;
pub mod convex2d;
pub mod error;
pub mod essrange;
pub mod linalg;
pub mod numrange;
pub mod oracle;
pub mod regroup;

#[cfg(test)]
mod testutil;

pub use blockop::{BlockOperatorSpec, Decay, LimsupResult, TailModel};
pub use convex2d::{hausdorff, AngleGrid, ConvexRegion, PointCloud, Shape};
pub use error::{Error, Result};
pub use essrange::{diagonal_essential_range, essential_numerical_range, translate_spec, EssentialRangeResult};
pub use linalg::ComplexMatrix;
pub use numrange::{block_numerical_range, numerical_range, NumericalRangeResult};
pub use oracle::{inner_approximate_we, ConvexWeights};
pub use regroup::{choose_translation, regroup, verify_conv_free, Decomposition};
