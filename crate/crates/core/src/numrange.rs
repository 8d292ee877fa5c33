//! Numerical range `W(A) = {⟨Ax, x⟩ : ‖x‖ = 1}` of a square matrix.
//!
//! For each grid angle θ the largest eigenvalue of `Re(e^{-iθ}A)` is the
//! support value of `W(A)` in direction θ, and the Rayleigh quotient of a top
//! eigenvector is a boundary point attaining it. The attained points span the
//! `inner` polygon; the support lines bound the `outer` polygon. Both have the
//! same grid supports and `inner ⊆ W(A) ⊆ outer`.
//!
//! The Hausdorff gap between the two obeys `gap ≤ π·diam(W)/K`, the grid
//! sampling error, and for strictly convex smooth boundaries decays like `K⁻²`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::convex2d::{hausdorff, AngleGrid, ConvexRegion, Point};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, max_eigenpair, rayleigh, ComplexMatrix, DEFAULT_EIG_TOL};

/// Smallest grid accepted by [`numerical_range`].
pub const MIN_ANGLES: usize = 8;

/// Constant `c` in the documented bound `gap ≤ c·diameter/K`.
pub const GAP_CONSTANT: f64 = std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct NumericalRangeResult {
    pub outer: ConvexRegion,
    pub inner: ConvexRegion,
    pub gap: f64,
    /// Support value at each grid angle.
    pub supports: Vec<f64>,
    /// Attained boundary point at each grid angle.
    pub points: Vec<Point>,
}

impl NumericalRangeResult {
    pub fn grid(&self) -> AngleGrid {
        self.inner.grid()
    }
}

/// Support value of `W(A)` at angle `theta` and a boundary point attaining it.
pub fn boundary_point(a: &ComplexMatrix, theta: f64) -> Result<(f64, Point)> {
    if a.dim() == 1 {
        let c = a.get(0, 0);
        return Ok(((Complex64::from_polar(1.0, -theta) * c).re, c));
    }
    let h = hermitian_part(a, theta);
    let eig = max_eigenpair(&h, DEFAULT_EIG_TOL)?;
    let point = rayleigh(a, &eig.vector)?;
    Ok((eig.lambda_max, point))
}

/// Inner and outer polygons of `W(A)` on the grid.
pub fn numerical_range(a: &ComplexMatrix, grid: AngleGrid) -> Result<NumericalRangeResult> {
    if grid.len() < MIN_ANGLES {
        return Err(Error::validation(
            "angles",
            format!("need at least {MIN_ANGLES} angles, got {}", grid.len()),
        ));
    }
    let samples: Vec<(f64, Point)> = if a.dim() == 1 {
        (0..grid.len())
            .map(|j| boundary_point(a, grid.angle(j)))
            .collect::<Result<_>>()?
    } else {
        (0..grid.len())
            .into_par_iter()
            .map(|j| boundary_point(a, grid.angle(j)))
            .collect::<Result<_>>()?
    };
    let (supports, points): (Vec<f64>, Vec<Point>) = samples.into_iter().unzip();
    let inner = ConvexRegion::from_points(&points, grid)?;
    let outer = if inner.is_point() {
        inner.clone()
    } else {
        ConvexRegion::from_tight_support(&supports, grid)
    };
    let gap = hausdorff(&inner, &outer)?;
    Ok(NumericalRangeResult {
        outer,
        inner,
        gap,
        supports,
        points,
    })
}

/// `W(A₁ ⊕ … ⊕ Aₘ) = conv(W(A₁) ∪ … ∪ W(Aₘ))`, from the blocks' inner polygons.
pub fn block_numerical_range(blocks: &[ComplexMatrix], grid: AngleGrid) -> Result<ConvexRegion> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts = Vec::new();
    for b in blocks {
        pts.extend_from_slice(numerical_range(b, grid)?.inner.vertices());
    }
    ConvexRegion::from_points(&pts, grid)
}

/// Union of precomputed ranges as one convex region (pointwise max of supports).
pub fn hull_of_ranges<'a>(
    ranges: impl IntoIterator<Item = &'a ConvexRegion>,
    grid: AngleGrid,
) -> Result<ConvexRegion> {
    let pts: Vec<Point> = ranges
        .into_iter()
        .flat_map(|r| r.vertices().iter().copied())
        .collect();
    ConvexRegion::from_points(&pts, grid)
}
