//! Essential numerical range of a block diagonal operator:
//! `W_e(⊕Aₙ) = conv(⋂ₖ closure ⋃_{n≥k} W(Aₙ))`.
//!
//! The result is cross-checked against `⋂ₖ conv(closure ⋃_{n≥k} W(Aₙ))` over
//! a doubling schedule of tail starts; both sides describe the same set.

use num_complex::Complex64;

use crate::blockop::{limsup_with_cache, tail_sample, BlockOperatorSpec, RangeCache, TailModel, DEFAULT_K_CAP};
use crate::convex2d::{hausdorff, intersect_regions, AngleGrid, ConvexRegion, Point, PointCloud};
use crate::error::{Error, Result};

/// Gap-to-tolerance ratio beyond which the crosscheck is reported as inconsistent.
pub const CONSISTENCY_FACTOR: f64 = 10.0;

#[derive(Clone, Debug)]
pub struct EssentialRangeResult {
    pub region: ConvexRegion,
    pub limsup: PointCloud,
    /// Ranges whose union is the limsup set.
    pub limsup_regions: Vec<ConvexRegion>,
    pub crosscheck_gap: f64,
    /// Combined sampling tolerance the crosscheck is measured against.
    pub tolerance: f64,
    pub converged_at_k: usize,
    pub certificate: Vec<(usize, f64)>,
}

pub fn essential_numerical_range(spec: &BlockOperatorSpec, grid: AngleGrid, eps: f64) -> Result<EssentialRangeResult> {
    essential_numerical_range_capped(spec, grid, eps, DEFAULT_K_CAP)
}

pub fn essential_numerical_range_capped(
    spec: &BlockOperatorSpec,
    grid: AngleGrid,
    eps: f64,
    k_cap: usize,
) -> Result<EssentialRangeResult> {
    let mut cache = RangeCache::new(spec, grid);
    let limsup = limsup_with_cache(&mut cache, eps, k_cap)?;
    let region = ConvexRegion::from_points(limsup.set.points(), grid)?;

    let end = limsup.window_end;
    let mut k = 1;
    let mut crosscheck: Option<ConvexRegion> = None;
    let mut tail_resolution = 0.0f64;
    while k <= limsup.converged_at_k {
        let tail = tail_sample(&mut cache, k, end - k)?;
        tail_resolution = tail_resolution.max(tail.cloud.resolution());
        let hull = ConvexRegion::from_points(tail.cloud.points(), grid)?;
        crosscheck = Some(match crosscheck {
            None => hull,
            Some(acc) => intersect_regions(&acc, &hull)?,
        });
        k *= 2;
    }
    let crosscheck = crosscheck.expect("schedule contains k = 1");
    let crosscheck_gap = hausdorff(&region, &crosscheck)?;
    let tolerance = limsup.set.resolution() + tail_resolution + grid.sampling_error(crosscheck.diameter()) + 1e-12;
    if crosscheck_gap > CONSISTENCY_FACTOR * tolerance {
        return Err(Error::InconsistentResult {
            gap: crosscheck_gap,
            limit: CONSISTENCY_FACTOR * tolerance,
        });
    }
    Ok(EssentialRangeResult {
        region,
        limsup: limsup.set,
        limsup_regions: limsup.regions,
        crosscheck_gap,
        tolerance,
        converged_at_k: limsup.converged_at_k,
        certificate: limsup.certificate,
    })
}

/// Diagonal operators: `W_e = conv(limsup λₙ)`, with the limit points of the
/// scalar sequence merged into clusters of radius `eps`.
pub fn diagonal_essential_range(spec: &BlockOperatorSpec, grid: AngleGrid, eps: f64) -> Result<EssentialRangeResult> {
    if !spec.is_scalar() {
        return Err(Error::validation("tail", "diagonal range needs 1×1 blocks"));
    }
    let mut result = essential_numerical_range(spec, grid, eps)?;
    let points = cluster(result.limsup.points(), eps);
    result.region = ConvexRegion::from_points(&points, grid)?;
    result.limsup_regions = points.iter().map(|&p| ConvexRegion::point(p, grid)).collect();
    result.limsup = PointCloud::new(points, result.limsup.resolution().max(eps))?;
    Ok(result)
}

/// Greedy clustering: each point joins the first representative within `radius`.
fn cluster(points: &[Point], radius: f64) -> Vec<Point> {
    let mut reps: Vec<Point> = Vec::new();
    for &p in points {
        if !reps.iter().any(|r| (r - p).norm() <= radius) {
            reps.push(p);
        }
    }
    reps
}

/// The operator `T − zI`: every block becomes `Aₙ − zI`.
pub fn translate_spec(spec: &BlockOperatorSpec, z: Complex64) -> BlockOperatorSpec {
    let prefix = spec.prefix().iter().map(|a| a.shifted(z)).collect();
    let tail = match spec.tail() {
        TailModel::Periodic { cycle } => TailModel::Periodic {
            cycle: cycle.iter().map(|a| a.shifted(z)).collect(),
        },
        TailModel::Vanishing { limits, decay } => TailModel::Vanishing {
            limits: limits.iter().map(|a| a.shifted(z)).collect(),
            decay: *decay,
        },
        TailModel::Builtin { name, shift } => TailModel::Builtin {
            name: *name,
            shift: shift + z,
        },
    };
    BlockOperatorSpec::new(prefix, tail)
        .expect("translation preserves validity")
        .with_norm_bound(spec.norm_bound() + z.norm())
}
