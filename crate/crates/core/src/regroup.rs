//! Regrouping `T = ⊕ T̃ₘ` into super-blocks of consecutive blocks so that the
//! closed limsup of `W(T̃ₘ)` is already convex and equals `W_e(T)`.
//!
//! Level `m` splits `[0, 2π)` into `m` angular buckets, picks one extreme
//! point of `W_e` per bucket and extends the next group until it contains, for
//! every picked point, a block whose range comes within `ε/m` of it. The
//! angle function has to separate extreme points, which [`choose_translation`]
//! arranges by moving an interior point of `W_e` to the origin.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::blockop::{BlockOperatorSpec, RangeCache};
use crate::convex2d::{default_collinear_tol, extreme_points, hausdorff, AngleGrid, ConvexRegion, Point, Shape};
use crate::error::{Error, Result};
use crate::essrange::EssentialRangeResult;

pub const DEFAULT_EPS: f64 = 1e-2;
pub const DEFAULT_SCAN_CAP: usize = 1_000_000;
pub const DEFAULT_GROUPS: usize = 64;

/// Angles closer than this are treated as equal when certifying injectivity.
pub const ANGLE_TOL: f64 = 1e-9;

const SCAN_CHUNK_MIN: usize = 8;
const SCAN_CHUNK_MAX: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslationReason {
    /// `W_e` is a nonzero singleton; no shift needed.
    IdentityOk,
    /// `W_e = {0}`; shifted to `{1}`.
    SingletonShift,
    /// Shift by a point inside a chord between two extreme points.
    SegmentInterior,
}

impl TranslationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TranslationReason::IdentityOk => "identity_ok",
            TranslationReason::SingletonShift => "singleton_shift",
            TranslationReason::SegmentInterior => "segment_interior",
        }
    }
}

/// Translation `T ↦ T − zI` after which the angle function is injective on the
/// extreme points of `W_e(T − zI) = W_e(T) − z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslationChoice {
    pub z: Complex64,
    pub reason: TranslationReason,
}

fn theta(p: Point) -> f64 {
    p.im.atan2(p.re).rem_euclid(TAU)
}

fn region_extremes(region: &ConvexRegion) -> Vec<Point> {
    let reduced = region.reduce_to_grid();
    extreme_points(&reduced, default_collinear_tol(&reduced)).points().to_vec()
}

pub fn choose_translation(region: &ConvexRegion) -> Result<TranslationChoice> {
    let extremes = region_extremes(region);
    let scale = region.diameter().max(region.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max));
    let zero_tol = 1e-12 * (1.0 + scale);
    let choice = if extremes.len() == 1 {
        if extremes[0].norm() > zero_tol {
            TranslationChoice {
                z: Complex64::new(0.0, 0.0),
                reason: TranslationReason::IdentityOk,
            }
        } else {
            TranslationChoice {
                z: Complex64::new(-1.0, 0.0),
                reason: TranslationReason::SingletonShift,
            }
        }
    } else {
        let (mut w1, mut w2, mut best) = (extremes[0], extremes[1], -1.0);
        for (i, &a) in extremes.iter().enumerate() {
            for &b in &extremes[i + 1..] {
                let d = (a - b).norm();
                if d > best {
                    (w1, w2, best) = (a, b, d);
                }
            }
        }
        let mid = (w1 + w2) / 2.0;
        let z = if mid.norm() <= zero_tol { mid + (w2 - w1) / 4.0 } else { mid };
        TranslationChoice {
            z,
            reason: TranslationReason::SegmentInterior,
        }
    };
    let shifted: Vec<Point> = extremes.iter().map(|e| e - choice.z).collect();
    certify_injective(&shifted, zero_tol)?;
    Ok(choice)
}

/// No extreme point at the origin and no two sharing an angle.
fn certify_injective(points: &[Point], zero_tol: f64) -> Result<()> {
    if let Some(p) = points.iter().find(|p| p.norm() <= zero_tol) {
        return Err(Error::DegenerateGeometry(format!("extreme point {p} sits at the origin")));
    }
    let mut angles: Vec<f64> = points.iter().map(|&p| theta(p)).collect();
    angles.sort_by(f64::total_cmp);
    if angles.len() > 1 {
        let wrap = angles[0] + TAU - angles[angles.len() - 1];
        let min_gap = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::min);
        if min_gap <= ANGLE_TOL {
            return Err(Error::DegenerateGeometry(format!(
                "two extreme points share an angle (separation {min_gap:e})"
            )));
        }
    }
    Ok(())
}

/// Group boundaries `M₁ < M₂ < … < M_G`; group `m` holds blocks `M_{m−1}+1 ..= M_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub boundaries: Vec<usize>,
    /// Largest `d(ω_j^{(m)}, W(A_{m_j}))` over the buckets at level `m`.
    pub distances: Vec<f64>,
}

impl Decomposition {
    /// One block per group.
    pub fn identity(groups: usize) -> Self {
        Self {
            boundaries: (1..=groups).collect(),
            distances: vec![0.0; groups],
        }
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }

    /// Block range `(first, last)` of group `m` (1-based).
    pub fn group(&self, m: usize) -> (usize, usize) {
        let start = if m == 1 { 1 } else { self.boundaries[m - 2] + 1 };
        (start, self.boundaries[m - 1])
    }
}

/// Representative extreme point per bucket, empty buckets borrowing from the
/// nearest non-empty bucket (cyclically, ties to the lower index).
pub fn bucket_selection(extremes: &[Point], m: usize) -> Vec<Point> {
    let width = TAU / m as f64;
    let mut picks: Vec<Option<Point>> = vec![None; m];
    for &e in extremes {
        let t = theta(e);
        let j = ((t / width) as usize).min(m - 1);
        let better = match picks[j] {
            None => true,
            Some(cur) => e.norm() > cur.norm() || (e.norm() == cur.norm() && t < theta(cur)),
        };
        if better {
            picks[j] = Some(e);
        }
    }
    (0..m)
        .map(|j| {
            if let Some(p) = picks[j] {
                return p;
            }
            (1..=m)
                .flat_map(|d| {
                    let (a, b) = ((j + m - d % m) % m, (j + d) % m);
                    [a.min(b), a.max(b)]
                })
                .find_map(|i| picks[i])
                .expect("at least one bucket is non-empty")
        })
        .collect()
}

/// Builds `groups` levels of the regrouped decomposition.
///
/// `spec` and `we` must already be translated so that the angle function
/// separates the extreme points of `we.region`.
pub fn regroup(
    spec: &BlockOperatorSpec,
    we: &EssentialRangeResult,
    grid: AngleGrid,
    eps: f64,
    scan_cap: usize,
    groups: usize,
) -> Result<Decomposition> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation("eps", format!("must be positive, got {eps}")));
    }
    let extremes = region_extremes(&we.region);
    let mut cache = RangeCache::new(spec, grid);
    let mut boundaries = Vec::with_capacity(groups);
    let mut distances = Vec::with_capacity(groups);
    let mut prev = 0usize;
    for m in 1..=groups {
        let picks = bucket_selection(&extremes, m);
        let target = eps / m as f64;
        let mut found: Vec<Option<(usize, f64)>> = vec![None; m];
        let mut n = prev + 1;
        let mut chunk = SCAN_CHUNK_MIN;
        while found.iter().any(Option::is_none) {
            if n > prev + scan_cap {
                let j = found.iter().position(Option::is_none).unwrap();
                return Err(Error::ScanExhausted {
                    m,
                    j,
                    point: picks[j],
                    target,
                    cap: scan_cap,
                });
            }
            let count = chunk.min(prev + scan_cap + 1 - n);
            chunk = (2 * chunk).min(SCAN_CHUNK_MAX);
            let dists = block_distances(&mut cache, n, count, &picks, &found)?;
            for (offset, row) in dists.iter().enumerate() {
                for (j, d) in row.iter().enumerate() {
                    if found[j].is_none() && *d < target {
                        found[j] = Some((n + offset, *d));
                    }
                }
                if found.iter().all(Option::is_some) {
                    break;
                }
            }
            n += count;
        }
        let mm = found.iter().map(|f| f.unwrap().0).max().unwrap();
        distances.push(found.iter().map(|f| f.unwrap().1).fold(0.0, f64::max));
        boundaries.push(mm);
        prev = mm;
    }
    Ok(Decomposition { boundaries, distances })
}

/// `d(picks[j], W(A_n))` for the blocks `n0 … n0+count−1` and the buckets still open.
fn block_distances(
    cache: &mut RangeCache<'_>,
    n0: usize,
    count: usize,
    picks: &[Point],
    found: &[Option<(usize, f64)>],
) -> Result<Vec<Vec<f64>>> {
    let spec = cache.spec();
    let open = |j: usize| found[j].is_none();
    if spec.is_scalar() {
        return Ok(spec
            .blocks(n0, count)
            .iter()
            .map(|b| {
                let v = b.get(0, 0);
                (0..picks.len())
                    .map(|j| if open(j) { (picks[j] - v).norm() } else { f64::INFINITY })
                    .collect()
            })
            .collect());
    }
    let ranges = cache.window(n0, count)?;
    Ok(ranges
        .iter()
        .map(|r| {
            (0..picks.len())
                .map(|j| if open(j) { r.region.distance_to(picks[j]) } else { f64::INFINITY })
                .collect()
        })
        .collect())
}

/// `W(T̃ₘ)` for `m = 1 … len`, each reduced to at most `K` vertices.
pub fn group_ranges(spec: &BlockOperatorSpec, decomp: &Decomposition, grid: AngleGrid) -> Result<Vec<ConvexRegion>> {
    let mut cache = RangeCache::new(spec, grid);
    let mut out = Vec::with_capacity(decomp.len());
    for m in 1..=decomp.len() {
        let (a, b) = decomp.group(m);
        let count = b + 1 - a;
        let pts: Vec<Point> = if spec.is_scalar() {
            spec.blocks(a, count).iter().map(|blk| blk.get(0, 0)).collect()
        } else {
            cache
                .window(a, count)?
                .iter()
                .flat_map(|r| r.region.vertices().to_vec())
                .collect()
        };
        out.push(ConvexRegion::from_points(&pts, grid)?.reduce_to_grid());
    }
    Ok(out)
}

/// Conv-free gap with its tail-doubling certificate over the groups.
#[derive(Clone, Debug)]
pub struct ConvFreeReport {
    /// `hausdorff(⋃_{m ≥ k*} W(T̃ₘ), W_e)`, the union taken without any hull.
    pub gap: f64,
    pub converged_at: usize,
    /// `(k, distance between group windows [k, 2k) and [2k, 4k))`.
    pub certificate: Vec<(usize, f64)>,
}

/// Compares the closed limsup of the group ranges, estimated from the groups
/// after the doubling certificate stabilizes, with `we.region`.
pub fn verify_conv_free(
    spec: &BlockOperatorSpec,
    decomp: &Decomposition,
    we: &EssentialRangeResult,
    grid: AngleGrid,
    eps: f64,
) -> Result<ConvFreeReport> {
    let groups = group_ranges(spec, decomp, grid)?;
    let g = groups.len();
    let mut certificate = Vec::new();
    let mut k = 1;
    let mut last = f64::INFINITY;
    let converged_at = loop {
        if 4 * k - 1 > g {
            return Err(Error::NoConvergence { cap: g, eps, last });
        }
        let a = distinct(&groups[k - 1..2 * k - 1]);
        let b = distinct(&groups[2 * k - 1..4 * k - 1]);
        let d = union_distance(&a, &b, eps)?;
        certificate.push((k, d));
        last = d;
        if d <= eps {
            break k;
        }
        k *= 2;
    };
    let tail = distinct(&groups[converged_at - 1..]);
    let gap = hausdorff(Shape::Union(&tail), Shape::Region(&we.region))?;
    Ok(ConvFreeReport {
        gap,
        converged_at,
        certificate,
    })
}

fn distinct(regions: &[ConvexRegion]) -> Vec<ConvexRegion> {
    let mut out: Vec<ConvexRegion> = Vec::new();
    for r in regions {
        if !out.contains(r) {
            out.push(r.clone());
        }
    }
    out
}

/// Hausdorff distance between two unions of convex regions. Each region's
/// distance to the other union is first bounded by its distance to the closest
/// single member; the filled computation runs only when that bound exceeds
/// `threshold`.
fn union_distance(a: &[ConvexRegion], b: &[ConvexRegion], threshold: f64) -> Result<f64> {
    let bound = |x: &[ConvexRegion], y: &[ConvexRegion]| -> Result<f64> {
        let mut worst = 0.0f64;
        for r in x {
            let mut best = f64::INFINITY;
            for s in y {
                best = best.min(crate::convex2d::directed_hausdorff(Shape::Region(r), Shape::Region(s), 1.0)?);
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    let upper = bound(a, b)?.max(bound(b, a)?);
    if upper <= threshold {
        return Ok(upper);
    }
    hausdorff(Shape::Union(a), Shape::Union(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::essrange::{essential_numerical_range, translate_spec};
    use crate::linalg::ComplexMatrix;
    use crate::testutil::{c, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> AngleGrid {
        AngleGrid::new(360).unwrap()
    }

    fn two_matrix() -> BlockOperatorSpec {
        let nil = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        BlockOperatorSpec::periodic(vec![], vec![nil, ComplexMatrix::diagonal(&[c(2.0, 0.0), c(3.0, 0.0)])]).unwrap()
    }

    #[test]
    fn singleton_translations() {
        let p = ConvexRegion::point(c(3.0, 1.0), grid());
        let t = choose_translation(&p).unwrap();
        assert_eq!((t.z, t.reason), (c(0.0, 0.0), TranslationReason::IdentityOk));

        let o = ConvexRegion::point(c(0.0, 0.0), grid());
        let t = choose_translation(&o).unwrap();
        assert_eq!((t.z, t.reason), (c(-1.0, 0.0), TranslationReason::SingletonShift));
        assert_eq!(o.translate(-t.z).vertices(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn symmetric_segment_is_nudged() {
        let seg = ConvexRegion::from_points(&[c(-1.0, 0.0), c(1.0, 0.0)], grid()).unwrap();
        let t = choose_translation(&seg).unwrap();
        assert_eq!(t.reason, TranslationReason::SegmentInterior);
        assert!((t.z - c(0.5, 0.0)).norm() < 1e-15);
        let (a, b) = (c(-1.0, 0.0) - t.z, c(1.0, 0.0) - t.z);
        assert!((theta(a) - theta(b)).abs() > 1.0);
    }

    #[test]
    fn translated_regions_are_injective() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 3);
            let we = essential_numerical_range(&BlockOperatorSpec::constant(a), grid(), 1e-3).unwrap();
            let t = choose_translation(&we.region).unwrap();
            assert!(we.region.contains(t.z, 1e-12));
            let shifted: Vec<Point> = region_extremes(&we.region).iter().map(|e| e - t.z).collect();
            certify_injective(&shifted, 1e-12).unwrap();
        }
    }

    #[test]
    fn origin_on_extreme_point_is_degenerate() {
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
        assert!(matches!(certify_injective(&pts, 1e-12), Err(Error::DegenerateGeometry(_))));
        let pts = [c(1.0, 1.0), c(2.0, 2.0)];
        assert!(matches!(certify_injective(&pts, 1e-12), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn buckets_pick_largest_and_borrow() {
        let pts = [c(1.0, 0.1), c(2.0, 0.2), c(-1.0, -0.1)];
        let picks = bucket_selection(&pts, 4);
        assert_eq!(picks[0], c(2.0, 0.2));
        // bucket 1 is equidistant from buckets 0 and 2 and borrows the lower one
        assert_eq!(picks[1], c(2.0, 0.2));
        assert_eq!(picks[2], c(-1.0, -0.1));
        // bucket 3 neighbours buckets 2 and 0 cyclically; the tie goes to bucket 0
        assert_eq!(picks[3], c(2.0, 0.2));
    }

    #[test]
    fn constant_blocks_regroup_one_per_group() {
        let a = ComplexMatrix::from_real(2, &[1.0, 1.0, 0.0, 2.0]).unwrap();
        let spec = BlockOperatorSpec::constant(a);
        let we = essential_numerical_range(&spec, grid(), 1e-3).unwrap();
        let t = choose_translation(&we.region).unwrap();
        let spec = translate_spec(&spec, t.z);
        let we = essential_numerical_range(&spec, grid(), 1e-3).unwrap();
        let d = regroup(&spec, &we, grid(), 1e-2, 1000, 16).unwrap();
        assert_eq!(d, Decomposition::identity(16));
        let report = verify_conv_free(&spec, &d, &we, grid(), 1e-2).unwrap();
        assert!(report.gap <= 1e-9);
    }

    #[test]
    fn two_matrix_regrouping_removes_hull() {
        let spec = two_matrix();
        let we = essential_numerical_range(&spec, grid(), 1e-3).unwrap();
        let t = choose_translation(&we.region).unwrap();
        let spec = translate_spec(&spec, t.z);
        let we = essential_numerical_range(&spec, grid(), 1e-3).unwrap();
        let d = regroup(&spec, &we, grid(), 1e-2, 10_000, 64).unwrap();
        assert!(d.boundaries.windows(2).all(|w| w[0] < w[1]));
        // level 1 selects a single extreme point; later levels need both kinds
        for m in 2..=d.len() {
            let (a, b) = d.group(m);
            assert!(b > a, "group {m} must mix both block kinds");
        }
        let fixed = verify_conv_free(&spec, &d, &we, grid(), 1e-2).unwrap();
        assert!(fixed.gap <= 0.02, "{}", fixed.gap);
        let ungrouped = verify_conv_free(&spec, &Decomposition::identity(64), &we, grid(), 1e-2).unwrap();
        assert!(ungrouped.gap > 0.1, "{}", ungrouped.gap);
    }

    #[test]
    fn scan_cap_is_reported() {
        let spec = translate_spec(&two_matrix(), c(1.0, 0.0));
        let we = essential_numerical_range(&spec, grid(), 1e-3).unwrap();
        // a point nowhere near any block range
        let far = ConvexRegion::point(c(40.0, 0.0), grid());
        let we = EssentialRangeResult { region: far, ..we };
        assert!(matches!(
            regroup(&spec, &we, grid(), 1e-2, 50, 4),
            Err(Error::ScanExhausted { m: 1, j: 0, cap: 50, .. })
        ));
    }

    #[test]
    fn group_boundaries() {
        let d = Decomposition {
            boundaries: vec![2, 5, 9],
            distances: vec![0.0; 3],
        };
        assert_eq!(d.group(1), (1, 2));
        assert_eq!(d.group(2), (3, 5));
        assert_eq!(d.group(3), (6, 9));
    }
}
