//! Planar compact sets: convex regions with support vectors over a fixed angle
//! grid, finite point clouds, convex hulls and Hausdorff distances.
//!
//! Points of the plane are complex numbers. A [`ConvexRegion`] carries both its
//! counterclockwise vertex list and its support vector
//! `support[j] = max ⟨p, (cos θⱼ, sin θⱼ)⟩`, `θⱼ = 2πj/K`, and the two are kept
//! consistent: every constructor recomputes the support vector from the final
//! vertices. Points and segments are ordinary regions with one or two vertices.
//!
//! Because `K` is shared, unions of convex sets are pointwise maxima of support
//! vectors and intersections start from pointwise minima, which are then
//! rebuilt into a polygon by halfplane clipping.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rstar::RTree;

use crate::error::{Error, Result};

pub type Point = Complex64;

/// Default size of the shared angle grid.
pub const DEFAULT_ANGLES: usize = 360;

/// Default number of lattice steps across a region when it has to be filled
/// with samples (distance from a convex region to a non-convex set).
pub const FILL_STEPS: usize = 200;

#[inline]
pub(crate) fn dot(p: Point, d: Point) -> f64 {
    p.re * d.re + p.im * d.im
}

/// `(b − a) × (p − a)`; positive when `p` is left of the directed line `a → b`.
#[inline]
pub(crate) fn cross(a: Point, b: Point, p: Point) -> f64 {
    (b.re - a.re) * (p.im - a.im) - (b.im - a.im) * (p.re - a.re)
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (dot(p - a, ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Uniform grid of `K` directions `θⱼ = 2πj/K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AngleGrid {
    k: usize,
}

impl AngleGrid {
    /// At least three directions are needed for halfplane intersections to be bounded.
    pub fn new(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::validation(
                "angles",
                format!("angle grid needs at least 3 directions, got {k}"),
            ));
        }
        Ok(Self { k })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn angle(&self, j: usize) -> f64 {
        TAU * (j as f64) / (self.k as f64)
    }

    #[inline]
    pub fn direction(&self, j: usize) -> Point {
        Complex64::from_polar(1.0, self.angle(j))
    }

    pub fn directions(&self) -> Vec<Point> {
        (0..self.k).map(|j| self.direction(j)).collect()
    }

    /// Additive error `π·diameter/K` of representing a set by its grid samples.
    pub fn sampling_error(&self, diameter: f64) -> f64 {
        PI * diameter / self.k as f64
    }
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self { k: DEFAULT_ANGLES }
    }
}

/// Finite sample of a compact planar set. The sampled set lies within Hausdorff
/// distance `resolution` of the points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
    resolution: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Point>, resolution: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::validation(
                "resolution",
                format!("must be positive and finite, got {resolution}"),
            ));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::validation("points", "must be finite"));
        }
        Ok(Self { points, resolution })
    }

    /// Cloud at the smallest admissible resolution, for exactly known finite sets.
    pub fn exact(points: Vec<Point>) -> Result<Self> {
        Self::new(points, f64::EPSILON)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn union(&self, other: &PointCloud) -> PointCloud {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        PointCloud {
            points,
            resolution: self.resolution.max(other.resolution),
        }
    }

    pub fn translate(&self, z: Point) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| p + z).collect(),
            resolution: self.resolution,
        }
    }

    pub fn diameter(&self) -> f64 {
        diameter_of(&hull_vertices(&self.points))
    }
}

/// Nearest-neighbour index over a point set.
pub(crate) struct CloudIndex {
    tree: RTree<[f64; 2]>,
}

impl CloudIndex {
    pub(crate) fn new(points: &[Point]) -> Self {
        Self {
            tree: RTree::bulk_load(points.iter().map(|p| [p.re, p.im]).collect()),
        }
    }

    pub(crate) fn distance(&self, p: Point) -> f64 {
        match self.tree.nearest_neighbor(&[p.re, p.im]) {
            Some(q) => ((q[0] - p.re).powi(2) + (q[1] - p.im).powi(2)).sqrt(),
            None => f64::INFINITY,
        }
    }
}

/// Convex hull vertices in counterclockwise order starting from the
/// lexicographically smallest point. Collinear points are dropped and
/// near-coincident vertices merged.
pub fn hull_vertices(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 1 {
        return pts;
    }
    let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let merge_tol = 1e-13 * (1.0 + scale);

    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    // merge cyclically consecutive vertices that coincide up to rounding
    let mut merged: Vec<Point> = Vec::with_capacity(hull.len());
    for p in hull {
        if merged.last().is_none_or(|q: &Point| (p - q).norm() > merge_tol) {
            merged.push(p);
        }
    }
    while merged.len() > 1 && (merged[0] - merged[merged.len() - 1]).norm() <= merge_tol {
        merged.pop();
    }
    merged
}

fn diameter_of(vertices: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

/// Support values of a counterclockwise convex polygon on the grid.
fn support_of(vertices: &[Point], grid: AngleGrid) -> Vec<f64> {
    let dirs = grid.directions();
    let n = vertices.len();
    if n <= 8 {
        return dirs
            .iter()
            .map(|&d| vertices.iter().map(|&v| dot(v, d)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
    }
    // the maximizing vertex advances counterclockwise as the direction rotates
    let mut best = (0..n)
        .max_by(|&i, &j| dot(vertices[i], dirs[0]).total_cmp(&dot(vertices[j], dirs[0])))
        .unwrap();
    let mut out = Vec::with_capacity(dirs.len());
    for &d in &dirs {
        let mut steps = 0;
        loop {
            let next = (best + 1) % n;
            if steps < n && dot(vertices[next], d) > dot(vertices[best], d) {
                best = next;
                steps += 1;
            } else {
                break;
            }
        }
        out.push(dot(vertices[best], d));
    }
    out
}

/// Compact convex planar set: counterclockwise vertices plus support vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexRegion {
    vertices: Vec<Point>,
    support: Vec<f64>,
}

impl ConvexRegion {
    /// Convex hull of `points`.
    pub fn from_points(points: &[Point], grid: AngleGrid) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self::from_hull(hull_vertices(points), grid))
    }

    fn from_hull(vertices: Vec<Point>, grid: AngleGrid) -> Self {
        let support = support_of(&vertices, grid);
        Self { vertices, support }
    }

    pub fn point(p: Point, grid: AngleGrid) -> Self {
        Self::from_hull(vec![p], grid)
    }

    pub fn regular_polygon(center: Point, radius: f64, n: usize, grid: AngleGrid) -> Result<Self> {
        let pts: Vec<Point> = (0..n.max(1))
            .map(|i| center + Complex64::from_polar(radius, TAU * i as f64 / n as f64))
            .collect();
        Self::from_points(&pts, grid)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, grid: AngleGrid) -> Result<Self> {
        let pts = [
            Complex64::new(x0, y0),
            Complex64::new(x1, y0),
            Complex64::new(x1, y1),
            Complex64::new(x0, y1),
        ];
        Self::from_points(&pts, grid)
    }

    /// Halfplane intersection `⋂ⱼ {p : ⟨p, dⱼ⟩ ≤ support[j]}`, canonicalized.
    pub fn from_support(support: &[f64], grid: AngleGrid) -> Result<Self> {
        if support.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: support.len(),
            });
        }
        if support.iter().any(|h| !h.is_finite()) {
            return Err(Error::validation("support", "values must be finite"));
        }
        let hmax = support.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b.abs()));
        // every point of the intersection has |p|·cos(π/K) ≤ max h
        let r = 2.0 * hmax / (PI / grid.len() as f64).cos() + 1.0;
        let tau = 1e-12 * (1.0 + hmax);
        let mut poly = vec![
            Complex64::new(-r, -r),
            Complex64::new(r, -r),
            Complex64::new(r, r),
            Complex64::new(-r, r),
        ];
        for (j, &h) in support.iter().enumerate() {
            poly = clip_halfplane(&poly, grid.direction(j), h, tau);
            if poly.is_empty() {
                return Err(Error::EmptyIntersection);
            }
        }
        Ok(Self::from_hull(hull_vertices(&poly), grid))
    }

    /// Circumscribed polygon of a convex set from its exact support values.
    ///
    /// When every support line touches the set, consecutive lines meet at the
    /// vertices of the halfplane intersection, so no clipping is needed.
    pub(crate) fn from_tight_support(support: &[f64], grid: AngleGrid) -> Self {
        let k = grid.len();
        let dirs = grid.directions();
        let det = (TAU / k as f64).sin();
        let corners: Vec<Point> = (0..k)
            .map(|j| {
                let (a, b) = (dirs[j], dirs[(j + 1) % k]);
                let (h1, h2) = (support[j], support[(j + 1) % k]);
                Complex64::new((h1 * b.im - h2 * a.im) / det, (a.re * h2 - b.re * h1) / det)
            })
            .collect();
        Self::from_hull(hull_vertices(&corners), grid)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn grid(&self) -> AngleGrid {
        AngleGrid {
            k: self.support.len(),
        }
    }

    pub fn diameter(&self) -> f64 {
        diameter_of(&self.vertices)
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Support value in an arbitrary direction `theta`.
    pub fn support_at(&self, theta: f64) -> f64 {
        let d = Complex64::from_polar(1.0, theta);
        self.vertices.iter().map(|&v| dot(v, d)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact test against the polygon, accepting points within `tol` of it.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        match self.vertices.len() {
            1 | 2 => self.distance_to(p) <= tol,
            n => (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                cross(a, b, p) >= -tol * (b - a).norm()
            }),
        }
    }

    /// Euclidean distance from `p` to the region (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        let v = &self.vertices;
        match v.len() {
            1 => (p - v[0]).norm(),
            2 => segment_distance(p, v[0], v[1]),
            n => {
                if self.contains(p, 0.0) {
                    return 0.0;
                }
                (0..n)
                    .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn translate(&self, z: Point) -> Self {
        let vertices: Vec<Point> = self.vertices.iter().map(|v| v + z).collect();
        Self::from_hull(vertices, self.grid())
    }

    /// Image under `p ↦ c·p`.
    pub fn scale(&self, c: Complex64) -> Self {
        let pts: Vec<Point> = self.vertices.iter().map(|v| v * c).collect();
        Self::from_hull(hull_vertices(&pts), self.grid())
    }

    /// Keeps only the vertices that attain the support in some grid direction.
    ///
    /// The support vector is unchanged; the polygon shrinks by at most the grid
    /// sampling error. Caps the vertex count at `K`.
    pub fn reduce_to_grid(&self) -> Self {
        if self.vertices.len() <= self.support.len() {
            return self.clone();
        }
        let grid = self.grid();
        let mut keep = vec![false; self.vertices.len()];
        for d in grid.directions() {
            let best = (0..self.vertices.len())
                .max_by(|&i, &j| dot(self.vertices[i], d).total_cmp(&dot(self.vertices[j], d)))
                .unwrap();
            keep[best] = true;
        }
        let vertices: Vec<Point> = self
            .vertices
            .iter()
            .zip(keep)
            .filter_map(|(&v, k)| k.then_some(v))
            .collect();
        Self::from_hull(vertices, grid)
    }

    pub fn centroid(&self) -> Point {
        self.vertices.iter().sum::<Point>() / self.vertices.len() as f64
    }

    /// Checks convexity, orientation and support-vector consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if n >= 3 {
            for i in 0..n {
                let turn = cross(
                    self.vertices[i],
                    self.vertices[(i + 1) % n],
                    self.vertices[(i + 2) % n],
                );
                if turn < -1e-12 {
                    return Err(Error::validation(
                        format!("vertices[{}]", (i + 1) % n),
                        format!("polygon is not convex (turn {turn:e})"),
                    ));
                }
            }
        }
        let recomputed = support_of(&self.vertices, self.grid());
        let scale = 1.0 + self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (j, (a, b)) in recomputed.iter().zip(&self.support).enumerate() {
            if (a - b).abs() > 1e-12 * scale {
                return Err(Error::validation(
                    format!("support[{j}]"),
                    format!("not canonical ({a} recomputed vs {b} stored)"),
                ));
            }
        }
        Ok(())
    }

    /// Samples covering the filled region at lattice spacing `step`: the vertices,
    /// points along every edge and the lattice points inside.
    pub(crate) fn fill_samples(&self, step: f64) -> Vec<Point> {
        let v = &self.vertices;
        let mut out = v.clone();
        let n = v.len();
        if n >= 2 {
            let edges = if n == 2 { 1 } else { n };
            for i in 0..edges {
                let (a, b) = (v[i], v[(i + 1) % n]);
                let len = (b - a).norm();
                let pieces = (len / step).ceil() as usize;
                for s in 1..pieces {
                    out.push(a + (b - a) * (s as f64 / pieces as f64));
                }
            }
        }
        if n >= 3 && step > 0.0 {
            let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for p in v {
                x0 = x0.min(p.re);
                x1 = x1.max(p.re);
                y0 = y0.min(p.im);
                y1 = y1.max(p.im);
            }
            let nx = ((x1 - x0) / step).floor() as usize;
            let ny = ((y1 - y0) / step).floor() as usize;
            for ix in 0..=nx {
                for iy in 0..=ny {
                    let p = Complex64::new(x0 + ix as f64 * step, y0 + iy as f64 * step);
                    if self.contains(p, 0.0) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

fn clip_halfplane(poly: &[Point], d: Point, h: f64, tau: f64) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let sa = dot(a, d) - h;
        let sb = dot(b, d) - h;
        let (ina, inb) = (sa <= tau, sb <= tau);
        if ina {
            out.push(a);
        }
        if ina != inb && sa != sb {
            let t = (sa / (sa - sb)).clamp(0.0, 1.0);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Convex hull of a cloud on the given grid.
pub fn convex_hull(cloud: &PointCloud, grid: AngleGrid) -> Result<ConvexRegion> {
    ConvexRegion::from_points(cloud.points(), grid)
}

/// Hull of several regions: the support vector is the pointwise maximum.
pub fn hull_of_regions(regions: &[ConvexRegion]) -> Result<ConvexRegion> {
    let first = regions.first().ok_or(Error::EmptyInput)?;
    let grid = first.grid();
    let mut pts = Vec::new();
    for r in regions {
        if r.grid() != grid {
            return Err(Error::GridMismatch {
                left: grid.len(),
                right: r.grid().len(),
            });
        }
        pts.extend_from_slice(r.vertices());
    }
    ConvexRegion::from_points(&pts, grid)
}

/// `A ∩ B` on a shared grid.
///
/// The pointwise minimum of the two support vectors is turned back into a
/// polygon by halfplane clipping and its supports are recomputed. When one
/// input already attains the minimum everywhere it is returned unchanged.
pub fn intersect_regions(a: &ConvexRegion, b: &ConvexRegion) -> Result<ConvexRegion> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch {
            left: a.grid().len(),
            right: b.grid().len(),
        });
    }
    let scale = 1.0
        + a.support
            .iter()
            .chain(&b.support)
            .fold(0.0f64, |m, h| m.max(h.abs()));
    let tau = 1e-12 * scale;
    if a.support.iter().zip(&b.support).all(|(x, y)| *x <= y + tau) {
        return Ok(a.clone());
    }
    if b.support.iter().zip(&a.support).all(|(x, y)| *x <= y + tau) {
        return Ok(b.clone());
    }
    let min: Vec<f64> = a.support.iter().zip(&b.support).map(|(x, y)| x.min(*y)).collect();
    ConvexRegion::from_support(&min, a.grid())
}

/// Vertices of `region` that are not within `collinear_tol` of the segment
/// joining their neighbours, i.e. the numerically extreme points.
pub fn extreme_points(region: &ConvexRegion, collinear_tol: f64) -> PointCloud {
    let mut pts: Vec<Point> = region.vertices().to_vec();
    loop {
        if pts.len() <= 2 {
            break;
        }
        let n = pts.len();
        let drop = (0..n).find(|&i| {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            segment_distance(pts[i], prev, next) <= collinear_tol
        });
        match drop {
            Some(i) => {
                pts.remove(i);
            }
            None => break,
        }
    }
    PointCloud {
        points: pts,
        resolution: collinear_tol.max(f64::EPSILON),
    }
}

/// Default collinearity tolerance `1e-9·diameter` for [`extreme_points`].
pub fn default_collinear_tol(region: &ConvexRegion) -> f64 {
    (1e-9 * region.diameter()).max(1e-15)
}

/// Any of the planar set representations accepted by [`hausdorff`].
#[derive(Clone, Copy, Debug)]
pub enum Shape<'a> {
    Cloud(&'a PointCloud),
    Region(&'a ConvexRegion),
    /// Union of convex regions (generally not convex).
    Union(&'a [ConvexRegion]),
}

impl<'a> From<&'a PointCloud> for Shape<'a> {
    fn from(c: &'a PointCloud) -> Self {
        Shape::Cloud(c)
    }
}

impl<'a> From<&'a ConvexRegion> for Shape<'a> {
    fn from(r: &'a ConvexRegion) -> Self {
        Shape::Region(r)
    }
}

impl<'a> From<&'a [ConvexRegion]> for Shape<'a> {
    fn from(u: &'a [ConvexRegion]) -> Self {
        Shape::Union(u)
    }
}

impl<'a> From<&'a Vec<ConvexRegion>> for Shape<'a> {
    fn from(u: &'a Vec<ConvexRegion>) -> Self {
        Shape::Union(u.as_slice())
    }
}

impl Shape<'_> {
    fn is_empty(&self) -> bool {
        match self {
            Shape::Cloud(c) => c.is_empty(),
            Shape::Region(r) => r.vertices.is_empty(),
            Shape::Union(u) => u.is_empty(),
        }
    }

    fn extreme_samples(&self) -> Vec<Point> {
        match self {
            Shape::Cloud(c) => c.points.clone(),
            Shape::Region(r) => r.vertices.clone(),
            Shape::Union(u) => u.iter().flat_map(|r| r.vertices.iter().copied()).collect(),
        }
    }

    fn filled_samples(&self, step: f64) -> Vec<Point> {
        match self {
            Shape::Cloud(c) => c.points.clone(),
            Shape::Region(r) => r.fill_samples(step),
            Shape::Union(u) => u.iter().flat_map(|r| r.fill_samples(step)).collect(),
        }
    }

    fn span(&self) -> f64 {
        diameter_of(&hull_vertices(&self.extreme_samples()))
    }
}

enum DistanceTarget<'a> {
    Cloud(CloudIndex),
    Region(&'a ConvexRegion),
    Union(&'a [ConvexRegion]),
}

impl DistanceTarget<'_> {
    fn distance(&self, p: Point) -> f64 {
        match self {
            DistanceTarget::Cloud(idx) => idx.distance(p),
            DistanceTarget::Region(r) => r.distance_to(p),
            DistanceTarget::Union(u) => {
                let mut best = f64::INFINITY;
                for r in u.iter() {
                    if r.vertices.len() >= 3 && r.contains(p, 0.0) {
                        return 0.0;
                    }
                    best = best.min(r.distance_to(p));
                }
                best
            }
        }
    }
}

/// `sup_{a ∈ A} d(a, B)`.
///
/// Distance to a convex target is a convex function, so its supremum over a
/// convex region or a union of them is attained at a vertex; against a
/// non-convex target the regions of `A` are filled with lattice samples at
/// spacing `step`, which can underestimate by at most `step/√2`.
pub fn directed_hausdorff(a: Shape<'_>, b: Shape<'_>, step: f64) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let samples = match b {
        Shape::Region(_) => a.extreme_samples(),
        _ => a.filled_samples(step),
    };
    let target = match b {
        Shape::Cloud(c) => DistanceTarget::Cloud(CloudIndex::new(&c.points)),
        Shape::Region(r) => DistanceTarget::Region(r),
        Shape::Union(u) => DistanceTarget::Union(u),
    };
    Ok(samples
        .iter()
        .map(|&p| target.distance(p))
        .fold(0.0, f64::max))
}

/// Symmetric Hausdorff distance between two planar sets.
///
/// Filled regions are sampled at `span/`[`FILL_STEPS`] where `span` is the
/// larger of the two diameters.
pub fn hausdorff<'a, 'b>(a: impl Into<Shape<'a>>, b: impl Into<Shape<'b>>) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let span = a.span().max(b.span());
    let step = (span / FILL_STEPS as f64).max(1e-12);
    let ab = directed_hausdorff(a, b, step)?;
    let ba = directed_hausdorff(b, a, step)?;
    Ok(ab.max(ba))
}

/// Both sides of the compact-set exchange
/// `⋂ₖ conv(Sₖ) = conv(⋂ₖ Sₖ)` for a finite decreasing family.
///
/// Returns `(⋂ₖ conv(Sₖ), conv(⋂ₖ Sₖ))`. The family must be nested up to
/// `tol`: every point of `Sₖ₊₁` lies within `tol` of `Sₖ`. The intersection
/// of clouds keeps the points of the last set that are within `tol` of every
/// set.
pub fn nested_conv_exchange(
    family: &[PointCloud],
    tol: f64,
    grid: AngleGrid,
) -> Result<(ConvexRegion, ConvexRegion)> {
    let last = family.last().ok_or(Error::EmptyInput)?;
    let indices: Vec<CloudIndex> = family.iter().map(|s| CloudIndex::new(s.points())).collect();
    for k in 1..family.len() {
        let excess = family[k]
            .points()
            .iter()
            .map(|&p| indices[k - 1].distance(p))
            .fold(0.0, f64::max);
        if excess > tol {
            return Err(Error::NotNested { index: k, excess });
        }
    }
    let mut lhs = convex_hull(&family[0], grid)?;
    for s in &family[1..] {
        lhs = intersect_regions(&lhs, &convex_hull(s, grid)?)?;
    }
    let common: Vec<Point> = last
        .points()
        .iter()
        .copied()
        .filter(|&p| indices.iter().all(|idx| idx.distance(p) <= tol))
        .collect();
    let rhs = ConvexRegion::from_points(&common, grid)?;
    Ok((lhs, rhs))
}
