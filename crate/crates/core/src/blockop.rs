//! Finite descriptions of block diagonal operators `T = ⊕ₙ Aₙ`, their tail
//! unions `⋃_{n≥k} W(Aₙ)` and the closed limit superior of `(W(Aₙ))ₙ`.
//!
//! A [`BlockOperatorSpec`] lists explicit blocks `A₁ … A_P` followed by a
//! [`TailModel`] generating `Aₙ` for every `n > P`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::convex2d::{hausdorff, AngleGrid, ConvexRegion, Point, PointCloud};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::numrange::numerical_range;

/// Default tail-doubling threshold.
pub const DEFAULT_EPS: f64 = 1e-3;

/// Default cap on the tail start index during doubling.
pub const DEFAULT_K_CAP: usize = 1 << 20;

/// Norm bound `‖Eₙ‖ ≤ decay(n)` of a vanishing perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// `c·n^{-p}`
    Power { c: f64, p: f64 },
}

impl Decay {
    pub fn at(&self, n: usize) -> f64 {
        match *self {
            Decay::Power { c, p } => c * (n as f64).powf(-p),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Decay::Power { c, p } => {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::validation("tail.decay.c", format!("must be finite and ≥ 0, got {c}")));
                }
                if !(p > 0.0 && p.is_finite()) {
                    return Err(Error::validation("tail.decay.p", format!("must be finite and > 0, got {p}")));
                }
                Ok(())
            }
        }
    }
}

/// Registered generator names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `Aₙ = [e^{iφ(n)}]` with `φ` enumerating `ℚ ∩ [0, 2π]`.
    DenseAngleDiagonal,
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::DenseAngleDiagonal => "dense_angle_diagonal",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "dense_angle_diagonal" => Some(Builtin::DenseAngleDiagonal),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TailModel {
    /// `A_{P+i} = cycle[(i − 1) mod L]`.
    Periodic { cycle: Vec<ComplexMatrix> },
    /// `A_{P+i} = limits[(i − 1) mod L] + decay(P+i)·S`, where `S` is the cyclic
    /// shift permutation of the block's dimension (the identity in dimension 1).
    Vanishing { limits: Vec<ComplexMatrix>, decay: Decay },
    /// `A_{P+i} = builtin(i) − shift·I`.
    Builtin { name: Builtin, shift: Complex64 },
}

impl TailModel {
    /// Number of distinct residues a window must cover to see the whole tail.
    fn period(&self) -> usize {
        match self {
            TailModel::Periodic { cycle } => cycle.len(),
            TailModel::Vanishing { limits, .. } => limits.len(),
            TailModel::Builtin { .. } => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperatorSpec {
    prefix: Vec<ComplexMatrix>,
    tail: TailModel,
    norm_bound: f64,
}

impl BlockOperatorSpec {
    pub fn new(prefix: Vec<ComplexMatrix>, tail: TailModel) -> Result<Self> {
        let mut norm_bound = prefix.iter().map(|a| a.norm_bound()).fold(0.0, f64::max);
        match &tail {
            TailModel::Periodic { cycle } => {
                if cycle.is_empty() {
                    return Err(Error::validation("tail.cycle", "cycle must be non-empty"));
                }
                norm_bound = cycle.iter().map(|a| a.norm_bound()).fold(norm_bound, f64::max);
            }
            TailModel::Vanishing { limits, decay } => {
                if limits.is_empty() {
                    return Err(Error::validation("tail.limits", "limit list must be non-empty"));
                }
                decay.validate()?;
                let worst = decay.at(prefix.len() + 1);
                norm_bound = limits
                    .iter()
                    .map(|a| a.norm_bound() + worst)
                    .fold(norm_bound, f64::max);
            }
            TailModel::Builtin { shift, .. } => {
                if !(shift.re.is_finite() && shift.im.is_finite()) {
                    return Err(Error::validation("tail.shift", "must be finite"));
                }
                norm_bound = norm_bound.max(1.0 + shift.norm());
            }
        }
        if !norm_bound.is_finite() {
            return Err(Error::validation("prefix", "entries must be finite"));
        }
        Ok(Self {
            prefix,
            tail,
            norm_bound,
        })
    }

    pub fn periodic(prefix: Vec<ComplexMatrix>, cycle: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(prefix, TailModel::Periodic { cycle })
    }

    pub fn constant(a: ComplexMatrix) -> Self {
        Self::periodic(vec![], vec![a]).expect("single-block cycle is valid")
    }

    pub fn dense_angle_diagonal() -> Self {
        Self::new(
            vec![],
            TailModel::Builtin {
                name: Builtin::DenseAngleDiagonal,
                shift: Complex64::new(0.0, 0.0),
            },
        )
        .expect("builtin spec is valid")
    }

    /// Scalar blocks `λ₁ … λ_P` followed by the repeating `cycle`.
    pub fn scalar_periodic(prefix: &[Complex64], cycle: &[Complex64]) -> Result<Self> {
        Self::periodic(
            prefix.iter().map(|&c| ComplexMatrix::scalar(c)).collect(),
            cycle.iter().map(|&c| ComplexMatrix::scalar(c)).collect(),
        )
    }

    pub fn prefix(&self) -> &[ComplexMatrix] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    /// `sup_n ‖Aₙ‖` bound.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub(crate) fn with_norm_bound(mut self, norm_bound: f64) -> Self {
        self.norm_bound = norm_bound;
        self
    }

    /// `A_n`, `n ≥ 1`.
    pub fn block(&self, n: usize) -> ComplexMatrix {
        assert!(n >= 1, "blocks are indexed from 1");
        let p = self.prefix.len();
        if n <= p {
            return self.prefix[n - 1].clone();
        }
        let i = n - p;
        match &self.tail {
            TailModel::Periodic { cycle } => cycle[(i - 1) % cycle.len()].clone(),
            TailModel::Vanishing { limits, decay } => {
                let base = &limits[(i - 1) % limits.len()];
                perturb(base, decay.at(n))
            }
            TailModel::Builtin { name, shift } => ComplexMatrix::scalar(builtin_value(*name, i) - shift),
        }
    }

    /// Block size `ℓₙ`.
    pub fn block_size(&self, n: usize) -> usize {
        let p = self.prefix.len();
        if n <= p {
            return self.prefix[n - 1].dim();
        }
        let i = n - p;
        match &self.tail {
            TailModel::Periodic { cycle } => cycle[(i - 1) % cycle.len()].dim(),
            TailModel::Vanishing { limits, .. } => limits[(i - 1) % limits.len()].dim(),
            TailModel::Builtin { .. } => 1,
        }
    }

    /// True when every block is 1×1.
    pub fn is_scalar(&self) -> bool {
        let tail_scalar = match &self.tail {
            TailModel::Periodic { cycle } => cycle.iter().all(|a| a.dim() == 1),
            TailModel::Vanishing { limits, .. } => limits.iter().all(|a| a.dim() == 1),
            TailModel::Builtin { .. } => true,
        };
        tail_scalar && self.prefix.iter().all(|a| a.dim() == 1)
    }

    /// Identifies blocks that are equal by construction.
    pub(crate) fn key(&self, n: usize) -> BlockKey {
        let p = self.prefix.len();
        if n <= p {
            return BlockKey::Prefix(n);
        }
        match &self.tail {
            TailModel::Periodic { cycle } => BlockKey::Cycle((n - p - 1) % cycle.len()),
            _ => BlockKey::Tail(n),
        }
    }

    /// Blocks `A_k, …, A_{k+count−1}`.
    pub fn blocks(&self, k: usize, count: usize) -> Vec<ComplexMatrix> {
        if let TailModel::Builtin { name, shift } = &self.tail {
            let p = self.prefix.len();
            let mut out: Vec<ComplexMatrix> = (k..(k + count).min(p + 1)).map(|n| self.block(n)).collect();
            let start = k.max(p + 1);
            if out.len() < count {
                out.extend(
                    builtin_iter(*name, start - p)
                        .take(count - out.len())
                        .map(|z| ComplexMatrix::scalar(z - shift)),
                );
            }
            return out;
        }
        (k..k + count).map(|n| self.block(n)).collect()
    }
}

/// `A + t·S` with `S` the cyclic shift `e_i ↦ e_{i+1 mod d}`.
fn perturb(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let d = a.dim();
    let mut entries = a.entries().to_vec();
    for i in 0..d {
        let j = (i + 1) % d;
        entries[j * d + i] += t;
    }
    ComplexMatrix::new(d, entries).expect("shape preserved")
}

fn builtin_value(name: Builtin, i: usize) -> Complex64 {
    match name {
        Builtin::DenseAngleDiagonal => {
            let (a, d) = dense_rational(i);
            angle_point(a, d)
        }
    }
}

fn builtin_iter(name: Builtin, i: usize) -> impl Iterator<Item = Complex64> {
    match name {
        Builtin::DenseAngleDiagonal => DenseRationals::starting_at(i).map(|(a, d)| angle_point(a, d)),
    }
}

fn angle_point(a: u64, d: u64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / d as f64)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn totients(limit: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=limit as u64).collect();
    for i in 2..=limit {
        if phi[i] == i as u64 {
            for j in (i..=limit).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    phi
}

/// `i`-th element (1-based) of `ℚ ∩ [0, 1]` listed by increasing denominator
/// and then numerator: `0/1, 1/1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, …`.
///
/// Every denominator level is spread over the whole interval, so any window of
/// consecutive indices covers `[0, 1]` with gaps of order one over the level.
pub fn dense_rational(i: usize) -> (u64, u64) {
    assert!(i >= 1, "enumeration is indexed from 1");
    match i {
        1 => return (0, 1),
        2 => return (1, 1),
        _ => {}
    }
    let rank = (i - 2) as u64;
    let mut limit = 64usize;
    loop {
        let phi = totients(limit);
        let mut r = rank;
        for (d, &count) in phi.iter().enumerate().skip(2) {
            if r <= count {
                let d = d as u64;
                let a = (1..d)
                    .filter(|&a| gcd(a, d) == 1)
                    .nth(r as usize - 1)
                    .expect("rank within level");
                return (a, d);
            }
            r -= count;
        }
        limit *= 2;
    }
}

/// Sequential form of [`dense_rational`].
#[derive(Clone, Debug)]
pub struct DenseRationals {
    a: u64,
    d: u64,
}

impl DenseRationals {
    pub fn starting_at(i: usize) -> Self {
        let (a, d) = dense_rational(i);
        Self { a, d }
    }
}

impl Iterator for DenseRationals {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        let out = (self.a, self.d);
        if self.d == 1 {
            if self.a == 0 {
                self.a = 1;
            } else {
                self.a = 1;
                self.d = 2;
            }
        } else {
            loop {
                self.a += 1;
                if self.a >= self.d {
                    self.d += 1;
                    self.a = 1;
                }
                if gcd(self.a, self.d) == 1 {
                    break;
                }
            }
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum BlockKey {
    Prefix(usize),
    Cycle(usize),
    Tail(usize),
}

/// Sampled numerical range of one block.
#[derive(Clone, Debug)]
pub struct BlockRange {
    /// Inner polygon of attained boundary values.
    pub region: ConvexRegion,
    /// Hausdorff distance within which the vertices sample `∂W`.
    pub resolution: f64,
}

impl BlockRange {
    pub fn of(a: &ComplexMatrix, grid: AngleGrid) -> Result<Self> {
        if a.dim() == 1 {
            return Ok(Self {
                region: ConvexRegion::point(a.get(0, 0), grid),
                resolution: 0.0,
            });
        }
        let r = numerical_range(a, grid)?;
        let v = r.inner.vertices();
        let n = v.len();
        let max_edge = (0..n).map(|i| (v[(i + 1) % n] - v[i]).norm()).fold(0.0, f64::max);
        Ok(Self {
            region: r.inner,
            resolution: r.gap + max_edge / 2.0,
        })
    }
}

/// Memo of block ranges keyed on block identity.
pub struct RangeCache<'a> {
    spec: &'a BlockOperatorSpec,
    grid: AngleGrid,
    map: HashMap<BlockKey, Arc<BlockRange>>,
}

impl<'a> RangeCache<'a> {
    pub fn new(spec: &'a BlockOperatorSpec, grid: AngleGrid) -> Self {
        Self {
            spec,
            grid,
            map: HashMap::new(),
        }
    }

    pub fn spec(&self) -> &'a BlockOperatorSpec {
        self.spec
    }

    pub fn grid(&self) -> AngleGrid {
        self.grid
    }

    pub fn get(&mut self, n: usize) -> Result<Arc<BlockRange>> {
        Ok(self.window(n, 1)?.pop().expect("one block"))
    }

    /// Ranges of blocks `k … k+count−1`, computed in parallel where missing.
    pub fn window(&mut self, k: usize, count: usize) -> Result<Vec<Arc<BlockRange>>> {
        let keys: Vec<BlockKey> = (k..k + count).map(|n| self.spec.key(n)).collect();
        if let TailModel::Builtin { .. } = self.spec.tail {
            // scalar tail blocks are cheap and never repeat
            let blocks = self.spec.blocks(k, count);
            return blocks
                .iter()
                .zip(&keys)
                .map(|(b, key)| match self.map.get(key) {
                    Some(r) => Ok(r.clone()),
                    None => BlockRange::of(b, self.grid).map(Arc::new),
                })
                .collect();
        }
        let mut missing: Vec<(BlockKey, usize)> = Vec::new();
        for (i, key) in keys.iter().enumerate() {
            if !self.map.contains_key(key) && !missing.iter().any(|(m, _)| m == key) {
                missing.push((*key, k + i));
            }
        }
        let grid = self.grid;
        let spec = self.spec;
        let computed: Vec<(BlockKey, Result<BlockRange>)> = missing
            .par_iter()
            .map(|&(key, n)| (key, BlockRange::of(&spec.block(n), grid)))
            .collect();
        for (key, r) in computed {
            self.map.insert(key, Arc::new(r?));
        }
        Ok(keys.iter().map(|key| self.map[key].clone()).collect())
    }
}

/// Samples of `⋃_{k ≤ n < k+horizon} W(Aₙ)` and the certified resolution
/// with respect to the closed tail union `closure ⋃_{n≥k} W(Aₙ)`.
#[derive(Clone, Debug)]
pub struct TailSample {
    pub cloud: PointCloud,
    /// Member ranges, one per distinct block in the window.
    pub regions: Vec<ConvexRegion>,
    /// Part of the resolution due to blocks beyond the window.
    pub truncation: f64,
}

/// Boundary samples of `W(Aₙ)` for `n = k … k+horizon−1`.
///
/// The cloud's resolution (with respect to the boundaries of the closed tail
/// union) is the sampling error of the block ranges plus the truncation
/// error of the tail model: zero for a periodic tail once the window covers a
/// full cycle, `2·decay(k)` for a vanishing perturbation once it covers every
/// limit, and the largest chord gap of the window on the unit circle for the
/// dense-angle generator.
pub fn tail_union(spec: &BlockOperatorSpec, k: usize, horizon: usize, grid: AngleGrid) -> Result<PointCloud> {
    let mut cache = RangeCache::new(spec, grid);
    Ok(tail_sample(&mut cache, k, horizon)?.cloud)
}

pub(crate) fn needed_horizon(spec: &BlockOperatorSpec, k: usize) -> usize {
    let start = k.max(spec.prefix.len() + 1);
    start + spec.tail.period() - k
}

pub fn tail_sample(cache: &mut RangeCache<'_>, k: usize, horizon: usize) -> Result<TailSample> {
    let spec = cache.spec();
    if k == 0 {
        return Err(Error::validation("k", "tail start must be ≥ 1"));
    }
    if horizon == 0 {
        return Err(Error::validation("horizon", "must be ≥ 1"));
    }
    let needed = needed_horizon(spec, k);
    if horizon < needed {
        return Err(Error::HorizonTooSmall { k, horizon, needed });
    }
    let ranges = cache.window(k, horizon)?;
    let mut points: Vec<Point> = Vec::new();
    let mut resolution = 0.0f64;
    let mut regions = Vec::new();
    let mut seen: Vec<*const BlockRange> = Vec::new();
    let mut circle_points: Vec<Point> = Vec::new();
    let p = spec.prefix.len();
    for (i, r) in ranges.iter().enumerate() {
        if let TailModel::Builtin { shift, .. } = spec.tail {
            if k + i > p {
                circle_points.push(r.region.vertices()[0] + shift);
            }
        } else {
            let ptr = Arc::as_ptr(r);
            if seen.contains(&ptr) {
                continue;
            }
            seen.push(ptr);
        }
        points.extend_from_slice(r.region.vertices());
        regions.push(r.region.clone());
        resolution = resolution.max(r.resolution);
    }
    let start = k.max(p + 1);
    let truncation = match &spec.tail {
        TailModel::Periodic { .. } => 0.0,
        TailModel::Vanishing { decay, .. } => 2.0 * decay.at(start),
        TailModel::Builtin { .. } => circle_gap(&circle_points),
    };
    let cloud = PointCloud::new(points, (resolution + truncation).max(f64::EPSILON))?;
    Ok(TailSample {
        cloud,
        regions,
        truncation,
    })
}

/// Largest distance from a point of the unit circle to the nearest sample.
fn circle_gap(points: &[Point]) -> f64 {
    if points.is_empty() {
        return 2.0;
    }
    let mut angles: Vec<f64> = points.iter().map(|p| p.arg().rem_euclid(std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let mut gap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    let radial = points.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
    2.0 * (gap / 4.0).sin() + radial
}

/// Closed limit superior of `(W(Aₙ))ₙ` with its stabilization certificate.
#[derive(Clone, Debug)]
pub struct LimsupResult {
    pub set: PointCloud,
    /// Ranges whose union is the limsup set (for the dense generator, its points).
    pub regions: Vec<ConvexRegion>,
    pub converged_at_k: usize,
    /// `(k, hausdorff(tail_k, tail_{2k}))` for every doubling step.
    pub certificate: Vec<(usize, f64)>,
    /// One past the last block index examined at convergence.
    pub window_end: usize,
}

/// Window `[k, k + horizon)` examined at tail start `k`.
pub(crate) fn doubling_horizon(spec: &BlockOperatorSpec, k: usize) -> usize {
    match spec.tail {
        TailModel::Builtin { .. } => k.max(needed_horizon(spec, k)),
        _ => needed_horizon(spec, k),
    }
}

/// Doubles `k` until consecutive tail samples agree within `eps` and the
/// truncation error of the tail model is at most `eps`.
pub fn limsup_ranges(spec: &BlockOperatorSpec, grid: AngleGrid, eps: f64) -> Result<LimsupResult> {
    limsup_ranges_capped(spec, grid, eps, DEFAULT_K_CAP)
}

pub fn limsup_ranges_capped(
    spec: &BlockOperatorSpec,
    grid: AngleGrid,
    eps: f64,
    k_cap: usize,
) -> Result<LimsupResult> {
    let mut cache = RangeCache::new(spec, grid);
    limsup_with_cache(&mut cache, eps, k_cap)
}

pub(crate) fn limsup_with_cache(cache: &mut RangeCache<'_>, eps: f64, k_cap: usize) -> Result<LimsupResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation("eps", format!("must be positive, got {eps}")));
    }
    let spec = cache.spec();
    let mut k = (spec.prefix.len() + 1).next_power_of_two();
    let mut certificate = Vec::new();
    let mut current = tail_sample(cache, k, doubling_horizon(spec, k))?;
    let mut last = f64::INFINITY;
    loop {
        if k > k_cap {
            return Err(Error::NoConvergence { cap: k_cap, eps, last });
        }
        let next = tail_sample(cache, 2 * k, doubling_horizon(spec, 2 * k))?;
        let d = hausdorff(&current.cloud, &next.cloud)?;
        certificate.push((k, d));
        last = d;
        if d <= eps && current.truncation <= eps {
            break;
        }
        current = next;
        k *= 2;
    }
    let window_end = k + doubling_horizon(spec, k);
    let (set, regions) = match &spec.tail {
        TailModel::Periodic { cycle } => exact_union(cycle, cache.grid())?,
        TailModel::Vanishing { limits, .. } => exact_union(limits, cache.grid())?,
        TailModel::Builtin { .. } => (current.cloud, current.regions),
    };
    Ok(LimsupResult {
        set,
        regions,
        converged_at_k: k,
        certificate,
        window_end,
    })
}

fn exact_union(blocks: &[ComplexMatrix], grid: AngleGrid) -> Result<(PointCloud, Vec<ConvexRegion>)> {
    let ranges: Vec<BlockRange> = blocks
        .par_iter()
        .map(|b| BlockRange::of(b, grid))
        .collect::<Result<_>>()?;
    let mut regions: Vec<ConvexRegion> = Vec::new();
    let mut resolution = 0.0f64;
    for r in ranges {
        resolution = resolution.max(r.resolution);
        if !regions.contains(&r.region) {
            regions.push(r.region);
        }
    }
    let points: Vec<Point> = regions.iter().flat_map(|r| r.vertices().iter().copied()).collect();
    Ok((PointCloud::new(points, resolution.max(f64::EPSILON))?, regions))
}
