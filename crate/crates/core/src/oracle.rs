//! Independent checks from below: essential values assembled blockwise from
//! unit vectors and convex weights, and Monte-Carlo inner approximations.
//!
//! For distinct block indices `n ≥ k`, unit vectors `xₙ` in block `n` and
//! weights `wₙ ≥ 0` with `Σ wₙ = 1`, the vector `y = Σ √wₙ xₙ` is a unit vector
//! of the direct sum and `⟨Ty, y⟩ = Σ wₙ ⟨Aₙxₙ, xₙ⟩`. Letting `k → ∞` such
//! values accumulate only inside `W_e(T)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::blockop::BlockOperatorSpec;
use crate::convex2d::{dot, ConvexRegion, Point, PointCloud};
use crate::error::{Error, Result};
use crate::linalg::{rayleigh, vec_norm, UNIT_TOL};

/// Default number of blocks past `k` that samples draw from.
pub const DEFAULT_WINDOW: usize = 256;

/// Largest number of blocks combined in one sample; in the plane three
/// suffice for any hull point, four leave some slack.
pub const MAX_SUPPORT: usize = 4;

const WEIGHT_TOL: f64 = 1e-12;

/// Uniform random unit vector in `ℂ^dim` (normalized complex Gaussian).
pub fn random_unit_vector(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = vec_norm(&v);
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Non-negative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexWeights {
    weights: Vec<f64>,
}

impl ConvexWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self { weights })
    }

    /// Uniform on the simplex: normalized standard exponentials.
    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        let raw: Vec<f64> = (0..n.max(1)).map(|_| rng.sample::<f64, _>(Exp1) + 1e-300).collect();
        let sum: f64 = raw.iter().sum();
        Self {
            weights: raw.into_iter().map(|w| w / sum).collect(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct EssentialSample {
    pub value: Complex64,
    pub k: usize,
    pub weights: ConvexWeights,
    pub support_blocks: Vec<(usize, Vec<Complex64>)>,
}

/// `Σ wₙ ⟨Aₙxₙ, xₙ⟩` for unit vectors `xₙ` in distinct blocks `n ≥ k`.
pub fn sample_essential_value(
    spec: &BlockOperatorSpec,
    k: usize,
    weights: ConvexWeights,
    vectors: Vec<(usize, Vec<Complex64>)>,
) -> Result<EssentialSample> {
    if weights.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: vectors.len(),
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut norm_sq = 0.0;
    for (i, ((n, x), w)) in vectors.iter().zip(weights.as_slice()).enumerate() {
        if *n < k {
            return Err(Error::IndexBelowK { n: *n, k });
        }
        if vectors[..i].iter().any(|(m, _)| m == n) {
            return Err(Error::validation(format!("vectors[{i}]"), format!("block {n} used twice")));
        }
        let a = spec.block(*n);
        if x.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: x.len(),
            });
        }
        value += rayleigh(&a, x)? * *w;
        norm_sq += w * vec_norm(x).powi(2);
    }
    let norm = norm_sq.sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(EssentialSample {
        value,
        k,
        weights,
        support_blocks: vectors,
    })
}

/// Random sample over blocks `k .. k+window` with independent per-sample streams.
pub fn random_essential_sample(
    spec: &BlockOperatorSpec,
    k: usize,
    window: usize,
    rng: &mut impl Rng,
) -> Result<EssentialSample> {
    let size = rng.gen_range(1..=MAX_SUPPORT.min(window.max(1)));
    let mut indices: Vec<usize> = Vec::with_capacity(size);
    while indices.len() < size {
        let n = k + rng.gen_range(0..window.max(1));
        if !indices.contains(&n) {
            indices.push(n);
        }
    }
    let weights = ConvexWeights::random(rng, size);
    let vectors = indices
        .into_iter()
        .map(|n| (n, random_unit_vector(rng, spec.block_size(n))))
        .collect();
    sample_essential_value(spec, k, weights, vectors)
}

/// Cloud of `samples` essential values drawn from blocks `k .. k+window`.
///
/// Sample `i` uses stream `i` of a ChaCha generator seeded with `seed`, so the
/// cloud is identical across runs and thread counts.
pub fn inner_approximate_we(
    spec: &BlockOperatorSpec,
    k: usize,
    samples: usize,
    seed: u64,
    window: usize,
) -> Result<PointCloud> {
    let points: Vec<Point> = (0..samples.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            random_essential_sample(spec, k, window, &mut rng).map(|s| s.value)
        })
        .collect::<Result<_>>()?;
    PointCloud::exact(points)
}

/// `⟨point, dⱼ⟩ ≤ support[j] + tol` for every grid direction.
pub fn membership(point: Point, region: &ConvexRegion, tol: f64) -> bool {
    let grid = region.grid();
    region
        .support()
        .iter()
        .enumerate()
        .all(|(j, h)| dot(point, grid.direction(j)) <= h + tol)
}
