#![allow(dead_code)]

use std::path::PathBuf;

use essential_range::cli::parse_spec;
use essential_range::convex2d::{AngleGrid, ConvexRegion, Point, PointCloud};
use essential_range::{BlockOperatorSpec, ComplexMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

pub fn load(name: &str) -> BlockOperatorSpec {
    parse_spec(&std::fs::read_to_string(data_path(name)).unwrap()).unwrap()
}

/// Corpus specs with a certified tail model.
pub const CORPUS: &[&str] = &[
    "constant.json",
    "two_matrix.json",
    "eventually_periodic_scalar.json",
    "vanishing.json",
    "prefixed_periodic.json",
    "dense.json",
];

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::new(dim, (0..dim * dim).map(|_| random_complex(rng)).collect()).unwrap()
}

pub fn nilpotent() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
}

pub fn two_matrix() -> BlockOperatorSpec {
    BlockOperatorSpec::periodic(
        vec![],
        vec![nilpotent(), ComplexMatrix::diagonal(&[c(2.0, 0.0), c(3.0, 0.0)])],
    )
    .unwrap()
}

/// Regular polygon with `n` vertices on the circle `|z − center| = r`.
pub fn disc(center: Point, r: f64, n: usize, grid: AngleGrid) -> ConvexRegion {
    ConvexRegion::regular_polygon(center, r, n, grid).unwrap()
}

/// `n` equally spaced points of the unit circle.
pub fn unit_circle(n: usize) -> PointCloud {
    let pts = (0..n)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    PointCloud::new(pts, std::f64::consts::PI / n as f64).unwrap()
}

/// Samples along a polyline at arc-length spacing `h`, shifted by `offset`, endpoints included.
fn sample_polyline(vertices: &[Point], h: f64, offset: f64) -> Vec<Point> {
    let mut out = vec![vertices[0]];
    let mut carry = offset;
    for w in vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        let mut t = carry;
        while t < len {
            out.push(a + (b - a) * (t / len));
            t += h;
        }
        carry = t - len;
        out.push(b);
    }
    out
}

/// A decreasing family `C₁ ⊇ C₂ ⊇ …` of compact sets (a polygon boundary, a
/// shrinking segment and a shrinking arc), each sampled independently at
/// spacing `h` with a random phase. Returns the samples and the nesting
/// tolerance `h/2`.
pub fn random_nested_family(rng: &mut impl Rng, levels: usize, h: f64) -> (Vec<PointCloud>, f64) {
    let corners: Vec<Point> = (0..rng.gen_range(3..8))
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let poly = essential_range::convex2d::hull_vertices(&corners);
    let mut ring = poly.clone();
    ring.push(poly[0]);

    let q = Complex64::from_polar(rng.gen_range(1.5..2.5), rng.gen_range(0.0..std::f64::consts::TAU));
    let u = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let rho0 = rng.gen_range(0.3..1.0);

    let arc_center = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let arc_r = rng.gen_range(1.5..2.5);
    let phi0 = rng.gen_range(0.0..std::f64::consts::TAU);
    let alpha0 = rng.gen_range(0.5..2.0);

    let mut family = Vec::with_capacity(levels);
    for k in 0..levels {
        let shrink = 1.0 - k as f64 / (2.0 * levels as f64);
        let mut pts = sample_polyline(&ring, h, rng.gen_range(0.0..h));
        pts.extend(sample_polyline(&[q, q + u * (rho0 * shrink)], h, rng.gen_range(0.0..h)));
        let alpha = alpha0 * shrink;
        let steps = (alpha * arc_r / h).ceil() as usize;
        let phase = rng.gen_range(0.0..1.0);
        pts.push(arc_center + Complex64::from_polar(arc_r, phi0));
        for i in 0..steps {
            let t = ((i as f64 + phase) / steps as f64).min(1.0);
            pts.push(arc_center + Complex64::from_polar(arc_r, phi0 + alpha * t));
        }
        pts.push(arc_center + Complex64::from_polar(arc_r, phi0 + alpha));
        family.push(PointCloud::new(pts, h / 2.0).unwrap());
    }
    (family, h / 2.0 + 1e-12)
}
