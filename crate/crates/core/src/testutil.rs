//! Random fixtures shared by the unit tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::new(dim, (0..dim * dim).map(|_| gaussian(rng)).collect()).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let a = random_matrix(rng, dim);
    a.add(&a.adjoint()).unwrap().scale(c(0.5, 0.0))
}

pub fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    crate::oracle::random_unit_vector(rng, dim)
}
