//! Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Every boundary point of a numerical range comes out of [`max_eigenpair`]
//! applied to a rotated Hermitian part, so this module is the numerical kernel
//! of the crate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default residual tolerance for [`max_eigenpair`].
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Tolerance on `‖x‖ − 1` accepted by [`rayleigh`].
pub const UNIT_TOL: f64 = 1e-10;

/// Square dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    norm_bound: f64,
}

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("matrix", "entries must be finite"));
        }
        let norm_bound = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(Self {
            dim,
            entries,
            norm_bound,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::validation(
                    format!("row {i}"),
                    format!("has {} entries, expected {dim} (matrix must be square)", row.len()),
                ));
            }
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    /// Real matrix from row-major values.
    pub fn from_real(dim: usize, values: &[f64]) -> Result<Self> {
        Self::new(dim, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn scalar(c: Complex64) -> Self {
        Self {
            dim: 1,
            entries: vec![c],
            norm_bound: c.norm(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
            norm_bound: 0.0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = d;
        }
        m.refresh_norm();
        m
    }

    /// Block diagonal matrix `blocks[0] ⊕ blocks[1] ⊕ …`.
    pub fn direct_sum(blocks: &[ComplexMatrix]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyInput);
        }
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = Self::zeros(dim);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m.entries[(offset + i) * dim + offset + j] = b.get(i, j);
                }
            }
            offset += b.dim;
        }
        m.refresh_norm();
        Ok(m)
    }

    fn refresh_norm(&mut self) {
        self.norm_bound = self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Frobenius norm, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self {
            dim: n,
            entries,
            norm_bound: self.norm_bound,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * c).collect(),
            norm_bound: self.norm_bound * c.norm(),
        }
    }

    /// `self − z·I`.
    pub fn shifted(&self, z: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] -= z;
        }
        m.refresh_norm();
        m
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut m = Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            norm_bound: 0.0,
        };
        m.refresh_norm();
        Ok(m)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        let mut m = Self {
            dim: n,
            entries,
            norm_bound: 0.0,
        };
        m.refresh_norm();
        Ok(m)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self
            .entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entrywise deviation `|a_ij − conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Rotated Hermitian part `(e^{-iθ}A + e^{iθ}A*)/2`.
///
/// Its largest eigenvalue is the support value of `W(A)` in direction `θ`.
pub fn hermitian_part(a: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let n = a.dim;
    let rot = Complex64::from_polar(1.0, -theta);
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        // diagonal entries are real by construction
        let d = rot * a.get(i, i);
        entries[i * n + i] = Complex64::new(d.re, 0.0);
        for j in (i + 1)..n {
            let h = 0.5 * (rot * a.get(i, j) + (rot * a.get(j, i)).conj());
            entries[i * n + j] = h;
            entries[j * n + i] = h.conj();
        }
    }
    let mut h = ComplexMatrix {
        dim: n,
        entries,
        norm_bound: 0.0,
    };
    h.refresh_norm();
    h
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct HermEigResult {
    pub lambda_max: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
    pub sweeps: usize,
}

impl HermEigen {
    /// The eigenvector matrix (columns are eigenvectors), which is unitary.
    pub fn unitary(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (k, v) in self.vectors.iter().enumerate() {
            for i in 0..n {
                entries[i * n + k] = v[i];
            }
        }
        ComplexMatrix::new(n, entries).expect("eigenvector matrix is square")
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `h_pq` and then applies
/// the real symmetric Jacobi rotation, so the accumulated transform stays
/// unitary. Sweeps stop once the off-diagonal mass is at rounding level; the
/// sweep budget is `100·dim²`.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermEigen> {
    let n = h.dim;
    let mut a = h.entries.clone();
    let mut q = ComplexMatrix::identity(n).entries;
    let scale = h.norm_bound.max(f64::MIN_POSITIVE);
    let max_sweeps = 100 * n * n;
    let mut sweeps = 0;

    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[i * n + j].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    while n > 1 && off(&a) > 1e-15 * scale {
        if sweeps == max_sweeps {
            let residual = off(&a);
            return Err(Error::NonConvergence { sweeps, residual });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for r in (p + 1)..n {
                let hpq = a[p * n + r];
                let c = hpq.norm();
                if c <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p].re;
                let arr = a[r * n + r].re;
                let phase = (hpq / c).conj();
                let zeta = (arr - app) / (2.0 * c);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // V = diag(1, phase) · [[cs, sn], [-sn, cs]]
                let vpp = Complex64::new(cs, 0.0);
                let vpr = Complex64::new(sn, 0.0);
                let vrp = phase * (-sn);
                let vrr = phase * cs;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akr = a[k * n + r];
                    a[k * n + p] = akp * vpp + akr * vrp;
                    a[k * n + r] = akp * vpr + akr * vrr;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let ark = a[r * n + k];
                    a[p * n + k] = vpp.conj() * apk + vrp.conj() * ark;
                    a[r * n + k] = vpr.conj() * apk + vrr.conj() * ark;
                }
                a[p * n + r] = Complex64::new(0.0, 0.0);
                a[r * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[r * n + r].im = 0.0;

                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = qkp * vpp + qkr * vrp;
                    q[k * n + r] = qkp * vpr + qkr * vrr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let v: Vec<Complex64> = (0..n).map(|i| q[i * n + k]).collect();
            normalize(v)
        })
        .collect();
    Ok(HermEigen {
        values,
        vectors,
        sweeps,
    })
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = vec_norm(&v);
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    v
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest eigenpair of a Hermitian matrix.
///
/// The residual `‖Hv − λv‖` is checked against `tol·max(1, ‖H‖_F)`.
pub fn max_eigenpair(h: &ComplexMatrix, tol: f64) -> Result<HermEigResult> {
    let defect = h.hermitian_defect();
    if defect > 1e-12 * h.norm_bound.max(1.0) {
        return Err(Error::validation(
            "matrix",
            format!("not Hermitian (defect {defect:e})"),
        ));
    }
    if h.dim == 1 {
        return Ok(HermEigResult {
            lambda_max: h.entries[0].re,
            vector: vec![Complex64::new(1.0, 0.0)],
            residual: 0.0,
        });
    }
    let eig = hermitian_eigen(h)?;
    let lambda_max = eig.values[0];
    let vector = eig.vectors.into_iter().next().expect("dim ≥ 1");
    let hv = h.mul_vec(&vector)?;
    let residual = hv
        .iter()
        .zip(&vector)
        .map(|(a, b)| (a - b * lambda_max).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > tol * h.norm_bound.max(1.0) {
        return Err(Error::NonConvergence {
            sweeps: eig.sweeps,
            residual,
        });
    }
    Ok(HermEigResult {
        lambda_max,
        vector,
        residual,
    })
}

/// `⟨Ax, x⟩` for a unit vector `x`.
pub fn rayleigh(a: &ComplexMatrix, x: &[Complex64]) -> Result<Complex64> {
    let norm = vec_norm(x);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    let ax = a.mul_vec(x)?;
    Ok(ax.iter().zip(x).map(|(y, xi)| y * xi.conj()).sum())
}
