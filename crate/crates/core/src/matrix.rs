//! Dense square complex matrices.
//!
//! Storage is row-major. Small products are done with a plain triple loop;
//! anything at or above [`FAER_THRESHOLD`] goes through `faer`, as do all
//! decompositions.

use std::fmt;
use std::sync::Once;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const FAER_THRESHOLD: usize = 24;

static LINALG_INIT: Once = Once::new();

/// Results must not depend on how many threads faer decides to use, so the
/// decompositions are pinned to sequential execution; parallelism lives one
/// level up, across samples.
pub(crate) fn linalg_init() {
    LINALG_INIT.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim.min(8) {
            let row: Vec<String> = (0..self.dim.min(8))
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Hermitian eigendecomposition: ascending eigenvalues and the unitary whose
/// columns are the corresponding eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// `a = u · diag(s) · v*` with singular values in nonincreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, C64::new(1.0, 0.0))
    }

    pub fn scalar(dim: usize, c: C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from `dim²` row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_row_major(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_dim(other);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_dim(other);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    fn check_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
    }

    /// Matrix product. Diagonal operands are detected and applied as row or
    /// column scalings.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_dim(other);
        let k = self.dim;
        if other.is_diagonal() {
            return Self::from_fn(k, |i, j| self[(i, j)] * other[(j, j)]);
        }
        if self.is_diagonal() {
            return Self::from_fn(k, |i, j| self[(i, i)] * other[(i, j)]);
        }
        if k >= FAER_THRESHOLD {
            linalg_init();
            let prod = self.to_faer() * other.to_faer();
            return Self::from_faer(prod.as_ref());
        }
        let mut out = vec![C64::new(0.0, 0.0); k * k];
        for i in 0..k {
            let row = &self.data[i * k..(i + 1) * k];
            let out_row = &mut out[i * k..(i + 1) * k];
            for (l, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let other_row = &other.data[l * k..(l + 1) * k];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: k, data: out }
    }

    /// `Tr(self · other)` in O(k²) without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> C64 {
        self.check_same_dim(other);
        let k = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                acc += self.data[i * k + j] * other.data[j * k + i];
            }
        }
        acc
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `tr = Tr / k`, the trace normalized so that `tr(1) = 1`.
    pub fn normalized_trace(&self) -> C64 {
        self.trace() / self.dim as f64
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        let k = self.dim;
        for i in 0..k {
            for j in 0..k {
                if i != j && self.data[i * k + j] != C64::new(0.0, 0.0) {
                    return false;
                }
            }
        }
        true
    }

    /// Largest entrywise deviation from self-adjointness.
    pub fn hermitian_defect(&self) -> f64 {
        let k = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in i..k {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `max |(a* a − 1)_ij| ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let k = self.dim;
        let gram = self.adjoint().mul(self);
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - target).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        if !self.is_self_adjoint(tol) {
            return false;
        }
        match self.hermitian_part().eigh_values() {
            Ok(vals) => vals.first().map_or(true, |&v| v >= -tol),
            Err(_) => false,
        }
    }

    /// `(a + a*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub(crate) fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self[(i, j)])
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    fn eigensolve_error(&self) -> Error {
        Error::Eigensolve {
            dim: self.dim,
            frobenius_norm: self.frobenius_norm(),
            max_abs_entry: self.max_abs_entry(),
            hermitian_defect: self.hermitian_defect(),
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigh_values(&self) -> Result<Vec<f64>> {
        linalg_init();
        let h = self.hermitian_part().to_faer();
        let mut vals = h
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| self.eigensolve_error())?;
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(self.eigensolve_error());
        }
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Full Hermitian eigendecomposition of the Hermitian part.
    pub fn eigh(&self) -> Result<HermitianEigen> {
        linalg_init();
        let h = self.hermitian_part().to_faer();
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| self.eigensolve_error())?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let k = self.dim;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
        let values: Vec<f64> = order.iter().map(|&i| s[i].re).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(self.eigensolve_error());
        }
        let vectors = Self::from_fn(k, |i, j| u[(i, order[j])]);
        Ok(HermitianEigen { values, vectors })
    }

    /// Eigenvalues of a general matrix (unordered).
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        linalg_init();
        let vals = self
            .to_faer()
            .eigenvalues()
            .map_err(|_| self.eigensolve_error())?;
        if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(self.eigensolve_error());
        }
        Ok(vals)
    }

    pub fn svd(&self) -> Result<Svd> {
        linalg_init();
        let svd = self
            .to_faer()
            .svd()
            .map_err(|_| Error::Svd { dim: self.dim })?;
        let s = svd.S().column_vector();
        Ok(Svd {
            u: Self::from_faer(svd.U()),
            s: (0..self.dim).map(|i| s[i].re).collect(),
            v: Self::from_faer(svd.V()),
        })
    }

    /// Singular values, nonincreasing.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        linalg_init();
        let mut s = self
            .to_faer()
            .singular_values()
            .map_err(|_| Error::Svd { dim: self.dim })?;
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    /// Operator norm (largest singular value).
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?[0])
    }

    /// `‖a‖ ≤ bound`, avoiding the SVD when Frobenius already decides it.
    pub fn operator_norm_at_most(&self, bound: f64) -> Result<bool> {
        let fro = self.frobenius_norm();
        if fro <= bound {
            return Ok(true);
        }
        if fro > bound * (self.dim as f64).sqrt() {
            return Ok(false);
        }
        Ok(self.operator_norm()? <= bound)
    }

    /// Thin QR of a square matrix: `(q, diag(r))`.
    pub(crate) fn qr_with_r_diagonal(&self) -> (ComplexMatrix, Vec<C64>) {
        linalg_init();
        let qr = self.to_faer().qr();
        let q = Self::from_faer(qr.compute_Q().as_ref());
        let r = qr.R();
        let diag = (0..self.dim).map(|i| r[(i, i)]).collect();
        (q, diag)
    }
}
