//! Complex vectors, row-major complex matrices and density matrices for
//! Hilbert-space dimensions of a few.

use super::{eig_hermitian, C64, QcoreError};
use std::ops::{Index, IndexMut};

/// Complex column vector of dimensionless amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec {
    data: Vec<C64>,
}

impl CVec {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Basis vector |k> of the given dimension.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_reals(data: &[f64]) -> Self {
        Self { data: data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn dot(&self, other: &CVec) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> CVec {
        let n = self.norm();
        self.scaled(C64::new(1.0 / n, 0.0))
    }

    pub fn scaled(&self, c: C64) -> CVec {
        CVec { data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &CVec) -> CVec {
        CVec {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CVec) -> CVec {
        CVec {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest entry-wise absolute difference.
    pub fn max_abs_diff(&self, other: &CVec) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVec {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVec {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix must be square");
            data.extend_from_slice(r);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        debug_assert_eq!(self.dim, v.dim());
        let mut out = CVec::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.data[i * self.dim + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scaled(&self, c: C64) -> CMat {
        CMat { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Outer product |a><b|.
    pub fn outer(a: &CVec, b: &CVec) -> CMat {
        let n = a.dim();
        debug_assert_eq!(n, b.dim());
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    /// Kronecker product.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = CMat::zeros(n);
        for i in 0..na {
            for j in 0..na {
                let a = self.data[i * na + j];
                for k in 0..nb {
                    for l in 0..nb {
                        out[(i * nb + k, j * nb + l)] = a * other.data[k * nb + l];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from Hermiticity, `max |M - M^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Hermitian part (M + M^dag)/2.
    pub fn hermitized(&self) -> CMat {
        self.add(&self.adjoint()).scaled(C64::new(0.5, 0.0))
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Hermitian, unit-trace, positive-semidefinite complex matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validating constructor: trace 1 within 1e-10, Hermitian within 1e-12,
    /// eigenvalues >= -1e-10.
    pub fn new(mat: CMat) -> Result<Self, QcoreError> {
        let rho = Self { mat };
        rho.validate()?;
        Ok(rho)
    }

    /// Construct without checking the invariants (for hot paths whose output
    /// is validated elsewhere).
    pub fn new_unchecked(mat: CMat) -> Self {
        Self { mat }
    }

    /// Pure-state projector |psi><psi| from a normalized state.
    pub fn pure(psi: &CVec) -> Self {
        let n = psi.normalized();
        Self { mat: CMat::outer(&n, &n) }
    }

    pub fn validate(&self) -> Result<(), QcoreError> {
        let herm = self.mat.hermiticity_defect();
        if herm > 1e-12 {
            return Err(QcoreError::InvalidState(format!(
                "hermiticity defect {herm:.3e} > 1e-12"
            )));
        }
        let tr = self.mat.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(QcoreError::InvalidState(format!(
                "trace {tr} deviates from 1 beyond 1e-10"
            )));
        }
        let (vals, _) = eig_hermitian(&self.mat.hermitized())?;
        if let Some(&min) = vals.last() {
            if min < -1e-10 {
                return Err(QcoreError::InvalidState(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.matmul(&self.mat).trace().re
    }

    /// Eigenvalues (descending) and eigenvectors.
    pub fn eig(&self) -> Result<(Vec<f64>, Vec<CVec>), QcoreError> {
        eig_hermitian(&self.mat.hermitized())
    }
}

/// Pauli matrices and ladder operators on the qubit basis {|1>, |0>} with
/// sigma_z |1> = +|1>.
pub mod pauli {
    use super::{C64, CMat};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn sigma_x() -> CMat {
        CMat::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]])
    }

    pub fn sigma_y() -> CMat {
        CMat::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]])
    }

    pub fn sigma_z() -> CMat {
        CMat::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]])
    }

    pub fn sigma_plus() -> CMat {
        CMat::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]])
    }

    pub fn sigma_minus() -> CMat {
        CMat::from_rows(&[vec![c(0., 0.), c(0., 0.)], vec![c(1., 0.), c(0., 0.)]])
    }
}
