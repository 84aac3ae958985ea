use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigenvalues;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// A square complex matrix stored in exactly self-adjoint form.
///
/// Construction symmetrizes the input as `(M + M*)/2`, so the stored entries
/// satisfy `M[i][j] == conj(M[j][i])` bit-for-bit and the diagonal is real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for HermitianMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HermitianMatrix::new(m, &ToleranceConfig::default())
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.inner
    }
}

impl HermitianMatrix {
    /// Checked construction: the anti-Hermitian part must be within
    /// `hermitian_tol · max(1, ‖M‖_op)` in max-entry norm.
    pub fn new(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::contract(format!(
                "hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let (h, residual) = Self::symmetrize(&m);
        if residual > tol.hermitian_tol {
            let scale = h.spectral_radius()?.max(1.0);
            if residual > tol.hermitian_tol * scale {
                return Err(Error::Validation(vec![format!(
                    "matrix is not hermitian: anti-hermitian residual {residual:e} exceeds {:e}",
                    tol.hermitian_tol * scale
                )]));
            }
        }
        Ok(h)
    }

    /// Returns `(M + M*)/2` and the max-entry norm of `M − M*`.
    pub fn symmetrize(m: &ComplexMatrix) -> (Self, f64) {
        assert!(m.is_square(), "symmetrize: matrix must be square");
        let n = m.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut residual = 0.0f64;
        for i in 0..n {
            let d = m[(i, i)];
            residual = residual.max(2.0 * d.im.abs());
            out[(i, i)] = Complex64::new(d.re, 0.0);
            for j in (i + 1)..n {
                let a = m[(i, j)];
                let b = m[(j, i)].conj();
                residual = residual.max((a - b).norm());
                let v = (a + b) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        (Self { inner: out }, residual)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(dim),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diag(diag),
        }
    }

    /// `m* m`, which is self-adjoint by construction.
    pub fn gram(m: &ComplexMatrix) -> Self {
        Self::symmetrize(&m.adjoint_mul(m)).0
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale_real(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner - &other.inner,
        }
    }

    /// Largest eigenvalue modulus, which is the operator norm here.
    pub fn spectral_radius(&self) -> Result<f64> {
        let ev = hermitian_eigenvalues(self)?;
        Ok(ev
            .first()
            .map_or(0.0, |l| l.abs())
            .max(ev.last().map_or(0.0, |l| l.abs())))
    }
}
