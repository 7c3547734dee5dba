//! Dense helpers on top of `faer` and the tridiagonal kernels used by the
//! grid modules.

pub mod minpair;
pub mod tridiag;

use faer::{Mat, MatRef, Side};
pub use num_complex::Complex64 as c64;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Field operations needed by the pivoted tridiagonal solver.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Magnitude used for pivot selection.
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for c64 {
    fn zero() -> Self {
        c64::new(0.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        c64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

pub fn vec_norm(x: &[c64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product, conjugate-linear in the first slot.
pub fn inner(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Bilinear form `a^T b` (no conjugation).
pub fn bilinear(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn frobenius(a: MatRef<'_, c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Singular values in descending order.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values().map_err(|e| Error::Convergence(format!("dense SVD: {e:?}")))
}

/// Largest singular value.
pub fn spectral_norm(a: MatRef<'_, c64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric matrix.
pub fn sym_eigen(s: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd =
        s.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Convergence(format!("symmetric eigensolver: {e:?}")))?;
    let vals = evd.S().column_vector().iter().copied().collect();
    Ok((vals, evd.U().to_owned()))
}

/// Eigenvalues (ascending) of a real symmetric matrix.
pub fn sym_eigenvalues(s: MatRef<'_, f64>) -> Result<Vec<f64>> {
    if s.nrows() == 0 {
        return Ok(Vec::new());
    }
    s.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Convergence(format!("symmetric eigensolver: {e:?}")))
}

/// Eigenvalues of a general complex matrix, unordered.
pub fn eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<c64>> {
    a.eigenvalues().map_err(|e| Error::Convergence(format!("dense eigensolver: {e:?}")))
}

/// Modified Gram-Schmidt against an orthonormal list, applied twice.
/// Returns the norm left after projection; `v` is normalized in place when
/// that norm is positive.
pub(crate) fn orthonormalize_against(v: &mut [c64], basis: &[Vec<c64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let nrm = vec_norm(v);
    if nrm > 0.0 {
        for x in v.iter_mut() {
            *x /= nrm;
        }
    }
    nrm
}
