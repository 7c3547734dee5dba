//! Antilinear eigenproblems `A u = λ P conj(u)` for complex symmetric matrices,
//! solved through the real doubling
//!
//! ```text
//! S = [[ B, -C'],
//!      [-C', -B ]],   A = B + i C'
//! ```
//!
//! An eigenvector `w = (x, y)` of `S` with eigenvalue `σ > 0` gives
//! `u = x + i y` with `A u = σ conj(u)`; the spectrum of `S` is `{±σ_k}`.

use faer::{Mat, MatRef};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, inner, orthonormalize_against, vec_norm};

/// Absolute floor for every norm-relative tolerance.
pub const ABS_FLOOR: f64 = 1e-14;

/// Dense complex matrix with `a[i][j] == a[j][i]` bitwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSymmetricMatrix {
    m: Mat<c64>,
}

impl ComplexSymmetricMatrix {
    /// Symmetrizes `(a + a^T) / 2`; rejects non-square or non-finite input.
    pub fn new(a: Mat<c64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidInput(format!("matrix is {}x{}, expected square", n, a.ncols())));
        }
        let mut m = a;
        for j in 0..n {
            for i in 0..n {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::InvalidInput(format!("entry ({i}, {j}) is not finite")));
                }
            }
        }
        for j in 0..n {
            for i in j + 1..n {
                let s = (m[(i, j)] + m[(j, i)]) * 0.5;
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        Ok(ComplexSymmetricMatrix { m })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> c64) -> Result<Self> {
        Self::new(Mat::from_fn(n, n, f))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::new(Mat::from_fn(n, n, |i, j| if i == j { c64::new(diag[i], 0.0) } else { c64::new(0.0, 0.0) }))
            .expect("finite diagonal")
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.m.as_ref()
    }

    pub fn into_inner(self) -> Mat<c64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.m[(i, j)]
    }

    /// Largest singular value.
    pub fn norm(&self) -> Result<f64> {
        linalg::spectral_norm(self.m.as_ref())
    }
}

/// Conjugation `C x = P conj(x)` with `P` symmetric and unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugation {
    p: Option<Mat<c64>>,
    n: usize,
}

impl Conjugation {
    /// Entrywise complex conjugation.
    pub fn identity(n: usize) -> Self {
        Conjugation { p: None, n }
    }

    /// Validates symmetry and unitarity of `p` to 1e-12 entrywise.
    pub fn new(p: Mat<c64>) -> Result<Self> {
        let n = p.nrows();
        if p.ncols() != n {
            return Err(Error::InvalidConjugation("P must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if (p[(i, j)] - p[(j, i)]).norm() > 1e-12 {
                    return Err(Error::InvalidConjugation(format!("P is not symmetric at ({i}, {j})")));
                }
                let mut s = c64::new(0.0, 0.0);
                for k in 0..n {
                    s += p[(i, k)] * p[(j, k)].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                if (s - target).norm() > 1e-12 {
                    return Err(Error::InvalidConjugation(format!("P P^H differs from I at ({i}, {j})")));
                }
            }
        }
        Ok(Conjugation { p: Some(p), n })
    }

    /// `[[0, I], [I, 0]]` on `C^{2n}`: swaps the halves and conjugates.
    pub fn swap(n: usize) -> Self {
        let p = Mat::from_fn(2 * n, 2 * n, |i, j| {
            if (i < n && j == i + n) || (i >= n && j + n == i) {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Conjugation { p: Some(p), n: 2 * n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.p.is_none()
    }

    /// The matrix `P` (identity when entrywise conjugation).
    pub fn p(&self) -> Mat<c64> {
        match &self.p {
            Some(p) => p.clone(),
            None => Mat::from_fn(self.n, self.n, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) }),
        }
    }

    /// `C x = P conj(x)`.
    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        match &self.p {
            None => x.iter().map(|z| z.conj()).collect(),
            Some(p) => (0..self.n).map(|i| (0..self.n).map(|k| p[(i, k)] * x[k].conj()).sum()).collect(),
        }
    }
}

/// A square matrix together with a conjugation it is symmetric under.
#[derive(Debug, Clone)]
pub struct CSymmetricOperator {
    pub matrix: Mat<c64>,
    pub conjugation: Conjugation,
}

/// `S = [[B, -C'], [-C', -B]]` for `A = B + i C'`.
#[derive(Debug, Clone)]
pub struct RealDoubling {
    pub s: Mat<f64>,
}

impl RealDoubling {
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::sym_eigenvalues(self.s.as_ref())
    }
}

pub fn real_doubling(a: &ComplexSymmetricMatrix) -> RealDoubling {
    RealDoubling { s: doubling_of(a.as_ref()) }
}

fn doubling_of(a: MatRef<'_, c64>) -> Mat<f64> {
    let n = a.nrows();
    Mat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        let z = a[(bi, bj)];
        match (i < n, j < n) {
            (true, true) => z.re,
            (false, false) => -z.re,
            _ => -z.im,
        }
    })
}

/// Positive antilinear eigenpairs: `lambdas` ascending, unit `vectors`.
#[derive(Debug, Clone)]
pub struct AntilinearSpectrum {
    pub lambdas: Vec<f64>,
    pub vectors: Vec<Vec<c64>>,
}

impl AntilinearSpectrum {
    pub fn min(&self) -> Option<(f64, &[c64])> {
        self.lambdas.first().map(|l| (*l, self.vectors[0].as_slice()))
    }
}

/// A cluster of singular values closer than the clustering tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateClusterWarning {
    /// Indices into the descending `sigma` list.
    pub indices: std::ops::Range<usize>,
    pub value: f64,
}

/// `A = U diag(sigma) U^T` with `U` unitary and `sigma` descending.
#[derive(Debug, Clone)]
pub struct TakagiFactorization {
    pub u: Mat<c64>,
    pub sigma: Vec<f64>,
    /// Degenerate clusters that were re-orthogonalized.
    pub warnings: Vec<DegenerateClusterWarning>,
}

impl TakagiFactorization {
    /// `U diag(sigma) U^T`.
    pub fn reconstruct(&self) -> Mat<c64> {
        let n = self.sigma.len();
        Mat::from_fn(n, n, |i, j| (0..n).map(|k| self.u[(i, k)] * self.sigma[k] * self.u[(j, k)]).sum())
    }
}

/// Result of the doubled solve, in descending order of lambda.
pub(crate) struct Doubled {
    pub lambdas: Vec<f64>,
    pub vectors: Vec<Vec<c64>>,
    pub clusters: Vec<DegenerateClusterWarning>,
}

/// Core solver for a complex symmetric `a` under entrywise conjugation.
pub(crate) fn doubled_solve(a: MatRef<'_, c64>) -> Result<Doubled> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Doubled { lambdas: vec![], vectors: vec![], clusters: vec![] });
    }
    let (vals, w) = linalg::sym_eigen(doubling_of(a).as_ref())?;
    let scale = vals[2 * n - 1].abs().max(vals[0].abs());
    let tol = (1e-10 * scale).max(ABS_FLOOR);
    let col = |j: usize| -> Vec<c64> { (0..n).map(|i| c64::new(w[(i, j)], w[(i + n, j)])).collect() };

    // Top n eigenvalues of S, descending.
    let top: Vec<f64> = (0..n).map(|k| vals[2 * n - 1 - k]).collect();
    let m = top.iter().filter(|&&s| s <= tol).count();
    let npos = n - m;

    let mut vectors: Vec<Vec<c64>> = (0..npos).map(|k| col(2 * n - 1 - k)).collect();
    let mut lambdas: Vec<f64> = top[..npos].to_vec();

    // Clusters among the positive values: real-coefficient Gram-Schmidt keeps
    // the antilinear relation intact.
    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..=npos {
        if k == npos || lambdas[k - 1] - lambdas[k] > tol {
            if k - start > 1 {
                for j in start..k {
                    for i in start..j {
                        let c = inner(&vectors[i], &vectors[j]).re;
                        let vi = vectors[i].clone();
                        for (x, y) in vectors[j].iter_mut().zip(&vi) {
                            *x -= y * c;
                        }
                    }
                    let nrm = vec_norm(&vectors[j]);
                    vectors[j].iter_mut().for_each(|x| *x /= nrm);
                }
                clusters.push(DegenerateClusterWarning { indices: start..k, value: lambdas[start] });
            }
            start = k;
        }
    }
    for v in vectors.iter_mut() {
        fix_sign(v);
    }

    if m > 0 {
        // Kernel of A: every near-zero eigenvector of S maps to a kernel vector;
        // complex Gram-Schmidt keeps m independent ones.
        let mut kernel: Vec<Vec<c64>> = Vec::with_capacity(m);
        let mut basis: Vec<Vec<c64>> = vectors.clone();
        for j in 0..2 * n {
            if kernel.len() == m {
                break;
            }
            if vals[j].abs() > tol {
                continue;
            }
            let mut v = col(j);
            if orthonormalize_against(&mut v, &basis) > 0.5 {
                basis.push(v.clone());
                kernel.push(v);
            }
        }
        // Numerical safety net: complete with projected unit vectors.
        let mut e = 0;
        while kernel.len() < m && e < n {
            let mut v = vec![c64::new(0.0, 0.0); n];
            v[e] = c64::new(1.0, 0.0);
            e += 1;
            if orthonormalize_against(&mut v, &basis) > 1e-3 {
                basis.push(v.clone());
                kernel.push(v);
            }
        }
        for v in kernel.iter_mut() {
            fix_phase(v);
        }
        if m > 1 {
            clusters.push(DegenerateClusterWarning { indices: npos..n, value: 0.0 });
        }
        lambdas.extend(top[npos..].iter().map(|s| s.max(0.0)));
        vectors.extend(kernel);
    }
    Ok(Doubled { lambdas, vectors, clusters })
}

fn argmax(v: &[c64]) -> usize {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    best
}

// Only a sign is free when lambda > 0.
fn fix_sign(v: &mut [c64]) {
    let i = argmax(v);
    if v[i].re < 0.0 {
        v.iter_mut().for_each(|z| *z = -*z);
    }
}

// Any unimodular factor is free when lambda = 0.
fn fix_phase(v: &mut [c64]) {
    let i = argmax(v);
    let z = v[i];
    if z.norm() > 0.0 {
        let ph = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= ph);
    }
}

/// `conj(P) (A - z I)`, checked for symmetry.
fn reduced(a: MatRef<'_, c64>, conj: &Conjugation, z: c64) -> Result<Mat<c64>> {
    let n = a.nrows();
    if a.ncols() != n || conj.n() != n {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: matrix {}x{}, conjugation {}",
            n,
            a.ncols(),
            conj.n()
        )));
    }
    let shifted = Mat::from_fn(n, n, |i, j| if i == j { a[(i, j)] - z } else { a[(i, j)] });
    let r = match &conj.p {
        None => shifted,
        Some(p) => Mat::from_fn(n, n, |i, j| (0..n).map(|k| p[(i, k)].conj() * shifted[(k, j)]).sum()),
    };
    let scale = linalg::frobenius(a).max(ABS_FLOOR);
    let mut defect: f64 = 0.0;
    for j in 0..n {
        for i in 0..j {
            defect = defect.max((r[(i, j)] - r[(j, i)]).norm());
        }
    }
    let allowed = (1e-10 * scale).max(ABS_FLOOR);
    if defect > allowed {
        return Err(Error::NotCSymmetric { defect, allowed });
    }
    Ok(ComplexSymmetricMatrix::new(r)?.into_inner())
}

/// Solves `(A - z I) u = λ C u` for all `n` nonnegative `λ` (ascending).
/// The `λ` are the singular values of `A - z I`.
pub fn antilinear_spectrum(a: MatRef<'_, c64>, conj: &Conjugation, z: c64) -> Result<AntilinearSpectrum> {
    let r = reduced(a, conj, z)?;
    let mut d = doubled_solve(r.as_ref())?;
    d.lambdas.reverse();
    d.vectors.reverse();
    Ok(AntilinearSpectrum { lambdas: d.lambdas, vectors: d.vectors })
}

/// Takagi factorization from the antilinear eigenvectors: the columns of `U`
/// are `conj(u_k)`, since `A u_k = σ_k conj(u_k)` gives `A = conj(U_u) Σ U_u^H`.
pub fn takagi(a: &ComplexSymmetricMatrix) -> Result<TakagiFactorization> {
    let n = a.n();
    let d = doubled_solve(a.as_ref())?;
    let u = Mat::from_fn(n, n, |i, k| d.vectors[k][i].conj());
    Ok(TakagiFactorization { u, sigma: d.lambdas, warnings: d.clusters })
}

/// `‖(A - zI)^{-1}‖ = 1 / min λ`.
pub fn resolvent_norm(a: MatRef<'_, c64>, conj: &Conjugation, z: c64) -> Result<f64> {
    let spec = antilinear_spectrum(a, conj, z)?;
    let norm_a = linalg::spectral_norm(a)?;
    let min = spec.lambdas.first().copied().unwrap_or(0.0);
    if min < (1e-13 * norm_a).max(ABS_FLOOR) {
        return Err(Error::SingularShift { min_lambda: min });
    }
    Ok(1.0 / min)
}

/// `H = diag(M, M^T)` with the swap conjugation `[[0, I], [I, 0]]`.
pub fn block_embed(m: MatRef<'_, c64>) -> CSymmetricOperator {
    let n = m.nrows();
    assert_eq!(m.ncols(), n, "block_embed needs a square matrix");
    let matrix = Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => m[(i, j)],
        (false, false) => m[(j - n, i - n)],
        _ => c64::new(0.0, 0.0),
    });
    CSymmetricOperator { matrix, conjugation: Conjugation::swap(n) }
}

/// `max_{‖u‖=1} Re(u^T A u)`, the top eigenvalue of the real doubling.
pub fn minmax_norm(a: &ComplexSymmetricMatrix) -> Result<f64> {
    if a.n() == 0 {
        return Ok(0.0);
    }
    Ok(*real_doubling(a).eigenvalues()?.last().unwrap())
}

/// Samples `trials` random codimension-`k` subspaces `V` and checks
/// `max_{u∈V, ‖u‖=1} Re(u^T A u) ≥ λ_{2k}(A) - 1e-9‖A‖` with `λ` the singular
/// values in descending order.
pub fn minmax_even_lower_check<R: Rng>(
    a: &ComplexSymmetricMatrix,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<bool> {
    let n = a.n();
    if 2 * k >= n {
        return Err(Error::IndexOutOfRange { index: 2 * k, dim: n });
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let sv = linalg::singular_values(a.as_ref())?;
    let target = sv[2 * k] - (1e-9 * sv[0]).max(ABS_FLOOR);
    for _ in 0..trials {
        let q = random_kernel_basis(n, k, rng);
        let dim = q.len();
        // Bilinear compression Q^T A Q.
        let aq: Vec<Vec<c64>> =
            q.iter().map(|col| (0..n).map(|i| (0..n).map(|j| a.get(i, j) * col[j]).sum()).collect()).collect();
        let av = Mat::from_fn(dim, dim, |i, j| linalg::bilinear(&q[i], &aq[j]));
        let av = ComplexSymmetricMatrix::new(av)?;
        if minmax_norm(&av)? < target {
            return Ok(false);
        }
    }
    Ok(true)
}

// Orthonormal basis of {u : f_j . u = 0, j < k} for k random complex functionals.
fn random_kernel_basis<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<c64>> {
    use rand_distr::{Distribution, StandardNormal};
    let mut basis: Vec<Vec<c64>> = Vec::with_capacity(n);
    for _ in 0..k {
        // f . u = <conj(f), u>, so V is the orthogonal complement of conj(f).
        let mut f: Vec<c64> =
            (0..n).map(|_| c64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)).conj()).collect();
        orthonormalize_against(&mut f, &basis);
        basis.push(f);
    }
    let mut out = Vec::with_capacity(n - k);
    for e in 0..n {
        if out.len() == n - k {
            break;
        }
        let mut v = vec![c64::new(0.0, 0.0); n];
        v[e] = c64::new(1.0, 0.0);
        if orthonormalize_against(&mut v, &basis) > 1e-6 {
            basis.push(v.clone());
            out.push(v);
        }
    }
    out
}
