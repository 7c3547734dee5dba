//! Tridiagonal kernels: Sturm-sequence bisection, inverse iteration,
//! pivoted LU and a complex-symmetric QL iteration.

use rayon::prelude::*;

use super::{c64, Scalar};
use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e` (length n-1).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        assert_eq!(e.len() + 1, d.len().max(1), "off-diagonal length must be n-1");
        SymTridiag { d, e }
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// Upper bound on the 2-norm (max absolute Gershgorin endpoint).
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    fn pivmin(&self) -> f64 {
        let emax = self.e.iter().fold(1.0f64, |m, x| m.max(x * x));
        f64::MIN_POSITIVE * emax
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.n() {
            q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / q;
            if q.abs() <= pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (lo.abs() + hi.abs()) + self.pivmin();
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + self.pivmin();
            if hi - lo <= tol {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvalues with indices in `range`, ascending.
    pub fn eigenvalues_range(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        let mut v: Vec<f64> = range.into_par_iter().map(|k| self.eigenvalue(k)).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues_range(0..self.n())
    }

    /// Eigenvectors for ascending eigenvalues `evals` by inverse iteration.
    /// Vectors belonging to close eigenvalues are re-orthogonalized against
    /// each other, so the returned set is orthonormal.
    pub fn eigenvectors(&self, evals: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n();
        let onenrm = self.norm_bound().max(f64::MIN_POSITIVE);
        let ortol = 1e-3 * onenrm;
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(evals.len());
        let mut cluster_start = 0;
        let mut prev_shift = f64::NEG_INFINITY;
        for (k, &lam) in evals.iter().enumerate() {
            if k == 0 || lam - evals[k - 1] > ortol {
                cluster_start = k;
            }
            let mut shift = lam;
            if k > cluster_start {
                let pertol = 10.0 * (f64::EPSILON * lam).abs().max(f64::EPSILON * onenrm);
                if shift - prev_shift < pertol {
                    shift = prev_shift + pertol;
                }
            }
            prev_shift = shift;

            let dl = self.e.clone();
            let du = self.e.clone();
            let dd: Vec<f64> = self.d.iter().map(|x| x - shift).collect();
            let lu = TridiagLu::factor_perturbed(dl, dd, du, f64::EPSILON * onenrm);

            let mut x = start_vector(n, k as u64);
            for _ in 0..3 {
                lu.solve_in_place(&mut x);
                for v in &out[cluster_start..k] {
                    let c: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi -= c * vi;
                    }
                }
                let nrm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                if nrm > 0.0 && nrm.is_finite() {
                    x.iter_mut().for_each(|a| *a /= nrm);
                } else {
                    x = start_vector(n, (k as u64) ^ 0x9e37_79b9);
                }
            }
            // One more pass against the cluster for good measure.
            for v in &out[cluster_start..k] {
                let c: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= c * vi;
                }
            }
            let nrm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            x.iter_mut().for_each(|a| *a /= nrm);
            let imax = argmax_abs(&x);
            if x[imax] < 0.0 {
                x.iter_mut().for_each(|a| *a = -*a);
            }
            out.push(x);
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.d[i] * x[i];
                if i > 0 {
                    s += self.e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.e[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

fn argmax_abs(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    best
}

// Cheap deterministic start vector; inverse iteration only needs a generic one.
fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect()
}

/// LU factorization of a general tridiagonal matrix with partial pivoting
/// (the second superdiagonal `du2` holds the fill from row swaps).
#[derive(Debug, Clone)]
pub struct TridiagLu<T: Scalar> {
    dl: Vec<T>,
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swap: Vec<bool>,
}

impl<T: Scalar> TridiagLu<T> {
    /// Factor the matrix with subdiagonal `dl`, diagonal `d`, superdiagonal `du`.
    /// Fails with `SingularShift` on an exactly zero pivot.
    pub fn factor(dl: Vec<T>, d: Vec<T>, du: Vec<T>) -> Result<Self> {
        let lu = Self::factor_raw(dl, d, du);
        if let Some(p) = lu.d.iter().map(|x| x.modulus()).reduce(f64::min) {
            if p == 0.0 || !p.is_finite() {
                return Err(Error::SingularShift { min_lambda: 0.0 });
            }
        }
        Ok(lu)
    }

    /// Like [`factor`](Self::factor) but replaces pivots smaller than `tiny`
    /// in magnitude by `tiny`; used by inverse iteration.
    pub fn factor_perturbed(dl: Vec<T>, d: Vec<T>, du: Vec<T>, tiny: f64) -> Self {
        let mut lu = Self::factor_raw(dl, d, du);
        for p in lu.d.iter_mut() {
            if p.modulus() < tiny {
                *p = T::from_f64(tiny);
            }
        }
        lu
    }

    fn factor_raw(mut dl: Vec<T>, mut d: Vec<T>, mut du: Vec<T>) -> Self {
        let n = d.len();
        assert!(n >= 1);
        assert_eq!(dl.len(), n - 1);
        assert_eq!(du.len(), n - 1);
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].modulus() >= dl[i].modulus() {
                if d[i].modulus() != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] = d[i + 1] - fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swap[i] = true;
            }
        }
        TridiagLu { dl, d, du, du2, swap }
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] = b[i + 1] - self.dl[i] * b[i];
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    /// Solve `A^T x = b` in place (plain transpose, no conjugation).
    pub fn solve_transpose_in_place(&self, b: &mut [T]) {
        let n = self.n();
        b[0] = b[0] / self.d[0];
        if n > 1 {
            b[1] = (b[1] - self.du[0] * b[0]) / self.d[1];
        }
        for i in 2..n {
            b[i] = (b[i] - self.du[i - 1] * b[i - 1] - self.du2[i - 2] * b[i - 2]) / self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let temp = b[i] - self.dl[i] * b[i + 1];
            if self.swap[i] {
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i] = temp;
            }
        }
    }
}

/// Eigenvalues of the complex symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` by implicit QL with complex orthogonal rotations.
/// Returns `None` when a rotation degenerates or the iteration stalls; callers
/// fall back to a dense solver.
pub fn complex_symmetric_eigenvalues(d: &[c64], e: &[c64]) -> Option<Vec<c64>> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<c64> = e.iter().copied().chain(std::iter::once(c64::new(0.0, 0.0))).collect();
    if n == 0 {
        return Some(d);
    }
    let one = c64::new(1.0, 0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (e[l] * 2.0);
            let mut r = (g * g + one).sqrt();
            let den = if (g + r).norm() >= (g - r).norm() { g + r } else { g - r };
            if den.norm() == 0.0 {
                return None;
            }
            g = d[m] - d[l] + e[l] / den;
            let mut s = one;
            let mut c = one;
            let mut p = c64::new(0.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r.norm() == 0.0 {
                    d[i + 1] -= p;
                    e[m] = c64::new(0.0, 0.0);
                    deflated = true;
                    break;
                }
                if r.norm() < 1e-8 * (f.norm() + g.norm()) {
                    return None;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + c * b * 2.0;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = c64::new(0.0, 0.0);
        }
    }
    if d.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(d)
    } else {
        None
    }
}
