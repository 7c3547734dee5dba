use faer::Mat;

use super::{central_difference, DiscreteHamiltonian, GapSpectrum};
use crate::error::{Error, Result};
use crate::linalg::minpair::{antilinear_min_pair, MinPairOptions};
use crate::linalg::tridiag::TridiagLu;
use crate::linalg::{self, c64};

/// Energies closer than this to an eigenvalue count as "in the spectrum".
pub(crate) const SPECTRUM_TOL: f64 = 1e-6;

/// `H_q = H + 2qD - q²`, a real non-symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedHamiltonian {
    pub q: f64,
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoostedHamiltonian {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn transpose(&self) -> BoostedHamiltonian {
        BoostedHamiltonian { q: -self.q, lower: self.upper.clone(), diag: self.diag.clone(), upper: self.lower.clone() }
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.n();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i + 1 == j {
                self.upper[i]
            } else if j + 1 == i {
                self.lower[j]
            } else {
                0.0
            }
        })
    }

    /// Eigenvalues from a dense solve (oracle use).
    pub fn eigenvalues_dense(&self) -> Result<Vec<c64>> {
        let n = self.n();
        let d = self.to_dense();
        let a = Mat::from_fn(n, n, |i, j| c64::new(d[(i, j)], 0.0));
        linalg::eigenvalues(a.as_ref())
    }
}

/// Boost by `q`: upper off-diagonal `t + q/h`, lower `t - q/h`, diagonal
/// shifted by `-q²`, so `H_q^T == H_{-q}` entry for entry.
pub fn boost(h: &DiscreteHamiltonian, q: f64) -> BoostedHamiltonian {
    let step = h.grid().h();
    BoostedHamiltonian {
        q,
        lower: h.off().iter().map(|t| t - q / step).collect(),
        diag: h.diag().iter().map(|d| d - q * q).collect(),
        upper: h.off().iter().map(|t| t + q / step).collect(),
    }
}

fn check_outside_spectrum(h: &DiscreteHamiltonian, e: f64) -> Result<()> {
    let d = h.distance_to_spectrum(e);
    if d < SPECTRUM_TOL {
        return Err(Error::ShiftInSpectrum { energy: e, detail: format!("distance to the spectrum {d:.3e}") });
    }
    Ok(())
}

/// `γ(q, E) = ‖(H_q - E)^{-1}‖`, computed as `1 / min λ` of the antilinear
/// problem of the block embedding `diag(M, M^T)`, `M = H_q - E`, under the
/// swap conjugation. `E` and `E + q²` must lie in the same spectral gap.
pub fn gamma_norm(h: &DiscreteHamiltonian, q: f64, e: f64) -> Result<f64> {
    check_outside_spectrum(h, e)?;
    let s = e + q * q;
    check_outside_spectrum(h, s)?;
    if h.count_below(e) != h.count_below(s) {
        return Err(Error::ShiftInSpectrum {
            energy: e,
            detail: format!("E = {e} and E + q^2 = {s} are separated by eigenvalues"),
        });
    }
    let bq = boost(h, q);
    let n = bq.n();
    let to_c = |v: &[f64]| -> Vec<c64> { v.iter().map(|&x| c64::new(x, 0.0)).collect() };
    let md: Vec<f64> = bq.diag.iter().map(|d| d - e).collect();
    let lu = TridiagLu::factor(to_c(&bq.lower), to_c(&md), to_c(&bq.upper))?;
    let scale = 2.0 * (h.norm_bound() + q * q + 2.0 * q.abs() / h.grid().h() + e.abs());

    // conj(P) H = [[0, M^T], [M, 0]].
    let apply = |x: &[c64], out: &mut [c64]| {
        let (a, b) = x.split_at(n);
        let (top, bottom) = out.split_at_mut(n);
        for i in 0..n {
            // top = M^T b, bottom = M a
            let mut t = md[i] * b[i];
            let mut u = md[i] * a[i];
            if i > 0 {
                t += bq.upper[i - 1] * b[i - 1];
                u += bq.lower[i - 1] * a[i - 1];
            }
            if i + 1 < n {
                t += bq.lower[i] * b[i + 1];
                u += bq.upper[i] * a[i + 1];
            }
            top[i] = t;
            bottom[i] = u;
        }
    };
    let solve = |x: &mut [c64]| {
        let (r1, r2) = x.split_at_mut(n);
        // [[0, M^T], [M, 0]] (a, b) = (r1, r2)  =>  a = M^{-1} r2, b = M^{-T} r1.
        let mut a = r2.to_vec();
        lu.solve_in_place(&mut a);
        lu.solve_transpose_in_place(r1);
        r2.copy_from_slice(r1);
        r1.copy_from_slice(&a);
    };
    let pair = antilinear_min_pair(2 * n, scale, apply, solve, &MinPairOptions::default())?;
    Ok(1.0 / pair.lambda)
}

/// `‖B_q‖` with `B_q = P₊ |H - s|^{-1/2} (qD) |H - s|^{-1/2} P₋` at the fixed
/// shift `s`; `P∓` split the spectrum at `s`.
pub fn bq_norm_at_shift(h: &DiscreteHamiltonian, q: f64, s: f64) -> Result<f64> {
    check_outside_spectrum(h, s)?;
    let m = h.count_below(s);
    if m == 0 || q == 0.0 {
        return Ok(0.0);
    }
    let n = h.n();
    let (vals, vecs) = h.lowest(m);
    let project = |x: &mut Vec<f64>| {
        for _ in 0..2 {
            for v in &vecs {
                let c: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(v).for_each(|(xi, vi)| *xi -= c * vi);
            }
        }
    };
    let mut px: Vec<Vec<f64>> = vecs
        .iter()
        .zip(&vals)
        .map(|(v, &lam)| {
            let w = q / (s - lam).sqrt();
            central_difference(h.grid(), v).into_iter().map(|d| d * w).collect()
        })
        .collect();
    px.iter_mut().for_each(&project);

    let md: Vec<f64> = h.diag().iter().map(|d| d - s).collect();
    let lu = TridiagLu::factor(h.off().to_vec(), md, h.off().to_vec())?;
    let z: Vec<Vec<f64>> = px
        .iter()
        .map(|x| {
            let mut y = x.clone();
            lu.solve_in_place(&mut y);
            project(&mut y);
            y
        })
        .collect();
    let g = Mat::from_fn(m, m, |i, j| {
        let a: f64 = (0..n).map(|k| px[i][k] * z[j][k]).sum();
        let b: f64 = (0..n).map(|k| px[j][k] * z[i][k]).sum();
        0.5 * (a + b)
    });
    let ev = linalg::sym_eigenvalues(g.as_ref())?;
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// `‖B_q‖` at the shift `E + q²`, which must lie inside `gap`.
pub fn bq_norm(h: &DiscreteHamiltonian, gap: &GapSpectrum, q: f64, e: f64) -> Result<f64> {
    let s = e + q * q;
    if !gap.contains(s) {
        return Err(Error::ShiftInSpectrum {
            energy: e,
            detail: format!("E + q^2 = {s} is outside the gap ({}, {})", gap.e_minus, gap.e_plus),
        });
    }
    bq_norm_at_shift(h, q, s)
}
