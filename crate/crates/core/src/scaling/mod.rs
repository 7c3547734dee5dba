//! Complex scaling on the half-line: `H_θ(γ) = -e^{-2θ} Δ + v(e^θ x) + γ w(e^θ x)`
//! discretized on `[0, L]` with Dirichlet ends. The matrix is complex
//! symmetric, so its resolvent norm is `1 / min λ` of the antilinear problem
//! `(H_θ - z) ψ = λ conj(ψ)`.

mod classify;
mod potential;
mod resolvent;

pub use classify::{classify_spectrum, ClassifyOptions, Label, SpectrumClassification};
pub use potential::{DilationPotential, PotentialFamily};
pub use resolvent::{
    essential_floor_check, locate_resonance, perturbation_scan, polish_resonance, ray_distance, ray_distance_raw,
    resolvent_norm_at, resonance_slope, FloorReport, ResolventAt, ScanOptions, ScanRow,
};

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::tridiag::{complex_symmetric_eigenvalues, TridiagLu};
use crate::linalg::{self, c64};
use crate::schrodinger::Grid1D;

/// Tridiagonal complex symmetric `H_θ(γ)`.
#[derive(Debug, Clone)]
pub struct ScaledHamiltonian {
    pub theta: c64,
    pub gamma: f64,
    pub grid: Grid1D,
    pub diag: Vec<c64>,
    /// Constant off-diagonal `-e^{-2θ}/h²`.
    pub off: c64,
}

pub fn build_scaled(pot: &DilationPotential, grid: &Grid1D, theta: c64, gamma: f64) -> Result<ScaledHamiltonian> {
    let strip = pot.strip();
    if theta.im.abs() >= strip {
        return Err(Error::StripViolation { im_theta: theta.im.abs(), strip });
    }
    let h2 = grid.h() * grid.h();
    let rot = (-2.0 * theta).exp();
    let dil = theta.exp();
    let kin = rot * (2.0 / h2);
    let diag = grid.points().into_iter().map(|x| kin + pot.total(dil * x, gamma)).collect();
    Ok(ScaledHamiltonian { theta, gamma, grid: *grid, diag, off: -rot / h2 })
}

impl ScaledHamiltonian {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let n = self.n();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i.abs_diff(j) == 1 {
                self.off
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }

    /// `H - z` as a dense matrix.
    pub fn shifted_dense(&self, z: c64) -> Mat<c64> {
        let mut m = self.to_dense();
        for i in 0..self.n() {
            m[(i, i)] -= z;
        }
        m
    }

    /// Infinity-norm bound on `‖H‖`.
    pub fn norm_bound(&self) -> f64 {
        self.diag.iter().map(|d| d.norm()).fold(0.0, f64::max) + 2.0 * self.off.norm()
    }

    pub fn matvec(&self, x: &[c64], out: &mut [c64]) {
        let n = self.n();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off * x[i - 1];
            }
            if i + 1 < n {
                s += self.off * x[i + 1];
            }
            out[i] = s;
        }
    }

    pub fn lu(&self, z: c64) -> Result<TridiagLu<c64>> {
        let n = self.n();
        let d = self.diag.iter().map(|x| x - z).collect();
        TridiagLu::factor(vec![self.off; n - 1], d, vec![self.off; n - 1])
    }

    /// All eigenvalues: complex-symmetric QL, with a dense fallback.
    pub fn eigenvalues(&self) -> Result<Vec<c64>> {
        let e = vec![self.off; self.n() - 1];
        match complex_symmetric_eigenvalues(&self.diag, &e) {
            Some(v) => Ok(v),
            None => linalg::eigenvalues(self.to_dense().as_ref()),
        }
    }
}
