//! Finite-difference Dirichlet Schrödinger operators on an interval and the
//! quantities built from them: gaps, boosted Hamiltonians, averaged resolvent
//! kernels and filled-band projectors.

mod boost;
mod gap;
mod kernel;

pub use boost::{boost, bq_norm, bq_norm_at_shift, gamma_norm, BoostedHamiltonian};
pub use gap::{find_gap, GapOptions, GapSpectrum};
pub use kernel::{
    avg_resolvent_kernel, avg_resolvent_kernel_matrix, ball_indices, default_separations, projector_decay,
    ProjectorDecay, ProjectorOptions,
};

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::tridiag::SymTridiag;

/// Uniform grid on `[0, L]` with `n` interior points and Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("domain length must be positive, got {length}")));
        }
        if n < 3 {
            return Err(Error::InvalidInput(format!("need at least 3 interior points, got {n}")));
        }
        Ok(Grid1D { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Spacing `L / (n + 1)`.
    pub fn h(&self) -> f64 {
        self.length / (self.n + 1) as f64
    }

    /// Position of interior point `i` (0-based): `(i + 1) h`.
    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Nonnegative potential, either sampled on the grid or a comb of delta
/// functions.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    /// Values at the interior grid points.
    Sampled(Vec<f64>),
    /// `v0 Σ δ(x - p)` over `positions`.
    DeltaComb {
        positions: Vec<f64>,
        v0: f64,
    },
}

impl PotentialSpec {
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Self {
        PotentialSpec::Sampled(grid.points().into_iter().map(f).collect())
    }

    /// On-site values of the potential on `grid`. A delta at `p` between grid
    /// points is split onto its two neighbours with hat-function weights, so
    /// its integral stays `v0` and a delta on a grid point is exactly `v0 / h`.
    pub fn on_grid(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        let n = grid.n();
        let h = grid.h();
        match self {
            PotentialSpec::Zero => Ok(vec![0.0; n]),
            PotentialSpec::Sampled(v) => {
                if v.len() != n {
                    return Err(Error::InvalidInput(format!("{} potential samples for {} grid points", v.len(), n)));
                }
                for (i, &x) in v.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::InvalidInput(format!("potential sample {i} is not finite")));
                    }
                    if x < 0.0 {
                        return Err(Error::NegativePotential { index: i, value: x });
                    }
                }
                Ok(v.clone())
            }
            PotentialSpec::DeltaComb { positions, v0 } => {
                if !(*v0 > 0.0 && v0.is_finite()) {
                    return Err(Error::InvalidInput(format!("delta strength must be positive, got {v0}")));
                }
                let mut out = vec![0.0; n];
                for &p in positions {
                    if !(p > 0.0 && p < grid.length()) {
                        return Err(Error::InvalidInput(format!("delta position {p} outside (0, {})", grid.length())));
                    }
                    let t = p / h - 1.0;
                    let i0 = t.floor();
                    let f = t - i0;
                    let i0 = i0 as isize;
                    if i0 >= 0 && (i0 as usize) < n {
                        out[i0 as usize] += (1.0 - f) * v0 / h;
                    }
                    if f > 0.0 && i0 + 1 >= 0 && ((i0 + 1) as usize) < n {
                        out[(i0 + 1) as usize] += f * v0 / h;
                    }
                }
                Ok(out)
            }
        }
    }
}

/// `-ψ'' + v ψ` discretized with the 3-point Laplacian; stored tridiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHamiltonian {
    grid: Grid1D,
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl DiscreteHamiltonian {
    /// Any real symmetric tridiagonal matrix on `grid`; used for toy models.
    pub fn from_tridiagonal(grid: Grid1D, diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.len() != grid.n() || off.len() + 1 != grid.n() {
            return Err(Error::InvalidInput("tridiagonal sizes do not match the grid".into()));
        }
        Ok(DiscreteHamiltonian { grid, diag, off })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn tridiag(&self) -> SymTridiag {
        SymTridiag::new(self.diag.clone(), self.off.clone())
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.n();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i + 1 == j {
                self.off[i]
            } else if j + 1 == i {
                self.off[j]
            } else {
                0.0
            }
        })
    }

    /// Gershgorin bound on `‖H‖`.
    pub fn norm_bound(&self) -> f64 {
        self.tridiag().norm_bound()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.tridiag().eigenvalues()
    }

    pub fn count_below(&self, x: f64) -> usize {
        self.tridiag().count_below(x)
    }

    /// The lowest `k` eigenvalues and their eigenvectors.
    pub fn lowest(&self, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let t = self.tridiag();
        let vals = t.eigenvalues_range(0..k.min(self.n()));
        let vecs = t.eigenvectors(&vals);
        (vals, vecs)
    }

    /// Distance from `x` to the nearest eigenvalue.
    pub fn distance_to_spectrum(&self, x: f64) -> f64 {
        let t = self.tridiag();
        let k = t.count_below(x);
        let mut d = f64::INFINITY;
        if k > 0 {
            d = d.min(x - t.eigenvalue(k - 1));
        }
        if k < self.n() {
            d = d.min(t.eigenvalue(k) - x);
        }
        d.abs()
    }
}

/// Builds `-Δ_h + v` with `Δ_h` the 3-point Laplacian (Dirichlet).
pub fn build_hamiltonian(grid: &Grid1D, pot: &PotentialSpec) -> Result<DiscreteHamiltonian> {
    let v = pot.on_grid(grid)?;
    let h2 = grid.h() * grid.h();
    let diag = v.iter().map(|vi| 2.0 / h2 + vi).collect();
    let off = vec![-1.0 / h2; grid.n() - 1];
    Ok(DiscreteHamiltonian { grid: *grid, diag, off })
}

/// Central difference `(ψ_{i+1} - ψ_{i-1}) / 2h` with zero boundary values.
pub fn central_difference(grid: &Grid1D, psi: &[f64]) -> Vec<f64> {
    let n = psi.len();
    let inv = 1.0 / (2.0 * grid.h());
    (0..n)
        .map(|i| {
            let r = if i + 1 < n { psi[i + 1] } else { 0.0 };
            let l = if i > 0 { psi[i - 1] } else { 0.0 };
            (r - l) * inv
        })
        .collect()
}
