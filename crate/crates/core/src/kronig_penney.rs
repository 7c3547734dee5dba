//! Repulsive delta comb `H = -∂² + v₀ Σ δ(x - n)` with unit lattice constant.
//!
//! The half-trace of the one-cell transfer matrix is
//! `h(E) = cos k + v₀ sin k / (2k)`, `k = sqrt(E)`, and `E` is in the spectrum
//! iff `|h(E)| ≤ 1`. Since `h(π²) = -1` for every `v₀`, the first band ends
//! exactly at `E₋ = π²`; the first gap is `k ∈ (π, k₊)`.
//!
//! In the gap the Bloch momentum is complex with `Im k = arccosh|h(E)|`. The
//! filled-band density matrix decays with the rate at the in-gap stationary
//! point of `h` (the branch point of the complex band structure).

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::decay::qbar_and_ebar;
use crate::error::{Error, Result};
use crate::schrodinger::{
    build_hamiltonian, default_separations, projector_decay, DiscreteHamiltonian, GapSpectrum, Grid1D, PotentialSpec,
    ProjectorOptions,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPModel {
    v0: f64,
}

impl KPModel {
    pub fn new(v0: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(Error::InvalidInput(format!("v0 must be positive, got {v0}")));
        }
        Ok(KPModel { v0 })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }
}

/// `h(E)`, continued analytically to `E ≤ 0` (`cosh κ + v₀ sinh κ / (2κ)`).
pub fn dispersion(model: &KPModel, e: f64) -> f64 {
    let v0 = model.v0;
    if e > 0.0 {
        let k = e.sqrt();
        k.cos() + v0 * k.sin() / (2.0 * k)
    } else if e < 0.0 {
        let kappa = (-e).sqrt();
        kappa.cosh() + v0 * kappa.sinh() / (2.0 * kappa)
    } else {
        1.0 + 0.5 * v0
    }
}

/// `dh/dk` at `k > 0`.
pub fn dispersion_dk(model: &KPModel, k: f64) -> f64 {
    -k.sin() + model.v0 * (k * k.cos() - k.sin()) / (2.0 * k * k)
}

/// `dh/dE = (dh/dk) / (2k)`.
pub fn dispersion_derivative(model: &KPModel, e: f64) -> f64 {
    let k = e.sqrt();
    dispersion_dk(model, k) / (2.0 * k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdges {
    pub e_bottom: f64,
    pub e_minus: f64,
    pub e_plus: f64,
}

impl BandEdges {
    pub fn g(&self) -> f64 {
        self.e_plus - self.e_minus
    }

    pub fn w(&self) -> f64 {
        self.e_minus - self.e_bottom
    }

    pub fn ratio(&self) -> f64 {
        self.g() / self.w()
    }

    pub fn gap(&self) -> GapSpectrum {
        GapSpectrum { e_bottom: self.e_bottom, e_minus: self.e_minus, e_plus: self.e_plus }
    }
}

/// Bisection of `f` on `(lo, hi)` with `f(lo) > 0 > f(hi)` or the reverse,
/// run to adjacent doubles.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, what: &str) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if !(flo.is_finite() && fhi.is_finite()) || (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::BracketFailure(format!("{what}: no sign change on ({lo}, {hi})")));
    }
    let lo_positive = flo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Band-1 edges and the bottom of band 2.
///
/// `h - 1 = sin(k/2) [v₀ cos(k/2)/k - 2 sin(k/2)]` and, with `k = π + u`,
/// `h + 1 = sin(u/2) [2 sin(u/2) - v₀ cos(u/2)/(π + u)]`; the bracketed factors
/// change sign once on `(0, π)` and are bisected, which keeps the root at
/// `k = π` (where `h = -1` for all `v₀`) out of the bracket.
pub fn band_edges(model: &KPModel) -> Result<BandEdges> {
    let v0 = model.v0;
    let tiny = 1e-300;
    let kb = bisect(|k| v0 * (0.5 * k).cos() / k - 2.0 * (0.5 * k).sin(), tiny, PI, "band bottom")?;
    let u = bisect(|u| 2.0 * (0.5 * u).sin() - v0 * (0.5 * u).cos() / (PI + u), 0.0, PI, "upper band bottom")?;
    let kp = PI + u;
    Ok(BandEdges { e_bottom: kb * kb, e_minus: PI * PI, e_plus: kp * kp })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactDecay {
    pub e_star: f64,
    pub q_exact: f64,
}

/// Stationary point of `h` in the first gap and `q = arccosh|h(E★)|`.
pub fn exact_decay(model: &KPModel) -> Result<ExactDecay> {
    let edges = band_edges(model)?;
    let kp = edges.e_plus.sqrt();
    let k = bisect(|k| dispersion_dk(model, k), PI, kp, "branch point").map_err(|_| Error::BranchPointNotFound)?;
    let e_star = k * k;
    let h = dispersion(model, e_star);
    if !(h.abs() > 1.0) {
        return Err(Error::BranchPointNotFound);
    }
    Ok(ExactDecay { e_star, q_exact: h.abs().acosh() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Row {
    pub v0: f64,
    pub g: f64,
    pub w: f64,
    pub g_over_w: f64,
    pub q_exact: f64,
    pub q_bound: f64,
    pub rel_diff: f64,
}

impl Fig1Row {
    pub const COLUMNS: [&'static str; 7] = ["v0", "G", "W", "G_over_W", "q_exact", "q_bound", "rel_diff"];

    pub fn values(&self) -> [f64; 7] {
        [self.v0, self.g, self.w, self.g_over_w, self.q_exact, self.q_bound, self.rel_diff]
    }
}

pub fn fig1_row(model: &KPModel) -> Result<Fig1Row> {
    let edges = band_edges(model)?;
    let bound = qbar_and_ebar(&edges.gap())?;
    let exact = exact_decay(model)?;
    Ok(Fig1Row {
        v0: model.v0,
        g: edges.g(),
        w: edges.w(),
        g_over_w: edges.ratio(),
        q_exact: exact.q_exact,
        q_bound: bound.q_bar_bound,
        rel_diff: (exact.q_exact - bound.q_bar_bound) / exact.q_exact,
    })
}

/// One row per `v₀`, in input order.
pub fn fig1_sweep(v0_values: &[f64]) -> Result<Vec<Fig1Row>> {
    v0_values.par_iter().map(|&v0| fig1_row(&KPModel::new(v0)?)).collect()
}

/// Default sweep range: 20 log-spaced strengths with `G/W` from about 0.1 to
/// just under 10.
pub const FIG1_V0_RANGE: (f64, f64) = (0.5, 30.0);

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| match i {
            0 => lo,
            i if i == count - 1 => hi,
            i => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// Finite comb of `cells` unit cells with hard walls at `0` and `cells`
/// and deltas at the interior integers; `points_per_cell` grid points per
/// cell puts every delta on a grid point. Band 1 then holds exactly `cells`
/// states.
pub fn finite_chain(model: &KPModel, cells: usize, points_per_cell: usize) -> Result<DiscreteHamiltonian> {
    let grid = Grid1D::new(cells as f64, cells * points_per_cell - 1)?;
    let positions = (1..cells).map(|c| c as f64).collect();
    build_hamiltonian(&grid, &PotentialSpec::DeltaComb { positions, v0: model.v0 })
}

#[derive(Debug, Clone)]
pub struct ChainFit {
    pub q_fit: f64,
    pub cells: usize,
    pub n: usize,
    pub separations: Vec<f64>,
    pub samples: Vec<(f64, f64)>,
}

/// Decay rate of the averaged filled-band projector on a finite chain. The
/// chain length and fit window scale with the bound `G/(4 sqrt(E₋))` so the
/// fit sees several decay lengths away from the walls at every `v₀`.
pub fn chain_decay_fit(model: &KPModel, points_per_cell: usize) -> Result<ChainFit> {
    let edges = band_edges(model)?;
    let q_scale = qbar_and_ebar(&edges.gap())?.q_bar_bound;
    let even_ceil = |x: f64| 2.0 * (x / 2.0).ceil();
    let s_lo = 4.0f64.max(even_ceil(1.25 / q_scale));
    let span = 6.0f64.max(even_ceil(4.0 / q_scale));
    let s_hi = s_lo + span;
    let margin = even_ceil(3.0 / q_scale);
    let cells = (s_hi + 2.0 * margin) as usize;
    let h = finite_chain(model, cells, points_per_cell)?;
    let gap = GapSpectrum::new(edges.e_bottom, edges.e_minus, edges.e_plus)?;
    let separations: Vec<f64> = (0..).map(|i| s_lo + 2.0 * i as f64).take_while(|s| *s <= s_hi + 1e-9).collect();
    let opts = ProjectorOptions { window: None, ..ProjectorOptions::default() };
    // The lower band of the chain is bracketed by the bulk edges, so the
    // analytic gap serves for the band split.
    let fit = projector_decay(&h, &gap, 0.25, &separations, &opts)?;
    Ok(ChainFit { q_fit: fit.q_fit, cells, n: h.n(), separations, samples: fit.samples })
}

/// Separations used by the default 40-cell fit window.
pub fn default_chain_separations(cells: usize) -> Vec<f64> {
    default_separations(cells as f64)
}
