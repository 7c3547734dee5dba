use std::f64::consts::PI;

use super::{build_scaled, classify_spectrum, ClassifyOptions, DilationPotential, Label, ScaledHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::minpair::{antilinear_min_pair, MinPairOptions};
use crate::linalg::{self, bilinear, c64, vec_norm};
use crate::schrodinger::Grid1D;

/// `|z sin(2 Im θ - α)|` with `z = |z| e^{-iα}`: distance from `z` to the
/// full line through the rotated ray.
pub fn ray_distance_raw(z: c64, theta: c64) -> f64 {
    z.norm() * (z.arg() + 2.0 * theta.im).sin().abs()
}

/// Distance from `z` to the ray `{r e^{-2i Im θ} : r ≥ 0}`. Equals the raw
/// formula unless the projection of `z` falls behind the origin, where it is `|z|`.
pub fn ray_distance(z: c64, theta: c64) -> f64 {
    if z.norm() == 0.0 {
        return 0.0;
    }
    let mut delta = z.arg() + 2.0 * theta.im;
    while delta > PI {
        delta -= 2.0 * PI;
    }
    while delta <= -PI {
        delta += 2.0 * PI;
    }
    if delta.abs() > PI / 2.0 {
        z.norm()
    } else {
        z.norm() * delta.sin().abs()
    }
}

#[derive(Debug, Clone)]
pub struct ResolventAt {
    /// `1 / min λ`.
    pub norm: f64,
    pub min_lambda: f64,
    /// Minimizer of `(H - z) ψ = λ conj(ψ)`.
    pub psi: Vec<c64>,
    /// `‖(H - z) ψ - λ conj(ψ)‖`.
    pub residual: f64,
}

pub fn resolvent_norm_at(h: &ScaledHamiltonian, z: c64) -> Result<ResolventAt> {
    let lu = h.lu(z)?;
    let scale = h.norm_bound() + z.norm();
    let n = h.n();
    let apply = |x: &[c64], out: &mut [c64]| {
        h.matvec(x, out);
        for i in 0..n {
            out[i] -= z * x[i];
        }
    };
    let pair = antilinear_min_pair(n, scale, apply, |x: &mut [c64]| lu.solve_in_place(x), &MinPairOptions::default())?;
    if pair.lambda < 1e-13 * scale {
        return Err(Error::SingularShift { min_lambda: pair.lambda });
    }
    Ok(ResolventAt { norm: 1.0 / pair.lambda, min_lambda: pair.lambda, psi: pair.psi, residual: pair.residual })
}

#[derive(Debug, Clone)]
pub struct FloorReport {
    /// `d(z, θ)` (clamped ray distance).
    pub floor: f64,
    pub floor_raw: f64,
    /// Singular values below `floor - tol_disc`, ascending.
    pub below: Vec<f64>,
    /// Singular values in `[floor, 1.5 floor]`.
    pub near_above: usize,
    pub min_singular: f64,
}

impl FloorReport {
    pub fn count_below(&self) -> usize {
        self.below.len()
    }
}

/// All singular values of `H - z` compared with the floor `d(z, θ)`.
pub fn essential_floor_check(h: &ScaledHamiltonian, z: c64, tol_disc: f64) -> Result<FloorReport> {
    let mut sv = linalg::singular_values(h.shifted_dense(z).as_ref())?;
    sv.reverse();
    let floor = ray_distance(z, h.theta);
    let below: Vec<f64> = sv.iter().copied().filter(|s| *s < floor - tol_disc).collect();
    let near_above = sv.iter().filter(|s| **s >= floor && **s <= 1.5 * floor).count();
    Ok(FloorReport { floor, floor_raw: ray_distance_raw(z, h.theta), below, near_above, min_singular: sv[0] })
}

/// Rayleigh-quotient refinement `z ← z + λ / ψ^T ψ` from the antilinear
/// minimizer at `z`; converges to the eigenvalue nearest `z0`.
pub fn polish_resonance(h: &ScaledHamiltonian, z0: c64, tol: f64) -> Result<c64> {
    let mut z = z0;
    for _ in 0..60 {
        let r = match resolvent_norm_at(h, z) {
            Ok(r) => r,
            Err(Error::SingularShift { .. }) => return Ok(z),
            Err(e) => return Err(e),
        };
        let q = bilinear(&r.psi, &r.psi);
        if q.norm() < 1e-8 {
            return Err(Error::Convergence("resonance vector is nearly self-orthogonal".into()));
        }
        let step = r.min_lambda / q;
        z += step;
        if step.norm() <= tol * z.norm().max(1.0) {
            return Ok(z);
        }
    }
    Err(Error::Convergence(format!("resonance polish did not settle near {z0}")))
}

/// Classifies the spectrum at `θ` and `θ + δθ` and returns the polished
/// resonance with the smallest stationarity score in the window.
pub fn locate_resonance(
    h: &ScaledHamiltonian,
    h_shifted: &ScaledHamiltonian,
    re_window: (f64, f64),
    im_window: (f64, f64),
    opts: &ClassifyOptions,
) -> Result<c64> {
    let cls = classify_spectrum(h, h_shifted, opts)?;
    let cand = cls
        .with_label(Label::Resonance)
        .into_iter()
        .filter(|(z, _)| z.re > re_window.0 && z.re < re_window.1 && z.im > im_window.0 && z.im < im_window.1)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Convergence("no resonance in the search window".into()))?;
    polish_resonance(h, cand.0, 1e-10)
}

fn eigenvector_near(h: &ScaledHamiltonian, z: c64) -> Result<Vec<c64>> {
    let n = h.n();
    let lu = match h.lu(z) {
        Ok(lu) => lu,
        Err(_) => h.lu(z + c64::new(1e-12 * h.norm_bound(), 0.0))?,
    };
    let mut x: Vec<c64> = (0..n).map(|i| c64::new(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 1.3).cos())).collect();
    for _ in 0..4 {
        lu.solve_in_place(&mut x);
        let nrm = vec_norm(&x);
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok(x)
}

/// First-order shift of the resonance under `γ w`: `ψ₀^T W ψ₀ / ψ₀^T ψ₀`.
pub fn resonance_slope(pot: &DilationPotential, grid: &Grid1D, theta: c64, z_res: c64) -> Result<c64> {
    let h = build_scaled(pot, grid, theta, 0.0)?;
    let psi = eigenvector_near(&h, z_res)?;
    let dil = theta.exp();
    let w: Vec<c64> = grid.points().into_iter().map(|x| pot.perturbation(dil * x)).collect();
    let num: c64 = psi.iter().zip(&w).map(|(p, wi)| p * p * wi).sum();
    Ok(num / bilinear(&psi, &psi))
}

/// `‖W (H - z)^{-1}‖` by power iteration on `R^H W^H W R`, with
/// `R^H y = conj(R conj(y))` for symmetric `R`.
fn weighted_resolvent_norm(h: &ScaledHamiltonian, w: &[c64], z: c64) -> Result<f64> {
    let lu = h.lu(z)?;
    let n = h.n();
    let mut x: Vec<c64> = (0..n).map(|i| c64::new(1.0, 0.3 * (i as f64).sin())).collect();
    let nrm = vec_norm(&x);
    x.iter_mut().for_each(|v| *v /= nrm);
    let mut est = 0.0;
    for _ in 0..1000 {
        let mut y = x.clone();
        lu.solve_in_place(&mut y);
        for (yi, wi) in y.iter_mut().zip(w) {
            *yi *= wi.norm_sqr();
        }
        y.iter_mut().for_each(|v| *v = v.conj());
        lu.solve_in_place(&mut y);
        y.iter_mut().for_each(|v| *v = v.conj());
        let lam = linalg::inner(&x, &y).re;
        let nrm = vec_norm(&y);
        x = y.into_iter().map(|v| v / nrm).collect();
        if (lam - est).abs() <= 1e-12 * lam.abs() {
            est = lam;
            break;
        }
        est = lam;
    }
    Ok(est.max(0.0).sqrt())
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Relative-bound constants of `w` with respect to `H_θ`; `None` picks
    /// `a = 0` and `b = max |w_θ|` on the grid, a valid pair for bounded `w`.
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Starting guess for the resonance at the first coupling.
    pub z_start: c64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub gamma: f64,
    pub z_res: c64,
    /// `‖(H_θ(γ) - z_probe)^{-1}‖`.
    pub norm: f64,
    /// Measured `‖w_θ (H_θ(γ) - z_probe)^{-1}‖`.
    pub weighted_norm: f64,
    /// `a/(1-a) + (b + a|z|)/(1-a) · norm`.
    pub bound_estimate: f64,
}

/// Tracks the resonance across `gammas` (in order) and evaluates the norms at
/// `z_probe`. Returns the rows and the `(a, b)` pair used.
pub fn perturbation_scan(
    pot: &DilationPotential,
    grid: &Grid1D,
    theta: c64,
    gammas: &[f64],
    z_probe: c64,
    opts: &ScanOptions,
) -> Result<(Vec<ScanRow>, (f64, f64))> {
    let dil = theta.exp();
    let w: Vec<c64> = grid.points().into_iter().map(|x| pot.perturbation(dil * x)).collect();
    let a = opts.a.unwrap_or(0.0);
    let b = opts.b.unwrap_or_else(|| w.iter().map(|v| v.norm()).fold(0.0, f64::max));
    if !(0.0..1.0).contains(&a) || b < 0.0 {
        return Err(Error::InvalidInput(format!(
            "relative-bound constants need 0 <= a < 1 and b >= 0, got ({a}, {b})"
        )));
    }
    let mut guess = opts.z_start;
    let mut rows = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let h = build_scaled(pot, grid, theta, gamma)?;
        let eig = h.eigenvalues()?;
        let near = eig
            .iter()
            .copied()
            .min_by(|x, y| (x - guess).norm().total_cmp(&(y - guess).norm()))
            .ok_or_else(|| Error::Convergence("empty spectrum".into()))?;
        let z_res = polish_resonance(&h, near, 1e-10)?;
        guess = z_res;
        let norm = resolvent_norm_at(&h, z_probe)?.norm;
        let weighted_norm = weighted_resolvent_norm(&h, &w, z_probe)?;
        let bound_estimate = a / (1.0 - a) + (b + a * z_probe.norm()) / (1.0 - a) * norm;
        rows.push(ScanRow { gamma, z_res, norm, weighted_norm, bound_estimate });
    }
    Ok((rows, (a, b)))
}
