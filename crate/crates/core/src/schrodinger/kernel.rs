use super::boost::SPECTRUM_TOL;
use super::{DiscreteHamiltonian, GapSpectrum, Grid1D};
use crate::error::{Error, Result};
use crate::linalg::c64;
use crate::linalg::tridiag::TridiagLu;

/// Grid points with `|x_i - x| <= eps`; the closed ball must sit inside `(0, L)`.
pub fn ball_indices(grid: &Grid1D, x: f64, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0) || x - eps <= 0.0 || x + eps >= grid.length() {
        return Err(Error::BallOutsideDomain { x, eps, length: grid.length() });
    }
    let h = grid.h();
    let slack = 1e-12 * grid.length();
    let lo = (((x - eps - slack) / h) - 1.0).ceil().max(0.0) as usize;
    let hi = ((((x + eps + slack) / h) - 1.0).floor() as usize).min(grid.n() - 1);
    Ok((lo..=hi).filter(|&i| (grid.x(i) - x).abs() <= eps + slack).collect())
}

fn check_resolvent_set(h: &DiscreteHamiltonian, e: c64) -> Result<()> {
    if e.im.abs() >= SPECTRUM_TOL {
        return Ok(());
    }
    let d = h.distance_to_spectrum(e.re).hypot(e.im);
    if d < SPECTRUM_TOL {
        return Err(Error::ShiftInSpectrum { energy: e.re, detail: format!("distance to the spectrum {d:.3e}") });
    }
    Ok(())
}

/// `Ḡ_E(x1, x2) = ω⁻² ⟨χ_{x1}, (H - E)^{-1} χ_{x2}⟩` with `ω = 2 eps` and
/// grid quadrature (weight `h` per point).
pub fn avg_resolvent_kernel(h: &DiscreteHamiltonian, e: c64, x1: f64, x2: f64, eps: f64) -> Result<c64> {
    Ok(avg_resolvent_kernel_matrix(h, e, &[x1, x2], eps)?[0][1])
}

/// Averaged kernel for all pairs of `points`: entry `[a][b]` is `Ḡ_E(points[a], points[b])`.
/// One factorization and one solve per point.
pub fn avg_resolvent_kernel_matrix(h: &DiscreteHamiltonian, e: c64, points: &[f64], eps: f64) -> Result<Vec<Vec<c64>>> {
    check_resolvent_set(h, e)?;
    let grid = h.grid();
    let balls: Vec<Vec<usize>> = points.iter().map(|&x| ball_indices(grid, x, eps)).collect::<Result<_>>()?;
    let to_c = |v: &[f64]| -> Vec<c64> { v.iter().map(|&x| c64::new(x, 0.0)).collect() };
    let d: Vec<c64> = h.diag().iter().map(|&x| c64::new(x, 0.0) - e).collect();
    let lu = TridiagLu::factor(to_c(h.off()), d, to_c(h.off()))?;
    let w = grid.h() / (2.0 * eps).powi(2);
    let mut out = vec![vec![c64::new(0.0, 0.0); points.len()]; points.len()];
    for (b, ball) in balls.iter().enumerate() {
        let mut y = vec![c64::new(0.0, 0.0); grid.n()];
        ball.iter().for_each(|&i| y[i] = c64::new(1.0, 0.0));
        lu.solve_in_place(&mut y);
        for (a, other) in balls.iter().enumerate() {
            out[a][b] = other.iter().map(|&i| y[i]).sum::<c64>() * w;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ProjectorOptions {
    /// Power `p` in the fitted form `P(s) ~ s^{-p} e^{-q s}`; the fit is
    /// linear in `ln|P| + p ln s` against `s`.
    pub prefactor_exponent: f64,
    /// Keep separations in `[a L, b L]`; `None` keeps all.
    pub window: Option<(f64, f64)>,
    /// Samples below `floor * max|P|` are dropped before the fit.
    pub floor: f64,
}

impl Default for ProjectorOptions {
    fn default() -> Self {
        ProjectorOptions { prefactor_exponent: 0.5, window: Some((0.2, 0.6)), floor: 1e-11 }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectorDecay {
    pub q_fit: f64,
    /// `(separation, averaged P)` for every requested separation.
    pub samples: Vec<(f64, f64)>,
    /// Number of samples that entered the fit.
    pub used: usize,
}

/// Even integer separations inside the default fit window of a length-`L` domain.
pub fn default_separations(length: f64) -> Vec<f64> {
    let lo = (0.2 * length / 2.0).ceil() as i64 * 2;
    let hi = (0.6 * length / 2.0).floor() as i64 * 2;
    (lo..=hi).step_by(2).map(|s| s as f64).collect()
}

/// Averaged filled-band projector `P̄₋(x1, x2)` along pairs placed
/// symmetrically about the domain centre, and its exponential decay rate.
pub fn projector_decay(
    h: &DiscreteHamiltonian,
    gap: &GapSpectrum,
    eps: f64,
    separations: &[f64],
    opts: &ProjectorOptions,
) -> Result<ProjectorDecay> {
    let grid = h.grid();
    let length = grid.length();
    let centre = 0.5 * length;
    let m = h.count_below(0.5 * (gap.e_minus + gap.e_plus));
    let (_, vecs) = h.lowest(m);
    let w = grid.h() / (2.0 * eps).powi(2);
    let ball_sums = |x: f64| -> Result<Vec<f64>> {
        if x < 4.0 * eps || x > length - 4.0 * eps {
            return Err(Error::BallOutsideDomain { x, eps, length });
        }
        let ball = ball_indices(grid, x, eps)?;
        Ok(vecs.iter().map(|v| ball.iter().map(|&i| v[i]).sum()).collect())
    };
    let mut samples = Vec::with_capacity(separations.len());
    for &s in separations {
        let a = ball_sums(centre - 0.5 * s)?;
        let b = ball_sums(centre + 0.5 * s)?;
        let p: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() * w;
        samples.push((s, p));
    }
    let in_window = |s: f64| match opts.window {
        Some((lo, hi)) => s >= lo * length - 1e-9 && s <= hi * length + 1e-9,
        None => true,
    };
    let pmax = samples.iter().filter(|(s, _)| in_window(*s)).map(|(_, p)| p.abs()).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(s, p)| in_window(*s) && p.abs() > opts.floor * pmax && *s > 0.0)
        .map(|&(s, p)| (s, p.abs().ln() + opts.prefactor_exponent * s.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidInput(format!("only {} usable samples for the decay fit", pts.len())));
    }
    let q_fit = -slope(&pts);
    Ok(ProjectorDecay { q_fit, samples, used: pts.len() })
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
