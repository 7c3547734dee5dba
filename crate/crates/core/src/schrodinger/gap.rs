use super::DiscreteHamiltonian;
use crate::error::{Error, Result};

/// Two-band spectral data: lower band `[E_bottom, E_minus]`, upper band from
/// `E_plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSpectrum {
    pub e_bottom: f64,
    pub e_minus: f64,
    pub e_plus: f64,
}

impl GapSpectrum {
    pub fn new(e_bottom: f64, e_minus: f64, e_plus: f64) -> Result<Self> {
        if !(e_bottom.is_finite() && e_minus.is_finite() && e_plus.is_finite()) {
            return Err(Error::InvalidGap("band edges must be finite".into()));
        }
        if !(e_bottom <= e_minus && e_minus < e_plus) {
            return Err(Error::InvalidGap(format!(
                "need E_bottom <= E_minus < E_plus, got {e_bottom}, {e_minus}, {e_plus}"
            )));
        }
        Ok(GapSpectrum { e_bottom, e_minus, e_plus })
    }

    /// Gap edges only; the lower band is taken to start at zero energy.
    pub fn from_edges(e_minus: f64, e_plus: f64) -> Result<Self> {
        Self::new(0.0_f64.min(e_minus), e_minus, e_plus)
    }

    pub fn g(&self) -> f64 {
        self.e_plus - self.e_minus
    }

    pub fn w(&self) -> f64 {
        self.e_minus - self.e_bottom
    }

    pub fn contains(&self, e: f64) -> bool {
        self.e_minus < e && e < self.e_plus
    }
}

/// Thresholds for [`find_gap`].
#[derive(Debug, Clone)]
pub struct GapOptions {
    /// Only eigenvalues below this energy are searched (ignored with a hint).
    pub ceiling: Option<f64>,
    /// A gap must exceed this multiple of the local mean spacing...
    pub ratio: f64,
    /// ...and this absolute size.
    pub min_gap: f64,
    /// Number of neighbouring spacings on each side used for the local mean.
    pub neighbours: usize,
    /// Boundary filter: grid points at each end that count as "edge".
    pub edge_points: usize,
    /// Boundary filter: eigenvectors with more edge weight than this are dropped.
    pub edge_weight: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions { ceiling: None, ratio: 10.0, min_gap: 1e-6, neighbours: 5, edge_points: 5, edge_weight: 0.25 }
    }
}

/// Locates the band gap. With `lower_band_count_hint = Some(k)` the gap sits
/// above the `k`-th bulk state; otherwise the widest qualifying spacing below
/// the ceiling is taken. States concentrated at the Dirichlet walls are
/// excluded (only on grids with at least `4 * edge_points` points).
pub fn find_gap(
    h: &DiscreteHamiltonian,
    lower_band_count_hint: Option<usize>,
    opts: &GapOptions,
) -> Result<GapSpectrum> {
    let n = h.n();
    let t = h.tridiag();
    let count = match lower_band_count_hint {
        Some(k) => (2 * k + 2 * opts.neighbours + 10).min(n),
        None => match opts.ceiling {
            Some(c) => t.count_below(c),
            None => n,
        },
    };
    if count < 2 {
        return Err(Error::NoGapFound("fewer than two eigenvalues in the search window".into()));
    }
    let vals = t.eigenvalues_range(0..count);
    let bulk: Vec<f64> = if n >= 4 * opts.edge_points {
        let vecs = t.eigenvectors(&vals);
        vals.iter()
            .zip(&vecs)
            .filter(|(_, v)| {
                let e = opts.edge_points;
                let w: f64 = v[..e].iter().chain(&v[n - e..]).map(|x| x * x).sum();
                w <= opts.edge_weight
            })
            .map(|(l, _)| *l)
            .collect()
    } else {
        vals
    };
    if bulk.len() < 2 {
        return Err(Error::NoGapFound("fewer than two bulk states in the search window".into()));
    }
    let spacing: Vec<f64> = bulk.windows(2).map(|w| w[1] - w[0]).collect();
    let local_mean = |i: usize| -> f64 {
        let lo = i.saturating_sub(opts.neighbours);
        let hi = (i + opts.neighbours + 1).min(spacing.len());
        let others: Vec<f64> = (lo..hi).filter(|&j| j != i).map(|j| spacing[j]).collect();
        if others.is_empty() {
            0.0
        } else {
            others.iter().sum::<f64>() / others.len() as f64
        }
    };
    let qualifies = |i: usize| spacing[i] > opts.min_gap && spacing[i] > opts.ratio * local_mean(i);
    let idx = match lower_band_count_hint {
        Some(k) => {
            if k == 0 || k >= bulk.len() {
                return Err(Error::NoGapFound(format!("hint {k} outside the {} bulk states found", bulk.len())));
            }
            k - 1
        }
        None => (0..spacing.len()).max_by(|&a, &b| spacing[a].total_cmp(&spacing[b])).unwrap(),
    };
    if !qualifies(idx) {
        return Err(Error::NoGapFound(format!(
            "largest spacing {:.3e} is not {}x the local mean {:.3e}",
            spacing[idx],
            opts.ratio,
            local_mean(idx)
        )));
    }
    GapSpectrum::new(bulk[0], bulk[idx], bulk[idx + 1])
}
