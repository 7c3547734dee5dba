use super::ScaledHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::c64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    /// Stationary, real and below the continuum threshold.
    Bound,
    /// Stationary with negative imaginary part.
    Resonance,
    /// Stationary but neither of the above.
    Discrete,
    /// Moves with the rotated continuum.
    ContinuumString,
    /// Matches neither test.
    Unlabeled,
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Discrete if `|Δz| < discrete_factor · |z| · |δθ|`.
    pub discrete_factor: f64,
    /// Continuum if the back-rotated partner is within
    /// `continuum_factor · |z (e^{-2δθ} - 1)|`.
    pub continuum_factor: f64,
    /// Resonance if `Im z < -resonance_threshold`.
    pub resonance_threshold: f64,
    /// Bound if `|Im z| ≤ real_tol · max(|z|, 1)` and `Re z` is below the
    /// threshold. The grid leaves an `O(h²)` imaginary part on true bound
    /// states, so this is loose on purpose.
    pub real_tol: f64,
    pub continuum_threshold: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            discrete_factor: 0.1,
            continuum_factor: 0.3,
            resonance_threshold: 1e-6,
            real_tol: 1e-3,
            continuum_threshold: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumClassification {
    pub eigenvalues: Vec<c64>,
    pub labels: Vec<Label>,
    /// `|Δz| / (|z| |δθ|)` against the nearest eigenvalue at `θ + δθ`.
    pub scores: Vec<f64>,
}

impl SpectrumClassification {
    pub fn with_label(&self, label: Label) -> Vec<(c64, f64)> {
        self.eigenvalues
            .iter()
            .zip(&self.labels)
            .zip(&self.scores)
            .filter(|((_, l), _)| **l == label)
            .map(|((z, _), s)| (*z, *s))
            .collect()
    }
}

/// Labels the eigenvalues of `h1` by comparing with `h2`, the same operator at
/// a slightly different scaling angle. Discrete eigenvalues stay put; the
/// continuum string rotates by `-2 δθ`.
pub fn classify_spectrum(
    h1: &ScaledHamiltonian,
    h2: &ScaledHamiltonian,
    opts: &ClassifyOptions,
) -> Result<SpectrumClassification> {
    if h1.n() != h2.n() || h1.grid != h2.grid || h1.gamma != h2.gamma {
        return Err(Error::InvalidInput("classification needs the same grid and coupling at both angles".into()));
    }
    let dtheta = h2.theta - h1.theta;
    if dtheta.norm() == 0.0 {
        return Err(Error::InvalidInput("the two scaling angles coincide".into()));
    }
    let z1 = h1.eigenvalues()?;
    let z2 = h2.eigenvalues()?;
    let back = (2.0 * dtheta).exp();
    let rot_shift = ((-2.0 * dtheta).exp() - 1.0).norm();
    let nearest = |target: c64, f: &dyn Fn(c64) -> c64| -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (j, z) in z2.iter().enumerate() {
            let d = (f(*z) - target).norm();
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    };
    let mut labels = Vec::with_capacity(z1.len());
    let mut scores = Vec::with_capacity(z1.len());
    let mut partner: Vec<Option<usize>> = Vec::with_capacity(z1.len());
    for &z in &z1 {
        let (j, d) = nearest(z, &|w| w);
        let scale = z.norm() * dtheta.norm();
        scores.push(if scale > 0.0 { d / scale } else { f64::INFINITY });
        if d < opts.discrete_factor * scale {
            partner.push(Some(j));
            let label = if z.im.abs() <= opts.real_tol * z.norm().max(1.0) && z.re < opts.continuum_threshold {
                Label::Bound
            } else if z.im < -opts.resonance_threshold && z.re > opts.continuum_threshold {
                Label::Resonance
            } else {
                Label::Discrete
            };
            labels.push(label);
            continue;
        }
        partner.push(None);
        let (_, dc) = nearest(z, &|w| w * back);
        labels.push(if dc < opts.continuum_factor * z.norm() * rot_shift {
            Label::ContinuumString
        } else {
            Label::Unlabeled
        });
    }
    let mut seen = std::collections::HashMap::new();
    for (i, p) in partner.iter().enumerate() {
        if let Some(j) = p {
            if let Some(prev) = seen.insert(*j, i) {
                return Err(Error::PairingAmbiguity(format!(
                    "eigenvalues {} and {} both pair with {}",
                    z1[prev], z1[i], z2[*j]
                )));
            }
        }
    }
    Ok(SpectrumClassification { eigenvalues: z1, labels, scores })
}
