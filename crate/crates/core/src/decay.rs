//! Closed-form decay bounds for a gapped spectrum.
//!
//! With `a = E₊ - E - q²`, `b = E - E₋ + q²`:
//!
//! ```text
//! F(q, E)  = sqrt(a b / (4 E₋))
//! q_c(E)   : the positive root of q = F(q, E)
//! C_{q,E}  = e^{2qε} / (ω_ε · min|E± - E - q²| · (1 - q/F))
//! ```
//!
//! and the energy-optimized rate `q̄ ≥ G / (4 sqrt(E₋))`, attained at
//! `Ē = (E₊ + E₋)/2 - G²/(16 E₋)`.

use crate::error::{Error, Result};
use crate::schrodinger::GapSpectrum;

/// Probe energy, rate, averaging radius and dimension for one bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub gap: GapSpectrum,
    pub e: f64,
    pub q: f64,
    pub eps: f64,
    pub d: u32,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        check_gap(&self.gap, self.e)?;
        if !(self.q >= 0.0) {
            return Err(Error::InvalidInput(format!("q must satisfy q >= 0, got {}", self.q)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidInput(format!("eps must be positive, got {}", self.eps)));
        }
        if self.d == 0 {
            return Err(Error::InvalidInput("dimension d must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub f_value: f64,
    pub c_value: f64,
    pub q_c: f64,
    /// `q < q_c` and `E + q²` in the gap.
    pub valid: bool,
    /// Sign changes of `q - F(q, E)` on `(0, sqrt(E₊ - E))`; always 1 for
    /// this `F`, recorded as a check.
    pub root_count: usize,
}

fn check_gap(gap: &GapSpectrum, e: f64) -> Result<()> {
    if !(gap.e_minus > 0.0) {
        return Err(Error::InvalidGap(format!("E_minus must be positive, got {}", gap.e_minus)));
    }
    if !(gap.e_minus < e && e < gap.e_plus) {
        return Err(Error::InvalidGap(format!("E = {e} is not inside ({}, {})", gap.e_minus, gap.e_plus)));
    }
    Ok(())
}

/// `F(q, E)`; zero once `E + q²` reaches `E₊`.
pub fn f_value(gap: &GapSpectrum, q: f64, e: f64) -> f64 {
    let a = gap.e_plus - e - q * q;
    let b = e - gap.e_minus + q * q;
    (a * b / (4.0 * gap.e_minus)).max(0.0).sqrt()
}

/// Smallest positive root of `q = F(q, E)`, by bisection on `(0, sqrt(E₊ - E))`
/// to 1e-12 relative.
pub fn critical_q(gap: &GapSpectrum, e: f64) -> Result<f64> {
    check_gap(gap, e)?;
    let g = |q: f64| q - f_value(gap, q, e);
    let mut lo = 0.0;
    let mut hi = (gap.e_plus - e).sqrt();
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        return Err(Error::BracketFailure(format!("q - F(q, E) does not change sign on (0, {hi})")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn root_count(gap: &GapSpectrum, e: f64) -> usize {
    let hi = (gap.e_plus - e).sqrt();
    let samples = 256;
    let mut count = 0;
    let mut prev = -f_value(gap, 0.0, e);
    for k in 1..=samples {
        let q = hi * k as f64 / samples as f64;
        let cur = q - f_value(gap, q, e);
        if (prev < 0.0) != (cur < 0.0) {
            count += 1;
        }
        prev = cur;
    }
    count
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: u32) -> f64 {
    let mut v = [1.0, 2.0];
    for k in 2..=d {
        let next = v[0] * 2.0 * std::f64::consts::PI / k as f64;
        v = [v[1], next];
    }
    if d == 0 {
        1.0
    } else {
        v[1]
    }
}

/// `ω_ε = |B_1| ε^d`.
pub fn ball_volume(eps: f64, d: u32) -> f64 {
    unit_ball_volume(d) * eps.powi(d as i32)
}

/// Evaluates `F`, `q_c` and `C_{q,E}`.
pub fn bound_constant(inputs: &BoundInputs) -> Result<BoundResult> {
    inputs.validate()?;
    let BoundInputs { gap, e, q, eps, d } = *inputs;
    let q_c = critical_q(&gap, e)?;
    let shifted = e + q * q;
    if shifted >= gap.e_plus {
        return Err(Error::ShiftLeavesGap { shifted, e_plus: gap.e_plus });
    }
    if q >= q_c {
        return Err(Error::QBeyondCritical { q, q_c });
    }
    let f = f_value(&gap, q, e);
    let dist = (gap.e_plus - shifted).abs().min((gap.e_minus - shifted).abs());
    let c = (2.0 * q * eps).exp() / (ball_volume(eps, d) * dist * (1.0 - q / f));
    Ok(BoundResult { f_value: f, c_value: c, q_c, valid: c.is_finite() && c > 0.0, root_count: root_count(&gap, e) })
}

/// The `a → 0` comparison bound `‖B_q‖ ≤ q / (2 F(q, E))`.
pub fn bq_bound(gap: &GapSpectrum, q: f64, e: f64) -> f64 {
    q / (2.0 * f_value(gap, q, e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbarEbar {
    /// `G / (4 sqrt(E₋))`.
    pub q_bar_bound: f64,
    /// `(E₊ + E₋)/2 - G²/(16 E₋)`.
    pub e_bar: f64,
    /// The rate bound is only meaningful when `Ē` lies in the gap.
    pub e_bar_in_gap: bool,
}

pub fn qbar_and_ebar(gap: &GapSpectrum) -> Result<QbarEbar> {
    if !(gap.e_minus > 0.0) {
        return Err(Error::InvalidGap(format!("E_minus must be positive, got {}", gap.e_minus)));
    }
    let g = gap.g();
    let q_bar_bound = g / (4.0 * gap.e_minus.sqrt());
    let e_bar = 0.5 * (gap.e_plus + gap.e_minus) - g * g / (16.0 * gap.e_minus);
    Ok(QbarEbar { q_bar_bound, e_bar, e_bar_in_gap: gap.contains(e_bar) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub per_sample: Vec<bool>,
    /// `min log(C e^{-q s}) - log|Ḡ|`; `+inf` for an empty sample list.
    pub worst_margin: f64,
    pub passed: bool,
    pub bound: BoundResult,
}

/// Checks `|Ḡ| ≤ C_{q,E} e^{-q s}` for each `(s, |Ḡ|)` sample.
pub fn certify_bound(samples: &[(f64, f64)], inputs: &BoundInputs) -> Result<CertificateReport> {
    let bound = bound_constant(inputs)?;
    let ln_c = bound.c_value.ln();
    let mut worst = f64::INFINITY;
    let per_sample: Vec<bool> = samples
        .iter()
        .map(|&(s, g)| {
            let margin = ln_c - inputs.q * s - g.abs().ln();
            worst = worst.min(margin);
            margin >= 0.0
        })
        .collect();
    let passed = per_sample.iter().all(|&p| p);
    Ok(CertificateReport { per_sample, worst_margin: worst, passed, bound })
}
