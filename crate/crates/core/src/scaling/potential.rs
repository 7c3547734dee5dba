use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::linalg::c64;

/// Dilation-analytic potential families, evaluated at complex arguments.
#[derive(Clone)]
pub enum PotentialFamily {
    Zero,
    /// `α x² e^{-x}`: analytic for `|Im θ| < π/2`.
    AlphaR2Exp {
        alpha: f64,
    },
    /// `-depth · exp(-(x/width)²)`: analytic for `|Im θ| < π/4`.
    GaussianWell {
        depth: f64,
        width: f64,
    },
    /// User-supplied continuation with its own strip half-width.
    Custom {
        f: Arc<dyn Fn(c64) -> c64 + Send + Sync>,
        strip: f64,
        name: String,
    },
}

impl fmt::Debug for PotentialFamily {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialFamily::Zero => write!(fm, "Zero"),
            PotentialFamily::AlphaR2Exp { alpha } => write!(fm, "AlphaR2Exp {{ alpha: {alpha} }}"),
            PotentialFamily::GaussianWell { depth, width } => {
                write!(fm, "GaussianWell {{ depth: {depth}, width: {width} }}")
            }
            PotentialFamily::Custom { strip, name, .. } => write!(fm, "Custom {{ name: {name}, strip: {strip} }}"),
        }
    }
}

impl PotentialFamily {
    pub fn eval(&self, z: c64) -> c64 {
        match self {
            PotentialFamily::Zero => c64::new(0.0, 0.0),
            PotentialFamily::AlphaR2Exp { alpha } => z * z * (-z).exp() * *alpha,
            PotentialFamily::GaussianWell { depth, width } => {
                let u = z / *width;
                -(-(u * u)).exp() * *depth
            }
            PotentialFamily::Custom { f, .. } => f(z),
        }
    }

    /// Half-width of the analyticity strip in `Im θ`.
    pub fn strip(&self) -> f64 {
        match self {
            PotentialFamily::Zero => PI / 2.0,
            PotentialFamily::AlphaR2Exp { .. } => PI / 2.0,
            PotentialFamily::GaussianWell { .. } => PI / 4.0,
            PotentialFamily::Custom { strip, .. } => *strip,
        }
    }
}

/// `v` plus an optional perturbation `w`, coupled by `γ` at build time.
#[derive(Debug, Clone)]
pub struct DilationPotential {
    pub v: PotentialFamily,
    pub w: Option<PotentialFamily>,
}

impl DilationPotential {
    pub fn new(v: PotentialFamily) -> Self {
        DilationPotential { v, w: None }
    }

    pub fn with_perturbation(mut self, w: PotentialFamily) -> Self {
        self.w = Some(w);
        self
    }

    pub fn alpha_r2_exp(alpha: f64) -> Self {
        Self::new(PotentialFamily::AlphaR2Exp { alpha })
    }

    pub fn free() -> Self {
        Self::new(PotentialFamily::Zero)
    }

    pub fn strip(&self) -> f64 {
        let s = self.v.strip();
        match &self.w {
            Some(w) => s.min(w.strip()),
            None => s,
        }
    }

    pub fn total(&self, z: c64, gamma: f64) -> c64 {
        let mut v = self.v.eval(z);
        if let Some(w) = &self.w {
            if gamma != 0.0 {
                v += w.eval(z) * gamma;
            }
        }
        v
    }

    /// The perturbation at `z` (zero when none is set).
    pub fn perturbation(&self, z: c64) -> c64 {
        self.w.as_ref().map(|w| w.eval(z)).unwrap_or(c64::new(0.0, 0.0))
    }
}
