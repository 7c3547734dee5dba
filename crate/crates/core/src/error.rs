use thiserror::Error;

/// Everything that can go wrong in the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric under the conjugation (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotCSymmetric { defect: f64, allowed: f64 },

    #[error("invalid conjugation: {0}")]
    InvalidConjugation(String),

    #[error("shift lies in the spectrum (smallest antilinear value {min_lambda:.3e})")]
    SingularShift { min_lambda: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("negative potential {value} at grid point {index}")]
    NegativePotential { index: usize, value: f64 },

    #[error("no spectral gap found: {0}")]
    NoGapFound(String),

    #[error("energy {energy} is in or too close to the spectrum: {detail}")]
    ShiftInSpectrum { energy: f64, detail: String },

    #[error("averaging ball around x = {x} with radius {eps} leaves the domain (0, {length})")]
    BallOutsideDomain { x: f64, eps: f64, length: f64 },

    #[error("invalid gap: {0}")]
    InvalidGap(String),

    #[error("q = {q} is not below the critical rate q_c = {q_c}")]
    QBeyondCritical { q: f64, q_c: f64 },

    #[error("shift E + q^2 = {shifted} leaves the gap (E_plus = {e_plus})")]
    ShiftLeavesGap { shifted: f64, e_plus: f64 },

    #[error("bisection bracket failure: {0}")]
    BracketFailure(String),

    #[error("no branch point of the dispersion inside the gap")]
    BranchPointNotFound,

    #[error("|Im theta| = {im_theta} violates the analyticity strip {strip}")]
    StripViolation { im_theta: f64, strip: f64 },

    #[error("eigenvalue pairing between the two scaling angles is not injective: {0}")]
    PairingAmbiguity(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Process exit code: 1 for configuration and input files, 2 for numerical
    /// preconditions, 3 for convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io { .. } => 1,
            Error::Convergence(_) | Error::BracketFailure(_) | Error::BranchPointNotFound => 3,
            _ => 2,
        }
    }
}

/// Configuration problems, with the offending line when there is one.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: `{key}` expects {expected}, got `{value}`")]
    TypeMismatch { line: usize, key: String, expected: String, value: String },

    #[error("missing required key `{0}`")]
    MissingRequired(String),

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("`{key}` violates {constraint}")]
    Precondition { key: String, constraint: String },

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
