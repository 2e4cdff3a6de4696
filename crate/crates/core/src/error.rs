use thiserror::Error;

/// Sign branch of a `μ ± (i/2)(Δ − KᵀΔK)` or `α ± (i/2)Δ` positivity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Plus => f.write_str("+"),
            Branch::Minus => f.write_str("-"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode count must be at least 1")]
    ZeroModes,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not diagonalizable (eigenvector condition estimate {condition:.3e})")]
    NonDiagonalizable { condition: f64 },

    #[error("spectral function has a pole at eigenvalue {re}{im:+}i")]
    SpectralPole { re: f64, im: f64 },

    #[error("matrix function is not real (relative imaginary residual {residual:.3e})")]
    ImagResidual { residual: f64 },

    #[error("spectrum is not purely imaginary (eigenvalue {re}{im:+}i)")]
    SpectrumNotImaginary { re: f64, im: f64 },

    #[error("eigenvalues do not pair as ±i·d (mismatch {mismatch:.3e})")]
    PairingFailure { mismatch: f64 },

    #[error("Schur decomposition did not converge")]
    SchurFailure,

    #[error("uncertainty relation violated: λ_min(α {branch} (i/2)Δ) = {min_eigenvalue}")]
    UncertaintyViolated { min_eigenvalue: f64, branch: Branch },

    #[error("μ is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetricMu { asymmetry: f64 },

    #[error(
        "channel is not completely positive: λ_min(μ {branch} (i/2)(Δ − KᵀΔK)) = {min_eigenvalue}"
    )]
    NotCP { min_eigenvalue: f64, branch: Branch },

    #[error("matrix is not positive definite (λ_min = {min_eigenvalue})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("ε is singular")]
    SingularEpsilon,

    #[error("theorem requires invertible K (|det K| = {det:e})")]
    SingularK { det: f64 },

    #[error("{what} must satisfy {constraint}, got {value}")]
    Domain {
        what: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error(
        "symplectic eigenvalue {value:e} exceeds the overflow cap {cap:e}; shrink the β range"
    )]
    NumericalOverflow { value: f64, cap: f64 },

    #[error("q = {q} must be strictly less than p = {p}")]
    QNotLessThanP { q: f64, p: f64 },

    #[error("β grid must be strictly descending and positive")]
    InvalidBetaGrid,

    #[error("β grid must span at least {required} decades, spans {actual:.3}")]
    InsufficientRange { required: f64, actual: f64 },

    #[error("thermal tail {tail:e} exceeds bound {bound:e}; use n_max ≥ {suggested_n_max}")]
    TailTooLarge {
        tail: f64,
        bound: f64,
        suggested_n_max: usize,
    },

    #[error("truncation at n_max = {n_max} is insufficient (doubling changes the result by {change:e}); try n_max = {suggested_n_max}")]
    TruncationInsufficient {
        n_max: usize,
        change: f64,
        suggested_n_max: usize,
    },

    #[error("operator is not a density operator: {reason}")]
    NotDensityOperator { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
