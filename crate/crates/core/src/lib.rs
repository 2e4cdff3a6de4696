//! Schatten `p`-norms of multimode bosonic Gaussian states and the
//! `p → p` norms `‖Φ‖_{p→p} = |det K|^{1/p − 1}` of Gaussian channels.
//!
//! * [`symplectic`]: phase-space conventions and eigendecomposition-based
//!   matrix functions.
//! * [`states`]: Gaussian states, `Tr ρ^p`, characteristic functions and
//!   Gibbs families.
//! * [`channels`]: channels `(K, l, μ)`, their action on states, the norm
//!   formula, and the achievability / upper-bound / scaling sweeps.
//! * [`oracle`]: a truncated Fock-space brute-force oracle for one mode.
//! * [`sampling`]: random valid states and channels.

// `!(x > y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod fit;
pub mod oracle;
pub mod sampling;
pub mod states;
pub mod symplectic;

pub use channels::{
    default_betas, divergence_exponent, ratio_sequence, scaling_exponent, upper_bound_check,
    ConvergenceReport, DivergenceReport, GaussianChannel, ScalingFit, UpperBoundReport, Verdict,
};
pub use error::{Error, Result};
pub use states::{f_p, g_p, GaussianState, GibbsFamily, SpectralFunctions};
pub use symplectic::{SymplecticSpace, Tolerances};
