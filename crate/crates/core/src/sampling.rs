//! Random valid inputs: symplectic matrices, Gaussian states, positive
//! Hamiltonian matrices and completely positive channels with invertible
//! `K`. Used by the inequality checks and the test suites.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channels::GaussianChannel;
use crate::error::Result;
use crate::states::GaussianState;
use crate::symplectic::{Complex64, SymplecticSpace};

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Random orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// Symmetric matrix with Gaussian entries of the given scale.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, n) * scale;
    (&g + g.transpose()) * 0.5
}

/// `exp(ΔG)` with `G` symmetric, which satisfies `SᵀΔS = Δ`.
pub fn random_symplectic<R: Rng + ?Sized>(
    rng: &mut R,
    space: &SymplecticSpace,
    scale: f64,
) -> DMatrix<f64> {
    let g = random_symmetric(rng, space.dim(), scale);
    (space.delta() * g).exp()
}

/// Symmetric positive definite matrix with spectrum drawn uniformly from
/// `[lo, hi]`.
pub fn random_positive_definite<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    lo: f64,
    hi: f64,
) -> DMatrix<f64> {
    let q = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.random_range(lo..=hi));
    let m = &q * DMatrix::from_diagonal(&d) * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Gaussian state `α = Sᵀ diag(d) S` with symplectic eigenvalues drawn from
/// `[½, d_max]` and a random mean.
pub fn random_state<R: Rng + ?Sized>(
    rng: &mut R,
    space: &SymplecticSpace,
    d_max: f64,
) -> Result<GaussianState> {
    let s = random_symplectic(rng, space, 0.3);
    let mut diag = DVector::zeros(space.dim());
    for j in 0..space.modes() {
        let d = rng.random_range(0.5..=d_max.max(0.5));
        diag[2 * j] = d;
        diag[2 * j + 1] = d;
    }
    let alpha = s.transpose() * DMatrix::from_diagonal(&diag) * &s;
    let alpha = (&alpha + alpha.transpose()) * 0.5;
    let mean = DVector::from_fn(space.dim(), |_, _| StandardNormal.sample(rng));
    GaussianState::new(mean, alpha, space)
}

/// Smallest `μ = c·I` making `(K, μ)` completely positive: `c` is the
/// largest eigenvalue of the Hermitian `(i/2)(Δ − KᵀΔK)`.
pub fn minimal_isotropic_noise(k: &DMatrix<f64>, space: &SymplecticSpace) -> f64 {
    let sigma = space.delta() - k.transpose() * space.delta() * k;
    let h = sigma.map(|x| Complex64::new(0.0, 0.5 * x));
    h.symmetric_eigen().eigenvalues.max().max(0.0)
}

/// Random channel with `|det K|` log-uniform in `[det_lo, det_hi]`, singular
/// values of `K` within a factor `e` of each other, and
/// `μ = c·I + (small random PSD)` with `c` the minimal isotropic noise.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    space: &SymplecticSpace,
    det_lo: f64,
    det_hi: f64,
) -> Result<GaussianChannel> {
    let n = space.dim();
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let mut sv = DVector::from_fn(n, |_, _| rng.random_range(-0.5..=0.5f64).exp());
    let target = (det_lo.ln() + rng.random::<f64>() * (det_hi.ln() - det_lo.ln())).exp();
    let current: f64 = sv.iter().product();
    sv *= (target / current).powf(1.0 / n as f64);
    let k = &u * DMatrix::from_diagonal(&sv) * v.transpose();
    let c = minimal_isotropic_noise(&k, space);
    let extra = gaussian_matrix(rng, n, n) * 0.1;
    let mu = DMatrix::identity(n, n) * (c * (1.0 + 1e-9)) + &extra * extra.transpose();
    let l = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    GaussianChannel::new(k, l, mu, space)
}
