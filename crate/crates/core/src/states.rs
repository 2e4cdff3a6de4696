//! Gaussian states at the covariance-matrix level.
//!
//! A state is a mean `m` and a covariance `α` with `α + (i/2)Δ ⪰ 0`. All
//! Schatten quantities factor over the symplectic eigenvalues `d_j ≥ ½`:
//! `Tr ρ^p = ∏ f_p(d_j)⁻¹` with `f_p(d) = (d+½)^p − (d−½)^p`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Branch, Error, Result};
use crate::symplectic::{
    check_psd_hermitian, matrix_cot, paired_moduli, symmetrized, Complex64, SpectralDecomposition,
    SymplecticSpace, Tolerances,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    space: SymplecticSpace,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Smallest eigenvalues of `α ± (i/2)Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyMargins {
    pub plus: f64,
    pub minus: f64,
}

impl UncertaintyMargins {
    pub fn min(&self) -> f64 {
        self.plus.min(self.minus)
    }
}

/// Evaluates both branches of `α ± (i/2)Δ ⪰ 0` without constructing a state.
pub fn uncertainty_margins(
    cov: &DMatrix<f64>,
    space: &SymplecticSpace,
) -> Result<(UncertaintyMargins, bool)> {
    let tol = Tolerances::DEFAULT;
    space.check_dim(cov.nrows())?;
    space.check_dim(cov.ncols())?;
    let cov = symmetrized(cov, &tol)?;
    let c = cov.map(|x| Complex64::new(x, 0.0));
    let h_plus = &c + space.half_i_delta();
    let h_minus = &c - space.half_i_delta();
    let slack = tol.psd_slack(h_plus.norm());
    let plus = check_psd_hermitian(&h_plus, slack, &tol)?;
    let minus = check_psd_hermitian(&h_minus, slack, &tol)?;
    let margins = UncertaintyMargins {
        plus: plus.min_eigenvalue,
        minus: minus.min_eigenvalue,
    };
    Ok((margins, plus.is_psd && minus.is_psd))
}

impl GaussianState {
    /// Validates `(m, α)`: dimensions, symmetry and the uncertainty relation.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, space: &SymplecticSpace) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        space.check_dim(mean.len())?;
        space.check_dim(cov.nrows())?;
        space.check_dim(cov.ncols())?;
        let cov = symmetrized(&cov, &tol)?;
        let (margins, ok) = uncertainty_margins(&cov, space)?;
        // The − branch is the complex conjugate of the + branch for real α,
        // so the two must agree.
        debug_assert!((margins.plus - margins.minus).abs() <= 1e-9 * (1.0 + cov.norm()));
        if !ok {
            let branch = if margins.plus <= margins.minus {
                Branch::Plus
            } else {
                Branch::Minus
            };
            return Err(Error::UncertaintyViolated {
                min_eigenvalue: margins.min(),
                branch,
            });
        }
        Ok(Self {
            space: space.clone(),
            mean,
            cov,
        })
    }

    pub fn vacuum(space: &SymplecticSpace) -> Self {
        let n = space.dim();
        Self {
            space: space.clone(),
            mean: DVector::zeros(n),
            cov: DMatrix::identity(n, n) * 0.5,
        }
    }

    /// Product of identical thermal modes with symplectic eigenvalue `d`,
    /// i.e. mean photon number `d − ½`.
    pub fn thermal(space: &SymplecticSpace, d: f64) -> Result<Self> {
        let n = space.dim();
        Self::new(DVector::zeros(n), DMatrix::identity(n, n) * d, space)
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn with_mean(&self, mean: DVector<f64>) -> Result<Self> {
        self.space.check_dim(mean.len())?;
        Ok(Self {
            mean,
            ..self.clone()
        })
    }

    fn decomposition(&self) -> Result<SpectralDecomposition> {
        SpectralDecomposition::new(&(self.space.delta_inv() * &self.cov), &Tolerances::DEFAULT)
    }

    /// Ascending symplectic eigenvalues.
    pub fn symplectic_spectrum(&self) -> Result<Vec<f64>> {
        paired_moduli(&self.decomposition()?, &Tolerances::DEFAULT)
    }

    /// `Tr ρ W(z) = exp(i mᵀz − ½ zᵀαz)`.
    pub fn char_function(&self, z: &DVector<f64>) -> Result<Complex64> {
        self.space.check_dim(z.len())?;
        Ok(gaussian_char(&self.mean, &self.cov, z))
    }

    /// `ln Tr ρ^p = −Σ_j ln f_p(d_j)`.
    pub fn ln_tr_rho_p(&self, p: f64) -> Result<f64> {
        let f = SpectralFunctions::new(p)?;
        let mut acc = 0.0;
        for d in self.symplectic_spectrum()? {
            acc -= f.f(d)?.ln();
        }
        Ok(acc)
    }

    /// `Tr ρ^p` for finite `p ≥ 1`.
    pub fn tr_rho_p(&self, p: f64) -> Result<f64> {
        Ok(self.ln_tr_rho_p(p)?.exp())
    }

    /// `ln ‖ρ‖_p`; `p = ∞` gives the log of the largest eigenvalue,
    /// `−Σ ln(d_j + ½)`.
    pub fn ln_schatten_norm(&self, p: f64) -> Result<f64> {
        if p == f64::INFINITY {
            let mut acc = 0.0;
            for d in self.symplectic_spectrum()? {
                acc -= (d + 0.5).ln();
            }
            return Ok(acc);
        }
        Ok(self.ln_tr_rho_p(p)? / p)
    }

    /// `‖ρ‖_p = (Tr ρ^p)^{1/p}` for `p ∈ [1, ∞]`.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        Ok(self.ln_schatten_norm(p)?.exp())
    }

    /// Covariance of the normalized power `ρ^p / Tr ρ^p`, i.e.
    /// `α · g_p(abs(Δ⁻¹α))`, symmetrized.
    pub fn power_covariance(&self, p: f64) -> Result<DMatrix<f64>> {
        let f = SpectralFunctions::new(p)?;
        let dec = self.decomposition()?;
        dec.require_imaginary_spectrum()?;
        // The domain check runs on the moduli first so apply() sees no NaN.
        for d in paired_moduli(&dec, &Tolerances::DEFAULT)? {
            f.g(d)?;
        }
        let g = dec.apply(|l| Complex64::new(f.g(l.norm()).unwrap_or(f64::NAN), 0.0))?;
        let m = &self.cov * g;
        Ok((&m + m.transpose()) * 0.5)
    }

    /// `Tr ρ^p W(z) = Tr ρ^p · exp(i mᵀz − ½ zᵀ α g_p(abs(Δ⁻¹α)) z)`.
    pub fn power_char_function(&self, p: f64, z: &DVector<f64>) -> Result<Complex64> {
        self.space.check_dim(z.len())?;
        let scale = self.tr_rho_p(p)?;
        let cov = self.power_covariance(p)?;
        Ok(gaussian_char(&self.mean, &cov, z) * scale)
    }
}

fn gaussian_char(mean: &DVector<f64>, cov: &DMatrix<f64>, z: &DVector<f64>) -> Complex64 {
    let phase = mean.dot(z);
    let quad = z.dot(&(cov * z));
    Complex64::from_polar((-0.5 * quad).exp(), phase)
}

/// The scalar functions `f_p` and `g_p` on symplectic eigenvalues.
///
/// `g_p(d) = [(d+½)^p + (d−½)^p] / (2d [(d+½)^p − (d−½)^p])` is fixed so that
/// for a thermal mode with `α = d·I` the normalized power `ρ^p / Tr ρ^p` has
/// symplectic eigenvalue `d·g_p(d) = ½ coth(pθ/2)` where `e^θ = (d+½)/(d−½)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFunctions {
    p: f64,
}

/// Slack below `½` accepted for symplectic eigenvalues before erroring.
const D_SLACK: f64 = 1e-8;

impl SpectralFunctions {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::Domain {
                what: "p",
                constraint: "1 ≤ p < ∞",
                value: p,
            });
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn clamp_d(d: f64) -> Result<f64> {
        if d.is_nan() || d < 0.5 - D_SLACK * 0.5 {
            return Err(Error::Domain {
                what: "symplectic eigenvalue d",
                constraint: "d ≥ 1/2",
                value: d,
            });
        }
        Ok(d.max(0.5))
    }

    /// `ln((d−½)/(d+½))·p`, so that `((d−½)/(d+½))^p = exp(·)`.
    fn ln_ratio_pow(&self, d: f64) -> f64 {
        self.p * (-1.0 / (d + 0.5)).ln_1p()
    }

    /// `f_p(d) = (d+½)^p − (d−½)^p`, evaluated as `(d+½)^p (1 − r^p)`.
    pub fn f(&self, d: f64) -> Result<f64> {
        let d = Self::clamp_d(d)?;
        if self.p == 1.0 {
            return Ok(1.0);
        }
        Ok((d + 0.5).powf(self.p) * -self.ln_ratio_pow(d).exp_m1())
    }

    pub fn g(&self, d: f64) -> Result<f64> {
        let d = Self::clamp_d(d)?;
        if self.p == 1.0 {
            return Ok(1.0);
        }
        let rp = self.ln_ratio_pow(d).exp();
        let one_minus = -self.ln_ratio_pow(d).exp_m1();
        Ok((1.0 + rp) / (2.0 * d * one_minus))
    }
}

pub fn f_p(d: f64, p: f64) -> Result<f64> {
    SpectralFunctions::new(p)?.f(d)
}

pub fn g_p(d: f64, p: f64) -> Result<f64> {
    SpectralFunctions::new(p)?.g(d)
}

/// Gibbs states of the quadratic Hamiltonian `H = RεRᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsFamily {
    space: SymplecticSpace,
    epsilon: DMatrix<f64>,
}

impl GibbsFamily {
    pub fn new(space: &SymplecticSpace, epsilon: DMatrix<f64>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        space.check_dim(epsilon.nrows())?;
        space.check_dim(epsilon.ncols())?;
        let epsilon = symmetrized(&epsilon, &tol)?;
        let min_eigenvalue = epsilon.symmetric_eigenvalues().min();
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Self {
            space: space.clone(),
            epsilon,
        })
    }

    /// `ε = I`.
    pub fn isotropic(space: &SymplecticSpace) -> Self {
        let n = space.dim();
        Self {
            space: space.clone(),
            epsilon: DMatrix::identity(n, n),
        }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn epsilon(&self) -> &DMatrix<f64> {
        &self.epsilon
    }

    fn check_beta(beta: f64) -> Result<()> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain {
                what: "β",
                constraint: "0 < β < ∞",
                value: beta,
            });
        }
        Ok(())
    }

    /// Covariance `α_β = (Δ/2)·cot(βεΔ)` with zero mean.
    pub fn gibbs_state(&self, beta: f64) -> Result<GaussianState> {
        Self::check_beta(beta)?;
        let tol = Tolerances::DEFAULT;
        let x = &self.epsilon * self.space.delta() * beta;
        let alpha = self.space.delta() * matrix_cot(&x, &tol)? * 0.5;
        GaussianState::new(DVector::zeros(self.space.dim()), alpha, &self.space)
    }

    /// The small-β comparator `(2βε)⁻¹`.
    pub fn asymptotic(&self, beta: f64) -> Result<DMatrix<f64>> {
        Self::check_beta(beta)?;
        (&self.epsilon * (2.0 * beta))
            .try_inverse()
            .ok_or(Error::SingularEpsilon)
    }
}
