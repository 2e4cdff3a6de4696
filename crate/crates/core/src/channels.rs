//! Bosonic Gaussian channels `Φ*(W(z)) = W(Kz) exp(i lᵀz − ½ zᵀμz)`.
//!
//! On Gaussian inputs the channel acts as `α ↦ KᵀαK + μ`, `m ↦ Kᵀm + l`.
//! For invertible `K` the `p → p` norm is `|det K|^{1/p − 1}`; the
//! functions here evaluate it, certify it from below along Gibbs sequences
//! `β → 0`, test it from above on sampled Gaussian inputs, and fit the
//! `β`-scaling that makes the `q → p` map unbounded for `q < p`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Branch, Error, Result};
use crate::fit::{geometric_grid, least_squares, LinearFit};
use crate::states::{GaussianState, GibbsFamily, SpectralFunctions};
use crate::symplectic::{
    check_psd_hermitian, relative_asymmetry, Complex64, SymplecticSpace, Tolerances,
};

/// Symplectic eigenvalues above this are treated as overflow in sweeps.
pub const OVERFLOW_CAP: f64 = 1e12;

/// Slack applied to the upper bound `‖Φ[ρ]‖_p ≤ ‖Φ‖_{p→p}‖ρ‖_p`.
pub const UPPER_BOUND_SLACK: f64 = 1e-10;

/// Default sweep: 17 points from `10⁻¹` to `10⁻⁵`.
pub fn default_betas() -> Vec<f64> {
    geometric_grid(1e-1, 1e-5, 17).expect("static grid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    space: SymplecticSpace,
    k: DMatrix<f64>,
    l: DVector<f64>,
    mu: DMatrix<f64>,
}

/// Smallest eigenvalues of `μ ± (i/2)(Δ − KᵀΔK)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpMargins {
    pub plus: f64,
    pub minus: f64,
}

impl CpMargins {
    pub fn min(&self) -> f64 {
        self.plus.min(self.minus)
    }

    pub fn worst_branch(&self) -> Branch {
        if self.plus <= self.minus {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}

/// Evaluates the complete-positivity matrix inequality for `(K, μ)`.
/// Returns the margins and whether both branches pass.
pub fn cp_margins(
    k: &DMatrix<f64>,
    mu: &DMatrix<f64>,
    space: &SymplecticSpace,
) -> Result<(CpMargins, bool)> {
    let tol = Tolerances::DEFAULT;
    for m in [k, mu] {
        space.check_dim(m.nrows())?;
        space.check_dim(m.ncols())?;
    }
    let asymmetry = relative_asymmetry(mu);
    if asymmetry > tol.sym {
        return Err(Error::NotSymmetricMu { asymmetry });
    }
    let mu = (mu + mu.transpose()) * 0.5;
    let sigma = space.delta() - k.transpose() * space.delta() * k;
    let h = sigma.map(|x| Complex64::new(0.0, 0.5 * x));
    let mu_c = mu.map(|x| Complex64::new(x, 0.0));
    let plus_m = &mu_c + &h;
    let minus_m = &mu_c - &h;
    let slack = tol.psd_slack(plus_m.norm());
    let plus = check_psd_hermitian(&plus_m, slack, &tol)?;
    let minus = check_psd_hermitian(&minus_m, slack, &tol)?;
    Ok((
        CpMargins {
            plus: plus.min_eigenvalue,
            minus: minus.min_eigenvalue,
        },
        plus.is_psd && minus.is_psd,
    ))
}

impl GaussianChannel {
    pub fn new(
        k: DMatrix<f64>,
        l: DVector<f64>,
        mu: DMatrix<f64>,
        space: &SymplecticSpace,
    ) -> Result<Self> {
        space.check_dim(l.len())?;
        let (margins, ok) = cp_margins(&k, &mu, space)?;
        if !ok {
            return Err(Error::NotCP {
                min_eigenvalue: margins.min(),
                branch: margins.worst_branch(),
            });
        }
        let mu = (&mu + mu.transpose()) * 0.5;
        Ok(Self {
            space: space.clone(),
            k,
            l,
            mu,
        })
    }

    pub fn identity(space: &SymplecticSpace) -> Self {
        let n = space.dim();
        Self {
            space: space.clone(),
            k: DMatrix::identity(n, n),
            l: DVector::zeros(n),
            mu: DMatrix::zeros(n, n),
        }
    }

    /// Pure-loss channel `K = √τ·I`, `μ = ((1−τ)/2)·I` on every mode.
    pub fn attenuator(space: &SymplecticSpace, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::Domain {
                what: "transmissivity τ",
                constraint: "0 < τ ≤ 1",
                value: tau,
            });
        }
        let n = space.dim();
        Self::new(
            DMatrix::identity(n, n) * tau.sqrt(),
            DVector::zeros(n),
            DMatrix::identity(n, n) * ((1.0 - tau) / 2.0),
            space,
        )
    }

    /// Unitary displacement shifting every mean by `l`.
    pub fn displacement(space: &SymplecticSpace, l: DVector<f64>) -> Result<Self> {
        let n = space.dim();
        Self::new(DMatrix::identity(n, n), l, DMatrix::zeros(n, n), space)
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn l(&self) -> &DVector<f64> {
        &self.l
    }

    pub fn mu(&self) -> &DMatrix<f64> {
        &self.mu
    }

    pub fn cp_margins(&self) -> Result<CpMargins> {
        Ok(cp_margins(&self.k, &self.mu, &self.space)?.0)
    }

    pub fn det_k(&self) -> f64 {
        self.k.determinant()
    }

    /// `|det K|`, or `SingularK` when `K` is numerically singular.
    pub fn abs_det_k(&self) -> Result<f64> {
        let det = self.det_k();
        let scale = self.k.abs().max().max(1.0).powi(self.space.dim() as i32);
        if !(det.abs() > 1e-12 * scale) {
            return Err(Error::SingularK { det });
        }
        Ok(det.abs())
    }

    /// Covariance `KᵀαK + μ` and mean `Kᵀm + l` of the output state.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        self.space.check_dim(state.cov().nrows())?;
        let kt = self.k.transpose();
        let cov = &kt * state.cov() * &self.k + &self.mu;
        let mean = &kt * state.mean() + &self.l;
        GaussianState::new(mean, cov, &self.space)
    }

    /// The channel `next ∘ self` (apply `self` first).
    pub fn then(&self, next: &GaussianChannel) -> Result<GaussianChannel> {
        self.space.check_dim(next.k.nrows())?;
        let k2t = next.k.transpose();
        GaussianChannel::new(
            &self.k * &next.k,
            &k2t * &self.l + &next.l,
            &k2t * &self.mu * &next.k + &next.mu,
            &self.space,
        )
    }

    /// `‖Φ‖_{p→p} = |det K|^{1/p − 1}` for `p ∈ [1, ∞]`.
    pub fn norm_pp(&self, p: f64) -> Result<f64> {
        check_norm_exponent(p)?;
        let det = self.abs_det_k()?;
        if p == 1.0 {
            return Ok(1.0);
        }
        Ok(det.powf(1.0 / p - 1.0))
    }
}

fn check_norm_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::Domain {
            what: "p",
            constraint: "1 ≤ p ≤ ∞",
            value: p,
        });
    }
    Ok(())
}

fn check_descending(betas: &[f64]) -> Result<()> {
    if betas.is_empty()
        || betas.iter().any(|b| !(b.is_finite() && *b > 0.0))
        || betas.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::InvalidBetaGrid);
    }
    Ok(())
}

fn check_same_space(a: &SymplecticSpace, b: &SymplecticSpace) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(())
}

fn guard_overflow(state: &GaussianState) -> Result<()> {
    let d_max = state.symplectic_spectrum()?.into_iter().fold(0.0, f64::max);
    if d_max > OVERFLOW_CAP {
        return Err(Error::NumericalOverflow {
            value: d_max,
            cap: OVERFLOW_CAP,
        });
    }
    Ok(())
}

/// Achievability sweep along a Gibbs family.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub p: f64,
    pub betas: Vec<f64>,
    pub tr_in: Vec<f64>,
    pub tr_out: Vec<f64>,
    /// `Tr Φ[ρ_β]^p / Tr ρ_β^p`.
    pub ratios: Vec<f64>,
    /// `|det K|^{1−p}`.
    pub target: f64,
    /// `|ratio/target − 1|`.
    pub relative_errors: Vec<f64>,
    /// Log-log slopes of `‖ρ_β‖_p` and `‖Φ[ρ_β]‖_p` against `β`, when the
    /// sweep has at least two points.
    pub fitted_exponents: Option<(f64, f64)>,
}

impl ConvergenceReport {
    /// Whether the relative error decreases monotonically along the sweep.
    /// Reported, never assumed.
    pub fn monotone_convergence(&self) -> bool {
        self.relative_errors.windows(2).all(|w| w[1] <= w[0])
    }
}

pub fn ratio_sequence(
    channel: &GaussianChannel,
    family: &GibbsFamily,
    p: f64,
    betas: &[f64],
) -> Result<ConvergenceReport> {
    SpectralFunctions::new(p)?;
    check_descending(betas)?;
    check_same_space(channel.space(), family.space())?;
    let det = channel.abs_det_k()?;
    let target = if p == 1.0 { 1.0 } else { det.powf(1.0 - p) };

    let n = betas.len();
    let mut tr_in = Vec::with_capacity(n);
    let mut tr_out = Vec::with_capacity(n);
    let mut ratios = Vec::with_capacity(n);
    let mut relative_errors = Vec::with_capacity(n);
    let mut ln_beta = Vec::with_capacity(n);
    let mut ln_norm_in = Vec::with_capacity(n);
    let mut ln_norm_out = Vec::with_capacity(n);
    for &beta in betas {
        let rho = family.gibbs_state(beta)?;
        guard_overflow(&rho)?;
        let out = channel.apply(&rho)?;
        guard_overflow(&out)?;
        let ln_in = rho.ln_tr_rho_p(p)?;
        let ln_out = out.ln_tr_rho_p(p)?;
        let ratio = (ln_out - ln_in).exp();
        tr_in.push(ln_in.exp());
        tr_out.push(ln_out.exp());
        ratios.push(ratio);
        relative_errors.push((ratio / target - 1.0).abs());
        ln_beta.push(beta.ln());
        ln_norm_in.push(ln_in / p);
        ln_norm_out.push(ln_out / p);
    }
    let fitted_exponents = if n >= 2 {
        let a = least_squares(&ln_beta, &ln_norm_in)?;
        let b = least_squares(&ln_beta, &ln_norm_out)?;
        Some((a.slope, b.slope))
    } else {
        None
    };
    Ok(ConvergenceReport {
        p,
        betas: betas.to_vec(),
        tr_in,
        tr_out,
        ratios,
        target,
        relative_errors,
        fitted_exponents,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundReport {
    /// `‖Φ‖_{p→p}` from the determinant formula.
    pub bound: f64,
    /// `‖Φ[ρ]‖_p / ‖ρ‖_p` per input state.
    pub ratios: Vec<f64>,
    /// `1 − ratio/bound`; negative means the bound is exceeded.
    pub margins: Vec<f64>,
    pub passed: Vec<bool>,
    pub worst_margin: f64,
}

impl UpperBoundReport {
    pub fn violations(&self) -> usize {
        self.passed.iter().filter(|ok| !**ok).count()
    }
}

/// Tests `‖Φ[ρ]‖_p ≤ |det K|^{1/p−1} ‖ρ‖_p (1 + 10⁻¹⁰)` on each state.
pub fn upper_bound_check(
    channel: &GaussianChannel,
    states: &[GaussianState],
    p: f64,
) -> Result<UpperBoundReport> {
    let bound = channel.norm_pp(p)?;
    let mut ratios = Vec::with_capacity(states.len());
    let mut margins = Vec::with_capacity(states.len());
    let mut passed = Vec::with_capacity(states.len());
    for state in states {
        check_same_space(channel.space(), state.space())?;
        let out = channel.apply(state)?;
        let ratio = (out.ln_schatten_norm(p)? - state.ln_schatten_norm(p)?).exp();
        ratios.push(ratio);
        margins.push(1.0 - ratio / bound);
        passed.push(ratio <= bound * (1.0 + UPPER_BOUND_SLACK));
    }
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(UpperBoundReport {
        bound,
        ratios,
        margins,
        passed,
        worst_margin,
    })
}

fn check_decades(betas: &[f64], required: f64) -> Result<()> {
    let hi = betas.iter().copied().fold(f64::MIN, f64::max);
    let lo = betas.iter().copied().fold(f64::MAX, f64::min);
    let actual = (hi / lo).log10();
    if actual < required - 1e-9 {
        return Err(Error::InsufficientRange { required, actual });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub fit: LinearFit,
    /// `s(p−1)/p`.
    pub expected: f64,
}

/// Log-log slope of `‖ρ_β‖_p` against `β`.
pub fn scaling_exponent(family: &GibbsFamily, p: f64, betas: &[f64]) -> Result<ScalingFit> {
    SpectralFunctions::new(p)?;
    check_descending(betas)?;
    check_decades(betas, 2.0)?;
    let mut xs = Vec::with_capacity(betas.len());
    let mut ys = Vec::with_capacity(betas.len());
    for &beta in betas {
        let rho = family.gibbs_state(beta)?;
        guard_overflow(&rho)?;
        xs.push(beta.ln());
        ys.push(rho.ln_schatten_norm(p)?);
    }
    let s = family.space().modes() as f64;
    Ok(ScalingFit {
        fit: least_squares(&xs, &ys)?,
        expected: s * (p - 1.0) / p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Diverges,
    Bounded,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Diverges => "diverges",
            Verdict::Bounded => "bounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub fit: LinearFit,
    /// `s(1/p − 1/q)`.
    pub expected: f64,
    /// `‖Φ[ρ_β]‖_q / ‖ρ_β‖_p` along the sweep.
    pub ratios: Vec<f64>,
    /// Ratios increase strictly over the last decade of the sweep.
    pub monotone_tail: bool,
    pub verdict: Verdict,
}

/// Slope threshold below which a `q → p` ratio is called divergent.
pub const DIVERGENCE_SLOPE: f64 = -1e-3;

/// Fits `log(‖Φ[ρ_β]‖_q / ‖ρ_β‖_p)` against `log β` for `q < p`.
pub fn divergence_exponent(
    channel: &GaussianChannel,
    family: &GibbsFamily,
    q: f64,
    p: f64,
    betas: &[f64],
) -> Result<DivergenceReport> {
    check_norm_exponent(q)?;
    check_norm_exponent(p)?;
    if !(q < p) {
        return Err(Error::QNotLessThanP { q, p });
    }
    check_descending(betas)?;
    check_decades(betas, 2.0)?;
    check_same_space(channel.space(), family.space())?;
    channel.abs_det_k()?;

    let mut xs = Vec::with_capacity(betas.len());
    let mut ys = Vec::with_capacity(betas.len());
    for &beta in betas {
        let rho = family.gibbs_state(beta)?;
        guard_overflow(&rho)?;
        let out = channel.apply(&rho)?;
        xs.push(beta.ln());
        ys.push(out.ln_schatten_norm(q)? - rho.ln_schatten_norm(p)?);
    }
    let fit = least_squares(&xs, &ys)?;
    let ratios: Vec<f64> = ys.iter().map(|y| y.exp()).collect();

    let beta_min = betas[betas.len() - 1];
    let tail: Vec<f64> = betas
        .iter()
        .zip(&ratios)
        .filter(|(b, _)| **b <= 10.0 * beta_min * (1.0 + 1e-12))
        .map(|(_, r)| *r)
        .collect();
    let monotone_tail = tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]);
    let verdict = if fit.slope < DIVERGENCE_SLOPE && monotone_tail {
        Verdict::Diverges
    } else {
        Verdict::Bounded
    };
    let s = family.space().modes() as f64;
    let inv = |x: f64| if x == f64::INFINITY { 0.0 } else { 1.0 / x };
    Ok(DivergenceReport {
        fit,
        expected: s * (inv(p) - inv(q)),
        ratios,
        monotone_tail,
        verdict,
    })
}
