//! Symplectic conventions and the eigendecomposition-based matrix kernels.
//!
//! The phase space of `s` modes is ordered `(q₁, p₁, q₂, p₂, …)` and carries
//! the commutation form `Δ = ⊕ [[0, 1], [−1, 0]]`, so `Δ² = −I` and
//! `Δ⁻¹ = −Δ` hold exactly. Every matrix function used downstream (`abs`,
//! `cot`, `f_p`, `g_p`) is evaluated from a single complex eigendecomposition
//! `A = V Λ V⁻¹` followed by projection onto the real part.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Numerical tolerances shared by the matrix kernels. All are relative
/// unless noted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `‖A − Aᵀ‖ ≤ sym·‖A‖` for real symmetric inputs.
    pub sym: f64,
    /// `‖H − H*‖ ≤ herm·‖H‖` for Hermitian inputs.
    pub herm: f64,
    /// Imaginary-spectrum and ±pairing checks.
    pub spec: f64,
    /// Imaginary residual allowed after real projection.
    pub imag: f64,
    /// `‖A − VΛV⁻¹‖ ≤ reconstruct·‖A‖`.
    pub reconstruct: f64,
    /// Largest eigenvector condition estimate accepted.
    pub condition_cap: f64,
    /// PSD slack, scaled by `‖H‖`.
    pub psd: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        sym: 1e-10,
        herm: 1e-10,
        spec: 1e-8,
        imag: 1e-9,
        reconstruct: 1e-8,
        condition_cap: 1e8,
        psd: 1e-10,
    };

    /// Absolute PSD slack for a Hermitian matrix of the given norm.
    pub fn psd_slack(&self, norm: f64) -> f64 {
        self.psd * norm
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Phase space of `s` bosonic modes with its commutation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace {
    modes: usize,
    delta: DMatrix<f64>,
}

impl SymplecticSpace {
    /// Builds `Δ = ⊕ [[0, 1], [−1, 0]]` for `s ≥ 1` modes.
    pub fn standard(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ZeroModes);
        }
        let n = 2 * modes;
        let mut delta = DMatrix::zeros(n, n);
        for j in 0..modes {
            delta[(2 * j, 2 * j + 1)] = 1.0;
            delta[(2 * j + 1, 2 * j)] = -1.0;
        }
        Ok(Self { modes, delta })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Real dimension `2s`.
    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn delta(&self) -> &DMatrix<f64> {
        &self.delta
    }

    /// `Δ⁻¹ = −Δ`, exact in this basis.
    pub fn delta_inv(&self) -> DMatrix<f64> {
        -&self.delta
    }

    /// `(i/2)·Δ` as a complex matrix.
    pub fn half_i_delta(&self) -> DMatrix<Complex64> {
        self.delta.map(|x| Complex64::new(0.0, 0.5 * x))
    }

    pub(crate) fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual,
            });
        }
        Ok(())
    }
}

/// `‖A − Aᵀ‖_F / ‖A‖_F`, zero for the zero matrix.
pub fn relative_asymmetry(a: &DMatrix<f64>) -> f64 {
    let norm = a.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (a - a.transpose()).norm() / norm
}

/// Checks symmetry within `tol.sym`, returning the symmetrized matrix.
pub fn symmetrized(a: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let asymmetry = relative_asymmetry(a);
    if asymmetry > tol.sym {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok((a + a.transpose()) * 0.5)
}

/// Complex eigendecomposition `A = V Λ V⁻¹` of a real square matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<Complex64>,
    /// Columns normalized to unit Euclidean length.
    pub right_eigenvectors: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
    /// `‖V‖_F ‖V⁻¹‖_F / n`; equals 1 for unitary `V`.
    pub condition_estimate: f64,
    tol: Tolerances,
}

impl SpectralDecomposition {
    pub fn new(a: &DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                actual: a.ncols(),
            });
        }
        let n = a.nrows();
        let ac = a.map(|x| Complex64::new(x, 0.0));
        let schur = Schur::try_new(ac.clone(), f64::EPSILON, 100_000).ok_or(Error::SchurFailure)?;
        let (q, mut t) = schur.unpack();

        let t_norm = t.norm();
        for j in 0..n {
            for i in (j + 1)..n {
                if t[(i, j)].norm() > 1e-12 * t_norm.max(f64::MIN_POSITIVE) {
                    return Err(Error::SchurFailure);
                }
                t[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        let eigenvalues = DVector::from_iterator(n, (0..n).map(|i| t[(i, i)]));

        // Eigenvectors of the triangular factor by back-substitution; the
        // result is unit upper triangular, hence always invertible.
        let small = (f64::EPSILON * t_norm).max(f64::MIN_POSITIVE);
        let mut y = DMatrix::<Complex64>::identity(n, n);
        for k in 0..n {
            let lambda = t[(k, k)];
            for i in (0..k).rev() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in (i + 1)..=k {
                    acc += t[(i, j)] * y[(j, k)];
                }
                let mut denom = t[(i, i)] - lambda;
                if denom.norm() < small {
                    denom = Complex64::new(small, 0.0);
                }
                y[(i, k)] = -acc / denom;
            }
        }

        let mut v = q * y;
        for mut col in v.column_iter_mut() {
            let norm = col.norm();
            col /= Complex64::new(norm, 0.0);
        }
        let inverse = v.clone().try_inverse().ok_or(Error::NonDiagonalizable {
            condition: f64::INFINITY,
        })?;
        let condition_estimate = v.norm() * inverse.norm() / n.max(1) as f64;
        if !condition_estimate.is_finite() || condition_estimate > tol.condition_cap {
            return Err(Error::NonDiagonalizable {
                condition: condition_estimate,
            });
        }

        let reconstructed = &v * DMatrix::from_diagonal(&eigenvalues) * &inverse;
        let residual = (reconstructed - &ac).norm();
        if residual > tol.reconstruct * a.norm() {
            return Err(Error::NonDiagonalizable {
                condition: condition_estimate,
            });
        }

        Ok(Self {
            eigenvalues,
            right_eigenvectors: v,
            inverse,
            condition_estimate,
            tol: *tol,
        })
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.norm())
            .fold(0.0, f64::max)
    }

    /// Errors unless every eigenvalue satisfies `|Re λ| ≤ tol.spec·|λ|`.
    pub fn require_imaginary_spectrum(&self) -> Result<()> {
        let floor = 1e-14 * self.spectral_radius();
        for l in self.eigenvalues.iter() {
            if l.re.abs() > self.tol.spec * l.norm() + floor {
                return Err(Error::SpectrumNotImaginary { re: l.re, im: l.im });
            }
        }
        Ok(())
    }

    /// `Re(V f(Λ) V⁻¹)`, guarded by the imaginary-residual check.
    pub fn apply<F>(&self, f: F) -> Result<DMatrix<f64>>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let mut values = self.eigenvalues.clone();
        for (out, lambda) in values.iter_mut().zip(self.eigenvalues.iter()) {
            let fx = f(*lambda);
            if !(fx.re.is_finite() && fx.im.is_finite()) {
                return Err(Error::SpectralPole {
                    re: lambda.re,
                    im: lambda.im,
                });
            }
            *out = fx;
        }
        let m = &self.right_eigenvectors * DMatrix::from_diagonal(&values) * &self.inverse;
        let re = m.map(|z| z.re);
        let im = m.map(|z| z.im);
        let re_norm = re.norm();
        let im_norm = im.norm();
        if im_norm > self.tol.imag * re_norm {
            return Err(Error::ImagResidual {
                residual: if re_norm > 0.0 {
                    im_norm / re_norm
                } else {
                    f64::INFINITY
                },
            });
        }
        Ok(re)
    }
}

/// Evaluates `f(A)` through the complex eigendecomposition of `A`.
pub fn apply_spectral_function<F>(a: &DMatrix<f64>, f: F, tol: &Tolerances) -> Result<DMatrix<f64>>
where
    F: Fn(Complex64) -> Complex64,
{
    SpectralDecomposition::new(a, tol)?.apply(f)
}

/// `abs(A)` for a matrix with purely imaginary spectrum `±i d_j`.
pub fn matrix_abs(a: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let dec = SpectralDecomposition::new(a, tol)?;
    dec.require_imaginary_spectrum()?;
    dec.apply(|l| Complex64::new(l.norm(), 0.0))
}

/// Sorted moduli of a purely imaginary spectrum, one per `±i d` pair.
pub(crate) fn paired_moduli(dec: &SpectralDecomposition, tol: &Tolerances) -> Result<Vec<f64>> {
    dec.require_imaginary_spectrum()?;
    let mut upper: Vec<f64> = Vec::new();
    let mut lower: Vec<f64> = Vec::new();
    for l in dec.eigenvalues.iter() {
        if l.im > 0.0 {
            upper.push(l.norm());
        } else {
            lower.push(l.norm());
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::PairingFailure {
            mismatch: f64::INFINITY,
        });
    }
    upper.sort_by(f64::total_cmp);
    lower.sort_by(f64::total_cmp);
    let mut moduli = Vec::with_capacity(upper.len());
    for (a, b) in upper.iter().zip(&lower) {
        let mismatch = (a - b).abs() / a.max(*b).max(f64::MIN_POSITIVE);
        if mismatch > tol.spec {
            return Err(Error::PairingFailure { mismatch });
        }
        moduli.push(0.5 * (a + b));
    }
    Ok(moduli)
}

/// Symplectic eigenvalues `d₁ ≤ … ≤ d_s`: the moduli of the eigenvalues of
/// `Δ⁻¹α`, each counted once per `±i d` pair.
pub fn symplectic_spectrum(
    alpha: &DMatrix<f64>,
    space: &SymplecticSpace,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    space.check_dim(alpha.nrows())?;
    space.check_dim(alpha.ncols())?;
    let alpha = symmetrized(alpha, tol)?;
    let dec = SpectralDecomposition::new(&(space.delta_inv() * alpha), tol)?;
    paired_moduli(&dec, tol)
}

/// `exp(z) − 1` without cancellation for small `z`.
fn complex_expm1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin,
        z.re.exp() * z.im.sin(),
    )
}

/// Complex cotangent, NaN within round-off of a pole `kπ`.
pub fn cot(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    // cot z = i(w + 1)/(w − 1) with w = e^{2iz}, or the mirrored form with
    // w = e^{−2iz}; pick the one whose exponential does not overflow.
    let (m, sign) = if z.im >= 0.0 {
        (complex_expm1(2.0 * i * z), 1.0)
    } else {
        (complex_expm1(-2.0 * i * z), -1.0)
    };
    if m.norm() < 1e-13 {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    i * (Complex64::new(2.0, 0.0) + m) / m * sign
}

/// `cot(X)` for `X = βεΔ`, whose spectrum is purely imaginary.
pub fn matrix_cot(x: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let dec = SpectralDecomposition::new(x, tol)?;
    dec.require_imaginary_spectrum()?;
    dec.apply(cot)
}

/// Outcome of a Hermitian positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// Tests `λ_min(H) ≥ −slack` for a complex Hermitian `H`.
pub fn check_psd_hermitian(
    h: &DMatrix<Complex64>,
    slack: f64,
    tol: &Tolerances,
) -> Result<PsdCheck> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            actual: h.ncols(),
        });
    }
    let norm = h.norm();
    let deviation = if norm > 0.0 {
        (h - h.adjoint()).norm() / norm
    } else {
        0.0
    };
    if deviation > tol.herm {
        return Err(Error::NotHermitian { deviation });
    }
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eigenvalue = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(PsdCheck {
        is_psd: min_eigenvalue >= -slack,
        min_eigenvalue,
    })
}
