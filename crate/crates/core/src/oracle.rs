//! Single-mode truncated Fock-space oracle.
//!
//! Everything here is computed by brute force on the basis `|0⟩ … |n_max⟩`
//! and shares no code path with the covariance-level formulas it checks.
//! Quadratures are `q̂ = (a + a†)/√2`, `p̂ = i(a† − a)/√2`, so `[q̂, p̂] = i`
//! on the interior block and `W(x, y) = exp(i(x q̂ + y p̂))`.
//!
//! Results that depend on truncation are recomputed at `2·n_max` and must
//! agree within `10 × tail_bound`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

type C64 = Complex<f64>;

fn max_modulus(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Default thermal tail bound.
pub const TAIL_BOUND: f64 = 1e-12;

/// Eigenvalues below this are clamped to zero before taking powers.
pub const EIGEN_CLAMP: f64 = 1e-15;

/// Dense operator on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub n_max: usize,
    pub matrix: DMatrix<C64>,
}

impl TruncatedOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows().max(2),
                actual: matrix.ncols(),
            });
        }
        Ok(Self {
            n_max: matrix.nrows() - 1,
            matrix,
        })
    }

    pub fn identity(n_max: usize) -> Self {
        Self {
            n_max,
            matrix: DMatrix::identity(n_max + 1, n_max + 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_max: self.n_max,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Embeds into a larger truncation, padding with zeros.
    pub fn padded(&self, n_max: usize) -> Self {
        let mut m = DMatrix::zeros(n_max + 1, n_max + 1);
        let k = self.dim().min(n_max + 1);
        m.view_mut((0, 0), (k, k))
            .copy_from(&self.matrix.view((0, 0), (k, k)));
        Self { n_max, matrix: m }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_max != other.n_max {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }

    /// Checks the density-operator invariants: Hermitian within `10⁻¹²`,
    /// unit trace within `10 × tail_bound`, eigenvalues `≥ −10⁻¹²`.
    /// Returns the (unclamped) eigenvalues.
    pub fn density_spectrum(&self) -> Result<Vec<f64>> {
        let dev = max_modulus(&(&self.matrix - self.matrix.adjoint()));
        if dev > 1e-12 {
            return Err(Error::NotDensityOperator {
                reason: format!("not Hermitian (deviation {dev:e})"),
            });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 10.0 * TAIL_BOUND || tr.im.abs() > 1e-12 {
            return Err(Error::NotDensityOperator {
                reason: format!("trace {tr} differs from 1"),
            });
        }
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let eig: Vec<f64> = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        if let Some(min) = eig.iter().copied().reduce(f64::min) {
            if min < -1e-12 {
                return Err(Error::NotDensityOperator {
                    reason: format!("negative eigenvalue {min:e}"),
                });
            }
        }
        Ok(eig)
    }
}

/// Annihilation and creation operators, `a|n⟩ = √n |n−1⟩`.
pub fn ladder_operators(n_max: usize) -> (TruncatedOperator, TruncatedOperator) {
    let n = n_max + 1;
    let mut a = DMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    let a_dag = a.adjoint();
    (
        TruncatedOperator { n_max, matrix: a },
        TruncatedOperator {
            n_max,
            matrix: a_dag,
        },
    )
}

/// `(q̂, p̂)` on the truncated space.
pub fn quadratures(n_max: usize) -> (TruncatedOperator, TruncatedOperator) {
    let (a, ad) = ladder_operators(n_max);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let q = (&a.matrix + &ad.matrix) * s;
    let p = (&ad.matrix - &a.matrix) * C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    (
        TruncatedOperator { n_max, matrix: q },
        TruncatedOperator { n_max, matrix: p },
    )
}

type QEigen = Rc<(DMatrix<f64>, DVector<f64>)>;

thread_local! {
    static Q_EIGEN: RefCell<HashMap<usize, QEigen>> = RefCell::new(HashMap::new());
}

/// Eigenvectors and eigenvalues of the real tridiagonal `q̂`, cached per
/// truncation.
fn q_eigen(n_max: usize) -> QEigen {
    Q_EIGEN.with(|cache| {
        cache
            .borrow_mut()
            .entry(n_max)
            .or_insert_with(|| {
                let n = n_max + 1;
                let mut q = DMatrix::<f64>::zeros(n, n);
                for k in 1..n {
                    let v = (k as f64 / 2.0).sqrt();
                    q[(k - 1, k)] = v;
                    q[(k, k - 1)] = v;
                }
                let eig = SymmetricEigen::new(q);
                Rc::new((eig.eigenvectors, eig.eigenvalues))
            })
            .clone()
    })
}

/// Truncated `exp(i(x q̂ + y p̂))` without a self-check.
///
/// With `x + iy = r e^{iθ}`, `x q̂ + y p̂ = U (r q̂) U†` for `U = e^{iθ N}`,
/// which holds exactly in the truncation; `q̂` is real tridiagonal.
fn weyl_raw(z: [f64; 2], n_max: usize) -> DMatrix<C64> {
    let n = n_max + 1;
    let r = z[0].hypot(z[1]);
    if r == 0.0 {
        return DMatrix::identity(n, n);
    }
    let theta = z[1].atan2(z[0]);
    let eig = q_eigen(n_max);
    let (v, lambda) = (&eig.0, &eig.1);
    let mut vc = v.clone();
    let mut vs = v.clone();
    for (l, &x) in lambda.iter().enumerate() {
        let (sin, cos) = (r * x).sin_cos();
        vc.column_mut(l).scale_mut(cos);
        vs.column_mut(l).scale_mut(sin);
    }
    let re = vc * v.transpose();
    let im = vs * v.transpose();
    // U exp(i r q) U† with U = diag(e^{iθk})
    DMatrix::from_fn(n, n, |j, k| {
        C64::new(re[(j, k)], im[(j, k)]) * C64::from_polar(1.0, theta * (j as f64 - k as f64))
    })
}

/// `Tr AB` in `O(n²)`.
fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum()
}

fn doubling_failure(n_max: usize, change: f64) -> Error {
    Error::TruncationInsufficient {
        n_max,
        change,
        suggested_n_max: 2 * n_max,
    }
}

/// Weyl operator `W(z)`, `z = (x, y)` in the `(q, p)` ordering.
///
/// The self-check compares the interior block `n ≤ n_max/2` against the
/// same block at `2·n_max`.
pub fn weyl_operator(z: [f64; 2], n_max: usize) -> Result<TruncatedOperator> {
    if n_max < 1 {
        return Err(Error::Domain {
            what: "n_max",
            constraint: "≥ 1",
            value: n_max as f64,
        });
    }
    let w = weyl_raw(z, n_max);
    let w2 = weyl_raw(z, 2 * n_max);
    let k = n_max / 2 + 1;
    let change = max_modulus(&(w.view((0, 0), (k, k)) - w2.view((0, 0), (k, k))));
    if change > 10.0 * TAIL_BOUND {
        return Err(doubling_failure(n_max, change));
    }
    Ok(TruncatedOperator { n_max, matrix: w })
}

/// Smallest `n_max` for which the thermal tail `(N/(N+1))^{n_max+1}` is
/// below `bound`.
pub fn thermal_n_max_for(mean_photons: f64, bound: f64) -> usize {
    if mean_photons <= 0.0 {
        return 1;
    }
    let r = mean_photons / (mean_photons + 1.0);
    ((bound.ln() / r.ln()).ceil() as usize).max(2) - 1
}

/// Default truncation: 80 for `N ≤ 1`, 160 for `N ≤ 3`, otherwise the
/// smallest level meeting the tail bound, rounded up to a multiple of 40.
pub fn default_n_max(mean_photons: f64) -> usize {
    if mean_photons <= 1.0 {
        80
    } else if mean_photons <= 3.0 {
        160
    } else {
        thermal_n_max_for(mean_photons, TAIL_BOUND).div_ceil(40) * 40
    }
}

/// Thermal populations `p_n = N^n/(N+1)^{n+1}` on `0..=n_max`, not
/// renormalized. Returns the operator and the discarded tail.
pub fn thermal_state_fock(mean_photons: f64, n_max: usize) -> Result<(TruncatedOperator, f64)> {
    if !(mean_photons >= 0.0 && mean_photons.is_finite()) {
        return Err(Error::Domain {
            what: "mean photon number N",
            constraint: "0 ≤ N < ∞",
            value: mean_photons,
        });
    }
    let r = mean_photons / (mean_photons + 1.0);
    let tail = r.powi(n_max as i32 + 1);
    if tail >= TAIL_BOUND {
        return Err(Error::TailTooLarge {
            tail,
            bound: TAIL_BOUND,
            suggested_n_max: thermal_n_max_for(mean_photons, TAIL_BOUND),
        });
    }
    let n = n_max + 1;
    let mut m = DMatrix::zeros(n, n);
    let mut pn = 1.0 / (mean_photons + 1.0);
    for k in 0..n {
        m[(k, k)] = C64::new(pn, 0.0);
        pn *= r;
    }
    Ok((TruncatedOperator { n_max, matrix: m }, tail))
}

/// `Σ λ^p` over the clamped spectrum.
pub fn tr_power_fock(rho: &TruncatedOperator, p: f64) -> Result<f64> {
    check_power(p)?;
    let eig = rho.density_spectrum()?;
    Ok(eig
        .into_iter()
        .filter(|l| *l >= EIGEN_CLAMP)
        .map(|l| l.powf(p))
        .sum())
}

fn check_power(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::Domain {
            what: "p",
            constraint: "1 ≤ p < ∞",
            value: p,
        });
    }
    Ok(())
}

/// `ρ^p` via Hermitian eigendecomposition, optionally divided by its trace.
pub fn matrix_power_fock(
    rho: &TruncatedOperator,
    p: f64,
    normalize: bool,
) -> Result<TruncatedOperator> {
    check_power(p)?;
    rho.density_spectrum()?;
    let herm = (&rho.matrix + rho.matrix.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let powered = eig
        .eigenvalues
        .map(|l| if l >= EIGEN_CLAMP { l.powf(p) } else { 0.0 });
    let total: f64 = powered.iter().sum();
    let scale = if normalize { 1.0 / total } else { 1.0 };
    let d = powered.map(|x| C64::new(x * scale, 0.0));
    let v = &eig.eigenvectors;
    Ok(TruncatedOperator {
        n_max: rho.n_max,
        matrix: v * DMatrix::from_diagonal(&d) * v.adjoint(),
    })
}

/// `Tr ρ W(z)`, checked against the same trace at `2·n_max`. Any trace-class
/// operator works, e.g. an unnormalized `ρ^p`.
pub fn char_function_fock(rho: &TruncatedOperator, z: [f64; 2]) -> Result<C64> {
    let value = trace_of_product(&rho.matrix, &weyl_raw(z, rho.n_max));
    let big = 2 * rho.n_max;
    let value2 = trace_of_product(&rho.padded(big).matrix, &weyl_raw(z, big));
    let change = (value - value2).norm();
    if change > 10.0 * TAIL_BOUND {
        return Err(doubling_failure(rho.n_max, change));
    }
    Ok(value)
}

/// `W(z) ρ W(z)†`.
pub fn displaced(rho: &TruncatedOperator, z: [f64; 2]) -> Result<TruncatedOperator> {
    let w = weyl_operator(z, rho.n_max)?;
    Ok(TruncatedOperator {
        n_max: rho.n_max,
        matrix: &w.matrix * &rho.matrix * w.matrix.adjoint(),
    })
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// Kraus operators of the pure-loss channel with transmissivity `τ`:
/// `⟨n−j|A_j|n⟩ = √C(n,j) τ^{(n−j)/2} (1−τ)^{j/2}`. For `τ = 1` only the
/// identity is returned.
pub fn attenuator_kraus(tau: f64, n_max: usize) -> Result<Vec<TruncatedOperator>> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Domain {
            what: "transmissivity τ",
            constraint: "0 < τ ≤ 1",
            value: tau,
        });
    }
    if tau == 1.0 {
        return Ok(vec![TruncatedOperator::identity(n_max)]);
    }
    let lf = ln_factorials(n_max);
    let n = n_max + 1;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut m = DMatrix::zeros(n, n);
        for k in j..n {
            let ln_binom = lf[k] - lf[j] - lf[k - j];
            let amp = (0.5 * ln_binom).exp()
                * tau.powf((k - j) as f64 / 2.0)
                * (1.0 - tau).powf(j as f64 / 2.0);
            m[(k - j, k)] = C64::new(amp, 0.0);
        }
        out.push(TruncatedOperator { n_max, matrix: m });
    }
    Ok(out)
}

/// `Σ_j A_j ρ A_j†`.
pub fn apply_kraus(
    kraus: &[TruncatedOperator],
    rho: &TruncatedOperator,
) -> Result<TruncatedOperator> {
    let n = rho.dim();
    let mut acc = DMatrix::<C64>::zeros(n, n);
    for a in kraus {
        a.check_same(rho)?;
        let nz: Vec<(usize, usize, C64)> = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .filter_map(|(i, j)| {
                let v = a.matrix[(i, j)];
                (v != C64::new(0.0, 0.0)).then_some((i, j, v))
            })
            .collect();
        if nz.len() * 8 > n * n {
            acc += &a.matrix * &rho.matrix * a.matrix.adjoint();
            continue;
        }
        // Sparse A: (Aρ)_il = Σ a_ij ρ_jl, then (AρA†)_ik = Σ (Aρ)_il conj(a_kl).
        let mut a_rho = DMatrix::<C64>::zeros(n, n);
        for &(i, j, v) in &nz {
            for l in 0..n {
                a_rho[(i, l)] += v * rho.matrix[(j, l)];
            }
        }
        for &(k, l, v) in &nz {
            let c = v.conj();
            for i in 0..n {
                acc[(i, k)] += a_rho[(i, l)] * c;
            }
        }
    }
    Ok(TruncatedOperator {
        n_max: rho.n_max,
        matrix: acc,
    })
}

/// First and second moments of a single-mode density operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub mean: [f64; 2],
    /// `α_jk = ½ Tr ρ {R_j − m_j, R_k − m_k}`.
    pub cov: [[f64; 2]; 2],
    /// Largest change in any moment when recomputed at `2·n_max`.
    pub truncation_change: f64,
}

impl FockMoments {
    /// Symplectic eigenvalue `√det α`.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        let c = self.cov;
        (c[0][0] * c[1][1] - c[0][1] * c[1][0]).sqrt()
    }
}

fn raw_moments(rho: &DMatrix<C64>, n_max: usize) -> ([f64; 2], [[f64; 2]; 2]) {
    let (q, p) = quadratures(n_max);
    let r = [q.matrix, p.matrix];
    let mut mean = [0.0; 2];
    for j in 0..2 {
        mean[j] = trace_of_product(rho, &r[j]).re;
    }
    let mut cov = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let sym = &r[j] * &r[k] + &r[k] * &r[j];
            cov[j][k] = 0.5 * trace_of_product(rho, &sym).re - mean[j] * mean[k];
        }
    }
    (mean, cov)
}

/// Means `Tr ρR_j` and symmetrized covariance, with a doubling check.
pub fn covariance_from_fock(rho: &TruncatedOperator) -> Result<FockMoments> {
    rho.density_spectrum()?;
    let (mean, cov) = raw_moments(&rho.matrix, rho.n_max);
    let big = 2 * rho.n_max;
    let (mean2, cov2) = raw_moments(&rho.padded(big).matrix, big);
    let mut change: f64 = 0.0;
    for j in 0..2 {
        change = change.max((mean[j] - mean2[j]).abs());
        for k in 0..2 {
            change = change.max((cov[j][k] - cov2[j][k]).abs());
        }
    }
    if change > 10.0 * TAIL_BOUND {
        return Err(doubling_failure(rho.n_max, change));
    }
    Ok(FockMoments {
        mean,
        cov,
        truncation_change: change,
    })
}
