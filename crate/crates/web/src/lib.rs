//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! Each export returns a JSON string; the plain-Rust `*_data` functions do
//! the work so they can be tested natively.

use bgc_core::fit::geometric_grid;
use bgc_core::{
    divergence_exponent, f_p, g_p, ratio_sequence, scaling_exponent, GaussianChannel, GibbsFamily,
    SymplecticSpace,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct Convergence {
    pub betas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub rel_errors: Vec<f64>,
    pub target: f64,
    pub norm: f64,
}

/// Attenuator with transmissivity `tau` on `s` modes, isotropic Gibbs
/// inputs, sweep from 10⁻¹ down to `beta_stop`.
pub fn convergence_data(
    tau: f64,
    s: usize,
    p: f64,
    beta_stop: f64,
    points: usize,
) -> Result<Convergence, String> {
    let space = SymplecticSpace::standard(s).map_err(|e| e.to_string())?;
    let ch = GaussianChannel::attenuator(&space, tau).map_err(|e| e.to_string())?;
    let betas = geometric_grid(0.1, beta_stop, points).map_err(|e| e.to_string())?;
    let rep = ratio_sequence(&ch, &GibbsFamily::isotropic(&space), p, &betas)
        .map_err(|e| e.to_string())?;
    Ok(Convergence {
        norm: ch.norm_pp(p).map_err(|e| e.to_string())?,
        betas: rep.betas,
        ratios: rep.ratios,
        rel_errors: rep.relative_errors,
        target: rep.target,
    })
}

#[derive(Debug, Serialize)]
pub struct Scaling {
    pub betas: Vec<f64>,
    pub log_norms: Vec<f64>,
    pub slope: f64,
    pub expected: f64,
    /// `q → p` slope and verdict through the τ = ½ attenuator, when `q < p`.
    pub divergence: Option<(f64, String)>,
}

pub fn scaling_data(s: usize, p: f64, q: Option<f64>) -> Result<Scaling, String> {
    let space = SymplecticSpace::standard(s).map_err(|e| e.to_string())?;
    let fam = GibbsFamily::isotropic(&space);
    let betas = geometric_grid(0.1, 1e-5, 17).map_err(|e| e.to_string())?;
    let fit = scaling_exponent(&fam, p, &betas).map_err(|e| e.to_string())?;
    let log_norms = betas
        .iter()
        .map(|&b| fam.gibbs_state(b).and_then(|st| st.ln_schatten_norm(p)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let divergence = match q {
        Some(q) if q < p => {
            let ch = GaussianChannel::attenuator(&space, 0.5).map_err(|e| e.to_string())?;
            let rep = divergence_exponent(&ch, &fam, q, p, &betas).map_err(|e| e.to_string())?;
            Some((rep.fit.slope, rep.verdict.to_string()))
        }
        _ => None,
    };
    Ok(Scaling {
        betas,
        log_norms,
        slope: fit.fit.slope,
        expected: fit.expected,
        divergence,
    })
}

#[derive(Debug, Serialize)]
pub struct Curves {
    pub d: Vec<f64>,
    pub f: Vec<f64>,
    /// `d·g_p(d)`: symplectic eigenvalue of the normalized power.
    pub dg: Vec<f64>,
}

/// `f_p` and `d·g_p` on `d ∈ [½, d_max]`.
pub fn curves_data(p: f64, d_max: f64, points: usize) -> Result<Curves, String> {
    if d_max.is_nan() || d_max <= 0.5 || points < 2 {
        return Err("need d_max > 0.5 and at least 2 points".into());
    }
    let d: Vec<f64> = (0..points)
        .map(|i| 0.5 + (d_max - 0.5) * i as f64 / (points - 1) as f64)
        .collect();
    let f = d.iter().map(|&x| f_p(x, p)).collect::<Result<Vec<_>, _>>();
    let dg = d
        .iter()
        .map(|&x| g_p(x, p).map(|g| x * g))
        .collect::<Result<Vec<_>, _>>();
    Ok(Curves {
        f: f.map_err(|e| e.to_string())?,
        dg: dg.map_err(|e| e.to_string())?,
        d,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn convergence(
    tau: f64,
    s: usize,
    p: f64,
    beta_stop: f64,
    points: usize,
) -> Result<String, JsValue> {
    to_js(convergence_data(tau, s, p, beta_stop, points))
}

#[wasm_bindgen]
pub fn scaling(s: usize, p: f64, q: Option<f64>) -> Result<String, JsValue> {
    to_js(scaling_data(s, p, q))
}

#[wasm_bindgen]
pub fn curves(p: f64, d_max: f64, points: usize) -> Result<String, JsValue> {
    to_js(curves_data(p, d_max, points))
}
