//! Browser bindings for three operations of `gue-core`: the density curve,
//! the 1/N² resummation of `∫f p_N`, and the 1/N series of the Laplace
//! transform against its closed form.
//!
//! The plain functions carry the logic and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use gue_core::expansion::{polynomial_moment, resum};
use gue_core::gegenbauer::{expand_entire_to, taylor_to_gegenbauer, TaylorSeries};
use gue_core::hermite::DensityProfile;
use gue_core::laplace::{c_series, density_laplace, density_laplace_real};
use gue_core::verify::{exp_taylor, gauss_reference, gauss_taylor};
use gue_core::EnsembleSize;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

/// Largest N accepted from the page; keeps a single call well under a second.
pub const MAX_N: u32 = 512;

fn size(n: u32) -> Result<EnsembleSize, String> {
    if n > MAX_N {
        return Err(format!("N must be at most {MAX_N}"));
    }
    EnsembleSize::new(n).map_err(|e| e.to_string())
}

pub fn density_values(n: u32, from: f64, to: f64, points: usize) -> Result<Vec<f64>, String> {
    if points > 20_000 {
        return Err("at most 20000 points".into());
    }
    let prof = DensityProfile::uniform(size(n)?, from, to, points, false).map_err(|e| e.to_string())?;
    Ok(prof.values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResumData {
    pub alpha: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub reference: f64,
}

/// `family` is one of `exp`, `gauss`, `monomial` with parameter `a`, `σ`
/// or the power.
pub fn resum_data(n: u32, family: &str, param: f64, terms: usize) -> Result<ResumData, String> {
    let size = size(n)?;
    if terms > 40 {
        return Err("at most 40 terms".into());
    }
    let err = |e: gue_core::Error| e.to_string();
    let min_truncation = 4 * terms + 4;
    let (series, reference) = match family {
        "monomial" => {
            if !((0.0..=40.0).contains(&param) && param.fract() == 0.0) {
                return Err("monomial power must be an integer in 0..=40".into());
            }
            let p = param as usize;
            (taylor_to_gegenbauer(&TaylorSeries::monomial(p)), polynomial_moment(p, size))
        }
        "exp" => {
            if !(param.abs() <= 8.0) {
                return Err("exp parameter must lie in [-8, 8]".into());
            }
            let sigma = (param * param / 16.0).max(1.0 / 16.0);
            let taylor = TaylorSeries::entire(exp_taylor(param, 160 + (120.0 * sigma).ceil() as usize), None);
            let series = expand_entire_to(&taylor, sigma, 1e-13, min_truncation).map_err(err)?;
            (series, density_laplace_real(size, param).map_err(err)?)
        }
        "gauss" => {
            if !(param > 0.0 && param <= 2.0) {
                return Err("gauss parameter must lie in (0, 2]".into());
            }
            if 2.0 * param >= size.as_f64() {
                return Err("∫e^{σt²}p_N diverges for N ≤ 2σ".into());
            }
            let taylor = TaylorSeries::entire(gauss_taylor(param, 160 + (120.0 * param).ceil() as usize), Some(param));
            let series = expand_entire_to(&taylor, param, 1e-13, min_truncation).map_err(err)?;
            (series, gauss_reference(size, param).map_err(err)?)
        }
        other => return Err(format!("unknown family {other:?}")),
    };
    let r = resum(&series, size, terms, family);
    Ok(ResumData {
        alpha: r.alpha.values,
        partial_sums: r.partial_sums,
        reference,
    })
}

/// `[closed form, S_0, S_1, …, S_depth]` for `∫e^{st}p_N` at real `s`, where
/// `S_d = Σ_{l≤d} c_l(s) N^{-l}`.
pub fn laplace_series_values(n: u32, s: f64, depth: usize) -> Result<Vec<f64>, String> {
    let size = size(n)?;
    if !(s.abs() <= 2.0) {
        return Err("s must lie in [-2, 2]".into());
    }
    if depth > 12 {
        return Err("depth must be at most 12".into());
    }
    let sc = Complex64::from(s);
    let series = c_series(sc, depth, None, 1e-14).map_err(|e| e.to_string())?;
    let mut out = vec![density_laplace(size, sc).map_err(|e| e.to_string())?.re];
    out.extend((0..=depth).map(|d| series.partial_sum(size, d).re));
    Ok(out)
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
pub fn density_curve(n: u32, from: f64, to: f64, points: usize) -> Result<Vec<f64>, JsError> {
    density_values(n, from, to, points).map_err(js)
}

#[wasm_bindgen]
pub struct Resummed {
    data: ResumData,
}

#[wasm_bindgen]
impl Resummed {
    #[wasm_bindgen(getter)]
    pub fn alpha(&self) -> Vec<f64> {
        self.data.alpha.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn partial_sums(&self) -> Vec<f64> {
        self.data.partial_sums.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn reference(&self) -> f64 {
        self.data.reference
    }
}

#[wasm_bindgen]
pub fn resummation(n: u32, family: &str, param: f64, terms: usize) -> Result<Resummed, JsError> {
    resum_data(n, family, param, terms).map(|data| Resummed { data }).map_err(js)
}

#[wasm_bindgen]
pub fn laplace_series(n: u32, s: f64, depth: usize) -> Result<Vec<f64>, JsError> {
    laplace_series_values(n, s, depth).map_err(js)
}
