//! The closed family of test functions accepted by `resum`.

use gue_core::gegenbauer::{expand_entire_to, taylor_to_gegenbauer, GegenbauerSeries, TaylorSeries};
use gue_core::quadrature::{density_expectation_poly, integrate_line};
use gue_core::verify::{exp_taylor, gauss_reference, gauss_taylor};
use gue_core::{EnsembleSize, Result};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Certified accuracy of the basis expansion on `|z| ≤ 3`.
pub const EXPANSION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Monomial(usize),
    Exp(f64),
    /// `e^{σt²}`
    Gauss(f64),
    Cos(f64),
    TaylorFile(PathBuf),
}

impl FromStr for FunctionSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("expected KIND:VALUE, got {s:?}"))?;
        let real = |what: &str| -> std::result::Result<f64, String> {
            let v: f64 = arg.parse().map_err(|_| format!("{what} needs a real number, got {arg:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("{what} parameter must be finite"))
            }
        };
        match kind {
            "monomial" => arg
                .parse()
                .map(FunctionSpec::Monomial)
                .map_err(|_| format!("monomial needs a nonnegative integer power, got {arg:?}")),
            "exp" => real("exp").map(FunctionSpec::Exp),
            "cos" => real("cos").map(FunctionSpec::Cos),
            "gauss" => {
                let v = real("gauss")?;
                if v < 0.0 {
                    Err(format!("gauss needs σ ≥ 0, got {v}"))
                } else {
                    Ok(FunctionSpec::Gauss(v))
                }
            }
            "taylor-file" if !arg.is_empty() => Ok(FunctionSpec::TaylorFile(arg.into())),
            _ => Err(format!(
                "unknown function {s:?}; expected monomial:P, exp:A, gauss:SIGMA, cos:A or taylor-file:PATH"
            )),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Monomial(p) => write!(f, "monomial:{p}"),
            FunctionSpec::Exp(a) => write!(f, "exp:{a}"),
            FunctionSpec::Gauss(s) => write!(f, "gauss:{s}"),
            FunctionSpec::Cos(a) => write!(f, "cos:{a}"),
            FunctionSpec::TaylorFile(p) => write!(f, "taylor-file:{}", p.display()),
        }
    }
}

/// A spec turned into basis coefficients, with the type used to certify it.
pub struct Prepared {
    pub series: GegenbauerSeries,
    pub sigma: Option<f64>,
    taylor: TaylorSeries,
}

/// Type assumed for the order-one families `e^{at}` and `cos(at)`; any
/// positive type is valid, larger `|a|` needs a larger one to keep the growth
/// constant moderate.
fn order_one_type(a: f64) -> f64 {
    (a * a / 16.0).max(1.0 / 16.0)
}

fn taylor_degree(sigma: f64) -> usize {
    160 + (120.0 * sigma).ceil() as usize
}

fn cos_taylor(a: f64, degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    let mut c = 1.0;
    for j in 0..=degree / 2 {
        out[2 * j] = c;
        c *= -a * a / ((2 * j + 1) * (2 * j + 2)) as f64;
    }
    out
}

impl FunctionSpec {
    /// `terms` α-values will be requested; the expansion keeps the guard
    /// indices they need.
    pub fn prepare(&self, terms: usize, sigma_override: Option<f64>) -> Result<Prepared> {
        let min_truncation = 4 * terms + 4;
        let entire = |taylor: TaylorSeries, sigma: f64| -> Result<Prepared> {
            let series = expand_entire_to(&taylor, sigma, EXPANSION_TOL, min_truncation)?;
            Ok(Prepared {
                series,
                sigma: Some(sigma),
                taylor,
            })
        };
        match self {
            FunctionSpec::Monomial(p) => {
                let taylor = TaylorSeries::monomial(*p);
                Ok(Prepared {
                    series: taylor_to_gegenbauer(&taylor),
                    sigma: None,
                    taylor,
                })
            }
            FunctionSpec::Gauss(s) if *s == 0.0 => {
                let taylor = TaylorSeries::polynomial(vec![1.0]);
                Ok(Prepared {
                    series: taylor_to_gegenbauer(&taylor),
                    sigma: None,
                    taylor,
                })
            }
            FunctionSpec::Gauss(s) => {
                let sigma = sigma_override.unwrap_or(*s);
                entire(TaylorSeries::entire(gauss_taylor(*s, taylor_degree(sigma)), Some(*s)), sigma)
            }
            FunctionSpec::Exp(a) => {
                let sigma = sigma_override.unwrap_or_else(|| order_one_type(*a));
                entire(TaylorSeries::entire(exp_taylor(*a, taylor_degree(sigma)), None), sigma)
            }
            FunctionSpec::Cos(a) => {
                let sigma = sigma_override.unwrap_or_else(|| order_one_type(*a));
                entire(TaylorSeries::entire(cos_taylor(*a, taylor_degree(sigma)), None), sigma)
            }
            FunctionSpec::TaylorFile(path) => {
                let taylor = TaylorSeries::read_file(path)?;
                let sigma = sigma_override.or(taylor.type_hint).or_else(|| taylor.estimate_type());
                match sigma {
                    Some(sigma) if sigma > 0.0 => entire(taylor, sigma),
                    _ => {
                        // too few coefficients to estimate a type: treat the list as a polynomial
                        let taylor = TaylorSeries::polynomial(taylor.coeffs);
                        Ok(Prepared {
                            series: taylor_to_gegenbauer(&taylor),
                            sigma: None,
                            taylor,
                        })
                    }
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Monomial(p) => t.powi(*p as i32),
            FunctionSpec::Exp(a) => (a * t).exp(),
            FunctionSpec::Gauss(s) => (s * t * t).exp(),
            FunctionSpec::Cos(a) => (a * t).cos(),
            FunctionSpec::TaylorFile(_) => unreachable!("use the stored Taylor polynomial"),
        }
    }
}

impl Prepared {
    /// `∫ f p_N` by quadrature, independent of the expansion.
    pub fn reference(&self, spec: &FunctionSpec, n: EnsembleSize) -> Result<f64> {
        let p = |t: f64| gue_core::hermite::density(n, t);
        let nf = n.as_f64();
        let adaptive = |f: &dyn Fn(f64) -> f64, center: f64| -> Result<f64> {
            let scale = nf.sqrt().recip().max(1.0);
            let rough = integrate_line(f, center, scale, 1e-6)?.value;
            Ok(integrate_line(f, center, scale, 1e-14 * rough.abs().max(1e-3))?.value)
        };
        match spec {
            FunctionSpec::Monomial(deg) => density_expectation_poly(n, *deg, |t| spec.eval(t)),
            FunctionSpec::Gauss(s) if *s == 0.0 => Ok(1.0),
            FunctionSpec::Gauss(s) => {
                if 2.0 * s >= nf {
                    return Err(gue_core::Error::InvalidParameter(format!(
                        "∫e^{{σt²}}p_N diverges for N ≤ 2σ (N = {nf}, σ = {s})"
                    )));
                }
                gauss_reference(n, *s)
            }
            FunctionSpec::Exp(a) => adaptive(&|t| spec.eval(t) * p(t), a / nf),
            FunctionSpec::Cos(_) => adaptive(&|t| spec.eval(t) * p(t), 0.0),
            FunctionSpec::TaylorFile(_) => adaptive(&|t| self.taylor.eval(t) * p(t), 0.0),
        }
    }
}
