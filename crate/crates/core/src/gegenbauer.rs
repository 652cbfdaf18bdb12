//! The working basis `f_n(t) = C_n^{(2)}(t/2)` on `[-2, 2]`.
//!
//! The basis satisfies `(n+1) f_{n+1} = (n+2) t f_n - (n+3) f_{n-1}` with
//! `f_0 = 1`, `f_1 = 2t`, is orthogonal for the weight `(4 - t²)^{3/2}` with
//! `∫ f_n f_m (4-t²)^{3/2} dt = 2π(n+1)(n+3) δ_{nm}`, and its semicircle
//! averages are `(1/2π) ∫ f_n sqrt(4-t²) dt = 1` for even `n`, `0` for odd.
//!
//! Monomials expand with nonnegative coefficients,
//! `t f_n = [(n+1) f_{n+1} + (n+3) f_{n-1}] / (n+2)`, so the Taylor to basis
//! map is a sum of positive terms and is numerically benign even at high
//! degree. The reverse map goes through the (alternating) power coefficients
//! of `f_n`.

use crate::error::{Error, Result};
use crate::exact::{from_f64, to_f64, Coefficient};
use crate::quadrature::{gegenbauer2_rule, semicircle_rule};
use num_complex::Complex64;
use num_rational::BigRational;
use std::f64::consts::{E, PI};
use std::path::Path;

/// Degree up to which basis conversions of `f64` input run in exact
/// rational arithmetic.
pub const EXACT_CONVERSION_DEGREE: usize = 40;

/// `f_0(t), …, f_max(t)` by the three-term recurrence.
pub fn basis_values<T: Coefficient>(max_order: usize, t: &T) -> Vec<T> {
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(T::one());
    if max_order == 0 {
        return out;
    }
    out.push(T::from_count(2) * t.clone());
    for n in 1..max_order {
        let next = (T::from_count(n + 2) * t.clone() * out[n].clone()
            - T::from_count(n + 3) * out[n - 1].clone())
            / T::from_count(n + 1);
        out.push(next);
    }
    out
}

pub fn eval_fn(order: usize, t: f64) -> f64 {
    basis_values(order, &t)[order]
}

pub fn eval_fn_complex(order: usize, z: Complex64) -> Complex64 {
    basis_values(order, &z)[order]
}

/// Values and first two derivatives of `f_0..f_max` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisDerivs<T> {
    pub values: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

/// Differentiated recurrences:
/// `(n+1) f'_{n+1} = (n+2)(f_n + t f'_n) - (n+3) f'_{n-1}` and
/// `(n+1) f''_{n+1} = (n+2)(2 f'_n + t f''_n) - (n+3) f''_{n-1}`.
pub fn basis_with_derivs<T: Coefficient>(max_order: usize, t: &T) -> BasisDerivs<T> {
    let values = basis_values(max_order, t);
    let mut d1 = vec![T::zero(); max_order + 1];
    let mut d2 = vec![T::zero(); max_order + 1];
    if max_order >= 1 {
        d1[1] = T::from_count(2);
    }
    for n in 1..max_order {
        let (a, b, c) = (T::from_count(n + 2), T::from_count(n + 3), T::from_count(n + 1));
        d1[n + 1] = (a.clone() * (values[n].clone() + t.clone() * d1[n].clone())
            - b.clone() * d1[n - 1].clone())
            / c.clone();
        d2[n + 1] = (a * (T::from_count(2) * d1[n].clone() + t.clone() * d2[n].clone())
            - b * d2[n - 1].clone())
            / c;
    }
    BasisDerivs { values, d1, d2 }
}

pub fn eval_fn_deriv(order: usize, t: f64) -> (f64, f64) {
    let b = basis_with_derivs(order, &t);
    (b.values[order], b.d1[order])
}

/// Power coefficients of `f_0..f_max`: row `n` holds `f_n` as `Σ_k c_k t^k`.
pub fn power_coefficients<T: Coefficient>(max_order: usize) -> Vec<Vec<T>> {
    let mut rows: Vec<Vec<T>> = vec![vec![T::one()]];
    if max_order == 0 {
        return rows;
    }
    rows.push(vec![T::zero(), T::from_count(2)]);
    for n in 1..max_order {
        let mut next = vec![T::zero(); n + 2];
        for (k, c) in rows[n].iter().enumerate() {
            next[k + 1] = next[k + 1].clone() + T::from_count(n + 2) * c.clone();
        }
        for (k, c) in rows[n - 1].iter().enumerate() {
            next[k] = next[k].clone() - T::from_count(n + 3) * c.clone();
        }
        let div = T::from_count(n + 1);
        rows.push(next.into_iter().map(|c| c / div.clone()).collect());
    }
    rows
}

/// Basis coefficients of `Σ_k coeffs[k] t^k`.
pub fn monomials_to_basis<T: Coefficient>(coeffs: &[T]) -> Vec<T> {
    let d = coeffs.len();
    if d == 0 {
        return Vec::new();
    }
    let mut out = vec![T::zero(); d];
    // row holds t^k in the basis; advance with t·f_n = ((n+1) f_{n+1} + (n+3) f_{n-1}) / (n+2)
    let mut row = vec![T::one()];
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            for (n, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    out[n] = out[n].clone() + c.clone() * r.clone();
                }
            }
        }
        if k + 1 == d {
            break;
        }
        let mut next = vec![T::zero(); row.len() + 1];
        for (n, r) in row.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let den = T::from_count(n + 2);
            next[n + 1] = next[n + 1].clone() + r.clone() * T::from_count(n + 1) / den.clone();
            if n > 0 {
                next[n - 1] = next[n - 1].clone() + r.clone() * T::from_count(n + 3) / den;
            }
        }
        row = next;
    }
    out
}

/// Monomial coefficients of `Σ_n coeffs[n] f_n`.
pub fn basis_to_monomials<T: Coefficient>(coeffs: &[T]) -> Vec<T> {
    if coeffs.is_empty() {
        return Vec::new();
    }
    let rows = power_coefficients::<T>(coeffs.len() - 1);
    let mut out = vec![T::zero(); coeffs.len()];
    for (a, row) in coeffs.iter().zip(&rows) {
        if a.is_zero() {
            continue;
        }
        for (k, c) in row.iter().enumerate() {
            out[k] = out[k].clone() + a.clone() * c.clone();
        }
    }
    out
}

/// Taylor coefficients `α_n = f^{(n)}(0)/n!` of an entire function.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    pub coeffs: Vec<f64>,
    /// Type `σ_f` when known (order two: `|f(z)| ≤ C e^{(σ+ε)|z|²}`).
    pub type_hint: Option<f64>,
    /// The coefficient list is the whole expansion (a polynomial).
    pub complete: bool,
}

impl TaylorSeries {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs,
            type_hint: Some(0.0),
            complete: true,
        }
    }

    /// Leading coefficients of a non-polynomial entire function.
    pub fn entire(coeffs: Vec<f64>, type_hint: Option<f64>) -> Self {
        Self {
            coeffs,
            type_hint,
            complete: false,
        }
    }

    pub fn monomial(p: usize) -> Self {
        let mut c = vec![0.0; p + 1];
        c[p] = 1.0;
        Self::polynomial(c)
    }

    /// Parses the coefficient file format: one real per data line, the
    /// n-th data line holding `α_{n-1}`; blank lines and lines starting with
    /// `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let v: f64 = s.parse().map_err(|e: std::num::ParseFloatError| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "coefficient is not finite".into(),
                });
            }
            coeffs.push(v);
        }
        if coeffs.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no coefficients".into(),
            });
        }
        Ok(Self::entire(coeffs, None))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Advisory type estimate `max_{n ≥ 10} (n/2e) |α_n|^{2/n}`.
    pub fn estimate_type(&self) -> Option<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(10)
            .filter(|(_, &c)| c != 0.0)
            .map(|(n, &c)| n as f64 / (2.0 * E) * c.abs().powf(2.0 / n as f64))
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    }
}

/// Coefficients `a_0..a_M` of `Σ a_n f_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GegenbauerSeries {
    pub coeffs: Vec<f64>,
    pub truncation: usize,
    /// Certified bound on `sup_{|z|≤3} |f(z) - Σ_{n≤M} a_n f_n(z)|`;
    /// `Some(0.0)` for exact polynomials, `None` once the bound is no longer
    /// tracked.
    pub tail_bound: Option<f64>,
    pub type_hint: Option<f64>,
}

impl GegenbauerSeries {
    /// Exact finite series.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self {
            truncation: coeffs.len() - 1,
            coeffs,
            tail_bound: Some(0.0),
            type_hint: Some(0.0),
        }
    }

    /// The basis element `e_n` (the function `f_n`).
    pub fn basis(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::from_coeffs(c)
    }

    pub fn is_exact(&self) -> bool {
        self.tail_bound == Some(0.0)
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let basis = basis_values(self.coeffs.len().saturating_sub(1), &t);
        self.coeffs.iter().zip(&basis).map(|(a, f)| a * f).sum()
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let basis = basis_values(self.coeffs.len().saturating_sub(1), &z);
        self.coeffs.iter().zip(&basis).map(|(a, f)| f * *a).sum()
    }

    pub fn linear_combination(a: f64, g: &Self, b: f64, h: &Self) -> Self {
        let len = g.coeffs.len().max(h.coeffs.len());
        let at = |s: &Self, i: usize| s.coeffs.get(i).copied().unwrap_or(0.0);
        let coeffs = (0..len).map(|i| a * at(g, i) + b * at(h, i)).collect();
        let tail_bound = match (g.tail_bound, h.tail_bound) {
            (Some(x), Some(y)) => Some(a.abs() * x + b.abs() * y),
            _ => None,
        };
        Self {
            truncation: len - 1,
            coeffs,
            tail_bound,
            type_hint: None,
        }
    }
}

fn convert_f64(coeffs: &[f64], forward: bool) -> Vec<f64> {
    if coeffs.len() <= EXACT_CONVERSION_DEGREE + 1 {
        let exact: Vec<BigRational> = coeffs.iter().map(|&c| from_f64(c)).collect();
        let out = if forward {
            monomials_to_basis(&exact)
        } else {
            basis_to_monomials(&exact)
        };
        out.iter().map(to_f64).collect()
    } else if forward {
        monomials_to_basis(coeffs)
    } else {
        basis_to_monomials(coeffs)
    }
}

/// Exact change of basis for a polynomial: `Σ a_n f_n ≡ Σ α_k t^k`.
pub fn taylor_to_gegenbauer(f: &TaylorSeries) -> GegenbauerSeries {
    let d = f.degree();
    let mut g = GegenbauerSeries::from_coeffs(convert_f64(&f.coeffs[..=d.min(f.coeffs.len() - 1)], true));
    g.type_hint = f.type_hint;
    g
}

pub fn gegenbauer_to_taylor(g: &GegenbauerSeries) -> TaylorSeries {
    TaylorSeries::polynomial(convert_f64(&g.coeffs, false))
}

/// Basis coefficients by projection,
/// `a_n = ∫ P f_n (4-t²)^{3/2} dt / (2π(n+1)(n+3))`, with a Gauss rule that
/// is exact for the polynomial integrand.
pub fn project_taylor(f: &TaylorSeries, max_order: usize) -> Vec<f64> {
    let d = f.coeffs.len().saturating_sub(1);
    let count = (d + max_order) / 2 + 2;
    let rule = gegenbauer2_rule(count).expect("count at least two");
    let values: Vec<(f64, Vec<f64>)> = rule
        .nodes
        .iter()
        .map(|&t| (f.eval(t), basis_values(max_order, &t)))
        .collect();
    (0..=max_order)
        .map(|n| {
            let s: f64 = values
                .iter()
                .zip(&rule.weights)
                .map(|((p, fs), w)| w * p * fs[n])
                .sum();
            s / (2.0 * PI * ((n + 1) * (n + 3)) as f64)
        })
        .collect()
}

/// Growth constant `C_f = max_n |α_n| / (2eσ/n)^{n/2}`, checking that the
/// stored coefficients obey the Cauchy-type bound for type `σ`.
///
/// Past index 10, a ratio more than `10³` times the largest ratio among
/// indices `k ≤ n/2` is reported as a violation at `n`: a wrong type makes
/// the ratios grow geometrically, while a correct one only lets them rise
/// to a bounded peak.
pub fn growth_constant(f: &TaylorSeries, sigma: f64) -> Result<f64> {
    const HEAD: usize = 10;
    const SLACK: f64 = 1e3;
    if !(sigma > 0.0) || !sigma.is_finite() || sigma > 150.0 {
        return Err(Error::InvalidParameter(format!(
            "type must lie in (0, 150], got {sigma}"
        )));
    }
    let ln_ratio: Vec<f64> = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            if c == 0.0 {
                f64::NEG_INFINITY
            } else if n == 0 {
                c.abs().ln()
            } else {
                c.abs().ln() - 0.5 * n as f64 * (2.0 * E * sigma / n as f64).ln()
            }
        })
        .collect();
    // prefix[k] = max(0, ln r_0, …, ln r_k)
    let prefix: Vec<f64> = ln_ratio
        .iter()
        .scan(0.0f64, |m, &r| {
            *m = m.max(r);
            Some(*m)
        })
        .collect();
    for n in HEAD + 1..ln_ratio.len() {
        let limit = prefix[n / 2] + SLACK.ln();
        if ln_ratio[n] > limit {
            return Err(Error::GrowthViolation {
                index: n,
                sigma,
                ratio: ln_ratio[n].exp(),
                limit: limit.exp(),
            });
        }
    }
    let overall = ln_ratio.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(if overall.is_finite() { overall.exp() } else { 0.0 })
}

/// `ln Σ_{k≥n} (8eσ/k)^{k/2}` (the `k = 0` term is 1), summed in log space.
fn ln_majorant_tail_sum(sigma: f64, n: usize) -> f64 {
    let ln_term = |k: usize| -> f64 {
        if k == 0 {
            0.0
        } else {
            0.5 * k as f64 * (8.0 * E * sigma / k as f64).ln()
        }
    };
    let mut acc = ln_term(n);
    let mut k = n + 1;
    loop {
        let t = ln_term(k);
        acc = log_add(acc, t);
        let q = (8.0 * E * sigma / (k + 1) as f64).sqrt();
        if q < 0.5 && t < acc - 45.0 {
            // geometric remainder with ratio ≤ q
            return log_add(acc, t + (q / (1.0 - q)).ln());
        }
        k += 1;
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Majorant `|a_n| ≤ C_f √3 Σ_{k≥n}(8eσ/k)^{k/2} / sqrt((n+1)(n+3))`.
pub fn coefficient_majorant(growth: f64, sigma: f64, n: usize) -> f64 {
    ln_coefficient_majorant(growth, sigma, n).exp()
}

fn ln_coefficient_majorant(growth: f64, sigma: f64, n: usize) -> f64 {
    growth.ln() + 0.5 * 3f64.ln() + ln_majorant_tail_sum(sigma, n)
        - 0.5 * (((n + 1) * (n + 3)) as f64).ln()
}

/// `ln sup_{|z|≤3} |f_n(z)|` for `n = 0..=max_order`.
///
/// The power coefficients of `f_n` alternate in sign along steps of two, so
/// the supremum is `|f_n(3i)| = U_n` with `U_0 = 1`, `U_1 = 6` and
/// `(n+1) U_{n+1} = 3(n+2) U_n + (n+3) U_{n-1}`. The ratios `U_{n+1}/U_n`
/// decrease towards `(3 + √13)/2`.
pub fn ln_sup_on_disk3(max_order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(0.0);
    if max_order == 0 {
        return out;
    }
    out.push(6f64.ln());
    // ratio ρ_n = U_n / U_{n-1}
    let mut rho = 6.0;
    for n in 1..max_order {
        let next = (3.0 * (n + 2) as f64 + (n + 3) as f64 / rho) / (n + 1) as f64;
        out.push(out[n] + next.ln());
        rho = next;
    }
    out
}

/// Certified bounds `B_n = |a_n|_bound · sup_{|z|≤3}|f_n|` and the smallest
/// truncation `M` whose tail `Σ_{n>M} B_n` is at most `budget`.
fn certified_truncation(growth: f64, sigma: f64, budget: f64) -> Result<(usize, f64)> {
    const CAP: usize = 4000;
    let ln_sup = ln_sup_on_disk3(CAP + 1);
    let mut b = Vec::new();
    let mut n = 0;
    let remainder_ratio;
    loop {
        let ln_b = ln_coefficient_majorant(growth, sigma, n) + ln_sup[n];
        b.push(ln_b.exp());
        // B_{k+1}/B_k ≤ sqrt(8eσ/(k+1)) · U_{k+1}/U_k for every k ≥ n
        let ratio = (8.0 * E * sigma / (n + 1) as f64).sqrt() * (ln_sup[n + 1] - ln_sup[n]).exp();
        if ratio <= 0.5 && ln_b <= (1e-3 * budget).ln() {
            remainder_ratio = ratio;
            break;
        }
        if n == CAP {
            return Err(Error::SeriesTail {
                bound: f64::INFINITY,
                tol: budget,
            });
        }
        n += 1;
    }
    let last = *b.last().expect("nonempty");
    let mut tail = vec![0.0; b.len()];
    let mut acc = last * remainder_ratio / (1.0 - remainder_ratio);
    for m in (0..b.len()).rev() {
        tail[m] = acc;
        acc += b[m];
    }
    let m = tail.iter().position(|&t| t <= budget).expect("last entry meets budget");
    Ok((m, tail[m]))
}

/// `sup_{|z|≤3} |f - P_d|` for the Taylor polynomial `P_d` of a function
/// with growth constant `C_f`: `C_f Σ_{k>d} (18eσ/k)^{k/2}`.
fn taylor_remainder_bound(growth: f64, sigma: f64, degree: usize) -> f64 {
    let ln_term = |k: usize| 0.5 * k as f64 * (18.0 * E * sigma / k as f64).ln();
    let mut acc = f64::NEG_INFINITY;
    let mut k = degree + 1;
    loop {
        let t = ln_term(k);
        acc = log_add(acc, t);
        let q = (18.0 * E * sigma / (k + 1) as f64).sqrt();
        if q < 0.5 && t < acc - 45.0 {
            acc = log_add(acc, t + (q / (1.0 - q)).ln());
            break;
        }
        k += 1;
    }
    (growth.ln() + acc).exp()
}

/// Basis expansion of an entire function of order two with type `sigma`.
pub fn expand_entire(f: &TaylorSeries, sigma: f64, tol: f64) -> Result<GegenbauerSeries> {
    expand_entire_to(f, sigma, tol, 0)
}

/// As [`expand_entire`], storing at least `min_truncation + 1` coefficients.
///
/// Polynomials (complete Taylor lists) convert exactly with a zero tail.
/// Otherwise the growth precondition is checked and the coefficients come
/// from the exact change of basis applied to the stored Taylor polynomial
/// `P_d`. The certified error splits into the Taylor remainder
/// `sup_{|z|≤3}|f - P_d|` and the dropped basis terms `Σ_{n>M} B_n`; `M` is
/// the smallest index for which the two together stay below `tol`, and
/// too short a Taylor list is reported as [`Error::SeriesTail`].
pub fn expand_entire_to(
    f: &TaylorSeries,
    sigma: f64,
    tol: f64,
    min_truncation: usize,
) -> Result<GegenbauerSeries> {
    if f.coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("Taylor coefficient"));
    }
    if f.complete {
        let mut g = taylor_to_gegenbauer(f);
        if g.coeffs.len() <= min_truncation {
            g.coeffs.resize(min_truncation + 1, 0.0);
            g.truncation = min_truncation;
        }
        return Ok(g);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let growth = growth_constant(f, sigma)?;
    let remainder = taylor_remainder_bound(growth, sigma, f.coeffs.len() - 1);
    if !(remainder < tol) {
        return Err(Error::SeriesTail {
            bound: remainder,
            tol,
        });
    }
    let (m, tail) = certified_truncation(growth, sigma, tol - remainder)?;
    let truncation = m.max(min_truncation);
    let mut coeffs = convert_f64(&f.coeffs, true);
    coeffs.resize(truncation + 1, 0.0);
    Ok(GegenbauerSeries {
        coeffs,
        truncation,
        tail_bound: Some(remainder + tail),
        type_hint: Some(sigma),
    })
}

/// `(1/2π) ∫_{-2}^{2} g(s) sqrt(4 - s²) ds = Σ_{n even} a_n`.
pub fn semicircle_functional(g: &GegenbauerSeries) -> f64 {
    semicircle_coeffs(&g.coeffs)
}

pub fn semicircle_coeffs<T: Coefficient>(coeffs: &[T]) -> T {
    coeffs
        .iter()
        .step_by(2)
        .fold(T::zero(), |acc, a| acc + a.clone())
}

/// The same functional by direct Gauss quadrature of the series.
pub fn semicircle_functional_quadrature(g: &GegenbauerSeries) -> f64 {
    let rule = semicircle_rule(g.coeffs.len() / 2 + 2).expect("positive count");
    rule.integrate(|t| g.eval(t)) / (2.0 * PI)
}

/// `∫_{-2}^{2} f_n f_m (4 - t²)^{3/2} dt` by an exact Gauss rule.
pub fn normalization_check(n: usize, m: usize) -> f64 {
    let rule = gegenbauer2_rule((n + m) / 2 + 2).expect("count at least two");
    let top = n.max(m);
    rule.integrate(|t| {
        let f = basis_values(top, &t);
        f[n] * f[m]
    })
}

/// Parameters of `‖g‖_{c,K} = sup_n (n/K)^{cn} |a_n|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub c: f64,
    pub k: f64,
}

impl NormParams {
    pub fn new(c: f64, k: f64) -> Result<Self> {
        if !(c >= 0.5) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("norm exponent c must be ≥ 1/2, got {c}")));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!("norm radius K must be positive, got {k}")));
        }
        Ok(Self { c, k })
    }

    /// `ln (n/K)^{cn}` with the `n = 0` factor read as 1.
    pub fn ln_weight(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.c * n as f64 * (n as f64 / self.k).ln()
        }
    }
}

pub fn norm(g: &GegenbauerSeries, p: NormParams) -> f64 {
    norm_coeffs(&g.coeffs, p)
}

pub fn norm_coeffs(coeffs: &[f64], p: NormParams) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(n, a)| (p.ln_weight(n) + a.abs().ln()).exp())
        .fold(0.0, f64::max)
}

/// Outcome of comparing `|f_n|` and `|f'_n|` on a circle with the stated
/// bounds `2·max(r,3)^n` and `3·max(r,3)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub order: usize,
    pub radius: f64,
    pub max_value: f64,
    pub value_bound: f64,
    pub max_deriv: f64,
    pub deriv_bound: f64,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.max_value <= self.value_bound && self.max_deriv <= self.deriv_bound
    }

    /// `bound / observed` for the value part; below 1 means violated.
    pub fn value_margin(&self) -> f64 {
        self.value_bound / self.max_value
    }
}

/// Evaluates `f_n` and `f'_n` at 360 points of `|z| = radius`.
pub fn fn_bound_check(order: usize, radius: f64) -> BoundReport {
    let base = radius.max(3.0);
    let mut max_value = 0.0f64;
    let mut max_deriv = 0.0f64;
    for j in 0..360 {
        let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / 360.0);
        let b = basis_with_derivs(order, &z);
        max_value = max_value.max(b.values[order].norm());
        max_deriv = max_deriv.max(b.d1[order].norm());
    }
    BoundReport {
        order,
        radius,
        max_value,
        value_bound: 2.0 * base.powi(order as i32),
        max_deriv,
        deriv_bound: 3.0 * base.powi(order as i32),
    }
}

/// Relative residual of `d²/dx² T_{n+2}(x/2) = ((n+2)/2) f_n(x)`, with
/// `T_{n+2}` from its own recurrence, scaled by `max(1, |rhs|)`.
pub fn chebyshev_link_check(order: usize, t: f64) -> f64 {
    let u = 0.5 * t;
    let (mut v0, mut v1) = (1.0, u);
    let (mut d0, mut d1) = (0.0, 1.0);
    let (mut s0, mut s1) = (0.0, 0.0);
    for _ in 1..order + 2 {
        let v2 = 2.0 * u * v1 - v0;
        let d2 = 2.0 * v1 + 2.0 * u * d1 - d0;
        let s2 = 4.0 * d1 + 2.0 * u * s1 - s0;
        (v0, v1, d0, d1, s0, s1) = (v1, v2, d1, d2, s1, s2);
    }
    let lhs = 0.25 * s1;
    let rhs = 0.5 * (order + 2) as f64 * eval_fn(order, t);
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}
