//! Bilateral Laplace transforms of the kernel and the density.
//!
//! With `λ± ` the centre and half-difference of the kernel arguments,
//!
//! ```text
//! ∫ e^{sλ₊} K_N(λ₊+λ₋, λ₊-λ₋) dλ₊ = N e^{-Nλ₋²/2 + s²/(2N)} ₁F₁(1-N; 2 | Nλ₋² - s²/N)
//! ```
//!
//! and the density transform is the `λ₋ = 0` case divided by `N`. Expanding
//! the terminating ₁F₁ with Stirling numbers of the first kind gives a
//! convergent series in `1/N` whose odd coefficients cancel.

use crate::error::{Error, Result};
use crate::exact::{exp_series, int, Coefficient};
use crate::hermite::{kernel, EnsembleSize};
use crate::quadrature::integrate_line;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

/// `₁F₁(1-N; 2 | x) = Σ_{k<N} (1-N)_k x^k / ((2)_k k!)` by Horner.
pub fn hyp1f1_truncated<T: Coefficient>(n: EnsembleSize, x: &T) -> T {
    let top = n.as_usize() - 1;
    // ratio c_{k+1}/c_k = (1-N+k) / ((k+2)(k+1))
    let mut coeffs = Vec::with_capacity(top + 1);
    coeffs.push(T::one());
    for k in 0..top {
        let ratio = (T::zero() - T::from_count(top - k)) / T::from_count((k + 2) * (k + 1));
        let next = coeffs[k].clone() * ratio;
        coeffs.push(next);
    }
    coeffs
        .into_iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * x.clone() + c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEvaluation {
    pub n: EnsembleSize,
    pub s: Complex64,
    pub lambda_minus: f64,
    pub value: Complex64,
}

/// Closed-form kernel transform.
pub fn kernel_laplace(n: EnsembleSize, s: Complex64, lambda_minus: f64) -> Result<LaplaceEvaluation> {
    if !s.re.is_finite() || !s.im.is_finite() || !lambda_minus.is_finite() {
        return Err(Error::NonFinite("Laplace argument"));
    }
    let nf = n.as_f64();
    let lm2 = lambda_minus * lambda_minus;
    let x = Complex64::from(nf * lm2) - s * s / nf;
    let prefactor = (Complex64::from(-0.5 * nf * lm2) + s * s / (2.0 * nf)).exp();
    let value = prefactor * hyp1f1_truncated(n, &x) * nf;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite("kernel transform"));
    }
    Ok(LaplaceEvaluation {
        n,
        s,
        lambda_minus,
        value,
    })
}

/// `∫ e^{st} p_N(t) dt`.
pub fn density_laplace(n: EnsembleSize, s: Complex64) -> Result<Complex64> {
    Ok(kernel_laplace(n, s, 0.0)?.value / n.as_f64())
}

pub fn density_laplace_real(n: EnsembleSize, s: f64) -> Result<f64> {
    Ok(density_laplace(n, Complex64::from(s))?.re)
}

/// The kernel transform by adaptive quadrature of the defining integral,
/// to absolute tolerance `tol` on each of the real and imaginary parts.
pub fn kernel_laplace_by_quadrature(
    n: EnsembleSize,
    s: Complex64,
    lambda_minus: f64,
    tol: f64,
) -> Result<Complex64> {
    let nf = n.as_f64();
    let center = s.re / nf;
    let scale = (1.0 / nf).sqrt();
    let integrand = |lp: f64| -> Complex64 {
        let k = kernel(n, lp + lambda_minus, lp - lambda_minus);
        (s * lp).exp() * k
    };
    let re = integrate_line(|t| integrand(t).re, center, scale, tol)?;
    let im = if s.im == 0.0 {
        0.0
    } else {
        integrate_line(|t| integrand(t).im, center, scale, tol)?.value
    };
    Ok(Complex64::new(re.value, im))
}

/// `∫ |e^{sλ₊} K_N(λ₊+λ₋, λ₊-λ₋)| dλ₊`, the natural size of the transform
/// integral; used to judge errors where the transform itself vanishes.
pub fn kernel_laplace_abs_mass(n: EnsembleSize, s: Complex64, lambda_minus: f64) -> Result<f64> {
    let nf = n.as_f64();
    let f = |lp: f64| ((s.re * lp).exp() * kernel(n, lp + lambda_minus, lp - lambda_minus)).abs();
    Ok(integrate_line(f, s.re / nf, (1.0 / nf).sqrt(), 1e-8)?.value)
}

/// Exact density transform at rational real `s`, with the exponential
/// prefactor summed to `exp_terms` terms.
pub fn density_laplace_exact(n: EnsembleSize, s: &BigRational, exp_terms: usize) -> BigRational {
    let s2 = s * s;
    let nn = int(i64::from(n.get()));
    let pre = exp_series(&(&s2 / (int(2) * &nn)), exp_terms);
    pre * hyp1f1_truncated(n, &(-(s2 / nn)))
}

/// Largest row of the Stirling table representable in `u128`.
pub const STIRLING_CAP: usize = 34;

/// Unsigned Stirling numbers of the first kind `[n k]` for `n ≤ max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTable {
    max_n: usize,
    rows: Vec<Vec<u128>>,
}

impl StirlingTable {
    pub fn new(max_n: usize) -> Result<Self> {
        if max_n > STIRLING_CAP {
            return Err(Error::StirlingCap {
                requested: max_n,
                cap: STIRLING_CAP,
            });
        }
        let mut rows = vec![vec![1u128]];
        for n in 0..max_n {
            let prev = &rows[n];
            let mut row = vec![0u128; n + 2];
            for k in 1..=n + 1 {
                let stay = prev.get(k).copied().unwrap_or(0);
                let grow = prev[k - 1];
                row[k] = (n as u128)
                    .checked_mul(stay)
                    .and_then(|v| v.checked_add(grow))
                    .ok_or(Error::StirlingCap {
                        requested: max_n,
                        cap: n,
                    })?;
            }
            rows.push(row);
        }
        Ok(Self { max_n, rows })
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `[n k]`, zero outside `0 ≤ k ≤ n`.
    pub fn get(&self, n: usize, k: usize) -> u128 {
        assert!(n <= self.max_n, "row {n} beyond table size {}", self.max_n);
        self.rows[n].get(k).copied().unwrap_or(0)
    }

    pub fn row(&self, n: usize) -> &[u128] {
        &self.rows[n]
    }
}

/// Coefficients `c_0..c_depth` of `∫ e^{st} p_N = Σ_l c_l(s) N^{-l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CSeries {
    pub coeffs: Vec<Complex64>,
    /// Bound on the truncation error of every coefficient.
    pub tail_bound: f64,
    pub inner_terms: usize,
}

impl CSeries {
    pub fn partial_sum(&self, n: EnsembleSize, depth: usize) -> Complex64 {
        let inv = 1.0 / n.as_f64();
        self.coeffs
            .iter()
            .take(depth + 1)
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * inv + c)
    }
}

/// Inner terms needed for `|s|^{2k}/k! < 1e-3·tol` past the cut.
fn auto_inner_terms(abs_s2: f64, tol: f64) -> usize {
    let mut term = 1.0;
    let mut k = 0;
    loop {
        k += 1;
        term *= abs_s2 / k as f64;
        if term < 1e-3 * tol && (k as f64) > abs_s2 {
            return k;
        }
        if k > 10_000 {
            return k;
        }
    }
}

/// Bound on `Σ_{k≥K} x^k/k!` for `K > x`.
fn exp_tail(x: f64, from: usize) -> f64 {
    let first = (0..from).fold(1.0, |acc, k| acc * x / (k + 1) as f64);
    let q = x / (from + 1) as f64;
    if q >= 1.0 {
        f64::INFINITY
    } else {
        first / (1.0 - q)
    }
}

/// The `1/N` coefficients, with inner sums over `k < inner_terms`.
///
/// `[k+1, k+1-l] ≤ (k+1)!` bounds each omitted inner term by
/// `|s|^{2k}/k!`. With `inner_terms = None` the cut is chosen from `tol`;
/// either way an error is returned when the certified tail exceeds `tol`.
pub fn c_series(s: Complex64, depth: usize, inner_terms: Option<usize>, tol: f64) -> Result<CSeries> {
    let abs_s2 = s.norm_sqr();
    let k_terms = inner_terms.unwrap_or_else(|| auto_inner_terms(abs_s2, tol)).max(depth + 1);
    let table = StirlingTable::new(k_terms)?;
    let s2 = s * s;

    // b[l] = Σ_k [k+1, k+1-l] s^{2k} / (k!(k+1)!)
    let mut b = vec![Complex64::zero(); depth + 1];
    let mut base = Complex64::from(1.0);
    for k in 0..k_terms {
        if k > 0 {
            base = base * s2 / (k * (k + 1)) as f64;
        }
        for (l, bl) in b.iter_mut().enumerate().take((k + 1).min(depth + 1)) {
            *bl += base * table.get(k + 1, k + 1 - l) as f64;
        }
    }
    let inner_tail = exp_tail(abs_s2, k_terms);

    let half = s2 / 2.0;
    let mut e = vec![Complex64::from(1.0); depth + 1];
    let mut e_abs = vec![1.0; depth + 1];
    for j in 1..=depth {
        e[j] = e[j - 1] * half / j as f64;
        e_abs[j] = e_abs[j - 1] * 0.5 * abs_s2 / j as f64;
    }
    let mut coeffs = Vec::with_capacity(depth + 1);
    let mut tail_bound = 0.0f64;
    for l in 0..=depth {
        let mut c = Complex64::zero();
        let mut tb = 0.0;
        for i in 0..=l {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            c += e[l - i] * b[i] * sign;
            tb += e_abs[l - i] * inner_tail;
        }
        coeffs.push(c);
        tail_bound = tail_bound.max(tb);
    }
    if !(tail_bound <= tol) {
        return Err(Error::SeriesTail {
            bound: tail_bound,
            tol,
        });
    }
    Ok(CSeries {
        coeffs,
        tail_bound,
        inner_terms: k_terms,
    })
}

/// Exact coefficients at rational real `s` with a fixed inner cut.
pub fn c_series_exact(s: &BigRational, depth: usize, inner_terms: usize) -> Result<Vec<BigRational>> {
    let k_terms = inner_terms.max(depth + 1);
    let table = StirlingTable::new(k_terms)?;
    let s2 = s * s;
    let mut b = vec![BigRational::zero(); depth + 1];
    let mut base = int(1);
    for k in 0..k_terms {
        if k > 0 {
            base = base * &s2 / int((k * (k + 1)) as i64);
        }
        for (l, bl) in b.iter_mut().enumerate().take((k + 1).min(depth + 1)) {
            let st = BigRational::from_integer(table.get(k + 1, k + 1 - l).into());
            *bl += &base * st;
        }
    }
    let half = &s2 / int(2);
    let mut e = vec![int(1); depth + 1];
    for j in 1..=depth {
        e[j] = &e[j - 1] * &half / int(j as i64);
    }
    Ok((0..=depth)
        .map(|l| {
            (0..=l).fold(BigRational::zero(), |acc, i| {
                let term = &e[l - i] * &b[i];
                if i % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, to_f64};

    fn n(v: u32) -> EnsembleSize {
        EnsembleSize::new(v).unwrap()
    }

    #[test]
    fn hypergeometric_small_cases() {
        assert_eq!(hyp1f1_truncated(n(5), &0.0), 1.0);
        assert_eq!(hyp1f1_truncated(n(1), &3.7), 1.0);
        assert_eq!(hyp1f1_truncated(n(3), &int(1)), frac(1, 6));
    }

    #[test]
    fn kernel_mass_and_single_level() {
        let v = kernel_laplace(n(7), Complex64::zero(), 0.0).unwrap().value;
        assert!((v - 7.0).norm() < 1e-13);
        let s = Complex64::new(0.3, -0.8);
        let v = kernel_laplace(n(1), s, 0.6).unwrap().value;
        let expect = (Complex64::from(-0.18) + s * s / 2.0).exp();
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn density_transform_two_levels() {
        let v = density_laplace_real(n(2), 1.0).unwrap();
        assert!((v - 0.25f64.exp() * 1.25).abs() < 1e-14);
        let exact = density_laplace_exact(n(2), &int(1), 40);
        assert!((to_f64(&exact) - v).abs() < 1e-14);
    }

    #[test]
    fn kernel_quadrature_agrees() {
        let s = Complex64::new(1.2, 0.0);
        let closed = kernel_laplace(n(5), s, 0.4).unwrap().value;
        let quad = kernel_laplace_by_quadrature(n(5), s, 0.4, 1e-13).unwrap();
        assert!((closed - quad).norm() / closed.norm() < 1e-8);
    }

    #[test]
    fn stirling_values() {
        let t = StirlingTable::new(10).unwrap();
        assert_eq!(t.get(3, 2), 3);
        assert_eq!(t.get(5, 1), 24);
        assert_eq!(t.get(0, 0), 1);
        assert_eq!(t.get(6, 0), 0);
        assert!(StirlingTable::new(STIRLING_CAP).is_ok());
        assert!(matches!(StirlingTable::new(35), Err(Error::StirlingCap { .. })));
    }

    #[test]
    fn c_series_low_terms() {
        let c = c_series(Complex64::zero(), 4, None, 1e-14).unwrap();
        assert!((c.coeffs[0] - 1.0).norm() < 1e-15);
        let c = c_series(Complex64::from(1.0), 6, None, 1e-14).unwrap();
        let c0: f64 = (0..30)
            .map(|k| 1.0 / (exact_fact(k) * exact_fact(k + 1)))
            .sum();
        assert!((c.coeffs[0].re - c0).abs() < 1e-15);
        assert!(c.coeffs[1].norm() < 1e-14);
        assert!(c.coeffs[3].norm() < 1e-14);
    }

    fn exact_fact(k: usize) -> f64 {
        (1..=k).map(|v| v as f64).product()
    }

    #[test]
    fn c_series_reports_tail() {
        let err = c_series(Complex64::from(6.0), 4, None, 1e-12).unwrap_err();
        assert!(matches!(err, Error::StirlingCap { .. } | Error::SeriesTail { .. }));
    }

    #[test]
    fn exact_odd_coefficients_vanish() {
        let c = c_series_exact(&frac(1, 1), 7, 30).unwrap();
        for l in [1, 3, 5, 7] {
            assert!(to_f64(&c[l]).abs() < 1e-28, "c_{l} = {}", to_f64(&c[l]));
        }
    }
}
