//! Operators on basis coefficients and the 1/N² resummation driver.
//!
//! In the basis `f_n`, differentiation acts as
//! `(Dg)_n = (n+2) Σ_{m>n, m-n odd} g_m` and `H` is diagonal with
//! `H_nn = 1/((n+2)² - 1)`. `S = HD` solves
//! `(t² - 4)(Sg)' + 3t (Sg) = g - ⟨g⟩_sc`, and `T = D³HD` carries one order
//! of the expansion: `∫ g p_N = ⟨g⟩_sc + N^{-2} ∫ (Tg) p_N`.
//!
//! On a series stored through index `M`, `D` returns indices `0..M-1` and
//! `T` returns `0..M-4`; for polynomials nothing is lost.

use crate::error::{Error, Result};
use crate::exact::{to_f64, Coefficient};
use crate::gegenbauer::{
    basis_with_derivs, norm_coeffs, semicircle_coeffs, semicircle_functional, GegenbauerSeries,
    NormParams,
};
use crate::hermite::EnsembleSize;
use crate::quadrature::Neumaier;
use num_rational::BigRational;

/// Guard indices consumed by one application of `T`.
pub const T_GUARD: usize = 4;

/// `D` on a coefficient vector; the result is one entry shorter.
pub fn apply_d_coeffs<T: Coefficient>(g: &[T]) -> Vec<T> {
    let len = g.len();
    if len <= 1 {
        return vec![T::zero(); len.min(1)];
    }
    // suffix[n] = g_n + g_{n+2} + …
    let mut suffix = vec![T::zero(); len + 2];
    for n in (0..len).rev() {
        suffix[n] = g[n].clone() + suffix[n + 2].clone();
    }
    (0..len - 1)
        .map(|n| T::from_count(n + 2) * suffix[n + 1].clone())
        .collect()
}

pub fn apply_h_coeffs<T: Coefficient>(g: &[T]) -> Vec<T> {
    g.iter()
        .enumerate()
        .map(|(n, v)| v.clone() / T::from_count((n + 1) * (n + 3)))
        .collect()
}

pub fn apply_s_coeffs<T: Coefficient>(g: &[T]) -> Vec<T> {
    apply_h_coeffs(&apply_d_coeffs(g))
}

pub fn apply_t_coeffs<T: Coefficient>(g: &[T]) -> Vec<T> {
    let mut v = apply_s_coeffs(g);
    for _ in 0..3 {
        v = apply_d_coeffs(&v);
    }
    v
}

fn derived(g: &GegenbauerSeries, coeffs: Vec<f64>) -> GegenbauerSeries {
    let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
    GegenbauerSeries {
        truncation: coeffs.len() - 1,
        coeffs,
        tail_bound: if g.is_exact() { Some(0.0) } else { None },
        type_hint: g.type_hint,
    }
}

pub fn apply_d(g: &GegenbauerSeries) -> GegenbauerSeries {
    derived(g, apply_d_coeffs(&g.coeffs))
}

pub fn apply_h(g: &GegenbauerSeries) -> GegenbauerSeries {
    let mut out = derived(g, apply_h_coeffs(&g.coeffs));
    out.tail_bound = g.tail_bound;
    out
}

pub fn apply_s(g: &GegenbauerSeries) -> GegenbauerSeries {
    derived(g, apply_s_coeffs(&g.coeffs))
}

pub fn apply_t(g: &GegenbauerSeries) -> GegenbauerSeries {
    derived(g, apply_t_coeffs(&g.coeffs))
}

/// The operators at a fixed truncation, in explicit form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTables {
    pub truncation: usize,
    pub h_diag: Vec<f64>,
}

impl OperatorTables {
    pub fn new(truncation: usize) -> Self {
        Self {
            truncation,
            h_diag: (0..=truncation)
                .map(|n| 1.0 / ((n + 1) * (n + 3)) as f64)
                .collect(),
        }
    }

    /// Entry `D_{nm}`: `n+2` when `m > n` and `m - n` is odd, else 0.
    pub fn d_entry(&self, n: usize, m: usize) -> f64 {
        if m > n && (m - n) % 2 == 1 && m <= self.truncation {
            (n + 2) as f64
        } else {
            0.0
        }
    }

    /// Dense `D` as rows `0..M`, columns `0..=M`.
    pub fn d_matrix(&self) -> Vec<Vec<f64>> {
        (0..=self.truncation)
            .map(|n| (0..=self.truncation).map(|m| self.d_entry(n, m)).collect())
            .collect()
    }

    /// Eigenvalue `λ_n = (n+2)² - 1` of `H⁻¹`.
    pub fn lambda(n: usize) -> f64 {
        ((n + 2) * (n + 2) - 1) as f64
    }
}

/// Max over `samples` of `|g - ⟨g⟩_sc - (t²-4)(Sg)' - 3t Sg|`, divided by
/// `max(1, max |g(t)|)` over the same samples.
pub fn s_identity_residual(g: &GegenbauerSeries, samples: &[f64]) -> f64 {
    let avg = semicircle_functional(g);
    let s = apply_s(g);
    let ds = apply_d(&s);
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for &t in samples {
        let gt = g.eval(t);
        let r = gt - avg - (t * t - 4.0) * ds.eval(t) - 3.0 * t * s.eval(t);
        worst = worst.max(r.abs());
        scale = scale.max(gt.abs());
    }
    worst / scale
}

/// Max residual of `(t²-4) f''_n + 5t f'_n = ((n+2)² - 4) f_n` at 41 points
/// of `[-3, 3]`, each relative to `max(1, |rhs|)`.
pub fn eigen_check(n: usize) -> f64 {
    let lam = ((n + 2) * (n + 2)) as f64 - 4.0;
    (0..=40)
        .map(|j| {
            let t = -3.0 + 0.15 * j as f64;
            let b = basis_with_derivs(n, &t);
            let lhs = (t * t - 4.0) * b.d2[n] + 5.0 * t * b.d1[n];
            let rhs = lam * b.values[n];
            (lhs - rhs).abs() / rhs.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `α_0..α_m` of a linear statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSequence {
    pub values: Vec<f64>,
    pub function_id: String,
    /// For polynomial input, the index past which every α_k is exactly 0.
    pub exact_beyond: Option<usize>,
    /// The stored truncation covered the `4m` guard indices.
    pub guard_ok: bool,
}

/// `α_k = ⟨T^k f⟩_sc` for `k = 0..=m`.
pub fn alpha_sequence(f: &GegenbauerSeries, m: usize, function_id: &str) -> AlphaSequence {
    let exact = f.is_exact();
    let degree = f.degree();
    let guard_ok = exact || f.truncation >= T_GUARD * m + T_GUARD;
    let mut values = Vec::with_capacity(m + 1);
    let mut g = f.coeffs.clone();
    for _ in 0..=m {
        values.push(semicircle_coeffs(&g));
        g = if g.len() > T_GUARD {
            apply_t_coeffs(&g)
        } else {
            vec![0.0]
        };
    }
    AlphaSequence {
        values,
        function_id: function_id.to_string(),
        exact_beyond: if exact {
            Some(degree.map_or(0, |d| d / T_GUARD))
        } else {
            None
        },
        guard_ok,
    }
}

/// Exact α-sequence for rational coefficients.
pub fn alpha_sequence_exact(coeffs: &[BigRational], m: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(m + 1);
    let mut g = coeffs.to_vec();
    for _ in 0..=m {
        out.push(semicircle_coeffs(&g));
        if g.len() <= T_GUARD {
            g = Vec::new();
        } else {
            g = apply_t_coeffs(&g);
        }
    }
    out
}

/// `S_m = Σ_{k≤m} α_k N^{-2k}` for every `m`, in ascending order with
/// compensated summation.
pub fn partial_sums(alpha: &[f64], n: EnsembleSize) -> Vec<f64> {
    let inv = 1.0 / (n.as_f64() * n.as_f64());
    let mut acc = Neumaier::default();
    let mut w = 1.0;
    alpha
        .iter()
        .map(|a| {
            acc.add(a * w);
            w *= inv;
            acc.sum()
        })
        .collect()
}

pub fn partial_sums_exact(alpha: &[BigRational], n: EnsembleSize) -> Vec<BigRational> {
    let inv = BigRational::new(1.into(), (u64::from(n.get()) * u64::from(n.get())).into());
    let mut w = BigRational::from_integer(1.into());
    let mut acc = BigRational::from_integer(0.into());
    alpha
        .iter()
        .map(|a| {
            acc += a * &w;
            w *= &inv;
            acc.clone()
        })
        .collect()
}

/// Partial sums of the 1/N² expansion at one `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Resummation {
    pub n: EnsembleSize,
    pub alpha: AlphaSequence,
    pub partial_sums: Vec<f64>,
    /// Set when a calibrated threshold is known and `n` lies below it.
    pub below_threshold: bool,
}

impl Resummation {
    pub fn with_threshold(mut self, threshold: Option<u32>) -> Self {
        self.below_threshold = threshold.is_some_and(|n0| self.n.get() < n0);
        self
    }

    pub fn last(&self) -> f64 {
        *self.partial_sums.last().expect("m ≥ 0")
    }
}

pub fn resum(f: &GegenbauerSeries, n: EnsembleSize, m: usize, function_id: &str) -> Resummation {
    let alpha = alpha_sequence(f, m, function_id);
    let partial_sums = partial_sums(&alpha.values, n);
    Resummation {
        n,
        alpha,
        partial_sums,
        below_threshold: false,
    }
}

/// `max_{n ≤ truncation} ‖T e_n‖_{c,K} / ‖e_n‖_{c,K}`, an estimate of the
/// operator norm of `T` on the truncated space.
pub fn t_norm_probe(p: NormParams, truncation: usize) -> f64 {
    (T_GUARD..=truncation)
        .map(|n| {
            let mut e = vec![0.0; n + 1];
            e[n] = 1.0;
            let te = apply_t_coeffs(&e);
            (norm_coeffs(&te, p).ln() - p.ln_weight(n)).exp()
        })
        .fold(0.0, f64::max)
}

/// Error history of the resummation at one `N`, used for calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub n: u32,
    pub errors: Vec<f64>,
    pub monotone_after: bool,
    pub final_error: f64,
}

/// Outcome of [`calibrate_threshold`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    /// Smallest `N` of the scanned range from which every larger `N` in the
    /// range converges; `None` if even the largest fails.
    pub threshold: Option<u32>,
    pub records: Vec<ConvergenceRecord>,
}

/// `|errors[m]|` is non-increasing for `m ≥ from`, allowing a relative
/// rounding floor below which fluctuations are ignored.
pub fn monotone_from(errors: &[f64], from: usize, floor: f64) -> bool {
    errors
        .windows(2)
        .skip(from)
        .all(|w| w[1] <= w[0].max(floor))
}

/// Measures the convergence threshold of the resummation of `f`.
///
/// For each `N` in `ns` (ascending), the partial sums through `m_final` are
/// compared with `reference(N)`. `N` converges when the error is monotone
/// from `m_monotone` on and below `tol` at `m_final`.
pub fn calibrate_threshold(
    f: &GegenbauerSeries,
    ns: &[u32],
    m_monotone: usize,
    m_final: usize,
    tol: f64,
    reference: impl Fn(EnsembleSize) -> Result<f64>,
) -> Result<ThresholdReport> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "calibration sizes must be nonempty and increasing".into(),
        ));
    }
    let alpha = alpha_sequence(f, m_final, "calibration");
    let mut records = Vec::with_capacity(ns.len());
    for &raw in ns {
        let n = EnsembleSize::new(raw)?;
        let target = reference(n)?;
        let errors: Vec<f64> = partial_sums(&alpha.values, n)
            .iter()
            .map(|s| (s - target).abs())
            .collect();
        let floor = 1e-14 * target.abs().max(1.0);
        let final_error = errors[m_final];
        records.push(ConvergenceRecord {
            n: raw,
            monotone_after: monotone_from(&errors, m_monotone, floor),
            final_error,
            errors,
        });
    }
    let ok = |r: &ConvergenceRecord| r.monotone_after && r.final_error < tol;
    let threshold = (0..records.len())
        .find(|&i| records[i..].iter().all(ok))
        .map(|i| records[i].n);
    Ok(ThresholdReport { threshold, records })
}

/// Exact moment `∫ t^p p_N` from the finite α-sequence.
pub fn polynomial_moment(p: usize, n: EnsembleSize) -> f64 {
    let mut coeffs = vec![BigRational::from_integer(0.into()); p + 1];
    coeffs[p] = BigRational::from_integer(1.into());
    let basis = crate::gegenbauer::monomials_to_basis(&coeffs);
    let alpha = alpha_sequence_exact(&basis, p / T_GUARD + 1);
    to_f64(partial_sums_exact(&alpha, n).last().expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};
    use crate::gegenbauer::{taylor_to_gegenbauer, TaylorSeries};

    #[test]
    fn d_on_basis_elements() {
        assert_eq!(apply_d(&GegenbauerSeries::basis(0)).coeffs, vec![0.0]);
        assert_eq!(apply_d(&GegenbauerSeries::basis(2)).coeffs, vec![0.0, 3.0]);
        assert_eq!(apply_d(&GegenbauerSeries::basis(3)).coeffs, vec![2.0, 0.0, 4.0]);
    }

    #[test]
    fn t_of_fourth_power() {
        let t4 = vec![int(1), int(0), frac(4, 5), int(0), frac(1, 5)];
        let d = apply_d_coeffs(&t4);
        assert_eq!(d, vec![int(0), int(3), int(0), int(1)]);
        let h = apply_h_coeffs(&d);
        assert_eq!(h[1], frac(3, 8));
        assert_eq!(h[3], frac(1, 24));
        assert_eq!(apply_t_coeffs(&t4), vec![int(1)]);
        assert_eq!(alpha_sequence_exact(&t4, 3), vec![int(2), int(1), int(0), int(0)]);
    }

    #[test]
    fn low_degree_is_annihilated() {
        let g = GegenbauerSeries::from_coeffs(vec![1.0, -2.0, 0.5, 3.0]);
        assert!(apply_t(&g).coeffs.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn fourth_moment_partial_sums() {
        let g = taylor_to_gegenbauer(&TaylorSeries::monomial(4));
        let r = resum(&g, EnsembleSize::new(2).unwrap(), 3, "t^4");
        for (s, e) in r.partial_sums.iter().zip([2.0, 2.25, 2.25, 2.25]) {
            assert!((s - e).abs() < 1e-14);
        }
        assert_eq!(r.alpha.exact_beyond, Some(1));
    }

    #[test]
    fn s_identity_for_constant() {
        let g = GegenbauerSeries::basis(0);
        assert_eq!(s_identity_residual(&g, &[-1.0, 0.0, 2.5]), 0.0);
    }

    #[test]
    fn eigen_relation_small_orders() {
        assert_eq!(eigen_check(0), 0.0);
        assert!(eigen_check(1) < 1e-14);
        assert!(eigen_check(7) < 1e-9);
    }

    #[test]
    fn s_inverts_on_derivative_image() {
        // g = f_{n+1} has Dg containing f_n; S g = H D g
        let n = 4;
        let mut g = vec![0.0; n + 2];
        g[n + 1] = 1.0 / (n + 2) as f64;
        let mut expect = apply_d_coeffs(&g);
        for (j, v) in expect.iter_mut().enumerate() {
            *v /= OperatorTables::lambda(j);
        }
        assert_eq!(apply_s_coeffs(&g), expect);
    }

    #[test]
    fn tables_match_implicit_rule() {
        let t = OperatorTables::new(6);
        let e5 = GegenbauerSeries::basis(5);
        let d = apply_d(&e5);
        for (n, row) in t.d_matrix().iter().take(5).enumerate() {
            assert_eq!(row[5], d.coeffs[n]);
        }
        assert!(t.h_diag.iter().all(|&h| h > 0.0));
    }

    #[test]
    fn monotone_with_floor() {
        assert!(monotone_from(&[1.0, 0.5, 1e-17, 2e-17], 0, 1e-16));
        assert!(!monotone_from(&[1.0, 0.5, 0.6], 0, 1e-16));
        assert!(monotone_from(&[1.0, 2.0, 0.5], 1, 0.0));
    }

    #[test]
    fn exact_moment_helper() {
        let n = EnsembleSize::new(4).unwrap();
        assert!((polynomial_moment(4, n) - (2.0 + 1.0 / 16.0)).abs() < 1e-15);
        assert_eq!(polynomial_moment(3, n), 0.0);
    }
}
