//! Gaussian-weighted Hermite functions, the GUE kernel and the mean density.
//!
//! Under the 1/N normalisation the GUE(N) eigenvalues form a determinantal
//! process whose kernel is built from the Hermite polynomials
//! `h_k(x) = (-1)^k e^{Nx²/2} d^k/dx^k e^{-Nx²/2}`. Everything here works with
//! the pre-weighted orthonormal functions
//!
//! ```text
//! ψ_k(x) = h_k(x) e^{-Nx²/4} / sqrt(k! N^k sqrt(2π/N))
//! ```
//!
//! which obey a three-term recurrence with O(1) coefficients. The weight is
//! tracked as a separate logarithmic scale during the recurrence, so the
//! frame neither overflows nor spuriously underflows for `N ≤ 256` and
//! `|x| ≤ 12`. Outside that range values stay finite but relative accuracy
//! degrades roughly like `N x² · ε`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Matrix dimension `N` of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnsembleSize(u32);

impl EnsembleSize {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidEnsembleSize(n));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u32> for EnsembleSize {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl std::fmt::Display for EnsembleSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Below this separation the off-diagonal kernel switches from the
/// Christoffel–Darboux ratio to its derivative (diagonal-limit) form.
pub const CD_CROSSOVER: f64 = 1e-6;

/// Values and first derivatives of `ψ_0..ψ_order` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHermiteFrame {
    pub point: f64,
    pub order: usize,
    pub values: Vec<f64>,
    pub d_values: Vec<f64>,
}

pub fn weighted_hermite_frame(
    n: EnsembleSize,
    k_max: usize,
    x: f64,
) -> Result<WeightedHermiteFrame> {
    if !x.is_finite() {
        return Err(Error::NonFinite("x"));
    }
    Ok(frame(n.as_f64(), k_max, x))
}

fn frame(nf: f64, k_max: usize, x: f64) -> WeightedHermiteFrame {
    let values = weighted_values(nf, k_max, x);
    let d_values = (0..=k_max)
        .map(|k| {
            let lower = if k == 0 {
                0.0
            } else {
                (nf * k as f64).sqrt() * values[k - 1]
            };
            lower - 0.5 * nf * x * values[k]
        })
        .collect();
    WeightedHermiteFrame {
        point: x,
        order: k_max,
        values,
        d_values,
    }
}

/// `ψ_0..ψ_{k_max}` at `x` for (possibly non-integer) precision `nf`.
pub(crate) fn weighted_values(nf: f64, k_max: usize, x: f64) -> Vec<f64> {
    const RESCALE: f64 = 1e200;
    let ln_rescale = RESCALE.ln();
    let log_weight = -0.25 * (2.0 * PI / nf).ln() - 0.25 * nf * x * x;

    let finalize = |mantissa: f64, shift: f64| -> f64 {
        if mantissa == 0.0 {
            return 0.0;
        }
        let e = shift + log_weight;
        if e > -700.0 && e < 700.0 {
            mantissa * e.exp()
        } else {
            mantissa.signum() * (mantissa.abs().ln() + e).exp()
        }
    };

    let mut out = Vec::with_capacity(k_max + 1);
    let (mut prev, mut cur, mut shift) = (0.0f64, 1.0f64, 0.0f64);
    out.push(finalize(cur, shift));
    for k in 0..k_max {
        let kf = k as f64;
        let next = x * (nf / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            shift += ln_rescale;
        }
        out.push(finalize(cur, shift));
    }
    out
}

/// Unweighted Hermite polynomial `h_order(x)` for precision `N`.
pub fn hermite_poly(n: EnsembleSize, order: usize, x: f64) -> f64 {
    let nf = n.as_f64();
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..order {
        let next = nf * x * cur - nf * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Right-hand side of the translation formula,
/// `Σ_k binom(order, k) N^k a^k h_{order-k}(x)`, which equals `h_order(x + a)`.
pub fn hermite_translate(n: EnsembleSize, order: usize, a: f64, x: f64) -> Result<f64> {
    if !a.is_finite() || !x.is_finite() {
        return Err(Error::NonFinite("translation argument"));
    }
    let nf = n.as_f64();
    let mut h = Vec::with_capacity(order + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    h.push(cur);
    for k in 0..order {
        let next = nf * x * cur - nf * k as f64 * prev;
        prev = cur;
        cur = next;
        h.push(cur);
    }
    let mut binom = 1.0;
    let mut na_pow = 1.0;
    let mut sum = 0.0;
    for k in 0..=order {
        sum += binom * na_pow * h[order - k];
        binom = binom * (order - k) as f64 / (k + 1) as f64;
        na_pow *= nf * a;
    }
    Ok(sum)
}

/// `K_N(x, x) = Σ_{k<N} ψ_k(x)²`.
pub fn kernel_diag(n: EnsembleSize, x: f64) -> f64 {
    let psi = weighted_values(n.as_f64(), n.as_usize() - 1, x);
    psi.iter().map(|v| v * v).sum()
}

/// Off-diagonal GUE kernel `K_N(x, y)`.
///
/// Uses `[ψ_N(x)ψ_{N-1}(y) - ψ_{N-1}(x)ψ_N(y)] / (x - y)` away from the
/// diagonal; within [`CD_CROSSOVER`] the limit
/// `ψ'_N ψ_{N-1} - ψ'_{N-1} ψ_N` at the midpoint is used, whose error is
/// `O(|x - y|²)`.
pub fn kernel(n: EnsembleSize, x: f64, y: f64) -> f64 {
    let nf = n.as_f64();
    let top = n.as_usize();
    if (x - y).abs() <= CD_CROSSOVER {
        let m = 0.5 * (x + y);
        let fr = frame(nf, top, m);
        return fr.d_values[top] * fr.values[top - 1] - fr.d_values[top - 1] * fr.values[top];
    }
    let px = weighted_values(nf, top, x);
    let py = weighted_values(nf, top, y);
    (px[top] * py[top - 1] - px[top - 1] * py[top]) / (x - y)
}

/// Mean eigenvalue density `p_N(x) = K_N(x, x) / N`.
pub fn density(n: EnsembleSize, x: f64) -> f64 {
    kernel_diag(n, x) / n.as_f64()
}

/// `p_N` and its first three derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDerivs {
    pub p: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Analytic derivatives from `ψ'_k = sqrt(Nk) ψ_{k-1} - (Nx/2) ψ_k` and the
/// Hermite-function equation `ψ''_k = (N²x²/4 - N(k + 1/2)) ψ_k`.
pub fn density_derivs(n: EnsembleSize, x: f64) -> DensityDerivs {
    let nf = n.as_f64();
    let fr = frame(nf, n.as_usize() - 1, x);
    let (mut p, mut d1, mut d2, mut d3) = (0.0, 0.0, 0.0, 0.0);
    for (k, (&v, &dv)) in fr.values.iter().zip(&fr.d_values).enumerate() {
        let q = 0.25 * nf * nf * x * x - nf * (k as f64 + 0.5);
        p += v * v;
        d1 += v * dv;
        d2 += dv * dv + q * v * v;
        d3 += 4.0 * q * v * dv + 0.5 * nf * nf * x * v * v;
    }
    DensityDerivs {
        p: p / nf,
        d1: 2.0 * d1 / nf,
        d2: 2.0 * d2 / nf,
        d3: 2.0 * d3 / nf,
    }
}

/// `(1/N²) p''' + (4 - x²) p' + x p`, which vanishes identically.
pub fn ode_residual(n: EnsembleSize, x: f64) -> f64 {
    let nf = n.as_f64();
    let d = density_derivs(n, x);
    d.d3 / (nf * nf) + (4.0 - x * x) * d.d1 + x * d.p
}

/// [`ode_residual`] divided by `max(|p|, |p'|, |p'''|/N²)`.
pub fn ode_residual_scaled(n: EnsembleSize, x: f64) -> f64 {
    let nf = n.as_f64();
    let d = density_derivs(n, x);
    let raw = d.d3 / (nf * nf) + (4.0 - x * x) * d.d1 + x * d.p;
    let scale = d.p.abs().max(d.d1.abs()).max(d.d3.abs() / (nf * nf));
    if scale == 0.0 {
        raw.abs()
    } else {
        raw.abs() / scale
    }
}

/// Density sampled on a grid, optionally with `(p', p'', p''')` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub n: EnsembleSize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Option<Vec<[f64; 3]>>,
}

impl DensityProfile {
    pub fn build(n: EnsembleSize, grid: Vec<f64>, with_derivs: bool) -> Result<Self> {
        if grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("grid point"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "density grid must be strictly increasing".into(),
            ));
        }
        let (values, derivs) = if with_derivs {
            let d: Vec<DensityDerivs> = grid.iter().map(|&x| density_derivs(n, x)).collect();
            (
                d.iter().map(|d| d.p).collect(),
                Some(d.iter().map(|d| [d.d1, d.d2, d.d3]).collect()),
            )
        } else {
            (grid.iter().map(|&x| density(n, x)).collect(), None)
        };
        Ok(Self {
            n,
            grid,
            values,
            derivs,
        })
    }

    /// Uniform grid of `points` nodes on `[from, to]`.
    pub fn uniform(n: EnsembleSize, from: f64, to: f64, points: usize, with_derivs: bool) -> Result<Self> {
        let grid = uniform_grid(from, to, points)?;
        Self::build(n, grid, with_derivs)
    }

    pub fn trapezoid_mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1]))
            .sum()
    }
}

pub(crate) fn uniform_grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() {
        return Err(Error::NonFinite("grid bound"));
    }
    match points {
        0 => Err(Error::InvalidParameter("grid needs at least one point".into())),
        1 if from == to => Ok(vec![from]),
        1 => Err(Error::InvalidParameter(
            "a single grid point requires from == to".into(),
        )),
        _ if from >= to => Err(Error::InvalidParameter("grid requires from < to".into())),
        _ => {
            let h = (to - from) / (points - 1) as f64;
            Ok((0..points)
                .map(|i| if i + 1 == points { to } else { from + h * i as f64 })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ens(n: u32) -> EnsembleSize {
        EnsembleSize::new(n).unwrap()
    }

    #[test]
    fn rejects_zero_size_and_nonfinite_points() {
        assert!(EnsembleSize::new(0).is_err());
        assert!(weighted_hermite_frame(ens(3), 4, f64::NAN).is_err());
        assert!(weighted_hermite_frame(ens(3), 4, f64::INFINITY).is_err());
    }

    #[test]
    fn ground_state_normalisation() {
        let fr = weighted_hermite_frame(ens(1), 0, 0.0).unwrap();
        assert!((fr.values[0] - 0.631_618_777_8).abs() < 1e-10);
        let fr = weighted_hermite_frame(ens(2), 1, 0.0).unwrap();
        assert_eq!(fr.values[1], 0.0);
    }

    #[test]
    fn single_eigenvalue_is_standard_normal() {
        for &t in &[-2.0f64, -0.3, 0.0, 1.7] {
            let expected = (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
            assert!((kernel_diag(ens(1), t) - expected).abs() < 1e-15);
        }
        assert!((density(ens(1), 0.0) - 0.398_942_280_4).abs() < 1e-10);
        assert!((kernel_diag(ens(2), 0.0) - 0.564_189_583_5).abs() < 1e-10);
    }

    #[test]
    fn kernel_matches_diagonal_and_is_symmetric() {
        for n in [1, 2, 5, 13] {
            for &t in &[-1.5, 0.2, 2.4] {
                let d = kernel_diag(ens(n), t);
                assert!((kernel(ens(n), t, t) - d).abs() <= 1e-10 * d);
            }
            assert_eq!(kernel(ens(n), 0.3, -0.8), kernel(ens(n), -0.8, 0.3));
        }
    }

    #[test]
    fn near_diagonal_is_stable() {
        let n = ens(5);
        let x = 0.41;
        let k = kernel(n, x, x + 1e-9);
        assert!(k.is_finite());
        assert!((k - kernel_diag(n, x)).abs() < 1e-6);
    }

    #[test]
    fn third_derivative_matches_finite_differences() {
        let n = ens(6);
        let x = 1.1;
        let p = |t: f64| density(n, t);
        let fd = |h: f64| (p(x + 2.0 * h) - 2.0 * p(x + h) + 2.0 * p(x - h) - p(x - 2.0 * h)) / (2.0 * h * h * h);
        // Richardson step removes the O(h²) term
        let fd = (4.0 * fd(2e-3) - fd(4e-3)) / 3.0;
        let d3 = density_derivs(n, x).d3;
        assert!((fd - d3).abs() <= 1e-5 * d3.abs(), "fd {fd} analytic {d3}");
    }

    #[test]
    fn ode_residual_vanishes() {
        assert!(ode_residual(ens(1), 0.7).abs() < 1e-10);
        assert!(ode_residual_scaled(ens(10), 0.0) < 1e-9);
        assert!(ode_residual_scaled(ens(16), 2.0) < 1e-9);
    }

    #[test]
    fn translation_low_orders() {
        let c = 0.37;
        assert!((hermite_translate(ens(1), 1, c, 0.0).unwrap() - c).abs() < 1e-15);
        assert_eq!(hermite_translate(ens(1), 0, 5.0, -2.0).unwrap(), 1.0);
        let direct = hermite_poly(ens(3), 6, 0.3);
        let shifted = hermite_translate(ens(3), 6, 0.7, -0.4).unwrap();
        assert!((direct - shifted).abs() <= 1e-10 * direct.abs());
    }

    #[test]
    fn large_n_frame_stays_finite() {
        let n = ens(256);
        for &x in &[-12.0, -3.5, 0.0, 2.0, 9.0] {
            let fr = weighted_hermite_frame(n, 256, x).unwrap();
            assert!(fr.values.iter().chain(&fr.d_values).all(|v| v.is_finite()));
        }
        // beyond the edge, relative accuracy survives where e^{-Nx²/4} alone underflows
        let p = density(n, 3.5);
        assert!(p > 0.0 && p < 1e-250);
    }

    #[test]
    fn profile_rejects_bad_grids() {
        assert!(DensityProfile::build(ens(2), vec![0.0, 0.0], false).is_err());
        assert!(DensityProfile::uniform(ens(2), 1.0, 0.0, 5, false).is_err());
        let single = DensityProfile::uniform(ens(2), 0.0, 0.0, 1, false).unwrap();
        assert!((single.values[0] - 0.282_094_791_8).abs() < 1e-10);
    }
}
