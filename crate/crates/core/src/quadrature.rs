//! Gauss rules with exact polynomial degree and adaptive line integration.

use crate::error::{Error, Result};
use crate::hermite::{weighted_values, EnsembleSize};
use crate::mc::tridiag_eigs;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Weight function a rule integrates against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `e^{-β t²/2}` on the real line.
    Gaussian(f64),
    /// `sqrt(4 - t²)` on `[-2, 2]`.
    Semicircle,
    /// `(4 - t²)^{3/2}` on `[-2, 2]`.
    Gegenbauer2,
    /// Unit weight on `[-1, 1]`.
    Plain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub weight_kind: WeightKind,
    pub exact_degree: usize,
}

impl QuadratureRule {
    /// `Σ w_j f(t_j)` with compensated summation.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = Neumaier::default();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(t));
        }
        acc.sum()
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// Total mass of the exact weight function.
    pub fn exact_mass(&self) -> f64 {
        match self.weight_kind {
            WeightKind::Gaussian(beta) => (2.0 * PI / beta).sqrt(),
            WeightKind::Semicircle => 2.0 * PI,
            WeightKind::Gegenbauer2 => 6.0 * PI,
            WeightKind::Plain => 2.0,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Chebyshev-U (second kind) rule scaled to `[-2, 2]`:
/// nodes `2cos(jπ/(c+1))`, weights `(4π/(c+1)) sin²(jπ/(c+1))`.
pub fn semicircle_rule(count: usize) -> Result<QuadratureRule> {
    if count == 0 {
        return Err(Error::InvalidParameter("rule needs at least one node".into()));
    }
    let h = PI / (count + 1) as f64;
    let (nodes, weights) = (1..=count)
        .rev()
        .map(|j| {
            let th = h * j as f64;
            (2.0 * th.cos(), 4.0 * h * th.sin().powi(2))
        })
        .unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        weight_kind: WeightKind::Semicircle,
        exact_degree: 2 * count - 1,
    })
}

/// Rule for the weight `(4 - t²)^{3/2}` obtained by folding `4 - t²` into the
/// semicircle weights; exact through degree `2·count - 3`.
pub fn gegenbauer2_rule(count: usize) -> Result<QuadratureRule> {
    if count < 2 {
        return Err(Error::InvalidParameter(
            "Gegenbauer weight rule needs at least two nodes".into(),
        ));
    }
    let mut rule = semicircle_rule(count)?;
    for (w, &t) in rule.weights.iter_mut().zip(&rule.nodes) {
        *w *= 4.0 - t * t;
    }
    rule.weight_kind = WeightKind::Gegenbauer2;
    rule.exact_degree = 2 * count - 3;
    Ok(rule)
}

/// Gauss rule for `e^{-N t²/2}`, exact through degree `2·count - 1`.
pub fn gaussian_rule(n: EnsembleSize, count: usize) -> Result<QuadratureRule> {
    gaussian_rule_with_precision(n.as_f64(), count)
}

/// Gauss rule for `e^{-β t²/2}` with any `β > 0`.
///
/// Nodes are eigenvalues of the Jacobi matrix of the orthonormal Hermite
/// family (off-diagonal `sqrt(k)`), polished by one Newton step; weights are
/// the Christoffel numbers `1 / Σ_k φ_k(t_j)²`.
pub fn gaussian_rule_with_precision(beta: f64, count: usize) -> Result<QuadratureRule> {
    if count == 0 {
        return Err(Error::InvalidParameter("rule needs at least one node".into()));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("precision must be positive, got {beta}")));
    }
    let diag = vec![0.0; count];
    let sub: Vec<f64> = (1..count).map(|k| (k as f64).sqrt()).collect();
    let mut nodes = tridiag_eigs(&diag, &sub)?;
    let cf = count as f64;
    for y in nodes.iter_mut() {
        for _ in 0..2 {
            let psi = weighted_values(1.0, count, *y);
            let deriv = cf.sqrt() * psi[count - 1];
            if deriv != 0.0 {
                *y -= psi[count] / deriv;
            }
        }
    }
    // the rule is symmetric; enforce it exactly
    for j in 0..count / 2 {
        let m = 0.5 * (nodes[count - 1 - j] - nodes[j]);
        nodes[j] = -m;
        nodes[count - 1 - j] = m;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    let scale = beta.sqrt();
    let mut weights = Vec::with_capacity(count);
    for &y in &nodes {
        let psi = weighted_values(1.0, count - 1, y);
        let christoffel: f64 = psi.iter().map(|v| v * v).sum();
        // ψ already carries e^{-y²/2}; undo it in log space
        weights.push((-0.5 * y * y - christoffel.ln()).exp() / scale);
    }
    Ok(QuadratureRule {
        nodes: nodes.into_iter().map(|y| y / scale).collect(),
        weights,
        weight_kind: WeightKind::Gaussian(beta),
        exact_degree: 2 * count - 1,
    })
}

/// `∫ f p_N` for a polynomial `f` of degree at most `degree`, exact up to
/// rounding: `p_N` is `e^{-N t²/2}` times a polynomial of degree `2N - 2`.
pub fn density_expectation_poly(
    n: EnsembleSize,
    degree: usize,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let count = (degree + 2 * n.as_usize()) / 2 + 1;
    let rule = gaussian_rule(n, count)?;
    let nf = n.as_f64();
    Ok(rule.integrate(|t| {
        let psi = weighted_values(nf, n.as_usize() - 1, t);
        let sq: f64 = psi.iter().map(|v| v * v).sum();
        f(t) * sq * (0.5 * nf * t * t).exp() / nf
    }))
}

/// Gauss–Legendre rule on `[-1, 1]` by Newton iteration on `P_count`.
pub fn gauss_legendre(count: usize) -> Result<QuadratureRule> {
    if count == 0 {
        return Err(Error::InvalidParameter("rule needs at least one node".into()));
    }
    let nf = count as f64;
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if count == 1 { x } else { p1 };
            let pm1 = if count == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        weight_kind: WeightKind::Plain,
        exact_degree: 2 * count - 1,
    })
}

fn gl15() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15).expect("fixed order"))
}

/// 15-point Gauss–Legendre on `[a, b]`.
pub fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let rule = gl15();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Neumaier::default();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc.add(w * f(mid + half * x));
    }
    half * acc.sum()
}

/// Result of [`integrate_line`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

const PANEL_BUDGET: usize = 50_000;
const MAX_DOUBLINGS: usize = 12;

/// Integrates `f` over the real line to absolute tolerance `tol`.
///
/// The caller asserts that `|f|` decays at least like
/// `exp(-(t - center)² / (2 scale²))` away from `center`. The interval
/// starts at `center ± 8·scale` and doubles until the Gaussian tail bound
/// computed from the integrand's size near each end drops below `tol/4`.
/// Each panel is refined by bisection until the 15-point rule on the panel
/// and on its halves agree.
pub fn integrate_line(
    f: impl Fn(f64) -> f64,
    center: f64,
    scale: f64,
    tol: f64,
) -> Result<LineIntegral> {
    if !center.is_finite() || !(scale > 0.0) || !scale.is_finite() || !(tol > 0.0) {
        return Err(Error::InvalidParameter(
            "integrate_line needs finite center, positive scale and tolerance".into(),
        ));
    }
    let mut state = Adaptive {
        f: &f,
        density: tol / (32.0 * scale),
        value: Neumaier::default(),
        error: 0.0,
        magnitude: 0.0,
        panels: 0,
        tol,
        min_width: 1e-10 * scale,
    };
    let mut half_width = 8.0 * scale;
    let initial = 16;
    let h = 2.0 * half_width / initial as f64;
    for i in 0..initial {
        let a = center - half_width + h * i as f64;
        state.integrate(a, a + h)?;
    }
    let tail = |hw: f64| -> f64 {
        let edge = |sign: f64| {
            (0..=8)
                .map(|j| f(center + sign * (hw - scale * j as f64 / 8.0)).abs())
                .fold(0.0, f64::max)
        };
        2.0 * (edge(1.0) + edge(-1.0)) * scale * scale / (hw - scale)
    };
    let mut doublings = 0;
    let mut tail_est = tail(half_width);
    while tail_est > 0.25 * tol {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::IntegrationBudget {
                tol,
                budget: state.panels,
                estimate: state.error + tail_est,
            });
        }
        let new_hw = 2.0 * half_width;
        let pieces = 8;
        let step = (new_hw - half_width) / pieces as f64;
        for i in 0..pieces {
            let a = center + half_width + step * i as f64;
            state.integrate(a, a + step)?;
            let b = center - half_width - step * i as f64;
            state.integrate(b - step, b)?;
        }
        half_width = new_hw;
        doublings += 1;
        tail_est = tail(half_width);
    }
    let roundoff = 8.0 * f64::EPSILON * state.magnitude;
    Ok(LineIntegral {
        value: state.value.sum(),
        error: state.error + tail_est + roundoff,
        panels: state.panels,
    })
}

struct Adaptive<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    density: f64,
    value: Neumaier,
    error: f64,
    magnitude: f64,
    panels: usize,
    tol: f64,
    min_width: f64,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    fn integrate(&mut self, a: f64, b: f64) -> Result<()> {
        let mut stack = vec![(a, b, panel(self.f, a, b))];
        while let Some((a, b, whole)) = stack.pop() {
            self.panels += 1;
            if self.panels > PANEL_BUDGET {
                return Err(Error::IntegrationBudget {
                    tol: self.tol,
                    budget: PANEL_BUDGET,
                    estimate: self.error,
                });
            }
            let m = 0.5 * (a + b);
            let left = panel(self.f, a, m);
            let right = panel(self.f, m, b);
            let refined = left + right;
            let diff = (refined - whole).abs();
            let local = self.density * (b - a);
            if diff <= local || diff <= 4.0 * f64::EPSILON * refined.abs() || (b - a) < self.min_width {
                self.value.add(refined);
                self.error += diff;
                self.magnitude += left.abs() + right.abs();
            } else {
                stack.push((a, m, left));
                stack.push((m, b, right));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(p: usize) -> f64 {
        let mut c = 1.0;
        for k in 0..p {
            c = c * 2.0 * (2 * k + 1) as f64 / (k + 2) as f64;
        }
        c
    }

    #[test]
    fn semicircle_rule_moments() {
        let r1 = semicircle_rule(1).unwrap();
        assert!((r1.mass() - 2.0 * PI).abs() < 1e-14);
        let r2 = semicircle_rule(2).unwrap();
        assert!((r2.integrate(|t| t * t) - 2.0 * PI).abs() < 1e-13);
        let r5 = semicircle_rule(5).unwrap();
        assert!((r5.integrate(|t| t.powi(8)) / (2.0 * PI) - 14.0).abs() < 1e-12);
        let r9 = semicircle_rule(9).unwrap();
        for p in 0..=8 {
            let m = r9.integrate(|t| t.powi(2 * p as i32)) / (2.0 * PI);
            assert!((m - catalan(p)).abs() <= 1e-11 * catalan(p), "p={p}");
        }
    }

    #[test]
    fn gaussian_rule_moments() {
        let n1 = EnsembleSize::new(1).unwrap();
        let r = gaussian_rule(n1, 2).unwrap();
        assert!((r.integrate(|t| t * t) - (2.0 * PI).sqrt()).abs() < 1e-13);
        for n in [1u32, 3, 17] {
            let r = gaussian_rule(EnsembleSize::new(n).unwrap(), 7).unwrap();
            assert!((r.mass() - r.exact_mass()).abs() < 1e-12 * r.exact_mass());
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn gaussian_rule_exactness_large_count() {
        let r = gaussian_rule_with_precision(1.0, 60).unwrap();
        // E[t^{2p}] = (2p-1)!! for the standard normal
        let mut dfact = 1.0;
        for p in 0..60 {
            if p > 0 {
                dfact *= (2 * p - 1) as f64;
            }
            let m = r.integrate(|t| t.powi(2 * p)) / (2.0 * PI).sqrt();
            assert!((m - dfact).abs() <= 1e-11 * dfact, "p={p} m={m} exact={dfact}");
        }
    }

    #[test]
    fn legendre_rule_is_exact() {
        let r = gauss_legendre(15).unwrap();
        for p in 0..30 {
            let exact = if p % 2 == 0 { 2.0 / (p + 1) as f64 } else { 0.0 };
            assert!((r.integrate(|t| t.powi(p)) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn line_integral_gaussian() {
        let r = integrate_line(|t| (-0.5 * t * t).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!(r.error >= (r.value - (2.0 * PI).sqrt()).abs());
    }

    #[test]
    fn line_integral_rejects_bad_arguments() {
        assert!(integrate_line(|t| t, 0.0, 0.0, 1e-8).is_err());
        assert!(integrate_line(|t| t, f64::NAN, 1.0, 1e-8).is_err());
    }

    #[test]
    fn line_integral_reports_non_decaying_integrand() {
        let r = integrate_line(|_| 1.0, 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::IntegrationBudget { .. })));
    }
}
