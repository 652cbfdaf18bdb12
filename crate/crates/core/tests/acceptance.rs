//! Acceptance gate: one line per criterion, exit status 1 if any fails.
//!
//! Reference values are computed here with oracles that do not go through the
//! crate's quadrature or conversion code: composite Simpson on the real line,
//! the trapezoid rule in θ for integrals over [-2, 2], and exact rational
//! Hermite polynomials from their power series.

use gue_core::exact::{frac, int, to_f64};
use gue_core::expansion::*;
use gue_core::gegenbauer::*;
use gue_core::hermite::{density, kernel, ode_residual_scaled};
use gue_core::laplace::*;
use gue_core::mc::*;
use gue_core::verify::{exp_alpha_exact, exp_taylor, gauss_taylor, gauss_threshold, stirling_remainder_slope};
use gue_core::{EnsembleSize, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

fn ens(n: u32) -> EnsembleSize {
    EnsembleSize::new(n).unwrap()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// `∫ g p_N` on [-12, 12]; the density is below 1e-30 outside for every N used here.
fn density_integral(n: u32, g: impl Fn(f64) -> f64) -> f64 {
    simpson(|t| g(t) * density(ens(n), t), -12.0, 12.0, 48_000)
}

/// `∫_0^π h(θ) dθ` for smooth `h` even and 2π-periodic; exact for trig
/// polynomials of degree below `2m`.
fn trapezoid_theta(h: impl Fn(f64) -> f64, m: usize) -> f64 {
    let step = PI / m as f64;
    let inner: f64 = (1..m).map(|j| h(step * j as f64)).sum();
    step * (inner + 0.5 * (h(0.0) + h(PI)))
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(parts: Vec<(String, bool)>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|(_, ok)| *ok),
        detail: parts
            .into_iter()
            .map(|(s, ok)| format!("{s}{}", if ok { "" } else { " [FAIL]" }))
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn at_most(label: &str, measured: f64, limit: f64) -> (String, bool) {
    (format!("{label} {measured:.3e} ≤ {limit:.0e}"), measured <= limit)
}

fn flag(label: &str, ok: bool) -> (String, bool) {
    (label.to_string(), ok)
}

fn criterion_1() -> Result<Outcome> {
    let norm = (1..=32)
        .map(|n| (density_integral(n, |_| 1.0) - 1.0).abs())
        .fold(0.0, f64::max);
    let ode = (1..=16)
        .flat_map(|n| (0..401).map(move |j| ode_residual_scaled(ens(n), -4.0 + 8.0 * j as f64 / 400.0)))
        .fold(0.0, f64::max);
    Ok(outcome(vec![
        at_most("|∫p_N - 1|, N = 1..32:", norm, 1e-10),
        at_most("scaled ODE residual, N ≤ 16:", ode, 1e-7),
    ]))
}

fn criterion_2() -> Result<Outcome> {
    let svals = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 2.0),
    ];
    let mut worst = 0.0f64;
    let mut vanishing = Vec::new();
    for n in [1u32, 2, 5, 10] {
        for &s in &svals {
            for lm in [0.0, 0.3, 1.0] {
                let closed = kernel_laplace(ens(n), s, lm)?.value;
                let f = |t: f64| (s * t).exp() * kernel(ens(n), t + lm, t - lm);
                let re = simpson(|t| f(t).re, -12.0, 12.0, 48_000);
                let im = simpson(|t| f(t).im, -12.0, 12.0, 48_000);
                let quad = Complex64::new(re, im);
                let mass = simpson(|t| f(t).norm(), -12.0, 12.0, 48_000);
                // the closed form has exact zeros on this grid; there use the integral of |integrand|
                let scale = if closed.norm() < 1e-6 * mass {
                    vanishing.push(format!("N={n} s={s} λ₋={lm}"));
                    mass
                } else {
                    closed.norm()
                };
                worst = worst.max((closed - quad).norm() / scale);
            }
        }
    }
    Ok(outcome(vec![
        at_most("worst relative error over 60 grid points:", worst, 1e-8),
        flag(&format!("scaled by ∫|integrand| at zeros: {}", vanishing.join(", ")), true),
    ]))
}

fn criterion_3() -> Result<Outcome> {
    let mut zeros_ok = true;
    let mut worst = 0.0f64;
    for p in 0..=12usize {
        let mut mono = vec![BigRational::zero(); p + 1];
        mono[p] = BigRational::one();
        let alpha = alpha_sequence_exact(&monomials_to_basis(&mono), p / 4 + 4);
        zeros_ok &= alpha.iter().skip(p.div_ceil(4) + 1).all(Zero::is_zero);
        for n in [2u32, 4, 8] {
            let series = to_f64(partial_sums_exact(&alpha, ens(n)).last().unwrap());
            let quad = density_integral(n, |t| t.powi(p as i32));
            worst = worst.max((series - quad).abs() / quad.abs().max(1.0));
        }
    }
    let t4 = [2u32, 4, 8]
        .iter()
        .map(|&n| (density_integral(n, |t| t.powi(4)) - (2.0 + 1.0 / f64::from(n * n))).abs())
        .fold(0.0, f64::max);
    Ok(outcome(vec![
        flag(&format!("α_k(t^p) = 0 past ⌈p/4⌉ for p ≤ 12: {zeros_ok}"), zeros_ok),
        at_most("Σα_k N^-2k vs quadrature moment (rel):", worst, 1e-9),
        at_most("|∫t⁴p_N - (2 + 1/N²)|:", t4, 1e-10),
    ]))
}

fn criterion_4() -> Result<Outcome> {
    let n8 = ens(8);
    let target = density_laplace_real(n8, 1.0)?;

    // exact arithmetic on the degree-100 Taylor polynomial of e^t
    let alpha = exp_alpha_exact(100, 12);
    let sums = partial_sums_exact(&alpha, n8);
    let target_q = density_laplace_exact(n8, &int(1), 60);
    let errs: Vec<BigRational> = sums.iter().map(|s| (s - &target_q).abs()).collect();
    let exact_monotone = errs.windows(2).skip(2).all(|w| w[1] < w[0]);
    let exact_rel12 = to_f64(&errs[12]) / target;

    // floating point, through the certified expansion
    let g = expand_entire_to(&TaylorSeries::entire(exp_taylor(1.0, 80), None), 1.0 / 64.0, 1e-15, 52)?;
    let a = alpha_sequence(&g, 12, "exp");
    let errs_f: Vec<f64> = partial_sums(&a.values, n8).iter().map(|s| (s - target).abs()).collect();
    let float_monotone = monotone_from(&errs_f, 2, 1e-14 * target);
    let rel12 = errs_f[12] / target;

    // e^{t²/8}: threshold from the engine, convergence re-checked against Simpson
    let threshold = gauss_threshold(1..=24)?;
    let sigma = 0.125;
    let g = expand_entire_to(&TaylorSeries::entire(gauss_taylor(sigma, 160), Some(sigma)), sigma, 1e-13, 64)?;
    let a = alpha_sequence(&g, 15, "gauss");
    let mut gauss_worst = 0.0f64;
    if let Some(n0) = threshold {
        for n in n0..=24 {
            let reference = density_integral(n, |t| (sigma * t * t).exp());
            let s15 = partial_sums(&a.values, ens(n))[15];
            gauss_worst = gauss_worst.max((s15 - reference).abs() / reference);
        }
    }
    Ok(outcome(vec![
        flag(&format!("e^t error monotone for m ≥ 2, exact: {exact_monotone}"), exact_monotone),
        at_most("e^t rel error at m = 12, exact:", exact_rel12, 1e-8),
        flag(&format!("e^t error monotone for m ≥ 2, f64 with 1e-14 floor: {float_monotone}"), float_monotone),
        at_most("e^t rel error at m = 12, f64:", rel12, 1e-8),
        flag(&format!("e^{{t²/8}} threshold over N = 1..24: {threshold:?}"), threshold.is_some()),
        at_most("e^{t²/8} worst rel error at m = 15, N ≥ threshold:", gauss_worst, 1e-6),
    ]))
}

fn criterion_5() -> Result<Outcome> {
    let (slope, rem) = stirling_remainder_slope(6, &[8, 16, 32, 64])?;
    let c = c_series(Complex64::from(1.0), 8, None, 1e-15)?;
    let odd = (1..8)
        .step_by(2)
        .map(|l| c.coeffs[l].norm() / c.coeffs[l - 1].norm().max(c.coeffs[l + 1].norm()))
        .fold(0.0, f64::max);
    let rem: Vec<String> = rem.iter().map(|r| format!("{r:.2e}")).collect();
    Ok(outcome(vec![
        (format!("slope {slope:.3} ≤ -6.5 (remainders {})", rem.join(", ")), slope <= -6.5),
        at_most("odd c_l relative to even neighbours:", odd, 1e-12),
    ]))
}

fn random_polynomial(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<f64> {
    let d = rng.gen_range(1..=max_degree);
    (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn criterion_6() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let samples: Vec<f64> = (0..=40).map(|j| -3.0 + 0.15 * j as f64).collect();
    let s_worst = (0..25)
        .map(|_| {
            let p = TaylorSeries::polynomial(random_polynomial(&mut rng, 12));
            s_identity_residual(&taylor_to_gegenbauer(&p), &samples)
        })
        .fold(0.0, f64::max);
    let eig = (0..=40).map(eigen_check).fold(0.0, f64::max);
    let mut step = 0.0f64;
    for _ in 0..10 {
        let p = TaylorSeries::polynomial(random_polynomial(&mut rng, 10));
        let g = taylor_to_gegenbauer(&p);
        let tg = apply_t(&g);
        for n in [3u32, 6] {
            let lhs = density_integral(n, |t| p.eval(t));
            let rhs = semicircle_functional(&g) + density_integral(n, |t| tg.eval(t)) / f64::from(n * n);
            step = step.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    Ok(outcome(vec![
        at_most("S identity residual, 25 random polynomials:", s_worst, 1e-9),
        at_most("eigen relation residual, n ≤ 40:", eig, 1e-9),
        at_most("one-step identity, 10 polynomials at N = 3, 6:", step, 1e-8),
    ]))
}

/// `h_0..h_order` at rational `x` from `h_k(x) = N^{k/2} He_k(√N x)`.
fn hermite_exact(n: i64, order: usize, x: &BigRational) -> Vec<BigRational> {
    let fact = |m: usize| (1..=m).fold(BigInt::one(), |a, v| a * BigInt::from(v));
    (0..=order)
        .map(|k| {
            (0..=k / 2).fold(BigRational::zero(), |sum, j| {
                let c = BigRational::new(fact(k), fact(j) * fact(k - 2 * j) * BigInt::from(2).pow(j as u32));
                let term = c * int(n).pow((k - j) as i32) * x.pow((k - 2 * j) as i32);
                if j % 2 == 0 {
                    sum + term
                } else {
                    sum - term
                }
            })
        })
        .collect()
}

fn criterion_7() -> Result<Outcome> {
    // t = 2cos θ: ∫ f_n f_m (4-t²)^{3/2} dt = 16 ∫_0^π f_n f_m sin⁴θ dθ
    let mut orth = 0.0f64;
    for n in 0..=30 {
        for m in 0..=30 {
            let v = 16.0 * trapezoid_theta(|th| eval_fn(n, 2.0 * th.cos()) * eval_fn(m, 2.0 * th.cos()) * th.sin().powi(4), 64);
            let exact = if n == m { 2.0 * PI * ((n + 1) * (n + 3)) as f64 } else { 0.0 };
            let scale = 2.0 * PI * ((n.max(m) + 1) * (n.max(m) + 3)) as f64;
            orth = orth.max((v - exact).abs() / scale);
            let lib = normalization_check(n, m);
            orth = orth.max((lib - exact).abs() / scale);
        }
    }
    let mut ladder = 0.0f64;
    for j in 0..=24 {
        let t = -2.4 + 0.2 * j as f64;
        let b = basis_with_derivs(30, &t);
        for n in 0..=30 {
            let sum: f64 = (0..n).filter(|m| (n - m) % 2 == 1).map(|m| (m + 2) as f64 * b.values[m]).sum();
            ladder = ladder.max((b.d1[n] - sum).abs() / b.d1[n].abs().max(1.0));
        }
    }
    let cheb = (0..=30)
        .flat_map(|n| (0..=24).map(move |j| chebyshev_link_check(n, -2.4 + 0.2 * j as f64)))
        .fold(0.0, f64::max);
    let mut translation_ok = true;
    for (n, a, x) in [(1, frac(1, 3), frac(-2, 5)), (4, frac(-3, 7), frac(5, 4)), (9, frac(2, 1), frac(1, 9))] {
        let shifted = hermite_exact(n, 15, &(&x + &a));
        let base = hermite_exact(n, 15, &x);
        let na = int(n) * &a;
        for order in 0..=15usize {
            let mut binom = BigRational::one();
            let mut rhs = BigRational::zero();
            for k in 0..=order {
                rhs += &binom * na.pow(k as i32) * &base[order - k];
                binom = binom * int((order - k) as i64) / int(k as i64 + 1);
            }
            translation_ok &= shifted[order] == rhs;
            translation_ok &= gue_core::verify::translation_defect(&int(n), order, &a, &x).is_zero();
        }
    }
    Ok(outcome(vec![
        at_most("orthogonality n,m ≤ 30 (rel):", orth, 1e-9),
        at_most("derivative ladder n ≤ 30:", ladder, 1e-10),
        at_most("Chebyshev second-derivative identity n ≤ 30:", cheb, 1e-10),
        flag(&format!("translation exact in rationals, order ≤ 15: {translation_ok}"), translation_ok),
    ]))
}

fn criterion_8() -> Result<Outcome> {
    let n = 8u32;
    let count = 100_000;
    let batch = sample_spectra(ens(n), count, 20_240_801)?;
    let (lo, hi, bins) = (-2.5, 2.5, 40);
    let hist = histogram(&batch, lo, hi, bins);
    let width = (hi - lo) / bins as f64;
    let mut worst_bin = 0.0f64;
    for (b, &freq) in hist.iter().enumerate() {
        let a = lo + width * b as f64;
        let p = simpson(|t| density(ens(n), t), a, a + width, 200);
        let se = (p * (1.0 - p) / count as f64).sqrt();
        worst_bin = worst_bin.max((freq - p).abs() / se);
    }
    let mut parts = vec![at_most("worst of 40 bins in binomial SE:", worst_bin, 4.0)];
    for p in [2i32, 4] {
        let exact = density_integral(n, |t| t.powi(p));
        let (mean, se) = empirical_moment(&batch, p);
        parts.push(at_most(&format!("m{p} deviation in SE:"), (mean - exact).abs() / se, 3.0));
    }
    let threshold = 3.0;
    let bound = edge_upper_bound(ens(n), threshold);
    let freq = edge_tail_frequency(&batch, threshold);
    let sigma = (bound * (1.0 - bound) / count as f64).sqrt();
    parts.push((
        format!("edge frequency at λ ≥ 3: {freq:.3e} ≤ {bound:.3e} + 4σ"),
        freq <= bound + 4.0 * sigma,
    ));
    Ok(outcome(parts))
}

fn criterion_9() -> Result<Outcome> {
    let p = NormParams::new(0.5, 10.0)?;
    let v: Vec<f64> = [50, 100, 200].iter().map(|&m| t_norm_probe(p, m)).collect();
    let spread = v.iter().map(|x| (x / v[0] - 1.0).abs()).fold(0.0, f64::max);
    Ok(outcome(vec![
        flag(&format!("probe at 50/100/200: {:.6} {:.6} {:.6}", v[0], v[1], v[2]), v.iter().all(|x| x.is_finite())),
        at_most("relative spread:", spread, 0.1),
    ]))
}

fn main() {
    type Criterion = fn() -> Result<Outcome>;
    let criteria: [(&str, Criterion, u64); 9] = [
        ("normalization and ODE", criterion_1, 10),
        ("kernel Laplace transform vs quadrature", criterion_2, 30),
        ("finite moment expansions", criterion_3, 5),
        ("convergence of the resummation", criterion_4, 60),
        ("1/N series of the transform", criterion_5, 5),
        ("operator identities", criterion_6, 10),
        ("basis and Hermite identities", criterion_7, 10),
        ("Monte Carlo concordance", criterion_8, 180),
        ("boundedness probe", criterion_9, 5),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*budget);
        let (passed, detail) = match result {
            Ok(o) => (o.passed && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name} ({:.2} s, limit {budget} s{}) {detail}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over time" },
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
