use crate::function::FunctionSpec;
use crate::output::{Cell, Report};
use crate::{BatchFormat, Cli, Command, Failure};
use gue_core::expansion::{calibrate_threshold, polynomial_moment, resum};
use gue_core::hermite::DensityProfile;
use gue_core::laplace::{kernel_laplace, kernel_laplace_abs_mass, kernel_laplace_by_quadrature, StirlingTable};
use gue_core::mc::sample_spectra;
use gue_core::quadrature::density_expectation_poly;
use gue_core::verify::{gauss_reference, run_suite, SUITES};
use gue_core::EnsembleSize;
use num_complex::Complex64;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Density(_) => "density",
        Command::Laplace(_) => "laplace",
        Command::Resum(_) => "resum",
        Command::Moments(_) => "moments",
        Command::Stirling(_) => "stirling",
        Command::Sample(_) => "sample",
        Command::Verify(_) => "verify",
    }
}

fn size(n: u32) -> Result<EnsembleSize, Failure> {
    EnsembleSize::new(n).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let (report, ok) = match &cli.command {
        Command::Density(a) => (density(a)?, true),
        Command::Laplace(a) => (laplace(a)?, true),
        Command::Resum(a) => (resummation(a)?, true),
        Command::Moments(a) => (moments(a)?, true),
        Command::Stirling(a) => (stirling(a)?, true),
        Command::Sample(a) => (sample(a)?, true),
        Command::Verify(a) => verify(a)?,
    };
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    report.write(cli.format, &mut out)?;
    out.flush()?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn density(a: &crate::DensityArgs) -> Result<Report, Failure> {
    let n = size(a.n)?;
    let single = a.points == 1 && a.from == a.to;
    if !single && (a.points < 2 || a.from >= a.to) {
        return Err(Failure::Usage(
            "density needs --from < --to and --points ≥ 2 (or a single point with --from = --to)".into(),
        ));
    }
    let prof = DensityProfile::uniform(n, a.from, a.to, a.points, a.derivs)?;
    let mut cols = vec!["x", "p"];
    if a.derivs {
        cols.extend(["dp", "d2p", "d3p"]);
    }
    let mut r = Report::new("density", &cols);
    r.param("n", a.n).param("from", a.from).param("to", a.to).param("points", a.points);
    for (i, (&x, &p)) in prof.grid.iter().zip(&prof.values).enumerate() {
        let mut row = vec![Cell::Float(x), Cell::Float(p)];
        if let Some(d) = &prof.derivs {
            row.extend(d[i].iter().map(|&v| Cell::Float(v)));
        }
        r.row(row);
    }
    if !single {
        r.note(format!("trapezoid mass {}", crate::output::format_float(prof.trapezoid_mass())));
    }
    Ok(r)
}

fn laplace(a: &crate::LaplaceArgs) -> Result<Report, Failure> {
    let n = size(a.n)?;
    let lm = if a.density { 0.0 } else { a.lambda_minus };
    if !lm.is_finite() {
        return Err(Failure::Usage("--lambda-minus must be finite".into()));
    }
    let mut cols = vec!["n", "s_re", "s_im", "lambda_minus", "value_re", "value_im"];
    if a.verify {
        cols.extend(["quadrature_re", "quadrature_im", "rel_error"]);
    }
    let divisor = if a.density { n.as_f64() } else { 1.0 };
    let value = kernel_laplace(n, a.s, lm)?.value / divisor;
    let mut r = Report::new("laplace", &cols);
    r.param("n", a.n)
        .param("target", if a.density { "density" } else { "kernel" });
    let mut row: Vec<Cell> = vec![
        a.n.into(),
        a.s.re.into(),
        a.s.im.into(),
        lm.into(),
        value.re.into(),
        value.im.into(),
    ];
    if a.verify {
        let mass = kernel_laplace_abs_mass(n, a.s, lm)? / divisor;
        // the transform has exact zeros; there errors are relative to ∫|integrand|
        let scale = if value.norm() < 1e-6 * mass {
            r.note("transform is numerically zero; error relative to the integral of |integrand|");
            mass
        } else {
            value.norm()
        };
        let quad: Complex64 = kernel_laplace_by_quadrature(n, a.s, lm, 1e-12 * scale * divisor)? / divisor;
        row.extend([quad.re.into(), quad.im.into(), ((value - quad).norm() / scale).into()]);
    }
    r.row(row);
    Ok(r)
}

fn resummation(a: &crate::ResumArgs) -> Result<Report, Failure> {
    let n = size(a.n)?;
    if let Some(s) = a.sigma {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Failure::Usage(format!("--sigma must be positive, got {s}")));
        }
    }
    let prepared = a.function.prepare(a.terms, a.sigma)?;
    let id = a.function.to_string();
    let mut res = resum(&prepared.series, n, a.terms, &id);

    let mut r = Report::new(
        "resum",
        if a.compare {
            &["m", "alpha", "partial_sum", "abs_error", "rel_error"]
        } else {
            &["m", "alpha", "partial_sum"]
        },
    );
    r.param("n", a.n)
        .param("function", id.as_str())
        .param("terms", a.terms)
        .param("truncation", prepared.series.truncation);
    if let Some(s) = prepared.sigma {
        r.param("sigma", s);
    }
    if let Some(t) = prepared.series.tail_bound {
        r.param("tail_bound", t);
    }

    if let FunctionSpec::Gauss(s) = a.function {
        if s > 0.0 {
            let first = (2.0 * s).floor() as u32 + 1;
            let ns: Vec<u32> = (first..=a.n.max(24).max(first)).collect();
            let m_final = a.terms.max(1);
            let m_mono = a.terms.min(3);
            let report = calibrate_threshold(&prepared.series, &ns, m_mono, m_final, 1e-6, |m| gauss_reference(m, s))?;
            res = res.with_threshold(report.threshold);
            match report.threshold {
                Some(n0) => {
                    r.param("calibrated_threshold", n0);
                    if res.below_threshold {
                        r.note(format!("N = {} is below the calibrated threshold N0 = {n0}", a.n));
                    }
                }
                None => r.note(format!(
                    "no calibrated threshold within N = {first}..={}; partial sums may not converge",
                    ns.last().copied().unwrap_or(first)
                )),
            }
        }
    }
    if !res.alpha.guard_ok {
        r.note("the stored truncation does not cover the 4M guard indices");
    }

    let reference = if a.compare {
        let v = prepared.reference(&a.function, n)?;
        r.param("reference", v);
        match a.function {
            FunctionSpec::Exp(x) => {
                r.param("closed_form", gue_core::laplace::density_laplace_real(n, x)?);
            }
            FunctionSpec::Cos(x) => {
                r.param("closed_form", gue_core::laplace::density_laplace(n, Complex64::new(0.0, x))?.re);
            }
            _ => {}
        }
        Some(v)
    } else {
        None
    };
    for (m, (&alpha, &sum)) in res.alpha.values.iter().zip(&res.partial_sums).enumerate() {
        let mut row = vec![Cell::from(m), alpha.into(), sum.into()];
        if let Some(v) = reference {
            let err = (sum - v).abs();
            row.extend([err.into(), (err / v.abs().max(f64::MIN_POSITIVE)).into()]);
        }
        r.row(row);
    }
    Ok(r)
}

fn moments(a: &crate::MomentsArgs) -> Result<Report, Failure> {
    let n = size(a.n)?;
    let mut r = Report::new("moments", &["p", "quadrature", "series", "difference"]);
    r.param("n", a.n).param("max", a.max);
    for p in 0..=a.max {
        let quad = density_expectation_poly(n, p, |t| t.powi(p as i32))?;
        let series = polynomial_moment(p, n);
        r.row(vec![p.into(), quad.into(), series.into(), (quad - series).into()]);
    }
    Ok(r)
}

fn stirling(a: &crate::StirlingArgs) -> Result<Report, Failure> {
    let table = StirlingTable::new(a.max_n)?;
    let mut r = Report::new("stirling", &["n", "k", "value"]);
    r.param("max_n", a.max_n);
    for n in 0..=a.max_n {
        for (k, &v) in table.row(n).iter().enumerate() {
            r.row(vec![n.into(), k.into(), Cell::Big(v)]);
        }
    }
    Ok(r)
}

fn sample(a: &crate::SampleArgs) -> Result<Report, Failure> {
    let n = size(a.n)?;
    if a.count == 0 {
        return Err(Failure::Usage("--count must be positive".into()));
    }
    let batch = sample_spectra(n, a.count, a.seed)?;
    let file = std::fs::File::create(&a.out).map_err(|e| Failure::Numeric(format!("{}: {e}", a.out.display())))?;
    let mut w = BufWriter::new(file);
    match a.batch_format {
        BatchFormat::Csv => batch.write_csv(&mut w)?,
        BatchFormat::Binary => batch.write_binary(&mut w)?,
    }
    w.flush()?;
    let mut r = Report::new("sample", &["path", "format", "n", "count", "seed"]);
    r.row(vec![
        a.out.display().to_string().into(),
        match a.batch_format {
            BatchFormat::Csv => "csv",
            BatchFormat::Binary => "binary",
        }
        .into(),
        a.n.into(),
        a.count.into(),
        a.seed.into(),
    ]);
    Ok(r)
}

fn verify(a: &crate::VerifyArgs) -> Result<(Report, bool), Failure> {
    let suites: Vec<&str> = match &a.suite {
        Some(s) => vec![s.as_str()],
        None => SUITES.to_vec(),
    };
    let mut r = Report::new("verify", &["suite", "check", "measured", "threshold", "passed"]);
    let mut all = true;
    for suite in suites {
        match run_suite(suite) {
            Ok(checks) => {
                for c in checks {
                    all &= c.passed;
                    r.row(vec![suite.into(), c.name.into(), c.measured.into(), c.threshold.into(), c.passed.into()]);
                }
            }
            Err(e) => {
                all = false;
                r.row(vec![suite.into(), format!("error: {e}").into(), f64::NAN.into(), f64::NAN.into(), false.into()]);
            }
        }
    }
    r.param("passed", all);
    Ok((r, all))
}
