use serde_json::Value;
use std::process::{Command, Output};

fn gue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gue")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of CSV output, header checked against `header`.
fn csv_rows(o: &Output, header: &str) -> Vec<Vec<String>> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = gue(&full);
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "JSON does not round-trip");
    v
}

#[test]
fn density_single_points() {
    let rows = csv_rows(&gue(&["density", "--n", "1", "--from", "0", "--to", "0", "--points", "1"]), "x,p");
    assert_eq!(rows.len(), 1);
    assert!((num(&rows[0][1]) - 0.3989422804).abs() < 1e-10);
    let rows = csv_rows(&gue(&["density", "--n", "2", "--from", "0", "--to", "0", "--points", "1"]), "x,p");
    assert!((num(&rows[0][1]) - 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-10);
}

#[test]
fn density_grid_mass_and_derivatives() {
    let rows = csv_rows(
        &gue(&["density", "--n", "8", "--from", "-3", "--to", "3", "--points", "601"]),
        "x,p",
    );
    assert_eq!(rows.len(), 601);
    let xs: Vec<f64> = rows.iter().map(|r| num(&r[0])).collect();
    let ps: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert!(ps.iter().all(|&p| p >= 0.0));
    let mass: f64 = xs.windows(2).zip(ps.windows(2)).map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1])).sum();
    // mass outside [-3, 3] at N = 8 is below 1e-8
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");

    let rows = csv_rows(
        &gue(&["density", "--n", "3", "--from", "-1", "--to", "1", "--points", "3", "--derivs"]),
        "x,p,dp,d2p,d3p",
    );
    // p is even: p' and p''' vanish at 0
    assert!(num(&rows[1][2]).abs() < 1e-15 && num(&rows[1][4]).abs() < 1e-13);
}

#[test]
fn laplace_examples() {
    let header = "n,s_re,s_im,lambda_minus,value_re,value_im";
    let r = csv_rows(&gue(&["laplace", "--n", "5", "--s", "0"]), header);
    assert_eq!(num(&r[0][4]), 5.0);
    let r = csv_rows(&gue(&["laplace", "--n", "5", "--s", "0", "--density"]), header);
    assert_eq!(num(&r[0][4]), 1.0);
    let r = csv_rows(&gue(&["laplace", "--n", "2", "--s", "1", "--density"]), header);
    let want = 0.25f64.exp() * 1.25;
    assert!((num(&r[0][4]) - want).abs() < 1e-14);
    let r = csv_rows(
        &gue(&["laplace", "--n", "5", "--s", "1.2", "--lambda-minus", "0.4", "--verify"]),
        "n,s_re,s_im,lambda_minus,value_re,value_im,quadrature_re,quadrature_im,rel_error",
    );
    assert!(num(&r[0][8]) < 1e-8);
}

#[test]
fn laplace_accepts_negative_and_complex_arguments() {
    let r = csv_rows(
        &gue(&["laplace", "--n", "4", "--s", "-0.5,-1.5", "--lambda-minus", "-0.3", "--verify"]),
        "n,s_re,s_im,lambda_minus,value_re,value_im,quadrature_re,quadrature_im,rel_error",
    );
    assert_eq!((num(&r[0][1]), num(&r[0][2]), num(&r[0][3])), (-0.5, -1.5, -0.3));
    assert!(num(&r[0][8]) < 1e-8);
}

#[test]
fn resum_examples() {
    let r = csv_rows(
        &gue(&["resum", "--n", "2", "--function", "monomial:4", "--terms", "3", "--compare"]),
        "m,alpha,partial_sum,abs_error,rel_error",
    );
    let alpha: Vec<f64> = r.iter().map(|row| num(&row[1])).collect();
    assert_eq!(alpha, vec![2.0, 1.0, 0.0, 0.0]);
    assert_eq!(num(&r[3][2]), 2.25);
    assert!(num(&r[3][3]) < 1e-13);

    let v = json(&["resum", "--n", "8", "--function", "exp:1", "--terms", "12", "--compare"]);
    let closed = v["parameters"]["closed_form"].as_f64().unwrap();
    let last = v["rows"][12][2].as_f64().unwrap();
    assert!((last - closed).abs() / closed < 1e-8);

    let r = csv_rows(&gue(&["resum", "--n", "8", "--function", "monomial:0", "--terms", "2"]), "m,alpha,partial_sum");
    assert!(r.iter().all(|row| num(&row[2]) == 1.0));
}

#[test]
fn resum_other_families() {
    let v = json(&["resum", "--n", "6", "--function", "gauss:0.125", "--terms", "10", "--compare"]);
    assert!(v["parameters"]["calibrated_threshold"].as_u64().is_some());
    assert!(v["rows"][10][4].as_f64().unwrap() < 1e-6);
    let v = json(&["resum", "--n", "5", "--function", "cos:1.5", "--terms", "10", "--compare"]);
    let closed = v["parameters"]["closed_form"].as_f64().unwrap();
    assert!((v["rows"][10][2].as_f64().unwrap() - closed).abs() < 1e-9);
    let v = json(&["resum", "--n", "5", "--function", "exp:-2", "--terms", "12", "--compare"]);
    assert!(v["rows"][12][4].as_f64().unwrap() < 1e-9);
}

#[test]
fn resum_from_taylor_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.txt");
    let mut text = String::from("# e^t\n\n");
    let mut c = 1.0f64;
    for k in 0..=120 {
        text.push_str(&format!("{c:e}\n"));
        c /= f64::from(k + 1);
    }
    std::fs::write(&path, text).unwrap();
    let spec = format!("taylor-file:{}", path.display());
    let v = json(&["resum", "--n", "8", "--function", &spec, "--terms", "8", "--sigma", "0.0625", "--compare"]);
    let want = 1.5915340860837734;
    assert!((v["rows"][8][2].as_f64().unwrap() - want).abs() < 1e-10);

    std::fs::write(&path, "1\n2\nnot-a-number\n").unwrap();
    let o = gue(&["resum", "--n", "3", "--function", &spec, "--terms", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn growth_violation_is_a_numeric_failure() {
    let o = gue(&["resum", "--n", "8", "--function", "gauss:1", "--terms", "4", "--sigma", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("growth bound"));
}

#[test]
fn moments_and_stirling() {
    let r = csv_rows(&gue(&["moments", "--n", "4", "--max", "6"]), "p,quadrature,series,difference");
    assert_eq!(r.len(), 7);
    assert!((num(&r[4][1]) - 2.0625).abs() < 1e-12);
    assert_eq!(num(&r[4][2]), 2.0625);
    let r = csv_rows(&gue(&["stirling", "--max-n", "5"]), "n,k,value");
    assert!(r.iter().any(|row| row == &["5", "1", "24"]));
    let v = json(&["stirling", "--max-n", "34"]);
    let big = v["rows"].as_array().unwrap().iter().find(|row| row[0] == 34 && row[1] == 1).unwrap();
    // [34, 1] = 33!
    assert_eq!(big[2], "8683317618811886495518194401280000000");
}

#[test]
fn sample_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (threads, name) in [("1", "a.bin"), ("4", "b.bin")] {
        let path = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_gue"))
            .env("GUE_THREADS", threads)
            .args(["sample", "--n", "6", "--count", "300", "--seed", "42", "--batch-format", "binary", "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(o.status.success());
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(&files[0][..4], b"GUE1");
    assert_eq!(files[0].len(), 28 + 300 * 6 * 8);

    let csv = dir.path().join("c.csv");
    let o = gue(&["sample", "--n", "3", "--count", "5", "--seed", "1", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.split(',').count() == 3));
}

#[test]
fn verify_reports_and_exits() {
    let o = gue(&["verify", "--suite", "ode"]);
    let r = csv_rows(&o, "suite,check,measured,threshold,passed");
    assert!(r.iter().all(|row| row.last().unwrap() == "true"));
    let v = json(&["verify", "--suite", "stirling"]);
    assert_eq!(v["parameters"]["passed"], true);
}

#[test]
fn json_round_trips_for_every_command() {
    json(&["density", "--n", "3", "--from", "-2", "--to", "2", "--points", "9", "--derivs"]);
    json(&["laplace", "--n", "3", "--s", "0.1,0.7", "--verify"]);
    json(&["resum", "--n", "4", "--function", "exp:0.5", "--terms", "5", "--compare"]);
    json(&["moments", "--n", "7", "--max", "10"]);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["density", "--n", "3", "--from", "1", "--to", "0", "--points", "5"],
        vec!["density", "--n", "3", "--from", "0", "--to", "1", "--points", "1"],
        vec!["density", "--n", "0", "--from", "0", "--to", "1", "--points", "3"],
        vec!["laplace", "--n", "3", "--s", "1,2,3"],
        vec!["laplace", "--n", "3", "--s", "1", "--density", "--lambda-minus", "0.2"],
        vec!["resum", "--n", "3", "--function", "sin:1", "--terms", "2"],
        vec!["verify", "--suite", "nope"],
        vec!["frobnicate"],
        vec!["moments", "--n", "3"],
    ] {
        let o = gue(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = Command::new(env!("CARGO_BIN_EXE_gue"))
        .env("GUE_THREADS", "0")
        .args(["moments", "--n", "2", "--max", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_one() {
    let o = gue(&["stirling", "--max-n", "35"]);
    assert_eq!(o.status.code(), Some(1));
    let o = gue(&["resum", "--n", "1", "--function", "gauss:1", "--terms", "3", "--compare"]);
    assert_eq!(o.status.code(), Some(1));
}
