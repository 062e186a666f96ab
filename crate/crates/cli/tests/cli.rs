use std::process::{Command, Output};

use critline::families::weng_direct;
use num_complex::Complex64;
use serde_json::Value;

fn critline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critline"))
        .args(args)
        .env_remove("CRITLINE_TOL")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = critline(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("json output");
    assert_eq!(v["schema"], "critline/1");
    v["result"].clone()
}

fn pair(v: &Value) -> Complex64 {
    Complex64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn csv_rows(out: &Output) -> Vec<Vec<f64>> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn eval_zeta2_matches_closed_form() {
    let r = json(&["eval", "--family", "zeta2", "--alpha", "0.3466", "--beta", "1", "--s", "2+0i"]);
    // h(s) = e^{alpha s}(s - beta), f = h(s) - h(-s)
    let h = |s: f64| (0.3466 * s).exp() * (s - 1.0);
    let f = pair(&r["f"]);
    assert!((f.re - (h(2.0) - h(-2.0))).abs() < 1e-10 && f.im == 0.0);
    assert!((pair(&r["h"]).re - h(2.0)).abs() < 1e-10);
}

#[test]
fn eval_weng_matches_direct_formula() {
    let r = json(&["eval", "--family", "weng", "--T", "1", "--s", "0.7+2i"]);
    let s = Complex64::new(0.7, 2.0);
    let want = weng_direct(1.0, s).unwrap();
    let got = pair(&r["original"]);
    assert!((got - want).norm() < 1e-10 * want.norm(), "{got} vs {want}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["eval", "--family", "weng", "--T", "1", "--s", "0.7+2x"][..],
        &["eval", "--family", "zeta2", "--alpha", "1", "--s", "1"][..],
        &["eval", "--family", "unknown", "--s", "1"][..],
        &["figure", "nope"][..],
        &["report"][..],
        &["verify"][..],
    ] {
        assert_eq!(critline(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn report_alpha_eight_has_two_offline_zeros() {
    let r = json(&["report", "--family", "zeta-translate", "--alpha", "8", "--sign", "plus", "--T", "5"]);
    assert_eq!(r["n"].as_i64().unwrap() - r["n0"].as_i64().unwrap(), 2);
    assert_eq!(r["bound_ok"], true);
}

#[test]
fn report_lists_the_real_zero() {
    let r = json(&["report", "--family", "eisenstein-a0", "--y", "8", "--T", "30"]);
    let real = r["inventory"]["real_zeros"].as_array().unwrap();
    let rho: Vec<f64> = real.iter().map(|z| z["location"][0].as_f64().unwrap()).filter(|&x| x > 0.5).collect();
    assert_eq!(rho.len(), 1);
    assert!(rho[0] > 0.5 && rho[0] < 1.0);
    assert_eq!(r["inventory"]["n_f_right"], 1);
}

#[test]
fn report_weng_all_on_line() {
    let out = critline(&["report", "--family", "weng", "--T", "1", "--height", "50", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# critline-csv 1 report\n"));
    assert!(text.contains("# verdict = all zeros on the line and simple\n"));
    assert!(text.contains("# T = 50\n"));
}

#[test]
fn figure_r_changes_sign_at_alpha_star() {
    let out = critline(&["figure", "r_of_alpha"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 946);
    assert!((rows[0][0] - 0.55).abs() < 1e-12 && (rows[945][0] - 10.0).abs() < 1e-9);
    let flips: Vec<f64> = rows.windows(2).filter(|w| (w[0][1] < 0.0) != (w[1][1] < 0.0)).map(|w| w[0][0]).collect();
    assert_eq!(flips.len(), 1);
    assert!(flips[0] < 6.81707 && 6.81707 < flips[0] + 0.01);
}

#[test]
fn figure_u_dips_below_minus_one() {
    let rows = csv_rows(&critline(&["figure", "u-of-tau"]));
    assert_eq!(rows.last().unwrap()[0], 21.0);
    let (imin, min) = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r[1]))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    assert!((min + 1.3805).abs() < 1e-3, "min u = {min}");
    assert!(rows[imin..].last().unwrap()[1] > min + 1.0);
}

#[test]
fn output_is_deterministic() {
    let a = critline(&["verify", "--corpus", "20", "--seed", "9"]);
    let b = critline(&["verify", "--corpus", "20", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = critline(&["verify", "--corpus", "20", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn unstable_poly_fails_a_necessary_condition() {
    let r = json(&["verify", "--poly=-1,0,1"]);
    let check = &r["checks"][0];
    assert_eq!(check["stable"], false);
    assert_eq!(check["stodola"], false);
    assert_eq!(r["passed"], true);
}

#[test]
fn spec_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fam.txt");
    std::fs::write(&path, "# Gaussian form, first shell\nfamily = epstein\na = 1\nb = 0\nc = 1\nn = 1\n").unwrap();
    let from_file = critline(&["eval", "--spec", path.to_str().unwrap(), "--s", "0.3+4i"]);
    let from_flags = critline(&["eval", "--family", "epstein", "--a", "1", "--b", "0", "--c", "1", "--n", "1", "--s", "0.3+4i"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_flags.stdout);
    let missing = critline(&["eval", "--spec", "/nonexistent/fam.txt", "--s", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn tolerance_comes_from_the_environment() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_critline"))
            .args(["trace", "--family", "zeta2", "--alpha", "0.5", "--beta", "1", "--height", "10"])
            .env("CRITLINE_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(run("-1").status.code(), Some(2));
    assert_eq!(run("tight").status.code(), Some(2));
    let out = run("1e-7");
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["tol"].as_f64(), Some(1e-7));
}

#[test]
fn writes_to_an_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.csv");
    let out = critline(&["solve", "y-star", "--format", "csv", "-o", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let want = 4.0 * std::f64::consts::PI * (-0.5772156649015329f64).exp();
    let got: f64 = text.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((got - want).abs() < 1e-10);
}

#[test]
fn locate_finds_the_alpha_eight_zero() {
    let r = json(&["locate", "--family", "zeta-translate", "--alpha", "8", "--sign", "plus", "--box", "7,10,0.5,1.5"]);
    let zs = r["zeros"].as_array().unwrap();
    assert!(zs.iter().any(|z| (pair(&z["location"]) - Complex64::new(8.78369, 1.00496)).norm() < 1e-4));
}
