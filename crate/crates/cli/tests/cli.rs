use std::process::{Command, Output};

use num_traits::Signed;
use qhs_core::scalar::parse_rational;
use qhs_core::{ExactHermiteFamily, Rational};
use serde_json::Value;

fn qhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhs")).args(args).env_remove("QHS_PRECISION").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

const WORKED: [&str; 6] = ["--q", "3/5", "--alpha", "3", "--j", "2"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn classical_rows_match_the_recurrence() {
    let out = qhs(&["classical", "--q", "3/5", "--n-max", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["command"], "classical");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(strings(&rows[2]["coefficients"]), ["-2/5", "0", "1"]);
    assert_eq!(strings(&rows[3]["coefficients"]), ["0", "-98/125", "0", "1"]);
    assert_eq!(rows[1]["gamma"], "2/5");
    assert_eq!(rows[2]["gamma"], "48/125");
    assert!(rows[0]["gamma"].is_null());
    assert_eq!(rows[3]["normalized_norm"], "84672/1953125");

    let family = ExactHermiteFamily::build(parse_rational("3/5").unwrap(), 4).unwrap();
    for (n, row) in rows.iter().enumerate() {
        let parsed: Vec<Rational> =
            strings(&row["coefficients"]).iter().map(|s| parse_rational(s).unwrap()).collect();
        assert_eq!(parsed.as_slice(), family.poly(n).coeffs());
    }
}

#[test]
fn classical_degree_zero_and_csv() {
    let out = qhs(&["classical", "--q", "0.5", "--n-max", "0"]);
    let v = json(&out);
    assert_eq!(strings(&v["rows"][0]["coefficients"]), ["1"]);
    assert_eq!(v["context"]["q"], "1/2");

    let out = qhs(&["classical", "--q", "1/2", "--n-max", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,gamma,normalized_norm,c0,c1,c2");
    assert_eq!(lines[3], "2,3/8,3/16,-1/2,0,1");
}

#[test]
fn bad_base_is_a_usage_error() {
    let out = qhs(&["classical", "--q", "3/2", "--n-max", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("(0, 1)"));
    assert_eq!(code(&qhs(&["classical", "--q", "abc", "--n-max", "2"])), 2);
}

#[test]
fn zero_mass_reproduces_classical() {
    let classical = json(&qhs(&["classical", "--q", "3/5", "--n-max", "5"]));
    let out = qhs(&with(&["sobolev"], &with(&WORKED, &["--lambda-hat", "0", "--n-max", "5"])));
    assert_eq!(code(&out), 0);
    let sob = json(&out);
    assert_eq!(sob["mode"], "exact");
    for n in 0..=5 {
        assert_eq!(sob["rows"][n]["coefficients"], classical["rows"][n]["coefficients"]);
    }
}

#[test]
fn low_degrees_are_unmodified_and_higher_ones_are() {
    let classical = json(&qhs(&["classical", "--q", "3/5", "--n-max", "4"]));
    let sob = json(&qhs(&with(&["sobolev"], &with(&WORKED, &["--lambda-hat", "1", "--n-max", "4"]))));
    for n in 0..=2 {
        assert_eq!(sob["rows"][n]["coefficients"], classical["rows"][n]["coefficients"]);
    }
    for n in 3..=4 {
        assert_ne!(sob["rows"][n]["coefficients"], classical["rows"][n]["coefficients"]);
        let lead = strings(&sob["rows"][n]["coefficients"]).pop().unwrap();
        assert_eq!(lead, "1");
    }
}

#[test]
fn numeric_mass_reports_decimals() {
    let out = qhs(&with(&["sobolev"], &with(&WORKED, &["--lambda", "3/5", "--n-max", "3", "--precision", "20"])));
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["mode"], "decimal");
    assert_eq!(v["context"]["lambda"], "3/5");
    assert_eq!(v["context"]["lambda_hat_digits"], 40);
    let lambda_hat = parse_rational(v["context"]["lambda_hat"].as_str().unwrap()).unwrap();
    let expected = parse_rational("3/5").unwrap() / parse_rational("1.4953562912387512520831257").unwrap();
    let gap = (lambda_hat - expected).abs();
    assert!(gap < parse_rational("1e-24").unwrap());
    let c = &v["rows"][3]["coefficients"][3];
    assert_eq!(c["value"], "1");
    assert_eq!(c["digits"], 20);
}

#[test]
fn mass_flags_are_exclusive_and_required() {
    let both = with(&["sobolev"], &with(&WORKED, &["--lambda", "1", "--lambda-hat", "1", "--n-max", "2"]));
    assert_eq!(code(&qhs(&both)), 2);
    let neither = with(&["sobolev"], &with(&WORKED, &["--n-max", "2"]));
    assert_eq!(code(&qhs(&neither)), 2);
}

#[test]
fn small_mass_point_is_rejected() {
    let out = qhs(&["sobolev", "--q", "3/5", "--alpha", "1/2", "--j", "1", "--lambda-hat", "1", "--n-max", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_passes_on_a_sound_family() {
    let out = qhs(&with(&["verify"], &with(&WORKED, &["--lambda-hat", "3/5", "--n-max", "6"])));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v["summary"]["passed"].as_u64().unwrap() > 100);
    let names: Vec<&str> = v["identities"].as_array().unwrap().iter().map(|s| s["identity"].as_str().unwrap()).collect();
    for name in ["recurrence", "connection", "three_term", "sde1", "sde2", "hypergeometric"] {
        assert!(names.contains(&name), "{name} missing");
    }
    assert!(v["timing_ms"].is_u64());
}

#[test]
fn verify_zero_mass_and_negative_alpha() {
    let args = ["verify", "--q", "1/2", "--alpha", "-2", "--j", "1", "--lambda-hat", "0", "--n-max", "5"];
    let out = qhs(&args);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["summary"]["failed"], 0);
    // The hypergeometric form needs a nonzero mass.
    let hyp = v["identities"].as_array().unwrap().iter().find(|s| s["identity"] == "hypergeometric").unwrap();
    assert_eq!(hyp["passed"], 0);
}

#[test]
fn verify_selected_checks_in_csv() {
    let out = qhs(&with(
        &["verify"],
        &with(&WORKED, &["--lambda-hat", "1", "--n-max", "4", "--checks", "sde1,three_term", "--format", "csv"]),
    ));
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("identity,n,status,detail"));
    for line in lines {
        assert!(line.starts_with("sde1,") || line.starts_with("three_term,"), "{line}");
    }
    let bad = qhs(&with(&["verify"], &with(&WORKED, &["--lambda-hat", "1", "--n-max", "4", "--checks", "nope"])));
    assert_eq!(code(&bad), 2);
}

#[test]
fn corrupted_gamma_is_reported_with_a_witness() {
    let out = qhs(&with(
        &["verify"],
        &with(&WORKED, &["--lambda-hat", "1", "--n-max", "5", "--checks", "recurrence", "--corrupt-gamma", "5"]),
    ));
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let fails: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
    assert_eq!(fails.len(), 1);
    assert_eq!(fails[0]["identity"], "recurrence");
    assert_eq!(fails[0]["n"], 5);
    assert!(!fails[0]["residual"].as_str().unwrap().is_empty());
    assert_eq!(fails[0]["context"]["q"], "3/5");

    let out = qhs(&with(&["verify"], &with(&WORKED, &["--lambda-hat", "1", "--n-max", "2", "--corrupt-gamma", "9"])));
    assert_eq!(code(&out), 2);
}

#[test]
fn plot_single_sample_gives_constant_terms() {
    let out = qhs(&with(
        &["plot-data"],
        &with(&WORKED, &["--lambda-hat", "1", "--n-list", "0..4", "--x-min", "0", "--x-max", "0", "--samples", "1", "--format", "json"]),
    ));
    assert_eq!(code(&out), 0);
    let plot = json(&out);
    let sob = json(&qhs(&with(&["sobolev"], &with(&WORKED, &["--lambda-hat", "1", "--n-max", "4"]))));
    for n in 0..=4 {
        let c0 = parse_rational(sob["rows"][n]["coefficients"][0].as_str().unwrap()).unwrap();
        let shown = parse_rational(plot["columns"][n]["values"][0]["value"].as_str().unwrap()).unwrap();
        assert!((c0 - shown).abs() < parse_rational("1e-30").unwrap());
    }
}

#[test]
fn plot_csv_grid_and_unmodified_columns() {
    let out = qhs(&with(
        &["plot-data"],
        &with(&WORKED, &["--lambda-hat", "1", "--n-list", "2,3", "--samples", "5", "--precision", "16"]),
    ));
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,H2,H3");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("-1,"));
    assert!(lines[3].starts_with("0,-0.4,"));
    assert!(lines[5].starts_with("1,0.6,"));

    let empty = qhs(&with(&["plot-data"], &with(&WORKED, &["--lambda-hat", "1", "--n-list", ""])));
    assert_eq!(code(&empty), 2);
}

#[test]
fn gram_is_diagonal_in_the_worked_context() {
    let out = qhs(&with(&["gram"], &with(&WORKED, &["--lambda", "3/5", "--n-max", "6"])));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert!(v["max_relative_off_diagonal"].as_f64().unwrap() < 1e-20);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 7);
}

#[test]
fn gram_of_the_constant_is_the_norm_constant() {
    let out = qhs(&with(&["gram"], &with(&WORKED, &["--lambda-hat", "1", "--n-max", "0"])));
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let value = v["matrix"][0][0]["value"].as_str().unwrap();
    assert!(value.starts_with("1.49535629123875125208312"), "{value}");
    assert_eq!(v["max_relative_off_diagonal"], 0.0);
}

#[test]
fn low_precision_gram_warns() {
    let out = qhs(&with(&["gram"], &with(&WORKED, &["--lambda-hat", "1", "--n-max", "3", "--precision", "20"])));
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(json(&out)["warning"].is_string());
}

#[test]
fn precision_below_minimum_is_rejected() {
    let out = qhs(&with(&["gram"], &with(&WORKED, &["--lambda-hat", "1", "--n-max", "3", "--precision", "10"])));
    assert_eq!(code(&out), 2);
}

#[test]
fn precision_environment_variable() {
    let args = with(&["sobolev"], &with(&WORKED, &["--lambda", "1", "--n-max", "1"]));
    let out = Command::new(env!("CARGO_BIN_EXE_qhs")).args(&args).env("QHS_PRECISION", "18").output().unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["context"]["precision"], 18);
}
