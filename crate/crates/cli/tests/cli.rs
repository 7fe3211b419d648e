//! End-to-end runs of the `commutant` binary: output text and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const REFERENCE_A: &str = "\
# commutant-v1
name = A
a2 = 1
a1 = 2 + 2*sin(w0*t)
a0 = 5 - 0.5*cos(2*w0*t) + 2*sin(w0*t) + w0*cos(w0*t)
param w0 = 1
domain = 0, 20
";

const OSCILLATOR: &str = "\
name = oscillator
a2 = 1
a1 = 0
a0 = 1
domain = 0, 4
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_commutant"))
        .args(args)
        .env("COMMUTANT_NO_COLOR", "1")
        .output()
        .expect("failed to launch commutant")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by signal")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn result_line(text: &str) -> &str {
    text.lines()
        .rev()
        .find(|l| l.starts_with("RESULT:"))
        .expect("no RESULT line")
}

fn result_field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    result_line(text)
        .split_whitespace()
        .find_map(|w| w.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {}", result_line(text)))
        .parse()
        .unwrap()
}

#[test]
fn catalog_list_has_thirty_rows() {
    let o = run(&["catalog", "--list"]);
    assert_eq!(code(&o), 0);
    let rows = stdout(&o)
        .lines()
        .filter(|l| l.split_whitespace().next().is_some_and(|w| w.parse::<u32>().is_ok()))
        .count();
    assert_eq!(rows, 30);
}

#[test]
fn catalog_show_chebyshev_is_always() {
    let o = run(&["catalog", "--show", "chebyshev"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Always"), "{}", stdout(&o));
}

#[test]
fn catalog_unknown_name_is_input_error() {
    let o = run(&["catalog", "--show", "no-such-equation"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no-such-equation"));
}

#[test]
fn check_chebyshev_prints_constant() {
    let o = run(&["check", "--catalog", "chebyshev"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("A0 = 9.000000000 (n=3)"), "{}", stdout(&o));
    assert!(result_line(&stdout(&o)).contains("verdict=Always"));
}

#[test]
fn check_bessel_is_negative_with_witness() {
    let o = run(&["check", "--catalog", "bessel"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("witness"), "{out}");
    assert!(result_line(&out).contains("verdict=NotConstant"));
}

#[test]
fn check_anger_under_condition() {
    let o = run(&["check", "--catalog", "anger", "--condition", "v = 0.5"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!((result_field(&stdout(&o), "a0") - 1.0).abs() < 1e-9);
    let o = run(&["check", "--catalog", "anger"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn check_system_file_with_vanishing_leading_coefficient() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.sys", "a2 = t\na1 = 0\na0 = 1\ndomain = -1, 1\n");
    let o = run(&["check", "--system", &f]);
    assert_ne!(code(&o), 0);
    assert!(stderr(&o).contains("a2"), "{}", stderr(&o));
}

#[test]
fn check_missing_key_is_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "missing.sys", "a2 = 1\na1 = 0\ndomain = 0, 1\n");
    let o = run(&["check", "--system", &f]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing key a0"));
}

#[test]
fn pair_identity_constants_reproduce_input() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.sys", REFERENCE_A);
    let b = dir.path().join("b.sys");
    let o = run(&[
        "pair",
        "--system",
        &a,
        "--c2",
        "1",
        "--c1",
        "0",
        "--c0",
        "0",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a_sys = commutant::io::load_system(Path::new(&a)).unwrap();
    let b_sys = commutant::io::load_system(&b).unwrap();
    let (lo, hi) = (a_sys.domain().lo, a_sys.domain().hi);
    for k in 0..=100 {
        let t = lo + (hi - lo) * k as f64 / 100.0;
        let (x, y) = (a_sys.coeff_values(t).unwrap(), b_sys.coeff_values(t).unwrap());
        for i in 0..3 {
            assert!(
                (x[i] - y[i]).abs() <= 1e-12 * (1.0 + x[i].abs()),
                "t = {t}, coefficient {i}"
            );
        }
    }
}

#[test]
fn pair_of_reference_system_matches_printed_partner() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.sys", REFERENCE_A);
    let b = dir.path().join("b.sys");
    let o = run(&[
        "pair",
        "--system",
        &a,
        "--c2",
        "1/2",
        "--c1",
        "-1/4",
        "--c0",
        "337/32",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("4213/400"), "k0 note missing: {}", stdout(&o));
    let partner = commutant::io::load_system(&b).unwrap();
    let printed = commutant::channel::system_b_printed(1.0).unwrap();
    for k in 0..=100 {
        let t = 0.2 * k as f64;
        let (x, y) = (partner.coeff_values(t).unwrap(), printed.coeff_values(t).unwrap());
        for i in 0..3 {
            assert!(
                (x[i] - y[i]).abs() <= 1e-12 * (1.0 + y[i].abs()),
                "t = {t}, coefficient {i}"
            );
        }
    }
}

#[test]
fn pair_with_c1_on_bessel_is_negative() {
    let o = run(&["pair", "--catalog", "bessel", "--c2", "1", "--c1", "1", "--c0", "0"]);
    assert_eq!(code(&o), 1);
    let o = run(&["pair", "--catalog", "bessel", "--c2", "2", "--c1", "0", "--c0", "1"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn simulate_cosine_oracle() {
    let dir = TempDir::new().unwrap();
    // y'' + y = cos(t) from rest has the closed form y = t sin(t) / 2.
    let f = write(dir.path(), "osc.sys", OSCILLATOR);
    let csv = dir.path().join("out.csv");
    let o = run(&[
        "simulate",
        "--chain",
        &f,
        "--input",
        "expr:cos(t)",
        "--t1",
        "3",
        "--dt",
        "1e-3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,input,y1,dy1"));
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let t = v[0];
        assert!((v[2] - 0.5 * t * t.sin()).abs() < 1e-9, "y at t = {t}");
        assert!((v[3] - 0.5 * (t.sin() + t * t.cos())).abs() < 1e-9, "y' at t = {t}");
        rows += 1;
    }
    assert_eq!(rows, 3001);
    assert!(!text.contains("\r"));
}

#[test]
fn simulate_reference_chain_is_bounded() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.sys", REFERENCE_A);
    let b = dir.path().join("b.sys");
    let o = run(&[
        "pair",
        "--system",
        &a,
        "--c2",
        "1/2",
        "--c1",
        "-1/4",
        "--c0",
        "337/32",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let chain = format!("{a},{}", b.display());
    let csv = dir.path().join("ab.csv");
    let o = run(&[
        "simulate",
        "--chain",
        &chain,
        "--input",
        "sine-saw",
        "--t1",
        "20",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let peak = result_field(&stdout(&o), "max_abs_output");
    assert!(peak.is_finite() && peak > 0.0 && peak < 10.0, "peak {peak}");
}

#[test]
fn simulate_rejects_nonpositive_step() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "osc.sys", OSCILLATOR);
    let csv = dir.path().join("out.csv");
    for dt in ["0", "-1e-3"] {
        let o = run(&[
            "simulate",
            "--chain",
            &f,
            "--t1",
            "1",
            "--dt",
            dt,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 2, "dt = {dt}");
    }
    assert!(!csv.exists());
}

#[test]
fn simulate_outside_domain_is_numeric_failure() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "osc.sys", OSCILLATOR);
    let csv = dir.path().join("out.csv");
    let o = run(&["simulate", "--chain", &f, "--t1", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn demo_defaults_pass() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("demo");
    let o = run(&["demo", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    assert!(result_line(&text).contains("verdict=PASS"));
    assert!(result_field(&text, "output_agreement") <= 1e-3);
    assert!(result_field(&text, "transmitted_divergence") >= 0.1);
    assert!(out.join("report.txt").exists());
    let csvs = fs::read_dir(&out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(csvs, 2);
}

#[test]
fn demo_four_stages_with_pulse_input() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("demo");
    let o = run(&[
        "demo",
        "--preset",
        "paper5",
        "--input",
        "pulse",
        "--stages",
        "4",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    for s in ["A->ABB", "AA->BB", "AAB->B", "AB->AB"] {
        assert!(text.contains(s), "missing structure {s}");
    }
    assert_eq!(result_field(&text, "structures"), 4.0);
}

#[test]
fn demo_stated_k0_reports_defect() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("demo");
    let o = run(&["demo", "--k0", "paper", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("0.00125"), "{text}");
    assert!(text.contains("4213/400"));
}

#[test]
fn demo_time_varying_perturbation_fails() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("demo");
    let o = run(&["demo", "--perturb-b0", "cos(3*t)", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "unforced non-commuting partner must be rejected");
    let o = run(&[
        "demo",
        "--perturb-b0",
        "cos(3*t)",
        "--force",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(result_field(&stdout(&o), "output_agreement") >= 1e-2);
}

#[test]
fn demo_rejects_three_stages() {
    let dir = TempDir::new().unwrap();
    let o = run(&["demo", "--stages", "3", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_tables_is_clean_and_tolerance_robust() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("tables.txt");
    let strict = run(&["verify-tables", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&strict), 0, "{}", stdout(&strict));
    let text = stdout(&strict);
    assert!(text.contains("baer"));
    assert!(text.contains("mu"));
    assert!(result_line(&text).contains("unexpected=0"));
    assert!(result_field(&text, "documented") >= 2.0);
    assert!(fs::read_to_string(&report).unwrap().contains("RESULT:"));

    let loose = run(&["verify-tables", "--tol", "1e-3"]);
    assert_eq!(code(&loose), 0);
    assert_eq!(result_line(&stdout(&loose)), result_line(&text));
}

#[test]
fn help_on_every_subcommand() {
    for sub in ["catalog", "check", "pair", "simulate", "demo", "verify-tables"] {
        let o = run(&[sub, "--help"]);
        assert_eq!(code(&o), 0, "{sub} --help");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn no_color_output_has_no_escapes() {
    let o = run(&["check", "--catalog", "bessel"]);
    assert!(!stdout(&o).contains('\u{1b}'));
}
