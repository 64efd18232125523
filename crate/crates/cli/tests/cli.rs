use std::fs;
use std::process::Command;

use microtemp_cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("microtemp").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

fn col(csv: &str, name: &str) -> Vec<f64> {
    let r = rows(csv);
    let j = r[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    r[1..].iter().map(|row| row[j].parse().unwrap()).collect()
}

#[test]
fn beta_at_the_decoupled_point() {
    let (code, out, _) = invoke(&["beta", "--energy", "10"]);
    assert_eq!(code, 0);
    let b = col(&out, "beta")[0];
    // (6κζ(4)/E)^{1/4} with E = 10/2π
    let want = (6.0 * 5.0 * std::f64::consts::PI.powi(4) / 90.0 / (10.0 / (2.0 * std::f64::consts::PI))).powf(0.25);
    assert!((b - want).abs() < 1e-10 * want);
}

#[test]
fn zero_energy_is_the_ground_state() {
    let (code, out, _) = invoke(&["beta", "--energy", "0", "--gamma", "1"]);
    assert_eq!(code, 0);
    let r = rows(&out);
    assert_eq!(r[1][2], "inf");
    assert_eq!(col(&out, "S_A_over_K")[0], 0.0);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["beta", "--energy", "-1"],
        vec!["beta", "--kappa", "0"],
        vec!["sweep", "--steps", "1"],
        vec!["sweep", "--vary", "mass"],
        vec!["sweep", "--log", "--min", "0"],
        vec!["oracle-compare", "--modes", "1"],
        vec!["beta", "--config", "/nonexistent/run.cfg"],
        vec!["nosuch"],
    ] {
        let (code, out, err) = invoke(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# decoupled\ngamma_over_w0 = 2\nenergy_paper_units = 10\n").unwrap();
    let c = cfg.to_str().unwrap();
    let (_, from_file, _) = invoke(&["beta", "--config", c]);
    assert_eq!(col(&from_file, "gamma")[0], 2.0);
    let (_, flagged, _) = invoke(&["beta", "--config", c, "--gamma", "0"]);
    assert_eq!(col(&flagged, "gamma")[0], 0.0);
    assert_eq!(col(&flagged, "E_paper")[0], 10.0);
}

#[test]
fn bad_config_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    let out = dir.path().join("out.csv");
    fs::write(&cfg, "gamma_over_w0 = 1\ntemperature = 3\n").unwrap();
    let (code, _, err) = invoke(&["fig1", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    assert!(!out.exists());
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let (code, written, _) = invoke(&["fig1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(written.is_empty());
    let (_, stdout, _) = invoke(&["fig1"]);
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_microtemp");
    let ok = Command::new(exe).args(["beta"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stdout.starts_with(b"gamma,E_paper,beta"));
    let bad = Command::new(exe).args(["beta", "--wd-ratio", "-3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn figure_shapes() {
    let (_, f1, _) = invoke(&["fig1"]);
    let b = col(&f1, "beta");
    assert_eq!(b.len(), 51);
    assert!(b.windows(2).all(|w| w[1] > w[0]));

    let (_, f2, _) = invoke(&["fig2"]);
    assert_eq!(rows(&f2)[0], ["gamma", "beta_wd1", "beta_wd2", "beta_wd10", "beta_wd50", "status"]);
    let (_, f2one, _) = invoke(&["fig2", "--wd-ratio", "10"]);
    assert_eq!(col(&f2one, "beta_wd10"), col(&f2, "beta_wd10"));

    let (_, f3, _) = invoke(&["fig3", "--steps", "5"]);
    let wd = col(&f3, "wd_over_w0");
    assert_eq!(wd.first(), Some(&0.5));
    assert_eq!(wd.last(), Some(&50.0));
    assert!((wd[2] - 5.0).abs() < 1e-9);

    let (_, f4, _) = invoke(&["fig4"]);
    let (full, first) = (col(&f4, "full"), col(&f4, "first_order"));
    let n = full.len();
    assert!(full[n - 1] - full[n - 2] < first[n - 1] - first[n - 2]);

    let (_, f5, _) = invoke(&["fig5"]);
    for e in ["q2_E0.2", "q2_E1", "q2_E10"] {
        assert!(col(&f5, e).windows(2).all(|w| w[1] < w[0]), "{e}");
    }
    assert!(rows(&f5)[1..].iter().all(|r| r.last().unwrap() == "ok"));
}

#[test]
fn sweep_over_energy() {
    let (code, out, _) = invoke(&["sweep", "--vary", "energy", "--min", "0.01", "--max", "100", "--steps", "9", "--log", "--gamma", "1"]);
    assert_eq!(code, 0);
    let sa = col(&out, "S_A_over_K");
    assert!(sa.iter().all(|&s| s > 0.0));
    assert!(sa.windows(2).all(|w| w[1] > w[0]));
    let e = col(&out, "E_paper");
    assert!((e[4] - 1.0).abs() < 1e-12);
}

#[test]
fn oracle_compare_decoupled_and_tiny_baths() {
    let (code, out, _) = invoke(&["oracle-compare", "--gamma", "0", "--modes", "1024"]);
    assert_eq!(code, 0);
    assert!(col(&out, "rel_error")[0] <= 1e-2);
    let (code, out, _) = invoke(&["oracle-compare", "--modes", "2,3"]);
    assert_eq!(code, 0);
    for r in &rows(&out)[1..] {
        assert_eq!(r[4], "ok");
        let e: f64 = r[3].parse().unwrap();
        assert!(e.is_finite());
    }
}

#[test]
fn twelve_significant_digits_in_output() {
    let (_, out, _) = invoke(&["beta"]);
    let beta = &rows(&out)[1][2];
    assert_eq!(beta.replace('.', "").trim_start_matches('0').len(), 12);
}
