use std::path::Path;
use std::process::{Command, Output};

use ultrafid::inversion::{CertificateRecord, Verdict};
use ultrafid::measures::{ConvergenceReport, DensityGrid};

fn ultrafid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultrafid")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn certify_semicircle_passes() {
    let out = ultrafid(&["certify", "--n", "1", "--nr", "16", "--ntheta", "16"]);
    assert_eq!(code(&out), 0);
    let rec = CertificateRecord::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rec.verdict, Verdict::Pass);
    assert!(rec.max_im_phi < 0.0);
    assert_eq!(rec.schema, 1);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["certify", "--n", "0"][..],
        &["certify", "--n", "2", "--nr", "1"],
        &["certify", "--n", "2", "--tol", "0"],
        &["certify", "--n", "2", "--r-min", "5", "--r-max", "1"],
        &["eval", "--n", "2", "--z", "3"],
        &["eval", "--n", "2", "--z", "nonsense"],
        &["density", "--n", "2", "--nx", "1"],
        &["density", "--n", "2", "--eps", "1e-6"],
        &["phi", "--n", "2", "--z", "1-1i"],
        &["converge", "--n", "1,0"],
        &["frobnicate"],
        &["certify"],
    ] {
        assert_eq!(code(&ultrafid(args)), 2, "{args:?}");
    }
}

#[test]
fn identities_pass_for_n3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.csv");
    let out = ultrafid(&["identities", "--n", "3", "--out", path_str(&path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("identity,max_residual,tolerance,pass\n"));
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3], "true");
        assert!(cells[1].parse::<f64>().unwrap() < 1e-9);
    }
}

#[test]
fn residual_above_tolerance_exits_1() {
    let out = ultrafid(&["invert", "--n", "2", "--nr", "2", "--ntheta", "2", "--tol", "1e-300"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["eval", "--n", "4", "--nr", "12", "--ntheta", "12"],
        vec!["phi", "--n", "3", "--nr", "8", "--ntheta", "8", "--format", "json"],
        vec!["certify", "--n", "5", "--nr", "16", "--ntheta", "16"],
        vec!["invert", "--n", "6", "--nr", "6", "--ntheta", "6"],
    ] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for p in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", path_str(p)]);
            assert_eq!(code(&ultrafid(&full)), 0, "{full:?}");
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn failed_run_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = ultrafid(&["certify", "--n", "0", "--out", path_str(&path)]);
    assert_eq!(code(&out), 2);
    assert!(!path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn density_and_converge_csv_parse_back() {
    let out = ultrafid(&["density", "--n", "3", "--nx", "81"]);
    assert_eq!(code(&out), 0);
    let g = DensityGrid::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(g.abscissae.len(), 81);
    assert!((g.trapezoid_mass() - 1.0).abs() < 1e-3);

    let out = ultrafid(&["converge", "--n", "1,2,10"]);
    assert_eq!(code(&out), 0);
    let r = ConvergenceReport::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(r.entries.len(), 3);
    assert!(r.is_strictly_decreasing());
}

#[test]
fn stieltjes_density_tracks_closed_form() {
    let closed = ultrafid(&["density", "--n", "2", "--x-min", "-1.5", "--x-max", "1.5", "--nx", "31"]);
    let recovered = ultrafid(&["density", "--n", "2", "--x-min", "-1.5", "--x-max", "1.5", "--nx", "31", "--eps", "1e-6"]);
    let a = DensityGrid::from_csv(&String::from_utf8(closed.stdout).unwrap()).unwrap();
    let b = DensityGrid::from_csv(&String::from_utf8(recovered.stdout).unwrap()).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() < 1e-6);
    }
}

#[test]
fn beta_check_passes() {
    let out = ultrafid(&["beta-check", "--n", "5", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("\"pass\": true").count(), 3);
}
