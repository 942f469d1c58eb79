//! End-to-end tests of the `qre` binary: exit codes, output formats, and the
//! report pipeline over the shipped data files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../../data/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn qre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qre"))
        .args(args)
        .output()
        .expect("qre runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn validate_accepts_the_shipped_catalog() {
    let out = qre(&["catalog", "validate", &data("nitrogen_fixation.cat")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("23 instances"), "{}", stdout(&out));
}

#[test]
fn validate_rejects_invalid_records_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cat");
    std::fs::write(
        &path,
        "schema_version: 1\n\n[instance]\nmolecule_id: X\nn_orbitals: 10\nn_electrons: 10\n\
         charge: 0\nmultiplicity: 1\noverlap_gamma: 1.2\ndf_l1: 1.0\n",
    )
    .unwrap();
    let out = qre(&["catalog", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("overlap_gamma"), "{}", stderr(&out));
}

#[test]
fn missing_files_exit_3() {
    let out = qre(&["catalog", "validate", "/nonexistent/path.cat"]);
    assert_eq!(out.status.code(), Some(3));
    let out = qre(&["dmrg", "extrapolate", "/nonexistent/series.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn logical_estimates_reproduce_the_anchored_rows() {
    let out = qre(&["estimate", "logical", &data("nitrogen_fixation.cat")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "molecule_id,n_orbitals,shots,shot_hw_tolerance,toffoli_per_shot,logical_qubits,overlap_gamma"
    );
    assert_eq!(csv.lines().count(), 24, "header plus 23 rows");
    let mo = csv
        .lines()
        .find(|l| l.starts_with("MoN2-,33,"))
        .expect("MoN2- row");
    let fields: Vec<&str> = mo.split(',').collect();
    assert_eq!(fields[2], "3");
    assert_eq!(fields[5], "1914");
    let toffoli: f64 = fields[4].parse().unwrap();
    assert!((toffoli - 7.7e10).abs() / 7.7e10 <= 1e-4);
}

#[test]
fn lpbliss_estimates_cover_the_treated_subset() {
    let out = qre(&[
        "estimate",
        "logical",
        &data("nitrogen_fixation.cat"),
        "--lpbliss",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 8, "header plus 7 treated rows");
    assert!(stderr(&out).contains("skipping"), "{}", stderr(&out));
}

#[test]
fn physical_sweep_emits_one_row_per_budget() {
    let out = qre(&[
        "estimate",
        "physical",
        &data("nitrogen_fixation.cat"),
        "--sweep",
        "0.01,0.33",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    assert_eq!(csv.lines().count(), 1 + 2 * 23);
    let mo: Vec<&str> = csv
        .lines()
        .filter(|l| l.starts_with("MoN2-,33,"))
        .collect();
    assert_eq!(mo.len(), 2);
    let tight: f64 = mo[0].split(',').nth(3).unwrap().parse().unwrap();
    let loose: f64 = mo[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!(tight / loose >= 5.0 && tight / loose <= 20.0);
}

#[test]
fn infeasible_architectures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hopeless.cfg");
    std::fs::write(
        &path,
        "schema_version: 1\n\n[architecture]\nd_max: 3\n\n[factory]\nname: noisy\n\
         physical_qubits: 1000\ncycles_per_output: 10\noutput_error: 0.9\n",
    )
    .unwrap();
    let out = qre(&[
        "estimate",
        "physical",
        &data("nitrogen_fixation.cat"),
        "--arch",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("no feasible configuration"), "{}", stderr(&out));
}

#[test]
fn dmrg_extrapolation_recovers_the_example_series() {
    let out = qre(&["dmrg", "extrapolate", &data("dmrg_series_example.csv")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("-5412.0373"), "{text}");
    assert!(text.contains("D_est"), "{text}");

    let out = qre(&[
        "dmrg",
        "extrapolate",
        &data("dmrg_series_example.csv"),
        "--format",
        "csv",
    ]);
    let csv = stdout(&out);
    assert!(csv.starts_with("e_est,slope,"), "{csv}");
}

#[test]
fn malformed_series_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "bond,energy\n1,2\n").unwrap();
    let out = qre(&["dmrg", "extrapolate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn utility_report_writes_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = qre(&[
            "utility",
            "report",
            &data("nitrogen_fixation.cat"),
            "--dmrg-summary",
            &data("dmrg_summary.csv"),
            "--cpus",
            "1,8,64,512",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    for name in [
        "catalog_overview.csv",
        "norm_ratios.csv",
        "logical_estimates.csv",
        "logical_estimates_lpbliss.csv",
        "lpbliss_reduction.csv",
        "physical_estimates.csv",
        "runtime_vs_failure.csv",
        "runtime_vs_qubits.csv",
        "dmrg_extrapolation.csv",
        "classical_cost.csv",
        "quantum_share.csv",
        "report.txt",
    ] {
        let a = std::fs::read(out_a.join(name)).unwrap_or_else(|_| panic!("{name} written"));
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} is not byte-identical across runs");
    }
    let share = std::fs::read_to_string(out_a.join("quantum_share.csv")).unwrap();
    assert!(share.lines().count() > 4 * 20, "share grid populated");
}

#[test]
fn out_dir_receives_the_csv_copy() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir: PathBuf = dir.path().join("estimates");
    let out = qre(&[
        "estimate",
        "logical",
        &data("nitrogen_fixation.cat"),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let written = std::fs::read_to_string(out_dir.join("logical_estimates.csv")).unwrap();
    assert_eq!(written, stdout(&out));
}
