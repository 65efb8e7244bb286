use std::process::{Command, Output};

fn mdflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdflow"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

#[test]
fn run_writes_report_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = mdflow(&[
        "run", "--case", "case1a", "--scheme", "hu", "--t-end", "0.8", "--snapshots", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("t,dt,newton_iters,cum_newton_iters,cuts,cum_cuts,flips_2d"));
    let summary = std::fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"status\": \"completed\""));
    assert!(summary.contains("\"buoyancy_number\": 0.0625"));
    assert!(out.join("fields_0.000000.vtk").exists());
    assert!(out.join("fields_0.800000.vtk").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("hu: completed"));
}

#[test]
fn underflow_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = mdflow(&[
        "run", "--case", "case1a", "--scheme", "ppu", "--tol", "1e-14", "--max-iter", "2", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("\"status\": \"dt_underflow\""));
    assert!(summary.contains("\"t_final\": 0.0"));
}

#[test]
fn compare_prints_both_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let o = mdflow(&["compare", "--case", "case1a", "--t-end", "0.4", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let header = stdout.lines().next().unwrap();
    assert!(header.contains("hu") && header.contains("ppu"));
    assert!(stdout.contains("newton"));
    assert!(dir.path().join("hu/report.csv").exists());
    assert!(dir.path().join("ppu/report.csv").exists());
    assert!(dir.path().join("compare.txt").exists());
}

#[test]
fn converge_prints_orders() {
    let o = mdflow(&["converge", "--levels", "8,16", "--reference", "32"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("Conforming") && stdout.contains("NonConforming"));
    assert_eq!(stdout.lines().filter(|l| l.trim_start().starts_with("16 ")).count(), 2);
}

#[test]
fn unknown_case_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mdflow(&["run", "--case", "nope", "--scheme", "hu", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("neither a bundled case"));
}

#[test]
fn cases_lists_builtins() {
    let o = mdflow(&["cases"]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    for name in ["case1a", "case1b", "case1c", "case1c-hc", "case2-standin", "smooth"] {
        assert!(stdout.contains(name), "{name}");
    }
}
