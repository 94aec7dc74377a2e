// Subcommands end to end through `cli::run`.

use std::path::PathBuf;
use well_invariants::cli::run;

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn ok(args: &[&str]) {
    let mut argv = vec!["wellinv"];
    argv.extend_from_slice(args);
    assert_eq!(run(argv), 0, "{args:?}");
}

#[test]
fn forward_is_deterministic_and_stamped() {
    let a = tmp("fwd.csv");
    let q = data("quartic.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        ok(&["forward", "--potential", &q, "--j", "1", "--t-grid", "0.2:1.2:20", "--out", a.to_str().unwrap(), "--gnuplot"]);
        runs.push(std::fs::read_to_string(&a).unwrap());
    }
    assert!(runs[0] == runs[1], "reruns differ");
    let text = &runs[0];
    assert!(text.starts_with("# well-invariants "));
    assert!(text.contains("# config-sha256 "));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 21);
    assert!(a.with_extension("gp").exists());
}

#[test]
fn trace_extract_invert_chain() {
    let (table, ext, rep) = (tmp("trace.csv"), tmp("extract.csv"), tmp("report.json"));
    let cq = data("cubic_quartic.json");
    ok(&["trace", "--potential", &cq, "--eps", "0.7", "--out", table.to_str().unwrap()]);
    ok(&["extract", "--table", table.to_str().unwrap(), "--order", "4", "--out", ext.to_str().unwrap()]);
    ok(&["invert", "--table", table.to_str().unwrap(), "--out", rep.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let w = report["frequencies"][0].as_f64().unwrap();
    assert!((w - 1.0).abs() < 1e-5, "{w}");
}

#[test]
fn spectrum_verify_and_formula_invert() {
    ok(&["spectrum", "--potential", &data("quartic.json"), "--hbar", "0.05", "--cutoff", "0.5", "--out", tmp("spec.csv").to_str().unwrap()]);
    ok(&["spectrum", "--potential", &data("quartic.json"), "--hbar", "0.05", "--solver", "fd", "--out", tmp("spec_fd.csv").to_str().unwrap()]);
    ok(&["verify", "hessian"]);
    ok(&["verify", "trig"]);
    ok(&["invert", "--potential", &data("two_dim.json"), "--symmetry", "even-plus-cubic", "--target-order", "4"]);
}

#[test]
fn bad_input_fails_before_compute() {
    let q = data("quartic.json");
    // t past π/(2ω)
    assert_ne!(run(["wellinv", "forward", "--potential", &q, "--t-grid", "0.5:2.0:4"]), 0);
    assert_ne!(run(["wellinv", "forward", "--potential", "/nonexistent.json"]), 0);
    assert_ne!(run(["wellinv", "spectrum", "--potential", &q, "--hbar=-0.1"]), 0);
    assert_ne!(run(["wellinv", "frobnicate"]), 0);
}
