//! End-to-end checks of the `pulseforge` binary: outputs, exit codes and
//! reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(p: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(p)
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("pulseforge_cli_{}_{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pulseforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn vqe_writes_runlog_and_summary() {
    let out = scratch("vqe");
    let cfg = data("configs/h2_vqe.json");
    let r = run(&["--config", s(&cfg), "--seed", "7", "--output-dir", s(&out), "vqe"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("h2_0.75_two_qubit_7.summary.json")).unwrap()).unwrap();
    assert!(summary["final_energy"].as_f64().unwrap() <= -1.10);
    assert_eq!(summary["seed"], 7);
    assert!(summary["config_hash"].as_str().unwrap().len() == 16);
    assert!(summary["total_duration_ns"].as_f64().unwrap() > 0.0);
    assert!(summary["snp_count"].is_u64() && summary["cr_count"].is_u64());
    let log = std::fs::read_to_string(out.join("h2_0.75_two_qubit_7.runlog")).unwrap();
    let first: serde_json::Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    assert_eq!(first["seed"], 7);
    assert_eq!(first["step"], 1);
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn exact_runs_are_byte_identical() {
    let out = scratch("det");
    let args = |o: &Path| {
        vec![
            "--seed".to_string(),
            "3".into(),
            "--device".into(),
            s(&data("devices/two_qubit.json")).into(),
            "--output-dir".into(),
            s(o).into(),
            "--exact".into(),
            "vqe".into(),
            s(&data("molecules/heh_plus.ham")).into(),
        ]
    };
    let a: Vec<String> = args(&out);
    let refs: Vec<&str> = a.iter().map(String::as_str).collect();
    assert_eq!(run(&refs).status.code(), Some(0));
    let first = std::fs::read(out.join("heh_plus_two_qubit_3.summary.json")).unwrap();
    let first_log = std::fs::read(out.join("heh_plus_two_qubit_3.runlog")).unwrap();
    assert_eq!(run(&refs).status.code(), Some(0));
    assert_eq!(first, std::fs::read(out.join("heh_plus_two_qubit_3.summary.json")).unwrap());
    assert_eq!(first_log, std::fs::read(out.join("heh_plus_two_qubit_3.runlog")).unwrap());
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn missing_device_exits_with_input_error() {
    let r = run(&["--device", "/no/such/device.json", "vqe", s(&data("molecules/h2_0.75.ham"))]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("/no/such/device.json"));
    assert!(r.stdout.is_empty());
}

#[test]
fn bad_config_and_arguments_exit_two() {
    let out = scratch("badcfg");
    std::fs::create_dir_all(&out).unwrap();
    let p = out.join("c.json");
    std::fs::write(&p, r#"{"seeds": "seven"}"#).unwrap();
    assert_eq!(run(&["--config", s(&p), "verify"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--shots", "10", "--exact", "verify"]).status.code(), Some(2));
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn verify_passes_and_failing_assertion_exits_one() {
    let out = scratch("verify");
    let r = run(&["--config", s(&data("configs/verify.json")), "--output-dir", s(&out), "verify"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(out.join("verify.csv")).unwrap();
    assert!(text.starts_with("# config_hash: "));
    assert_eq!(text.lines().count(), 2 + 21);

    let p = out.join("strict.json");
    std::fs::write(&p, r#"{"verify": {"min_p00": 1.5, "points": 3}}"#).unwrap();
    let r = run(&["--config", s(&p), "verify"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("FAIL"));
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn single_point_scan_is_one_row() {
    let out = scratch("scan");
    let r = run(&[
        "--output-dir",
        s(&out),
        "scan-detuning",
        s(&data("molecules/h2_0.75.ham")),
        "--points",
        "1",
    ]);
    assert_eq!(r.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("scan_h2_0.75_0.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("detuning_hz,energy"));
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn lower_reports_schedule_and_duration() {
    let out = scratch("lower");
    let r = run(&["--output-dir", s(&out), "lower", "cx 0 1"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stdout).contains("270.2 ns"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("lowered.json")).unwrap()).unwrap();
    assert_eq!(v["samples"], 1216);
    assert!(v["schedule"]["instructions"].as_array().unwrap().len() > 3);
    assert_eq!(run(&["lower", "swap 0 1"]).status.code(), Some(1));
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn weyl_single_cr_csv_stays_on_axis() {
    let out = scratch("weyl");
    let r = run(&["--output-dir", s(&out), "weyl", "--builder", "single-cr", "--samples", "40"]);
    assert_eq!(r.status.code(), Some(0));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(out.join("weyl_single_cr.csv"))
        .unwrap();
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let c2: f64 = rec[1].parse().unwrap();
        let c3: f64 = rec[2].parse().unwrap();
        assert!(c2 <= 1e-6 && c3 <= 1e-6);
        n += 1;
    }
    assert_eq!(n, 40);
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn dissociation_single_geometry_and_all_missing() {
    let out = scratch("diss");
    let r = run(&["--output-dir", s(&out), "dissociation", s(&data("molecules/h2_0.10.ham"))]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(out.join("dissociation.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    let r = run(&["--output-dir", s(&out), "dissociation", "/no/a.ham", "/no/b.ham"]);
    assert_eq!(r.status.code(), Some(2));
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn report_tabulates_three_runs() {
    let out = scratch("report");
    for (name, dir) in [("h2_snp", "snp"), ("h2_cr_snp", "cr_snp"), ("h2_two_gate", "two_gate")] {
        let r = run(&[
            "--config",
            s(&data(&format!("configs/{name}.json"))),
            "--output-dir",
            s(&out.join(dir)),
            "vqe",
        ]);
        assert_eq!(r.status.code(), Some(0));
    }
    let sums: Vec<PathBuf> = ["snp/h2_0.75_two_qubit_7", "cr_snp/h2_0.75_two_qubit_7", "two_gate/h2_0.75-two_gate_two_qubit_7"]
        .iter()
        .map(|p| out.join(format!("{p}.summary.json")))
        .collect();
    let mut args = vec!["--output-dir", s(&out), "report"];
    args.extend(sums.iter().map(|p| s(p)));
    let r = run(&args);
    assert_eq!(r.status.code(), Some(0));
    let rows: Vec<pulseforge::experiments::ReportRow> = pulseforge::experiments::read_csv(out.join("report.csv")).unwrap();
    assert_eq!(rows.len(), 3);
    assert!((rows[0].duration_ns - 35.6).abs() < 0.1);
    assert!((rows[1].duration_ns - 234.7).abs() < 0.1);
    assert!((rows[2].duration_ns - 341.3).abs() < 0.1);
    assert!(rows[1].duration_reduction_pct >= 30.0);
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn log_level_comes_from_the_environment() {
    let out = scratch("log");
    let r = Command::new(env!("CARGO_BIN_EXE_pulseforge"))
        .env("PULSEFORGE_LOG", "info")
        .args(["--output-dir", s(&out), "lower", "x 0"])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&r.stderr).contains("wrote"));
    let quiet = run(&["--output-dir", s(&out), "lower", "x 0"]);
    assert!(!String::from_utf8_lossy(&quiet.stderr).contains("wrote"));
    std::fs::remove_dir_all(out).unwrap();
}
