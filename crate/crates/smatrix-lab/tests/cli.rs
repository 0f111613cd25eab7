//! End-to-end checks of the `smatrix-lab` binary: argument and config
//! handling, exit codes, report determinism, and the cache round trip.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smatrix-lab"))
}

fn unique_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("smatrix-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn missing_config_exits_with_config_error() {
    let out = bin()
        .args(["spectrum", "--config", "/nonexistent/conf"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_experiment_name_exits_2() {
    let dir = unique_dir("badexp");
    let cfg = write_config(&dir, "c.conf", "lambda = 0.5\n");
    let out = bin()
        .args(["frobnicate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_key_exits_2() {
    let dir = unique_dir("badkey");
    let cfg = write_config(&dir, "c.conf", "potental.family = dipole\n");
    let out = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown key"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn quasimode_without_root_exits_3() {
    let dir = unique_dir("noroot");
    // strength 1 at K = 16: the phase never reaches the first admissible
    // level below the cutoff
    let cfg = write_config(
        &dir,
        "c.conf",
        "potential.family = radial-power-log\n\
         potential.c = 1.0\n\
         mode_cutoff = 16\n\
         quasimode.ns = 8\n",
    );
    let out = bin()
        .args(["quasimode", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn phase_table_writes_expected_csv() {
    let dir = unique_dir("phasetable");
    let cfg = write_config(
        &dir,
        "c.conf",
        "experiment = phase-table\n\
         potential.family = dipole\n\
         potential.a = 1.0\n\
         mode_cutoff = 8\n\
         phase_table.thetas = 5\n\
         phase_table.omegas = 5\n",
    );
    let out_dir = dir.join("out");
    let out = bin()
        .args(["phase-table", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("phase_table.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "theta,omega,psi_closed_form,psi_quadrature,quad_error_estimate"
    );
    assert_eq!(lines.len(), 26);
    // closed form and quadrature agree to 1e-8 on every row
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        let closed: f64 = cells[2].parse().unwrap();
        let quad: f64 = cells[3].parse().unwrap();
        assert!((closed - quad).abs() <= 1e-8, "row {row}");
    }
    let report = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(report.contains("\"provenance\""));
    std::fs::remove_dir_all(&dir).ok();
}

fn strip_timestamp(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let dir = unique_dir("determinism");
    let cfg = write_config(
        &dir,
        "c.conf",
        "potential.family = dipole\n\
         potential.a = 0.5\n\
         mode_cutoff = 16\n\
         seed = 11\n",
    );
    let out_dir = dir.join("out");
    let run = || {
        let out = bin()
            .args(["arc-coverage", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(out_dir.join("report.json")).unwrap()
    };
    // identical config, seed, and output_dir: the second run hits the
    // operator cache yet must produce identical bytes except the timestamp
    let r1 = run();
    let r2 = run();
    assert_ne!(r1, r2, "timestamps should differ");
    assert_eq!(strip_timestamp(&r1), strip_timestamp(&r2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn arc_coverage_report_contents_at_k128() {
    let dir = unique_dir("arc128");
    let cfg = write_config(
        &dir,
        "c.conf",
        "experiment = arc-coverage\n\
         potential.family = dipole\n\
         potential.a = 0.5\n\
         lambda = 0.5\n\
         mode_cutoff = 128\n\
         arc.epsilon = 0.05\n",
    );
    let out_dir = dir.join("out");
    let out = bin()
        .args(["arc-coverage", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let tau = v["results"]["tau_max"]["value"].as_f64().unwrap();
    assert!((tau - std::f64::consts::FRAC_PI_2).abs() <= 1e-12);
    let inside = v["results"]["inside_fraction"]["value"].as_f64().unwrap();
    assert!(inside >= 0.99, "inside fraction {inside}");
    let phases = std::fs::read_to_string(out_dir.join("eigenphases.csv")).unwrap();
    assert_eq!(phases.lines().count(), 1 + 257);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cache_reused_across_experiments() {
    let dir = unique_dir("cache");
    let cfg = write_config(
        &dir,
        "c.conf",
        "potential.family = dipole\n\
         potential.a = 0.5\n\
         mode_cutoff = 12\n",
    );
    let out_dir = dir.join("out");
    let st = bin()
        .args(["build-smatrix", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let cache_entries = || {
        std::fs::read_dir(out_dir.join("cache"))
            .map(|rd| rd.count())
            .unwrap_or(0)
    };
    let after_build = cache_entries();
    assert!(after_build >= 2, "expected json + csv in cache");
    // spectrum at the same defining fields must not add cache entries
    let st = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    assert_eq!(cache_entries(), after_build);
    assert!(out_dir.join("eigenphases.csv").exists());
    let phases = std::fs::read_to_string(out_dir.join("eigenphases.csv")).unwrap();
    assert_eq!(phases.lines().count(), 1 + 25);
    assert_eq!(phases.lines().next(), Some("eigenphase"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn appendix_suite_green_run() {
    let dir = unique_dir("appendix");
    let cfg = write_config(
        &dir,
        "c.conf",
        "experiment = appendix-suite\n\
         mode_cutoff = 16\n\
         seed = 7\n\
         appendix.pairs = 4\n",
    );
    let out = bin()
        .args(["appendix-suite", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.join("out/report.json")).unwrap();
    assert!(report.contains("all_identities_within_1e-10"));
    assert!(report.contains("\"value\": true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_assumptions_runs_for_angular_family() {
    let dir = unique_dir("assumptions");
    let cfg = write_config(
        &dir,
        "c.conf",
        "potential.family = angular-over-r\n\
         potential.f0 = 2.0\n\
         potential.fcos1 = 0.5\n\
         potential.patch_radius = 5.0\n\
         mode_cutoff = 8\n",
    );
    let out = bin()
        .args(["verify-assumptions", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.join("out/report.json")).unwrap();
    assert!(report.contains("no_ac_holds"));
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["results"]["no_ac_holds"]["value"], serde_json::json!(true));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gap_stats_sweep_monotone_for_radial_family() {
    let dir = unique_dir("gapstats");
    let cfg = write_config(
        &dir,
        "c.conf",
        "potential.family = radial-power-log\n\
         potential.c = 1.0\n\
         mode_cutoff = 16\n\
         gap_stats.cutoffs = 16, 64, 256\n",
    );
    let out_dir = dir.join("out");
    let out = bin()
        .args(["gap-stats", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(
        v["results"]["max_gap_strictly_decreasing"]["value"],
        serde_json::json!(true)
    );
    let csv = std::fs::read_to_string(out_dir.join("gap_stats.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    assert_eq!(csv.lines().next(), Some("mode_cutoff,max_gap,mean_gap"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn quasimode_sweep_success_path() {
    let dir = unique_dir("quasiok");
    let cfg = write_config(
        &dir,
        "c.conf",
        "potential.family = radial-power-log\n\
         potential.c = 2.5\n\
         mode_cutoff = 64\n\
         quasimode.theta0 = 1.0\n\
         quasimode.ns = 4, 8\n",
    );
    let out_dir = dir.join("out");
    let out = bin()
        .args(["quasimode", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(
        v["results"]["residuals_strictly_decreasing"]["value"],
        serde_json::json!(true)
    );
    let csv = std::fs::read_to_string(out_dir.join("quasimode.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,omega_root,mode_center,residual"));
    assert_eq!(csv.lines().count(), 1 + 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mourre_experiment_reports_positive_bound() {
    let dir = unique_dir("mourreexp");
    let cfg = write_config(
        &dir,
        "c.conf",
        "potential.family = dipole\n\
         potential.a = 0.5\n\
         lambda = 0.5\n\
         mode_cutoff = 48\n\
         mourre.pad = 16\n",
    );
    let out_dir = dir.join("out");
    let out = bin()
        .args(["mourre", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let c = v["results"]["c_lower"]["value"].as_f64().unwrap();
    assert!(c > 0.0);
    let gap = v["results"]["poisson_bracket_max_spot_gap"]["value"]
        .as_f64()
        .unwrap();
    assert!(gap <= 1e-12);
    assert!(out_dir.join("resolvent_probe.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}
