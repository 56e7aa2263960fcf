//! Acceptance battery for the command-line artifacts: the two reference
//! figures and the spot values, checked end-to-end through the binary.
//! Each check prints one `[PASS]`/`[FAIL]` verdict line (visible under
//! `--nocapture`) before asserting.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;

fn verdict(name: &str, pass: bool, detail: &str) -> bool {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn run(args: &[&str]) -> String {
    let output =
        Command::new(env!("CARGO_BIN_EXE_gqsl")).args(args).output().expect("the binary launches");
    assert_eq!(
        output.status.code(),
        Some(0),
        "gqsl {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("stdout is UTF-8")
}

fn run_with_config(args: &[&str], config: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    fs::write(&path, config).unwrap();
    let mut full: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    full.extend(["--config", path_str]);
    run(&full)
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|line| !line.starts_with('#'))
        .skip(1)
        .map(|line| line.split(',').map(|cell| cell.parse().unwrap()).collect())
        .collect()
}

/// Every normalized profile column peaks at the 3pi/4 orientation (within
/// one grid step), and the balanced case attains exactly 1 there — for
/// moderate and strong squeezing.
#[test]
fn profile_artifact() {
    let mut pass = true;
    let mut details = Vec::new();
    for r in ["0.35", "2.0"] {
        let csv = run_with_config(&["fig2"], &format!(r#"{{"r": {r}, "samples": 256}}"#));
        let rows = data_rows(&csv);
        assert_eq!(rows.len(), 257, "one row per grid node");
        let peak_row = 192; // delta = 192/256 * pi = 3pi/4 exactly on-grid
        assert!((rows[peak_row][0] - 3.0 * PI / 4.0).abs() < 1e-12);
        let mut worst_off_peak = 0.0f64;
        for case in 1..rows[0].len() {
            let max = rows.iter().map(|row| row[case]).fold(f64::NEG_INFINITY, f64::max);
            worst_off_peak = worst_off_peak.max(max - rows[peak_row][case]);
        }
        let balanced_gap = (rows[peak_row][1] - 1.0).abs();
        pass = pass && worst_off_peak <= 1e-12 && balanced_gap <= 1e-12;
        details.push(format!(
            "r={r}: peak shortfall {worst_off_peak:.1e}, balanced-case gap {balanced_gap:.1e}"
        ));
    }
    assert!(verdict("profile-artifact", pass, &details.join("; ")));
}

/// The system-temperature sweep is finite and nonzero everywhere with the
/// hot-state plateau at sqrt(2); the bath-temperature sweep sends the
/// limit time to zero monotonically with the bath temperature.
#[test]
fn sweep_artifact() {
    let system = run(&["fig3", "--mode", "system-sweep"]);
    let rows = data_rows(&system);
    assert_eq!(rows.len(), 60);
    let all_finite =
        rows.iter().all(|row| row[1..].iter().all(|tau| tau.is_finite() && *tau > 0.0));
    let plateau = rows[0][1]; // beta_S = 1e-2 exactly, r = 0 column
    let plateau_gap = (plateau - 2.0f64.sqrt()).abs();

    let bath = run(&["fig3", "--mode", "bath-sweep"]);
    let rows = data_rows(&bath);
    assert_eq!(rows.len(), 60);
    let mut monotone = true;
    for pair in rows.windows(2) {
        for (hotter_bath, colder_bath) in pair[0].iter().zip(&pair[1]).skip(1) {
            monotone = monotone && colder_bath >= hotter_bath;
        }
    }
    let cold_bath_tau = rows[0][1..].iter().fold(0.0f64, |a, &b| a.max(b));

    let pass = all_finite && plateau_gap <= 1e-3 && monotone && cold_bath_tau < 5e-3;
    assert!(verdict(
        "sweep-artifact",
        pass,
        &format!(
            "system sweep finite/nonzero: {all_finite}, plateau {plateau:.6} vs sqrt(2) (gap {plateau_gap:.1e}, tol 1e-3); \
             bath sweep monotone: {monotone}, tau at beta_B = 1e-3 max {cold_bath_tau:.2e} (< 5e-3)"
        ),
    ));
}

/// The balanced single-mode operating point through the whole pipeline:
/// config, state and generator construction, speed report serialization.
#[test]
fn speed_spot() {
    let json = run_with_config(
        &["speed"],
        r#"{"state": {"n": 1, "r": [0.35], "theta": [2.356194490192345]},
            "generator": {"g0": 0.33638043441356517, "gS": 1.0, "phi": 0.0}}"#,
    );
    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    let v2 = report["v2_total"].as_f64().unwrap();
    let gap = (v2 - 0.69860).abs();
    let pass = gap <= 1e-5;
    assert!(verdict(
        "speed-spot",
        pass,
        &format!("v2_total {v2:.7} vs 0.69860 (gap {gap:.2e}, tol 1e-5)")
    ));
}

/// The damped-oscillator working point through the whole pipeline.
#[test]
fn damped_oscillator_spot() {
    let json = run_with_config(
        &["speed"],
        r#"{"state": {"n": 1, "beta_s": 1.0, "omega": 1.0},
            "qbm": {"omega": 1.0, "gamma": 1.0, "beta_B": 0.1}}"#,
    );
    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    let v2 = report["v2_cov"].as_f64().unwrap();
    let gap = (v2 - 3.5283).abs();
    let pass = gap <= 1e-3;
    assert!(verdict(
        "damped-oscillator-spot",
        pass,
        &format!("v2_cov {v2:.6} vs 3.5283 (gap {gap:.2e}, tol 1e-3)")
    ));
}
