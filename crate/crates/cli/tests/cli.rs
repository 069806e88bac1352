use feshpulse::constants::HBAR;
use feshpulse::io::sha256_hex;
use feshpulse_cli::{parse_config_str, CliError};
use std::path::{Path, PathBuf};
use std::process::Command;

const SETUP: &str = r#"{"a_bg": 5e-9, "mu_res": 9.2740100783e-26, "delta_b_res": 1e-6, "omega_guide": 31415.9265,
    "omega_trap": 314.159265, "depth_guide": 1.38e-29, "depth_trap": 1e-29, "mass": 9.988e-27,
    "b0": 0.0, "b_res": 0.0, "off_tuned": true}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_feshpulse"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

/// Runs a subcommand and returns its exit status.
fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let o = bin().arg(sub).arg("--config").arg(config).arg("--out").arg(out).args(extra).output().unwrap();
    o.status.code().unwrap()
}

/// Reads a CSV into its header and numeric rows.
fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

/// Base energy placing the pair threshold at ωT = 10 for T = 1 ms.
fn state_config(pulse: &str) -> String {
    let setup: feshpulse::PhysicalSetup = serde_json::from_str(SETUP).unwrap();
    let e0 = setup.background_threshold() - 10.0 * HBAR / 1e-3;
    format!(r#"{{"setup": {SETUP}, "drive": {{"epsilon": 100, "duration": 1e-3, "base_energy": {e0:e}}}, "pulse": {pulse}}}"#)
}

#[test]
fn epsilon_passes_through() {
    let cfg = parse_config_str(r#"{"drive": {"epsilon": 100}, "pulse": {"kind": "square"}}"#, Path::new(".")).unwrap();
    assert_eq!(cfg.drive.epsilon, 100.0);
    assert!(!cfg.physical_time);
}

#[test]
fn epsilon_from_field_pulse() {
    let cfg = parse_config_str(
        r#"{"drive": {"delta_b": 1e-5, "mu_res": 9.2740100783e-26, "duration": 0.1}, "pulse": {"kind": "gaussian"}}"#,
        Path::new("."),
    )
    .unwrap();
    assert!((cfg.drive.epsilon - 879.4).abs() < 0.1, "{}", cfg.drive.epsilon);
}

#[test]
fn conflicting_epsilon_is_rejected() {
    let r = parse_config_str(
        r#"{"drive": {"epsilon": 1000, "delta_b": 1e-5, "mu_res": 9.2740100783e-26, "duration": 0.1},
            "pulse": {"kind": "square"}}"#,
        Path::new("."),
    );
    match r {
        Err(CliError::Config(m)) => assert!(m.contains("conflicts"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_configs_name_the_problem() {
    let cases = [
        (r#"{"drive": {"epsilon": 10, "duration": -1}, "pulse": {"kind": "square"}}"#, "duration"),
        (r#"{"pulse": {"kind": "square"}}"#, "drive"),
        (r#"{"drive": {"epsilon": 10}, "pulse": {"kind": "square"}, "colour": 1}"#, "colour"),
        (r#"{"drive": {"epsilon": 10}, "pulse": {"kind": "square"}, "grids": {"omega_min": 5, "omega_max": 2}}"#, "omega_max"),
        (r#"{"drive": {"delta_b": 1e-5, "duration": 0.1}, "pulse": {"kind": "square"}}"#, "mu_res"),
    ];
    for (text, field) in cases {
        let e = parse_config_str(text, Path::new(".")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains(field), "{field}: {e}");
    }
}

#[test]
fn square_spectrum_peaks_at_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", r#"{"drive": {"epsilon": 100}, "pulse": {"kind": "square"}}"#);
    assert_eq!(run("spectrum", &cfg, &dir.path().join("out"), &["--method", "numeric"]), 0);
    let (header, rows) = read_csv(&dir.path().join("out/spectrum.csv"));
    assert_eq!(header, ["omega_T", "re", "im", "abs"]);
    assert_eq!(rows.len(), 4096);
    // above the 1/ωT rise left by the removed zero-frequency term
    let peak = rows.iter().filter(|r| r[0] >= 10.0).max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    // the ε/ωT factor pulls the maximum 0.12 below ωT = ε
    assert!((peak[0] - 99.88).abs() <= rows[1][0] - rows[0][0], "{}", peak[0]);
    assert!((peak[3] - 1.0).abs() < 1e-3);
}

#[test]
fn gaussian_spectrum_has_no_narrow_peak() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", r#"{"drive": {"epsilon": 100}, "pulse": {"kind": "gaussian"}}"#);
    assert_eq!(run("spectrum", &cfg, dir.path(), &[]), 0);
    let (_, rows) = read_csv(&dir.path().join("spectrum.csv"));
    // the oscillatory band: many maxima of comparable height below the sweep top
    let a: Vec<f64> = rows.iter().filter(|r| r[0] >= 10.0).map(|r| r[3]).collect();
    let top = a.iter().cloned().fold(0.0, f64::max);
    let strong = (1..a.len() - 1).filter(|&i| a[i] > a[i - 1] && a[i] >= a[i + 1] && a[i] > 0.5 * top).count();
    assert!(strong >= 10, "{strong}");
}

#[test]
fn compare_square_residual_is_tiny() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", r#"{"drive": {"epsilon": 100}, "pulse": {"kind": "square"}}"#);
    assert_eq!(run("compare", &cfg, dir.path(), &["--method", "square"]), 0);
    let (header, rows) = read_csv(&dir.path().join("compare.csv"));
    assert_eq!(header[3], "residual");
    let worst = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn outputs_are_deterministic_and_carry_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"drive": {"epsilon": 60}, "pulse": {"kind": "trapezoid", "edge_fraction": 0.2}, "grids": {"omega_points": 300}}"#;
    let cfg = write_config(dir.path(), "t.json", text);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("spectrum", &cfg, &a, &[]), 0);
    assert_eq!(run("spectrum", &cfg, &b, &[]), 0);
    let read = |d: &Path| std::fs::read(d.join("spectrum.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("spectrum.csv.json")).unwrap()).unwrap();
    assert_eq!(side["config_hash"], sha256_hex(text.as_bytes()));
    assert_eq!(side["method"], "numeric");
    assert!(side["achieved_tolerance"].as_f64().unwrap() < 1e-6);
    assert_eq!(side["constants"]["hbar"], 1.054571817e-34);
}

#[test]
fn grid_points_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.json", r#"{"drive": {"epsilon": 100}, "pulse": {"kind": "square"}}"#);
    assert_eq!(run("spectrum", &cfg, dir.path(), &["--grid-points", "64"]), 0);
    assert_eq!(read_csv(&dir.path().join("spectrum.csv")).1.len(), 64);
}

#[test]
fn state_writes_normalized_density_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "st.json", &state_config(r#"{"kind": "gaussian"}"#));
    assert_eq!(run("state", &cfg, dir.path(), &["--strict"]), 0);
    let (header, rows) = read_csv(&dir.path().join("state.csv"));
    assert_eq!(header, ["p_cm", "p_rel", "re", "im", "prob_density"]);
    let dp = rows[1][1] - rows[0][1];
    let n = rows.len();
    let total: f64 =
        rows.iter().enumerate().map(|(i, r)| if i == 0 || i == n - 1 { 0.5 } else { 1.0 } * r[4]).sum::<f64>() * dp;
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    for name in ["state.csv.json", "metrics.json", "metrics.json.json", "regime.json", "regime.json.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn strict_mode_turns_validity_failures_into_exit_4() {
    // ideal square edges fail the slow-sweep check
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v.json", &state_config(r#"{"kind": "square"}"#));
    assert_eq!(run("validate", &cfg, dir.path(), &[]), 0);
    assert_eq!(run("validate", &cfg, dir.path(), &["--strict"]), 4);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("regime.json")).unwrap()).unwrap();
    let slow = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "slow_sweep").unwrap();
    assert_eq!(slow["pass"], false);
}

#[test]
fn exit_codes_for_config_and_numeric_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(run("spectrum", &missing, dir.path(), &[]), 2);
    let bad = write_config(dir.path(), "bad.json", r#"{"drive": {"epsilon": 1}, "pulse": {"kind": "hexagon"}}"#);
    assert_eq!(run("spectrum", &bad, dir.path(), &[]), 2);
    let no_setup = write_config(dir.path(), "ns.json", r#"{"drive": {"epsilon": 100}, "pulse": {"kind": "square"}}"#);
    assert_eq!(run("state", &no_setup, dir.path(), &[]), 2);
    // a band that stops inside the main lobe loses most of the norm
    let mut short: serde_json::Value = serde_json::from_str(&state_config(r#"{"kind": "square"}"#)).unwrap();
    short["grids"] = serde_json::json!({"omega_max": 60.0});
    let short = write_config(dir.path(), "short.json", &short.to_string());
    assert_eq!(run("state", &short, dir.path(), &[]), 3);
}

#[test]
fn optimize_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"drive": {"epsilon": 100}, "pulse": {"kind": "square"}, "grids": {"omega_points": 512},
        "optimize": {"lower": [0.01], "upper": [0.45]}}"#;
    let cfg = write_config(dir.path(), "o.json", text);
    assert_eq!(run("optimize", &cfg, dir.path(), &[]), 0);
    let (header, rows) = read_csv(&dir.path().join("trace.csv"));
    assert_eq!(header, ["iter", "edge_fraction", "score"]);
    let best = rows.iter().min_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((best[1] - 0.01).abs() < 1e-9);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("optimize.json")).unwrap()).unwrap();
    assert!(summary.is_object());
}

#[test]
fn decay_writes_profile_and_distribution() {
    let dir = tempfile::tempdir().unwrap();
    // a trapezoid lifting the resonance above the decay threshold during the plateau
    let setup: feshpulse::PhysicalSetup = serde_json::from_str(SETUP).unwrap();
    let t = 1e-3;
    let thr = setup.decay_threshold() + setup.closed_offset();
    let e0 = setup.background_threshold() - 10.0 * HBAR / t;
    let eps = (thr - e0) * t / HBAR * 1.5;
    let text = format!(
        r#"{{"setup": {SETUP}, "drive": {{"epsilon": {eps}, "duration": {t}, "base_energy": {e0:e}}},
            "pulse": {{"kind": "trapezoid", "edge_fraction": 0.3}}}}"#
    );
    let cfg = write_config(dir.path(), "d.json", &text);
    assert_eq!(run("decay", &cfg, dir.path(), &[]), 0);
    let (header, rows) = read_csv(&dir.path().join("decay.csv"));
    assert_eq!(header, ["t", "gamma", "absD"]);
    assert!(rows.iter().all(|r| r[2] > 0.0 && r[2] <= 1.0));
    assert!(rows.windows(2).all(|w| w[1][2] <= w[0][2]));
    let (_, n) = read_csv(&dir.path().join("energy_distribution.csv"));
    assert!(n.iter().all(|r| r[1] >= 0.0));
}
