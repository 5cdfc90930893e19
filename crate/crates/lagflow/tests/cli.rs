use std::path::Path;
use std::process::{Command, Output};

use lagflow::output::DIAGNOSTICS_HEADER;

fn lagflow(args: &[&str], output: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lagflow"));
    cmd.args(args);
    match output {
        Some(dir) => cmd.env("LAGFLOW_OUTPUT", dir),
        None => cmd.env_remove("LAGFLOW_OUTPUT"),
    };
    cmd.output().expect("spawn lagflow")
}

fn run_config(dir: &Path, text: &str) -> Output {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, text).unwrap();
    lagflow(&["run", cfg.to_str().unwrap()], Some(&dir.join("out")))
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn unknown_key_exits_1_and_names_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "moed = curve\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1") && err.contains("moed"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_suite_and_missing_file_exit_1() {
    assert_eq!(lagflow(&["check", "nope"], None).status.code(), Some(1));
    assert_eq!(
        lagflow(&["run", "/nonexistent/x.cfg"], None).status.code(),
        Some(1)
    );
}

#[test]
fn circle_run_is_stationary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "mode = curve\ncurve_m = 128\nt_end = 0.5\nmax_dt = 1e-3\ninit = circle r=1\n",
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_csv(&dir.path().join("out/diagnostics.csv"));
    assert_eq!(rows[0].join(","), DIAGNOSTICS_HEADER);
    let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
    let first = &rows[1];
    for row in &rows[2..] {
        assert!(row[col("theta_residual")].is_empty() && row[col("slope_margin")].is_empty());
        for name in ["volume", "intA2", "isoperimetric"] {
            let a: f64 = first[col(name)].parse().unwrap();
            let b: f64 = row[col(name)].parse().unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs(), "{name}: {a} vs {b}");
        }
    }
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["blowup"], false);
    assert!(summary["blowup_time"].is_null());
    assert_eq!(summary["config"]["init"]["name"], "circle");
    let snap = read_csv(&dir.path().join("out/snapshot_0.csv"));
    assert_eq!(snap[0], ["x", "y"]);
    assert_eq!(snap.len(), 129);
}

#[test]
fn scalar_sine_decays_at_the_linear_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "mode = scalar\ndim = 1\ngrid_m = 64\ninit = sine k=1 amp=1e-6\nt_end = 0.1\n\
         method = imex_spectral\nscheme = spectral\nmax_dt = 1e-4\n",
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let snap = read_csv(&dir.path().join("out/snapshot_1.csv"));
    assert_eq!(snap[0], ["x", "phi"]);
    let m = snap.len() - 1;
    let proj: f64 = snap[1..]
        .iter()
        .map(|r| r[1].parse::<f64>().unwrap() * r[0].parse::<f64>().unwrap().sin())
        .sum::<f64>()
        * 2.0
        / m as f64;
    let expected = 1e-6 * (-0.1f64).exp();
    assert!((proj / expected - 1.0).abs() < 1e-3, "{proj} vs {expected}");
    let rows = read_csv(&dir.path().join("out/diagnostics.csv"));
    assert!(rows[1..]
        .iter()
        .all(|r| r[10].is_empty() && !r[8].is_empty()));
}

#[test]
fn environment_overrides_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let configured = dir.path().join("configured");
    let out = run_config(
        dir.path(),
        &format!(
            "mode = curve\ncurve_m = 64\nt_end = 0.001\ninit = ellipse\noutput_dir = {}\n",
            configured.display()
        ),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("out/summary.json").exists());
    assert!(!configured.exists());
}

#[test]
fn snapshots_and_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "mode = scalar\ndim = 2\ngrid_m = 16\ninit = random amp=0.01\nseed = 3\nt_end = 0.002\n\
         max_dt = 1e-3\nmethod = imex_spectral\nsnapshot_every = 1\n",
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for k in 0..3 {
        assert!(
            dir.path().join(format!("out/snapshot_{k}.csv")).exists(),
            "snapshot {k}"
        );
    }
    let snap = read_csv(&dir.path().join("out/snapshot_2.csv"));
    assert_eq!(snap[0], ["x", "y", "phi"]);
    assert_eq!(snap.len(), 257);
    let digits = snap[5][2]
        .split('e')
        .next()
        .unwrap()
        .trim_start_matches('-')
        .replace('.', "");
    assert_eq!(digits.len(), 17, "{}", snap[5][2]);
}

#[test]
fn identical_configs_give_identical_files() {
    let text = "mode = scalar\ndim = 1\ngrid_m = 32\ninit = random\nseed = 9\nt_end = 0.001\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run_config(a.path(), text).status.code(), Some(0));
    assert_eq!(run_config(b.path(), text).status.code(), Some(0));
    for f in [
        "diagnostics.csv",
        "summary.json",
        "snapshot_0.csv",
        "snapshot_1.csv",
    ] {
        let x = std::fs::read(a.path().join("out").join(f)).unwrap();
        let y = std::fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn slope_violation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "mode = scalar\ndim = 1\ngrid_m = 32\ninit = sine k=1 amp=0.5\nt_end = 0.01\n",
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn presets_and_check() {
    let out = lagflow(&["presets"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "zero",
        "sine",
        "quadratic",
        "random",
        "circle",
        "ellipse",
        "perturbed_circle",
        "figure_eight",
    ] {
        assert!(text.contains(name), "{name}");
    }

    let dir = tempfile::tempdir().unwrap();
    let out = lagflow(&["check", "symbol"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"][0]["name"], "symbol");
    assert!(dir.path().join("check.json").exists());
}

#[test]
fn check_mode_in_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "mode = check\nsuite = meanzero\n");
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("out/check.json").exists());
}
