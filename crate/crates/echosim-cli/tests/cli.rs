//! End-to-end checks of the `echosim` binary: artifact layout, exit codes,
//! and the run/sweep consistency and determinism contracts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn echosim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_echosim"))
        .args(args)
        .env_remove("ECHOSIM_THREADS")
        .output()
        .expect("spawning the echosim binary")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("no exit code, killed by signal?")
}

/// Thin absorber with a two-pulse echo sequence; fast enough to run many
/// times per test.
fn mini_config() -> Value {
    json!({
        "medium": {
            "length_mm": 5.0,
            "optical_depth": 1.0,
            "inhomogeneous_fwhm_mhz": 2.0,
            "t1_us": 164.0,
            "t2_us": 111.0,
            "grid": { "half_span_mhz": 4.0, "bins": 65 }
        },
        "sequence": {
            "pulses": [
                { "label": "data", "start_us": 0.0, "duration_us": 1.5, "shape": "gaussian",
                  "strength": { "area_rad": 1.5707963267948966 } },
                { "label": "read", "start_us": 4.6, "duration_us": 2.3, "shape": "gaussian",
                  "strength": { "area_rad": 3.141592653589793 } }
            ],
            "windows": {
                "data": { "t0_us": 0.0, "t1_us": 3.5 },
                "echo1": { "t0_us": 9.0, "t1_us": 12.5 }
            }
        },
        "simulation": { "n_z": 8, "dt_us": 0.008, "t_end_us": 13.0, "record_stride": 5 }
    })
}

fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

#[test]
fn presets_subcommand_lists_every_bundled_name() {
    let out = echosim(&["presets"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    for name in echosim_core::presets::PRESET_NAMES {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn preset_run_writes_the_artifact_set() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("artifacts");
    let out = echosim(&[
        "run",
        "--preset",
        "fig2_conventional",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("efficiency_first"));

    let trace = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t_us,re_env,im_env,intensity\n"));
    assert!(!trace.contains('\r'));

    let spectra = fs::read_to_string(out_dir.join("spectra.csv")).unwrap();
    assert!(spectra.starts_with("detuning_MHz,alpha_per_mm,re_chi,im_chi\n"));

    let report: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["label"], "fig2_conventional");
    assert!(report["echo"]["efficiency_first"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_preset_exits_1_and_lists_the_choices() {
    let out = echosim(&["run", "--preset", "fig9_nope"]);
    assert_eq!(code_of(&out), 1);
    let err = stderr_of(&out);
    assert!(err.contains("fig9_nope"));
    assert!(err.contains("fig2_slowlight"), "should list presets: {err}");
}

#[test]
fn numerical_abort_exits_2_with_the_blowup_location() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = mini_config();
    cfg["medium"]["t1_us"] = json!(1e-30);
    cfg["medium"]["t2_us"] = json!(1e-30);
    let path = write_config(dir.path(), "stiff.json", &cfg);
    let out = echosim(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code_of(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("non-finite"));
}

#[test]
fn io_failures_exit_3() {
    let out = echosim(&["run", "--config", "/definitely/not/here.json"]);
    assert_eq!(code_of(&out), 3);

    // --out pointing at an existing file cannot become a directory
    let dir = tempfile::tempdir().unwrap();
    let clash = dir.path().join("file");
    fs::write(&clash, "x").unwrap();
    let out = echosim(&[
        "run",
        "--preset",
        "fig4a_twopulse",
        "--out",
        clash.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 3, "stderr: {}", stderr_of(&out));
}

#[test]
fn fit_recovers_synthetic_decay_constants() {
    let dir = tempfile::tempdir().unwrap();

    let two = dir.path().join("two.csv");
    let mut body = String::from("t_us,intensity\n");
    for k in 0..6 {
        let t = 10.0 + 8.0 * k as f64;
        body.push_str(&format!("{},{}\n", t, 0.8 * (-2.0 * t / 25.0_f64).exp()));
    }
    fs::write(&two, body).unwrap();
    let out_dir = dir.path().join("fit2");
    let out = echosim(&[
        "fit",
        two.to_str().unwrap(),
        "--model",
        "two_pulse",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let fit: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("fit.json")).unwrap()).unwrap();
    let tau = fit["tau_us"].as_f64().unwrap();
    assert!((tau - 25.0).abs() < 1e-6, "tau = {tau}");

    let three = dir.path().join("three.csv");
    let mut body = String::from("t_us,intensity\n");
    for k in 0..6 {
        let t = 40.0 + 60.0 * k as f64;
        body.push_str(&format!("{},{}\n", t, (-t / 158.0_f64).exp()));
    }
    fs::write(&three, body).unwrap();
    let out = echosim(&["fit", three.to_str().unwrap(), "--model", "three_pulse"]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("tau 158.0000"), "{}", stdout_of(&out));
}

#[test]
fn fit_rejects_short_or_malformed_input_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();

    let short = dir.path().join("short.csv");
    fs::write(&short, "t_us,intensity\n1.0,0.5\n2.0,0.4\n").unwrap();
    let out = echosim(&["fit", short.to_str().unwrap(), "--model", "two_pulse"]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("at least 4"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t_us,intensity\n1.0,0.5\n2.0,half\n3.0,0.1\n4.0,0.05\n").unwrap();
    let out = echosim(&["fit", bad.to_str().unwrap(), "--model", "two_pulse"]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("row 3"), "{}", stderr_of(&out));
}

#[test]
fn sweep_prints_the_documented_table_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = mini_config();
    cfg["sweep"] = json!({ "n_points": 2, "density_lo": 0.5, "density_hi": 1.0 });
    let path = write_config(dir.path(), "sweep.json", &cfg);
    let out = echosim(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "group_delay_us,efficiency_first,efficiency_cumulative,transmission_total"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn one_point_sweep_matches_a_plain_run() {
    let dir = tempfile::tempdir().unwrap();

    let mut run_cfg = mini_config();
    run_cfg["sequence"]["density_scale"] = json!(0.7);
    run_cfg["outputs"] = json!({ "report_json": "report.json" });
    let run_path = write_config(dir.path(), "run.json", &run_cfg);
    let run_dir = dir.path().join("run");
    let out = echosim(&[
        "run",
        "--config",
        run_path.to_str().unwrap(),
        "--out",
        run_dir.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let report: Value =
        serde_json::from_str(&fs::read_to_string(run_dir.join("report.json")).unwrap()).unwrap();
    let run_eff = report["echo"]["efficiency_first"].as_f64().unwrap();

    let mut sweep_cfg = mini_config();
    sweep_cfg["sweep"] = json!({ "n_points": 1, "density_lo": 0.7, "density_hi": 0.7 });
    let sweep_path = write_config(dir.path(), "sweep.json", &sweep_cfg);
    let sweep_dir = dir.path().join("sweep");
    let out = echosim(&[
        "sweep",
        "--config",
        sweep_path.to_str().unwrap(),
        "--out",
        sweep_dir.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let csv = fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let sweep_eff: f64 = row.split(',').nth(1).unwrap().parse().unwrap();

    assert!(run_eff > 0.0);
    let rel = ((sweep_eff - run_eff) / run_eff).abs();
    assert!(rel <= 1e-12, "run {run_eff} vs sweep {sweep_eff}, rel {rel}");
}

#[test]
fn deterministic_sweep_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = mini_config();
    cfg["sweep"] = json!({ "n_points": 4, "density_lo": 0.25, "density_hi": 1.0 });
    let path = write_config(dir.path(), "sweep.json", &cfg);

    let d1 = dir.path().join("j1");
    let d4 = dir.path().join("j4");
    let out = echosim(&[
        "sweep",
        "--config",
        path.to_str().unwrap(),
        "--jobs",
        "1",
        "--out",
        d1.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let out = echosim(&[
        "sweep",
        "--config",
        path.to_str().unwrap(),
        "--jobs",
        "4",
        "--deterministic",
        "--out",
        d4.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));

    let b1 = fs::read(d1.join("sweep.csv")).unwrap();
    let b4 = fs::read(d4.join("sweep.csv")).unwrap();
    assert_eq!(b1, b4);
}

#[test]
fn jobs_env_var_is_accepted_as_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_echosim"))
        .args(["run", "--preset", "fig4a_twopulse"])
        .env("ECHOSIM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));

    let out = Command::new(env!("CARGO_BIN_EXE_echosim"))
        .args(["run", "--preset", "fig4a_twopulse"])
        .env("ECHOSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code_of(&out), 1);
}
