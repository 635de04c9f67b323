use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dotphase(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dotphase"))
        .args(args)
        .env_remove("DOTPHASE_OUTPUT_DIR")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], i32)] = &[
        (&["feasibility"], 0),
        (&["estimate", "--m", "3", "--phi", "0.625turn"], 0),
        (&["--help"], 0),
        (&["--version"], 0),
        (&[], 1),
        (&["bogus"], 1),
        (&["estimate", "--m", "3"], 1),
        (&["estimate", "--m", "3", "--phi", "7"], 1),
        (&["estimate", "--m", "3", "--phi", "0"], 1),
        (&["estimate", "--m", "3", "--phi", "abc"], 1),
        (&["estimate", "--m", "0", "--phi", "1"], 1),
        (&["estimate", "--m", "3", "--n", "4", "--phi", "1"], 1),
        (
            &["estimate", "--m", "3", "--phi", "1", "--gate-mode", "fast"],
            1,
        ),
        (&["sweep", "--m", "5", "--n", "3"], 1),
        (&["sweep", "--m", "2", "--n", "3", "--phi", "1"], 1),
        (&["pulse-fit"], 1),
        (&["pulse-fit", "--preset", "cnot"], 1),
        (&["pulse-fit", "--matrix", "1,0,0,0"], 1),
        (&["pulse-fit", "--matrix", "1,0,1,0,0,0,1,0"], 1),
        (&["calibrate-clock", "--duration-s", "1e-9"], 1),
        (
            &[
                "calibrate-clock",
                "--varphi",
                "0.2",
                "--scale-total",
                "4",
                "--scales-elapsed",
                "0",
                "--ideal-time-s",
                "1",
            ],
            1,
        ),
        (
            &[
                "calibrate-clock",
                "--varphi",
                "1.5",
                "--scale-total",
                "4",
                "--scales-elapsed",
                "1",
                "--ideal-time-s",
                "1",
            ],
            1,
        ),
        (&["feasibility", "--delta-mev", "0"], 1),
        (&["feasibility", "--format", "csv"], 1),
        (&["replay", "missing.json"], 1),
        (&["--config", "missing.toml", "feasibility"], 1),
    ];
    for (args, code) in cases {
        let out = dotphase(args, dir.path());
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn estimate_representable_phase() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&dotphase(
        &["estimate", "--m", "3", "--phi", "0.625turn"],
        dir.path(),
    ));
    let est = &r["results"]["estimate"];
    assert_eq!(est["readout"], 5);
    assert_eq!(est["bits"], serde_json::json!([1, 0, 1]));
    let phi = est["estimated_phase"].as_f64().unwrap();
    assert!((phi - std::f64::consts::TAU * 0.625).abs() < 1e-12);
    assert!((est["eta_percent"].as_f64().unwrap() - 100.0).abs() < 1e-9);
    assert_eq!(r["results"]["distribution"].as_array().unwrap().len(), 8);
    for key in ["config", "results", "warnings", "versions", "timing"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn estimate_shots_are_identical_for_representable_phase() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "estimate",
        "--m",
        "3",
        "--phi",
        "0.625turn",
        "--shots",
        "100",
        "--seed",
        "42",
    ];
    let r = json(&dotphase(&args, dir.path()));
    assert_eq!(
        r["results"]["shot_counts"],
        serde_json::json!([{ "readout": 5, "count": 100 }])
    );
}

#[test]
fn large_distributions_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&dotphase(
        &["estimate", "--m", "13", "--phi", "1.0"],
        dir.path(),
    ));
    assert!(r["results"].get("distribution").is_none());
    let r = json(&dotphase(
        &["estimate", "--m", "13", "--phi", "1.0", "--distribution"],
        dir.path(),
    ));
    assert_eq!(r["results"]["distribution"].as_array().unwrap().len(), 8192);
}

#[test]
fn sweep_json_and_csv_agree() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "sweep",
        "--m",
        "5,6,7",
        "--n",
        "3",
        "--random-phis",
        "20",
        "--seed",
        "9",
    ];
    let r = json(&dotphase(&base, dir.path()));
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 60);
    assert!(rows.iter().all(|row| row["meets_bound"] == true));

    let mut args = base.to_vec();
    args.extend(["--format", "csv"]);
    let out = dotphase(&args, dir.path());
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["m", "n", "phi", "empirical_success", "bound", "meets_bound"]
    );
    let records: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 60);
    for (rec, row) in records.iter().zip(rows) {
        assert_eq!(rec[0].parse::<u64>().unwrap(), row["m"].as_u64().unwrap());
        assert_eq!(rec[2].parse::<f64>().unwrap(), row["phi"].as_f64().unwrap());
        assert_eq!(
            rec[3].parse::<f64>().unwrap(),
            row["empirical_success"].as_f64().unwrap()
        );
    }
}

#[test]
fn sweep_representable_phase_always_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&dotphase(
        &["sweep", "--m", "5,6,7", "--n", "3", "--phi", "0.25turn"],
        dir.path(),
    ));
    for row in r["results"]["rows"].as_array().unwrap() {
        assert!((row["empirical_success"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn pulse_fit_presets() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&dotphase(
        &["pulse-fit", "--preset", "hadamard"],
        dir.path(),
    ));
    let d = r["results"]["nominal"]["distance_to_ideal"]
        .as_f64()
        .unwrap();
    assert!((d - 2.0).abs() < 1e-9);
    assert!(!r["warnings"].as_array().unwrap().is_empty());

    let r = json(&dotphase(
        &["pulse-fit", "--preset", "paper-phase:0.7"],
        dir.path(),
    ));
    assert!(r["results"]["fit"]["residual"].as_f64().unwrap() < 1e-8);

    // Pauli X as a raw matrix.
    let r = json(&dotphase(
        &["pulse-fit", "--matrix", "0,0,1,0,1,0,0,0"],
        dir.path(),
    ));
    assert!(r["results"]["fit"]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn calibrate_clock_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    // varphi = 0.25 gives T = 2π/K; with O = h the total time equals T.
    let eo = dotphase::ElectroOpticParams::default();
    let t = dotphase::phase_to_time(0.25, &eo).unwrap();
    let ideal = format!("{t:e}");
    let short = format!("{:e}", t / 0.9);
    let run = |ideal: &str, mode: &str| {
        json(&dotphase(
            &[
                "calibrate-clock",
                "--varphi",
                "0.25",
                "--scale-total",
                "2",
                "--scales-elapsed",
                "2",
                "--ideal-time-s",
                ideal,
                "--eta-percent",
                "100",
                "--comparison-mode",
                mode,
            ],
            dir.path(),
        ))
    };
    let r = run(&ideal, "deviation");
    assert_eq!(r["results"]["calibration"]["verdict"], "accurate");
    let r = run(&short, "deviation");
    assert_eq!(r["results"]["calibration"]["verdict"], "increase-frequency");
    let r = run(&short, "paper-literal");
    assert_eq!(r["results"]["calibration"]["verdict"], "accurate");
}

#[test]
fn feasibility_defaults_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&dotphase(&["feasibility"], dir.path()));
    let res = &r["results"];
    assert_eq!(res["max_qubits"], 447);
    assert!((res["gamma"].as_f64().unwrap() - 1e-6).abs() < 1e-8);
    assert!((res["protocol_time_s"].as_f64().unwrap() - 10.1025).abs() < 1e-9);
    assert_eq!(res["within_coherence"], false);
    let warnings: Vec<&str> = r["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_str().unwrap())
        .collect();
    assert!(warnings.iter().any(|w| w.contains("30 kHz")));
    assert!(warnings.iter().any(|w| w.contains("coherence")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "command = \"estimate\"\nseed = 5\n\n[estimate]\nm = 4\nphi = \"0.3turn\"\nshots = 50\n",
    )
    .unwrap();
    let r = json(&dotphase(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "estimate",
            "--shots",
            "10",
        ],
        dir.path(),
    ));
    assert_eq!(r["config"]["estimate"]["m"], 4);
    assert_eq!(r["config"]["estimate"]["shots"], 10);
    assert_eq!(r["config"]["seed"], 5);

    std::fs::write(&cfg, "[estimate]\nm = 4\nphi = 1.0\nunknown = 1\n").unwrap();
    let out = dotphase(&["--config", cfg.to_str().unwrap(), "estimate"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // A config for another command is refused.
    std::fs::write(&cfg, "command = \"sweep\"\n").unwrap();
    let out = dotphase(
        &["--config", cfg.to_str().unwrap(), "feasibility"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_doubles_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dotphase(
        &["estimate", "--m", "5", "--phi", "2.0", "--shots", "64"],
        dir.path(),
    );
    let path = dir.path().join("report.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let a = json(&first);
    let b = json(&dotphase(
        &["--config", path.to_str().unwrap(), "estimate"],
        dir.path(),
    ));
    let c = json(&dotphase(&["replay", path.to_str().unwrap()], dir.path()));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["results"], c["results"]);
    assert_eq!(a["config"], c["config"]);
}

#[test]
fn same_seed_same_results() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "estimate", "--m", "6", "--phi", "1.234", "--shots", "300", "--seed", "77",
    ];
    let a = json(&dotphase(&args, dir.path()));
    let b = json(&dotphase(&args, dir.path()));
    assert_eq!(a["results"], b["results"]);
    let other = [
        "estimate", "--m", "6", "--phi", "1.234", "--shots", "300", "--seed", "78",
    ];
    let c = json(&dotphase(&other, dir.path()));
    assert_ne!(a["results"]["shot_counts"], c["results"]["shot_counts"]);
}

#[test]
fn output_locations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dotphase(&["feasibility", "-o", "nested/out.json"], dir.path());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("nested/out.json")).unwrap();
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["config"]["output_path"], "nested/out.json");

    let env_dir = dir.path().join("reports");
    let out = Command::new(env!("CARGO_BIN_EXE_dotphase"))
        .args([
            "sweep", "--m", "5", "--n", "3", "--phi", "1", "--format", "csv",
        ])
        .env("DOTPHASE_OUTPUT_DIR", &env_dir)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(env_dir.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("m,n,phi,"));
}
