use std::path::Path;
use std::process::Command;

use rindler_ent::cli::run;
use rindler_ent::experiments::{linear_grid, sweep_r, SweepSpec, DEFAULT_EPSILON};
use rindler_ent::{RindlerConfig, StateParams, Statistics};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rindler-ent").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    (
        header,
        lines.map(|l| l.split(',').map(str::to_owned).collect()).collect(),
    )
}

#[test]
fn negativity_prints_both_sides() {
    let (code, out, _) = invoke(&["negativity", "--stat", "fermion", "--r", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out, "N_AR = 0.123616546352\nN_ARbar = 0.123616546352\n");
}

#[test]
fn validation_failures_exit_one() {
    for args in [
        &["negativity", "--stat", "fermion", "--r", "0.2", "--P", "1.5"][..],
        &["negativity", "--stat", "fermion", "--r", "0.8"],
        &["negativity", "--r", "0.2"],
        &["negativity", "--stat", "boson", "--r", "0.2", "--qR", "0.5"],
        &["negativity", "--stat", "boson", "--r", "0.2", "--epsilon", "0"],
        &["sweep", "--stat", "boson", "--r-lo", "0.5", "--r-hi", "0.1"],
        &["figure", "fig9"],
        &["figure", "fig2", "--qR", "0.9"],
        &["convert", "--stat", "fermion", "--r", "0.15"],
        &["negativity", "--bogus"],
    ] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, 1, "{args:?}: {out}{err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("selfcheck"));
}

#[test]
fn exhausted_cutoff_schedule_exits_two() {
    let (code, out, _) = invoke(&["negativity", "--stat", "boson", "--r", "3"]);
    assert_eq!(code, 2);
    assert!(out.contains("exhausted"));
}

#[test]
fn sweep_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let args = [
        "sweep", "--stat", "boson", "--qR", "0.85", "--r-lo", "0", "--r-hi", "1", "--count", "11",
    ];
    let (code, _, _) = invoke(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(code, 0);

    let (header, rows) = csv_rows(&path);
    assert_eq!(
        header,
        ["r_omega", "N_AR", "N_ARbar", "n_max", "tail_bound", "converged"]
    );
    let spec = SweepSpec {
        params: StateParams::new(0.4, 0.0, 1.0).unwrap(),
        template: RindlerConfig::new(Statistics::Boson, 0.0, 0.85, 8).unwrap(),
        r_grid: linear_grid(0.0, 1.0, 11, true),
        epsilon: DEFAULT_EPSILON,
    };
    let expect = sweep_r(&spec).unwrap();
    assert_eq!(rows.len(), expect.len());
    for (row, want) in rows.iter().zip(&expect) {
        let parsed: Vec<f64> = row[..3].iter().map(|s| s.parse().unwrap()).collect();
        assert!((parsed[0] - want.r_omega).abs() <= 1e-12 * want.r_omega.max(1.0));
        assert!((parsed[1] - want.n_ar).abs() <= 1e-11 * want.n_ar.max(1e-300));
        assert!((parsed[2] - want.n_arbar).abs() <= 1e-11 * want.n_arbar.max(1e-300));
        assert_eq!(row[3].parse::<u32>().unwrap(), want.n_max_used);
        assert_eq!(row[5], "true");
    }
    // unequal weights break the Rob/AntiRob symmetry
    assert!(rows.iter().skip(1).any(|r| r[1] != r[2]));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("run{i}.csv"));
            let (code, _, _) = invoke(&["figure", "fig2", "--out", path.to_str().unwrap()]);
            assert_eq!(code, 0);
            std::fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(String::from_utf8_lossy(&outputs[0]).lines().count(), 201);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "stat = \"boson\"\nP = 0.1\nalpha = 0.0\nbeta = 1.0\nqR = \"1/sqrt2\"\nr = 0.3\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let (code, from_file, _) = invoke(&["negativity", "--config", cfg]);
    assert_eq!(code, 0);
    let (_, explicit, _) = invoke(&["negativity", "--stat", "boson", "--P", "0.1", "--r", "0.3"]);
    assert_eq!(from_file, explicit);

    let (_, overridden, _) = invoke(&["negativity", "--config", cfg, "--P", "0.4"]);
    let (_, direct, _) = invoke(&["negativity", "--stat", "boson", "--P", "0.4", "--r", "0.3"]);
    assert_eq!(overridden, direct);
    assert_ne!(overridden, from_file);
}

#[test]
fn bad_config_files_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "stat = \"boson\"\nshots = 3\n").unwrap();
    let (code, _, err) = invoke(&["negativity", "--config", cfg.to_str().unwrap(), "--r", "0.1"]);
    assert_eq!(code, 1);
    assert!(err.contains("shots"));
    let missing = dir.path().join("absent.toml");
    assert_eq!(invoke(&["negativity", "--config", missing.to_str().unwrap()]).0, 1);
}

#[test]
fn fig3_maximum_sits_near_the_bosonic_peak() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let (code, _, _) = invoke(&["figure", "fig3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, rows) = csv_rows(&path);
    assert_eq!(rows.len(), 200);
    let best = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()))
        .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    assert!((best.0 - 0.191).abs() < 0.01, "{best:?}");
    assert!((best.1 - 0.1274).abs() < 5e-4, "{best:?}");
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn json_output_carries_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("peak.json");
    let (code, _, _) = invoke(&[
        "peak",
        "--stat",
        "boson",
        "--r-lo",
        "0.05",
        "--r-hi",
        "0.5",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["meta"]["config"]["statistics"], "boson");
    let r_star = doc["rows"][0]["r_star"].as_f64().unwrap();
    assert!((r_star - 0.1906).abs() < 1e-3);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing-dir").join("out.csv");
    let (code, _, err) = invoke(&["figure", "fig2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot write"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rindler-ent");
    let ok = Command::new(bin).arg("selfcheck").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("0 failed"));

    let faulty = Command::new(bin)
        .args(["selfcheck", "--inject-sign-fault"])
        .output()
        .unwrap();
    assert_eq!(faulty.status.code(), Some(1));

    let capped = Command::new(bin)
        .env("RINDLER_ENT_THREADS", "1")
        .args(["convert", "--stat", "fermion", "--r", "0.15", "--omega", "1e6"])
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&capped.stdout).contains("5.0810e13 g"));
}
