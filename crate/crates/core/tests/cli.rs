//! End-to-end contract of the `nlw` binary: flag handling, config loading,
//! exit codes, artifact layout, CSV schema, and the sweep runner.

use std::path::Path;
use std::process::{Command, Output};

fn nlw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn nlw_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nlw"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// A config that runs in a few milliseconds and passes.
const FAST: &str = "experiment = l2star_decay\n";

#[test]
fn list_prints_registry_and_exits_zero() {
    let out = nlw(&["--list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in nlw_core::experiments::REGISTRY {
        assert!(
            text.lines().any(|l| l == name),
            "{name} missing from --list"
        );
    }
}

#[test]
fn passing_run_writes_artifacts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = nlw(&[
        "--experiment",
        "l2star_decay",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let entries: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let report = entries
        .iter()
        .find(|n| n.ends_with(".report.json"))
        .expect("JSON report written");
    assert!(report.starts_with("l2star_decay-"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join(report)).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["name"], "l2star_decay");
    assert!(json["verdicts"].as_array().is_some_and(|v| !v.is_empty()));

    // CSV schema: metadata comment, fixed header, row count = series length
    let csv_name = entries
        .iter()
        .find(|n| n.ends_with(".csv"))
        .expect("CSV written");
    let csv = std::fs::read_to_string(out_dir.join(csv_name)).unwrap();
    let mut lines = csv.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# nlw-morawetz l2star_decay "), "{meta}");
    assert_eq!(lines.next().unwrap(), "x,value");
    let rows = lines.count();
    let series_len = json["metrics"][0]["points"].as_array().unwrap().len();
    assert_eq!(rows, series_len);

    // stdout shows the experiment line with the hash and one verdict per line
    let text = stdout(&out);
    assert!(text.contains("experiment l2star_decay ("));
    assert!(text.contains("[PASS] decay_slope"));
}

#[test]
fn verdict_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // free_asymptotics carries the documented red outgoing-floor clause
    let out = nlw(&[
        "--experiment",
        "free_asymptotics",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("[FAIL] outgoing_below_huygens_floor"));
}

#[test]
fn usage_errors_exit_two() {
    // unknown experiment lists the registry
    let out = nlw(&["--experiment", "nope"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("energy_conservation"));

    // CFL violation names dt and the bound
    let out = nlw(&["--experiment", "l2star_decay", "--set", "dt=0.05"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("dt"));

    // unknown keys are rejected, naming the key
    let out = nlw(&["--experiment", "l2star_decay", "--set", "tollerance=1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("tollerance"));

    // malformed config file
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "experiment = l2star_decay\nwhat even is this\n").unwrap();
    let out = nlw(&["--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn io_errors_exit_three() {
    let out = nlw(&["--config", "/definitely/not/here.cfg"]);
    assert_eq!(code(&out), 3);

    // unwritable output directory
    let out = nlw(&[
        "--experiment",
        "l2star_decay",
        "--out",
        "/proc/no_such_dir/out",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn config_file_flags_and_sets_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "experiment = energy_conservation\nt_max = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    // --experiment overrides the file, --set overrides both
    let out = nlw(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "--experiment",
        "l2star_decay",
        "--set",
        "data_width = 2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_str().unwrap().ends_with(".report.json"))
        .unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["name"], "l2star_decay");
    let width = json["params"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p[0] == "data_width")
        .unwrap();
    assert_eq!(width[1], "2");
}

fn write_sweep(dir: &Path, configs: &[(&str, &str)]) -> std::path::PathBuf {
    let mut listing = String::from("# sweep listing\n\n");
    for (name, body) in configs {
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        listing.push_str(path.to_str().unwrap());
        listing.push('\n');
    }
    let list_path = dir.join("sweep.txt");
    std::fs::write(&list_path, listing).unwrap();
    list_path
}

#[test]
fn sweep_runs_all_configs_and_reports_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    let list = write_sweep(
        dir.path(),
        &[
            ("a.cfg", FAST),
            ("b.cfg", "experiment = no_rate_scaling\n"),
            ("c.cfg", "experiment = free_asymptotics\n"),
        ],
    );
    let out_dir = dir.path().join("out");
    let out = nlw_env(
        &[
            "--sweep",
            list.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[("NLW_THREADS", "2")],
    );
    // c.cfg carries the documented red clause -> overall exit 1
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("a.cfg: pass"));
    assert!(text.contains("b.cfg: pass"));
    assert!(text.contains("c.cfg: FAIL"));
    // every run wrote its report
    let reports = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .into_string()
                .unwrap()
                .ends_with(".report.json")
        })
        .count();
    assert_eq!(reports, 3);
}

#[test]
fn sweep_rejects_invalid_member_upfront() {
    let dir = tempfile::tempdir().unwrap();
    let list = write_sweep(
        dir.path(),
        &[("a.cfg", FAST), ("bad.cfg", "experiment = nope\n")],
    );
    let out = nlw(&["--sweep", list.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    // nothing ran
    assert!(!stdout(&out).contains("a.cfg: pass"));
}

#[test]
fn sweep_missing_listing_exits_three() {
    let out = nlw(&["--sweep", "/no/such/listing.txt"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn rerun_is_byte_identical_including_report_filenames() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    nlw(&[
        "--experiment",
        "no_rate_scaling",
        "--out",
        a.to_str().unwrap(),
    ]);
    nlw(&[
        "--experiment",
        "no_rate_scaling",
        "--out",
        b.to_str().unwrap(),
    ]);
    let names = |d: &Path| {
        let mut v: Vec<String> = std::fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    let (na, nb) = (names(&a), names(&b));
    assert_eq!(na, nb, "artifact names must not depend on the output path");
    for n in na.iter().filter(|n| n.ends_with(".csv")) {
        assert_eq!(
            std::fs::read(a.join(n)).unwrap(),
            std::fs::read(b.join(n)).unwrap(),
            "{n} differs between reruns"
        );
    }
}
