//! Experiment reports and their on-disk forms: a stable JSON schema and one
//! CSV per metric series, both keyed by a content hash of the canonical
//! configuration so sweep outputs never collide.

use crate::config::RunConfig;
use crate::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// One named series of `(x, value)` points.
#[derive(Debug, Clone, Serialize)]
pub struct MetricSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// One pass/fail check with its measured value and pinned tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub label: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

/// Self-contained outcome of one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub name: String,
    /// plain-language statements of the properties this experiment checks
    pub claims: Vec<String>,
    /// flattened configuration, sufficient to re-run
    pub params: Vec<(String, String)>,
    pub metrics: Vec<MetricSeries>,
    pub verdicts: Vec<Verdict>,
    pub runtime_seconds: f64,
    /// set when an evolution stopped on amplitude growth
    pub blowup_time: Option<f64>,
}

impl ExperimentReport {
    pub fn new(name: &str, cfg: &RunConfig) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            claims: Vec::new(),
            params: cfg.to_pairs(),
            metrics: Vec::new(),
            verdicts: Vec::new(),
            runtime_seconds: 0.0,
            blowup_time: None,
        }
    }

    pub fn claim(&mut self, text: &str) {
        self.claims.push(text.into());
    }

    pub fn metric(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.metrics.push(MetricSeries {
            label: label.into(),
            points,
        });
    }

    /// Record a check of the form `measured <= tolerance`.
    pub fn check_below(&mut self, label: &str, measured: f64, tolerance: f64) {
        self.verdicts.push(Verdict {
            label: label.into(),
            passed: measured.is_finite() && measured <= tolerance,
            measured,
            tolerance,
        });
    }

    /// Record a check of the form `measured >= threshold`.
    pub fn check_above(&mut self, label: &str, measured: f64, threshold: f64) {
        self.verdicts.push(Verdict {
            label: label.into(),
            passed: measured.is_finite() && measured >= threshold,
            measured,
            tolerance: threshold,
        });
    }

    /// Record a boolean check, keeping a representative measured value.
    pub fn check_that(&mut self, label: &str, passed: bool, measured: f64) {
        self.verdicts.push(Verdict {
            label: label.into(),
            passed,
            measured,
            tolerance: f64::NAN,
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Content hash (first 12 hex digits of SHA-256) of the canonical
/// serialization of a configuration. The output directory is excluded: it
/// names where results land, not what was computed, and two runs of the same
/// physics must produce identically named, byte-identical artifacts.
pub fn config_hash(cfg: &RunConfig) -> String {
    let text: String = cfg
        .to_pairs()
        .iter()
        .filter(|(k, _)| k != "out_dir")
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// CSV body for one metric: metadata comment, `x,value` header, one row per
/// point. Bytes are a pure function of the inputs.
pub fn csv_body(experiment: &str, hash: &str, series: &MetricSeries) -> String {
    let mut out = format!("# nlw-morawetz {experiment} {hash}\nx,value\n");
    for (x, v) in &series.points {
        out.push_str(&format!("{x},{v}\n"));
    }
    out
}

/// Write the JSON report and one CSV per metric into `out_dir`, creating it
/// if needed. Returns the written paths (JSON first).
pub fn write_outputs(
    report: &ExperimentReport,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let hash = config_hash(cfg);
    let mut written = Vec::new();

    let json_path = out_dir.join(format!("{}-{hash}.report.json", report.name));
    let mut file = std::fs::File::create(&json_path)?;
    let body = serde_json::to_string_pretty(report).expect("report serialization is infallible");
    file.write_all(body.as_bytes())?;
    file.write_all(b"\n")?;
    written.push(json_path);

    for series in &report.metrics {
        let path = out_dir.join(format!(
            "{}-{hash}-{}.csv",
            report.name,
            sanitize_label(&series.label)
        ));
        std::fs::write(&path, csv_body(&report.name, &hash, series))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let cfg = RunConfig::default();
        let h1 = config_hash(&cfg);
        let h2 = config_hash(&cfg);
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 12);
        let mut other = cfg.clone();
        other.apply_set("lambda = 1").unwrap();
        assert_ne!(h1, config_hash(&other));
    }

    #[test]
    fn csv_format_is_fixed() {
        let series = MetricSeries {
            label: "drift".into(),
            points: vec![(0.0, 1.0), (0.5, 0.25)],
        };
        let body = csv_body("energy_conservation", "abc123", &series);
        assert_eq!(
            body,
            "# nlw-morawetz energy_conservation abc123\nx,value\n0,1\n0.5,0.25\n"
        );
    }

    #[test]
    fn outputs_land_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default();
        let mut report = ExperimentReport::new("energy_conservation", &cfg);
        report.metric("drift", vec![(0.0, 0.0), (1.0, 1e-6)]);
        report.check_below("drift_small", 1e-6, 1e-4);
        let paths = write_outputs(&report, &cfg, dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths[0].to_string_lossy().ends_with(".report.json"));
        let json = std::fs::read_to_string(&paths[0]).unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        let csv = std::fs::read_to_string(&paths[1]).unwrap();
        let line_count = csv.lines().count();
        assert_eq!(line_count, 2 + report.metrics[0].points.len());
        assert!(report.passed());
    }

    #[test]
    fn verdict_helpers() {
        let cfg = RunConfig::default();
        let mut report = ExperimentReport::new("x", &cfg);
        report.check_below("a", 2.0, 1.0);
        assert!(!report.passed());
        report.verdicts.clear();
        report.check_above("b", 2.0, 1.0);
        report.check_that("c", true, 0.0);
        report.check_below("d", f64::NAN, 1.0);
        assert!(!report.passed());
        assert!(report.verdicts[0].passed && report.verdicts[1].passed);
    }
}
