//! CSV curve files and JSON run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CurvePoint;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,estimate,ci_low,ci_high,series";

pub const SNR_DEFINITION: &str = "snr_db = 10*log10(p_lu*beta_lu/n0), per BS antenna";

/// Renders points as CSV with a header row and LF line endings. Floats use
/// the shortest representation that round-trips.
pub fn to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{}", p.x, p.estimate, p.ci_low, p.ci_high, p.series);
    }
    out
}

pub fn write_csv(path: &Path, points: &[CurvePoint]) -> Result<()> {
    fs::write(path, to_csv(points)).map_err(|e| Error::io(path, e))
}

/// Everything needed to reproduce a run, plus its summary results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub snr_definition: String,
    /// Fully resolved configuration.
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    pub wall_clock_seconds: f64,
}

pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// `out.csv` → `out.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Estimate;

    #[test]
    fn csv_layout() {
        let pts = [
            CurvePoint::new(
                2.0,
                Estimate {
                    mean: 0.5,
                    ci_low: 0.25,
                    ci_high: 0.75,
                },
                "c_sc",
            ),
            CurvePoint::new(-1.5, Estimate::wilson(0, 10), "scheme2"),
        ];
        let csv = to_csv(&pts);
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "2,0.5,0.25,0.75,c_sc");
        assert!(lines[2].starts_with("-1.5,0,0,"));
        assert_eq!(lines[3], "");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("run.csv");
        let path = manifest_path(&csv);
        assert_eq!(path.file_name().unwrap(), "run.manifest.json");
        let m = Manifest {
            version: version_string(),
            command: "fig1".into(),
            seed: 7,
            snr_definition: SNR_DEFINITION.into(),
            config: serde_json::json!({"trials": 10}),
            results: serde_json::Value::Null,
            wall_clock_seconds: 0.25,
        };
        write_manifest(&path, &m).unwrap();
        assert_eq!(read_manifest(&path).unwrap(), m);
        assert!(matches!(
            write_csv(&dir.path().join("missing/x.csv"), &[]),
            Err(Error::Io { .. })
        ));
    }
}
