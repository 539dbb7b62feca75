use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{SweepResult, SweepSpec};
use crate::error::Result;
use crate::format::{fmt_sig, round_sig};

/// Provenance written next to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SweepSpec>,
    pub version: String,
    pub seed: u64,
    pub started: String,
    pub elapsed_s: f64,
    pub invocation: Vec<String>,
    pub output: String,
}

/// Writes the grid as CSV: axis columns, observable columns, diagnostics.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(result.spec.header())?;
    let axes = result.spec.axis_columns();
    for rec in &result.records {
        let mut row: Vec<String> = axes.iter().map(|p| fmt_sig(rec.params[p])).collect();
        row.extend(rec.values.iter().map(|&v| fmt_sig(v)));
        row.push(fmt_sig(rec.residual));
        row.push(rec.clamped.to_string());
        row.push(fmt_sig(rec.truncation_weight));
        row.push(rec.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let mut m = manifest.clone();
    m.elapsed_s = round_sig(m.elapsed_s);
    fs::write(path, serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(())
}

/// Writes `<dir>/<label>.csv` and `<dir>/<label>.manifest.json`, creating `dir`.
pub fn write_sweep(
    dir: &Path,
    label: &str,
    result: &SweepResult,
    preset: Option<&str>,
    invocation: &[String],
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{label}.csv"));
    let manifest_path = dir.join(format!("{label}.manifest.json"));
    write_csv(result, fs::File::create(&csv_path)?)?;
    let manifest = Manifest {
        preset: preset.map(str::to_string),
        spec: Some(result.spec.clone()),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: result.seed,
        started: result.started.clone(),
        elapsed_s: result.elapsed_s,
        invocation: invocation.to_vec(),
        output: csv_path.file_name().unwrap().to_string_lossy().into_owned(),
    };
    write_manifest(&manifest_path, &manifest)?;
    Ok((csv_path, manifest_path))
}
