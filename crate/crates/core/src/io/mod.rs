//! Disk formats: binary snapshots, binary symbol tables, the run time
//! series CSV, and loading snapshot directories back into a series.

mod snapshot;
mod symbol_file;

pub use snapshot::{read_snapshot, write_snapshot, SnapshotHeader};
pub use symbol_file::{read_symbol_file, write_symbol_file};

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::diagnostics::{SeriesMetadata, SnapshotSeries};
use crate::error::{Error, Result};
use crate::solver::RunSummary;

/// File name for the snapshot at index `i`.
pub fn snapshot_file_name(i: usize) -> String {
    format!("snap_{i:06}.asf")
}

/// Write the run time series as CSV with fixed columns
/// `t,l2,h1_seminorm,linf,energy_residual`, rows strictly increasing in t.
pub fn write_timeseries_csv(path: &Path, summary: &RunSummary) -> Result<()> {
    let err = |e| Error::io(path.display().to_string(), e);
    let mut w = fs::File::create(path).map_err(err)?;
    let mut inner = || -> std::io::Result<()> {
        writeln!(w, "t,l2,h1_seminorm,linf,energy_residual")?;
        for s in &summary.samples {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                s.time, s.l2, s.h1_seminorm, s.linf, s.energy_residual
            )?;
        }
        Ok(())
    };
    inner().map_err(err)
}

/// Load every `*.asf` file in `dir` into a snapshot series sorted by time.
/// Headers must agree on grid and coefficients; the operator label comes
/// from the caller's configuration.
pub fn load_snapshot_dir(dir: &Path, operator: &str) -> Result<SnapshotSeries> {
    let err = |e| Error::io(dir.display().to_string(), e);
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(err)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "asf").unwrap_or(false))
        .collect();
    entries.sort();
    if entries.len() < 2 {
        return Err(Error::Diagnostic(format!(
            "{}: need at least 2 snapshots, found {}",
            dir.display(),
            entries.len()
        )));
    }
    let mut pairs = Vec::with_capacity(entries.len());
    for path in &entries {
        pairs.push(read_snapshot(path)?);
    }
    pairs.sort_by(|a, b| a.1.time.partial_cmp(&b.1.time).unwrap());
    let head = pairs[0].1;
    for (_, h) in &pairs {
        if h.kappa != head.kappa || h.epsilon != head.epsilon {
            return Err(Error::Format(format!(
                "{}: snapshots disagree on kappa/epsilon",
                dir.display()
            )));
        }
    }
    let mut times = Vec::with_capacity(pairs.len());
    let mut fields = Vec::with_capacity(pairs.len());
    for (f, h) in pairs {
        times.push(h.time);
        fields.push(f);
    }
    SnapshotSeries::new(
        times,
        fields,
        SeriesMetadata {
            kappa: head.kappa,
            epsilon: head.epsilon,
            operator: operator.to_string(),
        },
    )
}

/// Serialize any report type as pretty JSON.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Format(format!("report serialization failed: {e}")))?;
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}
