//! Atomic file output: every file is written to a temporary sibling and
//! renamed into place.

use crate::error::{CliError, CliResult};
use choquard::nehari::{HistoryEntry, SolveResult};
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use tempfile::NamedTempFile;

pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(path, |w| writeln!(w, "{text}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ResultSummary {
    pub c0: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub nehari: f64,
    pub boundary_warning: bool,
}

impl From<&SolveResult> for ResultSummary {
    fn from(r: &SolveResult) -> Self {
        Self {
            c0: r.c0,
            iterations: r.iterations,
            converged: r.converged,
            residual: r.relative_residual(),
            nehari: r.report.nehari,
            boundary_warning: r.boundary_warning,
        }
    }
}

pub const HISTORY_HEADER: &str = "iter,action,nehari,residual";

pub fn write_history(path: &Path, history: &[HistoryEntry]) -> CliResult<()> {
    write_atomic(path, |w| {
        writeln!(w, "{HISTORY_HEADER}")?;
        for h in history {
            writeln!(
                w,
                "{},{},{},{}",
                h.iteration, h.action, h.nehari, h.residual
            )?;
        }
        Ok(())
    })
}

pub const SWEEP_HEADER: &str = "value,c0,converged,residual,asym";

/// One sweep point; failed points carry NaN measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub c0: f64,
    pub converged: bool,
    pub residual: f64,
    pub asym: f64,
}

impl SweepRow {
    pub fn failed(value: f64) -> Self {
        Self {
            value,
            c0: f64::NAN,
            converged: false,
            residual: f64::NAN,
            asym: f64::NAN,
        }
    }
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> CliResult<()> {
    write_atomic(path, |w| {
        writeln!(w, "{SWEEP_HEADER}")?;
        for r in rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.value, r.c0, r.converged, r.residual, r.asym
            )?;
        }
        Ok(())
    })
}
