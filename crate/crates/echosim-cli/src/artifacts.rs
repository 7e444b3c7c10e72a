//! Readers and writers for the CLI's file formats: plot-ready CSV tables and
//! JSON reports. All CSV is comma-separated with a header row, `.` decimals
//! and LF line endings; floats use Rust's shortest round-trip formatting so
//! identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use echosim_core::analysis::{DecayPoint, EchoReport, SweepRow};
use echosim_core::medium::Susceptibility;
use echosim_core::propagation::FieldTrace;

/// A CSV cell that does not parse as the number the header promised.
#[derive(Debug, Error)]
#[error("{path}: row {row}: {message}")]
pub struct CsvFormatError {
    pub path: PathBuf,
    /// 1-based line number in the file, header included.
    pub row: usize,
    pub message: String,
}

pub fn trace_csv(trace: &FieldTrace) -> String {
    let mut out = String::with_capacity(48 * trace.samples.len() + 32);
    out.push_str("t_us,re_env,im_env,intensity\n");
    for (k, c) in trace.samples.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", trace.time_at(k), c.re, c.im, c.norm_sqr());
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str("group_delay_us,efficiency_first,efficiency_cumulative,transmission_total\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.group_delay_us, r.efficiency_first, r.efficiency_cumulative, r.transmission_total
        );
    }
    out
}

pub fn spectra_csv(sus: &Susceptibility) -> String {
    let mut out = String::with_capacity(48 * sus.chi.len() + 40);
    out.push_str("detuning_MHz,alpha_per_mm,re_chi,im_chi\n");
    for (d, chi) in sus.detuning_mhz.iter().zip(&sus.chi) {
        let _ = writeln!(out, "{},{},{},{}", d, chi.im, chi.re, chi.im);
    }
    out
}

/// What `run` leaves behind as `report_json`.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub label: &'a str,
    /// Kramers-Kronig group delay of the prepared medium at the probe
    /// detuning (hole center when a hole is burned, line center otherwise).
    pub group_delay_us: f64,
    pub deterministic_reduction: bool,
    pub echo: &'a EchoReport,
}

pub fn to_json_file<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

/// Reads decay samples from a CSV file with `t_us` and `intensity` columns
/// (extra columns are ignored, so recorded trace files work directly).
pub fn read_decay_csv(path: &Path) -> anyhow::Result<Vec<DecayPoint>> {
    let text = fs::read_to_string(path)?;
    let bad = |row: usize, message: String| CsvFormatError {
        path: path.to_owned(),
        row,
        message,
    };

    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| bad(1, "empty file, expected a header row".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| {
        columns.iter().position(|c| *c == name).ok_or_else(|| {
            bad(1, format!("header {header:?} has no {name:?} column"))
        })
    };
    let t_col = col("t_us")?;
    let i_col = col("intensity")?;

    let mut points = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let field = |c: usize, name: &str| -> Result<f64, CsvFormatError> {
            let cell = cells.get(c).ok_or_else(|| {
                bad(row, format!("expected at least {} columns, got {}", c + 1, cells.len()))
            })?;
            cell.parse().map_err(|e| bad(row, format!("bad {name} value {cell:?}: {e}")))
        };
        points.push(DecayPoint {
            t_us: field(t_col, "t_us")?,
            intensity: field(i_col, "intensity")?,
        });
    }
    Ok(points)
}
