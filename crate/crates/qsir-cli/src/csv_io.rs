//! CSV output and re-parsing.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! a table back yields bit-identical values. Files are written atomically:
//! the bytes go to a temp file in the target directory, then a rename.

use std::fs;
use std::io::Write;
use std::path::Path;

use qsir_core::Trajectory;

use crate::config::{io_error, CliError};

pub const TRAJECTORY_HEADER: &str = "n,t,x,y,z,N";

/// Renders a trajectory table: header then one row per record, each line
/// newline-terminated.
pub fn trajectory_csv_string(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(32 * (traj.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in traj.records() {
        let s = r.state;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.t,
            s.x(),
            s.y(),
            s.z(),
            s.total_population()
        ));
    }
    out
}

/// Writes a nonempty trajectory to `path`. An empty trajectory is refused
/// before any file is created.
pub fn write_csv(traj: &Trajectory, path: &Path) -> Result<(), CliError> {
    if traj.is_empty() {
        return Err(CliError::Validation(
            "refusing to write an empty trajectory".to_string(),
        ));
    }
    write_atomic(path, trajectory_csv_string(traj).as_bytes())
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".qsir-")
        .tempfile_in(dir)
        .map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// One parsed trajectory row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub n: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub total: f64,
}

/// Reads a table produced by [`write_csv`]. `#` lines and blanks are skipped.
pub fn read_trajectory_csv(path: &Path) -> Result<Vec<CsvRow>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != TRAJECTORY_HEADER {
                return Err(CliError::Parse(format!(
                    "line {lineno}: expected header `{TRAJECTORY_HEADER}`, got `{line}`"
                )));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::Parse(format!(
                "line {lineno}: expected 6 fields, got {}",
                fields.len()
            )));
        }
        let n = fields[0].parse().map_err(|_| {
            CliError::Parse(format!("line {lineno}: invalid index `{}`", fields[0]))
        })?;
        let mut vals = [0.0f64; 5];
        for (slot, field) in vals.iter_mut().zip(&fields[1..]) {
            *slot = field.parse().map_err(|_| {
                CliError::Parse(format!("line {lineno}: invalid number `{field}`"))
            })?;
        }
        rows.push(CsvRow {
            n,
            t: vals[0],
            x: vals[1],
            y: vals[2],
            z: vals[3],
            total: vals[4],
        });
    }
    if !saw_header {
        return Err(CliError::Parse("missing trajectory header".to_string()));
    }
    Ok(rows)
}

/// A general numeric table: header names, float rows, and any `#` comment
/// lines encountered, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericCsv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub comments: Vec<String>,
}

/// Reads any CSV whose data cells are all numeric (the compare and sweep
/// tables). The first non-comment line is the header.
pub fn read_numeric_csv(path: &Path) -> Result<NumericCsv, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut header = None;
    let mut rows = Vec::new();
    let mut comments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            comments.push(line.to_string());
            continue;
        }
        if header.is_none() {
            header = Some(line.split(',').map(str::to_string).collect());
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.parse().map_err(|_| {
                    CliError::Parse(format!("line {lineno}: invalid number `{f}`"))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    let header = header.ok_or_else(|| CliError::Parse("empty table".to_string()))?;
    Ok(NumericCsv {
        header,
        rows,
        comments,
    })
}
