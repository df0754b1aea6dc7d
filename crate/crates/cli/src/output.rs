//! On-disk formats: field snapshots, the diagnostics CSV and the run manifest.
//!
//! A snapshot is a pair of files sharing a stem: `<stem>.bin` holds `Nx * Ny`
//! little-endian `f64` values, row-major with `x` fastest, and `<stem>.json`
//! holds single-line metadata.

use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use kp_core::diagnostics::DiagnosticsRecord;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CSV_HEADER: &str = "t,l2,delta,linf,energy,dev_linf,dev_l2";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub t: f64,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub equation: String,
    pub kappa: f64,
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub format_version: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed snapshot metadata: {0}")]
    Metadata(#[from] serde_json::Error),
    #[error("unsupported snapshot format version {0}")]
    Version(u32),
    #[error("payload holds {got} values, metadata expects {want}")]
    Length { got: usize, want: usize },
}

pub fn snapshot_stem(index: usize) -> String {
    format!("snapshot_{index:03}")
}

/// Writes `<dir>/<stem>.bin` and `<dir>/<stem>.json`; returns the payload path.
pub fn write_snapshot(
    dir: &Path,
    stem: &str,
    meta: &SnapshotMeta,
    values: &[f64],
) -> Result<PathBuf, FormatError> {
    if values.len() != meta.nx * meta.ny {
        return Err(FormatError::Length {
            got: values.len(),
            want: meta.nx * meta.ny,
        });
    }
    let bin = dir.join(format!("{stem}.bin"));
    let mut w = BufWriter::new(File::create(&bin)?);
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    let mut json = serde_json::to_string(meta)?;
    json.push('\n');
    fs::write(dir.join(format!("{stem}.json")), json)?;
    Ok(bin)
}

/// Reads a snapshot given either of its two paths.
pub fn read_snapshot(path: &Path) -> Result<(SnapshotMeta, Vec<f64>), FormatError> {
    let meta: SnapshotMeta =
        serde_json::from_str(&fs::read_to_string(path.with_extension("json"))?)?;
    if meta.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(meta.format_version));
    }
    let mut bytes = Vec::new();
    File::open(path.with_extension("bin"))?.read_to_end(&mut bytes)?;
    let want = meta.nx * meta.ny;
    if bytes.len() != want * 8 {
        return Err(FormatError::Length {
            got: bytes.len() / 8,
            want,
        });
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((meta, values))
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_optional(v: Option<f64>) -> String {
    v.map(fmt_value).unwrap_or_default()
}

pub fn csv_row(r: &DiagnosticsRecord) -> String {
    [
        fmt_value(r.t),
        fmt_value(r.l2),
        fmt_value(r.delta),
        fmt_value(r.linf),
        fmt_value(r.energy),
        fmt_optional(r.dev_linf),
        fmt_optional(r.dev_l2),
    ]
    .join(",")
}

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", csv_row(r))?;
    }
    w.flush()
}

pub fn read_diagnostics_csv(path: &Path) -> io::Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "unexpected CSV header",
        ));
    }
    let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    lines
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(invalid(format!("expected 7 columns: {line}")));
            }
            let num = |s: &str| -> io::Result<f64> {
                s.parse().map_err(|e| invalid(format!("{s}: {e}")))
            };
            let opt = |s: &str| -> io::Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    num(s).map(Some)
                }
            };
            Ok(DiagnosticsRecord {
                t: num(cols[0])?,
                l2: num(cols[1])?,
                delta: num(cols[2])?,
                linf: num(cols[3])?,
                energy: num(cols[4])?,
                dev_linf: opt(cols[5])?,
                dev_l2: opt(cols[6])?,
            })
        })
        .collect()
}
