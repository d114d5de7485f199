//! Binary operator export and JSON/CSV tables.
//!
//! An operator `op` written to base path `p` produces `p.bin`, the matrix as
//! little-endian `f64` pairs `(re, im)` in row-major order with no header,
//! and `p.json`, a sidecar describing its shape, orders and provenance.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assembly::ConvergenceTable;
use super::operator::{DiscreteOperator, Provenance};
use super::toeplitz::IndexReport;
use super::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSidecar {
    pub rows: usize,
    pub cols: usize,
    pub src_s: f64,
    pub dst_s: f64,
    pub dtype: String,
    pub order: String,
    pub endianness: String,
    pub provenance: Provenance,
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> LabError {
    LabError::Io(format!("{}: {e}", path.display()))
}

pub fn write_operator(op: &DiscreteOperator, base: &Path) -> Result<(PathBuf, PathBuf), LabError> {
    let m = op.to_dense();
    let mut bytes = Vec::with_capacity(16 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            bytes.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            bytes.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    let bin = with_ext(base, "bin");
    let json = with_ext(base, "json");
    fs::write(&bin, bytes).map_err(|e| io_err(&bin, e))?;
    let side = OperatorSidecar {
        rows: m.nrows(),
        cols: m.ncols(),
        src_s: op.src.s_order,
        dst_s: op.dst.s_order,
        dtype: "complex128".into(),
        order: "row-major".into(),
        endianness: "little".into(),
        provenance: op.provenance.clone(),
    };
    write_json(&side, &json)?;
    Ok((bin, json))
}

pub fn read_operator(base: &Path) -> Result<(DMatrix<Complex64>, OperatorSidecar), LabError> {
    let json = with_ext(base, "json");
    let bin = with_ext(base, "bin");
    let text = fs::read_to_string(&json).map_err(|e| io_err(&json, e))?;
    let side: OperatorSidecar = serde_json::from_str(&text).map_err(|e| io_err(&json, e))?;
    let bytes = fs::read(&bin).map_err(|e| io_err(&bin, e))?;
    if bytes.len() != 16 * side.rows * side.cols {
        return Err(io_err(&bin, format!("expected {} bytes, found {}", 16 * side.rows * side.cols, bytes.len())));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8-byte slice"));
    let m = DMatrix::from_fn(side.rows, side.cols, |i, j| {
        let k = 2 * (i * side.cols + j);
        Complex64::new(f(k), f(k + 1))
    });
    Ok((m, side))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), LabError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<(), LabError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_convergence_csv(table: &ConvergenceTable, path: &Path) -> Result<(), LabError> {
    write_csv(&table.rows, path)
}

pub fn write_index_csv(report: &IndexReport, path: &Path) -> Result<(), LabError> {
    write_csv(&report.components, path)
}
