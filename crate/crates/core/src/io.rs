//! Matrix and vector export: CSV and the flat SPDO binary format.
//!
//! SPDO layout (little-endian): magic `b"SPDO"`, `version: u32`, `rows: u32`,
//! `cols: u32`, then `rows * cols` `f64` values in row-major order.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, SpdoError};

pub const SPDO_MAGIC: [u8; 4] = *b"SPDO";
pub const SPDO_VERSION: u32 = 1;
pub const SPDO_HEADER_LEN: usize = 16;

/// A row-major dense array as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Array2 {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Array2 {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(SpdoError::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} array",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn column(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

fn dim_u32(v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| SpdoError::Format(format!("dimension {v} exceeds u32")))
}

pub fn write_spdo(mut w: impl Write, a: &Array2) -> Result<()> {
    w.write_all(&SPDO_MAGIC)?;
    w.write_all(&SPDO_VERSION.to_le_bytes())?;
    w.write_all(&dim_u32(a.rows)?.to_le_bytes())?;
    w.write_all(&dim_u32(a.cols)?.to_le_bytes())?;
    for v in &a.data {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_spdo(mut r: impl Read) -> Result<Array2> {
    let mut header = [0u8; SPDO_HEADER_LEN];
    r.read_exact(&mut header)?;
    if header[..4] != SPDO_MAGIC {
        return Err(SpdoError::Format("missing SPDO magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != SPDO_VERSION {
        return Err(SpdoError::Format(format!("unsupported SPDO version {version}")));
    }
    let (rows, cols) = (word(8) as usize, word(12) as usize);
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let expected = rows * cols * 8;
    if body.len() != expected {
        return Err(SpdoError::Format(format!(
            "{rows}x{cols} payload needs {expected} bytes, found {}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Array2::new(rows, cols, data)
}

pub fn save_spdo(path: impl AsRef<Path>, a: &Array2) -> Result<()> {
    let mut buf = Vec::with_capacity(SPDO_HEADER_LEN + 8 * a.data.len());
    write_spdo(&mut buf, a)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_spdo(path: impl AsRef<Path>) -> Result<Array2> {
    read_spdo(std::fs::File::open(path)?)
}

/// Comma-separated rows, full `f64` round-trip precision.
pub fn to_csv(a: &Array2) -> String {
    let mut out = String::new();
    for i in 0..a.rows {
        let row: Vec<String> = (0..a.cols).map(|j| format!("{:e}", a.get(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn from_csv(text: &str) -> Result<Array2> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| SpdoError::Format(format!("line {}: `{s}`: {e}", k + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        match cols {
            None => cols = Some(vals.len()),
            Some(c) if c != vals.len() => {
                return Err(SpdoError::Format(format!(
                    "line {}: expected {c} columns, found {}",
                    k + 1,
                    vals.len()
                )))
            }
            _ => {}
        }
        data.extend(vals);
        rows += 1;
    }
    Array2::new(rows, cols.unwrap_or(0), data)
}

/// Writes `.spdo`/`.bin` paths in binary and everything else as CSV.
pub fn save_array(path: impl AsRef<Path>, a: &Array2) -> Result<()> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("spdo" | "bin") => save_spdo(path, a),
        _ => Ok(std::fs::write(path, to_csv(a))?),
    }
}
