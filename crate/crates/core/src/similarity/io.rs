//! Dense matrix files.
//!
//! Binary layout (all little-endian): the magic bytes `SOCG`, a `u32` node
//! count `n`, then `n²` `f64` values in row-major order.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

pub const MATRIX_MAGIC: &[u8; 4] = b"SOCG";

pub fn encode_matrix(matrix: &Array2<f64>) -> Result<Vec<u8>> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::invalid(format!(
            "matrix must be square, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    let n32 = u32::try_from(n).map_err(|_| Error::invalid("matrix too large for u32 header"))?;
    let mut buf = Vec::with_capacity(8 + 8 * n * n);
    buf.extend_from_slice(MATRIX_MAGIC);
    buf.extend_from_slice(&n32.to_le_bytes());
    for v in matrix.iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    Ok(buf)
}

pub fn decode_matrix(bytes: &[u8]) -> std::result::Result<Array2<f64>, String> {
    if bytes.len() < 8 || &bytes[..4] != MATRIX_MAGIC {
        return Err("missing SOCG header".into());
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let body = &bytes[8..];
    if body.len() != 8 * n * n {
        return Err(format!(
            "expected {} payload bytes for n = {n}, found {}",
            8 * n * n,
            body.len()
        ));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Array2::from_shape_vec((n, n), values).map_err(|e| e.to_string())
}

pub fn write_matrix_bin(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let bytes = encode_matrix(matrix)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_matrix_bin(path: &Path) -> Result<Array2<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_matrix(&bytes).map_err(|detail| Error::Format {
        what: "matrix",
        path: path.to_path_buf(),
        detail,
    })
}

/// Headerless CSV, one matrix row per line.
pub fn write_matrix_csv(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for row in matrix.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
