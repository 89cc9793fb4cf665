//! Plain-text matrix files.
//!
//! ```text
//! # <rows> <cols> complex
//! re,im,re,im,...      <- one line per row, 2·cols values
//! ```
//!
//! Further lines starting with `#` may follow the header and are ignored by
//! the reader; they carry provenance.
//!
//! Values are written with 17 significant digits so a read returns the exact
//! doubles that were written. Real matrices use the same layout with `im = 0`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix, C64};

/// Formats a double with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_complex_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("# {} {} complex\n", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            let v = m[(r, c)];
            let _ = write!(out, "{},{}", fmt_f64(v.re), fmt_f64(v.im));
        }
        out.push('\n');
    }
    out
}

/// As [`format_complex_matrix`], with `# key=value` lines after the header.
pub fn format_complex_matrix_annotated(m: &ComplexMatrix, notes: &[(String, String)]) -> String {
    let body = format_complex_matrix(m);
    let (header, rows) = body.split_once('\n').expect("header line");
    let mut out = format!("{header}\n");
    for (k, v) in notes {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(rows);
    out
}

pub fn format_real_matrix(m: &RealMatrix) -> String {
    format_complex_matrix(&m.map(|x| C64::new(x, 0.0)))
}

pub fn parse_complex_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty matrix file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "#" || fields[3] != "complex" {
        return Err(Error::Format(format!("bad header line: {header:?}")));
    }
    let rows: usize = fields[1]
        .parse()
        .map_err(|_| Error::Format(format!("bad row count {:?}", fields[1])))?;
    let cols: usize = fields[2]
        .parse()
        .map_err(|_| Error::Format(format!("bad column count {:?}", fields[2])))?;
    let mut lines = lines.skip_while(|l| l.starts_with('#'));
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("expected {rows} rows, found {r}")))?;
        let vals: Vec<f64> = if cols == 0 {
            Vec::new()
        } else {
            line.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Format(format!("row {r}: bad number {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        if vals.len() != 2 * cols {
            return Err(Error::Format(format!(
                "row {r}: expected {} values, found {}",
                2 * cols,
                vals.len()
            )));
        }
        for c in 0..cols {
            m[(r, c)] = C64::new(vals[2 * c], vals[2 * c + 1]);
        }
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Format("trailing data after last row".into()));
    }
    Ok(m)
}

/// Parses a matrix file and drops the imaginary parts, which must be zero.
pub fn parse_real_matrix(text: &str) -> Result<RealMatrix> {
    let m = parse_complex_matrix(text)?;
    if m.iter().any(|v| v.im != 0.0) {
        return Err(Error::Format("expected a real matrix (im = 0)".into()));
    }
    Ok(m.map(|v| v.re))
}

pub fn write_complex_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, format_complex_matrix(m))?;
    Ok(())
}

pub fn write_real_matrix(path: impl AsRef<Path>, m: &RealMatrix) -> Result<()> {
    fs::write(path, format_real_matrix(m))?;
    Ok(())
}

pub fn read_complex_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_complex_matrix(&fs::read_to_string(path)?)
}

pub fn read_real_matrix(path: impl AsRef<Path>) -> Result<RealMatrix> {
    parse_real_matrix(&fs::read_to_string(path)?)
}
