//! Dense row-major matrices and their on-disk text format.
//!
//! The format is a header line `n dim` followed by one line per row:
//! `row_id TAB v1,v2,...`. Values are written with Rust's shortest
//! round-trip float formatting, so reading a written matrix is lossless.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::util::write_atomic;
use crate::{Error, Result};

/// Borrowed view over a row-major matrix.
#[derive(Debug, Clone, Copy)]
pub struct MatrixView<'a> {
    rows: usize,
    cols: usize,
    data: &'a [f64],
}

impl<'a> MatrixView<'a> {
    pub fn new(rows: usize, cols: usize, data: &'a [f64]) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::InvalidInput(format!(
                "matrix shape {rows}x{cols} does not match {} values",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &'a [f64] {
        self.data
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Flatten a list of equally sized rows.
pub fn flatten_rows(rows: &[Vec<f64>]) -> Result<(usize, usize, Vec<f64>)> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut data = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        if row.len() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: row.len(),
            });
        }
        data.extend_from_slice(row);
    }
    Ok((rows.len(), cols, data))
}

pub fn write_matrix<W: Write + ?Sized>(out: &mut W, view: MatrixView<'_>) -> Result<()> {
    writeln!(out, "{} {}", view.rows(), view.cols())?;
    for i in 0..view.rows() {
        write!(out, "{i}\t")?;
        for (j, v) in view.row(i).iter().enumerate() {
            if j > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{v}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_matrix(path: &Path, view: MatrixView<'_>) -> Result<()> {
    write_atomic(path, |w| write_matrix(w, view))
}

/// Parse one `id TAB v1,v2,...` line.
pub(crate) fn parse_row_line(line: &str, line_no: usize) -> Result<(usize, Vec<f64>)> {
    let bad = |reason: String| Error::Parse {
        what: "matrix row",
        line: line_no,
        reason,
    };
    let (id, values) = line
        .split_once('\t')
        .ok_or_else(|| bad("expected `id<TAB>values`".into()))?;
    let id = id
        .trim()
        .parse::<usize>()
        .map_err(|e| bad(format!("row id: {e}")))?;
    let values = values
        .trim()
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("value {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((id, values))
}

/// Read a matrix written by [`write_matrix`]; returns `(rows, cols, data)`.
pub fn read_matrix<R: BufRead>(input: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        what: "matrix header",
        line: 1,
        reason: "empty file".into(),
    })??;
    let mut parts = header.split_whitespace().map(str::parse::<usize>);
    let (rows, cols) = match (parts.next(), parts.next(), parts.next()) {
        (Some(Ok(r)), Some(Ok(c)), None) => (r, c),
        _ => {
            return Err(Error::Parse {
                what: "matrix header",
                line: 1,
                reason: format!("expected `n dim`, got {header:?}"),
            })
        }
    };
    let mut data = vec![0.0; rows * cols];
    let mut seen = vec![false; rows];
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, values) = parse_row_line(&line, idx + 2)?;
        if id >= rows {
            return Err(Error::Parse {
                what: "matrix row",
                line: idx + 2,
                reason: format!("row id {id} out of range for {rows} rows"),
            });
        }
        if values.len() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: values.len(),
            });
        }
        data[id * cols..(id + 1) * cols].copy_from_slice(&values);
        seen[id] = true;
    }
    let missing: Vec<usize> = (0..rows).filter(|&i| !seen[i]).collect();
    if !missing.is_empty() {
        return Err(Error::MissingEmbeddings(missing));
    }
    Ok((rows, cols, data))
}

pub fn load_matrix(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let file = std::fs::File::open(path)?;
    read_matrix(std::io::BufReader::new(file))
}
