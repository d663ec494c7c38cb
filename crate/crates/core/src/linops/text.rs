//! Plain-text matrix format.
//!
//! ```text
//! # optional comment lines
//! rows cols
//! re im re im ...      <- one line per row, `cols` pairs
//! ```
//!
//! Values are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{CMatrix, LinopsError};

pub fn write_matrix<W: Write>(m: &CMatrix, mut out: W) -> std::io::Result<()> {
    out.write_all(to_text(m).as_bytes())
}

pub fn to_text(m: &CMatrix) -> String {
    let mut s = String::with_capacity(m.rows() * m.cols() * 50 + 16);
    let _ = writeln!(s, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        for (j, z) in m.row(i).iter().enumerate() {
            if j > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.16e} {:.16e}", z.re, z.im);
        }
        s.push('\n');
    }
    s
}

pub fn read_matrix<R: BufRead>(input: R) -> Result<CMatrix, LinopsError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| match l {
            Ok(l) => {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });

    let parse_err = |line: usize, message: String| LinopsError::Parse { line, message };

    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "missing header".into()))?;
    let header = header.map_err(|e| parse_err(hline, e.to_string()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| parse_err(hline, format!("bad header: {e}")))?;
    let [rows, cols] = dims[..] else {
        return Err(parse_err(hline, "header must be `rows cols`".into()));
    };

    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {rows} rows, found {r}")))?;
        let line = line.map_err(|e| parse_err(lno, e.to_string()))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(lno, format!("bad number: {e}")))?;
        if vals.len() != 2 * cols {
            return Err(parse_err(
                lno,
                format!("expected {} numbers, found {}", 2 * cols, vals.len()),
            ));
        }
        data.extend(vals.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])));
    }
    if let Some((lno, _)) = lines.next() {
        return Err(parse_err(lno, "trailing data after last row".into()));
    }
    CMatrix::new(rows, cols, data)
}
