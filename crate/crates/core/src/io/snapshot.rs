//! Field snapshots as CSV.
//!
//! ```text
//! # t=<t> J=<J> h=<h> L0=<L0> L1=<L1>
//! U[0,0],U[0,1],...,U[0,J]
//! ...
//! U[J,0],...,U[J,J]
//! ```
//!
//! Row `j` runs along x, column `m` along y. Values are written with 17
//! significant digits by default, which round-trips every finite double.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

pub const DEFAULT_DIGITS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub t: f64,
    pub cells: usize,
    pub h: f64,
    pub l0: f64,
    pub l1: f64,
}

/// Formats `x` with `digits` significant digits and no trailing zeros.
/// Positional notation for exponents in `[-5, 16]`, scientific otherwise:
/// `0.3 → 0.29999999999999999`, `0 → 0`, `1 → 1`, `1e-7 → 9.9999999999999995e-8`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.*e}", digits.max(1) - 1, x);
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let sig: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sig = sig.trim_end_matches('0');
    let sig = if sig.is_empty() { "0" } else { sig };
    if !(-5..=16).contains(&exp) {
        let (head, tail) = sig.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), sig)
    } else if point as usize >= sig.len() {
        format!("{}{}", sig, "0".repeat(point as usize - sig.len()))
    } else {
        let (int, frac) = sig.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

pub fn write_snapshot(field: &Field, t: f64, grid: &GridSpec, path: &Path) -> Result<()> {
    write_snapshot_digits(field, t, grid, path, DEFAULT_DIGITS)
}

pub fn write_snapshot_digits(field: &Field, t: f64, grid: &GridSpec, path: &Path, digits: usize) -> Result<()> {
    if field.nrows() != grid.side() || field.ncols() != grid.side() {
        return Err(Error::mismatch(format!(
            "field is {:?}, grid side is {}",
            field.shape(),
            grid.side()
        )));
    }
    let mut out = String::new();
    let f = |x| format_sig(x, DEFAULT_DIGITS);
    writeln!(
        out,
        "# t={} J={} h={} L0={} L1={}",
        f(t),
        grid.cells,
        f(grid.h),
        f(grid.l0),
        f(grid.l1)
    )
    .unwrap();
    for row in field.row_iter() {
        let line: Vec<String> = row.iter().map(|&v| format_sig(v, digits)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn parse_header(line: &str, path: &Path) -> Result<SnapshotHeader> {
    let bad = |message: String| Error::Format {
        path: path.to_path_buf(),
        line: 1,
        message,
    };
    let body = line
        .strip_prefix("# ")
        .ok_or_else(|| bad(format!("expected '# t=... J=... h=... L0=... L1=...', found {line:?}")))?;
    let mut fields = body.split_whitespace();
    let mut take = |key: &str| -> Result<&str> {
        let tok = fields.next().ok_or_else(|| bad(format!("missing {key}")))?;
        tok.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| bad(format!("expected {key}=<value>, found {tok:?}")))
    };
    let num = |key: &str, s: &str| s.parse::<f64>().map_err(|_| bad(format!("{key}: not a number: {s:?}")));
    let t = num("t", take("t")?)?;
    let cells_tok = take("J")?;
    let cells = cells_tok
        .parse::<usize>()
        .map_err(|_| bad(format!("J: not an integer: {cells_tok:?}")))?;
    let h = num("h", take("h")?)?;
    let l0 = num("L0", take("L0")?)?;
    let l1 = num("L1", take("L1")?)?;
    Ok(SnapshotHeader { t, cells, h, l0, l1 })
}

pub fn read_snapshot(path: &Path) -> Result<(Field, SnapshotHeader)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = parse_header(lines.next().unwrap_or(""), path)?;
    let n = header.cells + 1;
    let mut values = Vec::with_capacity(n * n);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| Error::Format {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: format!("not a number: {tok:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Format {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("expected {n} values, found {}", row.len()),
            });
        }
        values.extend(row);
    }
    if values.len() != n * n {
        return Err(Error::CountMismatch {
            path: path.to_path_buf(),
            expected: n * n,
            found: values.len(),
        });
    }
    Ok((Field::from_row_slice(n, n, &values), header))
}
