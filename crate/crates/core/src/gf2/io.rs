//! Text formats for parity-check matrices.
//!
//! The alist layout written here is the usual one:
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! <n column weights>
//! <m row weights>
//! <n lines: 1-based row indices of each column>
//! <m lines: 1-based column indices of each row>
//! ```
//!
//! The reader also accepts the short variant without the two weight lines.
//! Zero entries are padding and ignored.

use super::matrix::BitMatrix;
use crate::error::{Error, Result};

pub fn write_alist(m: &BitMatrix) -> String {
    let col_w = m.col_weights();
    let row_w = m.row_weights();
    let max_c = col_w.iter().copied().max().unwrap_or(0);
    let max_r = row_w.iter().copied().max().unwrap_or(0);
    // an empty list is written as a single 0 so every line survives blank-line skipping
    let join = |v: &[usize]| {
        if v.is_empty() {
            "0".to_string()
        } else {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        }
    };

    let mut out = String::new();
    out.push_str(&format!("{} {}\n", m.cols(), m.rows()));
    out.push_str(&format!("{max_c} {max_r}\n"));
    out.push_str(&join(&col_w));
    out.push('\n');
    out.push_str(&join(&row_w));
    out.push('\n');
    for j in 0..m.cols() {
        let mut ids: Vec<usize> = m.col_support(j).into_iter().map(|i| i + 1).collect();
        ids.resize(max_c, 0);
        out.push_str(&join(&ids));
        out.push('\n');
    }
    for i in 0..m.rows() {
        let mut ids: Vec<usize> = m.row_support(i).into_iter().map(|j| j + 1).collect();
        ids.resize(max_r, 0);
        out.push_str(&join(&ids));
        out.push('\n');
    }
    out
}

pub fn read_alist(text: &str) -> Result<BitMatrix> {
    let lines: Vec<(usize, Vec<usize>)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line = i + 1;
            l.split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        message: format!("expected a non-negative integer, found {tok:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(|v| (line, v))
        })
        .collect::<Result<_>>()?;

    let header = |k: usize, what: &str| -> Result<(usize, usize, usize)> {
        let (line, v) = lines.get(k).ok_or_else(|| Error::Parse {
            line: lines.last().map_or(1, |l| l.0),
            message: format!("missing {what} line"),
        })?;
        if v.len() != 2 {
            return Err(Error::Parse {
                line: *line,
                message: format!("{what} line needs exactly two numbers"),
            });
        }
        Ok((*line, v[0], v[1]))
    };
    let (_, n, m) = header(0, "dimension")?;
    let (_, _max_c, _max_r) = header(1, "max weight")?;

    let body = lines.len() - 2;
    let offset = if body == n + m + 2 {
        4
    } else if body == n + m {
        2
    } else {
        return Err(Error::Parse {
            line: lines.last().map_or(1, |l| l.0),
            message: format!(
                "expected {} or {} lines after the header for {n} columns and {m} rows, found {body}",
                n + m + 2,
                n + m
            ),
        });
    };

    let mut mat = BitMatrix::zeros(m, n);
    for j in 0..n {
        let (line, ids) = &lines[offset + j];
        for &r in ids.iter().filter(|&&r| r != 0) {
            if r > m {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("row index {r} exceeds {m}"),
                });
            }
            mat.set(r - 1, j, true);
        }
    }
    // row lists must agree with the column lists
    for i in 0..m {
        let (line, ids) = &lines[offset + n + i];
        let mut listed: Vec<usize> = ids.iter().filter(|&&c| c != 0).map(|c| c - 1).collect();
        listed.sort_unstable();
        if let Some(&c) = listed.iter().find(|&&c| c >= n) {
            return Err(Error::Parse {
                line: *line,
                message: format!("column index {} exceeds {n}", c + 1),
            });
        }
        if listed != mat.row_support(i) {
            return Err(Error::Parse {
                line: *line,
                message: format!("row {} list disagrees with the column lists", i + 1),
            });
        }
    }
    Ok(mat)
}

/// Reads either format: alist when the first line has two integers, dense otherwise.
pub fn read_matrix(text: &str) -> Result<BitMatrix> {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.split_whitespace().count() == 2 {
        read_alist(text)
    } else {
        BitMatrix::from_dense(text)
    }
}
