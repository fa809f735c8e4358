use std::fmt;

use serde::Serialize;

use super::bitvec::{words_for, BitVec, WORD_BITS};
use crate::error::{Error, Result};

/// Dense GF(2) matrix in row-major bit-packed storage.
///
/// Every row occupies `stride` words; bits past `cols` are kept zero so that
/// word-wise popcounts and comparisons are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, true);
            }
        }
        m
    }

    /// Builds a matrix from per-row column supports (0-based).
    pub fn from_supports(rows: usize, cols: usize, supports: &[Vec<usize>]) -> Result<Self> {
        if supports.len() != rows {
            return Err(Error::DimensionMismatch {
                block: "row supports".into(),
                expected: format!("{rows} rows"),
                found: format!("{} rows", supports.len()),
            });
        }
        let mut m = Self::zeros(rows, cols);
        for (i, support) in supports.iter().enumerate() {
            for &j in support {
                if j >= cols {
                    return Err(Error::IndexOutOfRange {
                        what: "column",
                        index: j,
                        limit: cols,
                    });
                }
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Parses the dense debug layout: one line per row of `0`/`1` characters.
    pub fn from_dense(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let cols = lines.first().map_or(0, |(_, l)| l.len());
        let mut rows = Vec::with_capacity(lines.len());
        for (line, l) in lines {
            let v = BitVec::parse_bits(l).ok_or_else(|| Error::Parse {
                line,
                message: "expected only '0' and '1'".into(),
            })?;
            if v.len() != cols {
                return Err(Error::Parse {
                    line,
                    message: format!("row has {} entries, expected {cols}", v.len()),
                });
            }
            rows.push(v);
        }
        Ok(Self::from_rows(cols, &rows))
    }

    pub fn to_dense(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(if self.get(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        let w = &mut self.data[i * self.stride + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        self.data[i * self.stride + j / WORD_BITS] ^= 1u64 << (j % WORD_BITS);
    }

    #[inline]
    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// `row[dst] ^= row[src]`.
    pub(crate) fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        if src < dst {
            let (a, b) = self.data.split_at_mut(dst * s);
            for (d, x) in b[..s].iter_mut().zip(&a[src * s..src * s + s]) {
                *d ^= *x;
            }
        } else {
            let (a, b) = self.data.split_at_mut(src * s);
            for (d, x) in a[dst * s..dst * s + s].iter_mut().zip(&b[..s]) {
                *d ^= *x;
            }
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (x, y) = self.data.split_at_mut(hi * s);
        x[lo * s..lo * s + s].swap_with_slice(&mut y[..s]);
    }

    pub fn row(&self, i: usize) -> BitVec {
        assert!(i < self.rows, "row {i} out of range");
        BitVec::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn row_support(&self, i: usize) -> Vec<usize> {
        self.row(i).ones().collect()
    }

    pub fn col_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| self.row_words(i).iter().map(|w| w.count_ones() as usize).sum())
            .collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for i in 0..self.rows {
            for (k, &word) in self.row_words(i).iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    w[k * WORD_BITS + word.trailing_zeros() as usize] += 1;
                    word &= word - 1;
                }
            }
        }
        w
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming weight of row `i` on columns `j..cols` (0-based); `j == cols` gives 0.
    pub fn suffix_weight(&self, i: usize, j: usize) -> Result<usize> {
        if i >= self.rows {
            return Err(Error::IndexOutOfRange {
                what: "row",
                index: i,
                limit: self.rows,
            });
        }
        if j > self.cols {
            return Err(Error::IndexOutOfRange {
                what: "column",
                index: j,
                limit: self.cols + 1,
            });
        }
        Ok((j..self.cols).filter(|&k| self.get(i, k)).count())
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// `M · x` over GF(2).
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "vector length does not match column count");
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self
                .row_words(i)
                .iter()
                .zip(x.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                out.set(i, true);
            }
        }
        out
    }

    pub fn submatrix(&self, sel: &SubSelection) -> Result<BitMatrix> {
        sel.validate(self)?;
        let mut out = BitMatrix::zeros(sel.row_ids.len(), sel.col_ids.len());
        for (a, &i) in sel.row_ids.iter().enumerate() {
            for (b, &j) in sel.col_ids.iter().enumerate() {
                if self.get(i, j) {
                    out.set(a, b, true);
                }
            }
        }
        Ok(out)
    }

    /// GF(2) sum of the given rows, restricted to the given columns (in that order).
    pub fn row_sum(&self, rows: &[usize], restrict_to: &[usize]) -> Result<BitVec> {
        for &i in rows {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    what: "row",
                    index: i,
                    limit: self.rows,
                });
            }
        }
        for &j in restrict_to {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange {
                    what: "column",
                    index: j,
                    limit: self.cols,
                });
            }
        }
        let mut acc = BitVec::zeros(self.cols);
        for &i in rows {
            acc.xor_assign(&self.row(i));
        }
        Ok(acc.restrict(restrict_to))
    }

    /// Kronecker product: entry `(iA·rB + iB, jA·cB + jB) = A(iA,jA)·B(iB,jB)`.
    pub fn kronecker(&self, other: &BitMatrix) -> BitMatrix {
        let (rb, cb) = (other.rows, other.cols);
        let mut out = BitMatrix::zeros(self.rows * rb, self.cols * cb);
        for ia in 0..self.rows {
            for ja in self.row(ia).ones() {
                for ib in 0..rb {
                    for jb in other.row(ib).ones() {
                        out.set(ia * rb + ib, ja * cb + jb, true);
                    }
                }
            }
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`, OR-ing entries.
    pub fn paste(&mut self, block: &BitMatrix, r0: usize, c0: usize) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in block.row(i).ones() {
                self.set(r0 + i, c0 + j, true);
            }
        }
    }

    /// Stacks the rows of `self` on top of the rows of `other`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                block: "vstack".into(),
                expected: format!("{} columns", self.cols),
                found: format!("{} columns", other.cols),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    /// Returns a copy without the listed rows.
    pub fn without_rows(&self, drop: &[usize]) -> BitMatrix {
        let keep: Vec<BitVec> = (0..self.rows)
            .filter(|i| !drop.contains(i))
            .map(|i| self.row(i))
            .collect();
        BitMatrix::from_rows(self.cols, &keep)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        f.write_str(&self.to_dense())
    }
}

/// One cell of a 2×2 block layout.
#[derive(Debug, Clone)]
pub enum Block {
    Matrix(BitMatrix),
    /// All-zero block whose shape is inferred from its row and column neighbours.
    Zero,
}

/// Assembles `[[a, b], [c, d]]` into one matrix.
///
/// Zero blocks take their height from the other block in their row and their
/// width from the other block in their column.
pub fn assemble_blocks(layout: [[Block; 2]; 2]) -> Result<BitMatrix> {
    const NAMES: [[&str; 2]; 2] = [["top-left", "top-right"], ["bottom-left", "bottom-right"]];
    let dims = |b: &Block| match b {
        Block::Matrix(m) => Some((m.rows(), m.cols())),
        Block::Zero => None,
    };
    let mut heights = [0usize; 2];
    let mut widths = [0usize; 2];
    for r in 0..2 {
        let mut h = None;
        for c in 0..2 {
            if let Some((rows, _)) = dims(&layout[r][c]) {
                match h {
                    None => h = Some(rows),
                    Some(prev) if prev != rows => {
                        return Err(Error::DimensionMismatch {
                            block: NAMES[r][c].into(),
                            expected: format!("{prev} rows"),
                            found: format!("{rows} rows"),
                        })
                    }
                    _ => {}
                }
            }
        }
        heights[r] = h.unwrap_or(0);
    }
    for c in 0..2 {
        let mut w = None;
        for r in 0..2 {
            if let Some((_, cols)) = dims(&layout[r][c]) {
                match w {
                    None => w = Some(cols),
                    Some(prev) if prev != cols => {
                        return Err(Error::DimensionMismatch {
                            block: NAMES[r][c].into(),
                            expected: format!("{prev} columns"),
                            found: format!("{cols} columns"),
                        })
                    }
                    _ => {}
                }
            }
        }
        widths[c] = w.unwrap_or(0);
    }
    let mut out = BitMatrix::zeros(heights[0] + heights[1], widths[0] + widths[1]);
    for (r, row) in layout.iter().enumerate() {
        for (c, block) in row.iter().enumerate() {
            if let Block::Matrix(m) = block {
                out.paste(m, if r == 0 { 0 } else { heights[0] }, if c == 0 { 0 } else { widths[0] });
            }
        }
    }
    Ok(out)
}

/// Ordered row set `C` and column set `V` naming the submatrix `M(C, V)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct SubSelection {
    #[serde(rename = "rows", serialize_with = "crate::serde_util::one_based_vec")]
    pub row_ids: Vec<usize>,
    #[serde(rename = "cols", serialize_with = "crate::serde_util::one_based_vec")]
    pub col_ids: Vec<usize>,
}

impl SubSelection {
    pub fn new(row_ids: Vec<usize>, col_ids: Vec<usize>) -> Result<Self> {
        check_unique(&row_ids, "row")?;
        check_unique(&col_ids, "column")?;
        Ok(Self { row_ids, col_ids })
    }

    pub fn full(m: &BitMatrix) -> Self {
        Self {
            row_ids: (0..m.rows()).collect(),
            col_ids: (0..m.cols()).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty() && self.col_ids.is_empty()
    }

    pub fn validate(&self, parent: &BitMatrix) -> Result<()> {
        check_unique(&self.row_ids, "row")?;
        check_unique(&self.col_ids, "column")?;
        if let Some(&i) = self.row_ids.iter().find(|&&i| i >= parent.rows()) {
            return Err(Error::IndexOutOfRange {
                what: "row",
                index: i,
                limit: parent.rows(),
            });
        }
        if let Some(&j) = self.col_ids.iter().find(|&&j| j >= parent.cols()) {
            return Err(Error::IndexOutOfRange {
                what: "column",
                index: j,
                limit: parent.cols(),
            });
        }
        Ok(())
    }

    /// Same sets, ignoring order.
    pub fn same_sets(&self, other: &SubSelection) -> bool {
        let sorted = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        sorted(&self.row_ids) == sorted(&other.row_ids) && sorted(&self.col_ids) == sorted(&other.col_ids)
    }
}

fn check_unique(ids: &[usize], what: &'static str) -> Result<()> {
    let mut seen = std::collections::HashSet::with_capacity(ids.len());
    for &i in ids {
        if !seen.insert(i) {
            return Err(Error::DuplicateIndex { what, index: i });
        }
    }
    Ok(())
}
