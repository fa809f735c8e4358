//! The counterexample family `M_n = [A_n 0; B_n I⊗1_{3×2}]` with `n = 11N + 7`.
//!
//! `A_n = S_n + D_n` where `S_n` is a staircase of `T_d = I_N ⊗ 1_d` blocks and
//! `D_n` is a union of six diagonals. Closed-form evaluators work in 1-based
//! indices; matrices are 0-based.

use serde::Serialize;

use crate::decompose::{decompose, DecomposeOptions, Verdict};
use crate::error::{Error, Result};
use crate::gf2::{assemble_blocks, BitMatrix, Block, SubSelection};
use crate::peel::{ess_finder, ChoicePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CounterexampleParams {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: usize,
    pub m: usize,
    pub a_rows: usize,
    pub a_cols: usize,
    pub b_rows: usize,
    pub tail_cols: usize,
}

impl CounterexampleParams {
    pub fn new(big_n: usize) -> Result<Self> {
        if big_n == 0 || big_n % 2 == 0 {
            return Err(Error::InvalidN(big_n));
        }
        let n = 11 * big_n + 7;
        Ok(Self {
            big_n,
            n,
            m: n / 2,
            a_rows: 4 * big_n + 2,
            a_cols: 10 * big_n + 6,
            b_rows: 3 * (big_n + 1) / 2,
            tail_cols: big_n + 1,
        })
    }
}

/// `d_t = 5 − ⌈(t−1)/N⌉` and the leading column `j_t` of row `t` of `S_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowProfile {
    pub t: usize,
    pub d_t: usize,
    pub j_t: usize,
}

pub fn row_profile(big_n: usize, t: usize) -> Result<RowProfile> {
    let p = CounterexampleParams::new(big_n)?;
    if !(2..=p.a_rows - 1).contains(&t) {
        return Err(Error::IndexOutOfRange {
            what: "t",
            index: t,
            limit: p.a_rows - 1,
        });
    }
    let d = 5 - (t - 1).div_ceil(big_n);
    let j = d * t + (5 - d) * (4 - d) / 2 * big_n + 7 - 2 * d;
    Ok(RowProfile { t, d_t: d, j_t: j })
}

/// Leading column (1-based) of row `t ∈ [2, 4N+1]` of `S_n`.
pub fn leading_index(big_n: usize, t: usize) -> Result<usize> {
    Ok(row_profile(big_n, t)?.j_t)
}

pub fn build_sn(big_n: usize) -> Result<BitMatrix> {
    let p = CounterexampleParams::new(big_n)?;
    let mut s = BitMatrix::zeros(p.a_rows, p.a_cols);
    for j in 0..6 {
        s.set(0, j, true);
    }
    for d in (1..=4).rev() {
        let t_d = BitMatrix::identity(big_n).kronecker(&BitMatrix::ones(1, d));
        let r0 = 1 + (4 - d) * big_n;
        let c0 = 6 + big_n * (d + 1..=4).sum::<usize>();
        s.paste(&t_d, r0, c0);
    }
    Ok(s)
}

pub fn build_dn(big_n: usize) -> Result<BitMatrix> {
    let p = CounterexampleParams::new(big_n)?;
    let nn = big_n;
    let mut d = BitMatrix::zeros(p.a_rows, p.a_cols);
    let mut put = |i: usize, j: usize| d.set(i - 1, j - 1, true);
    for i in 2..=p.a_rows {
        put(i, i - 1);
        put(i, i);
    }
    for i in nn + 2..=p.a_rows {
        put(i, i + 3 * nn + 1);
    }
    for i in 2 * nn + 2..=p.a_rows {
        put(i, i + 5 * nn + 2);
    }
    for i in 3 * nn + 2..=p.a_rows {
        put(i, i + 6 * nn + 3);
    }
    put(p.a_rows, p.a_cols);
    Ok(d)
}

/// `S_n ⊕ D_n`; fails if the supports overlap.
pub fn build_an(big_n: usize) -> Result<BitMatrix> {
    let s = build_sn(big_n)?;
    let d = build_dn(big_n)?;
    let mut a = s.clone();
    for i in 0..a.rows() {
        for j in d.row_support(i) {
            assert!(!s.get(i, j), "S_n and D_n overlap at ({}, {})", i + 1, j + 1);
            a.flip(i, j);
        }
    }
    Ok(a)
}

/// Closed-form entry `A_n(i, j)` in 1-based indices.
pub fn an_formula(big_n: usize, i: usize, j: usize) -> Result<bool> {
    let p = CounterexampleParams::new(big_n)?;
    let nn = big_n;
    if !(1..=p.a_rows).contains(&i) {
        return Err(Error::IndexOutOfRange {
            what: "row",
            index: i,
            limit: p.a_rows,
        });
    }
    if !(1..=p.a_cols).contains(&j) {
        return Err(Error::IndexOutOfRange {
            what: "column",
            index: j,
            limit: p.a_cols,
        });
    }
    if i == 1 {
        return Ok(j <= 6);
    }
    let band = j == i - 1 || j == i;
    let on = if i <= nn + 1 {
        band || (4 * i - 1..=4 * i + 2).contains(&j)
    } else if i <= 2 * nn + 1 {
        band || j == i + 3 * nn + 1 || (3 * i + nn + 1..=3 * i + nn + 3).contains(&j)
    } else if i <= 3 * nn + 1 {
        band || j == i + 3 * nn + 1 || j == i + 5 * nn + 2 || (2 * i + 3 * nn + 3..=2 * i + 3 * nn + 4).contains(&j)
    } else {
        let common = band || j == i + 3 * nn + 1 || j == i + 5 * nn + 2 || j == i + 6 * nn + 3;
        if i <= 4 * nn + 1 {
            common || j == i + 6 * nn + 5
        } else {
            common || j == 10 * nn + 6
        }
    };
    Ok(on)
}

pub fn build_bn(big_n: usize) -> Result<BitMatrix> {
    let p = CounterexampleParams::new(big_n)?;
    let nn = big_n;
    let mut b = BitMatrix::zeros(p.b_rows, p.a_cols);
    for j in [1, (11 * nn + 5) / 2, 7 * nn + 4, (17 * nn + 11) / 2] {
        b.set(0, j - 1, true);
    }
    for i in 2..=p.b_rows {
        for j in [4 * nn + i, (11 * nn + 3) / 2 + i, 7 * nn + 3 + i, (17 * nn + 9) / 2 + i] {
            b.set(i - 1, j - 1, true);
        }
    }
    Ok(b)
}

/// `I_{(N+1)/2} ⊗ 1_{3×2}`.
pub fn default_tail(big_n: usize) -> Result<BitMatrix> {
    CounterexampleParams::new(big_n)?;
    Ok(BitMatrix::identity(big_n.div_ceil(2)).kronecker(&BitMatrix::ones(3, 2)))
}

pub fn build_mn(big_n: usize) -> Result<BitMatrix> {
    build_mn_with_tail(big_n, &default_tail(big_n)?)
}

/// `M_n` with the lower-right block replaced by `tail`.
pub fn build_mn_with_tail(big_n: usize, tail: &BitMatrix) -> Result<BitMatrix> {
    assemble_blocks([
        [Block::Matrix(build_an(big_n)?), Block::Zero],
        [Block::Matrix(build_bn(big_n)?), Block::Matrix(tail.clone())],
    ])
}

/// Rows `1..=4N+2` and columns `1..=10N+6` of `M_n`.
pub fn an_selection(big_n: usize) -> Result<SubSelection> {
    let p = CounterexampleParams::new(big_n)?;
    Ok(SubSelection {
        row_ids: (0..p.a_rows).collect(),
        col_ids: (0..p.a_cols).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaIteration {
    pub t: usize,
    pub j_t: usize,
    /// Residual weight of row `t`.
    pub weight: usize,
    pub min_weight: usize,
    pub prefix_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub iterations: Vec<LemmaIteration>,
    /// First iteration `t` that broke either condition.
    pub first_violation: Option<usize>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks that choosing row `t` at iteration `t` is valid for `M_n`.
pub fn verify_lemma_valid_choices(big_n: usize) -> Result<LemmaReport> {
    verify_lemma_valid_choices_on(big_n, &build_mn(big_n)?)
}

/// Same check against an arbitrary matrix of `M_n`'s shape (negative controls).
///
/// At iteration `t` rows `1..t−1` have been chosen; row `t` must have minimum
/// residual weight among the remaining rows, and the zeroed columns must be
/// exactly `{1, …, j_t − 1}` (with `j_1 = 1`).
pub fn verify_lemma_valid_choices_on(big_n: usize, m: &BitMatrix) -> Result<LemmaReport> {
    let p = CounterexampleParams::new(big_n)?;
    if m.rows() != p.m || m.cols() != p.n {
        return Err(Error::DimensionMismatch {
            block: "M_n".into(),
            expected: format!("{}x{}", p.m, p.n),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let mut zeroed = vec![false; p.n];
    let mut iterations = Vec::new();
    let mut first_violation = None;
    for t in 1..=p.a_rows - 1 {
        let j_t = if t == 1 { 1 } else { leading_index(big_n, t)? };
        let residual = |i: usize| m.row_support(i).into_iter().filter(|&j| !zeroed[j]).count();
        let weight = residual(t - 1);
        let min_weight = (t - 1..p.m).map(residual).min().expect("rows remain");
        let prefix_ok = zeroed.iter().enumerate().all(|(j, &z)| z == (j + 1 < j_t));
        if first_violation.is_none() && (weight != min_weight || !prefix_ok) {
            first_violation = Some(t);
        }
        iterations.push(LemmaIteration {
            t,
            j_t,
            weight,
            min_weight,
            prefix_ok,
        });
        for j in m.row_support(t - 1) {
            zeroed[j] = true;
        }
    }
    Ok(LemmaReport {
        big_n,
        iterations,
        first_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: usize,
    pub m: usize,
    /// Item 1: the in-order finder returns exactly the `A_n` rows and columns.
    pub finder_returns_an: bool,
    pub dim_ker_mn: usize,
    /// Item 2 bound `n/2 + 2`.
    pub dim_ker_mn_bound: usize,
    pub dim_ker_an: usize,
    /// Item 3 bound `6N + 4`.
    pub dim_ker_an_bound: usize,
    pub sum_k: usize,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn item1(&self) -> bool {
        self.finder_returns_an
    }
    pub fn item2(&self) -> bool {
        self.dim_ker_mn <= self.dim_ker_mn_bound
    }
    pub fn item3(&self) -> bool {
        self.dim_ker_an >= self.dim_ker_an_bound
    }
    pub fn corollary(&self) -> bool {
        self.sum_k > self.dim_ker_mn
    }
    pub fn passed(&self) -> bool {
        self.item1() && self.item2() && self.item3() && self.corollary()
    }
}

pub fn verify_theorem(big_n: usize) -> Result<TheoremReport> {
    verify_theorem_on(big_n, &build_mn(big_n)?)
}

/// Theorem checks on an `M_n`-shaped matrix whose upper-left block is `A_n`.
pub fn verify_theorem_on(big_n: usize, m: &BitMatrix) -> Result<TheoremReport> {
    let p = CounterexampleParams::new(big_n)?;
    let first = ess_finder(m, ChoicePolicy::InOrder)?;
    let an_sel = an_selection(big_n)?;
    let an = m.submatrix(&an_sel)?;
    let report = decompose(m, DecomposeOptions::default())?;
    Ok(TheoremReport {
        big_n,
        n: p.n,
        m: p.m,
        finder_returns_an: first.same_sets(&an_sel),
        dim_ker_mn: report.kernel_dim,
        dim_ker_mn_bound: p.n / 2 + 2,
        dim_ker_an: an.kernel_dim(),
        dim_ker_an_bound: 6 * big_n + 4,
        sum_k: report.sum_k,
        verdict: report.verdict,
    })
}

/// Rank of `M_n` with rows `1` and `4N+3` deleted; at least `m − 2` witnesses `rank(M_n) ≥ m − 2`.
pub fn staircase_rank(big_n: usize) -> Result<usize> {
    let p = CounterexampleParams::new(big_n)?;
    Ok(build_mn(big_n)?.without_rows(&[0, p.a_rows]).rank())
}
