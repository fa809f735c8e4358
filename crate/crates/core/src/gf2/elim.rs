//! Gauss–Jordan elimination over GF(2).
//!
//! Pivots are taken column by column, left to right; within a column the
//! lowest-index remaining row holding a 1 becomes the pivot. The order is
//! fixed so kernel bases and dependency sets are reproducible.

use super::bitvec::BitVec;
use super::matrix::BitMatrix;

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: BitMatrix,
    /// `pivots[r]` is the pivot column of reduced row `r`.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rref(m: &BitMatrix) -> Echelon {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..a.cols() {
        if next == a.rows() {
            break;
        }
        let Some(p) = (next..a.rows()).find(|&r| a.get(r, col)) else {
            continue;
        };
        a.swap_rows(p, next);
        for r in 0..a.rows() {
            if r != next && a.get(r, col) {
                a.xor_row_into(next, r);
            }
        }
        pivots.push(col);
        next += 1;
    }
    Echelon { reduced: a, pivots }
}

/// GF(2) rank. The input is not modified.
pub fn rank(m: &BitMatrix) -> usize {
    // forward elimination only; rref would also clear above the pivots
    let mut a = m.clone();
    let mut next = 0;
    for col in 0..a.cols() {
        if next == a.rows() {
            break;
        }
        let Some(p) = (next..a.rows()).find(|&r| a.get(r, col)) else {
            continue;
        };
        a.swap_rows(p, next);
        for r in next + 1..a.rows() {
            if a.get(r, col) {
                a.xor_row_into(next, r);
            }
        }
        next += 1;
    }
    next
}

/// Basis of the right null space `{x : M x = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    pub dimension: usize,
    pub basis_vectors: Vec<BitVec>,
}

pub fn kernel_basis(m: &BitMatrix) -> KernelBasis {
    let ech = rref(m);
    let n = m.cols();
    let mut is_pivot = vec![false; n];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::with_capacity(n - ech.rank());
    for free in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = BitVec::unit(n, free);
        for (r, &p) in ech.pivots.iter().enumerate() {
            if ech.reduced.get(r, free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    KernelBasis {
        dimension: basis.len(),
        basis_vectors: basis,
    }
}

/// Rows of `m` (by index) whose sum is zero, or `None` if the rows are independent.
///
/// Rows are inserted into an echelon basis in index order while tracking
/// which original rows each basis vector combines; the first row that
/// reduces to zero yields the dependency. Also returns the left-kernel
/// dimension `rows − rank`.
pub fn first_dependency(m: &BitMatrix) -> (Option<Vec<usize>>, usize) {
    let rows = m.rows();
    // (pivot column, reduced vector, combination of original rows)
    let mut basis: Vec<(usize, BitVec, BitVec)> = Vec::new();
    let mut found = None;
    for i in 0..rows {
        let mut v = m.row(i);
        let mut combo = BitVec::unit(rows, i);
        for (p, b, c) in &basis {
            if v.get(*p) {
                v.xor_assign(b);
                combo.xor_assign(c);
            }
        }
        match v.first_one() {
            Some(p) => basis.push((p, v, combo)),
            None => {
                if found.is_none() {
                    found = Some(combo.ones().collect());
                }
            }
        }
    }
    (found, rows - basis.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank_and_kernel() {
        let id = BitMatrix::identity(3);
        assert_eq!(rank(&id), 3);
        let k = kernel_basis(&id);
        assert_eq!(k.dimension, 0);
    }

    #[test]
    fn empty_matrices_are_legal() {
        let m = BitMatrix::zeros(0, 4);
        assert_eq!(rank(&m), 0);
        assert_eq!(kernel_basis(&m).dimension, 4);
        let m = BitMatrix::zeros(3, 0);
        assert_eq!(rank(&m), 0);
        assert_eq!(kernel_basis(&m).dimension, 0);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = BitMatrix::from_dense("110100\n011010\n101001\n").unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.dimension, 6 - rank(&m));
        for v in &k.basis_vectors {
            assert!(m.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn dependency_examples() {
        let m = BitMatrix::from_dense("10\n01\n11\n").unwrap();
        assert_eq!(first_dependency(&m), (Some(vec![0, 1, 2]), 1));
        let m = BitMatrix::from_dense("11\n11\n").unwrap();
        assert_eq!(first_dependency(&m), (Some(vec![0, 1]), 1));
        let m = BitMatrix::identity(3);
        assert_eq!(first_dependency(&m), (None, 0));
        let m = BitMatrix::zeros(1, 0);
        assert_eq!(first_dependency(&m), (Some(vec![0]), 1));
    }
}
