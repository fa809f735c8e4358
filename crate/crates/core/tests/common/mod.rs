//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ldpc_audit::counterexample::build_an;
use ldpc_audit::gf2::assemble_blocks;
use ldpc_audit::gf2::Block;
use ldpc_audit::peel::is_pseudo_tree;
use ldpc_audit::{BitMatrix, BitVec, SubSelection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random matrix with column weight at most 3 that peels to empty.
pub fn random_pseudo_tree(rng: &mut ChaCha8Rng, max_cols: usize) -> BitMatrix {
    loop {
        let cols = rng.gen_range(1..=max_cols);
        let rows = rng.gen_range(0..cols);
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(0.3) {
                    m.set(i, j, true);
                }
            }
        }
        if m.col_weights().iter().any(|&w| w > 3) {
            continue;
        }
        if is_pseudo_tree(&m, &SubSelection::full(&m)).unwrap() {
            return m;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `{x : M x = 0}` by enumerating all `2^cols` vectors.
pub fn brute_kernel(m: &BitMatrix) -> BTreeSet<Vec<bool>> {
    let n = m.cols();
    assert!(n <= 20);
    (0..1u64 << n)
        .map(|x| BitVec::from_u64(n, x))
        .filter(|x| naive_syndrome_zero(m, x))
        .map(|x| x.to_bools())
        .collect()
}

/// Entry-by-entry product, independent of the packed kernels.
pub fn naive_syndrome_zero(m: &BitMatrix, x: &BitVec) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).filter(|&j| m.get(i, j) && x.get(j)).count() % 2 == 0)
}

/// Rank by textbook elimination on `Vec<Vec<bool>>`.
pub fn naive_rank(m: &BitMatrix) -> usize {
    let mut a: Vec<Vec<bool>> = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        if let Some(p) = (rank..a.len()).find(|&r| a[r][col]) {
            a.swap(rank, p);
            for r in 0..a.len() {
                if r != rank && a[r][col] {
                    let pivot = a[rank].clone();
                    for (x, y) in a[r].iter_mut().zip(pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Block-diagonal `A_18 ⊕ P`: one ESS followed by a pseudo-tree, no PESS anywhere.
pub fn ess_then_pseudo_tree(rng: &mut ChaCha8Rng) -> BitMatrix {
    let p = random_pseudo_tree(rng, 10);
    assemble_blocks([
        [Block::Matrix(build_an(1).unwrap()), Block::Zero],
        [Block::Zero, Block::Matrix(p)],
    ])
    .unwrap()
}
