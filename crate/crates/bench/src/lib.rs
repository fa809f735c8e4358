//! Shared fixtures for the criterion benchmarks.

use ldpc_audit::counterexample::build_mn;
use ldpc_audit::experiments::{sample_regular, EnsembleParams};
use ldpc_audit::BitMatrix;

pub fn counterexample(n_param: usize) -> BitMatrix {
    build_mn(n_param).expect("odd N")
}

pub fn random_regular(n: usize, seed: u64) -> BitMatrix {
    let params = EnsembleParams {
        n,
        dv: 3,
        dc: 6,
        trials: 1,
        seed,
    };
    sample_regular(&params, 0).expect("valid ensemble")
}
