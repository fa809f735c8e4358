//! Peeling soundness with planted stopping sets, and finder/decomposition invariants.

mod common;

use ldpc_audit::decompose::{check_conservation, decompose};
use ldpc_audit::gf2::{assemble_blocks, Block};
use ldpc_audit::peel::{check_candidate, ess_finder, strip};
use ldpc_audit::{BitMatrix, ChoicePolicy, DecomposeOptions, SubSelection, Verdict};
use proptest::prelude::*;

/// Planted block `[E 0; X P]`: the rows of `E` survive peeling whatever `P` is.
fn planted(seed: u64) -> (BitMatrix, usize, usize) {
    let mut rng = common::rng(seed);
    let e = ldpc_audit::counterexample::build_an(1).unwrap();
    let p = common::random_pseudo_tree(&mut rng, 8);
    let (er, ec) = (e.rows(), e.cols());
    let m = assemble_blocks([[Block::Matrix(e), Block::Zero], [Block::Zero, Block::Matrix(p)]]).unwrap();
    (m, er, ec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strip_keeps_planted_ess(seed in any::<u64>()) {
        let (m, er, ec) = planted(seed);
        let t = strip(&m, &SubSelection::full(&m)).unwrap();
        prop_assert_eq!(t.survivors.row_ids, (0..er).collect::<Vec<_>>());
        prop_assert_eq!(t.survivors.col_ids, (0..ec).collect::<Vec<_>>());
    }

    #[test]
    fn strip_output_is_a_candidate(seed in any::<u64>()) {
        let (m, _, _) = planted(seed);
        let t = strip(&m, &SubSelection::full(&m)).unwrap();
        prop_assert!(check_candidate(&m, &t.survivors).is_ok());
        // every peeled pair used a column of weight one at its removal time
        prop_assert_eq!(t.pairs.len() + t.survivors.row_ids.len(), m.rows());
    }

    #[test]
    fn pseudo_trees_decompose_consistently(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::random_pseudo_tree(&mut rng, 16);
        let r = decompose(&m, DecomposeOptions::default()).unwrap();
        prop_assert_eq!(r.sum_k, r.kernel_dim);
        prop_assert_eq!(r.verdict, Verdict::Consistent);
        prop_assert!(check_conservation(&m, &r).is_ok());
    }

    #[test]
    fn decomposition_never_undercounts(seed in any::<u64>(), policy in 0u8..3) {
        let params = ldpc_audit::experiments::EnsembleParams { n: 24, trials: 1, seed, ..Default::default() };
        let m = ldpc_audit::experiments::sample_regular(&params, 0).unwrap();
        let policy = match policy {
            0 => ChoicePolicy::InOrder,
            1 => ChoicePolicy::LightestFirstIndex,
            _ => ChoicePolicy::SeededRandom { seed },
        };
        let r = decompose(&m, DecomposeOptions::with_policy(policy)).unwrap();
        prop_assert!(r.sum_k >= r.kernel_dim);
        prop_assert!(check_conservation(&m, &r).is_ok());
    }
}

#[test]
fn finder_output_on_pseudo_tree_is_everything() {
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let m = common::random_pseudo_tree(&mut rng, 12);
        let sel = ess_finder(&m, ChoicePolicy::InOrder).unwrap();
        assert_eq!(sel.row_ids.len(), m.rows());
    }
}

#[test]
fn reports_are_deterministic_per_policy() {
    let m = ldpc_audit::counterexample::build_mn(3).unwrap();
    for policy in [
        ChoicePolicy::InOrder,
        ChoicePolicy::LightestFirstIndex,
        ChoicePolicy::SeededRandom { seed: 9 },
    ] {
        let a = decompose(&m, DecomposeOptions::with_policy(policy)).unwrap().to_json();
        let b = decompose(&m, DecomposeOptions::with_policy(policy)).unwrap().to_json();
        assert_eq!(a, b);
    }
}

#[test]
fn counterexample_overcounts_for_family() {
    for n in [1, 3, 5, 9] {
        let m = ldpc_audit::counterexample::build_mn(n).unwrap();
        let r = decompose(&m, DecomposeOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Overcount, "N={n}");
        let first = r.first_output.as_ref().unwrap();
        assert_eq!((first.rows, first.cols), (4 * n + 2, 10 * n + 6));
        assert!(r.recursion_log.finder_calls[1].pess, "N={n}: second call is a PESS");
        check_conservation(&m, &r).unwrap();
    }
}
