//! Peeling and encoding stopping sets.
//!
//! `strip` removes weight-1 variables together with their unique constraint
//! until a fixpoint; whatever survives is the largest (P)ESS candidate.
//! `ess_finder` is the greedy lightest-row search that grows a row set until
//! a newly chosen row brings no new columns and the selection does not peel
//! away completely.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, SubSelection};

/// Maximum column weight accepted by the finder.
pub const MAX_FINDER_COLUMN_WEIGHT: usize = 3;

/// Result of peeling a submatrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeelTrace {
    /// `(variable, constraint)` pairs in removal order, parent indices.
    #[serde(serialize_with = "crate::serde_util::one_based_pairs")]
    pub pairs: Vec<(usize, usize)>,
    /// Variables dropped after their residual weight reached zero.
    #[serde(serialize_with = "crate::serde_util::one_based_vec")]
    pub dropped_isolated: Vec<usize>,
    pub survivors: SubSelection,
}

/// Local adjacency of a submatrix, indices are positions in the selection.
pub(crate) struct Tanner {
    pub row_adj: Vec<Vec<usize>>,
    pub col_adj: Vec<Vec<usize>>,
}

impl Tanner {
    pub fn of(m: &BitMatrix) -> Self {
        let mut col_adj = vec![Vec::new(); m.cols()];
        let row_adj: Vec<Vec<usize>> = (0..m.rows()).map(|i| m.row_support(i)).collect();
        for (i, support) in row_adj.iter().enumerate() {
            for &j in support {
                col_adj[j].push(i);
            }
        }
        Self { row_adj, col_adj }
    }
}

pub(crate) struct LocalPeel {
    pub pairs: Vec<(usize, usize)>,
    pub dropped: Vec<usize>,
    pub row_alive: Vec<bool>,
    pub col_alive: Vec<bool>,
}

impl LocalPeel {
    pub fn is_empty(&self) -> bool {
        !self.row_alive.iter().any(|&a| a) && !self.col_alive.iter().any(|&a| a)
    }
}

/// Peels the rows flagged in `active` (all rows when `None`).
///
/// Weight-1 columns are processed lowest index first, so the trace is
/// deterministic.
pub(crate) fn strip_local(t: &Tanner, active: Option<&[bool]>) -> LocalPeel {
    let rows = t.row_adj.len();
    let cols = t.col_adj.len();
    let mut row_alive: Vec<bool> = match active {
        Some(a) => a.to_vec(),
        None => vec![true; rows],
    };
    let mut col_alive = vec![true; cols];
    let mut weight: Vec<usize> = t
        .col_adj
        .iter()
        .map(|adj| adj.iter().filter(|&&r| row_alive[r]).count())
        .collect();
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..cols).filter(|&j| weight[j] <= 1).map(Reverse).collect();
    let mut pairs = Vec::new();
    let mut dropped = Vec::new();

    while let Some(Reverse(j)) = heap.pop() {
        if !col_alive[j] {
            continue;
        }
        match weight[j] {
            0 => {
                col_alive[j] = false;
                dropped.push(j);
            }
            1 => {
                let r = *t.col_adj[j]
                    .iter()
                    .find(|&&r| row_alive[r])
                    .expect("weight-1 column has a live row");
                pairs.push((j, r));
                col_alive[j] = false;
                row_alive[r] = false;
                for &c in &t.row_adj[r] {
                    if col_alive[c] {
                        weight[c] -= 1;
                        if weight[c] <= 1 {
                            heap.push(Reverse(c));
                        }
                    }
                }
            }
            _ => {}
        }
    }
    LocalPeel {
        pairs,
        dropped,
        row_alive,
        col_alive,
    }
}

/// Peels `M(C, V)` to its fixpoint.
pub fn strip(m: &BitMatrix, sel: &SubSelection) -> Result<PeelTrace> {
    let sub = m.submatrix(sel)?;
    let peel = strip_local(&Tanner::of(&sub), None);
    Ok(PeelTrace {
        pairs: peel
            .pairs
            .iter()
            .map(|&(j, i)| (sel.col_ids[j], sel.row_ids[i]))
            .collect(),
        dropped_isolated: peel.dropped.iter().map(|&j| sel.col_ids[j]).collect(),
        survivors: SubSelection {
            row_ids: sel
                .row_ids
                .iter()
                .zip(&peel.row_alive)
                .filter(|(_, &a)| a)
                .map(|(&i, _)| i)
                .collect(),
            col_ids: sel
                .col_ids
                .iter()
                .zip(&peel.col_alive)
                .filter(|(_, &a)| a)
                .map(|(&j, _)| j)
                .collect(),
        },
    })
}

/// `M(C, V)` contains no ESS or PESS, i.e. peeling empties it.
pub fn is_pseudo_tree(m: &BitMatrix, sel: &SubSelection) -> Result<bool> {
    Ok(strip(m, sel)?.survivors.is_empty())
}

/// Tie-breaking rule among rows of equal residual weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChoicePolicy {
    /// Lowest row index.
    InOrder,
    /// Lowest leading column index of the row in the input matrix, then lowest row index.
    LightestFirstIndex,
    /// Uniform among the lightest rows, reproducible from the seed.
    SeededRandom { seed: u64 },
}

impl Default for ChoicePolicy {
    fn default() -> Self {
        ChoicePolicy::InOrder
    }
}

impl fmt::Display for ChoicePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChoicePolicy::InOrder => f.write_str("in-order"),
            ChoicePolicy::LightestFirstIndex => f.write_str("lightest-first-index"),
            ChoicePolicy::SeededRandom { seed } => write!(f, "random(seed={seed})"),
        }
    }
}

/// Stateful chooser built from a policy; one per decomposition run.
pub(crate) struct RowChooser {
    policy: ChoicePolicy,
    rng: Option<ChaCha8Rng>,
}

impl RowChooser {
    pub fn new(policy: ChoicePolicy) -> Self {
        let rng = match policy {
            ChoicePolicy::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self { policy, rng }
    }

    /// Picks among `candidates` (ascending row indices, all of minimum weight).
    fn pick(&mut self, candidates: &[usize], leading: &[usize]) -> usize {
        match self.policy {
            ChoicePolicy::InOrder => candidates[0],
            ChoicePolicy::LightestFirstIndex => *candidates
                .iter()
                .min_by_key(|&&r| (leading[r], r))
                .expect("nonempty"),
            ChoicePolicy::SeededRandom { .. } => *candidates
                .choose(self.rng.as_mut().expect("seeded"))
                .expect("nonempty"),
        }
    }
}

/// How the finder stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinderExit {
    /// A chosen row added no new columns and peeling left a nonempty set.
    StripOutput,
    /// Every row was selected.
    Exhausted,
}

/// One iteration of the finder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinderStep {
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub row: usize,
    /// Residual weight of the chosen row.
    pub weight: usize,
    /// Minimum residual weight over all unselected rows.
    pub min_weight: usize,
    /// Columns zeroed by this iteration (`V_c`).
    #[serde(serialize_with = "crate::serde_util::one_based_vec")]
    pub new_cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinderResult {
    pub selection: SubSelection,
    pub exit: FinderExit,
    pub steps: Vec<FinderStep>,
}

pub fn check_column_weights(m: &BitMatrix, max: usize) -> Result<()> {
    match m.col_weights().into_iter().enumerate().find(|&(_, w)| w > max) {
        Some((column, weight)) => Err(Error::ColumnWeight {
            column,
            weight,
            max,
        }),
        None => Ok(()),
    }
}

/// Greedy (P)ESS search; returns the selection only.
pub fn ess_finder(m: &BitMatrix, policy: ChoicePolicy) -> Result<SubSelection> {
    Ok(ess_finder_traced(m, policy)?.selection)
}

/// Greedy (P)ESS search with the per-iteration record.
pub fn ess_finder_traced(m: &BitMatrix, policy: ChoicePolicy) -> Result<FinderResult> {
    check_column_weights(m, MAX_FINDER_COLUMN_WEIGHT)?;
    Ok(run_finder(m, &mut RowChooser::new(policy)))
}

/// The finder loop without the input check.
///
/// Keeps selecting rows until every row is selected; a selection whose new
/// row contributes no columns is peeled and returned if anything survives.
pub(crate) fn run_finder(m: &BitMatrix, chooser: &mut RowChooser) -> FinderResult {
    let t = Tanner::of(m);
    let rows = m.rows();
    let mut weight: Vec<usize> = t.row_adj.iter().map(Vec::len).collect();
    let leading: Vec<usize> = t
        .row_adj
        .iter()
        .map(|adj| adj.first().copied().unwrap_or(usize::MAX))
        .collect();
    let mut selected = vec![false; rows];
    let mut zeroed = vec![false; m.cols()];
    let mut c_set = Vec::new();
    let mut v_set = Vec::new();
    let mut steps = Vec::new();

    while c_set.len() < rows {
        let min_weight = (0..rows)
            .filter(|&r| !selected[r])
            .map(|r| weight[r])
            .min()
            .expect("an unselected row exists");
        let candidates: Vec<usize> = (0..rows)
            .filter(|&r| !selected[r] && weight[r] == min_weight)
            .collect();
        let c = chooser.pick(&candidates, &leading);
        selected[c] = true;
        c_set.push(c);
        let new_cols: Vec<usize> = t.row_adj[c].iter().copied().filter(|&j| !zeroed[j]).collect();
        for &j in &new_cols {
            zeroed[j] = true;
            v_set.push(j);
            for &r in &t.col_adj[j] {
                weight[r] -= 1;
            }
        }
        steps.push(FinderStep {
            row: c,
            weight: min_weight,
            min_weight,
            new_cols: new_cols.clone(),
        });

        if new_cols.is_empty() {
            let sel = SubSelection {
                row_ids: c_set.clone(),
                col_ids: v_set.clone(),
            };
            let trace = strip(m, &sel).expect("selection is valid");
            if !trace.survivors.is_empty() {
                return FinderResult {
                    selection: trace.survivors,
                    exit: FinderExit::StripOutput,
                    steps,
                };
            }
        }
    }
    FinderResult {
        selection: SubSelection {
            row_ids: c_set,
            col_ids: v_set,
        },
        exit: FinderExit::Exhausted,
        steps,
    }
}

/// Conditions 1 and 2 of the (P)ESS definition: every selected row has its
/// support inside `V`, and every column of `V` has weight at least 2 in `M(C, V)`.
pub fn check_candidate(m: &BitMatrix, sel: &SubSelection) -> Result<()> {
    sel.validate(m)?;
    if sel.row_ids.is_empty() {
        return Err(Error::NotCandidate("no constraints selected".into()));
    }
    let mut in_v = vec![false; m.cols()];
    for &j in &sel.col_ids {
        in_v[j] = true;
    }
    for &i in &sel.row_ids {
        if let Some(j) = m.row(i).ones().find(|&j| !in_v[j]) {
            return Err(Error::NotCandidate(format!(
                "constraint {} involves variable {} outside the selection",
                i + 1,
                j + 1
            )));
        }
    }
    for &j in &sel.col_ids {
        let w = sel.row_ids.iter().filter(|&&i| m.get(i, j)).count();
        if w < 2 {
            return Err(Error::NotCandidate(format!(
                "variable {} has weight {w} inside the selection",
                j + 1
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EssKind {
    #[serde(rename = "ESS")]
    Ess,
    #[serde(rename = "PESS")]
    Pess,
}

/// Fold level of a (P)ESS: how many constraints must go before it peels away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldLevel {
    Exact(usize),
    /// No removal of at most this many constraints suffices.
    Exceeds(usize),
}

impl fmt::Display for FoldLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldLevel::Exact(k) => write!(f, "{k}"),
            FoldLevel::Exceeds(k) => write!(f, ">{k}"),
        }
    }
}

impl Serialize for FoldLevel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FoldLevel::Exact(k) => s.serialize_u64(*k as u64),
            FoldLevel::Exceeds(_) => s.collect_str(self),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EssClassification {
    pub kind: EssKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fold_level: Option<FoldLevel>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::serde_util::one_based_vec_opt"
    )]
    pub witness_removals: Option<Vec<usize>>,
}

/// ESS when the selected rows are independent over all columns of `m`, PESS otherwise.
pub fn classify(m: &BitMatrix, sel: &SubSelection) -> Result<EssClassification> {
    check_candidate(m, sel)?;
    let rows = m.submatrix(&SubSelection {
        row_ids: sel.row_ids.clone(),
        col_ids: (0..m.cols()).collect(),
    })?;
    let kind = if rows.rank() == sel.row_ids.len() {
        EssKind::Ess
    } else {
        EssKind::Pess
    };
    Ok(EssClassification {
        kind,
        fold_level: None,
        witness_removals: None,
    })
}

/// Smallest number of constraints (up to `max_k`) whose removal leaves a pseudo-tree.
pub fn fold_level(m: &BitMatrix, sel: &SubSelection, max_k: usize) -> Result<EssClassification> {
    let mut class = classify(m, sel)?;
    let sub = m.submatrix(sel)?;
    let (fold, witness) = fold_search(&sub, max_k);
    class.fold_level = Some(fold);
    class.witness_removals = witness.map(|w| w.into_iter().map(|i| sel.row_ids[i]).collect());
    Ok(class)
}

/// Exhaustive subset search on a materialised submatrix; local row indices.
pub(crate) fn fold_search(sub: &BitMatrix, max_k: usize) -> (FoldLevel, Option<Vec<usize>>) {
    let t = Tanner::of(sub);
    let rows = sub.rows();
    for k in 1..=max_k.min(rows) {
        for combo in (0..rows).combinations(k) {
            let mut active = vec![true; rows];
            for &r in &combo {
                active[r] = false;
            }
            if strip_local(&t, Some(&active)).is_empty() {
                return (FoldLevel::Exact(k), Some(combo));
            }
        }
    }
    (FoldLevel::Exceeds(max_k), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> BitMatrix {
        BitMatrix::from_dense("110\n011\n").unwrap()
    }

    #[test]
    fn strip_chain_empties_it() {
        let m = chain();
        let t = strip(&m, &SubSelection::full(&m)).unwrap();
        assert_eq!(t.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(t.dropped_isolated, vec![2]);
        assert!(t.survivors.is_empty());
        assert!(is_pseudo_tree(&m, &SubSelection::full(&m)).unwrap());
    }

    #[test]
    fn strip_empty_selection() {
        let m = chain();
        let t = strip(&m, &SubSelection::empty()).unwrap();
        assert!(t.pairs.is_empty() && t.dropped_isolated.is_empty() && t.survivors.is_empty());
        assert!(is_pseudo_tree(&BitMatrix::zeros(0, 0), &SubSelection::empty()).unwrap());
    }

    #[test]
    fn strip_keeps_a_cycle() {
        // a 2-cycle with a pendant constraint
        let m = BitMatrix::from_dense("110\n110\n011\n").unwrap();
        let t = strip(&m, &SubSelection::full(&m)).unwrap();
        assert_eq!(t.survivors.row_ids, vec![0, 1]);
        assert_eq!(t.survivors.col_ids, vec![0, 1]);
        assert_eq!(t.pairs, vec![(2, 2)]);
    }

    #[test]
    fn zero_rows_survive_peeling() {
        let m = BitMatrix::zeros(1, 0);
        let t = strip(&m, &SubSelection::full(&m)).unwrap();
        assert_eq!(t.survivors.row_ids, vec![0]);
        assert!(!is_pseudo_tree(&m, &SubSelection::full(&m)).unwrap());
    }

    #[test]
    fn finder_single_row_exhausts() {
        let m = BitMatrix::from_dense("110\n").unwrap();
        let r = ess_finder_traced(&m, ChoicePolicy::InOrder).unwrap();
        assert_eq!(r.exit, FinderExit::Exhausted);
        assert_eq!(r.selection.row_ids, vec![0]);
        assert_eq!(r.selection.col_ids, vec![0, 1]);
        assert!(is_pseudo_tree(&m, &r.selection).unwrap());
    }

    #[test]
    fn finder_rejects_heavy_columns() {
        let m = BitMatrix::ones(4, 2);
        assert_eq!(
            ess_finder(&m, ChoicePolicy::InOrder).unwrap_err(),
            Error::ColumnWeight {
                column: 0,
                weight: 4,
                max: 3
            }
        );
    }

    #[test]
    fn finder_finds_duplicate_rows() {
        let m = BitMatrix::ones(3, 2);
        let r = ess_finder_traced(&m, ChoicePolicy::InOrder).unwrap();
        assert_eq!(r.exit, FinderExit::StripOutput);
        assert_eq!(r.selection.row_ids, vec![0, 1]);
        assert_eq!(classify(&m, &r.selection).unwrap().kind, EssKind::Pess);
    }

    #[test]
    fn policies_are_reproducible() {
        let m = BitMatrix::ones(3, 2);
        let a = ess_finder(&m, ChoicePolicy::SeededRandom { seed: 7 }).unwrap();
        let b = ess_finder(&m, ChoicePolicy::SeededRandom { seed: 7 }).unwrap();
        assert_eq!(a, b);
        let c = ess_finder(&m, ChoicePolicy::LightestFirstIndex).unwrap();
        assert_eq!(c.row_ids, vec![0, 1]);
    }

    #[test]
    fn classify_pess_and_errors() {
        let m = BitMatrix::ones(2, 2);
        let c = classify(&m, &SubSelection::full(&m)).unwrap();
        assert_eq!(c.kind, EssKind::Pess);
        assert!(matches!(
            classify(&m, &SubSelection::empty()),
            Err(Error::NotCandidate(_))
        ));
        let chain = chain();
        assert!(matches!(
            classify(&chain, &SubSelection::full(&chain)),
            Err(Error::NotCandidate(_))
        ));
    }

    #[test]
    fn fold_level_of_duplicate_pair() {
        let m = BitMatrix::ones(2, 2);
        let c = fold_level(&m, &SubSelection::full(&m), 2).unwrap();
        assert_eq!(c.fold_level, Some(FoldLevel::Exact(1)));
        assert_eq!(c.witness_removals, Some(vec![0]));
        assert!(fold_level(&m, &SubSelection::empty(), 2).is_err());
    }

    #[test]
    fn fold_level_exceeding_max() {
        // the 3x3 all-ones block needs two removals
        let m = BitMatrix::ones(3, 3);
        let c = fold_level(&m, &SubSelection::full(&m), 1).unwrap();
        assert_eq!(c.fold_level, Some(FoldLevel::Exceeds(1)));
        let c = fold_level(&m, &SubSelection::full(&m), 2).unwrap();
        assert_eq!(c.fold_level, Some(FoldLevel::Exact(2)));
    }
}
