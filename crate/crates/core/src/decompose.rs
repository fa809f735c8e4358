//! Recursive decomposition of a parity-check matrix into encodable components.
//!
//! Each round runs the finder on the residual matrix. A PESS output is made
//! independent by dropping one constraint of a dependency `C'`; the sum of
//! `C'` restricted to the previous component's columns (`c*`) is appended to
//! that component, which is then decomposed again in place. The component
//! list is flattened in round order.
//!
//! Message bits are counted per component as `k_i = cols − rank`. When the
//! sum exceeds `dim Ker(M)` the composed encoder necessarily produces
//! non-codewords, and the report carries the `OVERCOUNT` verdict.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2::{first_dependency, BitMatrix, BitVec, SubSelection};
use crate::peel::{
    check_candidate, check_column_weights, fold_search, is_pseudo_tree, run_finder, ChoicePolicy,
    FinderExit, FoldLevel, RowChooser, MAX_FINDER_COLUMN_WEIGHT,
};
use crate::SCHEMA_VERSION;

/// Identity of a constraint inside a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowLabel {
    /// Row of the input matrix (0-based).
    Input(usize),
    /// The `k`-th synthesized `c*` row (0-based).
    Synthesized(usize),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Input(i) => write!(f, "c{}", i + 1),
            RowLabel::Synthesized(k) => write!(f, "c*{}", k + 1),
        }
    }
}

impl Serialize for RowLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RowLabel::Input(i) => s.serialize_u64(*i as u64 + 1),
            RowLabel::Synthesized(_) => s.collect_str(self),
        }
    }
}

/// Which member of a dependency set is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovalPolicy {
    #[default]
    Lowest,
    Highest,
}

pub fn removal_choice<T: Ord + Copy>(c_prime: &[T], policy: RemovalPolicy) -> Result<T> {
    let pick = match policy {
        RemovalPolicy::Lowest => c_prime.iter().min(),
        RemovalPolicy::Highest => c_prime.iter().max(),
    };
    pick.copied().ok_or(Error::EmptyDependency)
}

/// Rows of `sel` whose sum vanishes on `sel`'s columns (parent indices).
pub fn find_dependency(m: &BitMatrix, sel: &SubSelection) -> Result<Vec<usize>> {
    let sub = m.submatrix(sel)?;
    match first_dependency(&sub).0 {
        Some(local) => Ok(local.into_iter().map(|i| sel.row_ids[i]).collect()),
        None => Err(Error::NoDependency),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComponentKind {
    PseudoTree,
    Ess {
        fold: FoldLevel,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<RowLabel>>,
    },
    PessAfterRemoval,
    Residual,
}

/// A synthesized `c*` row and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AddedConstraint {
    pub label: RowLabel,
    /// The dependency set `C'` whose sum was taken.
    pub from: Vec<RowLabel>,
    #[serde(serialize_with = "crate::serde_util::one_based_vec")]
    pub support: Vec<usize>,
}

/// One entry of the decomposition output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub rows: Vec<RowLabel>,
    #[serde(rename = "cols", serialize_with = "crate::serde_util::one_based_vec")]
    pub col_ids: Vec<usize>,
    /// Rows restricted to `col_ids`.
    #[serde(skip)]
    pub matrix: BitMatrix,
    /// Rows over all input columns; support outside `col_ids` lies in earlier components.
    #[serde(skip)]
    pub full_rows: Vec<BitVec>,
    #[serde(flatten)]
    pub kind: ComponentKind,
    pub rank: usize,
    pub k_i: usize,
    pub added_constraints: Vec<AddedConstraint>,
    pub depth: usize,
}

impl Component {
    /// Input-matrix rows of this component, in order.
    pub fn input_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter_map(|r| match r {
                RowLabel::Input(i) => Some(*i),
                RowLabel::Synthesized(_) => None,
            })
            .collect()
    }

    pub fn is_pseudo_tree(&self) -> bool {
        is_pseudo_tree(&self.matrix, &SubSelection::full(&self.matrix)).expect("full selection")
    }
}

/// `k_i = cols − rank` of the component matrix.
pub fn message_bit_count(component: &Component) -> usize {
    component.matrix.cols() - component.matrix.rank()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "consistent")]
    Consistent,
    #[serde(rename = "OVERCOUNT")]
    Overcount,
    /// Never expected; indicates an accounting bug.
    #[serde(rename = "UNDERCOUNT")]
    Undercount,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Overcount => "OVERCOUNT",
            Verdict::Undercount => "UNDERCOUNT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum DecomposeEvent {
    /// A PESS was found and a dependency chosen.
    Dependency {
        call: usize,
        step: usize,
        c_prime: Vec<RowLabel>,
        /// Number of independent dependencies among the PESS rows.
        left_kernel_dim: usize,
    },
    /// The removed constraint's information moved into `c*`.
    Transferred { row: RowLabel, into: RowLabel },
    /// The removed constraint had no earlier component and is lost.
    Discarded { row: RowLabel },
    /// A recursive input exceeded the finder's column-weight bound.
    ColumnWeightExceeded {
        call: usize,
        #[serde(serialize_with = "crate::serde_util::one_based")]
        column: usize,
        weight: usize,
    },
}

/// One finder invocation inside a call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinderCall {
    pub step: usize,
    pub rows: Vec<RowLabel>,
    #[serde(serialize_with = "crate::serde_util::one_based_vec")]
    pub cols: Vec<usize>,
    pub exit: FinderExit,
    /// The output equals the whole residual, which ends the call.
    pub is_residual: bool,
    pub pess: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed: Option<RowLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallRecord {
    pub call: usize,
    pub depth: usize,
    pub rows: Vec<RowLabel>,
    #[serde(serialize_with = "crate::serde_util::one_based_vec")]
    pub cols: Vec<usize>,
    pub finder_calls: Vec<FinderCall>,
    pub children: Vec<CallRecord>,
}

/// Shape of the first finder output on the input matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirstOutput {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub dim_ker: usize,
    pub pess: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecomposeOptions {
    pub policy: ChoicePolicy,
    pub removal: RemovalPolicy,
    pub depth_limit: usize,
    /// Largest fold level searched when labelling ESS components.
    pub fold_max_k: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            policy: ChoicePolicy::InOrder,
            removal: RemovalPolicy::Lowest,
            depth_limit: 32,
            fold_max_k: 2,
        }
    }
}

impl DecomposeOptions {
    pub fn with_policy(policy: ChoicePolicy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub schema_version: u32,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub options: DecomposeOptions,
    pub components: Vec<Component>,
    pub sum_k: usize,
    #[serde(rename = "dim_ker")]
    pub kernel_dim: usize,
    pub verdict: Verdict,
    pub first_output: Option<FirstOutput>,
    pub events: Vec<DecomposeEvent>,
    pub recursion_log: CallRecord,
}

impl DecompositionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rows dropped or transferred by dependency removal.
    pub fn removed_rows(&self) -> Vec<RowLabel> {
        self.events
            .iter()
            .filter_map(|e| match e {
                DecomposeEvent::Transferred { row, .. } | DecomposeEvent::Discarded { row } => Some(*row),
                _ => None,
            })
            .collect()
    }

    pub fn discarded_rows(&self) -> Vec<RowLabel> {
        self.events
            .iter()
            .filter_map(|e| match e {
                DecomposeEvent::Discarded { row } => Some(*row),
                _ => None,
            })
            .collect()
    }
}

#[derive(Clone)]
struct SysRow {
    label: RowLabel,
    bits: BitVec,
}

struct Slot {
    rows: Vec<usize>,
    cols: Vec<usize>,
    kind: SlotKind,
    added: Vec<AddedConstraint>,
    replaced: Option<Vec<Component>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SlotKind {
    StripOutput,
    Pess,
    Other,
}

struct Decomposer {
    opts: DecomposeOptions,
    chooser: RowChooser,
    n: usize,
    rows: Vec<SysRow>,
    next_synth: usize,
    next_call: usize,
    events: Vec<DecomposeEvent>,
    first_output: Option<FirstOutput>,
}

/// Runs the decomposition. The input must have column weight at most 3.
pub fn decompose(m: &BitMatrix, opts: DecomposeOptions) -> Result<DecompositionReport> {
    check_column_weights(m, MAX_FINDER_COLUMN_WEIGHT)?;
    let rows = (0..m.rows())
        .map(|i| SysRow {
            label: RowLabel::Input(i),
            bits: m.row(i),
        })
        .collect();
    let mut d = Decomposer {
        opts,
        chooser: RowChooser::new(opts.policy),
        n: m.cols(),
        rows,
        next_synth: 0,
        next_call: 0,
        events: Vec::new(),
        first_output: None,
    };
    let (components, record) = d.call((0..m.rows()).collect(), (0..m.cols()).collect(), 0)?;
    let sum_k: usize = components.iter().map(|c| c.k_i).sum();
    let kernel_dim = m.kernel_dim();
    let verdict = match sum_k.cmp(&kernel_dim) {
        std::cmp::Ordering::Greater => Verdict::Overcount,
        std::cmp::Ordering::Equal => Verdict::Consistent,
        std::cmp::Ordering::Less => Verdict::Undercount,
    };
    Ok(DecompositionReport {
        schema_version: SCHEMA_VERSION,
        matrix_rows: m.rows(),
        matrix_cols: m.cols(),
        options: opts,
        components,
        sum_k,
        kernel_dim,
        verdict,
        first_output: d.first_output,
        events: d.events,
        recursion_log: record,
    })
}

impl Decomposer {
    fn materialize(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let restricted: Vec<BitVec> = rows.iter().map(|&r| self.rows[r].bits.restrict(cols)).collect();
        BitMatrix::from_rows(cols.len(), &restricted)
    }

    fn labels(&self, rows: &[usize]) -> Vec<RowLabel> {
        rows.iter().map(|&r| self.rows[r].label).collect()
    }

    fn call(&mut self, rows: Vec<usize>, cols: Vec<usize>, depth: usize) -> Result<(Vec<Component>, CallRecord)> {
        if depth > self.opts.depth_limit {
            return Err(Error::DepthLimit(self.opts.depth_limit));
        }
        let call_id = self.next_call;
        self.next_call += 1;
        let mut record = CallRecord {
            call: call_id,
            depth,
            rows: self.labels(&rows),
            cols: cols.clone(),
            finder_calls: Vec::new(),
            children: Vec::new(),
        };
        if depth > 0 {
            let input = self.materialize(&rows, &cols);
            if let Err(Error::ColumnWeight { column, weight, .. }) =
                check_column_weights(&input, MAX_FINDER_COLUMN_WEIGHT)
            {
                self.events.push(DecomposeEvent::ColumnWeightExceeded {
                    call: call_id,
                    column: cols[column],
                    weight,
                });
            }
        }

        let mut res_rows = rows;
        let mut res_cols = cols;
        let mut slots: Vec<Slot> = Vec::new();

        while !res_rows.is_empty() {
            let h = self.materialize(&res_rows, &res_cols);
            let found = run_finder(&h, &mut self.chooser);
            let local = found.selection;
            let mut sel_rows: Vec<usize> = local.row_ids.iter().map(|&i| res_rows[i]).collect();
            let sel_cols: Vec<usize> = local.col_ids.iter().map(|&j| res_cols[j]).collect();
            let step = slots.len() + 1;
            let is_residual = sel_rows.len() == res_rows.len() && sel_cols.len() == res_cols.len();

            let sub = h.submatrix(&local).expect("finder selection is valid");
            let sub_rank = sub.rank();
            let pess = !is_residual && check_candidate(&h, &local).is_ok() && sub_rank < sel_rows.len();
            if depth == 0 && self.first_output.is_none() {
                self.first_output = Some(FirstOutput {
                    rows: sel_rows.len(),
                    cols: sel_cols.len(),
                    rank: sub_rank,
                    dim_ker: sel_cols.len() - sub_rank,
                    pess,
                });
            }
            let mut finder_call = FinderCall {
                step,
                rows: self.labels(&sel_rows),
                cols: sel_cols.clone(),
                exit: found.exit,
                is_residual,
                pess,
                removed: None,
            };
            if is_residual {
                record.finder_calls.push(finder_call);
                break;
            }

            let mut removed_row = None;
            if pess {
                let (dep, left_kernel_dim) = first_dependency(&sub);
                let dep = dep.expect("PESS rows are dependent");
                let c_prime: Vec<usize> = dep.iter().map(|&i| sel_rows[i]).collect();
                let c_prime_labels = self.labels(&c_prime);
                self.events.push(DecomposeEvent::Dependency {
                    call: call_id,
                    step,
                    c_prime: c_prime_labels.clone(),
                    left_kernel_dim,
                });
                let drop_label = removal_choice(&c_prime_labels, self.opts.removal)?;
                let drop = c_prime[c_prime_labels.iter().position(|&l| l == drop_label).expect("chosen from C'")];
                sel_rows.retain(|&r| r != drop);
                removed_row = Some(drop);
                finder_call.removed = Some(drop_label);

                if let Some(prev) = slots.last_mut() {
                    let mut sum = BitVec::zeros(self.n);
                    for &c in &c_prime {
                        sum.xor_assign(&self.rows[c].bits);
                    }
                    let mut c_star = BitVec::zeros(self.n);
                    for &j in &prev.cols {
                        if sum.get(j) {
                            c_star.set(j, true);
                        }
                    }
                    let label = RowLabel::Synthesized(self.next_synth);
                    self.next_synth += 1;
                    prev.added.push(AddedConstraint {
                        label,
                        from: c_prime_labels,
                        support: c_star.ones().collect(),
                    });
                    self.rows.push(SysRow { label, bits: c_star });
                    prev.rows.push(self.rows.len() - 1);
                    self.events.push(DecomposeEvent::Transferred { row: drop_label, into: label });

                    let (prev_rows, prev_cols) = (prev.rows.clone(), prev.cols.clone());
                    let (sub_components, sub_record) = self.call(prev_rows, prev_cols, depth + 1)?;
                    let prev = slots.last_mut().expect("still there");
                    prev.replaced = Some(sub_components);
                    record.children.push(sub_record);
                } else {
                    self.events.push(DecomposeEvent::Discarded { row: drop_label });
                }
            }
            record.finder_calls.push(finder_call);

            let kind = if pess {
                SlotKind::Pess
            } else if found.exit == FinderExit::StripOutput {
                SlotKind::StripOutput
            } else {
                SlotKind::Other
            };
            res_rows.retain(|r| !sel_rows.contains(r) && Some(*r) != removed_row);
            res_cols.retain(|c| !sel_cols.contains(c));
            slots.push(Slot {
                rows: sel_rows,
                cols: sel_cols,
                kind,
                added: Vec::new(),
                replaced: None,
            });
        }
        if !res_rows.is_empty() || !res_cols.is_empty() {
            slots.push(Slot {
                rows: res_rows,
                cols: res_cols,
                kind: SlotKind::Other,
                added: Vec::new(),
                replaced: None,
            });
        }

        let mut components = Vec::new();
        for slot in slots {
            match slot.replaced {
                Some(sub) => components.extend(sub),
                None => {
                    if !slot.rows.is_empty() || !slot.cols.is_empty() {
                        components.push(self.component(&slot, depth));
                    }
                }
            }
        }
        Ok((components, record))
    }

    fn component(&self, slot: &Slot, depth: usize) -> Component {
        let matrix = self.materialize(&slot.rows, &slot.cols);
        let rank = matrix.rank();
        let full = SubSelection::full(&matrix);
        let kind = match slot.kind {
            SlotKind::Pess => ComponentKind::PessAfterRemoval,
            SlotKind::StripOutput => {
                let (fold, witness) = fold_search(&matrix, self.opts.fold_max_k);
                ComponentKind::Ess {
                    fold,
                    witness: witness.map(|w| w.iter().map(|&i| self.rows[slot.rows[i]].label).collect()),
                }
            }
            SlotKind::Other => {
                if is_pseudo_tree(&matrix, &full).expect("full selection") {
                    ComponentKind::PseudoTree
                } else {
                    ComponentKind::Residual
                }
            }
        };
        Component {
            rows: self.labels(&slot.rows),
            col_ids: slot.cols.clone(),
            k_i: matrix.cols() - rank,
            rank,
            full_rows: slot.rows.iter().map(|&r| self.rows[r].bits.clone()).collect(),
            matrix,
            kind,
            added_constraints: slot.added.clone(),
            depth,
        }
    }
}

/// Structural checks on a finished decomposition; returns a description of the first violation.
///
/// Component columns must partition the input columns; every input row must
/// appear in exactly one component or have been removed exactly once.
pub fn check_conservation(m: &BitMatrix, report: &DecompositionReport) -> std::result::Result<(), String> {
    let mut col_seen = vec![0usize; m.cols()];
    for c in &report.components {
        for &j in &c.col_ids {
            col_seen[j] += 1;
        }
    }
    if let Some(j) = col_seen.iter().position(|&k| k != 1) {
        return Err(format!("column {} covered {} times", j + 1, col_seen[j]));
    }
    let mut row_seen = vec![0usize; m.rows()];
    for c in &report.components {
        for i in c.input_rows() {
            row_seen[i] += 1;
        }
    }
    for r in report.removed_rows() {
        if let RowLabel::Input(i) = r {
            row_seen[i] += 1;
        }
    }
    if let Some(i) = row_seen.iter().position(|&k| k != 1) {
        return Err(format!("row {} accounted {} times", i + 1, row_seen[i]));
    }
    for c in &report.components {
        for (row, label) in c.full_rows.iter().zip(&c.rows) {
            if let RowLabel::Input(i) = label {
                if *row != m.row(*i) {
                    return Err(format!("row {} altered", i + 1));
                }
            }
        }
        for a in &c.added_constraints {
            if let Some(pos) = c.rows.iter().position(|l| *l == a.label) {
                let support: Vec<usize> = c.full_rows[pos].ones().collect();
                if support != a.support {
                    return Err(format!("{} support mismatch", a.label));
                }
            }
        }
        if c.k_i != message_bit_count(c) {
            return Err("k_i differs from cols - rank".into());
        }
    }
    Ok(())
}
