//! XOR circuits: pseudo-tree schedules, component encoders, composition and verification.
//!
//! Node ids, message indices and codeword positions in this module are 0-based,
//! including in serialized circuits.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decompose::{Component, ComponentKind, DecompositionReport, RowLabel};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, SubSelection};
use crate::peel::strip;

/// Largest input count accepted by exhaustive verification.
pub const MAX_EXHAUSTIVE_INPUTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Gate {
    /// Message bit terminal.
    Input { message: usize },
    /// Codeword bit produced by another circuit; resolved by [`compose`].
    External { position: usize },
    Zero,
    Wire { a: usize },
    Xor { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Circuit {
    pub codeword_len: usize,
    pub gates: Vec<Gate>,
    /// Gate id of each message bit.
    pub inputs: Vec<usize>,
    /// Codeword position to gate id.
    pub outputs: BTreeMap<usize, usize>,
}

impl Circuit {
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    /// Every operand precedes its gate; fan-in is at most 2 by construction.
    pub fn is_topological(&self) -> bool {
        self.gates.iter().enumerate().all(|(id, g)| match *g {
            Gate::Wire { a } => a < id,
            Gate::Xor { a, b } => a < id && b < id,
            _ => true,
        })
    }

    pub fn externals(&self) -> Vec<usize> {
        self.gates
            .iter()
            .filter_map(|g| match g {
                Gate::External { position } => Some(*position),
                _ => None,
            })
            .collect()
    }

    /// Evaluates with no external wires.
    pub fn evaluate(&self, message: &BitVec) -> Result<BitVec> {
        self.evaluate_with(message, None)
    }

    /// Evaluates, reading external wires from `externals` (a codeword-length vector) when given.
    pub fn evaluate_with(&self, message: &BitVec, externals: Option<&BitVec>) -> Result<BitVec> {
        if message.len() != self.inputs.len() {
            return Err(Error::LengthMismatch {
                expected: self.inputs.len(),
                found: message.len(),
            });
        }
        let mut value = vec![false; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            value[id] = match *g {
                Gate::Input { message: k } => message.get(k),
                Gate::External { position } => match externals {
                    Some(x) => x.get(position),
                    None => return Err(Error::UnresolvedWire { position }),
                },
                Gate::Zero => false,
                Gate::Wire { a } => value[a],
                Gate::Xor { a, b } => value[a] ^ value[b],
            };
        }
        let mut out = BitVec::zeros(self.codeword_len);
        for (&pos, &node) in &self.outputs {
            out.set(pos, value[node]);
        }
        Ok(out)
    }

    /// Images of the unit messages, one per row.
    pub fn linear_map(&self) -> Result<BitMatrix> {
        let k = self.inputs.len();
        let rows = (0..k)
            .map(|i| self.evaluate(&BitVec::unit(k, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix::from_rows(self.codeword_len, &rows))
    }
}

#[derive(Default)]
struct Builder {
    gates: Vec<Gate>,
    inputs: Vec<usize>,
    externals: HashMap<usize, usize>,
    outputs: BTreeMap<usize, usize>,
}

impl Builder {
    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    fn input(&mut self) -> usize {
        let id = self.push(Gate::Input {
            message: self.inputs.len(),
        });
        self.inputs.push(id);
        id
    }

    fn external(&mut self, position: usize) -> usize {
        if let Some(&id) = self.externals.get(&position) {
            return id;
        }
        let id = self.push(Gate::External { position });
        self.externals.insert(position, id);
        id
    }

    /// Balanced fan-in-2 XOR tree; `k` operands cost `k − 1` gates.
    fn xor_all(&mut self, mut nodes: Vec<usize>) -> usize {
        match nodes.len() {
            0 => return self.push(Gate::Zero),
            1 => return self.push(Gate::Wire { a: nodes[0] }),
            _ => {}
        }
        while nodes.len() > 1 {
            let mut next = Vec::with_capacity(nodes.len().div_ceil(2));
            for pair in nodes.chunks(2) {
                next.push(match *pair {
                    [a, b] => self.push(Gate::Xor { a, b }),
                    [a] => a,
                    _ => unreachable!(),
                });
            }
            nodes = next;
        }
        nodes[0]
    }

    fn finish(self, codeword_len: usize) -> Circuit {
        Circuit {
            codeword_len,
            gates: self.gates,
            inputs: self.inputs,
            outputs: self.outputs,
        }
    }
}

/// `variable ← Σ operands + Σ externals`, enforcing `constraint`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveStep {
    pub variable: usize,
    pub constraint: usize,
    pub operands: Vec<usize>,
    /// Positions outside the scheduled columns, read from earlier components.
    pub externals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodeSchedule {
    pub codeword_len: usize,
    pub message_bits: Vec<usize>,
    pub solve_steps: Vec<SolveStep>,
}

impl EncodeSchedule {
    /// Every operand is a message bit or solved by an earlier step, and nothing is solved twice.
    pub fn is_well_formed(&self) -> bool {
        let mut known: BTreeSet<usize> = self.message_bits.iter().copied().collect();
        for s in &self.solve_steps {
            if s.operands.iter().any(|v| !known.contains(v)) || !known.insert(s.variable) {
                return false;
            }
        }
        true
    }
}

fn schedule_rows(m: &BitMatrix, rows: &[usize], cols: &[usize]) -> Result<EncodeSchedule> {
    let sel = SubSelection::new(rows.to_vec(), cols.to_vec())?;
    let trace = strip(m, &sel)?;
    if !trace.survivors.row_ids.is_empty() || !trace.survivors.col_ids.is_empty() {
        return Err(Error::NotPseudoTree {
            rows: trace.survivors.row_ids,
        });
    }
    let mut inside = vec![false; m.cols()];
    for &j in cols {
        inside[j] = true;
    }
    let solve_steps = trace
        .pairs
        .iter()
        .rev()
        .map(|&(v, c)| {
            let (operands, externals): (Vec<usize>, Vec<usize>) =
                m.row_support(c).into_iter().filter(|&j| j != v).partition(|&j| inside[j]);
            SolveStep {
                variable: v,
                constraint: c,
                operands,
                externals,
            }
        })
        .collect();
    let mut message_bits = trace.dropped_isolated;
    message_bits.sort_unstable();
    Ok(EncodeSchedule {
        codeword_len: m.cols(),
        message_bits,
        solve_steps,
    })
}

/// Reverse-peel schedule of a pseudo-tree `M(C, V)`.
pub fn schedule_pseudo_tree(m: &BitMatrix, sel: &SubSelection) -> Result<EncodeSchedule> {
    schedule_rows(m, &sel.row_ids, &sel.col_ids)
}

fn emit_steps(b: &mut Builder, schedule: &EncodeSchedule, node: &mut HashMap<usize, usize>) {
    for s in &schedule.solve_steps {
        let mut ops: Vec<usize> = s.operands.iter().map(|v| node[v]).collect();
        ops.extend(s.externals.iter().map(|&p| b.external(p)));
        let id = b.xor_all(ops);
        node.insert(s.variable, id);
        b.outputs.insert(s.variable, id);
    }
}

pub fn build_circuit(schedule: &EncodeSchedule) -> Circuit {
    let mut b = Builder::default();
    let mut node = HashMap::new();
    for &v in &schedule.message_bits {
        let id = b.input();
        node.insert(v, id);
        b.outputs.insert(v, id);
    }
    emit_steps(&mut b, schedule, &mut node);
    b.finish(schedule.codeword_len)
}

/// Circuit for a whole pseudo-tree matrix; errors with the surviving rows otherwise.
pub fn encode_pseudo_tree(m: &BitMatrix) -> Result<Circuit> {
    Ok(build_circuit(&schedule_pseudo_tree(m, &SubSelection::full(m))?))
}

/// Joins circuits in order; external wires read outputs of earlier circuits.
pub fn compose(parts: &[Circuit]) -> Result<Circuit> {
    let n = parts.first().map_or(0, |c| c.codeword_len);
    let mut b = Builder::default();
    for part in parts {
        if part.codeword_len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: part.codeword_len,
            });
        }
        let mut remap = vec![0; part.gates.len()];
        for (id, g) in part.gates.iter().enumerate() {
            remap[id] = match *g {
                Gate::Input { .. } => b.input(),
                Gate::External { position } => *b
                    .outputs
                    .get(&position)
                    .ok_or(Error::UnresolvedWire { position })?,
                Gate::Zero => b.push(Gate::Zero),
                Gate::Wire { a } => b.push(Gate::Wire { a: remap[a] }),
                Gate::Xor { a, b: c } => b.push(Gate::Xor {
                    a: remap[a],
                    b: remap[c],
                }),
            };
        }
        for (&pos, &node) in &part.outputs {
            if b.outputs.insert(pos, remap[node]).is_some() {
                return Err(Error::OutputCoverage { position: pos });
            }
        }
    }
    if let Some(pos) = (0..n).find(|p| !b.outputs.contains_key(p)) {
        return Err(Error::OutputCoverage { position: pos });
    }
    Ok(b.finish(n))
}

/// Encoder of one component and the rows it could not pass through the peel schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentEncoding {
    #[serde(skip)]
    pub circuit: Circuit,
    pub inputs: usize,
    /// Rows removed to reach a pseudo-tree.
    pub removed: Vec<RowLabel>,
    /// Message bits fixed to satisfy removed rows.
    pub decided: usize,
    /// Removed rows whose value depends only on external wires; not enforced.
    pub unenforced: Vec<RowLabel>,
}

/// Encodes a component with inputs equal to its `k_i`.
///
/// Rows are removed (fold witness first, then the lowest surviving row)
/// until peeling empties the rest. Each removed row is written as a linear
/// form over the remaining message bits and the external wires; elimination
/// on the message part picks one decided bit per independent row, computed
/// from the free bits and externals.
pub fn encode_component(c: &Component, codeword_len: usize) -> Result<ComponentEncoding> {
    let full = BitMatrix::from_rows(codeword_len, &c.full_rows);
    let all_cols: Vec<usize> = (0..c.matrix.cols()).collect();
    let mut active = vec![true; c.rows.len()];
    let mut removed = Vec::new();
    if let ComponentKind::Ess { witness: Some(w), .. } = &c.kind {
        for label in w {
            let r = c.rows.iter().position(|l| l == label).expect("witness row belongs to component");
            active[r] = false;
            removed.push(r);
        }
    }
    loop {
        let rows: Vec<usize> = (0..c.rows.len()).filter(|&r| active[r]).collect();
        let trace = strip(&c.matrix, &SubSelection::new(rows, all_cols.clone())?)?;
        match trace.survivors.row_ids.first() {
            Some(&r) => {
                active[r] = false;
                removed.push(r);
            }
            None => break,
        }
    }
    let rows: Vec<usize> = (0..c.rows.len()).filter(|&r| active[r]).collect();
    let schedule = schedule_rows(&full, &rows, &c.col_ids)?;

    let u = &schedule.message_bits;
    let inside: BTreeSet<usize> = c.col_ids.iter().copied().collect();
    let ext: Vec<usize> = c
        .full_rows
        .iter()
        .flat_map(|r| r.ones())
        .filter(|j| !inside.contains(j))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ext_at: HashMap<usize, usize> = ext.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let width = u.len() + ext.len();

    // symbolic value of every component column over (message bits, externals)
    let mut expr: HashMap<usize, BitVec> = u.iter().enumerate().map(|(i, &v)| (v, BitVec::unit(width, i))).collect();
    for s in &schedule.solve_steps {
        let mut e = BitVec::zeros(width);
        for v in &s.operands {
            e.xor_assign(&expr[v]);
        }
        for p in &s.externals {
            e.flip(u.len() + ext_at[p]);
        }
        expr.insert(s.variable, e);
    }
    let mut forms: Vec<(usize, BitVec)> = removed
        .iter()
        .map(|&r| {
            let mut e = BitVec::zeros(width);
            for j in c.full_rows[r].ones() {
                match expr.get(&j) {
                    Some(x) => e.xor_assign(x),
                    None => e.flip(u.len() + ext_at[&j]),
                }
            }
            (r, e)
        })
        .collect();

    // Gauss–Jordan on the message part
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (message index, form index)
    let mut next = 0;
    for col in 0..u.len() {
        let Some(p) = (next..forms.len()).find(|&i| forms[i].1.get(col)) else {
            continue;
        };
        forms.swap(p, next);
        let pivot = forms[next].1.clone();
        for (i, f) in forms.iter_mut().enumerate() {
            if i != next && f.1.get(col) {
                f.1.xor_assign(&pivot);
            }
        }
        pivots.push((col, next));
        next += 1;
    }
    let unenforced: Vec<RowLabel> = forms[next..]
        .iter()
        .filter(|(_, f)| !f.is_zero())
        .map(|(r, _)| c.rows[*r])
        .collect();

    let decided: HashMap<usize, usize> = pivots.iter().copied().collect();
    let mut b = Builder::default();
    let mut msg_node = vec![usize::MAX; u.len()];
    for (i, slot) in msg_node.iter_mut().enumerate() {
        if !decided.contains_key(&i) {
            *slot = b.input();
        }
    }
    for &(col, f) in &pivots {
        let form = &forms[f].1;
        let mut ops: Vec<usize> = (0..u.len())
            .filter(|&i| i != col && form.get(i))
            .map(|i| msg_node[i])
            .collect();
        for (k, &p) in ext.iter().enumerate() {
            if form.get(u.len() + k) {
                ops.push(b.external(p));
            }
        }
        msg_node[col] = b.xor_all(ops);
    }
    let mut node = HashMap::new();
    for (i, &v) in u.iter().enumerate() {
        node.insert(v, msg_node[i]);
        b.outputs.insert(v, msg_node[i]);
    }
    emit_steps(&mut b, &schedule, &mut node);
    let circuit = b.finish(codeword_len);
    Ok(ComponentEncoding {
        inputs: circuit.input_count(),
        circuit,
        removed: removed.iter().map(|&r| c.rows[r]).collect(),
        decided: pivots.len(),
        unenforced,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComposedEncoder {
    pub circuit: Circuit,
    pub components: Vec<ComponentEncoding>,
}

/// Component encoders in decomposition order, composed into one circuit.
pub fn encode_decomposition(report: &DecompositionReport) -> Result<ComposedEncoder> {
    let components = report
        .components
        .iter()
        .map(|c| encode_component(c, report.matrix_cols))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<Circuit> = components.iter().map(|e| e.circuit.clone()).collect();
    let circuit = if parts.is_empty() {
        Builder::default().finish(report.matrix_cols)
    } else {
        compose(&parts)?
    };
    Ok(ComposedEncoder { circuit, components })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncoderCheck {
    pub mode: VerifyMode,
    pub inputs: usize,
    pub kernel_dim: usize,
    pub messages_tested: usize,
    /// Every tested image is a codeword.
    pub membership: bool,
    pub injective: bool,
    /// Input count equals the kernel dimension.
    pub dimension_match: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EncoderVerdict {
    Encodes {
        check: EncoderCheck,
    },
    Fails {
        check: EncoderCheck,
        /// First tested message whose image is not a codeword.
        witness: Option<BitVec>,
        image: Option<BitVec>,
        syndrome: Option<BitVec>,
    },
}

impl EncoderVerdict {
    pub fn encodes(&self) -> bool {
        matches!(self, EncoderVerdict::Encodes { .. })
    }

    pub fn witness(&self) -> Option<&BitVec> {
        match self {
            EncoderVerdict::Fails { witness, .. } => witness.as_ref(),
            EncoderVerdict::Encodes { .. } => None,
        }
    }
}

/// Checks that the circuit's image is exactly `Ker(M)`.
pub fn verify_encoder(m: &BitMatrix, circuit: &Circuit, mode: VerifyMode) -> Result<EncoderVerdict> {
    if circuit.codeword_len != m.cols() {
        return Err(Error::LengthMismatch {
            expected: m.cols(),
            found: circuit.codeword_len,
        });
    }
    let k = circuit.input_count();
    let messages: Box<dyn Iterator<Item = BitVec>> = match mode {
        VerifyMode::Exhaustive => {
            if k > MAX_EXHAUSTIVE_INPUTS {
                return Err(Error::TooManyInputs {
                    inputs: k,
                    max: MAX_EXHAUSTIVE_INPUTS,
                });
            }
            Box::new((0..1u64 << k).map(move |w| BitVec::from_u64(k, w)))
        }
        VerifyMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let msgs: Vec<BitVec> = (0..count)
                .map(|_| BitVec::from_bools(&(0..k).map(|_| rng.gen::<bool>()).collect::<Vec<_>>()))
                .collect();
            Box::new(msgs.into_iter())
        }
    };
    let mut tested = 0;
    let mut failure = None;
    for w in messages {
        tested += 1;
        let x = circuit.evaluate(&w)?;
        let s = m.mul_vec(&x);
        if !s.is_zero() {
            failure = Some((w, x, s));
            break;
        }
    }
    let kernel_dim = m.kernel_dim();
    let check = EncoderCheck {
        mode,
        inputs: k,
        kernel_dim,
        messages_tested: tested,
        membership: failure.is_none(),
        injective: circuit.linear_map()?.rank() == k,
        dimension_match: k == kernel_dim,
    };
    if check.membership && check.injective && check.dimension_match {
        return Ok(EncoderVerdict::Encodes { check });
    }
    let (witness, image, syndrome) = match failure {
        Some((w, x, s)) => (Some(w), Some(x), Some(s)),
        None => (None, None, None),
    };
    Ok(EncoderVerdict::Fails {
        check,
        witness,
        image,
        syndrome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::build_mn;
    use crate::decompose::{decompose, DecomposeOptions};

    fn chain() -> BitMatrix {
        BitMatrix::from_dense("110\n011\n").unwrap()
    }

    #[test]
    fn chain_schedule_and_circuit() {
        let m = chain();
        let s = schedule_pseudo_tree(&m, &SubSelection::full(&m)).unwrap();
        assert_eq!(s.message_bits, vec![2]);
        assert_eq!(s.solve_steps.len(), 2);
        assert_eq!((s.solve_steps[0].variable, s.solve_steps[0].operands.clone()), (1, vec![2]));
        assert_eq!((s.solve_steps[1].variable, s.solve_steps[1].operands.clone()), (0, vec![1]));
        assert!(s.is_well_formed());
        let c = build_circuit(&s);
        assert_eq!(c.input_count(), 1);
        assert_eq!(c.gates.iter().filter(|g| matches!(g, Gate::Wire { .. })).count(), 2);
        assert_eq!(c.evaluate(&BitVec::from_u64(1, 1)).unwrap().to_string(), "111");
        assert!(c.evaluate(&BitVec::zeros(1)).unwrap().is_zero());
        assert!(verify_encoder(&m, &c, VerifyMode::Exhaustive).unwrap().encodes());
    }

    #[test]
    fn single_constraint_and_empty() {
        let m = BitMatrix::from_dense("11\n").unwrap();
        let s = schedule_pseudo_tree(&m, &SubSelection::full(&m)).unwrap();
        assert_eq!(s.message_bits, vec![1]);
        assert_eq!(s.solve_steps[0].variable, 0);

        let m = BitMatrix::zeros(0, 4);
        let s = schedule_pseudo_tree(&m, &SubSelection::full(&m)).unwrap();
        assert_eq!(s.message_bits, vec![0, 1, 2, 3]);
        let c = build_circuit(&s);
        assert_eq!(c.size(), 4);
        assert!(verify_encoder(&m, &c, VerifyMode::Exhaustive).unwrap().encodes());
    }

    #[test]
    fn five_operand_tree() {
        let mut b = Builder::default();
        let ins: Vec<usize> = (0..5).map(|_| b.input()).collect();
        b.xor_all(ins);
        assert_eq!(b.gates.iter().filter(|g| matches!(g, Gate::Xor { .. })).count(), 4);
    }

    #[test]
    fn non_pseudo_tree_is_rejected() {
        let m = BitMatrix::ones(2, 2);
        assert!(matches!(encode_pseudo_tree(&m), Err(Error::NotPseudoTree { .. })));
    }

    #[test]
    fn evaluate_checks_length_and_externals() {
        let c = encode_pseudo_tree(&chain()).unwrap();
        assert!(matches!(c.evaluate(&BitVec::zeros(2)), Err(Error::LengthMismatch { .. })));
        let part = build_circuit(&EncodeSchedule {
            codeword_len: 2,
            message_bits: vec![],
            solve_steps: vec![SolveStep {
                variable: 0,
                constraint: 0,
                operands: vec![],
                externals: vec![1],
            }],
        });
        assert_eq!(part.evaluate(&BitVec::zeros(0)), Err(Error::UnresolvedWire { position: 1 }));
        assert_eq!(compose(&[part.clone()]), Err(Error::UnresolvedWire { position: 1 }));
    }

    #[test]
    fn compose_disjoint_parts() {
        let s1 = EncodeSchedule {
            codeword_len: 2,
            message_bits: vec![0],
            solve_steps: vec![],
        };
        let s2 = EncodeSchedule {
            codeword_len: 2,
            message_bits: vec![1],
            solve_steps: vec![],
        };
        let c = compose(&[build_circuit(&s1), build_circuit(&s2)]).unwrap();
        assert_eq!(c.input_count(), 2);
        assert_eq!(c.evaluate(&BitVec::from_u64(2, 2)).unwrap().to_string(), "01");
        assert!(matches!(
            compose(&[build_circuit(&s1), build_circuit(&s1)]),
            Err(Error::OutputCoverage { position: 0 })
        ));
        assert!(matches!(compose(&[build_circuit(&s1)]), Err(Error::OutputCoverage { position: 1 })));
    }

    #[test]
    fn component_inputs_equal_k() {
        let m = build_mn(1).unwrap();
        let r = decompose(&m, DecomposeOptions::default()).unwrap();
        for c in &r.components {
            let e = encode_component(c, m.cols()).unwrap();
            assert_eq!(e.inputs, c.k_i);
            assert!(e.circuit.is_topological());
        }
    }

    #[test]
    fn m18_composed_encoder_fails() {
        let m = build_mn(1).unwrap();
        let r = decompose(&m, DecomposeOptions::default()).unwrap();
        let enc = encode_decomposition(&r).unwrap();
        assert!(enc.circuit.input_count() >= 10);
        let v = verify_encoder(&m, &enc.circuit, VerifyMode::Exhaustive).unwrap();
        let w = v.witness().expect("a non-codeword image");
        assert!(!m.mul_vec(&enc.circuit.evaluate(w).unwrap()).is_zero());
        let sampled = verify_encoder(&m, &enc.circuit, VerifyMode::Sampled { count: 64, seed: 1 }).unwrap();
        assert!(!sampled.encodes());
    }

    #[test]
    fn exhaustive_limit() {
        let m = BitMatrix::zeros(0, 21);
        let c = encode_pseudo_tree(&m).unwrap();
        assert!(matches!(
            verify_encoder(&m, &c, VerifyMode::Exhaustive),
            Err(Error::TooManyInputs { inputs: 21, .. })
        ));
        assert!(verify_encoder(&m, &c, VerifyMode::Sampled { count: 10, seed: 0 }).unwrap().encodes());
    }
}
