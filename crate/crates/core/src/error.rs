use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch in block {block}: expected {expected}, found {found}")]
    DimensionMismatch {
        block: String,
        expected: String,
        found: String,
    },

    #[error("index out of range: {what} {index} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("duplicate {what} index {index} in selection")]
    DuplicateIndex { what: &'static str, index: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("column {column} has weight {weight}, the finder requires column weight at most {max}")]
    ColumnWeight {
        column: usize,
        weight: usize,
        max: usize,
    },

    #[error("selection is not a (P)ESS candidate: {0}")]
    NotCandidate(String),

    #[error("rows are linearly independent on the selected columns, no dependency exists")]
    NoDependency,

    #[error("cannot choose a constraint from an empty dependency set")]
    EmptyDependency,

    #[error("decomposition recursion exceeded depth limit {0}")]
    DepthLimit(usize),

    #[error("matrix is not a pseudo-tree: {} constraint(s) survive peeling", rows.len())]
    NotPseudoTree { rows: Vec<usize> },

    #[error("message length {found} does not match circuit input count {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("circuit reads codeword position {position} which no earlier component produces")]
    UnresolvedWire { position: usize },

    #[error("composed circuit does not cover codeword position {position} exactly once")]
    OutputCoverage { position: usize },

    #[error("exhaustive verification supports at most {max} inputs, circuit has {inputs}")]
    TooManyInputs { inputs: usize, max: usize },

    #[error("N must be odd and at least 1, got {0}")]
    InvalidN(usize),

    #[error("invalid ensemble parameters: {0}")]
    InvalidEnsemble(String),

    #[error("sampler failed to produce a simple graph after {0} attempts")]
    SamplerExhausted(usize),
}
