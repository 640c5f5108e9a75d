use thiserror::Error;

/// Errors raised by context construction, file parsing, lattice
/// construction, and the analysis passes built on top of them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate object name {0:?}")]
    DuplicateObjectName(String),

    #[error("duplicate attribute name {0:?}")]
    DuplicateAttributeName(String),

    #[error("{kind} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("unknown {kind} name {name:?}")]
    UnknownName { kind: &'static str, name: String },

    #[error("incidence has {got} rows but the context declares {expected} objects")]
    RowCountMismatch { expected: usize, got: usize },

    #[error("row {row} has {got} cells but the context declares {expected} attributes")]
    RowWidthMismatch {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("CXT parse error at line {line}: {message}")]
    CxtParse { line: usize, message: String },

    #[error("CSV context error: {0}")]
    CsvContext(String),

    #[error("usage log error: {0}")]
    LogFormat(String),

    #[error("invalid merge map: {0}")]
    InvalidMergeMap(String),

    #[error("invalid ingest config: {0}")]
    InvalidConfig(String),

    #[error("empty context: no incidence pairs survive the configured filters")]
    EmptyContext,

    #[error("concept limit {limit} exceeded (at least {enumerated} concepts in this context)")]
    CapacityExceeded { limit: usize, enumerated: usize },

    #[error("inconsistent concept set: {0}")]
    InconsistentConceptSet(String),

    #[error("extent of size {size} exceeds the brute-force cap {cap}")]
    ExtentTooLarge { size: usize, cap: usize },

    #[error("unknown concept id {0}")]
    UnknownConceptId(usize),

    #[error("selections come from different lattices ({left} vs {right} concepts)")]
    MismatchedLattice { left: usize, right: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
