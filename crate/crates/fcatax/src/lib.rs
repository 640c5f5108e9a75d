//! Concept lattices, stability indices, and user-group taxonomies.
//!
//! `fcatax` builds formal contexts from web-usage logs (or reads them
//! from Burmeister CXT / CSV files), enumerates all formal concepts,
//! constructs the covering graph of the concept lattice, scores every
//! concept with the stability index, and extracts readable taxonomies:
//! iceberg filters, top-k selections, and stability thresholds, with
//! JSON and Graphviz DOT exports.
//!
//! The crate is a library first; the `fcatax` binary wires the same
//! API into a pipeline-shaped CLI.

mod bitset;

pub mod context;
pub mod error;
pub mod export;
pub mod ingest;
pub mod io;
pub mod lattice;
pub mod manifest;
pub mod selection;
pub mod stability;

pub use context::{AttributeSet, FormalContext, ObjectSet};
pub use error::{Error, Result};
pub use ingest::{
    apply_merge_map, build_context, parse_usage_log, parse_usage_log_file, IngestConfig, LogKind,
    MergeMap, MergeRule, ParsedLog, RejectedRow, UsageRecord,
};
pub use lattice::{
    build_cover_graph, enumerate_concepts, enumerate_concepts_with, Concept, ConceptLattice,
    LatticeOptions,
};
pub use selection::{
    iceberg_filter, selection_overlap, stability_threshold_filter, top_k_extent, top_k_stability,
    SelectionCriterion, SelectionOverlap, SelectionResult,
};
pub use stability::{
    stability_all, stability_all_with, stability_bruteforce, stability_bruteforce_with,
    verify_counting_identity, ConceptStability, StabilityOptions, StabilityReport,
};
