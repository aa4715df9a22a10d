//! The ellipsis disambiguation experiment: word embeddings, relational verb
//! matrices, copy-object sentence composition and rank correlation.

mod compose;
mod embeddings;
mod stats;
mod task;

use thiserror::Error;

pub use compose::{compose_ellipsis, compose_transitive, relational_verb, ModelKind, Sentence, VerbMatrix};
pub use embeddings::EmbeddingStore;
pub use stats::{average_ranks, cosine, spearman_rho};
pub use task::{
    load_dataset, load_triples, parse_dataset, parse_triples, run_task, Aggregation, Report, ReportRow,
    Skipped, Task, TaskEntry, Triple, DATASET_HEADER,
};

#[derive(Debug, Error)]
pub enum DistribError {
    #[error("failed to read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: malformed")]
    Malformed { line: usize },
    #[error("line {line}: expected {expected} components, got {found}")]
    DimMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("header declares {declared} vectors, file has {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("dataset header must be `{expected}`")]
    Header { expected: String },
    #[error("no subject/object pairs to build a verb matrix from")]
    NoPairs,
    #[error("model needs a verb matrix")]
    NoMatrix,
    #[error("cosine of a zero vector")]
    ZeroVector,
    #[error("score lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("rank correlation needs at least 2 points, got {0}")]
    TooFew(usize),
    #[error("rank correlation of a constant score list")]
    ConstantScores,
    #[error("only {usable} usable entries ({skipped} skipped)")]
    EmptyDataset { usable: usize, skipped: usize },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}
