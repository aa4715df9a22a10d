//! Lambek calculus with a relevant modality: a sequent prover, finite
//! Fock space algebra, tensor semantics for derivations and the ellipsis
//! disambiguation experiment.

pub mod distrib;
pub mod fock;
pub mod logic;
pub mod prover;
pub mod semantics;

pub use distrib::{DistribError, EmbeddingStore, ModelKind};
pub use fock::{DeltaKind, FockError, GradedTensor};
pub use logic::{parse_formula, parse_sequent, Formula, Lexicon, Sequent};
pub use prover::{check_derivation, prove, Derivation, Rule, RuleData, SearchConfig};
pub use semantics::{compile, evaluate, SemanticsError, SpaceAssignment, Term, Truncation, WordTensorStore};
