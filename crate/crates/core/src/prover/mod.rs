//! Backward-chaining proof search for the Lambek calculus with a relevant
//! modality, plus a checker for derivation trees.

mod derivation;
mod search;
pub mod worked;

pub use derivation::{
    check_derivation, check_with_path, count_rule, premises_of, CheckReport, Derivation, Plan, Rule, RuleData,
};
pub use search::{prove, ProveError, SearchConfig};
