//! Tensor semantics: formulas denote spaces, derivations compile to string
//! diagram terms, and terms evaluate against word tensors with a chosen
//! copying map.

mod compile;
mod eval;
mod shape;
mod store;
mod term;

use thiserror::Error;

use crate::fock::FockError;

pub use compile::compile;
pub use eval::evaluate;
pub use shape::{interpret_formula, Factor, Shape, SpaceAssignment, Truncation};
pub use store::{WordTensor, WordTensorStore};
pub use term::{Term, TermStats};

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("atom `{0}` has no assigned space (expected N or S)")]
    UnknownAtom(String),
    #[error("space dimensions must be positive")]
    ZeroDimension,
    #[error("full Fock space over dim {dim} exceeds the cap of {cap} basis vectors")]
    CapExceeded { dim: usize, cap: usize },
    #[error("derivation does not check")]
    IllFormed,
    #[error("wires do not match: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("expected {expected} inputs, got {found}")]
    InputCount { expected: usize, found: usize },
    #[error("input {slot} of shape {shape} needs {expected} components, got {found}")]
    InputShape {
        slot: usize,
        shape: String,
        expected: usize,
        found: usize,
    },
    #[error("{0} is not a single Fock wire")]
    NotFock(String),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("no tensor for `{0}`")]
    UnknownWord(String),
    #[error("tensor for `{word}` needs {raw} (layer-1 form) or {full} components, got {found}")]
    TensorLength {
        word: String,
        raw: usize,
        full: usize,
        found: usize,
    },
    #[error("`{0}` is not of the form (!X)\\X")]
    NotProjection(String),
    #[error("tensor file line {line}: expected `word<TAB>formula<TAB>floats`")]
    Malformed { line: usize },
    #[error("tensor file line {line}: {message}")]
    FormulaSyntax { line: usize, message: String },
    #[error("failed to read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DeltaKind, DEFAULT_FULLDUAL_CAP};
    use crate::logic::parse_sequent;
    use crate::prover::{prove, worked, SearchConfig};

    #[test]
    fn anaphora_term_structure() {
        let t = compile(&worked::anaphora(), &SpaceAssignment::default()).unwrap();
        let s = t.stats();
        assert_eq!((s.deltas, s.swaps, s.eps, s.cups), (1, 1, 1, 3));
        assert!(t.to_string().starts_with("(seq (par (delta F[N])"), "{t}");
    }

    #[test]
    fn strict_and_sloppy_copy_counts() {
        let sa = SpaceAssignment::default();
        assert_eq!(compile(&worked::strict_reading(), &sa).unwrap().stats().deltas, 2);
        assert_eq!(compile(&worked::sloppy_reading(), &sa).unwrap().stats().deltas, 4);
    }

    #[test]
    fn single_application() {
        let s = parse_sequent("N, N\\S -> S").unwrap();
        let d = &prove(&s, &SearchConfig::default()).unwrap()[0];
        let t = compile(d, &SpaceAssignment::new(2, 3)).unwrap();
        assert_eq!(t.stats().cups, 1);
        // sleeps[n][s], argument first
        let m = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let out = evaluate(
            &t,
            &[vec![1.0, -1.0], m],
            DeltaKind::BasisCopyB,
            DEFAULT_FULLDUAL_CAP,
        )
        .unwrap();
        assert_eq!(out, [-3.0, -3.0, -3.0]);
    }

    #[test]
    fn identity_term() {
        let s = parse_sequent("N -> N").unwrap();
        let d = &prove(&s, &SearchConfig::default()).unwrap()[0];
        let t = compile(d, &SpaceAssignment::default()).unwrap();
        let out = evaluate(
            &t,
            &[vec![3.0, 4.0]],
            DeltaKind::KExtension(1.0),
            DEFAULT_FULLDUAL_CAP,
        )
        .unwrap();
        assert_eq!(out, [3.0, 4.0]);
    }

    #[test]
    fn curried_identity() {
        // -> N\N is the identity matrix
        let s = parse_sequent(" -> N\\N").unwrap();
        let d = &prove(&s, &SearchConfig::default()).unwrap()[0];
        let t = compile(d, &SpaceAssignment::default()).unwrap();
        let out = evaluate(&t, &[], DeltaKind::KExtension(1.0), DEFAULT_FULLDUAL_CAP).unwrap();
        assert_eq!(out, [1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn wrong_inputs_are_rejected() {
        let t = compile(&worked::anaphora(), &SpaceAssignment::default()).unwrap();
        assert!(matches!(
            evaluate(&t, &[vec![0.0; 3]], DeltaKind::BasisCopyA, DEFAULT_FULLDUAL_CAP),
            Err(SemanticsError::InputCount {
                expected: 4,
                found: 1
            })
        ));
        let bad = vec![vec![0.0; 2], vec![0.0; 4], vec![0.0; 6], vec![0.0; 4]];
        assert!(matches!(
            evaluate(&t, &bad, DeltaKind::BasisCopyA, DEFAULT_FULLDUAL_CAP),
            Err(SemanticsError::InputShape { slot: 0, .. })
        ));
    }
}
