//! Fermionic Fock spaces over `R^n`: graded vectors, the alternating product,
//! its dual comultiplication, the counit and the practical copying maps.

mod basis;
mod delta;
mod tensor;

use thiserror::Error;

pub use basis::{binomial, fock_dim, wedge_normalize, WedgeBasisIndex};
pub use delta::{delta_apply, fock_comult_full, DeltaKind, TensorSum, DEFAULT_FULLDUAL_CAP};
pub use tensor::{counit_eps, delta_inclusion, fock_mult, GradedTensor, Included};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("vectors live over different spaces (dim {left} vs {right})")]
    SpaceMismatch { left: usize, right: usize },
    #[error("full Fock space over dim {dim} exceeds the cap of {cap} basis vectors")]
    CapExceeded { dim: usize, cap: usize },
    #[error("full dual needs all layers, got max layer {max_layer} over dim {dim}")]
    NotFull { dim: usize, max_layer: usize },
    #[error("copying map needs a layer-1 vector")]
    NotLayer1,
    #[error("component layout does not match dim {dim}")]
    Layout { dim: usize },
    #[error("unknown delta kind `{0}`")]
    UnknownKind(String),
}
