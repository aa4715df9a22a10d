use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::basis::{layer_basis, wedge_normalize};
use super::tensor::GradedTensor;
use super::FockError;

/// Largest full Fock dimension `2^n` for which the dual comultiplication is
/// materialized.
pub const DEFAULT_FULLDUAL_CAP: usize = 4096;

/// Which comultiplication interprets contraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeltaKind {
    /// Adjoint of the alternating product; needs the full representation.
    FullDual,
    /// `v -> v (x) k + k (x) v` with `k` the constant layer-1 vector.
    KExtension(f64),
    /// `e_i -> e_i (x) e_i`, extended linearly.
    BasisCopyRaw,
    /// Coefficients gathered on the left: `v -> v (x) 1`.
    BasisCopyA,
    /// Coefficients gathered on the right: `v -> 1 (x) v`.
    BasisCopyB,
}

impl DeltaKind {
    pub fn needs_layer1(self) -> bool {
        !matches!(self, DeltaKind::FullDual)
    }
}

impl fmt::Display for DeltaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaKind::FullDual => f.write_str("full-dual"),
            DeltaKind::KExtension(k) if *k == 1.0 => f.write_str("k-extension"),
            DeltaKind::KExtension(k) => write!(f, "k-extension:{k}"),
            DeltaKind::BasisCopyRaw => f.write_str("basis-copy"),
            DeltaKind::BasisCopyA => f.write_str("basis-copy-a"),
            DeltaKind::BasisCopyB => f.write_str("basis-copy-b"),
        }
    }
}

impl FromStr for DeltaKind {
    type Err = FockError;

    fn from_str(s: &str) -> Result<Self, FockError> {
        let bad = || FockError::UnknownKind(s.to_string());
        Ok(match s {
            "full-dual" => DeltaKind::FullDual,
            "k-extension" => DeltaKind::KExtension(1.0),
            "basis-copy" => DeltaKind::BasisCopyRaw,
            "basis-copy-a" => DeltaKind::BasisCopyA,
            "basis-copy-b" => DeltaKind::BasisCopyB,
            _ => {
                let k = s.strip_prefix("k-extension:").ok_or_else(bad)?;
                DeltaKind::KExtension(k.parse().map_err(|_| bad())?)
            }
        })
    }
}

/// A formal sum of pure tensors `l (x) r`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorSum {
    pub terms: Vec<(GradedTensor, GradedTensor)>,
}

impl TensorSum {
    /// Row-major outer product matrix over the flat layouts of both factors.
    pub fn to_dense(&self) -> Vec<f64> {
        let Some((l0, r0)) = self.terms.first() else {
            return Vec::new();
        };
        let (rows, cols) = (l0.total_dim(), r0.total_dim());
        let mut out = vec![0.0; rows * cols];
        for (l, r) in &self.terms {
            outer_into(&mut out, &l.flat(), &r.flat());
        }
        out
    }

    /// The `(left layer, right layer)` block of [`TensorSum::to_dense`].
    pub fn block(&self, left_layer: usize, right_layer: usize) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for (l, r) in &self.terms {
            let (a, b) = (l.layer(left_layer), r.layer(right_layer));
            if out.is_empty() {
                out = vec![0.0; a.len() * b.len()];
            }
            outer_into(&mut out, a, b);
        }
        out
    }

    /// `<self, x (x) y>`.
    pub fn pairing(&self, x: &GradedTensor, y: &GradedTensor) -> Result<f64, FockError> {
        let mut acc = 0.0;
        for (l, r) in &self.terms {
            acc += l.inner(x)? * r.inner(y)?;
        }
        Ok(acc)
    }
}

fn outer_into(out: &mut [f64], a: &[f64], b: &[f64]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i * b.len() + j] += x * y;
        }
    }
}

/// The adjoint of [`super::fock_mult`] under the standard inner product:
/// `<D(v), x (x) y> = <v, m(x, y)>` on basis vectors. Returned as one term
/// per left basis vector.
pub fn fock_comult_full(v: &GradedTensor, cap: usize) -> Result<TensorSum, FockError> {
    let n = v.dim();
    if v.max_layer() < n {
        return Err(FockError::NotFull {
            dim: n,
            max_layer: v.max_layer(),
        });
    }
    if n >= usize::BITS as usize - 1 || (1usize << n) > cap {
        return Err(FockError::CapExceeded { dim: n, cap });
    }
    let basis: Vec<_> = (0..=n).flat_map(|k| layer_basis(n, k)).collect();
    let mut terms = Vec::new();
    for x in &basis {
        let mut row = GradedTensor::zero(n, n);
        let mut any = false;
        for y in &basis {
            if x.layer() + y.layer() > n {
                continue;
            }
            let word: Vec<usize> = x.labels().iter().chain(y.labels()).copied().collect();
            let (sign, z) = wedge_normalize(&word);
            let c = v.get(&z);
            if sign != 0 && c != 0.0 {
                row.layer_mut(y.layer())[y.rank()] = f64::from(sign) * c;
                any = true;
            }
        }
        if any {
            terms.push((GradedTensor::basis(n, n, x), row));
        }
    }
    Ok(TensorSum { terms })
}

/// Applies a comultiplication, keeping the result as a formal sum.
pub fn delta_apply(kind: DeltaKind, v: &GradedTensor, cap: usize) -> Result<TensorSum, FockError> {
    if kind.needs_layer1() && !v.is_layer1() {
        return Err(FockError::NotLayer1);
    }
    let n = v.dim();
    let constant = |c: f64| GradedTensor::embed_layer1_in(&vec![c; n], v.max_layer());
    let terms = match kind {
        DeltaKind::FullDual => return fock_comult_full(v, cap),
        DeltaKind::KExtension(k) => vec![(v.clone(), constant(k)), (constant(k), v.clone())],
        DeltaKind::BasisCopyRaw => v
            .layer(1)
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let e = GradedTensor::embed_layer1_in(&e, v.max_layer());
                (e.scale(c), e)
            })
            .collect(),
        DeltaKind::BasisCopyA => vec![(v.clone(), constant(1.0))],
        DeltaKind::BasisCopyB => vec![(constant(1.0), v.clone())],
    };
    Ok(TensorSum { terms })
}
