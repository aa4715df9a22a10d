use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DistribError;

/// A verb as a `d x d` matrix, row-major, rows indexed by subject features.
#[derive(Debug, Clone, PartialEq)]
pub struct VerbMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl VerbMatrix {
    /// `M x v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, DistribError> {
        check_dims(self.dim, v.len())?;
        Ok(self
            .data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<(), DistribError> {
    if expected != found {
        return Err(DistribError::DimMismatch {
            line: 0,
            expected,
            found,
        });
    }
    Ok(())
}

/// The relational verb: the sum of `subject (x) object` over the pairs.
pub fn relational_verb<'a, I>(pairs: I) -> Result<VerbMatrix, DistribError>
where
    I: IntoIterator<Item = (&'a [f64], &'a [f64])>,
{
    let mut out: Option<VerbMatrix> = None;
    for (s, o) in pairs {
        check_dims(s.len(), o.len())?;
        let m = out.get_or_insert_with(|| VerbMatrix {
            dim: s.len(),
            data: vec![0.0; s.len() * s.len()],
        });
        check_dims(m.dim, s.len())?;
        for (i, &si) in s.iter().enumerate() {
            for (j, &oj) in o.iter().enumerate() {
                m.data[i * m.dim + j] += si * oj;
            }
        }
    }
    out.ok_or(DistribError::NoPairs)
}

/// Copy-object composition: `(V x obj) . sub`.
pub fn compose_transitive(verb: &VerbMatrix, sub: &[f64], obj: &[f64]) -> Result<Vec<f64>, DistribError> {
    check_dims(verb.dim, sub.len())?;
    Ok(hadamard(&verb.apply(obj)?, sub))
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Sentence composition models for `sub1 verb obj and sub2 does too`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Two genuine copies of the verb phrase.
    Full,
    /// `k`-extension copying.
    KExt(f64),
    /// Basis copy with coefficients gathered on the left copy.
    CopyA,
    /// Basis copy with coefficients gathered on the right copy.
    CopyB,
    /// Sum of the sentence's content word vectors.
    Additive,
    /// The verb's word vector alone.
    VerbOnly,
}

impl ModelKind {
    /// The six models in report order.
    pub fn all() -> Vec<ModelKind> {
        vec![
            ModelKind::Full,
            ModelKind::CopyA,
            ModelKind::CopyB,
            ModelKind::KExt(1.0),
            ModelKind::VerbOnly,
            ModelKind::Additive,
        ]
    }

    pub fn needs_matrix(self) -> bool {
        !matches!(self, ModelKind::Additive | ModelKind::VerbOnly)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Full => f.write_str("full"),
            ModelKind::KExt(k) if *k == 1.0 => f.write_str("k-extension"),
            ModelKind::KExt(k) => write!(f, "k-extension:{k}"),
            ModelKind::CopyA => f.write_str("copy-a"),
            ModelKind::CopyB => f.write_str("copy-b"),
            ModelKind::Additive => f.write_str("additive"),
            ModelKind::VerbOnly => f.write_str("verb-only"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = DistribError;

    fn from_str(s: &str) -> Result<Self, DistribError> {
        let bad = || DistribError::UnknownModel(s.to_string());
        Ok(match s {
            "full" => ModelKind::Full,
            "k-extension" => ModelKind::KExt(1.0),
            "copy-a" => ModelKind::CopyA,
            "copy-b" => ModelKind::CopyB,
            "additive" => ModelKind::Additive,
            "verb-only" => ModelKind::VerbOnly,
            _ => {
                let k = s.strip_prefix("k-extension:").ok_or_else(bad)?;
                ModelKind::KExt(k.parse().map_err(|_| bad())?)
            }
        })
    }
}

/// The word meanings of one elliptical sentence.
#[derive(Debug, Clone, Copy)]
pub struct Sentence<'a> {
    /// Needed by every model except the baselines.
    pub verb: Option<&'a VerbMatrix>,
    pub verb_vector: &'a [f64],
    pub sub1: &'a [f64],
    pub obj: &'a [f64],
    pub sub2: &'a [f64],
}

/// Sentence vector under `kind`. "and" is addition, "does too" the identity.
pub fn compose_ellipsis(kind: ModelKind, s: &Sentence<'_>) -> Result<Vec<f64>, DistribError> {
    let d = s.sub1.len();
    for v in [s.verb_vector, s.obj, s.sub2] {
        check_dims(d, v.len())?;
    }
    let vp = || s.verb.ok_or(DistribError::NoMatrix)?.apply(s.obj);
    Ok(match kind {
        ModelKind::Full => {
            let vp = vp()?;
            add(&hadamard(&vp, s.sub1), &hadamard(&vp, s.sub2))
        }
        ModelKind::KExt(k) => {
            // (VP . sub1 + k . sub2) + (k . sub1 + VP . sub2)
            let vp = vp()?;
            let kv = vec![k; d];
            let left = add(&hadamard(&vp, s.sub1), &hadamard(&kv, s.sub2));
            let right = add(&hadamard(&kv, s.sub1), &hadamard(&vp, s.sub2));
            add(&left, &right)
        }
        ModelKind::CopyA => add(&hadamard(&vp()?, s.sub1), s.sub2),
        ModelKind::CopyB => add(s.sub1, &hadamard(&vp()?, s.sub2)),
        ModelKind::Additive => add(&add(&add(s.sub1, s.verb_vector), s.obj), s.sub2),
        ModelKind::VerbOnly => s.verb_vector.to_vec(),
    })
}
