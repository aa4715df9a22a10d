use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::basis::{binom, layer_basis, wedge_normalize, WedgeBasisIndex};
use super::FockError;

/// A vector of the Fock space over `R^dim`, truncated at `max_layer`.
/// Layer `k` holds `C(dim, k)` components in colexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedTensor {
    dim: usize,
    max_layer: usize,
    layers: Vec<Vec<f64>>,
}

impl GradedTensor {
    pub fn zero(dim: usize, max_layer: usize) -> Self {
        let max_layer = max_layer.min(dim);
        GradedTensor {
            dim,
            max_layer,
            layers: (0..=max_layer).map(|k| vec![0.0; binom(dim, k)]).collect(),
        }
    }

    /// The layer-0 vector `(1, 0, 0, ...)`.
    pub fn unit(dim: usize, max_layer: usize) -> Self {
        let mut t = Self::zero(dim, max_layer);
        t.layers[0][0] = 1.0;
        t
    }

    pub fn basis(dim: usize, max_layer: usize, index: &WedgeBasisIndex) -> Self {
        let mut t = Self::zero(dim, max_layer);
        t.layers[index.layer()][index.rank()] = 1.0;
        t
    }

    /// `(0, w, 0, ...)`, truncated at layer 1.
    pub fn embed_layer1(w: &[f64]) -> Self {
        Self::embed_layer1_in(w, 1)
    }

    pub fn embed_layer1_in(w: &[f64], max_layer: usize) -> Self {
        let mut t = Self::zero(w.len(), max_layer.max(1));
        t.layers[1].copy_from_slice(w);
        t
    }

    pub fn from_layers(dim: usize, layers: Vec<Vec<f64>>) -> Result<Self, FockError> {
        if layers.is_empty() || layers.len() > dim + 1 {
            return Err(FockError::Layout { dim });
        }
        for (k, l) in layers.iter().enumerate() {
            if l.len() != binom(dim, k) {
                return Err(FockError::Layout { dim });
            }
        }
        Ok(GradedTensor {
            dim,
            max_layer: layers.len() - 1,
            layers,
        })
    }

    /// Layers concatenated in order, as produced by [`GradedTensor::flat`].
    pub fn from_flat(dim: usize, max_layer: usize, flat: &[f64]) -> Result<Self, FockError> {
        let mut t = Self::zero(dim, max_layer);
        if flat.len() != t.total_dim() {
            return Err(FockError::Layout { dim });
        }
        let mut at = 0;
        for l in &mut t.layers {
            let len = l.len();
            l.copy_from_slice(&flat[at..at + len]);
            at += len;
        }
        Ok(t)
    }

    /// Independent standard normal components on every stored layer.
    pub fn random<R: Rng + ?Sized>(dim: usize, max_layer: usize, rng: &mut R) -> Self {
        let mut t = Self::zero(dim, max_layer);
        for l in &mut t.layers {
            for x in l.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_layer(&self) -> usize {
        self.max_layer
    }

    pub fn layer(&self, k: usize) -> &[f64] {
        self.layers.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn layer_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.layers[k]
    }

    pub fn total_dim(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.layers.concat()
    }

    pub fn get(&self, index: &WedgeBasisIndex) -> f64 {
        self.layers.get(index.layer()).map_or(0.0, |l| l[index.rank()])
    }

    /// True when every layer other than 1 is zero.
    pub fn is_layer1(&self) -> bool {
        self.layers
            .iter()
            .enumerate()
            .all(|(k, l)| k == 1 || l.iter().all(|&x| x == 0.0))
    }

    /// Same vector with a different truncation; dropped layers are discarded.
    pub fn with_max_layer(&self, max_layer: usize) -> Self {
        let mut t = Self::zero(self.dim, max_layer);
        for (dst, src) in t.layers.iter_mut().zip(&self.layers) {
            dst.copy_from_slice(src);
        }
        t
    }

    fn check_same(&self, other: &Self) -> Result<(), FockError> {
        if self.dim != other.dim {
            return Err(FockError::SpaceMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// `self + alpha * other`, over the larger truncation.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self, FockError> {
        self.check_same(other)?;
        let mut out = self.with_max_layer(self.max_layer.max(other.max_layer));
        for (dst, src) in out.layers.iter_mut().zip(&other.layers) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for x in out.layers.iter_mut().flatten() {
            *x *= alpha;
        }
        out
    }

    pub fn inner(&self, other: &Self) -> Result<f64, FockError> {
        self.check_same(other)?;
        Ok(self
            .layers
            .iter()
            .zip(&other.layers)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| x * y)
            .sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, FockError> {
        let d = self.axpy(-1.0, other)?;
        Ok(d.layers.iter().flatten().fold(0.0, |m, x| m.max(x.abs())))
    }
}

impl fmt::Display for GradedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.layers.iter().enumerate() {
            let parts: Vec<String> = l.iter().map(|x| format!("{x}")).collect();
            writeln!(f, "layer {k}: [{}]", parts.join(", "))?;
        }
        Ok(())
    }
}

/// The alternating product `m`. Bilinear; on basis elements it concatenates
/// the wedge words and normalizes.
pub fn fock_mult(u: &GradedTensor, w: &GradedTensor) -> Result<GradedTensor, FockError> {
    u.check_same(w)?;
    let n = u.dim;
    let mut out = GradedTensor::zero(n, (u.max_layer + w.max_layer).min(n));
    for (a, ul) in u.layers.iter().enumerate() {
        if ul.iter().all(|&x| x == 0.0) {
            continue;
        }
        let left = layer_basis(n, a);
        for (b, wl) in w.layers.iter().enumerate() {
            if a + b > n || wl.iter().all(|&x| x == 0.0) {
                continue;
            }
            let right = layer_basis(n, b);
            for (x, &cx) in left.iter().zip(ul) {
                if cx == 0.0 {
                    continue;
                }
                for (y, &cy) in right.iter().zip(wl) {
                    if cy == 0.0 {
                        continue;
                    }
                    let word: Vec<usize> = x.labels().iter().chain(y.labels()).copied().collect();
                    let (sign, z) = wedge_normalize(&word);
                    if sign != 0 {
                        out.layers[a + b][z.rank()] += f64::from(sign) * cx * cy;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The counit: projection onto layer 1.
pub fn counit_eps(v: &GradedTensor) -> Vec<f64> {
    if v.max_layer >= 1 {
        v.layers[1].clone()
    } else {
        vec![0.0; v.dim]
    }
}

/// A Fock vector placed in layer 1 of the Fock space over itself, i.e.
/// `(0, v, 0, ...)` one level up. Only the layer-1 slot is ever populated.
#[derive(Debug, Clone, PartialEq)]
pub struct Included(pub GradedTensor);

/// The comonad map `delta`: inclusion into the first layer.
pub fn delta_inclusion(v: &GradedTensor) -> Included {
    Included(v.clone())
}

impl Included {
    /// Counit at the outer level.
    pub fn counit(&self) -> GradedTensor {
        self.0.clone()
    }
}
