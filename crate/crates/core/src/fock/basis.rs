//! Wedge basis bookkeeping: binomials, colexicographic subset ranks and sign
//! normalization of wedge words.

/// Binomial coefficient. Panics if the result does not fit in `u128`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by i + 1
        acc = acc.checked_mul((n - i) as u128).expect("binomial overflow") / (i as u128 + 1);
    }
    acc
}

pub(crate) fn binom(n: usize, k: usize) -> usize {
    usize::try_from(binomial(n, k)).expect("layer too large to store")
}

/// Dimension of the Fock space over an `n`-dimensional space truncated at
/// layer `max_layer`: the sum of `C(n, k)` for `k <= max_layer`.
pub fn fock_dim(n: usize, max_layer: usize) -> u128 {
    (0..=max_layer.min(n)).map(|k| binomial(n, k)).sum()
}

/// A strictly increasing set of basis labels, naming `e_{i1} ^ ... ^ e_{ik}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WedgeBasisIndex(Vec<usize>);

impl WedgeBasisIndex {
    pub fn new(labels: Vec<usize>) -> Option<Self> {
        labels
            .windows(2)
            .all(|w| w[0] < w[1])
            .then_some(WedgeBasisIndex(labels))
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn layer(&self) -> usize {
        self.0.len()
    }

    /// Position within its layer, in colexicographic order.
    pub fn rank(&self) -> usize {
        self.0.iter().enumerate().map(|(j, &i)| binom(i, j + 1)).sum()
    }

    pub fn unrank(layer: usize, mut rank: usize) -> Self {
        let mut labels = vec![0; layer];
        for j in (1..=layer).rev() {
            // largest c with C(c, j) <= rank
            let mut c = j - 1;
            while binom(c + 1, j) <= rank {
                c += 1;
            }
            labels[j - 1] = c;
            rank -= binom(c, j);
        }
        WedgeBasisIndex(labels)
    }
}

/// Sorts a wedge word, returning the sign of the sorting permutation and the
/// canonical index. A repeated label gives sign 0 and the empty index.
pub fn wedge_normalize(labels: &[usize]) -> (i8, WedgeBasisIndex) {
    let mut sorted = labels.to_vec();
    let mut sign = 1i8;
    // insertion sort, counting transpositions
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            sorted.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return (0, WedgeBasisIndex::default());
    }
    (sign, WedgeBasisIndex(sorted))
}

/// All `k`-subsets of `0..n` in rank order.
pub(crate) fn layer_basis(n: usize, k: usize) -> Vec<WedgeBasisIndex> {
    (0..binom(n, k)).map(|r| WedgeBasisIndex::unrank(k, r)).collect()
}
