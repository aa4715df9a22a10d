use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use super::DistribError;

/// Word vectors of one fixed dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: IndexMap<String, Vec<f64>>,
    source: String,
}

impl EmbeddingStore {
    pub fn new(dim: usize, source: &str) -> Self {
        EmbeddingStore {
            dim,
            vectors: IndexMap::new(),
            source: source.to_string(),
        }
    }

    pub fn insert(&mut self, word: &str, v: Vec<f64>) -> Result<(), DistribError> {
        if v.len() != self.dim {
            return Err(DistribError::DimMismatch {
                line: 0,
                expected: self.dim,
                found: v.len(),
            });
        }
        self.vectors.insert(word.to_string(), v);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Words of `words` without a vector, in first-seen order.
    pub fn missing<'a, I: IntoIterator<Item = &'a str>>(&self, words: I) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for w in words {
            if self.get(w).is_none() && !out.iter().any(|m| m == w) {
                out.push(w.to_string());
            }
        }
        out
    }

    /// word2vec text format: a `count dim` header, then `word v1 ... vd` lines.
    pub fn parse_word2vec(text: &str, source: &str) -> Result<Self, DistribError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(DistribError::Malformed { line: 1 })?;
        let mut head = header.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(count)), Some(Ok(dim)), None) = (head.next(), head.next(), head.next()) else {
            return Err(DistribError::Malformed { line: 1 });
        };
        let mut store = EmbeddingStore::new(dim, source);
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().ok_or(DistribError::Malformed { line: i + 1 })?;
            let v = parts
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| DistribError::Malformed { line: i + 1 })?;
            if v.len() != dim {
                return Err(DistribError::DimMismatch {
                    line: i + 1,
                    expected: dim,
                    found: v.len(),
                });
            }
            store.vectors.insert(word.to_string(), v);
        }
        if store.len() != count {
            return Err(DistribError::CountMismatch {
                declared: count,
                found: store.len(),
            });
        }
        Ok(store)
    }

    pub fn load_word2vec(path: impl AsRef<Path>) -> Result<Self, DistribError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| DistribError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_word2vec(&text, &path.display().to_string())
    }
}
