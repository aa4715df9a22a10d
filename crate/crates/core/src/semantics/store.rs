use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::logic::{parse_formula, Formula, Lexicon, Sequent};

use super::shape::{interpret_formula, Shape, SpaceAssignment};
use super::SemanticsError;

/// A word's tensor, stored over the full space of its type.
#[derive(Debug, Clone, PartialEq)]
pub struct WordTensor {
    pub formula: Formula,
    pub shape: Shape,
    pub data: Vec<f64>,
}

/// Word meanings. A word may hold one tensor per type.
#[derive(Debug, Clone)]
pub struct WordTensorStore {
    space: SpaceAssignment,
    entries: IndexMap<String, Vec<WordTensor>>,
}

impl WordTensorStore {
    pub fn new(space: SpaceAssignment) -> Self {
        WordTensorStore {
            space,
            entries: IndexMap::new(),
        }
    }

    pub fn space(&self) -> &SpaceAssignment {
        &self.space
    }

    /// Accepts either the full tensor or its layer-1 form (each Fock factor
    /// replaced by its inner space), which is lifted.
    pub fn insert(&mut self, word: &str, formula: Formula, data: Vec<f64>) -> Result<(), SemanticsError> {
        let shape = interpret_formula(&formula, &self.space)?;
        let data = if data.len() == shape.dim() {
            data
        } else if data.len() == shape.raw_dim() {
            shape.lift(&data)
        } else {
            return Err(SemanticsError::TensorLength {
                word: word.to_string(),
                raw: shape.raw_dim(),
                full: shape.dim(),
                found: data.len(),
            });
        };
        let slot = self.entries.entry(word.to_string()).or_default();
        slot.retain(|t| t.formula != formula);
        slot.push(WordTensor { formula, shape, data });
        Ok(())
    }

    pub fn get(&self, word: &str, formula: &Formula) -> Result<&WordTensor, SemanticsError> {
        self.entries
            .get(word)
            .and_then(|ts| ts.iter().find(|t| &t.formula == formula))
            .ok_or_else(|| SemanticsError::UnknownWord(format!("{word} : {formula}")))
    }

    pub fn contains(&self, word: &str, formula: &Formula) -> bool {
        self.get(word, formula).is_ok()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Input tensors for a phrase whose words were typed as `sequent`'s
    /// antecedent, in order.
    pub fn inputs<S: AsRef<str>>(
        &self,
        words: &[S],
        sequent: &Sequent,
    ) -> Result<Vec<Vec<f64>>, SemanticsError> {
        if words.len() != sequent.antecedent.len() {
            return Err(SemanticsError::InputCount {
                expected: sequent.antecedent.len(),
                found: words.len(),
            });
        }
        words
            .iter()
            .zip(&sequent.antecedent)
            .map(|(w, f)| Ok(self.get(w.as_ref(), f)?.data.clone()))
            .collect()
    }

    /// Standard normal entries in layer-1 form for every typing in the
    /// lexicon, except entries already present.
    pub fn fill_random<R: Rng + ?Sized>(
        &mut self,
        lexicon: &Lexicon,
        rng: &mut R,
    ) -> Result<(), SemanticsError> {
        for (word, formulas) in lexicon.words() {
            for f in formulas {
                if self.contains(word, f) {
                    continue;
                }
                let shape = interpret_formula(f, &self.space)?;
                let raw: Vec<f64> = (0..shape.raw_dim()).map(|_| rng.sample(StandardNormal)).collect();
                self.insert(word, f.clone(), raw)?;
            }
        }
        Ok(())
    }

    /// For a type `(!X)\X`, the tensor sending the layer-1 copy of `x` to
    /// `x`: a projection like the counit.
    pub fn insert_projection(&mut self, word: &str, formula: Formula) -> Result<(), SemanticsError> {
        let data = projection(&formula, &self.space)?;
        self.insert(word, formula, data)
    }

    /// Parses `word<TAB>formula<TAB>floats`; `#` starts a comment line.
    pub fn parse(text: &str, space: SpaceAssignment) -> Result<Self, SemanticsError> {
        let mut store = WordTensorStore::new(space);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(word), Some(formula), Some(values), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(SemanticsError::Malformed { line: i + 1 });
            };
            let formula = parse_formula(formula.trim()).map_err(|e| SemanticsError::FormulaSyntax {
                line: i + 1,
                message: e.to_string(),
            })?;
            let data = values
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| SemanticsError::Malformed { line: i + 1 })?;
            store.insert(word.trim(), formula, data)?;
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>, space: SpaceAssignment) -> Result<Self, SemanticsError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| SemanticsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, space)
    }
}

fn projection(formula: &Formula, sa: &SpaceAssignment) -> Result<Vec<f64>, SemanticsError> {
    let not_projection = || SemanticsError::NotProjection(formula.to_string());
    let Formula::Under(arg, res) = formula else {
        return Err(not_projection());
    };
    if arg.bang_inner() != Some(&**res) {
        return Err(not_projection());
    }
    let fock = interpret_formula(arg, sa)?;
    let d = interpret_formula(res, sa)?.dim();
    let mut data = vec![0.0; fock.dim() * d];
    for i in 0..d {
        // layer 1 starts right after the layer-0 slot
        data[(1 + i) * d + i] = 1.0;
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::AtomSet;

    #[test]
    fn raw_and_full_forms() {
        let sa = SpaceAssignment::new(2, 2);
        let mut store = WordTensorStore::new(sa);
        let john = parse_formula("!N").unwrap();
        store.insert("John", john.clone(), vec![1.0, 2.0]).unwrap();
        assert_eq!(store.get("John", &john).unwrap().data, [0.0, 1.0, 2.0]);
        store.insert("John", john.clone(), vec![9.0, 1.0, 2.0]).unwrap();
        assert_eq!(store.get("John", &john).unwrap().data, [9.0, 1.0, 2.0]);
        assert_eq!(store.len(), 1);
        let err = store.insert("John", john, vec![1.0]).unwrap_err();
        assert!(matches!(
            err,
            SemanticsError::TensorLength {
                raw: 2,
                full: 3,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn file_format() {
        let text = "# words\nJohn\t!N\t1 2\nsleeps\tN\\S\t1 0 0 1\n";
        let store = WordTensorStore::parse(text, SpaceAssignment::default()).unwrap();
        assert_eq!(store.len(), 2);
        assert!(matches!(
            WordTensorStore::parse("John\t!N\n", SpaceAssignment::default()),
            Err(SemanticsError::Malformed { line: 1 })
        ));
        assert!(matches!(
            WordTensorStore::parse("John\t!N\t1 x\n", SpaceAssignment::default()),
            Err(SemanticsError::Malformed { line: 1 })
        ));
    }

    #[test]
    fn random_fill_covers_lexicon() {
        use rand::SeedableRng;
        let lex = Lexicon::parse("John\t!N\nsleeps\tN\\S\n", AtomSet::default()).unwrap();
        let mut store = WordTensorStore::new(SpaceAssignment::default());
        store
            .fill_random(&lex, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        let john = store.get("John", &parse_formula("!N").unwrap()).unwrap();
        assert_eq!(john.data[0], 0.0);
        assert_eq!(store.len(), 2);
    }

    #[test]
    fn projection_tensor() {
        let sa = SpaceAssignment::new(2, 2);
        let p = projection(&parse_formula("(!N)\\N").unwrap(), &sa).unwrap();
        assert_eq!(p, [0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert!(projection(&parse_formula("N\\S").unwrap(), &sa).is_err());
    }
}
