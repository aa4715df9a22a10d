use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use thiserror::Error;

use super::formula::{parse_formula_with, AtomSet, Formula, ParseError};
use super::sequent::Sequent;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("lexicon line {line}: expected `word<TAB>formula`")]
    Malformed { line: usize },
    #[error("lexicon line {line}: {source}")]
    Formula { line: usize, source: ParseError },
    #[error("unknown word `{0}`")]
    UnknownWord(String),
}

/// Word to type assignments. A word may carry several types.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    atoms: AtomSet,
    entries: IndexMap<String, Vec<Formula>>,
}

impl Lexicon {
    pub fn new(atoms: AtomSet) -> Self {
        Lexicon {
            atoms,
            entries: IndexMap::new(),
        }
    }

    pub fn atoms(&self) -> &AtomSet {
        &self.atoms
    }

    pub fn insert(&mut self, word: &str, formula: Formula) {
        let slot = self.entries.entry(word.to_string()).or_default();
        if !slot.contains(&formula) {
            slot.push(formula);
        }
    }

    pub fn lookup(&self, word: &str) -> Result<&[Formula], LexiconError> {
        self.entries
            .get(word)
            .map(Vec::as_slice)
            .ok_or_else(|| LexiconError::UnknownWord(word.to_string()))
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, &[Formula])> {
        self.entries.iter().map(|(w, f)| (w.as_str(), f.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses the TSV form: `word<TAB>formula` per line; `#` starts a comment.
    pub fn parse(text: &str, atoms: AtomSet) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new(atoms);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (word, formula) = line
                .split_once('\t')
                .ok_or(LexiconError::Malformed { line: i + 1 })?;
            let word = word.trim();
            if word.is_empty() {
                return Err(LexiconError::Malformed { line: i + 1 });
            }
            let f = parse_formula_with(formula.trim(), &lex.atoms)
                .map_err(|source| LexiconError::Formula { line: i + 1, source })?;
            lex.insert(word, f);
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::load_with(path, AtomSet::default())
    }

    pub fn load_with(path: impl AsRef<Path>, atoms: AtomSet) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, atoms)
    }

    /// One sequent per choice of type for each word, in lexicon order
    /// (last word varies fastest).
    pub fn phrase_sequents<'a, S: AsRef<str>>(
        &'a self,
        words: &[S],
        goal: Formula,
    ) -> Result<PhraseSequents<'a>, LexiconError> {
        let choices = words
            .iter()
            .map(|w| self.lookup(w.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let done = choices.iter().any(|c| c.is_empty());
        Ok(PhraseSequents {
            cursor: vec![0; choices.len()],
            choices,
            goal,
            done,
        })
    }
}

/// Lazily enumerates the cartesian product of lexical choices.
pub struct PhraseSequents<'a> {
    choices: Vec<&'a [Formula]>,
    cursor: Vec<usize>,
    goal: Formula,
    done: bool,
}

impl Iterator for PhraseSequents<'_> {
    type Item = Sequent;

    fn next(&mut self) -> Option<Sequent> {
        if self.done {
            return None;
        }
        let antecedent = self
            .cursor
            .iter()
            .zip(&self.choices)
            .map(|(&i, c)| c[i].clone())
            .collect();
        let out = Sequent::new(antecedent, self.goal.clone());
        // odometer increment
        let mut k = self.cursor.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.cursor[k] += 1;
            if self.cursor[k] < self.choices[k].len() {
                break;
            }
            self.cursor[k] = 0;
        }
        Some(out)
    }
}

/// First sequent of `phrase_sequents`; convenient for unambiguous lexicons.
pub fn phrase_sequent<S: AsRef<str>>(
    lexicon: &Lexicon,
    words: &[S],
    goal: Formula,
) -> Result<Sequent, LexiconError> {
    Ok(lexicon
        .phrase_sequents(words, goal)?
        .next()
        .expect("every looked-up word has at least one type"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    const ANAPHORA: &str = "John\t!N\nsleeps\tN\\S\nsnores\tN\\S\nHe\t!N\\N\n";

    #[test]
    fn john_sleeps() {
        let lex = Lexicon::parse(ANAPHORA, AtomSet::default()).unwrap();
        let s = phrase_sequent(&lex, &["John", "sleeps"], parse_formula("S").unwrap()).unwrap();
        assert_eq!(s.to_string(), "!N, N\\S -> S");
    }

    #[test]
    fn unknown_word() {
        let lex = Lexicon::parse(ANAPHORA, AtomSet::default()).unwrap();
        let err = phrase_sequent(&lex, &["zzz"], parse_formula("S").unwrap()).unwrap_err();
        assert!(matches!(err, LexiconError::UnknownWord(w) if w == "zzz"));
    }

    #[test]
    fn empty_phrase() {
        let lex = Lexicon::parse(ANAPHORA, AtomSet::default()).unwrap();
        let words: [&str; 0] = [];
        let s = phrase_sequent(&lex, &words, parse_formula("S").unwrap()).unwrap();
        assert!(s.antecedent.is_empty());
    }

    #[test]
    fn ambiguous_words_enumerate() {
        let lex = Lexicon::parse("a\tN\na\t!N\nb\tN\\S\nb\t!N\\S\n", AtomSet::default()).unwrap();
        let all: Vec<_> = lex
            .phrase_sequents(&["a", "b"], parse_formula("S").unwrap())
            .unwrap()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            all,
            ["N, N\\S -> S", "N, !N\\S -> S", "!N, N\\S -> S", "!N, !N\\S -> S"]
        );
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            Lexicon::parse("John !N\n", AtomSet::default()),
            Err(LexiconError::Malformed { line: 1 })
        ));
        assert!(matches!(
            Lexicon::parse("# c\nJohn\t!Q\n", AtomSet::default()),
            Err(LexiconError::Formula { line: 2, .. })
        ));
    }
}
