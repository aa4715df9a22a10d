//! Turning command-line text into sequents.

use anyhow::{Context, Result};
use bangl::logic::{parse_formula_with, parse_sequent, Formula, Lexicon, Sequent};
use bangl::prover::worked;

use crate::LexiconArgs;

/// A sequent typed directly, or a phrase with its words.
pub struct Input {
    pub words: Option<Vec<String>>,
    pub typings: Vec<Sequent>,
}

pub fn is_sequent(text: &str) -> bool {
    text.contains("->")
}

/// The union of the example lexicons; words may have several types.
pub fn builtin_lexicon() -> Lexicon {
    let text = [
        worked::ANAPHORA_LEXICON,
        worked::ELLIPSIS_LEXICON,
        worked::COREFERENCE_LEXICON,
    ]
    .concat();
    Lexicon::parse(&text, Default::default()).expect("built-in lexicon parses")
}

pub fn lexicon(args: &LexiconArgs) -> Result<Lexicon> {
    match &args.lexicon {
        Some(p) => Lexicon::load(p).with_context(|| format!("loading lexicon {}", p.display())),
        None => Ok(builtin_lexicon()),
    }
}

/// Words of a phrase and its sentence count. A `.` token, or a trailing `.`
/// on a word, ends a sentence.
pub fn split_phrase(text: &str) -> (Vec<String>, usize) {
    let mut words = Vec::new();
    let mut sentences = 0;
    let mut open = false;
    for tok in text.split_whitespace() {
        let word = tok.trim_end_matches('.');
        if !word.is_empty() {
            words.push(word.to_string());
            open = true;
        }
        if tok.ends_with('.') && open {
            sentences += 1;
            open = false;
        }
    }
    if open {
        sentences += 1;
    }
    (words, sentences)
}

pub fn read(text: &str, args: &LexiconArgs) -> Result<Input> {
    if is_sequent(text) {
        let s = parse_sequent(text).context("parsing sequent")?;
        return Ok(Input {
            words: None,
            typings: vec![s],
        });
    }
    let lex = lexicon(args)?;
    let (words, sentences) = split_phrase(text);
    anyhow::ensure!(!words.is_empty(), "empty phrase");
    let goal = match &args.goal {
        Some(g) => parse_formula_with(g, lex.atoms()).context("parsing --goal")?,
        None => Formula::product_of(vec![Formula::atom("S"); sentences]).expect("at least one sentence"),
    };
    let typings = lex.phrase_sequents(&words, goal)?.collect();
    Ok(Input {
        words: Some(words),
        typings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentences_split_on_dots() {
        let (w, n) = split_phrase("John sleeps . He snores");
        assert_eq!((w.len(), n), (4, 2));
        let (w, n) = split_phrase("John sleeps. He snores.");
        assert_eq!(
            (w, n),
            (
                vec!["John".into(), "sleeps".into(), "He".into(), "snores".into()],
                2
            )
        );
        assert_eq!(split_phrase("John sleeps").1, 1);
    }

    #[test]
    fn builtin_words_have_all_types() {
        let lex = builtin_lexicon();
        assert_eq!(lex.lookup("John").unwrap().len(), 2);
        assert_eq!(lex.lookup("does-too").unwrap().len(), 2);
    }
}
