//! Types, sequents and lexicons.

mod formula;
mod lexicon;
mod sequent;

pub use formula::{format_formula, parse_formula, parse_formula_with, AtomSet, Formula, ParseError};
pub use lexicon::{phrase_sequent, Lexicon, LexiconError, PhraseSequents};
pub use sequent::{parse_sequent, parse_sequent_with, Sequent};
