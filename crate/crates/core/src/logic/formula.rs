use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A type of the calculus.
///
/// Both implications store their operands in reading order: `Under(a, b)` is
/// `a\b` and `Over(b, a)` is `b/a`. Children are shared, so cloning a formula
/// is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Atom(Arc<str>),
    /// `left/right`: looks for `right` on its right, yields `left`.
    Over(Arc<Formula>, Arc<Formula>),
    /// `left\right`: looks for `left` on its left, yields `right`.
    Under(Arc<Formula>, Arc<Formula>),
    Bang(Arc<Formula>),
    Product(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn over(result: Formula, argument: Formula) -> Formula {
        Formula::Over(Arc::new(result), Arc::new(argument))
    }

    pub fn under(argument: Formula, result: Formula) -> Formula {
        Formula::Under(Arc::new(argument), Arc::new(result))
    }

    pub fn bang(inner: Formula) -> Formula {
        Formula::Bang(Arc::new(inner))
    }

    pub fn product(left: Formula, right: Formula) -> Formula {
        Formula::Product(Arc::new(left), Arc::new(right))
    }

    /// Right-nested product of a non-empty list.
    pub fn product_of(mut parts: Vec<Formula>) -> Option<Formula> {
        let mut acc = parts.pop()?;
        while let Some(f) = parts.pop() {
            acc = Formula::product(f, acc);
        }
        Some(acc)
    }

    pub fn is_bang(&self) -> bool {
        matches!(self, Formula::Bang(_))
    }

    pub fn bang_inner(&self) -> Option<&Formula> {
        match self {
            Formula::Bang(a) => Some(a),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Bang(a) => 1 + a.depth(),
            Formula::Over(a, b) | Formula::Under(a, b) | Formula::Product(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Bang(a) => a.atoms(out),
            Formula::Over(a, b) | Formula::Under(a, b) | Formula::Product(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, paren_slash: bool) -> fmt::Result {
        let needs = match self {
            Formula::Product(..) => true,
            Formula::Over(..) | Formula::Under(..) => paren_slash,
            _ => false,
        };
        if needs {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => f.write_str(a),
            Formula::Bang(a) => {
                f.write_str("!")?;
                a.fmt_operand(f, true)
            }
            Formula::Under(a, b) => {
                a.fmt_operand(f, true)?;
                f.write_str("\\")?;
                b.fmt_operand(f, true)
            }
            Formula::Over(b, a) => {
                b.fmt_operand(f, true)?;
                f.write_str("/")?;
                a.fmt_operand(f, true)
            }
            Formula::Product(a, b) => {
                a.fmt_operand(f, false)?;
                f.write_str(",")?;
                write!(f, "{b}")
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Minimal-parenthesis text form; `parse_formula` inverts it.
pub fn format_formula(f: &Formula) -> String {
    f.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown atom `{name}` at byte {offset}")]
    UnknownAtom { name: String, offset: usize },
}

/// The set of atomic types a parser accepts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSet(BTreeSet<String>);

impl AtomSet {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        AtomSet(names.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl Default for AtomSet {
    fn default() -> Self {
        AtomSet::new(["N", "S"])
    }
}

/// Parses with the default atom set `{N, S}`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &AtomSet::default())
}

pub fn parse_formula_with(text: &str, atoms: &AtomSet) -> Result<Formula, ParseError> {
    parse_formula_at(text, 0, atoms)
}

/// Parses `text` reporting offsets relative to `base` (used for sequent sides).
pub(crate) fn parse_formula_at(text: &str, base: usize, atoms: &AtomSet) -> Result<Formula, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        base,
        atoms,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty formula"));
    }
    let f = p.product()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    base: usize,
    atoms: &'a AtomSet,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.base + self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    // product := slash ("," product)?
    fn product(&mut self) -> Result<Formula, ParseError> {
        let left = self.slash()?;
        if self.peek() == Some(b',') {
            self.pos += 1;
            let right = self.product()?;
            return Ok(Formula::product(left, right));
        }
        Ok(left)
    }

    // slash := unary (("\" | "/") unary)?  -- non-associative
    fn slash(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        let f = match self.peek() {
            Some(b'\\') => {
                self.pos += 1;
                Formula::under(left, self.unary()?)
            }
            Some(b'/') => {
                self.pos += 1;
                Formula::over(left, self.unary()?)
            }
            _ => return Ok(left),
        };
        if matches!(self.peek(), Some(b'\\') | Some(b'/')) {
            return Err(self.error("nested implication needs parentheses"));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::bang(self.unary()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.product()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(f)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if !self.atoms.contains(name) {
                    return Err(ParseError::UnknownAtom {
                        name: name.to_string(),
                        offset: self.base + start,
                    });
                }
                Ok(Formula::atom(name))
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n() -> Formula {
        Formula::atom("N")
    }
    fn s() -> Formula {
        Formula::atom("S")
    }

    #[test]
    fn parses_basic_connectives() {
        assert_eq!(parse_formula("N\\S").unwrap(), Formula::under(n(), s()));
        assert_eq!(parse_formula("(N,S)").unwrap(), Formula::product(n(), s()));
        assert_eq!(parse_formula("!N").unwrap(), Formula::bang(n()));
    }

    #[test]
    fn parses_nested_likes_type() {
        let expected = Formula::bang(Formula::over(
            Formula::bang(Formula::under(Formula::bang(n()), s())),
            n(),
        ));
        assert_eq!(parse_formula("!((!(!N\\S))/N)").unwrap(), expected);
    }

    #[test]
    fn bang_binds_tighter_than_slash() {
        assert_eq!(
            parse_formula("!(N\\S)/N").unwrap(),
            Formula::over(Formula::bang(Formula::under(n(), s())), n())
        );
        assert_eq!(
            parse_formula("!N\\N").unwrap(),
            Formula::under(Formula::bang(n()), n())
        );
    }

    #[test]
    fn comma_is_right_associative() {
        assert_eq!(
            parse_formula("N,S,N").unwrap(),
            Formula::product(n(), Formula::product(s(), n()))
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_formula("N\\"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula("N\\S\\S"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_formula("(N"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert_eq!(
            parse_formula("N\\NP"),
            Err(ParseError::UnknownAtom {
                name: "NP".into(),
                offset: 2
            })
        );
    }

    #[test]
    fn custom_atoms() {
        let atoms = AtomSet::new(["NP", "S"]);
        assert!(parse_formula_with("NP\\S", &atoms).is_ok());
        assert!(parse_formula_with("N\\S", &atoms).is_err());
    }

    #[test]
    fn formats_minimally() {
        assert_eq!(format_formula(&Formula::under(n(), s())), "N\\S");
        assert_eq!(format_formula(&Formula::bang(n())), "!N");
        assert_eq!(
            format_formula(&Formula::over(s(), Formula::product(n(), n()))),
            "S/(N,N)"
        );
        assert_eq!(
            format_formula(&Formula::bang(Formula::under(n(), s()))),
            "!(N\\S)"
        );
        assert_eq!(
            format_formula(&Formula::product(Formula::product(n(), n()), s())),
            "(N,N),S"
        );
    }
}
