use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::{parse_formula_at, AtomSet, Formula, ParseError};

/// `antecedent -> goal`. An empty antecedent is the empty context.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub goal: Formula,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, goal: Formula) -> Self {
        Sequent { antecedent, goal }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            // products must stay grouped so the comma split stays unambiguous
            if matches!(a, Formula::Product(..)) {
                write!(f, "({a})")?;
            } else {
                write!(f, "{a}")?;
            }
        }
        if self.antecedent.is_empty() {
            write!(f, "-> {}", self.goal)
        } else {
            write!(f, " -> {}", self.goal)
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    parse_sequent_with(text, &AtomSet::default())
}

pub fn parse_sequent_with(text: &str, atoms: &AtomSet) -> Result<Sequent, ParseError> {
    let arrows: Vec<usize> = text.match_indices("->").map(|(i, _)| i).collect();
    let arrow = match arrows.as_slice() {
        [one] => *one,
        [] => {
            return Err(ParseError::Syntax {
                offset: text.len(),
                message: "expected `->`".into(),
            })
        }
        [_, second, ..] => {
            return Err(ParseError::Syntax {
                offset: *second,
                message: "more than one `->`".into(),
            })
        }
    };
    let left = &text[..arrow];
    let right = &text[arrow + 2..];

    let mut antecedent = Vec::new();
    if !left.trim().is_empty() {
        let mut depth = 0i32;
        let mut start = 0;
        for (i, c) in left.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    antecedent.push(parse_formula_at(&left[start..i], start, atoms)?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        antecedent.push(parse_formula_at(&left[start..], start, atoms)?);
    }
    let goal = parse_formula_at(right, arrow + 2, atoms)?;
    Ok(Sequent { antecedent, goal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn splits_antecedent() {
        let s = parse_sequent("N, N\\S -> S").unwrap();
        assert_eq!(s.antecedent, vec![f("N"), f("N\\S")]);
        assert_eq!(s.goal, f("S"));
    }

    #[test]
    fn product_goal() {
        let s = parse_sequent("!N, N\\S, !N\\N, N\\S -> S,S").unwrap();
        assert_eq!(s.antecedent, vec![f("!N"), f("N\\S"), f("!N\\N"), f("N\\S")]);
        assert_eq!(s.goal, f("(S,S)"));
    }

    #[test]
    fn empty_antecedent() {
        let s = parse_sequent("-> S/S").unwrap();
        assert!(s.antecedent.is_empty());
        assert_eq!(s.goal, f("S/S"));
    }

    #[test]
    fn only_top_level_commas_split() {
        let atoms = AtomSet::new(["A", "B", "C", "D"]);
        let s = parse_sequent_with("A,(B,C) -> D", &atoms).unwrap();
        assert_eq!(s.antecedent.len(), 2);
    }

    #[test]
    fn errors() {
        assert!(parse_sequent("N, N").is_err());
        assert!(parse_sequent("N -> S -> S").is_err());
        assert!(parse_sequent("N, -> S").is_err());
        match parse_sequent("N, X -> S") {
            Err(ParseError::UnknownAtom { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "N, N\\S -> S",
            "-> S/S",
            "(N,N), N\\S -> S,S",
            "!N, !((!(!N\\S))/N), (!(!N\\N))/N, N, !N, (!(!N\\S))\\(!N\\S) -> S,S",
        ] {
            let s = parse_sequent(text).unwrap();
            assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
        }
    }
}
