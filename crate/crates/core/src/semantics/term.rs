use std::fmt;

use serde::{Deserialize, Serialize};

use super::shape::Shape;
use super::SemanticsError;

/// A linear map between lists of wires, each wire carrying one formula's
/// space. Built by [`super::compile`]; interpreted by [`super::evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Term {
    Id(Vec<Shape>),
    /// Evaluation: contracts an argument wire against the argument factors
    /// of an adjacent function wire (`arg_left`: argument wire comes first).
    Cup {
        arg: Shape,
        result: Shape,
        arg_left: bool,
    },
    /// Comultiplication on a Fock wire; the kind is chosen at evaluation.
    Delta(Shape),
    /// Counit on a Fock wire.
    Eps(Shape),
    /// Layer-1 inclusion of a wire into the Fock wire `fock`.
    Incl {
        inner: Shape,
        fock: Shape,
    },
    /// No input; two wires carrying `sum_i e_i (x) e_i`.
    Cap(Shape),
    /// Exchanges two adjacent blocks of wires.
    Swap(Vec<Shape>, Vec<Shape>),
    /// Merges adjacent wires into one.
    Join(Vec<Shape>),
    /// Splits one wire into two.
    Split(Shape, Shape),
    /// Left to right composition.
    Seq(Vec<Term>),
    /// Side by side.
    Par(Vec<Term>),
}

/// Node counts of a term, ignoring the plumbing nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TermStats {
    pub cups: usize,
    pub deltas: usize,
    pub eps: usize,
    pub swaps: usize,
    pub incls: usize,
    pub caps: usize,
}

impl Term {
    pub fn inputs(&self) -> Vec<Shape> {
        match self {
            Term::Id(ws) => ws.clone(),
            Term::Cup {
                arg,
                result,
                arg_left,
            } => {
                let fun = arg.concat(result);
                if *arg_left {
                    vec![arg.clone(), fun]
                } else {
                    vec![fun, arg.clone()]
                }
            }
            Term::Delta(s) | Term::Eps(s) => vec![s.clone()],
            Term::Incl { inner, .. } => vec![inner.clone()],
            Term::Cap(_) => vec![],
            Term::Swap(a, b) => a.iter().chain(b).cloned().collect(),
            Term::Join(ws) => ws.clone(),
            Term::Split(a, b) => vec![a.concat(b)],
            Term::Seq(ts) => ts.first().map(Term::inputs).unwrap_or_default(),
            Term::Par(ts) => ts.iter().flat_map(Term::inputs).collect(),
        }
    }

    pub fn outputs(&self) -> Vec<Shape> {
        match self {
            Term::Id(ws) => ws.clone(),
            Term::Cup { result, .. } => vec![result.clone()],
            Term::Delta(s) => vec![s.clone(), s.clone()],
            Term::Eps(s) => match s.0.as_slice() {
                [super::Factor::Fock { inner, .. }] => vec![inner.clone()],
                _ => vec![],
            },
            Term::Incl { fock, .. } => vec![fock.clone()],
            Term::Cap(s) => vec![s.clone(), s.clone()],
            Term::Swap(a, b) => b.iter().chain(a).cloned().collect(),
            Term::Join(ws) => vec![ws.iter().fold(Shape::default(), |acc, w| acc.concat(w))],
            Term::Split(a, b) => vec![a.clone(), b.clone()],
            Term::Seq(ts) => ts.last().map(Term::outputs).unwrap_or_default(),
            Term::Par(ts) => ts.iter().flat_map(Term::outputs).collect(),
        }
    }

    /// Composition that checks the wires line up and drops identities.
    pub fn then(self, next: Term) -> Result<Term, SemanticsError> {
        let (out, inp) = (self.outputs(), next.inputs());
        if out != inp {
            return Err(SemanticsError::ShapeMismatch {
                expected: wires_text(&inp),
                found: wires_text(&out),
            });
        }
        Ok(match (self, next) {
            (Term::Id(_), t) | (t, Term::Id(_)) => t,
            (Term::Seq(mut a), Term::Seq(b)) => {
                a.extend(b);
                Term::Seq(a)
            }
            (Term::Seq(mut a), t) => {
                a.push(t);
                Term::Seq(a)
            }
            (t, Term::Seq(mut b)) => {
                b.insert(0, t);
                Term::Seq(b)
            }
            (a, b) => Term::Seq(vec![a, b]),
        })
    }

    /// Side by side, merging adjacent identities and dropping empty ones.
    pub fn beside(parts: Vec<Term>) -> Term {
        let mut out: Vec<Term> = Vec::new();
        for p in parts {
            match (out.last_mut(), p) {
                (_, Term::Id(ws)) if ws.is_empty() => {}
                (Some(Term::Id(prev)), Term::Id(ws)) => prev.extend(ws),
                (_, Term::Par(inner)) => out.extend(inner),
                (_, p) => out.push(p),
            }
        }
        match out.len() {
            0 => Term::Id(vec![]),
            1 => out.pop().unwrap(),
            _ => Term::Par(out),
        }
    }

    pub fn stats(&self) -> TermStats {
        let mut s = TermStats::default();
        self.tally(&mut s);
        s
    }

    fn tally(&self, s: &mut TermStats) {
        match self {
            Term::Cup { .. } => s.cups += 1,
            Term::Delta(_) => s.deltas += 1,
            Term::Eps(_) => s.eps += 1,
            Term::Swap(..) => s.swaps += 1,
            Term::Incl { .. } => s.incls += 1,
            Term::Cap(_) => s.caps += 1,
            Term::Seq(ts) | Term::Par(ts) => ts.iter().for_each(|t| t.tally(s)),
            Term::Id(_) | Term::Join(_) | Term::Split(..) => {}
        }
    }
}

pub(crate) fn wires_text(ws: &[Shape]) -> String {
    let parts: Vec<String> = ws.iter().map(Shape::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn shapes(f: &mut fmt::Formatter<'_>, ws: &[Shape]) -> fmt::Result {
    for w in ws {
        write!(f, " {w}")?;
    }
    Ok(())
}

/// S-expression form, e.g. `(seq (par (delta F[N]) (id N*S)) ...)`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Id(ws) => {
                f.write_str("(id")?;
                shapes(f, ws)?;
                f.write_str(")")
            }
            Term::Cup {
                arg,
                result,
                arg_left,
            } => {
                let side = if *arg_left { "left" } else { "right" };
                write!(f, "(cup {side} {arg} {result})")
            }
            Term::Delta(s) => write!(f, "(delta {s})"),
            Term::Eps(s) => write!(f, "(eps {s})"),
            Term::Incl { fock, .. } => write!(f, "(incl {fock})"),
            Term::Cap(s) => write!(f, "(cap {s})"),
            Term::Swap(a, b) => {
                f.write_str("(swap (")?;
                shapes(f, a)?;
                f.write_str(" ) (")?;
                shapes(f, b)?;
                f.write_str(" ))")
            }
            Term::Join(ws) => {
                f.write_str("(join")?;
                shapes(f, ws)?;
                f.write_str(")")
            }
            Term::Split(a, b) => write!(f, "(split {a} {b})"),
            Term::Seq(ts) | Term::Par(ts) => {
                f.write_str(if matches!(self, Term::Seq(_)) {
                    "(seq"
                } else {
                    "(par"
                })?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(")")
            }
        }
    }
}
