use crate::logic::Formula;
use crate::prover::{check_derivation, Derivation, Rule, RuleData};

use super::shape::{interpret_formula, Shape, SpaceAssignment};
use super::term::{wires_text, Term};
use super::SemanticsError;

/// Translates a checked derivation into a term from the antecedent's wires
/// to the goal's single wire.
pub fn compile(d: &Derivation, sa: &SpaceAssignment) -> Result<Term, SemanticsError> {
    sa.validate()?;
    if !check_derivation(d) {
        return Err(SemanticsError::IllFormed);
    }
    let t = node(d, sa)?;
    let want_in = wires(&d.conclusion.antecedent, sa)?;
    let want_out = vec![interpret_formula(&d.conclusion.goal, sa)?];
    if t.inputs() != want_in || t.outputs() != want_out {
        return Err(SemanticsError::ShapeMismatch {
            expected: format!("{} -> {}", wires_text(&want_in), wires_text(&want_out)),
            found: format!("{} -> {}", wires_text(&t.inputs()), wires_text(&t.outputs())),
        });
    }
    Ok(t)
}

fn wires(fs: &[Formula], sa: &SpaceAssignment) -> Result<Vec<Shape>, SemanticsError> {
    fs.iter().map(|f| interpret_formula(f, sa)).collect()
}

fn id(ws: &[Shape]) -> Term {
    Term::Id(ws.to_vec())
}

fn node(d: &Derivation, sa: &SpaceAssignment) -> Result<Term, SemanticsError> {
    let ante = &d.conclusion.antecedent;
    let ws = wires(ante, sa)?;
    let shape = |f: &Formula| interpret_formula(f, sa);
    let premise = |i: usize| node(&d.premises[i], sa);
    match (d.rule, d.data) {
        (Rule::Ax, _) => Ok(id(&ws)),
        (
            Rule::UnderL,
            RuleData::Left {
                principal: p,
                arg_len,
            },
        ) => {
            let Formula::Under(a, b) = &ante[p] else {
                return Err(SemanticsError::IllFormed);
            };
            let start = p - arg_len;
            let apply = Term::beside(vec![id(&ws[..start]), premise(0)?, id(&ws[p..])]);
            let cup = Term::Cup {
                arg: shape(a)?,
                result: shape(b)?,
                arg_left: true,
            };
            let eval = Term::beside(vec![id(&ws[..start]), cup, id(&ws[p + 1..])]);
            apply.then(eval)?.then(premise(1)?)
        }
        (
            Rule::OverL,
            RuleData::Left {
                principal: p,
                arg_len,
            },
        ) => {
            let Formula::Over(b, a) = &ante[p] else {
                return Err(SemanticsError::IllFormed);
            };
            let end = p + 1 + arg_len;
            let apply = Term::beside(vec![id(&ws[..=p]), premise(0)?, id(&ws[end..])]);
            let cup = Term::Cup {
                arg: shape(a)?,
                result: shape(b)?,
                arg_left: false,
            };
            let eval = Term::beside(vec![id(&ws[..p]), cup, id(&ws[end..])]);
            apply.then(eval)?.then(premise(1)?)
        }
        (Rule::Contr, RuleData::At { index: i }) => {
            let split = Term::beside(vec![id(&ws[..i]), Term::Delta(ws[i].clone()), id(&ws[i + 1..])]);
            split.then(premise(0)?)
        }
        (Rule::BangL, RuleData::At { index: i }) => {
            let eps = Term::beside(vec![id(&ws[..i]), Term::Eps(ws[i].clone()), id(&ws[i + 1..])]);
            eps.then(premise(0)?)
        }
        (Rule::Perm2, RuleData::Perm { bang, block_len }) => {
            let end = bang + 1 + block_len;
            let swap = Term::Swap(vec![ws[bang].clone()], ws[bang + 1..end].to_vec());
            Term::beside(vec![id(&ws[..bang]), swap, id(&ws[end..])]).then(premise(0)?)
        }
        (Rule::Perm1, RuleData::Perm { bang, block_len }) => {
            let start = bang - block_len;
            let swap = Term::Swap(ws[start..bang].to_vec(), vec![ws[bang].clone()]);
            Term::beside(vec![id(&ws[..start]), swap, id(&ws[bang + 1..])]).then(premise(0)?)
        }
        (Rule::BangR, _) => {
            let goal = &d.conclusion.goal;
            let inner = goal.bang_inner().ok_or(SemanticsError::IllFormed)?;
            let incl = Term::Incl {
                inner: shape(inner)?,
                fock: shape(goal)?,
            };
            premise(0)?.then(incl)
        }
        (Rule::ProdL, RuleData::At { index: i }) => {
            let Formula::Product(a, b) = &ante[i] else {
                return Err(SemanticsError::IllFormed);
            };
            let split = Term::Split(shape(a)?, shape(b)?);
            Term::beside(vec![id(&ws[..i]), split, id(&ws[i + 1..])]).then(premise(0)?)
        }
        (Rule::ProdR, RuleData::Split { .. }) => {
            let Formula::Product(a, b) = &d.conclusion.goal else {
                return Err(SemanticsError::IllFormed);
            };
            let both = Term::beside(vec![premise(0)?, premise(1)?]);
            both.then(Term::Join(vec![shape(a)?, shape(b)?]))
        }
        (Rule::UnderR, _) => {
            let Formula::Under(a, b) = &d.conclusion.goal else {
                return Err(SemanticsError::IllFormed);
            };
            let (a, b) = (shape(a)?, shape(b)?);
            let open = Term::beside(vec![Term::Cap(a.clone()), id(&ws)]);
            let body = Term::beside(vec![id(std::slice::from_ref(&a)), premise(0)?]);
            open.then(body)?.then(Term::Join(vec![a, b]))
        }
        (Rule::OverR, _) => {
            let Formula::Over(b, a) = &d.conclusion.goal else {
                return Err(SemanticsError::IllFormed);
            };
            let (a, b) = (shape(a)?, shape(b)?);
            let open = Term::beside(vec![id(&ws), Term::Cap(a.clone())]);
            let body = Term::beside(vec![premise(0)?, id(std::slice::from_ref(&a))]);
            let swap = Term::Swap(vec![b.clone()], vec![a.clone()]);
            open.then(body)?.then(swap)?.then(Term::Join(vec![a, b]))
        }
        _ => Err(SemanticsError::IllFormed),
    }
}
