use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::logic::{Formula, Sequent};

/// Inference rules: the calculus proper plus the two product rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Ax,
    OverL,
    OverR,
    UnderL,
    UnderR,
    BangL,
    BangR,
    Perm1,
    Perm2,
    Contr,
    ProdL,
    ProdR,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::Ax,
        Rule::OverL,
        Rule::OverR,
        Rule::UnderL,
        Rule::UnderR,
        Rule::BangL,
        Rule::BangR,
        Rule::Perm1,
        Rule::Perm2,
        Rule::Contr,
        Rule::ProdL,
        Rule::ProdR,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::Ax => "Ax",
            Rule::OverL => "OverL",
            Rule::OverR => "OverR",
            Rule::UnderL => "UnderL",
            Rule::UnderR => "UnderR",
            Rule::BangL => "BangL",
            Rule::BangR => "BangR",
            Rule::Perm1 => "Perm1",
            Rule::Perm2 => "Perm2",
            Rule::Contr => "Contr",
            Rule::ProdL => "ProdL",
            Rule::ProdR => "ProdR",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.tag() == tag)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Positions a rule consumed, in the coordinates of the conclusion's
/// antecedent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleData {
    None,
    /// `OverL`/`UnderL`: the functor's index and the length of the argument
    /// block (to its right for `/`, to its left for `\`).
    Left {
        principal: usize,
        arg_len: usize,
    },
    /// `BangL`, `Contr`, `ProdL`: the index of the principal formula.
    At {
        index: usize,
    },
    /// `Perm1`/`Perm2`: the moved `!A` and the length of the block it crosses
    /// (left of it for `Perm1`, right of it for `Perm2`).
    Perm {
        bang: usize,
        block_len: usize,
    },
    /// `ProdR`: the antecedent prefix length proving the left component.
    Split {
        at: usize,
    },
}

impl fmt::Display for RuleData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleData::None => Ok(()),
            RuleData::Left { principal, arg_len } => {
                write!(f, "[principal={principal} arg_len={arg_len}]")
            }
            RuleData::At { index } => write!(f, "[index={index}]"),
            RuleData::Perm { bang, block_len } => write!(f, "[bang={bang} block_len={block_len}]"),
            RuleData::Split { at } => write!(f, "[at={at}]"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: Rule,
    pub data: RuleData,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn axiom(f: Formula) -> Self {
        Derivation {
            conclusion: Sequent::new(vec![f.clone()], f),
            rule: Rule::Ax,
            data: RuleData::None,
            premises: Vec::new(),
        }
    }

    pub fn count_rule(&self, rule: Rule) -> usize {
        let here = usize::from(self.rule == rule);
        here + self.premises.iter().map(|p| p.count_rule(rule)).sum::<usize>()
    }

    pub fn contractions(&self) -> usize {
        self.count_rule(Rule::Contr)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Number of `Perm` steps that move a contracted copy past its sibling,
    /// or past a formula the sibling was consumed into. Zero when every
    /// contraction's left copy stays left of its right copy.
    pub fn copy_crossings(&self) -> usize {
        let tags = vec![Tags::new(); self.conclusion.antecedent.len()];
        crossings(self, tags, &mut 0)
    }

    /// Indented text, one node per line, children two spaces deeper.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, indent: usize) {
        use std::fmt::Write;
        for _ in 0..indent {
            out.push_str("  ");
        }
        let _ = write!(out, "{} {}", self.rule, self.conclusion);
        if self.data != RuleData::None {
            let _ = write!(out, " {}", self.data);
        }
        out.push('\n');
        for p in &self.premises {
            p.write_text(out, indent + 1);
        }
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Contractions an occurrence descends from, with the side it took.
type Tags = BTreeSet<(usize, bool)>;

fn merged(tags: &[Tags]) -> Tags {
    tags.iter().flatten().copied().collect()
}

fn crosses(moved: &Tags, block: &[Tags], moved_side: bool) -> bool {
    let block = merged(block);
    moved
        .iter()
        .any(|&(id, side)| side == moved_side && block.contains(&(id, !side)))
}

fn crossings(d: &Derivation, mut tags: Vec<Tags>, next: &mut usize) -> usize {
    let mut here = 0;
    let premises: Vec<Vec<Tags>> = match (d.rule, d.data) {
        (Rule::Ax, _) => Vec::new(),
        (Rule::OverR, _) => {
            tags.push(Tags::new());
            vec![tags]
        }
        (Rule::UnderR, _) => {
            tags.insert(0, Tags::new());
            vec![tags]
        }
        (Rule::OverL, RuleData::Left { principal, arg_len }) => {
            let gamma: Vec<Tags> = tags.drain(principal + 1..principal + 1 + arg_len).collect();
            tags[principal].extend(merged(&gamma));
            vec![gamma, tags]
        }
        (Rule::UnderL, RuleData::Left { principal, arg_len }) => {
            let start = principal - arg_len;
            let gamma: Vec<Tags> = tags.drain(start..principal).collect();
            tags[start].extend(merged(&gamma));
            vec![gamma, tags]
        }
        (Rule::Contr, RuleData::At { index }) => {
            let id = *next;
            *next += 1;
            let mut right = tags[index].clone();
            right.insert((id, false));
            tags[index].insert((id, true));
            tags.insert(index + 1, right);
            vec![tags]
        }
        (Rule::Perm2, RuleData::Perm { bang, block_len }) => {
            // moving right: a left copy must not pass its right sibling
            here += usize::from(crosses(&tags[bang], &tags[bang + 1..=bang + block_len], true));
            tags[bang..=bang + block_len].rotate_left(1);
            vec![tags]
        }
        (Rule::Perm1, RuleData::Perm { bang, block_len }) => {
            here += usize::from(crosses(&tags[bang], &tags[bang - block_len..bang], false));
            tags[bang - block_len..=bang].rotate_right(1);
            vec![tags]
        }
        (Rule::ProdL, RuleData::At { index }) => {
            let t = tags[index].clone();
            tags.insert(index, t);
            vec![tags]
        }
        (Rule::ProdR, RuleData::Split { at }) => {
            let right = tags.split_off(at);
            vec![tags, right]
        }
        _ => vec![tags; d.premises.len()],
    };
    here + d
        .premises
        .iter()
        .zip(premises)
        .map(|(p, t)| crossings(p, t, next))
        .sum::<usize>()
}

pub fn count_rule(d: &Derivation, rule: Rule) -> usize {
    d.count_rule(rule)
}

/// Premises of `conclusion` under `rule` with `data`, or `None` when the rule
/// does not apply there. `Ax` has no premises.
pub fn premises_of(conclusion: &Sequent, rule: Rule, data: RuleData) -> Option<Vec<Sequent>> {
    let ante = &conclusion.antecedent;
    let goal = &conclusion.goal;
    match (rule, data) {
        (Rule::Ax, RuleData::None) => (ante.len() == 1 && &ante[0] == goal).then(Vec::new),
        (Rule::OverR, RuleData::None) => match goal {
            Formula::Over(b, a) => {
                let mut prem = ante.clone();
                prem.push((**a).clone());
                Some(vec![Sequent::new(prem, (**b).clone())])
            }
            _ => None,
        },
        (Rule::UnderR, RuleData::None) => match goal {
            Formula::Under(a, b) => {
                let mut prem = vec![(**a).clone()];
                prem.extend(ante.iter().cloned());
                Some(vec![Sequent::new(prem, (**b).clone())])
            }
            _ => None,
        },
        (Rule::OverL, RuleData::Left { principal, arg_len }) => {
            let Formula::Over(b, a) = ante.get(principal)? else {
                return None;
            };
            let end = principal.checked_add(1 + arg_len)?;
            if end > ante.len() {
                return None;
            }
            let gamma = ante[principal + 1..end].to_vec();
            let mut rest = ante[..principal].to_vec();
            rest.push((**b).clone());
            rest.extend_from_slice(&ante[end..]);
            Some(vec![
                Sequent::new(gamma, (**a).clone()),
                Sequent::new(rest, goal.clone()),
            ])
        }
        (Rule::UnderL, RuleData::Left { principal, arg_len }) => {
            let Formula::Under(a, b) = ante.get(principal)? else {
                return None;
            };
            let start = principal.checked_sub(arg_len)?;
            let gamma = ante[start..principal].to_vec();
            let mut rest = ante[..start].to_vec();
            rest.push((**b).clone());
            rest.extend_from_slice(&ante[principal + 1..]);
            Some(vec![
                Sequent::new(gamma, (**a).clone()),
                Sequent::new(rest, goal.clone()),
            ])
        }
        (Rule::BangL, RuleData::At { index }) => {
            let inner = ante.get(index)?.bang_inner()?;
            let mut prem = ante.clone();
            prem[index] = inner.clone();
            Some(vec![Sequent::new(prem, goal.clone())])
        }
        (Rule::BangR, RuleData::None) => {
            let inner = goal.bang_inner()?;
            ante.iter()
                .all(Formula::is_bang)
                .then(|| vec![Sequent::new(ante.clone(), inner.clone())])
        }
        (Rule::Contr, RuleData::At { index }) => {
            let f = ante.get(index)?;
            if !f.is_bang() {
                return None;
            }
            let mut prem = ante.clone();
            prem.insert(index, f.clone());
            Some(vec![Sequent::new(prem, goal.clone())])
        }
        // conclusion Δ1, !A, Γ, Δ2  /  premise Δ1, Γ, !A, Δ2
        (Rule::Perm2, RuleData::Perm { bang, block_len }) => {
            if block_len == 0 || !ante.get(bang)?.is_bang() {
                return None;
            }
            let end = bang.checked_add(1 + block_len)?;
            if end > ante.len() {
                return None;
            }
            let mut prem = ante.clone();
            prem[bang..end].rotate_left(1);
            Some(vec![Sequent::new(prem, goal.clone())])
        }
        // conclusion Δ1, Γ, !A, Δ2  /  premise Δ1, !A, Γ, Δ2
        (Rule::Perm1, RuleData::Perm { bang, block_len }) => {
            if block_len == 0 || !ante.get(bang)?.is_bang() {
                return None;
            }
            let start = bang.checked_sub(block_len)?;
            let mut prem = ante.clone();
            prem[start..=bang].rotate_right(1);
            Some(vec![Sequent::new(prem, goal.clone())])
        }
        (Rule::ProdL, RuleData::At { index }) => {
            let Formula::Product(a, b) = ante.get(index)? else {
                return None;
            };
            let mut prem = ante[..index].to_vec();
            prem.push((**a).clone());
            prem.push((**b).clone());
            prem.extend_from_slice(&ante[index + 1..]);
            Some(vec![Sequent::new(prem, goal.clone())])
        }
        (Rule::ProdR, RuleData::Split { at }) => {
            let Formula::Product(a, b) = goal else {
                return None;
            };
            if at > ante.len() {
                return None;
            }
            Some(vec![
                Sequent::new(ante[..at].to_vec(), (**a).clone()),
                Sequent::new(ante[at..].to_vec(), (**b).clone()),
            ])
        }
        _ => None,
    }
}

/// Outcome of [`check_derivation`]. `failing_path` lists premise indices from
/// the root to the first bad node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub failing_path: Option<Vec<usize>>,
}

pub fn check_derivation(d: &Derivation) -> bool {
    check_with_path(d).ok
}

pub fn check_with_path(d: &Derivation) -> CheckReport {
    let mut path = Vec::new();
    if check_node(d, &mut path) {
        CheckReport {
            ok: true,
            failing_path: None,
        }
    } else {
        CheckReport {
            ok: false,
            failing_path: Some(path),
        }
    }
}

fn check_node(d: &Derivation, path: &mut Vec<usize>) -> bool {
    let Some(expected) = premises_of(&d.conclusion, d.rule, d.data) else {
        return false;
    };
    if expected.len() != d.premises.len() || expected.iter().zip(&d.premises).any(|(e, p)| e != &p.conclusion)
    {
        return false;
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        if !check_node(p, path) {
            return false;
        }
        path.pop();
    }
    true
}

/// A proof sketch: rules and data only. Conclusions are filled in from the
/// root sequent by [`Plan::build`].
#[derive(Debug, Clone)]
pub enum Plan {
    Ax,
    Step(Rule, RuleData, Vec<Plan>),
}

impl Plan {
    pub fn step(rule: Rule, data: RuleData, premises: Vec<Plan>) -> Plan {
        Plan::Step(rule, data, premises)
    }

    /// Fails with the offending sequent if a step does not apply.
    pub fn build(&self, conclusion: Sequent) -> Result<Derivation, Sequent> {
        let (rule, data, subplans): (Rule, RuleData, &[Plan]) = match self {
            Plan::Ax => (Rule::Ax, RuleData::None, &[]),
            Plan::Step(r, d, p) => (*r, *d, p.as_slice()),
        };
        let prems = premises_of(&conclusion, rule, data).ok_or_else(|| conclusion.clone())?;
        if prems.len() != subplans.len() {
            return Err(conclusion);
        }
        let premises = prems
            .into_iter()
            .zip(subplans)
            .map(|(s, p)| p.build(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Derivation {
            conclusion,
            rule,
            data,
            premises,
        })
    }
}
