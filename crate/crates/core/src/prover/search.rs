//! Bounded backward proof search.
//!
//! `!`-formulas may be permuted across any block, so their positions carry
//! no information. The search therefore runs over abstract sequents, in which
//! the antecedent is the ordered list of non-`!` formulas plus a multiset of
//! `!` formulas. Each abstract proof is afterwards replayed on the concrete
//! sequent, and that replay inserts the `Perm1`/`Perm2` steps the concrete
//! calculus needs.
//!
//! Contractions are likewise made only where they matter. A `!A` is copied
//! either when its copies go to different premises of a two-premise rule, or
//! when one copy is derelicted and another kept. Pushing each contraction up
//! to that point changes neither the number of contractions nor what can be
//! proved.
//!
//! Before expanding a state we check a resource invariant. Every rule except
//! `Contr` preserves the signed atom count `v(goal) - Σ v(antecedent)`, and
//! each contraction of `!X` shifts it by `v(X)`. If the imbalance is not a
//! sum of at most `budget` available shifts, the state has no proof within
//! the budget.
//!
//! Every abstract step either consumes budget or makes the sequent strictly
//! smaller, so the abstract search cannot revisit a state on one branch.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Formula, Sequent};

use super::derivation::{premises_of, Derivation, Rule, RuleData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum height of a returned derivation.
    pub max_depth: usize,
    /// Maximum number of `Contr` nodes in a returned derivation.
    pub contraction_budget: usize,
    pub max_solutions: usize,
    pub timeout: Duration,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 40,
            contraction_budget: 1,
            max_solutions: 16,
            timeout: Duration::from_secs(30),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ProveError> {
        let bad = |field: &'static str| Err(ProveError::InvalidConfig(field));
        if self.max_depth == 0 {
            return bad("max_depth");
        }
        if self.contraction_budget == 0 {
            return bad("contraction_budget");
        }
        if self.max_solutions == 0 {
            return bad("max_solutions");
        }
        if self.timeout.is_zero() {
            return bad("timeout");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("search configuration: `{0}` must be positive")]
    InvalidConfig(&'static str),
    #[error("proof search exceeded its time limit of {0:?}")]
    Timeout(Duration),
}

/// Up to `max_solutions` derivations of `sequent`. Solutions are listed
/// round-robin over contraction counts: the first proof with the fewest
/// contractions, then the first with the next count, and so on, before any
/// second proof of a count. An empty result means no proof exists within the
/// bounds.
pub fn prove(sequent: &Sequent, cfg: &SearchConfig) -> Result<Vec<Derivation>, ProveError> {
    cfg.validate()?;
    let mut searcher = Searcher::new(sequent, cfg);
    let root = searcher.state_of(sequent);
    let found = searcher.search(&root, cfg.contraction_budget, cfg.max_depth, None)?;

    // within a count, derivations that keep contracted copies in order
    // come first
    let mut by_count: BTreeMap<usize, Vec<(usize, Derivation)>> = BTreeMap::new();
    for p in found.iter() {
        let d = searcher.realize(sequent.clone(), &root, p);
        if d.height() <= cfg.max_depth {
            by_count
                .entry(p.contractions)
                .or_default()
                .push((d.copy_crossings(), d));
        }
    }
    for group in by_count.values_mut() {
        group.sort_by_key(|(c, _)| *c);
    }
    let mut queues: Vec<_> = by_count.into_values().map(|g| g.into_iter()).collect();
    let mut out = Vec::new();
    while out.len() < cfg.max_solutions {
        let before = out.len();
        for q in queues.iter_mut() {
            if let Some((_, d)) = q.next() {
                out.push(d);
                if out.len() == cfg.max_solutions {
                    break;
                }
            }
        }
        if out.len() == before {
            break;
        }
    }
    Ok(out)
}

type Fid = u32;
/// Atoms beyond the last slot share it, which keeps the check sound.
const ATOM_SLOTS: usize = 12;
type Counts = [i32; ATOM_SLOTS];

#[derive(Debug, Clone, Copy)]
enum Node {
    Atom,
    Over { result: Fid, arg: Fid },
    Under { arg: Fid, result: Fid },
    Bang(Fid),
    Product(Fid, Fid),
}

/// Interned subformulas of the root sequent with their resource data.
struct Table {
    nodes: Vec<Node>,
    formulas: Vec<Formula>,
    ids: HashMap<Formula, Fid>,
    atoms: BTreeMap<Arc<str>, usize>,
    value: Vec<Counts>,
    shifts: Vec<Counts>,
    /// Shifts available from `!X` occurring negatively, for the formula in
    /// the antecedent and in goal position. `None` when there are too many
    /// distinct shifts to track, which disables the check.
    neg_left: Vec<Option<u128>>,
    neg_right: Vec<Option<u128>>,
}

impl Table {
    fn new(root: &Sequent) -> Table {
        let mut names = BTreeSet::new();
        for f in root.antecedent.iter().chain(std::iter::once(&root.goal)) {
            f.atoms(&mut names);
        }
        Table {
            nodes: Vec::new(),
            formulas: Vec::new(),
            ids: HashMap::new(),
            atoms: names
                .into_iter()
                .enumerate()
                .map(|(i, a)| (a, i.min(ATOM_SLOTS - 1)))
                .collect(),
            value: Vec::new(),
            shifts: Vec::new(),
            neg_left: Vec::new(),
            neg_right: Vec::new(),
        }
    }

    fn intern(&mut self, f: &Formula) -> Fid {
        if let Some(&id) = self.ids.get(f) {
            return id;
        }
        let (node, value, neg_left, neg_right) = match f {
            Formula::Atom(a) => {
                let mut v = [0; ATOM_SLOTS];
                v[self.atoms[a]] = 1;
                (Node::Atom, v, Some(0), Some(0))
            }
            Formula::Over(b, a) | Formula::Under(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                let v = sub(&self.value[b as usize], &self.value[a as usize]);
                let left = union(self.neg_left[b as usize], self.neg_right[a as usize]);
                let right = union(self.neg_right[b as usize], self.neg_left[a as usize]);
                let node = if matches!(f, Formula::Over(..)) {
                    Node::Over { result: b, arg: a }
                } else {
                    Node::Under { arg: a, result: b }
                };
                (node, v, left, right)
            }
            Formula::Bang(x) => {
                let x = self.intern(x);
                let v = self.value[x as usize];
                let mut left = self.neg_left[x as usize];
                if v.iter().any(|&c| c != 0) {
                    let shift = self.shift_id(&v);
                    left = union(left, shift.map(|s| 1u128 << s));
                }
                (Node::Bang(x), v, left, self.neg_right[x as usize])
            }
            Formula::Product(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                let (x, y) = (&self.value[a as usize], &self.value[b as usize]);
                let v: Counts = std::array::from_fn(|i| x[i] + y[i]);
                let left = union(self.neg_left[a as usize], self.neg_left[b as usize]);
                let right = union(self.neg_right[a as usize], self.neg_right[b as usize]);
                (Node::Product(a, b), v, left, right)
            }
        };
        let id = self.nodes.len() as Fid;
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.ids.insert(f.clone(), id);
        self.value.push(value);
        self.neg_left.push(neg_left);
        self.neg_right.push(neg_right);
        id
    }

    fn shift_id(&mut self, v: &Counts) -> Option<usize> {
        let id = match self.shifts.iter().position(|s| s == v) {
            Some(i) => i,
            None => {
                self.shifts.push(*v);
                self.shifts.len() - 1
            }
        };
        (id < 128).then_some(id)
    }

    fn is_bang(&self, f: Fid) -> bool {
        matches!(self.nodes[f as usize], Node::Bang(_))
    }
}

fn sub(a: &Counts, b: &Counts) -> Counts {
    std::array::from_fn(|i| a[i] - b[i])
}

fn union(a: Option<u128>, b: Option<u128>) -> Option<u128> {
    Some(a? | b?)
}

/// A sequent with `!` positions forgotten. `bangs` is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct AState {
    lin: Vec<Fid>,
    bangs: Vec<Fid>,
    goal: Fid,
}

/// How the copies of each distinct `!` formula are shared between the two
/// premises: `(formula, to the first premise, to the second premise)`.
/// Sending `l` and `r` copies out of `m` costs `l + r - m` contractions.
type Take = Vec<(Fid, usize, usize)>;

#[derive(Debug, Clone)]
enum Step {
    Ax,
    OverR,
    UnderR,
    BangR,
    ProdL {
        index: usize,
    },
    Left {
        over: bool,
        principal: usize,
        arg_len: usize,
        take: Take,
    },
    ProdR {
        at: usize,
        take: Take,
    },
    /// Derelict one copy of `bang`, putting its body at position `gap` of the
    /// non-`!` list. `keep` contracts first so a copy stays behind.
    BangL {
        bang: Fid,
        gap: usize,
        keep: bool,
    },
}

#[derive(Debug)]
struct ANode {
    step: Step,
    premises: Vec<AProof>,
    contractions: usize,
    height: usize,
}

type AProof = Rc<ANode>;

fn node(step: Step, cost: usize, premises: Vec<AProof>) -> AProof {
    let contractions = cost + premises.iter().map(|p| p.contractions).sum::<usize>();
    let height = 1 + premises.iter().map(|p| p.height).max().unwrap_or(0);
    Rc::new(ANode {
        step,
        premises,
        contractions,
        height,
    })
}

fn multiplicities(bangs: &[Fid]) -> Vec<(Fid, usize)> {
    let mut out: Vec<(Fid, usize)> = Vec::new();
    for &b in bangs {
        match out.last_mut() {
            Some((f, m)) if *f == b => *m += 1,
            _ => out.push((b, 1)),
        }
    }
    out
}

/// Every sub-multiset of a multiset given as multiplicities.
fn subsets(mult: &[(Fid, usize)]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &(_, m) in mult {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..=m).map(move |k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    out
}

fn split_bangs(take: &Take) -> (Vec<Fid>, Vec<Fid>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &(b, l, r) in take {
        left.extend(std::iter::repeat_n(b, l));
        right.extend(std::iter::repeat_n(b, r));
    }
    (left, right)
}

/// (state, budget, focus) to (depth searched, proofs found).
type Memo = HashMap<(AState, usize, Option<usize>), (usize, Rc<Vec<AProof>>)>;

struct Searcher {
    table: Table,
    memo: Memo,
    feasible_memo: HashMap<(Counts, u128, usize), bool>,
    /// Proofs kept per contraction count at every state.
    keep: usize,
    deadline: Instant,
    timeout: Duration,
    ticks: u64,
}

impl Searcher {
    fn new(root: &Sequent, cfg: &SearchConfig) -> Searcher {
        Searcher {
            table: Table::new(root),
            memo: HashMap::new(),
            feasible_memo: HashMap::new(),
            keep: cfg.max_solutions,
            deadline: Instant::now() + cfg.timeout,
            timeout: cfg.timeout,
            ticks: 0,
        }
    }

    fn state_of(&mut self, seq: &Sequent) -> AState {
        let mut lin = Vec::new();
        let mut bangs = Vec::new();
        for f in &seq.antecedent {
            let id = self.table.intern(f);
            if self.table.is_bang(id) {
                bangs.push(id);
            } else {
                lin.push(id);
            }
        }
        bangs.sort_unstable();
        AState {
            lin,
            bangs,
            goal: self.table.intern(&seq.goal),
        }
    }

    fn add(&self, st: &mut AState, f: Fid, lin_pos: usize) {
        if self.table.is_bang(f) {
            let at = st.bangs.partition_point(|&b| b <= f);
            st.bangs.insert(at, f);
        } else {
            st.lin.insert(lin_pos, f);
        }
    }

    /// Imbalance and available shifts of `ante -> goal`.
    fn balance<'a>(&self, ante: impl IntoIterator<Item = &'a Fid>, goal: Fid) -> (Counts, Option<u128>) {
        let t = &self.table;
        let mut imbalance = t.value[goal as usize];
        let mut avail = t.neg_right[goal as usize];
        for &f in ante {
            imbalance = sub(&imbalance, &t.value[f as usize]);
            avail = union(avail, t.neg_left[f as usize]);
        }
        (imbalance, avail)
    }

    fn feasible(&mut self, st: &AState, budget: usize) -> bool {
        let (imbalance, avail) = self.balance(st.lin.iter().chain(&st.bangs), st.goal);
        self.reachable(imbalance, avail, budget)
    }

    fn reachable(&mut self, imbalance: Counts, avail: Option<u128>, budget: usize) -> bool {
        if imbalance == [0; ATOM_SLOTS] {
            return true;
        }
        let Some(avail) = avail else { return true };
        let key = (imbalance, avail, budget);
        if let Some(&ok) = self.feasible_memo.get(&key) {
            return ok;
        }
        let shifts: Vec<&Counts> = (0..self.table.shifts.len())
            .filter(|&i| avail & (1u128 << i) != 0)
            .map(|i| &self.table.shifts[i])
            .collect();
        let mut frontier = vec![imbalance];
        let mut seen: HashSet<Counts> = HashSet::from([imbalance]);
        let mut ok = false;
        'levels: for _ in 0..budget {
            let mut next = Vec::new();
            for r in &frontier {
                for s in &shifts {
                    let d = sub(r, s);
                    if d == [0; ATOM_SLOTS] {
                        ok = true;
                        break 'levels;
                    }
                    if seen.insert(d) {
                        next.push(d);
                    }
                }
            }
            frontier = next;
        }
        self.feasible_memo.insert(key, ok);
        ok
    }

    /// Ways to share the `!` formulas of a state between two premises whose
    /// other material is `left` and `right`, keeping both premises feasible.
    fn shares(
        &mut self,
        mult: &[(Fid, usize)],
        subsets: &[Vec<usize>],
        left: (&[Fid], Fid),
        right: (&[Fid], Fid),
        budget: usize,
    ) -> Vec<(Take, usize)> {
        let (left_imb, left_avail) = self.balance(left.0, left.1);
        let (right_imb, right_avail) = self.balance(right.0, right.1);
        let with = |this: &mut Self, imb: Counts, avail: Option<u128>, counts: &[usize]| {
            let mut imb = imb;
            let mut avail = avail;
            for (&(b, _), &c) in mult.iter().zip(counts) {
                if c > 0 {
                    let v = this.table.value[b as usize];
                    imb = std::array::from_fn(|i| imb[i] - c as i32 * v[i]);
                    avail = union(avail, this.table.neg_left[b as usize]);
                }
            }
            this.reachable(imb, avail, budget)
        };
        let left_ok: Vec<bool> = subsets
            .iter()
            .map(|c| with(self, left_imb, left_avail, c))
            .collect();
        let right_ok: Vec<bool> = subsets
            .iter()
            .map(|c| with(self, right_imb, right_avail, c))
            .collect();
        let mut out = Vec::new();
        for (l, _) in subsets.iter().zip(&left_ok).filter(|x| *x.1) {
            for (r, _) in subsets.iter().zip(&right_ok).filter(|x| *x.1) {
                let mut cost = 0;
                let mut ok = true;
                for ((&(_, m), &a), &b) in mult.iter().zip(l).zip(r) {
                    if a + b < m {
                        ok = false;
                        break;
                    }
                    cost += a + b - m;
                }
                if ok && cost <= budget {
                    let take = mult
                        .iter()
                        .zip(l)
                        .zip(r)
                        .map(|((&(f, _), &a), &b)| (f, a, b))
                        .collect();
                    out.push((take, cost));
                }
            }
        }
        out
    }

    /// Premises of `st` under `step`, or `None` if it does not apply.
    fn apply(&self, st: &AState, step: &Step) -> Option<Vec<AState>> {
        let t = &self.table;
        let goal = st.goal;
        match step {
            Step::Ax => {
                let ok =
                    (st.lin == [goal] && st.bangs.is_empty()) || (st.lin.is_empty() && st.bangs == [goal]);
                ok.then(Vec::new)
            }
            Step::OverR => {
                let Node::Over { result, arg } = t.nodes[goal as usize] else {
                    return None;
                };
                let mut p = AState {
                    goal: result,
                    ..st.clone()
                };
                let end = p.lin.len();
                self.add(&mut p, arg, end);
                Some(vec![p])
            }
            Step::UnderR => {
                let Node::Under { arg, result } = t.nodes[goal as usize] else {
                    return None;
                };
                let mut p = AState {
                    goal: result,
                    ..st.clone()
                };
                self.add(&mut p, arg, 0);
                Some(vec![p])
            }
            Step::BangR => {
                let Node::Bang(x) = t.nodes[goal as usize] else {
                    return None;
                };
                st.lin.is_empty().then(|| {
                    vec![AState {
                        goal: x,
                        ..st.clone()
                    }]
                })
            }
            Step::ProdL { index } => {
                let Node::Product(a, b) = t.nodes[st.lin[*index] as usize] else {
                    return None;
                };
                let mut p = st.clone();
                p.lin.remove(*index);
                let at = *index + usize::from(!t.is_bang(a));
                self.add(&mut p, b, at);
                self.add(&mut p, a, *index);
                Some(vec![p])
            }
            Step::Left {
                over,
                principal,
                arg_len,
                take,
            } => {
                let (arg, result, gamma) = match (t.nodes[st.lin[*principal] as usize], over) {
                    (Node::Over { result, arg }, true) => {
                        let end = principal + 1 + arg_len;
                        (arg, result, principal + 1..end)
                    }
                    (Node::Under { arg, result }, false) => (arg, result, principal - arg_len..*principal),
                    _ => return None,
                };
                let (left_bangs, right_bangs) = split_bangs(take);
                let left = AState {
                    lin: st.lin[gamma.clone()].to_vec(),
                    bangs: left_bangs,
                    goal: arg,
                };
                let first = gamma.start.min(*principal);
                let last = gamma.end.max(principal + 1);
                let mut lin = st.lin[..first].to_vec();
                lin.extend_from_slice(&st.lin[last..]);
                let mut right = AState {
                    lin,
                    bangs: right_bangs,
                    goal,
                };
                self.add(&mut right, result, first);
                Some(vec![left, right])
            }
            Step::ProdR { at, take } => {
                let Node::Product(a, b) = t.nodes[goal as usize] else {
                    return None;
                };
                let (left_bangs, right_bangs) = split_bangs(take);
                Some(vec![
                    AState {
                        lin: st.lin[..*at].to_vec(),
                        bangs: left_bangs,
                        goal: a,
                    },
                    AState {
                        lin: st.lin[*at..].to_vec(),
                        bangs: right_bangs,
                        goal: b,
                    },
                ])
            }
            Step::BangL { bang, gap, keep } => {
                let Node::Bang(x) = t.nodes[*bang as usize] else {
                    return None;
                };
                let mut p = st.clone();
                if !keep {
                    let i = p.bangs.iter().position(|b| b == bang)?;
                    p.bangs.remove(i);
                }
                self.add(&mut p, x, *gap);
                Some(vec![p])
            }
        }
    }

    fn tick(&mut self) -> Result<(), ProveError> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(256) && Instant::now() > self.deadline {
            return Err(ProveError::Timeout(self.timeout));
        }
        Ok(())
    }

    /// `focus` names a just-derelicted non-`!` formula that the next step
    /// must use as its principal formula.
    fn search(
        &mut self,
        st: &AState,
        budget: usize,
        depth: usize,
        focus: Option<usize>,
    ) -> Result<Rc<Vec<AProof>>, ProveError> {
        self.tick()?;
        let key = (st.clone(), budget, focus);
        if let Some((computed, found)) = self.memo.get(&key) {
            if *computed == depth {
                return Ok(found.clone());
            }
            if *computed > depth {
                let fit = found.iter().filter(|p| p.height <= depth).cloned().collect();
                return Ok(Rc::new(fit));
            }
        }
        let found = if depth == 0 || !self.feasible(st, budget) {
            Vec::new()
        } else {
            self.expand(st, budget, depth, focus)?
        };
        let found = Rc::new(self.trim(found));
        self.memo.insert(key, (depth, found.clone()));
        Ok(found)
    }

    /// Fewest contractions first, at most `keep` proofs per count.
    fn trim(&self, mut found: Vec<AProof>) -> Vec<AProof> {
        found.sort_by_key(|p| p.contractions);
        let mut per_count = HashMap::new();
        found.retain(|p| {
            let n = per_count.entry(p.contractions).or_insert(0usize);
            *n += 1;
            *n <= self.keep
        });
        found
    }

    fn unary(
        &mut self,
        st: &AState,
        step: Step,
        cost: usize,
        budget: usize,
        depth: usize,
        out: &mut Vec<AProof>,
    ) -> Result<(), ProveError> {
        let Some(mut prem) = self.apply(st, &step) else {
            return Ok(());
        };
        let prem = prem.pop().expect("unary step");
        let focus = match step {
            Step::BangL { bang, gap, .. } if !self.table.is_bang(self.inner(bang)) => Some(gap),
            _ => None,
        };
        for p in self.search(&prem, budget - cost, depth - 1, focus)?.iter() {
            out.push(node(step.clone(), cost, vec![p.clone()]));
        }
        Ok(())
    }

    fn binary(
        &mut self,
        st: &AState,
        step: Step,
        cost: usize,
        budget: usize,
        depth: usize,
        out: &mut Vec<AProof>,
    ) -> Result<(), ProveError> {
        let Some(prems) = self.apply(st, &step) else {
            return Ok(());
        };
        let rest = budget - cost;
        if !self.feasible(&prems[0], rest) || !self.feasible(&prems[1], rest) {
            return Ok(());
        }
        let lefts = self.search(&prems[0], rest, depth - 1, None)?;
        let mut rights: BTreeMap<usize, Rc<Vec<AProof>>> = BTreeMap::new();
        for l in lefts.iter() {
            let r_budget = rest - l.contractions;
            if let Entry::Vacant(slot) = rights.entry(r_budget) {
                slot.insert(self.search(&prems[1], r_budget, depth - 1, None)?);
            }
            for r in rights[&r_budget].iter() {
                out.push(node(step.clone(), cost, vec![l.clone(), r.clone()]));
            }
        }
        Ok(())
    }

    fn inner(&self, bang: Fid) -> Fid {
        match self.table.nodes[bang as usize] {
            Node::Bang(x) => x,
            _ => unreachable!("bang list holds only bangs"),
        }
    }

    fn expand(
        &mut self,
        st: &AState,
        budget: usize,
        depth: usize,
        focus: Option<usize>,
    ) -> Result<Vec<AProof>, ProveError> {
        let mut out = Vec::new();
        let goal = self.table.nodes[st.goal as usize];

        // invertible steps, committed
        match goal {
            Node::Over { .. } => {
                self.unary(st, Step::OverR, 0, budget, depth, &mut out)?;
                return Ok(out);
            }
            Node::Under { .. } => {
                self.unary(st, Step::UnderR, 0, budget, depth, &mut out)?;
                return Ok(out);
            }
            _ => {}
        }
        let product = st
            .lin
            .iter()
            .position(|&f| matches!(self.table.nodes[f as usize], Node::Product(..)));
        if let Some(index) = product {
            self.unary(st, Step::ProdL { index }, 0, budget, depth, &mut out)?;
            return Ok(out);
        }
        if self.apply(st, &Step::Ax).is_some() {
            out.push(node(Step::Ax, 0, Vec::new()));
            return Ok(out);
        }

        let n = st.lin.len();
        let mult = multiplicities(&st.bangs);
        let subsets = subsets(&mult);
        for principal in 0..n {
            if focus.is_some_and(|f| f != principal) {
                continue;
            }
            let (over, arg, result, lens) = match self.table.nodes[st.lin[principal] as usize] {
                Node::Over { result, arg } => (true, arg, result, 0..n - principal),
                Node::Under { arg, result } => (false, arg, result, 0..principal + 1),
                _ => continue,
            };
            for arg_len in lens {
                let (gamma, first, last) = if over {
                    let end = principal + 1 + arg_len;
                    (principal + 1..end, principal, end)
                } else {
                    (principal - arg_len..principal, principal - arg_len, principal + 1)
                };
                let mut rest = st.lin[..first].to_vec();
                rest.push(result);
                rest.extend_from_slice(&st.lin[last..]);
                let shares = self.shares(&mult, &subsets, (&st.lin[gamma], arg), (&rest, st.goal), budget);
                for (take, cost) in shares {
                    let step = Step::Left {
                        over,
                        principal,
                        arg_len,
                        take,
                    };
                    self.binary(st, step, cost, budget, depth, &mut out)?;
                }
            }
        }
        if focus.is_some() {
            return Ok(out);
        }
        if let Node::Product(a, b) = goal {
            for at in 0..=n {
                let shares = self.shares(&mult, &subsets, (&st.lin[..at], a), (&st.lin[at..], b), budget);
                for (take, cost) in shares {
                    let step = Step::ProdR { at, take };
                    self.binary(st, step, cost, budget, depth, &mut out)?;
                }
            }
        }
        if matches!(goal, Node::Bang(_)) && n == 0 {
            self.unary(st, Step::BangR, 0, budget, depth, &mut out)?;
        }

        // A derelicted formula passes unchanged through every rule that does
        // not use it as principal, so dereliction waits until that point.
        for &(bang, _) in &mult {
            let inner = self.inner(bang);
            let gaps = match self.table.nodes[inner as usize] {
                Node::Bang(_) | Node::Over { .. } | Node::Under { .. } | Node::Product(..) => {
                    if matches!(self.table.nodes[inner as usize], Node::Bang(_)) {
                        1
                    } else {
                        n + 1
                    }
                }
                Node::Atom if n == 0 && st.bangs == [bang] && inner == st.goal => 1,
                Node::Atom => 0,
            };
            for keep in [false, true] {
                if keep && budget == 0 {
                    continue;
                }
                for gap in 0..gaps {
                    let step = Step::BangL { bang, gap, keep };
                    self.unary(st, step, usize::from(keep), budget, depth, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    /// Replays an abstract proof on a concrete sequent.
    fn realize(&self, seq: Sequent, st: &AState, proof: &ANode) -> Derivation {
        let mut chain = Chain::new(seq);
        let (rule, data) = match &proof.step {
            Step::Ax => (Rule::Ax, RuleData::None),
            Step::OverR => (Rule::OverR, RuleData::None),
            Step::UnderR => (Rule::UnderR, RuleData::None),
            Step::BangR => (Rule::BangR, RuleData::None),
            Step::ProdL { index } => {
                let index = chain.lin_pos(*index);
                (Rule::ProdL, RuleData::At { index })
            }
            Step::BangL { bang, gap, keep } => {
                let f = &self.table.formulas[*bang as usize];
                let index = chain.place_dereliction(f, *gap, *keep);
                (Rule::BangL, RuleData::At { index })
            }
            Step::Left {
                over,
                principal,
                arg_len,
                take,
            } => {
                let (over, principal, arg_len) = (*over, *principal, *arg_len);
                self.contract(&mut chain, take);
                let p = chain.lin_pos(principal);
                let (start, end) = match (over, arg_len) {
                    (_, 0) => (p, p),
                    (true, k) => (p, chain.lin_pos(principal + k)),
                    (false, k) => (chain.lin_pos(principal - k), p),
                };
                let sides = self.share(&chain, take, start, end);
                // Δ1 0, Γ and principal 1 and 2 in reading order, Δ2 3
                let (gamma, functor) = if over { (2, 1) } else { (1, 2) };
                let lin_region = |k: usize| -> u8 {
                    if k == principal {
                        functor
                    } else if (over && k > principal && k <= principal + arg_len)
                        || (!over && k < principal && k + arg_len >= principal)
                    {
                        gamma
                    } else if k < principal {
                        0
                    } else {
                        3
                    }
                };
                chain.arrange(&sides, lin_region, gamma, 0, 3, start);
                let p = chain.lin_pos(principal);
                let gamma_len = arg_len + take.iter().map(|t| t.1).sum::<usize>();
                let rule = if over { Rule::OverL } else { Rule::UnderL };
                (
                    rule,
                    RuleData::Left {
                        principal: p,
                        arg_len: gamma_len,
                    },
                )
            }
            Step::ProdR { at, take } => {
                self.contract(&mut chain, take);
                let boundary = if *at < chain.lin_count() {
                    chain.lin_pos(*at)
                } else {
                    chain.cur.antecedent.len()
                };
                let sides = self.share(&chain, take, 0, boundary.saturating_sub(1));
                chain.arrange(&sides, |k| u8::from(k >= *at), 0, 1, 1, 0);
                let left_len = at + take.iter().map(|t| t.1).sum::<usize>();
                (Rule::ProdR, RuleData::Split { at: left_len })
            }
        };
        let abstract_premises = self.apply(st, &proof.step).expect("replayed step applies");
        let concrete = premises_of(&chain.cur, rule, data).expect("replayed rule applies");
        let premises = concrete
            .into_iter()
            .zip(&abstract_premises)
            .zip(&proof.premises)
            .map(|((s, a), p)| self.realize(s, a, p))
            .collect();
        chain.finish(rule, data, premises)
    }

    /// Makes the extra copies `take` asks for.
    fn contract(&self, chain: &mut Chain, take: &Take) {
        for &(b, l, r) in take {
            let f = &self.table.formulas[b as usize];
            let have = chain.copies(f).len();
            for _ in have..l + r {
                let i = chain.copies(f)[0];
                chain.push(Rule::Contr, RuleData::At { index: i });
            }
        }
    }

    /// Marks which copy of each `!` formula goes to the first premise: the
    /// ones nearest the span `start..=end`. `Some(true)` for those,
    /// `Some(false)` for other `!` formulas, `None` for the rest.
    fn share(&self, chain: &Chain, take: &Take, start: usize, end: usize) -> Vec<Option<bool>> {
        let mut sides: Vec<Option<bool>> = chain
            .cur
            .antecedent
            .iter()
            .map(|f| f.is_bang().then_some(false))
            .collect();
        for &(b, l, _) in take {
            let f = &self.table.formulas[b as usize];
            let mut copies = chain.copies(f);
            copies.sort_by_key(|&i| (start.saturating_sub(i) + i.saturating_sub(end), i));
            for &i in copies.iter().take(l) {
                sides[i] = Some(true);
            }
        }
        sides
    }
}

/// A run of one-premise concrete steps ending in the rule that realizes an
/// abstract step.
struct Chain {
    steps: Vec<(Sequent, Rule, RuleData)>,
    cur: Sequent,
}

impl Chain {
    fn new(seq: Sequent) -> Chain {
        Chain {
            steps: Vec::new(),
            cur: seq,
        }
    }

    fn push(&mut self, rule: Rule, data: RuleData) {
        let mut prem = premises_of(&self.cur, rule, data).expect("structural step applies");
        let next = prem.pop().expect("structural steps have one premise");
        let done = std::mem::replace(&mut self.cur, next);
        self.steps.push((done, rule, data));
    }

    fn lin_count(&self) -> usize {
        self.cur.antecedent.iter().filter(|f| !f.is_bang()).count()
    }

    /// Position of the `k`-th non-`!` formula.
    fn lin_pos(&self, k: usize) -> usize {
        self.cur
            .antecedent
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_bang())
            .nth(k)
            .map(|(i, _)| i)
            .expect("non-! index in range")
    }

    fn copies(&self, f: &Formula) -> Vec<usize> {
        (0..self.cur.antecedent.len())
            .filter(|&i| &self.cur.antecedent[i] == f)
            .collect()
    }

    /// Brings a copy of `bang` between non-`!` formulas `gap - 1` and `gap`,
    /// contracting first if `keep`. Returns the copy's final position.
    fn place_dereliction(&mut self, bang: &Formula, gap: usize, keep: bool) -> usize {
        let bounds = |c: &Chain| -> (isize, isize) {
            let lo = if gap > 0 { c.lin_pos(gap - 1) as isize } else { -1 };
            let hi = if gap < c.lin_count() {
                c.lin_pos(gap) as isize
            } else {
                c.cur.antecedent.len() as isize
            };
            (lo, hi)
        };
        let inner_is_bang = bang.bang_inner().is_some_and(Formula::is_bang);
        let (lo, hi) = bounds(self);
        let dist = |i: usize| {
            let i = i as isize;
            (lo - i).max(0) + (i - hi).max(0)
        };
        let mut q = *self
            .copies(bang)
            .iter()
            .min_by_key(|&&i| (dist(i), i))
            .expect("a copy to derelict");
        if keep {
            self.push(Rule::Contr, RuleData::At { index: q });
            if (q as isize) < lo {
                q += 1;
            }
        }
        if inner_is_bang {
            return q;
        }
        let (lo, hi) = bounds(self);
        let qi = q as isize;
        if qi < lo {
            let block_len = (hi - 1 - qi) as usize;
            self.push(Rule::Perm2, RuleData::Perm { bang: q, block_len });
            (hi - 1) as usize
        } else if qi > hi {
            let block_len = (qi - lo - 1) as usize;
            self.push(Rule::Perm1, RuleData::Perm { bang: q, block_len });
            (lo + 1) as usize
        } else {
            q
        }
    }

    /// Permutes `!` formulas so that regions appear in increasing order,
    /// moving as little as a stable sort allows. Non-`!` formulas get
    /// `lin_region` of their index among non-`!` formulas. `!` copies bound
    /// for the first premise get `shared`; other `!` copies get `before` if
    /// they sit left of `start`, `after` otherwise.
    fn arrange(
        &mut self,
        sides: &[Option<bool>],
        lin_region: impl Fn(usize) -> u8,
        shared: u8,
        before: u8,
        after: u8,
        start: usize,
    ) {
        let n = self.cur.antecedent.len();
        let mut regions = vec![0u8; n];
        let mut k = 0;
        for i in 0..n {
            regions[i] = match sides[i] {
                None => {
                    k += 1;
                    lin_region(k - 1)
                }
                Some(true) => shared,
                Some(false) if i < start => before,
                Some(false) => after,
            };
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut target = order.clone();
        target.sort_by_key(|&i| regions[i]);
        let mut k = 0;
        while k < n {
            if order[k] == target[k] {
                k += 1;
                continue;
            }
            let j = order.iter().position(|&x| x == target[k]).expect("permutation");
            if self.cur.antecedent[j].is_bang() {
                self.push(
                    Rule::Perm1,
                    RuleData::Perm {
                        bang: j,
                        block_len: j - k,
                    },
                );
                order[k..=j].rotate_right(1);
            } else {
                self.push(
                    Rule::Perm2,
                    RuleData::Perm {
                        bang: k,
                        block_len: j - k,
                    },
                );
                order[k..=j].rotate_left(1);
            }
        }
    }

    fn finish(self, rule: Rule, data: RuleData, premises: Vec<Derivation>) -> Derivation {
        let mut d = Derivation {
            conclusion: self.cur,
            rule,
            data,
            premises,
        };
        for (conclusion, rule, data) in self.steps.into_iter().rev() {
            d = Derivation {
                conclusion,
                rule,
                data,
                premises: vec![d],
            };
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_sequent;
    use crate::prover::derivation::check_derivation;

    fn cfg(budget: usize) -> SearchConfig {
        SearchConfig {
            contraction_budget: budget,
            max_solutions: 1000,
            ..SearchConfig::default()
        }
    }

    fn proofs(s: &str, budget: usize) -> Vec<Derivation> {
        let ds = prove(&parse_sequent(s).unwrap(), &cfg(budget)).unwrap();
        for d in &ds {
            assert!(check_derivation(d), "{}", d.to_text());
        }
        ds
    }

    #[test]
    fn function_application() {
        let ds = proofs("N, N\\S -> S", 1);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].rule, Rule::UnderL);
        assert_eq!(ds[0].size(), 3);
    }

    #[test]
    fn no_rule_applies() {
        assert!(proofs("N -> S", 4).is_empty());
        assert!(proofs("N, N -> S,S", 4).is_empty());
    }

    #[test]
    fn rejects_zero_bounds() {
        let s = parse_sequent("N -> N").unwrap();
        let bad = SearchConfig {
            max_depth: 0,
            ..SearchConfig::default()
        };
        assert_eq!(prove(&s, &bad), Err(ProveError::InvalidConfig("max_depth")));
    }

    #[test]
    fn right_rules() {
        assert_eq!(proofs("N\\S -> N\\S", 1)[0].rule, Rule::UnderR);
        assert!(!proofs("S/N, N\\S -> (S/N),(N\\S)", 1).is_empty());
        assert_eq!(proofs("-> S/S", 1)[0].rule, Rule::OverR);
    }

    #[test]
    fn contraction_copies_a_noun() {
        let ds = proofs("!N, N\\(N\\S) -> S", 1);
        assert!(!ds.is_empty());
        assert!(ds.iter().all(|d| d.contractions() == 1));
    }

    #[test]
    fn contraction_budget_is_respected() {
        assert!(proofs("!N, N\\(N\\(N\\S)) -> S", 1).is_empty());
        assert!(!proofs("!N, N\\(N\\(N\\S)) -> S", 2).is_empty());
    }

    #[test]
    fn bangs_move_into_place() {
        // the subject has to cross the verb
        let ds = proofs("N\\S, !N -> S", 1);
        assert_eq!(ds[0].count_rule(Rule::Perm1), 1);
        assert!(!proofs("!N, N, N\\(N\\S) -> S", 1).is_empty());
        let ds = proofs("!N, S/N -> S", 1);
        assert_eq!(ds[0].count_rule(Rule::Perm2), 1);
        assert!(!proofs("S/N, N, !N -> S,N", 1).is_empty());
    }

    #[test]
    fn promotion() {
        assert_eq!(proofs("!N -> !N", 1)[0].rule, Rule::Ax);
        assert!(!proofs("!N, !N -> !(N,N)", 1).is_empty());
        assert!(proofs("N -> !N", 1).is_empty());
    }

    #[test]
    fn timeout_is_an_error() {
        let s = parse_sequent(super::super::worked::COREFERENCE).unwrap();
        let c = SearchConfig {
            contraction_budget: 4,
            timeout: Duration::from_nanos(1),
            ..SearchConfig::default()
        };
        assert_eq!(prove(&s, &c), Err(ProveError::Timeout(Duration::from_nanos(1))));
    }
}
