//! Hand-written derivations of the four coreference examples: anaphora
//! ("John sleeps. He snores"), ellipsis ("John plays guitar. Mary does too")
//! and the strict and sloppy readings of "John likes his code. Bill does too".
//!
//! Leaves over `S,S` are closed with `ProdR` over two axioms.

use crate::logic::{parse_sequent, Sequent};

use super::derivation::{Derivation, Plan, Rule, RuleData};

pub const ANAPHORA: &str = "!N, N\\S, !N\\N, N\\S -> S,S";
pub const ELLIPSIS: &str = "N, !(N\\S)/N, N, N, (!(N\\S))\\(N\\S) -> S,S";
pub const COREFERENCE: &str = "!N, !((!(!N\\S))/N), (!(!N\\N))/N, N, !N, (!(!N\\S))\\(!N\\S) -> S,S";

pub const ANAPHORA_LEXICON: &str = "John\t!N\nsleeps\tN\\S\nsnores\tN\\S\nHe\t!N\\N\nhe\t!N\\N\n";
pub const ELLIPSIS_LEXICON: &str =
    "John\tN\nplays\t!(N\\S)/N\nguitar\tN\nMary\tN\ndoes-too\t(!(N\\S))\\(N\\S)\n";
pub const COREFERENCE_LEXICON: &str =
    "John\t!N\nlikes\t!((!(!N\\S))/N)\nhis\t(!(!N\\N))/N\ncode\tN\nBill\t!N\ndoes-too\t(!(!N\\S))\\(!N\\S)\n";

fn under(principal: usize, arg_len: usize, right: Plan) -> Plan {
    Plan::step(
        Rule::UnderL,
        RuleData::Left { principal, arg_len },
        vec![Plan::Ax, right],
    )
}

fn over(principal: usize, arg_len: usize, right: Plan) -> Plan {
    Plan::step(
        Rule::OverL,
        RuleData::Left { principal, arg_len },
        vec![Plan::Ax, right],
    )
}

fn at(rule: Rule, index: usize, next: Plan) -> Plan {
    Plan::step(rule, RuleData::At { index }, vec![next])
}

fn perm2(bang: usize, block_len: usize, next: Plan) -> Plan {
    Plan::step(Rule::Perm2, RuleData::Perm { bang, block_len }, vec![next])
}

fn two_sentences() -> Plan {
    Plan::step(Rule::ProdR, RuleData::Split { at: 1 }, vec![Plan::Ax, Plan::Ax])
}

fn build(root: &str, plan: Plan) -> Derivation {
    let seq: Sequent = parse_sequent(root).expect("static sequent");
    plan.build(seq).expect("static derivation")
}

pub fn anaphora() -> Derivation {
    let plan = at(
        Rule::Contr,
        0,
        perm2(
            1,
            1,
            at(
                Rule::BangL,
                0,
                under(1, 1, under(2, 1, under(2, 1, two_sentences()))),
            ),
        ),
    );
    build(ANAPHORA, plan)
}

pub fn ellipsis() -> Derivation {
    let plan = over(
        1,
        1,
        at(
            Rule::Contr,
            1,
            perm2(
                2,
                1,
                under(
                    4,
                    1,
                    at(Rule::BangL, 1, under(1, 1, under(2, 1, two_sentences()))),
                ),
            ),
        ),
    );
    build(ELLIPSIS, plan)
}

/// "John likes John's code, Bill likes John's code": two contractions.
pub fn strict_reading() -> Derivation {
    let tail = at(
        Rule::Contr,
        1,
        perm2(
            2,
            1,
            at(
                Rule::BangL,
                1,
                under(1, 1, under(3, 1, under(2, 1, two_sentences()))),
            ),
        ),
    );
    let plan = at(
        Rule::BangL,
        1,
        over(
            2,
            1,
            at(
                Rule::BangL,
                2,
                at(Rule::Contr, 0, perm2(1, 1, under(3, 1, over(1, 1, tail)))),
            ),
        ),
    );
    build(COREFERENCE, plan)
}

/// "John likes John's code, Bill likes Bill's code": four contractions.
pub fn sloppy_reading() -> Derivation {
    let verb_phrases = over(
        1,
        1,
        over(
            2,
            1,
            at(
                Rule::BangL,
                1,
                under(1, 1, perm2(1, 1, under(3, 1, under(2, 1, two_sentences())))),
            ),
        ),
    );
    let copy_likes = at(
        Rule::Contr,
        1,
        perm2(2, 1, at(Rule::BangL, 1, at(Rule::BangL, 3, verb_phrases))),
    );
    let resolve_his = perm2(
        1,
        1,
        at(
            Rule::BangL,
            3,
            perm2(4, 1, at(Rule::BangL, 5, under(5, 1, under(3, 1, copy_likes)))),
        ),
    );
    let plan = over(
        2,
        1,
        at(
            Rule::Contr,
            2,
            at(Rule::Contr, 0, at(Rule::Contr, 5, resolve_his)),
        ),
    );
    build(COREFERENCE, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::derivation::{check_derivation, check_with_path};

    #[test]
    fn all_check() {
        for d in [anaphora(), ellipsis(), strict_reading(), sloppy_reading()] {
            assert!(check_derivation(&d), "{d:?}");
        }
    }

    #[test]
    fn contraction_counts() {
        assert_eq!(anaphora().contractions(), 1);
        assert_eq!(anaphora().count_rule(Rule::Perm2), 1);
        assert_eq!(ellipsis().contractions(), 1);
        assert_eq!(strict_reading().contractions(), 2);
        assert_eq!(sloppy_reading().contractions(), 4);
        assert_eq!(anaphora().count_rule(Rule::OverL), 0);
    }

    #[test]
    fn mutated_perm_is_rejected() {
        let mut d = anaphora();
        // root Contr -> Perm2
        let perm = &mut d.premises[0];
        assert_eq!(perm.rule, Rule::Perm2);
        perm.data = RuleData::Perm {
            bang: 1,
            block_len: 2,
        };
        let report = check_with_path(&d);
        assert!(!report.ok);
        assert_eq!(report.failing_path, Some(vec![0]));
    }

    #[test]
    fn copies_stay_in_order() {
        for d in [anaphora(), ellipsis(), strict_reading()] {
            assert_eq!(d.copy_crossings(), 0, "{d:?}");
        }
        // this sloppy tree moves one copy of John past the other
        assert_eq!(sloppy_reading().copy_crossings(), 1);
    }
}
