//! IPL prover: a contraction-free sequent calculus in the G4ip style.
//! Left implications are decomposed by the shape of their antecedent, every
//! rule shrinks a multiset weight, so the search is a decision procedure and
//! `Refuted` is definitive.

use crate::provers::{ProofNode, ProofResult, ProofSequent, ProofStatus};
use crate::syntax::Formula;

pub(crate) fn prove_ipl(ctx: &[Formula], goal: &Formula) -> ProofResult {
    let mut sorted: Vec<Formula> = ctx.to_vec();
    sorted.sort();
    let mut nodes = 0usize;
    let status = match search(sorted, goal.clone(), &mut nodes) {
        Some(tree) => ProofStatus::Proved(tree),
        None => ProofStatus::Refuted,
    };
    ProofResult { status, nodes_expanded: nodes }
}

fn seq(ctx: &[Formula], goal: &Formula) -> ProofSequent {
    ProofSequent::Ipl { context: ctx.to_vec(), goal: goal.clone() }
}

fn insert_sorted(ctx: &mut Vec<Formula>, f: Formula) {
    let i = ctx.partition_point(|g| g <= &f);
    ctx.insert(i, f);
}

fn without(ctx: &[Formula], idx: usize) -> Vec<Formula> {
    let mut out = ctx.to_vec();
    out.remove(idx);
    out
}

fn search(ctx: Vec<Formula>, goal: Formula, nodes: &mut usize) -> Option<ProofNode> {
    *nodes += 1;
    let here = seq(&ctx, &goal);

    // invertible right rules
    match &goal {
        Formula::And(a, b) => {
            let left = search(ctx.clone(), (**a).clone(), nodes)?;
            let right = search(ctx.clone(), (**b).clone(), nodes)?;
            return Some(ProofNode::new("and-r", here, vec![left, right]));
        }
        Formula::Imp(a, b) => {
            let mut bigger = ctx.clone();
            insert_sorted(&mut bigger, (**a).clone());
            let child = search(bigger, (**b).clone(), nodes)?;
            return Some(ProofNode::new("imp-r", here, vec![child]));
        }
        _ => {}
    }

    // invertible left rules, first applicable position
    for (i, f) in ctx.iter().enumerate() {
        match f {
            Formula::Bottom => {
                return Some(ProofNode::new("bot-l", here, vec![]));
            }
            Formula::And(a, b) => {
                let mut rest = without(&ctx, i);
                insert_sorted(&mut rest, (**a).clone());
                insert_sorted(&mut rest, (**b).clone());
                let child = search(rest, goal.clone(), nodes)?;
                return Some(ProofNode::new("and-l", here, vec![child]));
            }
            Formula::Or(a, b) => {
                let mut left_ctx = without(&ctx, i);
                let mut right_ctx = left_ctx.clone();
                insert_sorted(&mut left_ctx, (**a).clone());
                insert_sorted(&mut right_ctx, (**b).clone());
                let left = search(left_ctx, goal.clone(), nodes)?;
                let right = search(right_ctx, goal.clone(), nodes)?;
                return Some(ProofNode::new("or-l", here, vec![left, right]));
            }
            Formula::Imp(a, b) => match &**a {
                Formula::Atom(_) if ctx.iter().enumerate().any(|(j, g)| j != i && g == &**a) => {
                    let mut rest = without(&ctx, i);
                    insert_sorted(&mut rest, (**b).clone());
                    let child = search(rest, goal.clone(), nodes)?;
                    return Some(ProofNode::new("imp-l-atom", here, vec![child]));
                }
                Formula::And(c, d) => {
                    let mut rest = without(&ctx, i);
                    insert_sorted(&mut rest, Formula::imp((**c).clone(), Formula::imp((**d).clone(), (**b).clone())));
                    let child = search(rest, goal.clone(), nodes)?;
                    return Some(ProofNode::new("imp-l-and", here, vec![child]));
                }
                Formula::Or(c, d) => {
                    let mut rest = without(&ctx, i);
                    insert_sorted(&mut rest, Formula::imp((**c).clone(), (**b).clone()));
                    insert_sorted(&mut rest, Formula::imp((**d).clone(), (**b).clone()));
                    let child = search(rest, goal.clone(), nodes)?;
                    return Some(ProofNode::new("imp-l-or", here, vec![child]));
                }
                Formula::Bottom => {
                    let rest = without(&ctx, i);
                    let child = search(rest, goal.clone(), nodes)?;
                    return Some(ProofNode::new("imp-l-bot", here, vec![child]));
                }
                _ => {}
            },
            _ => {}
        }
    }

    // axiom
    if goal.as_atom().is_some() && ctx.contains(&goal) {
        return Some(ProofNode::new("axiom", here, vec![]));
    }

    // disjunction choices
    if let Formula::Or(a, b) = &goal {
        if let Some(child) = search(ctx.clone(), (**a).clone(), nodes) {
            return Some(ProofNode::new("or-r1", here, vec![child]));
        }
        if let Some(child) = search(ctx.clone(), (**b).clone(), nodes) {
            return Some(ProofNode::new("or-r2", here, vec![child]));
        }
    }

    // nested implications on the left
    for (i, f) in ctx.iter().enumerate() {
        if let Formula::Imp(a, c) = f {
            if let Formula::Imp(a1, b1) = &**a {
                let rest = without(&ctx, i);
                let mut major_ctx = rest.clone();
                insert_sorted(&mut major_ctx, Formula::imp((**b1).clone(), (**c).clone()));
                let major_goal = Formula::imp((**a1).clone(), (**b1).clone());
                let Some(major) = search(major_ctx, major_goal, nodes) else { continue };
                let mut minor_ctx = rest.clone();
                insert_sorted(&mut minor_ctx, (**c).clone());
                let Some(minor) = search(minor_ctx, goal.clone(), nodes) else { continue };
                return Some(ProofNode::new("imp-l-imp", here, vec![major, minor]));
            }
        }
    }

    None
}

/// Local correctness of every node.
pub(crate) fn check(node: &ProofNode) -> bool {
    let ProofSequent::Ipl { context, goal } = &node.sequent else { return false };
    let child_seq = |i: usize| -> Option<(&Vec<Formula>, &Formula)> {
        node.children.get(i).and_then(|c| match &c.sequent {
            ProofSequent::Ipl { context, goal } => Some((context, goal)),
            _ => None,
        })
    };
    let same_multiset = |a: &[Formula], b: &[Formula]| {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        x.sort();
        y.sort();
        x == y
    };
    let plus = |base: &[Formula], extra: &[Formula]| {
        let mut out = base.to_vec();
        out.extend(extra.iter().cloned());
        out
    };
    let ok = match node.rule.as_str() {
        "axiom" => goal.as_atom().is_some() && context.contains(goal) && node.children.is_empty(),
        "bot-l" => context.contains(&Formula::Bottom) && node.children.is_empty(),
        "and-r" => match &goal {
            Formula::And(a, b) => match (child_seq(0), child_seq(1)) {
                (Some((c0, g0)), Some((c1, g1))) => {
                    same_multiset(c0, context) && same_multiset(c1, context) && g0 == &**a && g1 == &**b
                }
                _ => false,
            },
            _ => false,
        },
        "imp-r" => match &goal {
            Formula::Imp(a, b) => matches!(child_seq(0), Some((c, g))
                if same_multiset(c, &plus(context, &[(**a).clone()])) && g == &**b),
            _ => false,
        },
        "or-r1" => matches!((&goal, child_seq(0)), (Formula::Or(a, _), Some((c, g)))
            if same_multiset(c, context) && g == &**a),
        "or-r2" => matches!((&goal, child_seq(0)), (Formula::Or(_, b), Some((c, g)))
            if same_multiset(c, context) && g == &**b),
        "and-l" => any_principal(context, |f, rest| match f {
            Formula::And(a, b) => matches!(child_seq(0), Some((c, g))
                if g == goal && same_multiset(c, &plus(&rest, &[(**a).clone(), (**b).clone()]))),
            _ => false,
        }),
        "or-l" => any_principal(context, |f, rest| match f {
            Formula::Or(a, b) => match (child_seq(0), child_seq(1)) {
                (Some((c0, g0)), Some((c1, g1))) => {
                    g0 == goal
                        && g1 == goal
                        && same_multiset(c0, &plus(&rest, &[(**a).clone()]))
                        && same_multiset(c1, &plus(&rest, &[(**b).clone()]))
                }
                _ => false,
            },
            _ => false,
        }),
        "imp-l-atom" => any_principal(context, |f, rest| match f {
            Formula::Imp(a, b) => {
                a.as_atom().is_some()
                    && rest.contains(a)
                    && matches!(child_seq(0), Some((c, g))
                        if g == goal && same_multiset(c, &plus(&rest, &[(**b).clone()])))
            }
            _ => false,
        }),
        "imp-l-and" => any_principal(context, |f, rest| match f {
            Formula::Imp(a, b) => match &**a {
                Formula::And(c1, d1) => matches!(child_seq(0), Some((c, g))
                    if g == goal
                        && same_multiset(c, &plus(&rest, &[Formula::imp((**c1).clone(), Formula::imp((**d1).clone(), (**b).clone()))]))),
                _ => false,
            },
            _ => false,
        }),
        "imp-l-or" => any_principal(context, |f, rest| match f {
            Formula::Imp(a, b) => match &**a {
                Formula::Or(c1, d1) => matches!(child_seq(0), Some((c, g))
                    if g == goal
                        && same_multiset(c, &plus(&rest, &[
                            Formula::imp((**c1).clone(), (**b).clone()),
                            Formula::imp((**d1).clone(), (**b).clone()),
                        ]))),
                _ => false,
            },
            _ => false,
        }),
        "imp-l-bot" => any_principal(context, |f, rest| match f {
            Formula::Imp(a, _) => {
                **a == Formula::Bottom
                    && matches!(child_seq(0), Some((c, g)) if g == goal && same_multiset(c, &rest))
            }
            _ => false,
        }),
        "imp-l-imp" => any_principal(context, |f, rest| match f {
            Formula::Imp(a, c) => match &**a {
                Formula::Imp(a1, b1) => match (child_seq(0), child_seq(1)) {
                    (Some((mc, mg)), Some((nc, ng))) => {
                        *mg == Formula::imp((**a1).clone(), (**b1).clone())
                            && same_multiset(mc, &plus(&rest, &[Formula::imp((**b1).clone(), (**c).clone())]))
                            && ng == goal
                            && same_multiset(nc, &plus(&rest, &[(**c).clone()]))
                    }
                    _ => false,
                },
                _ => false,
            },
            _ => false,
        }),
        _ => false,
    };
    ok && node.children.iter().all(check)
}

fn any_principal(context: &[Formula], pred: impl Fn(&Formula, Vec<Formula>) -> bool) -> bool {
    context.iter().enumerate().any(|(i, f)| {
        let mut rest = context.to_vec();
        rest.remove(i);
        pred(f, rest)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Logic};

    fn p(src: &str) -> Formula {
        parse_formula(src, Logic::Ipl).unwrap()
    }

    #[test]
    fn identity_is_proved_and_replays() {
        let r = prove_ipl(&[], &p("p -> p"));
        assert!(r.status.is_proved());
        if let ProofStatus::Proved(t) = &r.status {
            assert!(check(t));
        }
    }

    #[test]
    fn classics() {
        assert!(prove_ipl(&[], &p("p -> (q -> p)")).status.is_proved());
        assert!(prove_ipl(&[], &p("(p -> q) -> ((q -> r) -> (p -> r))")).status.is_proved());
        assert!(prove_ipl(&[], &p("bot -> q")).status.is_proved());
        assert!(prove_ipl(&[], &p("p /\\ q -> q /\\ p")).status.is_proved());
        assert!(prove_ipl(&[], &p("p \\/ q -> q \\/ p")).status.is_proved());
        // Peirce and excluded middle fail intuitionistically
        assert_eq!(prove_ipl(&[], &p("((p -> q) -> p) -> p")).status, ProofStatus::Refuted);
        assert_eq!(prove_ipl(&[], &p("p \\/ (p -> bot)")).status, ProofStatus::Refuted);
        // but their double negations hold
        assert!(prove_ipl(&[], &p("((p \\/ (p -> bot)) -> bot) -> bot")).status.is_proved());
    }

    #[test]
    fn context_is_reusable() {
        let r = prove_ipl(&[p("p -> q")], &p("p -> (q -> bot) -> bot"));
        assert!(r.status.is_proved());
    }

    #[test]
    fn corrupted_proof_fails_check() {
        let r = prove_ipl(&[], &p("p -> p"));
        let ProofStatus::Proved(mut t) = r.status else { panic!() };
        // corrupt the premise sequent
        fn corrupt(n: &mut ProofNode) {
            if let ProofSequent::Ipl { goal, .. } = &mut n.sequent {
                *goal = Formula::Bottom;
            }
        }
        if let Some(c) = t.children.first_mut() {
            corrupt(c);
        } else {
            corrupt(&mut t);
        }
        assert!(!check(&t));
    }
}
