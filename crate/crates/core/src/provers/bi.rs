//! BI prover: a bunched sequent calculus searched backward.
//!
//! Contexts are kept canonical, so exchange is matching modulo coherent
//! equivalence. Weakening is folded into the identity, unit, and splitting
//! side conditions through bunch-extension. Contraction is folded into the
//! rule forms: the additive rules retain their whole context in every
//! premise, so no duplication step is searched (bunch-level duplication
//! ahead of a multiplicative split is outside this calculus; the checker
//! still accepts an explicit `contract` node). Every rule strictly shrinks
//! the sequent, so the search terminates; `Refuted` is reported only when
//! no depth or budget cut fired anywhere in the search.

use crate::derivability::SearchBounds;
use crate::provers::{ProofNode, ProofResult, ProofSequent, ProofStatus};
use crate::syntax::{rebuild, Bunch, BunchPath, Formula, JoinKind};

pub(crate) fn prove_bi(ctx: &Bunch<Formula>, goal: &Formula, bounds: &SearchBounds) -> ProofResult {
    let mut search = Search { bounds: *bounds, nodes: 0, capped: false };
    let mut path = Vec::new();
    let found = search.prove(ctx.normalize(), goal.clone(), bounds.max_depth, &mut path);
    let status = match found {
        Some(tree) => ProofStatus::Proved(tree),
        None if search.capped => ProofStatus::Unknown("depth, size, or budget bound hit".into()),
        None => ProofStatus::Refuted,
    };
    ProofResult { status, nodes_expanded: search.nodes }
}

struct Search {
    bounds: SearchBounds,
    nodes: usize,
    capped: bool,
}

type Ctx = Bunch<Formula>;

fn seq(ctx: &Ctx, goal: &Formula) -> ProofSequent {
    ProofSequent::Bi { context: ctx.clone(), goal: goal.clone() }
}

impl Search {
    fn prove(&mut self, ctx: Ctx, goal: Formula, depth: usize, path: &mut Vec<(Ctx, Formula)>) -> Option<ProofNode> {
        self.nodes += 1;
        if self.nodes > self.bounds.node_budget {
            self.capped = true;
            return None;
        }
        if depth == 0 {
            self.capped = true;
            return None;
        }
        let here = seq(&ctx, &goal);

        // invertible right rules
        match &goal {
            Formula::Top => return Some(ProofNode::new("top-r", here, vec![])),
            Formula::And(a, b) => {
                let left = self.prove(ctx.clone(), (**a).clone(), depth - 1, path)?;
                let right = self.prove(ctx.clone(), (**b).clone(), depth - 1, path)?;
                return Some(ProofNode::new("and-r", here, vec![left, right]));
            }
            Formula::Imp(a, b) => {
                let bigger = Bunch::add(ctx.clone(), Bunch::leaf((**a).clone())).normalize();
                let child = self.prove(bigger, (**b).clone(), depth - 1, path)?;
                return Some(ProofNode::new("imp-r", here, vec![child]));
            }
            Formula::Wand(a, b) => {
                let bigger = Bunch::mul(ctx.clone(), Bunch::leaf((**a).clone())).normalize();
                let child = self.prove(bigger, (**b).clone(), depth - 1, path)?;
                return Some(ProofNode::new("wand-r", here, vec![child]));
            }
            _ => {}
        }

        // invertible left rules at the first matching leaf
        for leaf_path in leaf_paths(&ctx) {
            let Ok(Bunch::Leaf(f)) = ctx.at(&leaf_path) else { continue };
            match f.clone() {
                Formula::Bottom => return Some(ProofNode::new("bot-l", here, vec![])),
                Formula::And(a, b) => {
                    let replacement = Bunch::add(Bunch::leaf((*a).clone()), Bunch::leaf((*b).clone()));
                    let next = ctx.substitute_at(&leaf_path, replacement).unwrap().normalize();
                    let child = self.prove(next, goal.clone(), depth - 1, path)?;
                    return Some(ProofNode::new("and-l", here, vec![child]));
                }
                Formula::Star(a, b) => {
                    let replacement = Bunch::mul(Bunch::leaf((*a).clone()), Bunch::leaf((*b).clone()));
                    let next = ctx.substitute_at(&leaf_path, replacement).unwrap().normalize();
                    let child = self.prove(next, goal.clone(), depth - 1, path)?;
                    return Some(ProofNode::new("star-l", here, vec![child]));
                }
                Formula::Top => {
                    let next = ctx.substitute_at(&leaf_path, Bunch::AddUnit).unwrap().normalize();
                    let child = self.prove(next, goal.clone(), depth - 1, path)?;
                    return Some(ProofNode::new("top-l", here, vec![child]));
                }
                Formula::MTop => {
                    let next = ctx.substitute_at(&leaf_path, Bunch::MulUnit).unwrap().normalize();
                    let child = self.prove(next, goal.clone(), depth - 1, path)?;
                    return Some(ProofNode::new("mtop-l", here, vec![child]));
                }
                Formula::Or(a, b) => {
                    let left_ctx = ctx.substitute_at(&leaf_path, Bunch::leaf((*a).clone())).unwrap().normalize();
                    let right_ctx = ctx.substitute_at(&leaf_path, Bunch::leaf((*b).clone())).unwrap().normalize();
                    let left = self.prove(left_ctx, goal.clone(), depth - 1, path)?;
                    let right = self.prove(right_ctx, goal.clone(), depth - 1, path)?;
                    return Some(ProofNode::new("or-l", here, vec![left, right]));
                }
                _ => {}
            }
        }

        let state = (ctx.clone(), goal.clone());
        if path.contains(&state) {
            return None;
        }
        path.push(state);
        let result = self.choices(&ctx, &goal, depth, path);
        path.pop();
        result
    }

    fn choices(&mut self, ctx: &Ctx, goal: &Formula, depth: usize, path: &mut Vec<(Ctx, Formula)>) -> Option<ProofNode> {
        let here = seq(ctx, goal);

        if ctx.extends(&Bunch::leaf(goal.clone())) {
            return Some(ProofNode::new("init", here, vec![]));
        }
        if *goal == Formula::MTop && ctx.extends(&Bunch::MulUnit) {
            return Some(ProofNode::new("mtop-r", here, vec![]));
        }
        if let Formula::Or(a, b) = goal {
            if let Some(child) = self.prove(ctx.clone(), (**a).clone(), depth - 1, path) {
                return Some(ProofNode::new("or-r1", here, vec![child]));
            }
            if let Some(child) = self.prove(ctx.clone(), (**b).clone(), depth - 1, path) {
                return Some(ProofNode::new("or-r2", here, vec![child]));
            }
        }
        if let Formula::Star(a, b) = goal {
            for (d1, d2) in mul_partitions(ctx) {
                let Some(left) = self.prove(d1, (**a).clone(), depth - 1, path) else { continue };
                let Some(right) = self.prove(d2, (**b).clone(), depth - 1, path) else { continue };
                return Some(ProofNode::new("star-r", here, vec![left, right]));
            }
        }

        // implication leaves
        for leaf_path in leaf_paths(ctx) {
            let Ok(Bunch::Leaf(f)) = ctx.at(&leaf_path) else { continue };
            match f.clone() {
                Formula::Imp(a, b) => {
                    let siblings = group_siblings(ctx, &leaf_path, JoinKind::Add);
                    let delta = rebuild(JoinKind::Add, siblings);
                    let Some(arg) = self.prove(delta, (*a).clone(), depth - 1, path) else { continue };
                    let next = ctx.substitute_at(&leaf_path, Bunch::leaf((*b).clone())).unwrap().normalize();
                    let Some(cont) = self.prove(next, goal.clone(), depth - 1, path) else { continue };
                    return Some(ProofNode::new("imp-l", here, vec![arg, cont]));
                }
                Formula::Wand(a, b) => {
                    for (delta, next) in wand_instances(ctx, &leaf_path, &b) {
                        let Some(arg) = self.prove(delta, (*a).clone(), depth - 1, path) else { continue };
                        let Some(cont) = self.prove(next, goal.clone(), depth - 1, path) else { continue };
                        return Some(ProofNode::new("wand-l", here, vec![arg, cont]));
                    }
                }
                _ => {}
            }
        }

        None
    }
}

fn leaf_paths(ctx: &Ctx) -> Vec<BunchPath> {
    ctx.occurrence_paths()
        .into_iter()
        .filter(|p| matches!(ctx.at(p), Ok(Bunch::Leaf(_))))
        .collect()
}

/// Flattened members of the largest same-kind group containing the leaf,
/// minus the leaf itself.
fn group_siblings(ctx: &Ctx, leaf_path: &BunchPath, kind: JoinKind) -> Vec<Ctx> {
    let mut j = leaf_path.0.len();
    while j > 0 {
        let prefix = BunchPath(leaf_path.0[..j - 1].to_vec());
        if ctx.at(&prefix).map(|n| n.join_kind() == Some(kind)).unwrap_or(false) {
            j -= 1;
        } else {
            break;
        }
    }
    if j == leaf_path.0.len() {
        return vec![];
    }
    let root = BunchPath(leaf_path.0[..j].to_vec());
    let group = ctx.at(&root).expect("group root");
    let leaf = ctx.at(leaf_path).expect("leaf");
    let mut members = group.canonical_children(kind);
    if let Some(i) = members.iter().position(|m| m == &leaf.normalize()) {
        members.remove(i);
    }
    members
}

/// Instances of the wand-left rule at a leaf: a chosen sub-multiset of the
/// leaf's multiplicative siblings feeds the antecedent; the occurrence of
/// (wand , chosen) collapses to the consequent.
fn wand_instances(ctx: &Ctx, leaf_path: &BunchPath, consequent: &Formula) -> Vec<(Ctx, Ctx)> {
    let mut out = Vec::new();
    // empty sibling choice: e* feeds the antecedent
    let plain = ctx.substitute_at(leaf_path, Bunch::leaf(consequent.clone())).unwrap().normalize();
    out.push((Bunch::MulUnit, plain));

    // locate the multiplicative group root
    let mut j = leaf_path.0.len();
    while j > 0 {
        let prefix = BunchPath(leaf_path.0[..j - 1].to_vec());
        if ctx.at(&prefix).map(|n| n.join_kind() == Some(JoinKind::Mul)).unwrap_or(false) {
            j -= 1;
        } else {
            break;
        }
    }
    if j == leaf_path.0.len() {
        return out;
    }
    let root = BunchPath(leaf_path.0[..j].to_vec());
    let group = ctx.at(&root).expect("group root").clone();
    let leaf = ctx.at(leaf_path).expect("leaf").normalize();
    let mut members = group.canonical_children(JoinKind::Mul);
    if let Some(i) = members.iter().position(|m| *m == leaf) {
        members.remove(i);
    }
    let n = members.len();
    for mask in 1u32..(1 << n) {
        let (mut chosen, mut rest) = (Vec::new(), Vec::new());
        for (i, m) in members.iter().enumerate() {
            if mask & (1 << i) != 0 {
                chosen.push(m.clone());
            } else {
                rest.push(m.clone());
            }
        }
        let delta = rebuild(JoinKind::Mul, chosen);
        rest.push(Bunch::leaf(consequent.clone()));
        let regrouped = rebuild(JoinKind::Mul, rest);
        let next = ctx.substitute_at(&root, regrouped).unwrap().normalize();
        out.push((delta, next));
    }
    out
}

/// Candidate multiplicative splits of anything the context weakens to.
fn mul_partitions(ctx: &Ctx) -> Vec<(Ctx, Ctx)> {
    let mut out = Vec::new();
    for d in ctx.weakening_downset() {
        out.push((d.clone(), Bunch::MulUnit));
        out.push((Bunch::MulUnit, d.clone()));
        if d.join_kind() == Some(JoinKind::Mul) {
            let children = d.canonical_children(JoinKind::Mul);
            let n = children.len();
            for mask in 1u32..(1 << n) - 1 {
                let (mut a, mut b) = (Vec::new(), Vec::new());
                for (i, c) in children.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        a.push(c.clone());
                    } else {
                        b.push(c.clone());
                    }
                }
                out.push((rebuild(JoinKind::Mul, a), rebuild(JoinKind::Mul, b)));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Local correctness of every node.
pub(crate) fn check(node: &ProofNode) -> bool {
    let ProofSequent::Bi { context, goal } = &node.sequent else { return false };
    let child = |i: usize| -> Option<(&Ctx, &Formula)> {
        node.children.get(i).and_then(|c| match &c.sequent {
            ProofSequent::Bi { context, goal } => Some((context, goal)),
            _ => None,
        })
    };
    let ctx = context.normalize();
    let ok = match node.rule.as_str() {
        "init" => ctx.extends(&Bunch::leaf(goal.clone())) && node.children.is_empty(),
        "top-r" => *goal == Formula::Top && node.children.is_empty(),
        "mtop-r" => *goal == Formula::MTop && ctx.extends(&Bunch::MulUnit) && node.children.is_empty(),
        "bot-l" => ctx.leaves().contains(&&Formula::Bottom) && node.children.is_empty(),
        "and-r" => matches!((goal, child(0), child(1)), (Formula::And(a, b), Some((c0, g0)), Some((c1, g1)))
            if c0.equiv(&ctx) && c1.equiv(&ctx) && g0 == &**a && g1 == &**b),
        "or-r1" => matches!((goal, child(0)), (Formula::Or(a, _), Some((c, g))) if c.equiv(&ctx) && g == &**a),
        "or-r2" => matches!((goal, child(0)), (Formula::Or(_, b), Some((c, g))) if c.equiv(&ctx) && g == &**b),
        "imp-r" => matches!((goal, child(0)), (Formula::Imp(a, b), Some((c, g)))
            if c.equiv(&Bunch::add(ctx.clone(), Bunch::leaf((**a).clone()))) && g == &**b),
        "wand-r" => matches!((goal, child(0)), (Formula::Wand(a, b), Some((c, g)))
            if c.equiv(&Bunch::mul(ctx.clone(), Bunch::leaf((**a).clone()))) && g == &**b),
        "star-r" => matches!((goal, child(0), child(1)), (Formula::Star(a, b), Some((c0, g0)), Some((c1, g1)))
            if g0 == &**a && g1 == &**b && ctx.extends(&Bunch::mul(c0.clone(), c1.clone()))),
        "and-l" => any_leaf(&ctx, |f, leaf_path| match f {
            Formula::And(a, b) => {
                let repl = Bunch::add(Bunch::leaf((**a).clone()), Bunch::leaf((**b).clone()));
                let next = ctx.substitute_at(leaf_path, repl).unwrap();
                matches!(child(0), Some((c, g)) if g == goal && c.equiv(&next))
            }
            _ => false,
        }),
        "star-l" => any_leaf(&ctx, |f, leaf_path| match f {
            Formula::Star(a, b) => {
                let repl = Bunch::mul(Bunch::leaf((**a).clone()), Bunch::leaf((**b).clone()));
                let next = ctx.substitute_at(leaf_path, repl).unwrap();
                matches!(child(0), Some((c, g)) if g == goal && c.equiv(&next))
            }
            _ => false,
        }),
        "top-l" => any_leaf(&ctx, |f, leaf_path| {
            *f == Formula::Top && {
                let next = ctx.substitute_at(leaf_path, Bunch::AddUnit).unwrap();
                matches!(child(0), Some((c, g)) if g == goal && c.equiv(&next))
            }
        }),
        "mtop-l" => any_leaf(&ctx, |f, leaf_path| {
            *f == Formula::MTop && {
                let next = ctx.substitute_at(leaf_path, Bunch::MulUnit).unwrap();
                matches!(child(0), Some((c, g)) if g == goal && c.equiv(&next))
            }
        }),
        "or-l" => any_leaf(&ctx, |f, leaf_path| match f {
            Formula::Or(a, b) => {
                let left = ctx.substitute_at(leaf_path, Bunch::leaf((**a).clone())).unwrap();
                let right = ctx.substitute_at(leaf_path, Bunch::leaf((**b).clone())).unwrap();
                matches!((child(0), child(1)), (Some((c0, g0)), Some((c1, g1)))
                    if g0 == goal && g1 == goal && c0.equiv(&left) && c1.equiv(&right))
            }
            _ => false,
        }),
        "imp-l" => any_leaf(&ctx, |f, leaf_path| match f {
            Formula::Imp(a, b) => {
                let delta = rebuild(JoinKind::Add, group_siblings(&ctx, leaf_path, JoinKind::Add));
                let next = ctx.substitute_at(leaf_path, Bunch::leaf((**b).clone())).unwrap();
                matches!((child(0), child(1)), (Some((c0, g0)), Some((c1, g1)))
                    if g0 == &**a && c0.equiv(&delta) && g1 == goal && c1.equiv(&next))
            }
            _ => false,
        }),
        "wand-l" => any_leaf(&ctx, |f, leaf_path| match f {
            Formula::Wand(a, b) => wand_instances(&ctx, leaf_path, b).iter().any(|(delta, next)| {
                matches!((child(0), child(1)), (Some((c0, g0)), Some((c1, g1)))
                    if g0 == &**a && c0.equiv(delta) && g1 == goal && c1.equiv(next))
            }),
            _ => false,
        }),
        "contract" => matches!(child(0), Some((c, g))
            if g == goal && crate::derivability::contractions(&c.normalize()).iter().any(|k| k.equiv(&ctx))),
        _ => false,
    };
    ok && node.children.iter().all(check)
}

fn any_leaf(ctx: &Ctx, pred: impl Fn(&Formula, &BunchPath) -> bool) -> bool {
    leaf_paths(ctx).iter().any(|p| match ctx.at(p) {
        Ok(Bunch::Leaf(f)) => pred(f, p),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_formula_bunch, Logic};

    fn p(src: &str) -> Formula {
        parse_formula(src, Logic::Bi).unwrap()
    }

    fn run(ctx: &str, goal: &str) -> ProofResult {
        let ctx = if ctx.is_empty() { Bunch::MulUnit } else { parse_formula_bunch(ctx, Logic::Bi).unwrap() };
        prove_bi(&ctx, &p(goal), &SearchBounds::default())
    }

    #[test]
    fn bi_identities() {
        assert!(run("", "p -> p").status.is_proved());
        assert!(run("", "p -* p").status.is_proved());
        assert!(run("", "(p * q) -* (q * p)").status.is_proved());
        assert!(run("", "p -> (q -> p)").status.is_proved());
        assert!(run("", "emp").status.is_proved());
        assert!(run("", "top").status.is_proved());
        assert!(run("", "(p /\\ q) -> (p \\/ q)").status.is_proved());
        assert!(run("", "(p * (p -* q)) -* q").status.is_proved());
    }

    #[test]
    fn bi_failures_are_definitive() {
        // separation is not sharing
        assert_eq!(run("", "(p /\\ q) -> (p * q)").status, ProofStatus::Refuted);
        // multiplicative weakening fails
        assert_eq!(run("", "(p * q) -* p").status, ProofStatus::Refuted);
        // wand is not implication
        assert_eq!(run("", "(p -* q) -> (p -> q)").status, ProofStatus::Refuted);
    }

    #[test]
    fn star_weakening_fails_but_top_absorbs() {
        // p * q entails neither conjunct alone
        assert_eq!(run("", "(p * q) -> (p /\\ q)").status, ProofStatus::Refuted);
        // but a unit split against top always exists
        let r = run("", "(p /\\ q) -> ((p /\\ q) * top)");
        assert!(r.status.is_proved(), "got {}", r.status.name());
    }

    #[test]
    fn mfa_bunch_proves() {
        let r = run("(((p * o) \\/ (p * fob) \\/ (o * fob)) -* s_acc) , p , o", "s_acc");
        assert!(r.status.is_proved(), "got {}", r.status.name());
        if let ProofStatus::Proved(t) = &r.status {
            assert!(check(t), "replay failed:\n{}", t.render());
        }
    }

    #[test]
    fn mfa_sharing_fails() {
        let r = run("(((p * o) \\/ (p * fob) \\/ (o * fob)) -* s_acc) , (p ; o)", "s_acc");
        assert_eq!(r.status, ProofStatus::Refuted, "sharing two factors is not enough");
    }

    #[test]
    fn proofs_replay() {
        for (ctx, goal) in [("", "p -> p"), ("", "(p * q) -* (q * p)"), ("p -* q , p", "q")] {
            let r = run(ctx, goal);
            if let ProofStatus::Proved(t) = &r.status {
                assert!(check(t), "replay failed for {goal}:\n{}", t.render());
            } else {
                panic!("expected proof for {goal}");
            }
        }
    }
}
