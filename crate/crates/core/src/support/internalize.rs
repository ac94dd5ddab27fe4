//! Base internalization: translating atomic rules to formulas and asking
//! the prover. Soundness of this reading for fixed-base support is not a
//! theorem; positive answers are flagged `Internalized` and guarded
//! empirically against the refutation engine.

use crate::bases::{Base, BiRule, ImallRule, IplRule, Rules};
use crate::provers::{prove, ProofContext, ProofStatus};
use crate::support::{Evaluator, Evidence, Judgment, Method, Resource, SupportContext, Verdict};
use crate::syntax::{Atom, Bunch, CtxLeaf, Formula, JoinKind, Logic, Multiset};

pub(crate) fn internalized_holds(eval: &mut Evaluator, j: &Judgment) -> Verdict {
    let Some(theory) = translate_base(&j.base) else {
        return Verdict::unknown("internalization does not cover rule schemas");
    };
    let query = match j.logic {
        Logic::Ipl => {
            let SupportContext::Ipl(ctx) = &j.context else { unreachable!() };
            let mut all = ctx.clone();
            all.extend(theory);
            Some((ProofContext::Ipl(all), j.goal.clone()))
        }
        Logic::Imall => {
            let (SupportContext::Imall(ctx), Resource::Multiset(s)) = (&j.context, &j.resource) else {
                unreachable!()
            };
            let mut all = ctx.clone();
            all.extend(theory);
            let goal = match tensor_of(s) {
                Some(res) => Formula::lolli(res, j.goal.clone()),
                None => j.goal.clone(),
            };
            Some((ProofContext::Imall(all), goal))
        }
        Logic::Bi => bi_query(j, theory),
    };
    let Some((ctx, goal)) = query else {
        return Verdict::unknown("internalization does not cover this judgment shape");
    };
    match prove(j.logic, &ctx, &goal, &eval.bounds) {
        Ok(r) => match r.status {
            ProofStatus::Proved(tree) => Verdict::holds(Method::Internalized, Evidence::Proof(Box::new(tree)))
                .noted("heuristic: base rules internalized as formulas"),
            _ => Verdict::unknown("internalized query not proved"),
        },
        Err(e) => Verdict::unknown(e.to_string()),
    }
}

fn bi_query(j: &Judgment, theory: Vec<Formula>) -> Option<(ProofContext, Formula)> {
    let theory_bunch = if theory.is_empty() {
        None
    } else {
        Some(crate::syntax::rebuild(JoinKind::Add, theory.into_iter().map(Bunch::leaf).collect()))
    };
    let resource_part: Bunch<Formula> = match (&j.context, &j.resource) {
        (SupportContext::Bi(None), Resource::Bunch(s)) => s.map(&mut |a: &Atom| Formula::Atom(a.clone())),
        (SupportContext::Bi(Some(ctx)), Resource::Contextual(r)) => {
            // plug the context into the resource hole
            r.shape().bind(&mut |leaf| match leaf {
                CtxLeaf::Item(a) => Bunch::leaf(Formula::Atom(a.clone())),
                CtxLeaf::Hole => ctx.clone(),
            })
        }
        _ => return None,
    };
    let full = match theory_bunch {
        Some(tb) => Bunch::add(tb, resource_part),
        None => resource_part,
    };
    Some((ProofContext::Bi(full), j.goal.clone()))
}

fn translate_base(base: &Base) -> Option<Vec<Formula>> {
    match base.rules() {
        Rules::Ipl(rules) => Some(rules.iter().map(ipl_rule_formula).collect()),
        Rules::Imall(rules) => Some(rules.iter().map(imall_rule_formula).collect()),
        Rules::Bi { rules, schemas } => {
            if !schemas.is_empty() {
                return None;
            }
            Some(rules.iter().map(bi_rule_formula).collect())
        }
    }
}

/// `(P1 -> p1) -> ... -> (Pn -> pn) -> p`, hypothesis sets as conjunctions.
fn ipl_rule_formula(rule: &IplRule) -> Formula {
    let conclusion = Formula::Atom(rule.conclusion.clone());
    rule.premises.iter().rev().fold(conclusion, |acc, premise| {
        let body = Formula::Atom(premise.conclusion.clone());
        let prem = match and_of(premise.hypotheses.iter().cloned()) {
            Some(hyps) => Formula::imp(hyps, body),
            None => body,
        };
        Formula::imp(prem, acc)
    })
}

/// `(g1 * ... * gk) -o p` where each group is a `&` of its premises and each
/// premise is `hyps-tensor -o q`.
fn imall_rule_formula(rule: &ImallRule) -> Formula {
    let conclusion = Formula::Atom(rule.conclusion.clone());
    if rule.groups.is_empty() {
        return conclusion;
    }
    let groups: Vec<Formula> = rule
        .groups
        .iter()
        .map(|group| {
            let premises: Vec<Formula> = group
                .0
                .iter()
                .map(|p| {
                    let body = Formula::Atom(p.conclusion.clone());
                    match tensor_of(&p.hypotheses) {
                        Some(h) => Formula::lolli(h, body),
                        None => body,
                    }
                })
                .collect();
            fold_binary(premises, Formula::with).expect("group is nonempty")
        })
        .collect();
    Formula::lolli(fold_binary(groups, Formula::tensor).expect("groups nonempty"), conclusion)
}

/// `(t(P1) -* p1) /\ ... -> (t(P) -* p)` with the bunch translation
/// `; -> /\`, `, -> *`, `e+ -> top`, `e* -> emp`.
fn bi_rule_formula(rule: &BiRule) -> Formula {
    let seq_formula = |ctx: &Bunch<Atom>, succ: &Atom| {
        Formula::wand(bunch_formula(ctx), Formula::Atom(succ.clone()))
    };
    let conclusion = seq_formula(&rule.conclusion.context, &rule.conclusion.succedent);
    let premises: Vec<Formula> = rule.premises.iter().map(|p| seq_formula(&p.context, &p.succedent)).collect();
    match fold_binary(premises, Formula::and) {
        Some(ps) => Formula::imp(ps, conclusion),
        None => conclusion,
    }
}

fn bunch_formula(b: &Bunch<Atom>) -> Formula {
    match b {
        Bunch::Leaf(a) => Formula::Atom(a.clone()),
        Bunch::AddUnit => Formula::Top,
        Bunch::MulUnit => Formula::MTop,
        Bunch::AddJoin(l, r) => Formula::and(bunch_formula(l), bunch_formula(r)),
        Bunch::MulJoin(l, r) => Formula::star(bunch_formula(l), bunch_formula(r)),
    }
}

fn and_of(atoms: impl Iterator<Item = Atom>) -> Option<Formula> {
    fold_binary(atoms.map(Formula::Atom).collect(), Formula::and)
}

fn tensor_of(m: &Multiset) -> Option<Formula> {
    fold_binary(m.iter().cloned().map(Formula::Atom).collect(), Formula::tensor)
}

fn fold_binary(mut parts: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    let last = parts.pop()?;
    Some(parts.into_iter().rev().fold(last, |acc, f| join(f, acc)))
}
