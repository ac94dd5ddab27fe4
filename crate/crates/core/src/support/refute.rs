//! Counterexample search for the universal clauses.
//!
//! Enumerates base extensions, resource instantiations, and vocabulary atoms
//! within bounds, looking for an instance whose premises hold soundly while
//! the conclusion fails. Premises must hold by atomic reduction or a prover,
//! never by internalization, so a `Fails` witness always replays.
//!
//! Nested universal clauses share one extension allowance: rules added at an
//! outer quantifier are deducted from what inner quantifiers may add, which
//! keeps the enumeration from compounding level by level.

use crate::bases::{bunch_universe, contextual_universe, enumerate_extensions, multisets_over, Base};
use crate::support::{
    bi_judgment, imall_judgment, ipl_judgment, Evaluator, Judgment, Resource, SupportContext, Verdict,
};
use crate::syntax::{Atom, Bunch, ContextualBunch, Formula, JoinKind, Multiset, Vocabulary};

/// Resource instantiations are kept small; refutations live near the bottom
/// of the extension order.
const MAX_RESOURCE_MULTISET: usize = 2;
const MAX_RESOURCE_BUNCH: usize = 3;

impl Evaluator {
    /// Runs `f` with `spent` extension rules deducted from the allowance.
    fn with_spent<T>(&mut self, spent: usize, f: impl FnOnce(&mut Self) -> T) -> T {
        let saved = self.ext_budget;
        self.ext_budget = saved.saturating_sub(spent);
        let out = f(self);
        self.ext_budget = saved;
        out
    }
}

pub(crate) fn refute(eval: &mut Evaluator, j: &Judgment, depth: usize) -> Verdict {
    if depth == 0 {
        return Verdict::unknown("refutation depth exhausted");
    }
    let bounds = crate::bases::ExtensionBounds { max_added_rules: eval.ext_budget, ..eval.ext_bounds };
    let extensions = match enumerate_extensions(&j.base, &j.vocab, &bounds) {
        Ok(exts) => exts,
        Err(e) => return Verdict::unknown(e.to_string()),
    };
    let base_rules = j.base.rule_count();
    match (j.logic, j.context.is_empty()) {
        (crate::syntax::Logic::Ipl, true) => match &j.goal {
            Formula::Or(a, b) => ipl_or(eval, j, &extensions, base_rules, a, b, depth),
            _ => Verdict::unknown("no refutation procedure for this clause"),
        },
        (crate::syntax::Logic::Ipl, false) => ipl_inf(eval, j, &extensions, base_rules, depth),
        (crate::syntax::Logic::Imall, true) => match &j.goal {
            Formula::Tensor(a, b) => imall_tensor(eval, j, &extensions, base_rules, a, b, depth),
            Formula::Plus(a, b) => imall_plus(eval, j, &extensions, base_rules, a, b, depth),
            Formula::One => imall_one(eval, j, &extensions, base_rules, depth),
            _ => Verdict::unknown("no refutation procedure for this clause"),
        },
        (crate::syntax::Logic::Imall, false) => imall_inf(eval, j, &extensions, base_rules, depth),
        (crate::syntax::Logic::Bi, true) => bi_goal_clause(eval, j, &extensions, base_rules, depth),
        (crate::syntax::Logic::Bi, false) => bi_inf(eval, j, &extensions, base_rules, depth),
    }
}

fn no_witness() -> Verdict {
    Verdict::unknown("no counterexample within the enumeration bounds")
}

// ----- IPL ----------------------------------------------------------------

fn ipl_or(
    eval: &mut Evaluator,
    j: &Judgment,
    extensions: &[Base],
    base_rules: usize,
    a: &Formula,
    b: &Formula,
    depth: usize,
) -> Verdict {
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        for p in j.vocab.clone().iter() {
            let goal = Formula::Atom(p.clone());
            let found = eval.with_spent(spent, |e| {
                let prem1 = ipl_judgment(ext, &[a.clone()], &goal, &j.vocab);
                if !e.sound_premise(&prem1, depth - 1) {
                    return None;
                }
                let prem2 = ipl_judgment(ext, &[b.clone()], &goal, &j.vocab);
                if !e.sound_premise(&prem2, depth - 1) {
                    return None;
                }
                let concl = ipl_judgment(ext, &[], &goal, &j.vocab);
                let v = e.judgment(&concl, depth - 1);
                v.is_fails().then_some(v)
            });
            if let Some(v) = found {
                return v.noted(format!("disjunction clause refuted at extension `{}` with atom `{p}`", ext.name));
            }
        }
    }
    no_witness()
}

fn ipl_inf(eval: &mut Evaluator, j: &Judgment, extensions: &[Base], base_rules: usize, depth: usize) -> Verdict {
    let SupportContext::Ipl(ctx) = &j.context else { unreachable!() };
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        let found = eval.with_spent(spent, |e| {
            let all_premises = ctx.iter().all(|gamma| {
                let prem = ipl_judgment(ext, &[], gamma, &j.vocab);
                e.sound_premise(&prem, depth - 1)
            });
            if !all_premises {
                return None;
            }
            let concl = ipl_judgment(ext, &[], &j.goal, &j.vocab);
            let v = e.judgment(&concl, depth - 1);
            v.is_fails().then_some(v)
        });
        if let Some(v) = found {
            return v.noted(format!("context supported but goal fails at extension `{}`", ext.name));
        }
    }
    no_witness()
}

// ----- IMALL ---------------------------------------------------------------

fn resource_universe(vocab: &Vocabulary) -> Vec<Multiset> {
    let atoms: Vec<Atom> = vocab.iter().cloned().collect();
    multisets_over(&atoms, MAX_RESOURCE_MULTISET)
}

fn judgment_multiset(j: &Judgment) -> Multiset {
    match &j.resource {
        Resource::Multiset(m) => m.clone(),
        _ => Multiset::empty(),
    }
}

/// The tensor clause, read extension-monotone: the conclusion is placed at
/// the extension, as in the neighbouring clauses.
fn imall_tensor(
    eval: &mut Evaluator,
    j: &Judgment,
    extensions: &[Base],
    base_rules: usize,
    a: &Formula,
    b: &Formula,
    depth: usize,
) -> Verdict {
    let s = judgment_multiset(j);
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        for u in resource_universe(&j.vocab) {
            for p in j.vocab.clone().iter() {
                let goal = Formula::Atom(p.clone());
                let found = eval.with_spent(spent, |e| {
                    let prem = imall_judgment(ext, &[a.clone(), b.clone()], &u, &goal, &j.vocab);
                    if !e.sound_premise(&prem, depth - 1) {
                        return None;
                    }
                    let concl = imall_judgment(ext, &[], &s.union(&u), &goal, &j.vocab);
                    let v = e.judgment(&concl, depth - 1);
                    v.is_fails().then_some(v)
                });
                if let Some(v) = found {
                    return v
                        .noted(format!(
                            "tensor clause refuted at extension `{}`, resources {u}, atom `{p}`",
                            ext.name
                        ))
                        .noted("tensor clause read extension-monotone (conclusion at the extension)");
                }
            }
        }
    }
    no_witness()
}

fn imall_plus(
    eval: &mut Evaluator,
    j: &Judgment,
    extensions: &[Base],
    base_rules: usize,
    a: &Formula,
    b: &Formula,
    depth: usize,
) -> Verdict {
    let s = judgment_multiset(j);
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        for u in resource_universe(&j.vocab) {
            for p in j.vocab.clone().iter() {
                let goal = Formula::Atom(p.clone());
                let found = eval.with_spent(spent, |e| {
                    let prem1 = imall_judgment(ext, &[a.clone()], &u, &goal, &j.vocab);
                    if !e.sound_premise(&prem1, depth - 1) {
                        return None;
                    }
                    let prem2 = imall_judgment(ext, &[b.clone()], &u, &goal, &j.vocab);
                    if !e.sound_premise(&prem2, depth - 1) {
                        return None;
                    }
                    let concl = imall_judgment(ext, &[], &s.union(&u), &goal, &j.vocab);
                    let v = e.judgment(&concl, depth - 1);
                    v.is_fails().then_some(v)
                });
                if let Some(v) = found {
                    return v.noted(format!(
                        "sum clause refuted at extension `{}`, resources {u}, atom `{p}`",
                        ext.name
                    ));
                }
            }
        }
    }
    no_witness()
}

fn imall_one(eval: &mut Evaluator, j: &Judgment, extensions: &[Base], base_rules: usize, depth: usize) -> Verdict {
    let s = judgment_multiset(j);
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        for u in resource_universe(&j.vocab) {
            for p in j.vocab.clone().iter() {
                let goal = Formula::Atom(p.clone());
                let found = eval.with_spent(spent, |e| {
                    let prem = imall_judgment(ext, &[], &u, &goal, &j.vocab);
                    if !e.sound_premise(&prem, depth - 1) {
                        return None;
                    }
                    let concl = imall_judgment(ext, &[], &s.union(&u), &goal, &j.vocab);
                    let v = e.judgment(&concl, depth - 1);
                    v.is_fails().then_some(v)
                });
                if let Some(v) = found {
                    return v.noted(format!(
                        "unit clause refuted at extension `{}`, resources {u}, atom `{p}`",
                        ext.name
                    ));
                }
            }
        }
    }
    no_witness()
}

fn imall_inf(eval: &mut Evaluator, j: &Judgment, extensions: &[Base], base_rules: usize, depth: usize) -> Verdict {
    let SupportContext::Imall(ctx) = &j.context else { unreachable!() };
    let s = judgment_multiset(j);
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        for u in resource_universe(&j.vocab) {
            let found = eval.with_spent(spent, |e| {
                if !multiset_context_supported(e, ext, &u, ctx, &j.vocab, depth - 1) {
                    return None;
                }
                let concl = imall_judgment(ext, &[], &s.union(&u), &j.goal, &j.vocab);
                let v = e.judgment(&concl, depth - 1);
                v.is_fails().then_some(v)
            });
            if let Some(v) = found {
                return v.noted(format!(
                    "context supported at extension `{}` with resources {u} but the goal fails",
                    ext.name
                ));
            }
        }
    }
    no_witness()
}

/// The multiset-context clause: some split of the resources supports every
/// context formula.
fn multiset_context_supported(
    eval: &mut Evaluator,
    base: &Base,
    u: &Multiset,
    ctx: &[Formula],
    vocab: &Vocabulary,
    depth: usize,
) -> bool {
    if ctx.is_empty() {
        return u.is_empty();
    }
    for split in u.splits(ctx.len()) {
        let ok = split.iter().zip(ctx).all(|(share, gamma)| {
            let prem = imall_judgment(base, &[], share, gamma, vocab);
            eval.sound_premise(&prem, depth)
        });
        if ok {
            return true;
        }
    }
    false
}

// ----- BI -------------------------------------------------------------------

fn bi_resources(vocab: &Vocabulary) -> Vec<Bunch<Atom>> {
    let atoms: Vec<Atom> = vocab.iter().cloned().collect();
    let mut out = bunch_universe(&atoms, MAX_RESOURCE_BUNCH);
    out.sort_by_key(|b| b.size());
    out
}

fn bi_holes(vocab: &Vocabulary) -> Vec<ContextualBunch<Atom>> {
    let atoms: Vec<Atom> = vocab.iter().cloned().collect();
    let mut out = contextual_universe(&atoms, MAX_RESOURCE_BUNCH);
    out.sort_by_key(|c| c.size());
    out
}

fn judgment_bunch(j: &Judgment) -> Bunch<Atom> {
    match &j.resource {
        Resource::Bunch(b) => b.clone(),
        _ => Bunch::MulUnit,
    }
}

fn bi_goal_clause(eval: &mut Evaluator, j: &Judgment, extensions: &[Base], base_rules: usize, depth: usize) -> Verdict {
    let s = judgment_bunch(j);
    match &j.goal {
        Formula::And(a, b) => {
            let ctx = Bunch::add(Bunch::leaf((**a).clone()), Bunch::leaf((**b).clone()));
            bi_elim_clause(eval, j, extensions, base_rules, &s, vec![ctx], "conjunction", depth)
        }
        Formula::Star(a, b) => {
            let ctx = Bunch::mul(Bunch::leaf((**a).clone()), Bunch::leaf((**b).clone()));
            bi_elim_clause(eval, j, extensions, base_rules, &s, vec![ctx], "star", depth)
        }
        Formula::Or(a, b) => {
            let ctxs = vec![Bunch::leaf((**a).clone()), Bunch::leaf((**b).clone())];
            bi_elim_clause(eval, j, extensions, base_rules, &s, ctxs, "disjunction", depth)
        }
        Formula::Bottom => {
            // no extension quantifier: every U(S) must derive every atom at
            // the judgment's own base
            for hole in bi_holes(&j.vocab) {
                for p in j.vocab.clone().iter() {
                    let plugged = hole.apply(&s);
                    let concl =
                        bi_judgment(&j.base, None, &Resource::Bunch(plugged), &Formula::Atom(p.clone()), &j.vocab);
                    let v = eval.judgment(&concl, depth - 1);
                    if v.is_fails() {
                        return v.noted(format!("falsum clause refuted at hole {hole} and atom `{p}`"));
                    }
                }
            }
            no_witness()
        }
        Formula::MTop => {
            for ext in extensions {
                let spent = ext.rule_count().saturating_sub(base_rules);
                for hole in bi_holes(&j.vocab) {
                    for p in j.vocab.clone().iter() {
                        let goal = Formula::Atom(p.clone());
                        let found = eval.with_spent(spent, |e| {
                            let prem =
                                bi_judgment(ext, None, &Resource::Bunch(hole.apply(&Bunch::MulUnit)), &goal, &j.vocab);
                            if !e.sound_premise(&prem, depth - 1) {
                                return None;
                            }
                            let concl = bi_judgment(ext, None, &Resource::Bunch(hole.apply(&s)), &goal, &j.vocab);
                            let v = e.judgment(&concl, depth - 1);
                            v.is_fails().then_some(v)
                        });
                        if let Some(v) = found {
                            return v.noted(format!(
                                "multiplicative-unit clause refuted at `{}`, hole {hole}, atom `{p}`",
                                ext.name
                            ));
                        }
                    }
                }
            }
            no_witness()
        }
        _ => Verdict::unknown("no refutation procedure for this clause"),
    }
}

/// The elimination-shaped clauses: premises assert the parts support an
/// arbitrary atom at a contextual resource, the conclusion plugs S in.
fn bi_elim_clause(
    eval: &mut Evaluator,
    j: &Judgment,
    extensions: &[Base],
    base_rules: usize,
    s: &Bunch<Atom>,
    premise_ctxs: Vec<Bunch<Formula>>,
    what: &str,
    depth: usize,
) -> Verdict {
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        for hole in bi_holes(&j.vocab) {
            for p in j.vocab.clone().iter() {
                let goal = Formula::Atom(p.clone());
                let found = eval.with_spent(spent, |e| {
                    let all = premise_ctxs.iter().all(|ctx| {
                        let prem = bi_judgment(ext, Some(ctx), &Resource::Contextual(hole.clone()), &goal, &j.vocab);
                        e.sound_premise(&prem, depth - 1)
                    });
                    if !all {
                        return None;
                    }
                    let concl = bi_judgment(ext, None, &Resource::Bunch(hole.apply(s)), &goal, &j.vocab);
                    let v = e.judgment(&concl, depth - 1);
                    v.is_fails().then_some(v)
                });
                if let Some(v) = found {
                    return v.noted(format!(
                        "{what} clause refuted at extension `{}`, hole {hole}, atom `{p}`",
                        ext.name
                    ));
                }
            }
        }
    }
    no_witness()
}

fn bi_inf(eval: &mut Evaluator, j: &Judgment, extensions: &[Base], base_rules: usize, depth: usize) -> Verdict {
    let SupportContext::Bi(Some(ctx)) = &j.context else { unreachable!() };
    let Resource::Contextual(r) = &j.resource else { unreachable!() };
    for ext in extensions {
        let spent = ext.rule_count().saturating_sub(base_rules);
        for u in bi_resources(&j.vocab) {
            let found = eval.with_spent(spent, |e| {
                if !bunch_context_supported(e, ext, &u, ctx, &j.vocab, depth - 1) {
                    return None;
                }
                let concl = bi_judgment(ext, None, &Resource::Bunch(r.apply(&u)), &j.goal, &j.vocab);
                let v = e.judgment(&concl, depth - 1);
                v.is_fails().then_some(v)
            });
            if let Some(v) = found {
                return v.noted(format!(
                    "context supported at extension `{}` with resources {u} but the goal fails",
                    ext.name
                ));
            }
        }
    }
    no_witness()
}

/// The bunched-context clauses: additive junctures share the resources
/// (each part gets something the whole extends), multiplicative junctures
/// split them.
fn bunch_context_supported(
    eval: &mut Evaluator,
    base: &Base,
    u: &Bunch<Atom>,
    ctx: &Bunch<Formula>,
    vocab: &Vocabulary,
    depth: usize,
) -> bool {
    if depth == 0 {
        return false;
    }
    match ctx {
        Bunch::Leaf(f) => {
            let prem = bi_judgment(base, None, &Resource::Bunch(u.clone()), f, vocab);
            eval.sound_premise(&prem, depth)
        }
        Bunch::AddUnit => true,
        Bunch::MulUnit => u.extends(&Bunch::MulUnit),
        Bunch::AddJoin(l, r) => {
            let downset = u.weakening_downset();
            downset.iter().any(|q1| bunch_context_supported(eval, base, q1, l, vocab, depth - 1))
                && downset.iter().any(|q2| bunch_context_supported(eval, base, q2, r, vocab, depth - 1))
        }
        Bunch::MulJoin(l, r) => {
            for (q1, q2) in mul_splits(u) {
                if bunch_context_supported(eval, base, &q1, l, vocab, depth - 1)
                    && bunch_context_supported(eval, base, &q2, r, vocab, depth - 1)
                {
                    return true;
                }
            }
            false
        }
    }
}

/// Pairs (Q1, Q2) with `u >= Q1 , Q2`.
pub(crate) fn mul_splits(u: &Bunch<Atom>) -> Vec<(Bunch<Atom>, Bunch<Atom>)> {
    let mut out = Vec::new();
    for d in u.weakening_downset() {
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
                out.push((crate::syntax::rebuild(JoinKind::Mul, a), crate::syntax::rebuild(JoinKind::Mul, b)));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}
