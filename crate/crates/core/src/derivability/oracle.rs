//! Independent least-fixpoint oracle for derivability.
//!
//! Computes the smallest relation closed under the clauses by naive repeated
//! application over a bounded context universe, with no search optimizations.
//! Weakening materializes every in-universe consequence, so rule matching is
//! exact. The engines are cross-checked against this on small instances.

use std::collections::BTreeSet;

use crate::bases::{bunch_universe, contextual_universe, multisets_over, Base, Rules};
use crate::derivability::Sequent;
use crate::error::QueryError;
use crate::syntax::{rebuild, Atom, Bunch, JoinKind, Multiset, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBounds {
    /// Atom slice size above which the oracle refuses to run.
    pub max_atoms: usize,
    /// Multiset size bound for the IMALL universe.
    pub max_multiset: usize,
    /// Canonical node bound for the BI bunch universe.
    pub max_bunch_size: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { max_atoms: 6, max_multiset: 4, max_bunch_size: 7 }
    }
}

/// Naive fixpoint membership for the queried sequent.
pub fn derive_oracle(base: &Base, query: &Sequent, bounds: &OracleBounds) -> Result<bool, QueryError> {
    let mut vocab = base.vocabulary();
    match query {
        Sequent::Ipl { context, goal } => {
            for a in context {
                vocab.insert(a.clone());
            }
            vocab.insert(goal.clone());
            check_atoms(&vocab, bounds)?;
            if base.logic() != crate::syntax::Logic::Ipl {
                return Err(QueryError::LogicMismatch { expected: "IPL", got: base.logic().name() });
            }
            Ok(ipl_fixpoint(base, &vocab).contains(&(context.clone(), goal.clone())))
        }
        Sequent::Imall { context, goal } => {
            for a in context.iter() {
                vocab.insert(a.clone());
            }
            vocab.insert(goal.clone());
            check_atoms(&vocab, bounds)?;
            if context.len() > bounds.max_multiset {
                return Err(QueryError::Shape("query context exceeds the oracle universe".into()));
            }
            if base.logic() != crate::syntax::Logic::Imall {
                return Err(QueryError::LogicMismatch { expected: "IMALL", got: base.logic().name() });
            }
            Ok(imall_fixpoint(base, &vocab, bounds).contains(&(context.clone(), goal.clone())))
        }
        Sequent::Bi { context, goal } => {
            for a in context.leaves() {
                vocab.insert(a.clone());
            }
            vocab.insert(goal.clone());
            check_atoms(&vocab, bounds)?;
            let canonical = context.normalize();
            if canonical.size() > bounds.max_bunch_size {
                return Err(QueryError::Shape("query context exceeds the oracle universe".into()));
            }
            if base.logic() != crate::syntax::Logic::Bi {
                return Err(QueryError::LogicMismatch { expected: "BI", got: base.logic().name() });
            }
            Ok(bi_fixpoint(base, &vocab, bounds)?.contains(&(canonical, goal.clone())))
        }
    }
}

fn check_atoms(vocab: &Vocabulary, bounds: &OracleBounds) -> Result<(), QueryError> {
    if vocab.len() > bounds.max_atoms {
        return Err(QueryError::Shape(format!(
            "atom slice of {} exceeds the oracle bound of {}",
            vocab.len(),
            bounds.max_atoms
        )));
    }
    Ok(())
}

fn ipl_fixpoint(base: &Base, vocab: &Vocabulary) -> BTreeSet<(BTreeSet<Atom>, Atom)> {
    let atoms: Vec<Atom> = vocab.iter().cloned().collect();
    let contexts = all_subsets(&atoms);
    let rules = match base.rules() {
        Rules::Ipl(r) => r,
        _ => unreachable!(),
    };
    let mut derived: BTreeSet<(BTreeSet<Atom>, Atom)> = BTreeSet::new();
    loop {
        let mut added = false;
        for c in &contexts {
            for a in c {
                added |= derived.insert((c.clone(), a.clone()));
            }
            for r in rules {
                if r.is_axiom() {
                    added |= derived.insert((c.clone(), r.conclusion.clone()));
                    continue;
                }
                let all = r.premises.iter().all(|p| {
                    let bigger: BTreeSet<Atom> = c.union(&p.hypotheses).cloned().collect();
                    derived.contains(&(bigger, p.conclusion.clone()))
                });
                if all {
                    added |= derived.insert((c.clone(), r.conclusion.clone()));
                }
            }
        }
        if !added {
            return derived;
        }
    }
}

fn imall_fixpoint(base: &Base, vocab: &Vocabulary, bounds: &OracleBounds) -> BTreeSet<(Multiset, Atom)> {
    let atoms: Vec<Atom> = vocab.iter().cloned().collect();
    let universe = multisets_over(&atoms, bounds.max_multiset);
    let rules = match base.rules() {
        Rules::Imall(r) => r,
        _ => unreachable!(),
    };
    let mut derived: BTreeSet<(Multiset, Atom)> = BTreeSet::new();
    loop {
        let mut added = false;
        for a in &atoms {
            added |= derived.insert((Multiset::singleton(a.clone()), a.clone()));
        }
        for r in rules {
            if r.is_axiom() {
                added |= derived.insert((Multiset::empty(), r.conclusion.clone()));
                continue;
            }
            // every assignment of universe shares to premise groups
            let k = r.groups.len();
            let mut tuple = vec![0usize; k];
            'tuples: loop {
                let shares: Vec<&Multiset> = tuple.iter().map(|&i| &universe[i]).collect();
                let mut union = Multiset::empty();
                for s in &shares {
                    union = union.union(s);
                }
                if union.len() <= bounds.max_multiset {
                    let ok = r.groups.iter().zip(&shares).all(|(group, share)| {
                        group.0.iter().all(|p| {
                            let ctx = share.union(&p.hypotheses);
                            ctx.len() <= bounds.max_multiset && derived.contains(&(ctx, p.conclusion.clone()))
                        })
                    });
                    if ok {
                        added |= derived.insert((union, r.conclusion.clone()));
                    }
                }
                // advance the tuple odometer
                for slot in 0..k {
                    tuple[slot] += 1;
                    if tuple[slot] < universe.len() {
                        continue 'tuples;
                    }
                    tuple[slot] = 0;
                }
                break;
            }
        }
        if !added {
            return derived;
        }
    }
}

fn bi_fixpoint(
    base: &Base,
    vocab: &Vocabulary,
    bounds: &OracleBounds,
) -> Result<BTreeSet<(Bunch<Atom>, Atom)>, QueryError> {
    let atoms: Vec<Atom> = vocab.iter().cloned().collect();
    let universe: BTreeSet<Bunch<Atom>> = bunch_universe(&atoms, bounds.max_bunch_size).into_iter().collect();
    let (ground, schemas) = match base.rules() {
        Rules::Bi { rules, schemas } => (rules.clone(), schemas.clone()),
        _ => unreachable!(),
    };

    // pre-instantiate schemas over bounded holes and the atom slice
    let mut rules: Vec<crate::bases::BiRule> = ground.into_iter().collect();
    if !schemas.is_empty() {
        let holes = contextual_universe(&atoms, bounds.max_bunch_size);
        for schema in &schemas {
            let mut bindings = vec![crate::bases::AtomBinding::new()];
            for v in &schema.atom_vars {
                let mut next = Vec::new();
                for b in &bindings {
                    for a in &atoms {
                        let mut b2 = b.clone();
                        b2.insert(v.clone(), a.clone());
                        next.push(b2);
                    }
                }
                bindings = next;
            }
            for hole in &holes {
                for binding in &bindings {
                    if let Ok(rule) = schema.instantiate(hole, binding) {
                        rules.push(rule);
                    }
                }
            }
        }
    }

    // the closure is computed fact by fact: when a fact arrives, weakening,
    // contraction, rule application, and cut against everything already
    // present are applied once
    let mut derived: BTreeSet<(Bunch<Atom>, Atom)> = BTreeSet::new();
    let mut queue: std::collections::VecDeque<(Bunch<Atom>, Atom)> = std::collections::VecDeque::new();
    let push = |fact: (Bunch<Atom>, Atom),
                    derived: &mut BTreeSet<(Bunch<Atom>, Atom)>,
                    queue: &mut std::collections::VecDeque<(Bunch<Atom>, Atom)>| {
        if fact.0.size() <= bounds.max_bunch_size && derived.insert(fact.clone()) {
            queue.push_back(fact);
        }
    };
    for a in &atoms {
        push((Bunch::leaf(a.clone()), a.clone()), &mut derived, &mut queue);
    }
    while let Some((ctx, goal)) = queue.pop_front() {
        // rules whose premises are now all present
        for r in &rules {
            let concl = (r.conclusion.context.normalize(), r.conclusion.succedent.clone());
            if derived.contains(&concl) {
                continue;
            }
            let ok = r
                .premises
                .iter()
                .all(|p| derived.contains(&(p.context.normalize(), p.succedent.clone())));
            if ok {
                push(concl, &mut derived, &mut queue);
            }
        }
        let occurrences = masked_occurrences(&ctx);
        for (occurrence, plug) in &occurrences {
            // weak: insert any universe bunch additively at this occurrence
            let room = bounds.max_bunch_size.saturating_sub(ctx.size() + 1);
            for extra in &universe {
                if extra.size() > room && *extra != Bunch::AddUnit {
                    continue;
                }
                let weakened = plug(&Bunch::add(occurrence.clone(), extra.clone()));
                if weakened.size() <= bounds.max_bunch_size && universe.contains(&weakened) {
                    push((weakened, goal.clone()), &mut derived, &mut queue);
                }
            }
            // cont: halve an occurrence whose children split evenly
            if let Some(halved) = halve_additive(occurrence) {
                push((plug(&halved), goal.clone()), &mut derived, &mut queue);
            }
        }
        // cut in both roles against everything seen so far
        let snapshot: Vec<(Bunch<Atom>, Atom)> = derived.iter().cloned().collect();
        for (other_ctx, other_goal) in &snapshot {
            // this fact as S(q) |- p, the other as T |- q
            for (occurrence, plug) in &occurrences {
                if *occurrence == Bunch::leaf(other_goal.clone()) {
                    push((plug(other_ctx), goal.clone()), &mut derived, &mut queue);
                }
            }
            // this fact as T |- q, the other as S(q) |- p
            for (occurrence, plug) in masked_occurrences(other_ctx) {
                if occurrence == Bunch::leaf(goal.clone()) {
                    push((plug(&ctx), other_goal.clone()), &mut derived, &mut queue);
                }
            }
        }
    }
    Ok(derived)
}

type Plug = Box<dyn Fn(&Bunch<Atom>) -> Bunch<Atom>>;

/// Occurrences of a canonical bunch modulo exchange: every node, and every
/// nonempty sub-multiset of a join node's flattened children. The plug
/// rebuilds the canonical whole with the occurrence replaced.
fn masked_occurrences(b: &Bunch<Atom>) -> Vec<(Bunch<Atom>, Plug)> {
    let mut out: Vec<(Bunch<Atom>, Plug)> = Vec::new();
    out.push((b.clone(), Box::new(|x| x.normalize())));
    if let Some(kind) = b.join_kind() {
        let children = b.canonical_children(kind);
        let n = children.len();
        for mask in 1u32..(1 << n) - 1 {
            let (mut chosen, mut rest) = (Vec::new(), Vec::new());
            for (i, c) in children.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    chosen.push(c.clone());
                } else {
                    rest.push(c.clone());
                }
            }
            if mask.count_ones() == 1 {
                // recurse into the single child
                let child = chosen[0].clone();
                let rest_for_child = rest.clone();
                for (occ, plug) in masked_occurrences(&child) {
                    let rest2 = rest_for_child.clone();
                    let outer: Plug = Box::new(move |x| {
                        let mut parts = rest2.clone();
                        parts.push(plug(x));
                        rebuild(kind, parts).normalize()
                    });
                    out.push((occ, outer));
                }
            } else {
                let occurrence = rebuild(kind, chosen);
                let rest2 = rest.clone();
                let plug: Plug = Box::new(move |x| {
                    let mut parts = rest2.clone();
                    parts.push(x.clone());
                    rebuild(kind, parts).normalize()
                });
                out.push((occurrence, plug));
            }
        }
    }
    out
}

/// If the bunch is an additive join whose children halve evenly, the half.
fn halve_additive(b: &Bunch<Atom>) -> Option<Bunch<Atom>> {
    if b.join_kind() != Some(JoinKind::Add) {
        return None;
    }
    let children = b.canonical_children(JoinKind::Add);
    if children.len() % 2 != 0 {
        return None;
    }
    let mut half = Vec::new();
    let mut iter = children.into_iter().peekable();
    while let Some(c) = iter.next() {
        match iter.peek() {
            Some(next) if *next == c => {
                half.push(c);
                iter.next();
            }
            _ => return None,
        }
    }
    Some(rebuild(JoinKind::Add, half))
}

fn all_subsets(atoms: &[Atom]) -> Vec<BTreeSet<Atom>> {
    let mut out = vec![BTreeSet::new()];
    for a in atoms {
        let mut next = Vec::with_capacity(out.len() * 2);
        for s in &out {
            next.push(s.clone());
            let mut with = s.clone();
            with.insert(a.clone());
            next.push(with);
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{BiRule, BiSequent, IplRule};
    use crate::syntax::{parse_bunch, Logic};

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    #[test]
    fn empty_base_ipl_is_ref_only() {
        let b = Base::empty("b", Logic::Ipl);
        let bounds = OracleBounds::default();
        let ctx: BTreeSet<Atom> = [at("p")].into_iter().collect();
        assert!(derive_oracle(&b, &Sequent::Ipl { context: ctx.clone(), goal: at("p") }, &bounds).unwrap());
        assert!(!derive_oracle(&b, &Sequent::Ipl { context: ctx, goal: at("q") }, &bounds).unwrap());
        assert!(!derive_oracle(&b, &Sequent::Ipl { context: BTreeSet::new(), goal: at("p") }, &bounds).unwrap());
    }

    #[test]
    fn ipl_axioms_everywhere() {
        let b = Base::from_ipl_rules("b", [IplRule::axiom(at("a"))]);
        let bounds = OracleBounds::default();
        let ctx: BTreeSet<Atom> = [at("q")].into_iter().collect();
        assert!(derive_oracle(&b, &Sequent::Ipl { context: ctx, goal: at("a") }, &bounds).unwrap());
    }

    #[test]
    fn imall_ref_is_exact() {
        let b = Base::empty("b", Logic::Imall);
        let bounds = OracleBounds::default();
        let one = Multiset::singleton(at("p"));
        let two = one.union(&one);
        assert!(derive_oracle(&b, &Sequent::Imall { context: one, goal: at("p") }, &bounds).unwrap());
        assert!(!derive_oracle(&b, &Sequent::Imall { context: two, goal: at("p") }, &bounds).unwrap());
    }

    #[test]
    fn bi_weak_and_cont_closure() {
        let b = Base::empty("b", Logic::Bi);
        let bounds = OracleBounds::default();
        // (p ; p) |- p and p |- p both present
        let pp = parse_bunch("p ; p").unwrap();
        assert!(derive_oracle(&b, &Sequent::Bi { context: pp, goal: at("p") }, &bounds).unwrap());
        assert!(derive_oracle(&b, &Sequent::Bi { context: parse_bunch("p").unwrap(), goal: at("p") }, &bounds)
            .unwrap());
        // no multiplicative weakening
        let pq = parse_bunch("p , q").unwrap();
        assert!(!derive_oracle(&b, &Sequent::Bi { context: pq, goal: at("p") }, &bounds).unwrap());
    }

    #[test]
    fn bi_cont_through_rule() {
        let rule = BiRule::axiom(BiSequent { context: parse_bunch("p ; p").unwrap(), succedent: at("q") });
        let b = Base::from_bi_rules("b", [rule]);
        let bounds = OracleBounds::default();
        assert!(derive_oracle(&b, &Sequent::Bi { context: parse_bunch("p").unwrap(), goal: at("q") }, &bounds)
            .unwrap());
    }

    #[test]
    fn refuses_oversized_universe() {
        let b = Base::empty("b", Logic::Ipl);
        let bounds = OracleBounds { max_atoms: 1, ..OracleBounds::default() };
        let ctx: BTreeSet<Atom> = [at("p"), at("q")].into_iter().collect();
        assert!(derive_oracle(&b, &Sequent::Ipl { context: ctx, goal: at("p") }, &bounds).is_err());
    }
}
