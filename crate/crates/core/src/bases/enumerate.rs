//! Bounded, deterministic enumeration of base extensions.
//!
//! This realizes the `forall C >= B` quantifiers of the semantics at desk
//! scale: every base that adds at most `max_added_rules` candidate rules
//! within the syntactic bounds, smallest first, then lexicographic on the
//! rule encoding.

use std::collections::BTreeSet;

use crate::bases::{Base, BiRule, BiSequent, ImallPremise, ImallRule, IplPremise, IplRule, PremiseGroup, Rules};
use crate::error::QueryError;
use crate::syntax::{Atom, Bunch, JoinKind, Multiset, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtensionBounds {
    /// How many rules an extension may add.
    pub max_added_rules: usize,
    /// Premises per rule (premise groups, for IMALL).
    pub max_premises: usize,
    /// Hypotheses per premise (leaves per context, for BI).
    pub max_hypotheses: usize,
    /// Refuse enumerations larger than this.
    pub cap: u128,
}

impl Default for ExtensionBounds {
    fn default() -> Self {
        ExtensionBounds { max_added_rules: 1, max_premises: 2, max_hypotheses: 1, cap: 200_000 }
    }
}

/// Every extension of `b` within `bounds`, starting with `b` itself.
pub fn enumerate_extensions(
    b: &Base,
    vocab: &Vocabulary,
    bounds: &ExtensionBounds,
) -> Result<Vec<Base>, QueryError> {
    let candidates = candidate_rules(b, vocab, bounds);
    let n = candidates.len() as u128;
    let mut estimate: u128 = 1;
    let mut choose: u128 = 1;
    for k in 0..bounds.max_added_rules.min(candidates.len()) {
        choose = choose.saturating_mul(n - k as u128) / (k as u128 + 1);
        estimate = estimate.saturating_add(choose);
    }
    if estimate > bounds.cap {
        return Err(QueryError::EnumerationCap { estimate, cap: bounds.cap });
    }

    let mut out = Vec::new();
    let mut subset = Vec::new();
    emit_subsets(b, &candidates, bounds.max_added_rules, 0, &mut subset, &mut out);
    Ok(out)
}

fn emit_subsets(
    b: &Base,
    candidates: &[CandidateRule],
    remaining: usize,
    from: usize,
    subset: &mut Vec<usize>,
    out: &mut Vec<Base>,
) {
    let mut ext = b.clone();
    for &i in subset.iter() {
        candidates[i].add_to(&mut ext);
    }
    out.push(ext);
    if remaining == 0 {
        return;
    }
    for i in from..candidates.len() {
        subset.push(i);
        emit_subsets(b, candidates, remaining - 1, i + 1, subset, out);
        subset.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum CandidateRule {
    Ipl(IplRule),
    Imall(ImallRule),
    Bi(BiRule),
}

impl CandidateRule {
    fn add_to(&self, base: &mut Base) {
        match self {
            CandidateRule::Ipl(r) => base.add_ipl_rule(r.clone()).expect("logic checked"),
            CandidateRule::Imall(r) => base.add_imall_rule(r.clone()).expect("logic checked"),
            CandidateRule::Bi(r) => base.add_bi_rule(r.clone()).expect("logic checked"),
        }
    }
}

fn candidate_rules(b: &Base, vocab: &Vocabulary, bounds: &ExtensionBounds) -> Vec<CandidateRule> {
    let atoms: Vec<Atom> = vocab.iter().cloned().collect();
    let mut out: BTreeSet<CandidateRule> = BTreeSet::new();
    match b.rules() {
        Rules::Ipl(existing) => {
            let premises = ipl_premises(&atoms, bounds.max_hypotheses);
            for concl in &atoms {
                for combo in subsets_up_to(&premises, bounds.max_premises) {
                    let rule = IplRule { premises: combo, conclusion: concl.clone() };
                    if !existing.contains(&rule) {
                        out.insert(CandidateRule::Ipl(rule));
                    }
                }
            }
        }
        Rules::Imall(existing) => {
            let premises = imall_premises(&atoms, bounds.max_hypotheses);
            let groups: Vec<PremiseGroup> = subsets_up_to(&premises, bounds.max_premises)
                .into_iter()
                .filter(|s| !s.is_empty())
                .map(PremiseGroup)
                .collect();
            for concl in &atoms {
                for combo in multisets_up_to(&groups, bounds.max_premises) {
                    if combo.iter().map(|g| g.0.len()).sum::<usize>() > bounds.max_premises {
                        continue;
                    }
                    let rule = ImallRule { groups: combo, conclusion: concl.clone() };
                    if !existing.contains(&rule) {
                        out.insert(CandidateRule::Imall(rule));
                    }
                }
            }
        }
        Rules::Bi { rules: existing, .. } => {
            let contexts = bunch_universe(&atoms, (2 * bounds.max_hypotheses).max(1));
            let mut sequents = Vec::new();
            for ctx in &contexts {
                for s in &atoms {
                    sequents.push(BiSequent { context: ctx.clone(), succedent: s.clone() });
                }
            }
            for concl in &sequents {
                for combo in subsets_up_to(&sequents, bounds.max_premises) {
                    let rule = BiRule { premises: combo, conclusion: concl.clone() };
                    if !existing.contains(&rule) {
                        out.insert(CandidateRule::Bi(rule));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn ipl_premises(atoms: &[Atom], max_hyps: usize) -> Vec<IplPremise> {
    let mut out = Vec::new();
    for hyps in subsets_up_to(atoms, max_hyps) {
        for concl in atoms {
            out.push(IplPremise { hypotheses: hyps.iter().cloned().collect(), conclusion: concl.clone() });
        }
    }
    out
}

fn imall_premises(atoms: &[Atom], max_hyps: usize) -> Vec<ImallPremise> {
    let mut out = Vec::new();
    for hyps in multisets_over(atoms, max_hyps) {
        for concl in atoms {
            out.push(ImallPremise { hypotheses: hyps.clone(), conclusion: concl.clone() });
        }
    }
    out
}

/// All subsets of `items` with at most `k` elements, in index order.
fn subsets_up_to<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for idx in &frontier {
            let start = idx.last().map(|i| i + 1).unwrap_or(0);
            for j in start..items.len() {
                let mut with = idx.clone();
                with.push(j);
                out.push(with.iter().map(|&i| items[i].clone()).collect());
                next.push(with);
            }
        }
        frontier = next;
    }
    out
}

/// All multisets (with repetition, order-insensitive) of at most `k` items.
fn multisets_up_to<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for idx in &frontier {
            let start = idx.last().copied().unwrap_or(0);
            for j in start..items.len() {
                let mut with = idx.clone();
                with.push(j);
                out.push(with.iter().map(|&i| items[i].clone()).collect());
                next.push(with);
            }
        }
        frontier = next;
    }
    out
}

/// All multisets of atoms with at most `k` elements.
pub fn multisets_over(atoms: &[Atom], k: usize) -> Vec<Multiset> {
    multisets_up_to(atoms, k)
        .into_iter()
        .map(|v| Multiset::from_iter(v.into_iter()))
        .collect()
}

/// All canonical bunches over `atoms` with at most `max_size` tree nodes,
/// in canonical order.
pub fn bunch_universe(atoms: &[Atom], max_size: usize) -> Vec<Bunch<Atom>> {
    let mut by_size: Vec<Vec<Bunch<Atom>>> = vec![Vec::new(); max_size + 1];
    if max_size == 0 {
        return Vec::new();
    }
    by_size[1].push(Bunch::AddUnit);
    by_size[1].push(Bunch::MulUnit);
    for a in atoms {
        by_size[1].push(Bunch::leaf(a.clone()));
    }
    for size in 3..=max_size {
        for kind in [JoinKind::Add, JoinKind::Mul] {
            // children multisets with sizes summing to size-(arity-1)
            let pool: Vec<Bunch<Atom>> = (1..size)
                .flat_map(|s| by_size[s].iter().cloned())
                .filter(|b| b.join_kind() != Some(kind) && *b != kind.unit())
                .collect();
            let mut acc: Vec<Bunch<Atom>> = Vec::new();
            collect_joins(kind, &pool, size, &mut Vec::new(), 0, &mut acc);
            by_size[size].extend(acc);
        }
    }
    let mut all: BTreeSet<Bunch<Atom>> = BTreeSet::new();
    for bucket in by_size {
        all.extend(bucket);
    }
    all.into_iter().collect()
}

/// All contextual bunches (canonical shape, one hole) over `atoms` with at
/// most `max_size` nodes.
pub fn contextual_universe(atoms: &[Atom], max_size: usize) -> Vec<crate::syntax::ContextualBunch<Atom>> {
    let marker = Vocabulary::from_iter(atoms.iter().cloned()).fresh("hole");
    let mut extended = atoms.to_vec();
    extended.push(marker.clone());
    let mut out = Vec::new();
    for b in bunch_universe(&extended, max_size) {
        let hole_count = b.leaves().iter().filter(|a| ***a == marker).count();
        if hole_count != 1 {
            continue;
        }
        let shape = b.map(&mut |a| {
            if *a == marker {
                crate::syntax::CtxLeaf::Hole
            } else {
                crate::syntax::CtxLeaf::Item(a.clone())
            }
        });
        out.push(crate::syntax::ContextualBunch::new(shape).expect("single hole"));
    }
    out
}

fn collect_joins(
    kind: JoinKind,
    pool: &[Bunch<Atom>],
    target_size: usize,
    chosen: &mut Vec<Bunch<Atom>>,
    from: usize,
    out: &mut Vec<Bunch<Atom>>,
) {
    let used: usize = chosen.iter().map(|b| b.size()).sum::<usize>() + chosen.len().saturating_sub(1);
    if chosen.len() >= 2 && used == target_size {
        let mut children = chosen.clone();
        children.sort();
        out.push(crate::syntax::rebuild(kind, children));
        return;
    }
    if used >= target_size {
        return;
    }
    for i in from..pool.len() {
        chosen.push(pool[i].clone());
        collect_joins(kind, pool, target_size, chosen, i, out);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Logic;

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    #[test]
    fn tiny_ipl_enumeration() {
        // vocab {p}, one rule, zero premises: the empty base and {axiom p}
        let b = Base::empty("b", Logic::Ipl);
        let vocab = Vocabulary::from_iter([at("p")]);
        let bounds = ExtensionBounds { max_added_rules: 1, max_premises: 0, max_hypotheses: 0, cap: 1000 };
        let got = enumerate_extensions(&b, &vocab, &bounds).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].rule_count(), 0);
        assert!(got[1].ipl_rules().unwrap().contains(&IplRule::axiom(at("p"))));
    }

    #[test]
    fn counted_ipl_enumeration() {
        // vocab {p,q}, one rule, at most one hypothesis-free premise:
        // 2 axioms + 2*2 one-premise rules, plus the unchanged base
        let b = Base::empty("b", Logic::Ipl);
        let vocab = Vocabulary::from_iter([at("p"), at("q")]);
        let bounds = ExtensionBounds { max_added_rules: 1, max_premises: 1, max_hypotheses: 0, cap: 1000 };
        let got = enumerate_extensions(&b, &vocab, &bounds).unwrap();
        assert_eq!(got.len(), 1 + 2 + 4);
    }

    #[test]
    fn input_base_comes_first_and_all_extend_it() {
        let b = Base::from_ipl_rules("b", [IplRule::axiom(at("p"))]);
        let vocab = Vocabulary::from_iter([at("p"), at("q")]);
        let bounds = ExtensionBounds { max_added_rules: 2, max_premises: 1, max_hypotheses: 1, cap: 100_000 };
        let got = enumerate_extensions(&b, &vocab, &bounds).unwrap();
        assert_eq!(got[0], b);
        assert!(got.iter().all(|e| e.includes(&b)));
    }

    #[test]
    fn cap_is_enforced() {
        let b = Base::empty("b", Logic::Bi);
        let vocab = Vocabulary::from_iter([at("p"), at("q")]);
        let bounds = ExtensionBounds { max_added_rules: 3, max_premises: 2, max_hypotheses: 2, cap: 10 };
        match enumerate_extensions(&b, &vocab, &bounds) {
            Err(QueryError::EnumerationCap { estimate, cap }) => {
                assert!(estimate > cap);
            }
            other => panic!("expected cap error, got {} bases", other.map(|v| v.len()).unwrap_or(0)),
        }
    }

    #[test]
    fn bunch_universe_small() {
        let atoms = [at("p"), at("q")];
        let u = bunch_universe(&atoms, 1);
        assert_eq!(u.len(), 4); // e+, e*, p, q
        let u3 = bunch_universe(&atoms, 3);
        // adds all two-child joins of distinct-or-equal non-unit-of-kind children
        assert!(u3.iter().any(|b| *b == Bunch::add(Bunch::leaf(at("p")), Bunch::leaf(at("q")))));
        assert!(u3.iter().any(|b| *b == Bunch::mul(Bunch::leaf(at("p")), Bunch::leaf(at("p")))));
        // everything canonical
        for b in &u3 {
            assert_eq!(b.normalize(), *b);
        }
    }
}
