//! IMALL derivability: backward search with lazy context threading.
//!
//! Premise groups consume disjoint shares of the context. Rather than
//! enumerating partitions eagerly, a sub-search receives the whole remaining
//! pool and reports every leftover it can leave, which fixes the share drawn
//! by its group; the next group starts from the leftover.
//!
//! Rule cycles are handled by tabling: a search state is (pool multiset,
//! goal), a revisit answers from the table, and the whole search is
//! iterated until the table stops growing. Hypothesis discharge grows the
//! pool along a dependency chain; a chain that re-asks the same goal with a
//! strictly grown pool more than a small allowance is cut off and answered
//! from the table. Derivations needing deeper same-goal growth than the
//! allowance are out of reach of this engine; the exhaustive oracle
//! cross-checks gate that trade. A depth or budget cut without a verdict
//! reports `Exhausted`.

use std::collections::BTreeMap;

use crate::bases::{Base, ImallRule};
use crate::derivability::{
    Clause, DerivationNode, DerivationResult, DerivationStatus, RuleUse, SearchBounds, SearchStats, Sequent,
};
use crate::error::QueryError;
use crate::syntax::{Atom, Multiset};

type State = (Multiset, Atom);
type Answers = BTreeMap<Multiset, DerivationNode>;

pub fn derive_imall(
    base: &Base,
    context: &Multiset,
    goal: &Atom,
    bounds: &SearchBounds,
) -> Result<DerivationResult, QueryError> {
    let rules: Vec<ImallRule> = base.imall_rules()?.iter().cloned().collect();
    let mut stats = SearchStats::default();
    let mut depth = 6usize.min(bounds.max_depth.max(1));
    loop {
        let mut search = Search {
            rules: &rules,
            budget: bounds.node_budget,
            nodes: 0,
            depth_hit: false,
            budget_hit: false,
            table: BTreeMap::new(),
            visited: std::collections::BTreeSet::new(),
            stack: Vec::new(),
            grew: false,
        };
        // iterate the depth-bounded search until the answer table is stable
        loop {
            search.grew = false;
            search.depth_hit = false;
            search.visited.clear();
            search.prove(context, goal, depth);
            let answered = search
                .table
                .get(&(context.clone(), goal.clone()))
                .map(|a| a.contains_key(&Multiset::empty()))
                .unwrap_or(false);
            if answered || !search.grew || search.budget_hit {
                break;
            }
        }
        stats.nodes_expanded += search.nodes;
        stats.depth_reached = stats.depth_reached.max(depth);
        let answers = search.table.get(&(context.clone(), goal.clone()));
        if let Some(tree) = answers.and_then(|a| a.get(&Multiset::empty())) {
            return Ok(DerivationResult { status: DerivationStatus::Derivable(tree.clone()), stats });
        }
        let exhausted = search.depth_hit || search.budget_hit;
        if depth >= bounds.max_depth || !exhausted {
            let status = if exhausted { DerivationStatus::Exhausted } else { DerivationStatus::NotDerivable };
            return Ok(DerivationResult { status, stats });
        }
        depth = (depth * 2).min(bounds.max_depth);
    }
}

struct Search<'a> {
    rules: &'a [ImallRule],
    budget: usize,
    nodes: usize,
    depth_hit: bool,
    budget_hit: bool,
    /// Answers per state: trees proving `(pool - leftover) |- goal`.
    table: BTreeMap<State, Answers>,
    /// States already expanded in the current pass; revisits answer from
    /// the table and the outer fixpoint loop repairs staleness.
    visited: std::collections::BTreeSet<State>,
    /// The chain of states currently being expanded, for the growth cut.
    stack: Vec<State>,
    grew: bool,
}

/// How many strictly-growing same-goal ancestors a chain may pass through.
const GROWTH_ALLOWANCE: usize = 3;

impl Search<'_> {
    fn record(&mut self, state: &State, leftover: Multiset, tree: DerivationNode) {
        let entry = self.table.entry(state.clone()).or_default();
        if !entry.contains_key(&leftover) {
            entry.insert(leftover, tree);
            self.grew = true;
        }
    }

    /// Explores `pool |- goal`, recording every achievable leftover.
    /// Returns the answers known for the state afterwards.
    fn prove(&mut self, pool: &Multiset, goal: &Atom, depth: usize) -> Answers {
        let state = (pool.clone(), goal.clone());
        if self.visited.contains(&state) {
            // answer from the table; the outer iteration refills it
            return self.table.get(&state).cloned().unwrap_or_default();
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.budget_hit = true;
            return self.table.get(&state).cloned().unwrap_or_default();
        }
        // growth cut: the same goal with a strictly grown pool, too often
        let growth = self
            .stack
            .iter()
            .filter(|(p, g)| g == goal && p.subset_of(pool) && p != pool)
            .count();
        if growth >= GROWTH_ALLOWANCE {
            return self.table.get(&state).cloned().unwrap_or_default();
        }

        self.visited.insert(state.clone());
        self.stack.push(state.clone());

        // ref: consume exactly one occurrence of the goal
        if pool.contains(goal) {
            let mut leftover = pool.clone();
            leftover.remove_one(goal);
            let tree = DerivationNode::leafish(
                Clause::Ref,
                Sequent::Imall { context: Multiset::singleton(goal.clone()), goal: goal.clone() },
            );
            self.record(&state, leftover, tree);
        }
        for rule in self.rules {
            if rule.conclusion != *goal {
                continue;
            }
            if rule.is_axiom() {
                let tree = DerivationNode {
                    clause: Clause::App1,
                    sequent: Sequent::Imall { context: Multiset::empty(), goal: goal.clone() },
                    rule: Some(RuleUse::Imall(rule.clone())),
                    splits: vec![],
                    children: vec![],
                };
                self.record(&state, pool.clone(), tree);
                continue;
            }
            if depth == 0 {
                self.depth_hit = true;
                if std::env::var("RSW_DEBUG_DEPTH").is_ok() {
                    eprintln!("depth cut at: {} |- {}", pool, goal);
                }
                continue;
            }
            for (leftover, splits, children) in self.solve_groups(rule, 0, pool, depth - 1) {
                let consumed = pool.difference(&leftover);
                let tree = DerivationNode {
                    clause: Clause::App2,
                    sequent: Sequent::Imall { context: consumed, goal: goal.clone() },
                    rule: Some(RuleUse::Imall(rule.clone())),
                    splits,
                    children,
                };
                self.record(&state, leftover, tree);
            }
        }
        self.stack.pop();
        self.table.get(&state).cloned().unwrap_or_default()
    }

    /// Solves rule groups from `group_idx` on, threading the pool through.
    fn solve_groups(
        &mut self,
        rule: &ImallRule,
        group_idx: usize,
        pool: &Multiset,
        depth: usize,
    ) -> Vec<(Multiset, Vec<Multiset>, Vec<DerivationNode>)> {
        let Some(group) = rule.groups.get(group_idx) else {
            return vec![(pool.clone(), vec![], vec![])];
        };
        let mut results = Vec::new();
        let first = &group.0[0];
        let first_pool = pool.union(&first.hypotheses);
        let candidates = self.prove(&first_pool, &first.conclusion, depth);
        for (leftover, first_tree) in candidates {
            // hypotheses must be fully consumed by the premise derivation
            if !leftover.subset_of(pool) {
                continue;
            }
            let share = pool.difference(&leftover);
            let mut children = vec![first_tree];
            let mut ok = true;
            for premise in &group.0[1..] {
                let premise_pool = share.union(&premise.hypotheses);
                let exact = self.prove(&premise_pool, &premise.conclusion, depth);
                match exact.get(&Multiset::empty()) {
                    Some(tree) => children.push(tree.clone()),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            for (final_leftover, mut splits, mut rest_children) in
                self.solve_groups(rule, group_idx + 1, &leftover, depth)
            {
                let mut all_splits = vec![share.clone()];
                splits.drain(..).for_each(|s| all_splits.push(s));
                let mut all_children = children.clone();
                all_children.append(&mut rest_children);
                results.push((final_leftover, all_splits, all_children));
            }
        }
        results
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{ImallPremise, PremiseGroup};
    use crate::derivability::replay;
    use crate::syntax::Logic;

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    fn ms(names: &[&str]) -> Multiset {
        Multiset::from_iter(names.iter().map(|n| at(n)))
    }

    /// The vending-machine base: one rule with a single hypothesis-free
    /// premise `e1`, concluding `c`.
    pub(crate) fn vending_base() -> Base {
        let rule = ImallRule {
            groups: vec![PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("e1") }])],
            conclusion: at("c"),
        };
        Base::from_imall_rules("V", [rule])
    }

    #[test]
    fn ref_is_strict() {
        let b = Base::empty("b", Logic::Imall);
        let bounds = SearchBounds::default();
        assert!(derive_imall(&b, &ms(&["p"]), &at("p"), &bounds).unwrap().is_derivable());
        // linearity: two copies do not derive one use
        let r = derive_imall(&b, &ms(&["p", "p"]), &at("p"), &bounds).unwrap();
        assert_eq!(r.status, DerivationStatus::NotDerivable);
        let r = derive_imall(&b, &Multiset::empty(), &at("p"), &bounds).unwrap();
        assert_eq!(r.status, DerivationStatus::NotDerivable);
    }

    #[test]
    fn one_euro_buys_one_chocolate() {
        let b = vending_base();
        let bounds = SearchBounds::default();
        let r = derive_imall(&b, &ms(&["e1"]), &at("c"), &bounds).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
        }
        // no way to consume both euros for one bar
        let r = derive_imall(&b, &ms(&["e1", "e1"]), &at("c"), &bounds).unwrap();
        assert_eq!(r.status, DerivationStatus::NotDerivable);
    }

    #[test]
    fn groups_share_their_slice() {
        // rule with one group of two premises: {(|- a), (|- b)} => w
        // both premises must be derivable from the same share
        let rule = ImallRule {
            groups: vec![PremiseGroup(vec![
                ImallPremise { hypotheses: Multiset::empty(), conclusion: at("a") },
                ImallPremise { hypotheses: Multiset::empty(), conclusion: at("b") },
            ])],
            conclusion: at("w"),
        };
        let b = Base::from_imall_rules("b", [rule]);
        let bounds = SearchBounds::default();
        // a single resource cannot be both a and b
        let r = derive_imall(&b, &ms(&["a"]), &at("w"), &bounds).unwrap();
        assert_eq!(r.status, DerivationStatus::NotDerivable);
    }

    #[test]
    fn two_groups_split_the_context() {
        // rule: ({ |- a }) ({ |- b }) => w
        let rule = ImallRule {
            groups: vec![
                PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("a") }]),
                PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("b") }]),
            ],
            conclusion: at("w"),
        };
        let b = Base::from_imall_rules("b", [rule]);
        let bounds = SearchBounds::default();
        let r = derive_imall(&b, &ms(&["a", "b"]), &at("w"), &bounds).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
            assert_eq!(t.splits.len(), 2);
        }
        assert!(!derive_imall(&b, &ms(&["a"]), &at("w"), &bounds).unwrap().is_derivable());
        assert!(!derive_imall(&b, &ms(&["a", "b", "b"]), &at("w"), &bounds).unwrap().is_derivable());
    }

    #[test]
    fn hypotheses_are_discharged() {
        // rule: ({ [e1] |- c }) => l   ("if c under hypothesis e1, then l")
        let rule = ImallRule {
            groups: vec![PremiseGroup(vec![ImallPremise {
                hypotheses: Multiset::singleton(at("e1")),
                conclusion: at("c"),
            }])],
            conclusion: at("l"),
        };
        let b = vending_base().union(&Base::from_imall_rules("L", [rule])).unwrap();
        let bounds = SearchBounds::default();
        let r = derive_imall(&b, &Multiset::empty(), &at("l"), &bounds).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
        }
    }

    #[test]
    fn looping_rule_terminates() {
        // rule: ({ |- p }) => p can never fire productively
        let rule = ImallRule {
            groups: vec![PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("p") }])],
            conclusion: at("p"),
        };
        let b = Base::from_imall_rules("b", [rule]);
        let bounds = SearchBounds::default();
        let r = derive_imall(&b, &ms(&["q"]), &at("p"), &bounds).unwrap();
        assert_eq!(r.status, DerivationStatus::NotDerivable);
    }

    #[test]
    fn tabled_cycle_with_shrinking_consumption() {
        // Rx: ({ |- g }) => x and R1: ({ |- x })({ |- g }) => g.
        // Deriving g,g |- g needs the inner search for g to answer from the
        // table while the same state is on the path.
        let rx = ImallRule {
            groups: vec![PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("g") }])],
            conclusion: at("x"),
        };
        let r1 = ImallRule {
            groups: vec![
                PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("x") }]),
                PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("g") }]),
            ],
            conclusion: at("g"),
        };
        let b = Base::from_imall_rules("b", [rx, r1]);
        let bounds = SearchBounds::default();
        let r = derive_imall(&b, &ms(&["g", "g"]), &at("g"), &bounds).unwrap();
        assert!(r.is_derivable(), "tabling must find the two-copy derivation");
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
        }
    }
}
