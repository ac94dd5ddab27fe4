//! IPL derivability: a terminating least-fixpoint computation.
//!
//! Backward application of `app2` only ever grows the context by rule
//! hypothesis sets, so the contexts reachable from the query form a finite
//! universe. We close that universe forward under ref/app1/app2; the engine
//! is therefore a complete decision procedure and never returns `Exhausted`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::bases::{Base, IplRule};
use crate::derivability::{
    Clause, DerivationNode, DerivationResult, DerivationStatus, RuleUse, SearchStats, Sequent,
};
use crate::error::QueryError;
use crate::syntax::Atom;

type Ctx = BTreeSet<Atom>;

#[derive(Clone)]
enum Just {
    Ref,
    App1(IplRule),
    App2(IplRule),
}

pub fn derive_ipl(base: &Base, context: &Ctx, goal: &Atom) -> Result<DerivationResult, QueryError> {
    let rules: Vec<&IplRule> = base.ipl_rules()?.iter().collect();

    // the finite context universe reachable from `context`
    let mut universe: BTreeSet<Ctx> = BTreeSet::new();
    let mut queue: VecDeque<Ctx> = VecDeque::new();
    universe.insert(context.clone());
    queue.push_back(context.clone());
    while let Some(c) = queue.pop_front() {
        for r in &rules {
            for p in &r.premises {
                let bigger: Ctx = c.union(&p.hypotheses).cloned().collect();
                if universe.insert(bigger.clone()) {
                    queue.push_back(bigger);
                }
            }
        }
    }

    // least fixpoint of ref/app1/app2 over the universe
    let mut derived: BTreeMap<(Ctx, Atom), (usize, Just)> = BTreeMap::new();
    let mut order = 0usize;
    for c in &universe {
        for a in c {
            derived.entry((c.clone(), a.clone())).or_insert_with(|| {
                order += 1;
                (order, Just::Ref)
            });
        }
        for r in &rules {
            if r.is_axiom() {
                derived.entry((c.clone(), r.conclusion.clone())).or_insert_with(|| {
                    order += 1;
                    (order, Just::App1((*r).clone()))
                });
            }
        }
    }
    let mut stats = SearchStats::default();
    loop {
        let mut added = false;
        for c in &universe {
            'rules: for r in &rules {
                if r.is_axiom() || derived.contains_key(&(c.clone(), r.conclusion.clone())) {
                    continue;
                }
                for p in &r.premises {
                    let bigger: Ctx = c.union(&p.hypotheses).cloned().collect();
                    if !derived.contains_key(&(bigger, p.conclusion.clone())) {
                        continue 'rules;
                    }
                }
                order += 1;
                stats.nodes_expanded += 1;
                derived.insert((c.clone(), r.conclusion.clone()), (order, Just::App2((*r).clone())));
                added = true;
            }
        }
        if !added {
            break;
        }
    }

    let status = if derived.contains_key(&(context.clone(), goal.clone())) {
        let tree = rebuild_tree(&derived, context, goal);
        stats.depth_reached = tree_depth(&tree);
        DerivationStatus::Derivable(tree)
    } else {
        DerivationStatus::NotDerivable
    };
    Ok(DerivationResult { status, stats })
}

fn rebuild_tree(derived: &BTreeMap<(Ctx, Atom), (usize, Just)>, context: &Ctx, goal: &Atom) -> DerivationNode {
    let sequent = Sequent::Ipl { context: context.clone(), goal: goal.clone() };
    let (_, just) = &derived[&(context.clone(), goal.clone())];
    match just {
        Just::Ref => DerivationNode::leafish(Clause::Ref, sequent),
        Just::App1(rule) => DerivationNode {
            clause: Clause::App1,
            sequent,
            rule: Some(RuleUse::Ipl(rule.clone())),
            splits: vec![],
            children: vec![],
        },
        Just::App2(rule) => {
            let children = rule
                .premises
                .iter()
                .map(|p| {
                    let bigger: Ctx = context.union(&p.hypotheses).cloned().collect();
                    rebuild_tree(derived, &bigger, &p.conclusion)
                })
                .collect();
            DerivationNode {
                clause: Clause::App2,
                sequent,
                rule: Some(RuleUse::Ipl(rule.clone())),
                splits: vec![],
                children,
            }
        }
    }
}

fn tree_depth(node: &DerivationNode) -> usize {
    1 + node.children.iter().map(tree_depth).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::IplPremise;
    use crate::derivability::replay;

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    fn ctx(names: &[&str]) -> Ctx {
        names.iter().map(|n| at(n)).collect()
    }

    #[test]
    fn ref_clause() {
        let b = Base::empty("b", crate::syntax::Logic::Ipl);
        let r = derive_ipl(&b, &ctx(&["p"]), &at("p")).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert_eq!(t.clause, Clause::Ref);
            assert!(replay(&b, t));
        }
        assert!(!derive_ipl(&b, &ctx(&[]), &at("p")).unwrap().is_derivable());
    }

    #[test]
    fn app1_clause() {
        let b = Base::from_ipl_rules("b", [IplRule::axiom(at("a"))]);
        let r = derive_ipl(&b, &ctx(&[]), &at("a")).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert_eq!(t.clause, Clause::App1);
            assert!(replay(&b, t));
        }
    }

    #[test]
    fn app2_with_hypothetical_premise() {
        // rule: from (q |- q under hypothesis set {}) ... premise ({} |- q) => p
        let rule = IplRule {
            premises: vec![IplPremise { hypotheses: BTreeSet::new(), conclusion: at("q") }],
            conclusion: at("p"),
        };
        let b = Base::from_ipl_rules("b", [rule]);
        let r = derive_ipl(&b, &ctx(&["q"]), &at("p")).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert_eq!(t.clause, Clause::App2);
            assert_eq!(t.children[0].clause, Clause::Ref);
            assert!(replay(&b, t));
        }
        assert!(!derive_ipl(&b, &ctx(&[]), &at("p")).unwrap().is_derivable());
    }

    #[test]
    fn discharged_hypotheses() {
        // rule: premise ({q} |- r) => p  with base also deriving r from q
        let lift = IplRule {
            premises: vec![IplPremise { hypotheses: ctx(&["q"]), conclusion: at("r") }],
            conclusion: at("p"),
        };
        let qr = IplRule {
            premises: vec![IplPremise { hypotheses: BTreeSet::new(), conclusion: at("q") }],
            conclusion: at("r"),
        };
        let b = Base::from_ipl_rules("b", [lift, qr]);
        // hypothesis q is discharged inside the premise, so empty context works
        let r = derive_ipl(&b, &ctx(&[]), &at("p")).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
        }
    }

    #[test]
    fn context_monotone() {
        let b = Base::from_ipl_rules("b", [IplRule::axiom(at("a"))]);
        assert!(derive_ipl(&b, &ctx(&["z"]), &at("a")).unwrap().is_derivable());
    }

    #[test]
    fn logic_mismatch() {
        let b = Base::empty("b", crate::syntax::Logic::Bi);
        assert!(derive_ipl(&b, &ctx(&[]), &at("p")).is_err());
    }
}
