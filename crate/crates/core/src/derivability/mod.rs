//! Derivability in a base for the three regimes, with replayable
//! derivation trees and an independent brute-force oracle.

mod bi;
mod imall;
mod ipl;
mod oracle;

pub use bi::derive_bi;
pub use imall::derive_imall;
pub use ipl::derive_ipl;
pub use oracle::{derive_oracle, OracleBounds};

use std::collections::BTreeSet;
use std::fmt;

use crate::bases::{AtomBinding, Base, BiRule, ImallRule, IplRule};
use crate::syntax::{render_bunch, Atom, Bunch, ContextualBunch, Multiset};

/// Search limits. Exceeding them yields `Exhausted`, never a wrong verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_depth: usize,
    /// Canonical leaf bound on BI contexts (also used as linear-zone cap).
    pub max_context_size: usize,
    pub node_budget: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_depth: 24, max_context_size: 12, node_budget: 1_000_000 }
    }
}

/// A sequent as recorded in derivation trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequent {
    Ipl { context: BTreeSet<Atom>, goal: Atom },
    Imall { context: Multiset, goal: Atom },
    Bi { context: Bunch<Atom>, goal: Atom },
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequent::Ipl { context, goal } => {
                let parts: Vec<&str> = context.iter().map(|a| a.name()).collect();
                write!(f, "{} |- {}", parts.join(" , "), goal)
            }
            Sequent::Imall { context, goal } => write!(f, "{context} |- {goal}"),
            Sequent::Bi { context, goal } => write!(f, "{} |- {}", render_bunch(context), goal),
        }
    }
}

/// Clause names, mirroring the definitions of derivability in a base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Ref,
    App1,
    App2,
    Taut,
    Initial,
    Rule,
    Weak,
    Cont,
    Exch,
    Cut,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::Ref => "ref",
            Clause::App1 => "app1",
            Clause::App2 => "app2",
            Clause::Taut => "taut",
            Clause::Initial => "initial",
            Clause::Rule => "rule",
            Clause::Weak => "weak",
            Clause::Cont => "cont",
            Clause::Exch => "exch",
            Clause::Cut => "cut",
        }
    }
}

/// The base rule justifying an `app`/`rule`/`initial` node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleUse {
    Ipl(IplRule),
    Imall(ImallRule),
    Bi(BiRule),
    /// A schema instance; the ground rule is recomputed on replay.
    BiSchema {
        schema: crate::bases::BiSchema,
        hole: ContextualBunch<Atom>,
        binding: AtomBinding,
    },
}

impl RuleUse {
    /// Resolves to the ground BI rule this use stands for.
    pub fn bi_rule(&self) -> Option<BiRule> {
        match self {
            RuleUse::Bi(r) => Some(r.clone()),
            RuleUse::BiSchema { schema, hole, binding } => schema.instantiate(hole, binding).ok(),
            _ => None,
        }
    }
}

/// A node-labelled derivation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationNode {
    pub clause: Clause,
    pub sequent: Sequent,
    pub rule: Option<RuleUse>,
    /// For IMALL `app2`: the context share assigned to each premise group.
    pub splits: Vec<Multiset>,
    pub children: Vec<DerivationNode>,
}

impl DerivationNode {
    pub fn leafish(clause: Clause, sequent: Sequent) -> DerivationNode {
        DerivationNode { clause, sequent, rule: None, splits: vec![], children: vec![] }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        fn go(node: &DerivationNode, depth: usize, out: &mut String) {
            let rule = match &node.rule {
                Some(RuleUse::BiSchema { schema, .. }) => format!("  [schema {schema}]"),
                Some(_) => "  [base rule]".to_string(),
                None => String::new(),
            };
            out.push_str(&format!("{}{}: {}{}\n", "  ".repeat(depth), node.clause.name(), node.sequent, rule));
            for c in &node.children {
                go(c, depth + 1, out);
            }
        }
        go(self, 0, &mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub depth_reached: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationStatus {
    Derivable(DerivationNode),
    NotDerivable,
    /// A configured bound was hit before a verdict was reached.
    Exhausted,
}

impl DerivationStatus {
    pub fn is_derivable(&self) -> bool {
        matches!(self, DerivationStatus::Derivable(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            DerivationStatus::Derivable(_) => "Derivable",
            DerivationStatus::NotDerivable => "NotDerivable",
            DerivationStatus::Exhausted => "Exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationResult {
    pub status: DerivationStatus,
    pub stats: SearchStats,
}

impl DerivationResult {
    pub fn is_derivable(&self) -> bool {
        self.status.is_derivable()
    }
}

/// Pure replay of a derivation tree against a base. Returns false on any
/// malformed node.
pub fn replay(base: &Base, node: &DerivationNode) -> bool {
    match (&node.sequent, node.clause) {
        (Sequent::Ipl { context, goal }, Clause::Ref) => context.contains(goal) && node.children.is_empty(),
        (Sequent::Ipl { .. }, Clause::App1) => match (&node.rule, &node.sequent) {
            (Some(RuleUse::Ipl(r)), Sequent::Ipl { goal, .. }) => {
                r.is_axiom() && r.conclusion == *goal && base.ipl_rules().map(|rs| rs.contains(r)).unwrap_or(false)
            }
            _ => false,
        },
        (Sequent::Ipl { context, goal }, Clause::App2) => {
            let Some(RuleUse::Ipl(r)) = &node.rule else { return false };
            if r.conclusion != *goal || !base.ipl_rules().map(|rs| rs.contains(r)).unwrap_or(false) {
                return false;
            }
            if node.children.len() != r.premises.len() {
                return false;
            }
            r.premises.iter().zip(&node.children).all(|(p, child)| {
                let expected: BTreeSet<Atom> = context.union(&p.hypotheses).cloned().collect();
                matches!(&child.sequent, Sequent::Ipl { context: c, goal: g } if *c == expected && *g == p.conclusion)
                    && replay(base, child)
            })
        }
        (Sequent::Imall { context, goal }, Clause::Ref) => context.is_singleton_of(goal) && node.children.is_empty(),
        (Sequent::Imall { context, goal }, Clause::App1) => {
            let Some(RuleUse::Imall(r)) = &node.rule else { return false };
            r.is_axiom()
                && r.conclusion == *goal
                && context.is_empty()
                && base.imall_rules().map(|rs| rs.contains(r)).unwrap_or(false)
        }
        (Sequent::Imall { context, goal }, Clause::App2) => {
            let Some(RuleUse::Imall(r)) = &node.rule else { return false };
            if r.conclusion != *goal || !base.imall_rules().map(|rs| rs.contains(r)).unwrap_or(false) {
                return false;
            }
            if node.splits.len() != r.groups.len() {
                return false;
            }
            let mut union = Multiset::empty();
            for s in &node.splits {
                union = union.union(s);
            }
            if union != *context {
                return false;
            }
            let mut child_iter = node.children.iter();
            for (share, group) in node.splits.iter().zip(&r.groups) {
                for premise in &group.0 {
                    let Some(child) = child_iter.next() else { return false };
                    let expected = share.union(&premise.hypotheses);
                    let ok = matches!(&child.sequent, Sequent::Imall { context: c, goal: g }
                        if *c == expected && *g == premise.conclusion);
                    if !ok || !replay(base, child) {
                        return false;
                    }
                }
            }
            child_iter.next().is_none()
        }
        (Sequent::Bi { context, goal }, Clause::Taut) => {
            context.equiv(&Bunch::leaf(goal.clone())) && node.children.is_empty()
        }
        (Sequent::Bi { context, goal }, Clause::Initial) => {
            let Some(rule_use) = &node.rule else { return false };
            let Some(rule) = rule_use.bi_rule() else { return false };
            rule.premises.is_empty()
                && rule.conclusion.context.equiv(context)
                && rule.conclusion.succedent == *goal
                && rule_use_in_base(base, rule_use)
        }
        (Sequent::Bi { context, goal }, Clause::Rule) => {
            let Some(rule_use) = &node.rule else { return false };
            let Some(rule) = rule_use.bi_rule() else { return false };
            if !rule.conclusion.context.equiv(context) || rule.conclusion.succedent != *goal {
                return false;
            }
            if !rule_use_in_base(base, rule_use) || node.children.len() != rule.premises.len() {
                return false;
            }
            rule.premises.iter().zip(&node.children).all(|(p, child)| {
                matches!(&child.sequent, Sequent::Bi { context: c, goal: g }
                    if c.equiv(&p.context) && *g == p.succedent)
                    && replay(base, child)
            })
        }
        (Sequent::Bi { context, goal }, Clause::Weak) => {
            // generalized: any additive weakenings plus exchange
            let [child] = node.children.as_slice() else { return false };
            matches!(&child.sequent, Sequent::Bi { context: c, goal: g }
                if *g == *goal && context.extends(c))
                && replay(base, child)
        }
        (Sequent::Bi { context, goal }, Clause::Exch) => {
            let [child] = node.children.as_slice() else { return false };
            matches!(&child.sequent, Sequent::Bi { context: c, goal: g } if *g == *goal && c.equiv(context))
                && replay(base, child)
        }
        (Sequent::Bi { context, goal }, Clause::Cont) => {
            let [child] = node.children.as_slice() else { return false };
            let Sequent::Bi { context: c, goal: g } = &child.sequent else { return false };
            g == goal && contractions(c).iter().any(|k| k.equiv(context)) && replay(base, child)
        }
        (Sequent::Bi { context, goal }, Clause::Cut) => {
            let [left, right] = node.children.as_slice() else { return false };
            let (Sequent::Bi { context: t, goal: q }, Sequent::Bi { context: s, goal: p }) =
                (&left.sequent, &right.sequent)
            else {
                return false;
            };
            if p != goal {
                return false;
            }
            cut_results(s, q, t).iter().any(|k| k.equiv(context)) && replay(base, left) && replay(base, right)
        }
        _ => false,
    }
}

fn rule_use_in_base(base: &Base, rule_use: &RuleUse) -> bool {
    let Ok((rules, schemas)) = base.bi_rules() else { return false };
    match rule_use {
        RuleUse::Bi(r) => rules.contains(r),
        RuleUse::BiSchema { schema, .. } => schemas.contains(schema),
        _ => false,
    }
}

/// All single contractions of a canonical bunch: at each additive node, drop
/// one duplicated child.
pub(crate) fn contractions<T: Clone + Ord>(b: &Bunch<T>) -> Vec<Bunch<T>> {
    let b = b.normalize();
    let mut out = BTreeSet::new();
    for path in b.occurrence_paths() {
        let here = b.at(&path).expect("own path");
        if here.join_kind() != Some(crate::syntax::JoinKind::Add) {
            continue;
        }
        let children = here.canonical_children(crate::syntax::JoinKind::Add);
        for i in 0..children.len() {
            if children[i..].iter().skip(1).any(|c| *c == children[i]) {
                let mut rest = children.clone();
                rest.remove(i);
                let replacement = crate::syntax::rebuild(crate::syntax::JoinKind::Add, rest);
                let next = b.substitute_at(&path, replacement).expect("own path");
                out.insert(next.normalize());
            }
        }
    }
    out.into_iter().collect()
}

/// All results of replacing one `q`-leaf of `s` by `t` (the cut composition).
pub(crate) fn cut_results(s: &Bunch<Atom>, q: &Atom, t: &Bunch<Atom>) -> Vec<Bunch<Atom>> {
    let mut out = BTreeSet::new();
    for path in s.occurrence_paths() {
        if let Ok(Bunch::Leaf(a)) = s.at(&path) {
            if a == q {
                let next = s.substitute_at(&path, t.clone()).expect("own path");
                out.insert(next.normalize());
            }
        }
    }
    out.into_iter().collect()
}
