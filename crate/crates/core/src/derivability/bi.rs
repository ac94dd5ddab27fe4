//! BI derivability: forward saturation of atomic sequents.
//!
//! Facts are kept canonical (exch is absorbed by canonical forms) and
//! minimal: weakening is never materialized. A fact `C |- p` stands for
//! every `C' |- p` with `C' >= C` under bunch-extension, which is exactly
//! the weak/exch closure. Contraction and cut are applied to stored facts;
//! ground rules and schema instances fire when each premise is subsumed by
//! a fact. The query succeeds when its canonical context extends some fact.
//!
//! Saturation is bounded by the canonical context size and the node budget.
//! If the fixpoint is reached without dropping any over-size candidate, a
//! miss is a definitive `NotDerivable`; otherwise it is `Exhausted`.

use std::collections::{BTreeMap, VecDeque};

use crate::bases::{Base, BiRule, BiSchema, SchemaAtom};
use crate::derivability::{
    contractions, cut_results, Clause, DerivationNode, DerivationResult, DerivationStatus, RuleUse,
    SearchBounds, SearchStats, Sequent,
};
use crate::error::QueryError;
use crate::syntax::{Atom, Bunch, ContextualBunch, Vocabulary};

type Fact = (Bunch<Atom>, Atom);

#[derive(Clone)]
enum Prov {
    Taut,
    Initial(RuleUse),
    /// The ground rule (or schema instance) with the facts that satisfied
    /// its premises.
    Rule { rule_use: RuleUse, rule: BiRule, premises: Vec<Fact> },
    Cont { parent: Fact },
    Cut { left: Fact, right: Fact },
}

pub fn derive_bi(
    base: &Base,
    context: &Bunch<Atom>,
    goal: &Atom,
    bounds: &SearchBounds,
) -> Result<DerivationResult, QueryError> {
    let (rules, schemas) = base.bi_rules()?;
    let rules: Vec<BiRule> = rules.iter().cloned().collect();
    let schemas: Vec<BiSchema> = schemas.iter().cloned().collect();

    let mut vocab = base.vocabulary();
    for a in context.leaves() {
        vocab.insert(a.clone());
    }
    vocab.insert(goal.clone());

    let mut sat = Saturation {
        rules,
        schemas,
        vocab,
        max_leaves: bounds.max_context_size,
        budget: bounds.node_budget,
        facts: BTreeMap::new(),
        queue: VecDeque::new(),
        dropped: false,
        budget_hit: false,
        stats: SearchStats::default(),
    };

    let query: Fact = (context.normalize(), goal.clone());

    // taut for every atom in sight
    let atoms: Vec<Atom> = sat.vocab.iter().cloned().collect();
    for a in &atoms {
        sat.insert((Bunch::leaf(a.clone()), a.clone()), Prov::Taut);
    }
    // initial: the base's axioms
    for rule in sat.rules.clone() {
        if rule.premises.is_empty() {
            let fact = (rule.conclusion.context.normalize(), rule.conclusion.succedent.clone());
            sat.insert(fact, Prov::Initial(RuleUse::Bi(rule)));
        }
    }

    sat.run(&query);

    let answered = sat.answer(&query);
    let status = match answered {
        Some(tree) => {
            sat.stats.depth_reached = depth(&tree);
            DerivationStatus::Derivable(tree)
        }
        None if sat.dropped || sat.budget_hit => DerivationStatus::Exhausted,
        None => DerivationStatus::NotDerivable,
    };
    Ok(DerivationResult { status, stats: sat.stats })
}

struct Saturation {
    rules: Vec<BiRule>,
    schemas: Vec<BiSchema>,
    vocab: Vocabulary,
    max_leaves: usize,
    budget: usize,
    facts: BTreeMap<Fact, Prov>,
    queue: VecDeque<Fact>,
    dropped: bool,
    budget_hit: bool,
    stats: SearchStats,
}

impl Saturation {
    fn insert(&mut self, fact: Fact, prov: Prov) {
        if self.stats.nodes_expanded >= self.budget {
            self.budget_hit = true;
            return;
        }
        if fact.0.leaf_count() > self.max_leaves || fact.0.size() > 2 * self.max_leaves + 1 {
            self.dropped = true;
            return;
        }
        // skip anything subsumed by a stored fact
        if self.subsuming_fact(&fact.0, &fact.1).is_some() {
            return;
        }
        self.stats.nodes_expanded += 1;
        self.facts.insert(fact.clone(), prov);
        self.queue.push_back(fact);
    }

    /// A stored fact `C' |- goal` with `c >= C'`, if any.
    fn subsuming_fact(&self, c: &Bunch<Atom>, goal: &Atom) -> Option<Fact> {
        self.facts
            .keys()
            .filter(|(_, g)| g == goal)
            .find(|(ctx, _)| c.extends(ctx))
            .cloned()
    }

    fn run(&mut self, query: &Fact) {
        while let Some(fact) = self.queue.pop_front() {
            if self.budget_hit {
                return;
            }
            // early exit once the query is answered
            if query.1 == fact.1 && query.0.extends(&fact.0) {
                return;
            }
            self.fire_ground_rules();
            self.fire_schemas(&fact);
            self.close_contraction(&fact);
            self.close_cut(&fact);
        }
    }

    fn fire_ground_rules(&mut self) {
        for rule in self.rules.clone() {
            if rule.premises.is_empty() {
                continue;
            }
            let mut used = Vec::new();
            let ok = rule.premises.iter().all(|p| {
                match self.subsuming_fact(&p.context.normalize(), &p.succedent) {
                    Some(f) => {
                        used.push(f);
                        true
                    }
                    None => false,
                }
            });
            if ok {
                let fact = (rule.conclusion.context.normalize(), rule.conclusion.succedent.clone());
                let prov = Prov::Rule { rule_use: RuleUse::Bi(rule.clone()), rule: rule.clone(), premises: used };
                self.insert(fact, prov);
            }
        }
    }

    /// Matches each schema's holed premise against `fact`: for every
    /// occurrence D of the fact's context with arg >= D, the hole becomes
    /// the fact's context with D cut out.
    fn fire_schemas(&mut self, fact: &Fact) {
        let (fact_ctx, fact_succ) = fact;
        for schema in self.schemas.clone() {
            let Some(holed_idx) = schema.premises.iter().position(|p| p.context.is_holed()) else {
                self.fire_holeless_schema(&schema);
                continue;
            };
            let holed = &schema.premises[holed_idx];
            // succedent of the holed premise fixes one variable (or must match)
            let mut base_binding = crate::bases::AtomBinding::new();
            match &holed.succedent {
                SchemaAtom::Const(a) if a == fact_succ => {}
                SchemaAtom::Const(_) => continue,
                SchemaAtom::Var(v) => {
                    base_binding.insert(v.clone(), fact_succ.clone());
                }
            }
            // remaining variables range over the vocabulary
            let free: Vec<String> = {
                let mut vs: Vec<String> = Vec::new();
                for seq in schema.premises.iter().chain([&schema.conclusion]) {
                    for v in schema.free_vars_in(seq) {
                        if !base_binding.contains_key(&v) && !vs.contains(&v) {
                            vs.push(v);
                        }
                    }
                }
                vs
            };
            for binding in enumerate_bindings(&base_binding, &free, &self.vocab) {
                let Ok(arg) = crate::bases::resolve_schema_bunch(holed.context.arg(), &binding) else {
                    continue;
                };
                let arg = arg.normalize();
                for path in fact_ctx.occurrence_views() {
                    let (occurrence, hole) = path;
                    if !arg.extends(&occurrence) {
                        continue;
                    }
                    // plain premises must be subsumed by stored facts
                    let mut used: Vec<Fact> = Vec::new();
                    let mut pre_ok = true;
                    for (i, p) in schema.premises.iter().enumerate() {
                        if i == holed_idx {
                            used.push(fact.clone());
                            continue;
                        }
                        let Ok(ctx) = crate::bases::resolve_schema_bunch(p.context.arg(), &binding) else {
                            pre_ok = false;
                            break;
                        };
                        let Ok(succ) = p.succedent.resolve(&binding) else {
                            pre_ok = false;
                            break;
                        };
                        match self.subsuming_fact(&ctx.normalize(), &succ) {
                            Some(f) => used.push(f),
                            None => {
                                pre_ok = false;
                                break;
                            }
                        }
                    }
                    if !pre_ok {
                        continue;
                    }
                    let Ok(rule) = schema.instantiate(&hole, &binding) else { continue };
                    let fact_new = (rule.conclusion.context.normalize(), rule.conclusion.succedent.clone());
                    let prov = Prov::Rule {
                        rule_use: RuleUse::BiSchema {
                            schema: schema.clone(),
                            hole: hole.clone(),
                            binding: binding.clone(),
                        },
                        rule: rule.clone(),
                        premises: used,
                    };
                    self.insert(fact_new, prov);
                }
            }
        }
    }

    /// Schemas without a holed premise are plain rule families over their
    /// atom variables.
    fn fire_holeless_schema(&mut self, schema: &BiSchema) {
        let free: Vec<String> = schema.atom_vars.clone();
        for binding in enumerate_bindings(&crate::bases::AtomBinding::new(), &free, &self.vocab) {
            let Ok(rule) = schema.instantiate(&ContextualBunch::identity(), &binding) else { continue };
            let mut used = Vec::new();
            let ok = rule.premises.iter().all(|p| {
                match self.subsuming_fact(&p.context.normalize(), &p.succedent) {
                    Some(f) => {
                        used.push(f);
                        true
                    }
                    None => false,
                }
            });
            if ok {
                let fact = (rule.conclusion.context.normalize(), rule.conclusion.succedent.clone());
                let prov = Prov::Rule {
                    rule_use: RuleUse::BiSchema {
                        schema: schema.clone(),
                        hole: ContextualBunch::identity(),
                        binding: binding.clone(),
                    },
                    rule,
                    premises: used,
                };
                self.insert(fact, prov);
            }
        }
    }

    fn close_contraction(&mut self, fact: &Fact) {
        for contracted in contractions(&fact.0) {
            self.insert((contracted, fact.1.clone()), Prov::Cont { parent: fact.clone() });
        }
    }

    fn close_cut(&mut self, fact: &Fact) {
        // fact as the left premise T |- q of cut
        let existing: Vec<Fact> = self.facts.keys().cloned().collect();
        for other in &existing {
            for result in cut_results(&other.0, &fact.1, &fact.0) {
                self.insert((result, other.1.clone()), Prov::Cut { left: fact.clone(), right: other.clone() });
            }
            // and symmetrically as the right premise S(q) |- p
            for result in cut_results(&fact.0, &other.1, &other.0) {
                self.insert((result, fact.1.clone()), Prov::Cut { left: other.clone(), right: fact.clone() });
            }
        }
    }

    /// Answers the query from the fact store, wrapping in a generalized
    /// weakening step when the match is not exact.
    fn answer(&self, query: &Fact) -> Option<DerivationNode> {
        let fact = self.subsuming_fact(&query.0, &query.1)?;
        let tree = self.tree_of(&fact);
        if fact.0 == query.0 {
            return Some(tree);
        }
        Some(DerivationNode {
            clause: Clause::Weak,
            sequent: Sequent::Bi { context: query.0.clone(), goal: query.1.clone() },
            rule: None,
            splits: vec![],
            children: vec![tree],
        })
    }

    fn tree_of(&self, fact: &Fact) -> DerivationNode {
        let sequent = Sequent::Bi { context: fact.0.clone(), goal: fact.1.clone() };
        match self.facts.get(fact).expect("provenance for stored fact") {
            Prov::Taut => DerivationNode::leafish(Clause::Taut, sequent),
            Prov::Initial(rule_use) => DerivationNode {
                clause: Clause::Initial,
                sequent,
                rule: Some(rule_use.clone()),
                splits: vec![],
                children: vec![],
            },
            Prov::Rule { rule_use, rule, premises } => {
                let children = rule
                    .premises
                    .iter()
                    .zip(premises)
                    .map(|(premise, used)| {
                        let sub = self.tree_of(used);
                        let wanted = premise.context.normalize();
                        if wanted == used.0 {
                            sub
                        } else {
                            DerivationNode {
                                clause: Clause::Weak,
                                sequent: Sequent::Bi { context: wanted, goal: premise.succedent.clone() },
                                rule: None,
                                splits: vec![],
                                children: vec![sub],
                            }
                        }
                    })
                    .collect();
                DerivationNode {
                    clause: Clause::Rule,
                    sequent,
                    rule: Some(rule_use.clone()),
                    splits: vec![],
                    children,
                }
            }
            Prov::Cont { parent } => DerivationNode {
                clause: Clause::Cont,
                sequent,
                rule: None,
                splits: vec![],
                children: vec![self.tree_of(parent)],
            },
            Prov::Cut { left, right } => DerivationNode {
                clause: Clause::Cut,
                sequent,
                rule: None,
                splits: vec![],
                children: vec![self.tree_of(left), self.tree_of(right)],
            },
        }
    }
}

fn depth(node: &DerivationNode) -> usize {
    1 + node.children.iter().map(depth).max().unwrap_or(0)
}

fn enumerate_bindings(
    base: &crate::bases::AtomBinding,
    free: &[String],
    vocab: &Vocabulary,
) -> Vec<crate::bases::AtomBinding> {
    let mut out = vec![base.clone()];
    for var in free {
        let mut next = Vec::new();
        for b in &out {
            for a in vocab.iter() {
                let mut b2 = b.clone();
                b2.insert(var.clone(), a.clone());
                next.push(b2);
            }
        }
        out = next;
    }
    out
}

impl Bunch<Atom> {
    /// Every sub-bunch occurrence of a canonical bunch, modulo coherent
    /// equivalence, paired with the contextual bunch that cuts it out.
    /// For join nodes this includes every nonempty sub-multiset of the
    /// flattened children (exchange groups them into one subtree).
    pub(crate) fn occurrence_views(&self) -> Vec<(Bunch<Atom>, ContextualBunch<Atom>)> {
        let canon = self.normalize();
        let mut out: Vec<(Bunch<Atom>, ContextualBunch<Atom>)> = Vec::new();
        collect_views(&canon, &ContextualBunch::identity(), &mut out);
        out
    }
}

fn collect_views(
    b: &Bunch<Atom>,
    wrap: &ContextualBunch<Atom>,
    out: &mut Vec<(Bunch<Atom>, ContextualBunch<Atom>)>,
) {
    out.push((b.clone(), wrap.clone()));
    let Some(kind) = b.join_kind() else { return };
    let children = b.canonical_children(kind);
    let n = children.len();
    // sub-multisets of the children: occurrence = chosen part, the rest
    // stays around the hole
    for mask in 1u32..(1 << n) - 1 {
        let (mut chosen, mut rest) = (Vec::new(), Vec::new());
        for (i, c) in children.iter().enumerate() {
            if mask & (1 << i) != 0 {
                chosen.push(c.clone());
            } else {
                rest.push(c.clone());
            }
        }
        let occurrence = crate::syntax::rebuild(kind, chosen);
        let hole_site = {
            let mut parts: Vec<Bunch<crate::syntax::CtxLeaf<Atom>>> =
                rest.iter().map(|c| c.map(&mut |a| crate::syntax::CtxLeaf::Item(a.clone()))).collect();
            parts.push(Bunch::Leaf(crate::syntax::CtxLeaf::Hole));
            parts.sort();
            crate::syntax::rebuild(kind, parts)
        };
        let inner = ContextualBunch::new(hole_site).expect("one hole");
        let composed = compose(wrap, &inner);
        if mask.count_ones() == 1 {
            // single child: recurse inside it for interior occurrences
            let child = &children[mask.trailing_zeros() as usize];
            collect_views(child, &composed, out);
        } else {
            out.push((occurrence, composed));
        }
    }
}

fn compose(outer: &ContextualBunch<Atom>, inner: &ContextualBunch<Atom>) -> ContextualBunch<Atom> {
    let inner_shape = inner.shape().clone();
    let replaced = outer.shape().bind(&mut |l| match l {
        crate::syntax::CtxLeaf::Item(a) => Bunch::Leaf(crate::syntax::CtxLeaf::Item(a.clone())),
        crate::syntax::CtxLeaf::Hole => inner_shape.clone(),
    });
    ContextualBunch::new(replaced).expect("one hole after composition")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivability::replay;
    use crate::syntax::{parse_bunch, Logic};
    use crate::bases::BiSequent;

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    fn bounds() -> SearchBounds {
        SearchBounds::default()
    }

    #[test]
    fn taut_clause() {
        let b = Base::empty("b", Logic::Bi);
        let r = derive_bi(&b, &Bunch::leaf(at("p")), &at("p"), &bounds()).unwrap();
        assert!(r.is_derivable());
    }

    #[test]
    fn additive_weakening_only() {
        let b = Base::empty("b", Logic::Bi);
        // (p ; q) |- p by weakening on taut
        let ctx = parse_bunch("p ; q").unwrap();
        let r = derive_bi(&b, &ctx, &at("p"), &bounds()).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
        }
        // (p , q) |- p has no multiplicative weakening
        let ctx = parse_bunch("p , q").unwrap();
        let r = derive_bi(&b, &ctx, &at("p"), &bounds()).unwrap();
        assert_eq!(r.status, DerivationStatus::NotDerivable);
    }

    #[test]
    fn contraction_on_taut() {
        // base rule (p ; p) |- q, then p |- q by contraction
        let rule = BiRule::axiom(BiSequent { context: parse_bunch("p ; p").unwrap(), succedent: at("q") });
        let b = Base::from_bi_rules("b", [rule]);
        let r = derive_bi(&b, &Bunch::leaf(at("p")), &at("q"), &bounds()).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
        }
    }

    #[test]
    fn cut_composes() {
        // T |- q via axiom (t |- q); S(q) |- p via axiom ((q , r) |- p)
        let ax1 = BiRule::axiom(BiSequent { context: parse_bunch("t").unwrap(), succedent: at("q") });
        let ax2 = BiRule::axiom(BiSequent { context: parse_bunch("q , r").unwrap(), succedent: at("p") });
        let b = Base::from_bi_rules("b", [ax1, ax2]);
        let ctx = parse_bunch("t , r").unwrap();
        let r = derive_bi(&b, &ctx, &at("p"), &bounds()).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t));
        }
    }

    #[test]
    fn ground_rule_fires_with_weakened_premise() {
        // rule: (p ; t) |- s => h |- s; premise holds by weakening taut p
        let rule = BiRule {
            premises: vec![BiSequent { context: parse_bunch("p ; t").unwrap(), succedent: at("p") }],
            conclusion: BiSequent { context: parse_bunch("h").unwrap(), succedent: at("s") },
        };
        let b = Base::from_bi_rules("b", [rule]);
        let r = derive_bi(&b, &Bunch::leaf(at("h")), &at("s"), &bounds()).unwrap();
        assert!(r.is_derivable());
        if let DerivationStatus::Derivable(t) = &r.status {
            assert!(replay(&b, t), "tree:\n{}", t.render());
        }
    }

    #[test]
    fn logic_mismatch() {
        let b = Base::empty("b", Logic::Ipl);
        assert!(derive_bi(&b, &Bunch::leaf(at("p")), &at("p"), &bounds()).is_err());
    }
}
