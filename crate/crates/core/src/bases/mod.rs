//! Atomic rules, rule schemas, and bases.
//!
//! Rules are taken per se: they mention concrete atoms and are never closed
//! under substitution. The one source of rule families is the BI schema form
//! `forall U . forall x . ...`, which quantifies over a contextual bunch and
//! over atoms; schemas are instantiated on demand during search, never
//! pre-expanded.

mod enumerate;
mod schema;

pub use enumerate::{bunch_universe, contextual_universe, enumerate_extensions, multisets_over, ExtensionBounds};
pub use schema::{BiSchema, SchemaAtom, SchemaContext, SchemaSequent};
pub(crate) use schema::resolve_bunch as resolve_schema_bunch;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::QueryError;
use crate::syntax::{render_bunch, Atom, Bunch, Logic, Multiset, Vocabulary};

/// One premise of an IPL rule: derive `conclusion` with extra hypotheses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IplPremise {
    pub hypotheses: BTreeSet<Atom>,
    pub conclusion: Atom,
}

/// An IPL atomic rule; no premises encodes an axiom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IplRule {
    pub premises: Vec<IplPremise>,
    pub conclusion: Atom,
}

impl IplRule {
    pub fn axiom(conclusion: Atom) -> IplRule {
        IplRule { premises: vec![], conclusion }
    }

    pub fn is_axiom(&self) -> bool {
        self.premises.is_empty()
    }
}

/// One premise of an IMALL rule: a multiset of dischargeable hypotheses and
/// an atomic conclusion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ImallPremise {
    pub hypotheses: Multiset,
    pub conclusion: Atom,
}

/// A group of premises that share one slice of the context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PremiseGroup(pub Vec<ImallPremise>);

/// An IMALL atomic rule: a list of premise groups. Each group draws its own
/// share of the context; an empty group list encodes an axiom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ImallRule {
    pub groups: Vec<PremiseGroup>,
    pub conclusion: Atom,
}

impl ImallRule {
    pub fn axiom(conclusion: Atom) -> ImallRule {
        ImallRule { groups: vec![], conclusion }
    }

    pub fn is_axiom(&self) -> bool {
        self.groups.is_empty()
    }
}

/// An atomic sequent `P |- p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiSequent {
    pub context: Bunch<Atom>,
    pub succedent: Atom,
}

impl fmt::Display for BiSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", render_bunch(&self.context), self.succedent)
    }
}

/// A ground BI rule over atomic sequents; no premises encodes an axiom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiRule {
    pub premises: Vec<BiSequent>,
    pub conclusion: BiSequent,
}

impl BiRule {
    pub fn axiom(conclusion: BiSequent) -> BiRule {
        BiRule { premises: vec![], conclusion }
    }
}

/// The rules of a base, in the format of its logic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rules {
    Ipl(BTreeSet<IplRule>),
    Imall(BTreeSet<ImallRule>),
    Bi {
        rules: BTreeSet<BiRule>,
        schemas: BTreeSet<BiSchema>,
    },
}

impl Rules {
    pub fn empty(logic: Logic) -> Rules {
        match logic {
            Logic::Ipl => Rules::Ipl(BTreeSet::new()),
            Logic::Imall => Rules::Imall(BTreeSet::new()),
            Logic::Bi => Rules::Bi { rules: BTreeSet::new(), schemas: BTreeSet::new() },
        }
    }

    pub fn logic(&self) -> Logic {
        match self {
            Rules::Ipl(_) => Logic::Ipl,
            Rules::Imall(_) => Logic::Imall,
            Rules::Bi { .. } => Logic::Bi,
        }
    }
}

/// A finite set of atomic rules (plus schemas for BI).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Base {
    pub name: String,
    rules: Rules,
}

impl Base {
    pub fn empty(name: impl Into<String>, logic: Logic) -> Base {
        Base { name: name.into(), rules: Rules::empty(logic) }
    }

    pub fn logic(&self) -> Logic {
        self.rules.logic()
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn ipl_rules(&self) -> Result<&BTreeSet<IplRule>, QueryError> {
        match &self.rules {
            Rules::Ipl(r) => Ok(r),
            other => Err(mismatch(Logic::Ipl, other.logic())),
        }
    }

    pub fn imall_rules(&self) -> Result<&BTreeSet<ImallRule>, QueryError> {
        match &self.rules {
            Rules::Imall(r) => Ok(r),
            other => Err(mismatch(Logic::Imall, other.logic())),
        }
    }

    pub fn bi_rules(&self) -> Result<(&BTreeSet<BiRule>, &BTreeSet<BiSchema>), QueryError> {
        match &self.rules {
            Rules::Bi { rules, schemas } => Ok((rules, schemas)),
            other => Err(mismatch(Logic::Bi, other.logic())),
        }
    }

    pub fn add_ipl_rule(&mut self, rule: IplRule) -> Result<(), QueryError> {
        match &mut self.rules {
            Rules::Ipl(r) => {
                r.insert(rule);
                Ok(())
            }
            other => Err(mismatch(Logic::Ipl, other.logic())),
        }
    }

    pub fn add_imall_rule(&mut self, rule: ImallRule) -> Result<(), QueryError> {
        if let Rules::Imall(_) = self.rules {
            if rule.groups.iter().any(|g| g.0.is_empty()) {
                return Err(QueryError::Shape("a premise group may not be empty".into()));
            }
        }
        match &mut self.rules {
            Rules::Imall(r) => {
                r.insert(rule);
                Ok(())
            }
            other => Err(mismatch(Logic::Imall, other.logic())),
        }
    }

    pub fn add_bi_rule(&mut self, rule: BiRule) -> Result<(), QueryError> {
        match &mut self.rules {
            Rules::Bi { rules, .. } => {
                rules.insert(rule);
                Ok(())
            }
            other => Err(mismatch(Logic::Bi, other.logic())),
        }
    }

    pub fn add_bi_schema(&mut self, schema: BiSchema) -> Result<(), QueryError> {
        schema.validate()?;
        match &mut self.rules {
            Rules::Bi { schemas, .. } => {
                schemas.insert(schema);
                Ok(())
            }
            other => Err(mismatch(Logic::Bi, other.logic())),
        }
    }

    pub fn rule_count(&self) -> usize {
        match &self.rules {
            Rules::Ipl(r) => r.len(),
            Rules::Imall(r) => r.len(),
            Rules::Bi { rules, schemas } => rules.len() + schemas.len(),
        }
    }

    /// Set union; both operands must share a logic.
    pub fn union(&self, other: &Base) -> Result<Base, QueryError> {
        if self.logic() != other.logic() {
            return Err(mismatch(self.logic(), other.logic()));
        }
        let name = if self.name.is_empty() {
            other.name.clone()
        } else if other.name.is_empty() || self.name == other.name {
            self.name.clone()
        } else {
            format!("{}+{}", self.name, other.name)
        };
        let rules = match (&self.rules, &other.rules) {
            (Rules::Ipl(a), Rules::Ipl(b)) => Rules::Ipl(a.union(b).cloned().collect()),
            (Rules::Imall(a), Rules::Imall(b)) => Rules::Imall(a.union(b).cloned().collect()),
            (Rules::Bi { rules: ra, schemas: sa }, Rules::Bi { rules: rb, schemas: sb }) => Rules::Bi {
                rules: ra.union(rb).cloned().collect(),
                schemas: sa.union(sb).cloned().collect(),
            },
            _ => unreachable!("logics already checked"),
        };
        Ok(Base { name, rules })
    }

    /// True when every rule of `other` is in `self`.
    pub fn includes(&self, other: &Base) -> bool {
        match (&self.rules, &other.rules) {
            (Rules::Ipl(a), Rules::Ipl(b)) => b.is_subset(a),
            (Rules::Imall(a), Rules::Imall(b)) => b.is_subset(a),
            (Rules::Bi { rules: ra, schemas: sa }, Rules::Bi { rules: rb, schemas: sb }) => {
                rb.is_subset(ra) && sb.is_subset(sa)
            }
            _ => false,
        }
    }

    /// Every atom mentioned by the base's rules.
    pub fn vocabulary(&self) -> Vocabulary {
        let mut v = Vocabulary::new();
        match &self.rules {
            Rules::Ipl(rules) => {
                for r in rules {
                    v.insert(r.conclusion.clone());
                    for p in &r.premises {
                        v.insert(p.conclusion.clone());
                        for h in &p.hypotheses {
                            v.insert(h.clone());
                        }
                    }
                }
            }
            Rules::Imall(rules) => {
                for r in rules {
                    v.insert(r.conclusion.clone());
                    for g in &r.groups {
                        for p in &g.0 {
                            v.insert(p.conclusion.clone());
                            for h in p.hypotheses.iter() {
                                v.insert(h.clone());
                            }
                        }
                    }
                }
            }
            Rules::Bi { rules, schemas } => {
                for r in rules {
                    for s in r.premises.iter().chain([&r.conclusion]) {
                        v.insert(s.succedent.clone());
                        for a in s.context.leaves() {
                            v.insert(a.clone());
                        }
                    }
                }
                for s in schemas {
                    s.collect_atoms(&mut v);
                }
            }
        }
        v
    }
}

fn mismatch(expected: Logic, got: Logic) -> QueryError {
    QueryError::LogicMismatch { expected: expected.name(), got: got.name() }
}

/// Convenience constructors used across tests and fixtures.
impl Base {
    pub fn from_ipl_rules(name: impl Into<String>, rules: impl IntoIterator<Item = IplRule>) -> Base {
        let mut b = Base::empty(name, Logic::Ipl);
        for r in rules {
            b.add_ipl_rule(r).expect("ipl base");
        }
        b
    }

    pub fn from_imall_rules(name: impl Into<String>, rules: impl IntoIterator<Item = ImallRule>) -> Base {
        let mut b = Base::empty(name, Logic::Imall);
        for r in rules {
            b.add_imall_rule(r).expect("imall base");
        }
        b
    }

    pub fn from_bi_rules(name: impl Into<String>, rules: impl IntoIterator<Item = BiRule>) -> Base {
        let mut b = Base::empty(name, Logic::Bi);
        for r in rules {
            b.add_bi_rule(r).expect("bi base");
        }
        b
    }
}

/// A binding of schema atom variables.
pub type AtomBinding = BTreeMap<String, Atom>;

#[cfg(test)]
mod tests {
    use super::*;

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    #[test]
    fn union_laws() {
        let a = Base::from_ipl_rules("a", [IplRule::axiom(at("p"))]);
        let b = Base::from_ipl_rules("b", [IplRule::axiom(at("q"))]);
        let ab = a.union(&b).unwrap();
        let ba = b.union(&a).unwrap();
        assert_eq!(ab.rules(), ba.rules());
        assert_eq!(ab.union(&ab).unwrap().rules(), ab.rules());
        assert!(ab.includes(&a) && ab.includes(&b));

        let empty1 = Base::empty("x", Logic::Ipl);
        let empty2 = Base::empty("y", Logic::Ipl);
        assert_eq!(empty1.union(&empty2).unwrap().rule_count(), 0);
    }

    #[test]
    fn union_rejects_logic_mismatch() {
        let a = Base::empty("a", Logic::Ipl);
        let b = Base::empty("b", Logic::Bi);
        assert!(a.union(&b).is_err());
    }

    #[test]
    fn empty_premise_groups_are_rejected() {
        let mut b = Base::empty("v", Logic::Imall);
        let bad = ImallRule { groups: vec![PremiseGroup(vec![])], conclusion: at("c") };
        assert!(b.add_imall_rule(bad).is_err());
    }
}
