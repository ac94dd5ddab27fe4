//! BI rule schemas: rule families `forall U . forall x . ...` over a
//! contextual-bunch variable and atom metavariables.

use std::fmt;

use crate::bases::{AtomBinding, BiRule, BiSequent};
use crate::error::QueryError;
use crate::syntax::{render_bunch_with, Atom, Bunch, ContextualBunch, Vocabulary};

/// An atom position in a schema: concrete or a metavariable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaAtom {
    Const(Atom),
    Var(String),
}

impl SchemaAtom {
    pub fn resolve(&self, binding: &AtomBinding) -> Result<Atom, QueryError> {
        match self {
            SchemaAtom::Const(a) => Ok(a.clone()),
            SchemaAtom::Var(v) => binding
                .get(v)
                .cloned()
                .ok_or_else(|| QueryError::Shape(format!("unbound metavariable `{v}`"))),
        }
    }
}

/// A context pattern: a plain bunch of atom patterns, or the hole variable
/// applied to one, `U(arg)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaContext {
    Plain(Bunch<SchemaAtom>),
    Holed(Bunch<SchemaAtom>),
}

impl SchemaContext {
    pub fn arg(&self) -> &Bunch<SchemaAtom> {
        match self {
            SchemaContext::Plain(b) | SchemaContext::Holed(b) => b,
        }
    }

    pub fn is_holed(&self) -> bool {
        matches!(self, SchemaContext::Holed(_))
    }
}

/// A sequent pattern.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaSequent {
    pub context: SchemaContext,
    pub succedent: SchemaAtom,
}

/// A rule family: instantiating the hole with a contextual bunch and the
/// atom variables with atoms yields a ground [`BiRule`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiSchema {
    pub hole_var: String,
    pub atom_vars: Vec<String>,
    pub premises: Vec<SchemaSequent>,
    pub conclusion: SchemaSequent,
}

impl BiSchema {
    /// Every metavariable must be declared, and the hole may appear in the
    /// conclusion only if some premise mentions it too (otherwise saturation
    /// could never solve for it).
    pub fn validate(&self) -> Result<(), QueryError> {
        let check = |sa: &SchemaAtom| -> Result<(), QueryError> {
            if let SchemaAtom::Var(v) = sa {
                if !self.atom_vars.contains(v) {
                    return Err(QueryError::Shape(format!("undeclared metavariable `{v}`")));
                }
            }
            Ok(())
        };
        for seq in self.premises.iter().chain([&self.conclusion]) {
            check(&seq.succedent)?;
            for leaf in seq.context.arg().leaves() {
                check(leaf)?;
            }
        }
        let holed_premises = self.premises.iter().filter(|p| p.context.is_holed()).count();
        if holed_premises > 1 {
            return Err(QueryError::Shape("at most one premise may mention the hole".into()));
        }
        if self.conclusion.context.is_holed() && holed_premises == 0 {
            return Err(QueryError::Shape(
                "a hole in the conclusion needs a premise mentioning the hole".into(),
            ));
        }
        Ok(())
    }

    /// Ground instance at a given hole and binding.
    pub fn instantiate(&self, hole: &ContextualBunch<Atom>, binding: &AtomBinding) -> Result<BiRule, QueryError> {
        let inst_seq = |seq: &SchemaSequent| -> Result<BiSequent, QueryError> {
            let arg = resolve_bunch(seq.context.arg(), binding)?;
            let context = match &seq.context {
                SchemaContext::Plain(_) => arg,
                SchemaContext::Holed(_) => hole.apply(&arg),
            };
            Ok(BiSequent { context, succedent: seq.succedent.resolve(binding)? })
        };
        Ok(BiRule {
            premises: self.premises.iter().map(&inst_seq).collect::<Result<_, _>>()?,
            conclusion: inst_seq(&self.conclusion)?,
        })
    }

    pub fn collect_atoms(&self, vocab: &mut Vocabulary) {
        for seq in self.premises.iter().chain([&self.conclusion]) {
            if let SchemaAtom::Const(a) = &seq.succedent {
                vocab.insert(a.clone());
            }
            for leaf in seq.context.arg().leaves() {
                if let SchemaAtom::Const(a) = leaf {
                    vocab.insert(a.clone());
                }
            }
        }
    }

    /// Variables not determined by matching the holed premise's succedent.
    pub fn free_vars_in(&self, seq: &SchemaSequent) -> Vec<String> {
        let mut vars = Vec::new();
        if let SchemaAtom::Var(v) = &seq.succedent {
            vars.push(v.clone());
        }
        for leaf in seq.context.arg().leaves() {
            if let SchemaAtom::Var(v) = leaf {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        vars
    }
}

pub(crate) fn resolve_bunch(b: &Bunch<SchemaAtom>, binding: &AtomBinding) -> Result<Bunch<Atom>, QueryError> {
    match b {
        Bunch::Leaf(sa) => Ok(Bunch::Leaf(sa.resolve(binding)?)),
        Bunch::AddUnit => Ok(Bunch::AddUnit),
        Bunch::MulUnit => Ok(Bunch::MulUnit),
        Bunch::AddJoin(l, r) => Ok(Bunch::add(resolve_bunch(l, binding)?, resolve_bunch(r, binding)?)),
        Bunch::MulJoin(l, r) => Ok(Bunch::mul(resolve_bunch(l, binding)?, resolve_bunch(r, binding)?)),
    }
}

impl fmt::Display for BiSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "forall {} . ", self.hole_var)?;
        for v in &self.atom_vars {
            write!(f, "forall {v} . ")?;
        }
        let show_seq = |seq: &SchemaSequent| {
            let arg = render_bunch_with(seq.context.arg(), &mut |sa: &SchemaAtom| match sa {
                SchemaAtom::Const(a) => a.name().to_string(),
                SchemaAtom::Var(v) => v.clone(),
            });
            let ctx = match &seq.context {
                SchemaContext::Plain(_) => arg,
                SchemaContext::Holed(_) => format!("{}({arg})", self.hole_var),
            };
            let succ = match &seq.succedent {
                SchemaAtom::Const(a) => a.name().to_string(),
                SchemaAtom::Var(v) => v.clone(),
            };
            format!("{ctx} |- {succ}")
        };
        let premises: Vec<String> = self.premises.iter().map(show_seq).collect();
        write!(f, "{} => {}", premises.join(", "), show_seq(&self.conclusion))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_bunch, BunchPath, Step};
    use std::collections::BTreeMap;

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    fn schema_checkin() -> BiSchema {
        // forall U . forall x . U((p ; t) , h) |- x => U(p) |- x
        let arg = Bunch::mul(
            Bunch::add(Bunch::Leaf(SchemaAtom::Const(at("p"))), Bunch::Leaf(SchemaAtom::Const(at("t")))),
            Bunch::Leaf(SchemaAtom::Const(at("h"))),
        );
        BiSchema {
            hole_var: "U".into(),
            atom_vars: vec!["x".into()],
            premises: vec![SchemaSequent {
                context: SchemaContext::Holed(arg),
                succedent: SchemaAtom::Var("x".into()),
            }],
            conclusion: SchemaSequent {
                context: SchemaContext::Holed(Bunch::Leaf(SchemaAtom::Const(at("p")))),
                succedent: SchemaAtom::Var("x".into()),
            },
        }
    }

    #[test]
    fn instantiate_checkin_at_identity() {
        let schema = schema_checkin();
        schema.validate().unwrap();
        let mut binding = BTreeMap::new();
        binding.insert("x".to_string(), at("f"));
        let rule = schema.instantiate(&ContextualBunch::identity(), &binding).unwrap();
        assert_eq!(rule.premises[0].context, parse_bunch("(p ; t) , h").unwrap());
        assert_eq!(rule.premises[0].succedent, at("f"));
        assert_eq!(rule.conclusion.context, Bunch::leaf(at("p")));
    }

    #[test]
    fn instantiate_wraps_hole_frame() {
        // hole = (. , r): contexts end up wrapped in a multiplicative frame
        let schema = schema_checkin();
        let frame = ContextualBunch::from_hole_at(
            &Bunch::mul(Bunch::leaf(at("p")), Bunch::leaf(at("r"))),
            &BunchPath(vec![Step::Left]),
        )
        .unwrap();
        let mut binding = BTreeMap::new();
        binding.insert("x".to_string(), at("x1"));
        let rule = schema.instantiate(&frame, &binding).unwrap();
        // same as substituting the arg into the frame directly
        let arg = parse_bunch("(p ; t) , h").unwrap();
        let expected = Bunch::mul(arg, Bunch::leaf(at("r")));
        assert_eq!(rule.premises[0].context, expected);
        assert_eq!(rule.conclusion.context, Bunch::mul(Bunch::leaf(at("p")), Bunch::leaf(at("r"))));
    }

    #[test]
    fn unbound_metavariable_is_an_error() {
        let schema = schema_checkin();
        let err = schema.instantiate(&ContextualBunch::identity(), &BTreeMap::new());
        assert!(err.is_err());
    }

    #[test]
    fn undeclared_vars_rejected() {
        let mut s = schema_checkin();
        s.atom_vars.clear();
        assert!(s.validate().is_err());
    }
}
