//! Formulas over a shared atom vocabulary, covering all three logics.

use std::fmt;

use crate::error::QueryError;
use crate::syntax::{Atom, Vocabulary};

/// Which logic a query or artifact lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Logic {
    Ipl,
    Imall,
    Bi,
}

impl Logic {
    pub fn name(self) -> &'static str {
        match self {
            Logic::Ipl => "IPL",
            Logic::Imall => "IMALL",
            Logic::Bi => "BI",
        }
    }

    pub fn parse(s: &str) -> Option<Logic> {
        match s.to_ascii_uppercase().as_str() {
            "IPL" => Some(Logic::Ipl),
            "IMALL" => Some(Logic::Imall),
            "BI" => Some(Logic::Bi),
            _ => None,
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A formula AST. One type houses the connectives of IPL, IMALL, and BI;
/// [`Formula::validate`] enforces that a tree only uses connectives of one
/// logic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    /// BI additive truth.
    Top,
    /// BI multiplicative truth (the unit of `*`).
    MTop,
    /// Falsum (IPL and BI).
    Bottom,
    /// IMALL multiplicative unit.
    One,
    /// IMALL additive zero.
    Zero,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Star(Box<Formula>, Box<Formula>),
    Wand(Box<Formula>, Box<Formula>),
    Lolli(Box<Formula>, Box<Formula>),
    Tensor(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }
    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }
    pub fn star(l: Formula, r: Formula) -> Formula {
        Formula::Star(Box::new(l), Box::new(r))
    }
    pub fn wand(l: Formula, r: Formula) -> Formula {
        Formula::Wand(Box::new(l), Box::new(r))
    }
    pub fn lolli(l: Formula, r: Formula) -> Formula {
        Formula::Lolli(Box::new(l), Box::new(r))
    }
    pub fn tensor(l: Formula, r: Formula) -> Formula {
        Formula::Tensor(Box::new(l), Box::new(r))
    }
    pub fn with(l: Formula, r: Formula) -> Formula {
        Formula::With(Box::new(l), Box::new(r))
    }
    pub fn plus(l: Formula, r: Formula) -> Formula {
        Formula::Plus(Box::new(l), Box::new(r))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// True when every connective in the tree belongs to `logic`.
    pub fn is_well_formed(&self, logic: Logic) -> bool {
        self.validate(logic).is_ok()
    }

    /// Rejects mixed trees: IPL admits `/\ \/ -> bot`, IMALL admits
    /// `-o * & + 1 0`, BI admits `/\ \/ -> * -* top bot emp`.
    pub fn validate(&self, logic: Logic) -> Result<(), QueryError> {
        let ok = match self {
            Formula::Atom(_) => true,
            Formula::Top | Formula::MTop => logic == Logic::Bi,
            Formula::Bottom => logic == Logic::Ipl || logic == Logic::Bi,
            Formula::One | Formula::Zero => logic == Logic::Imall,
            Formula::And(..) | Formula::Or(..) | Formula::Imp(..) => {
                logic == Logic::Ipl || logic == Logic::Bi
            }
            Formula::Star(..) | Formula::Wand(..) => logic == Logic::Bi,
            Formula::Lolli(..) | Formula::Tensor(..) | Formula::With(..) | Formula::Plus(..) => {
                logic == Logic::Imall
            }
        };
        if !ok {
            return Err(QueryError::Shape(format!(
                "connective `{}` is not part of {}",
                self.connective_name(),
                logic
            )));
        }
        match self.children() {
            Some((l, r)) => {
                l.validate(logic)?;
                r.validate(logic)
            }
            None => Ok(()),
        }
    }

    pub fn children(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Imp(l, r)
            | Formula::Star(l, r)
            | Formula::Wand(l, r)
            | Formula::Lolli(l, r)
            | Formula::Tensor(l, r)
            | Formula::With(l, r)
            | Formula::Plus(l, r) => Some((l, r)),
            _ => None,
        }
    }

    fn connective_name(&self) -> &'static str {
        match self {
            Formula::Atom(_) => "atom",
            Formula::Top => "top",
            Formula::MTop => "emp",
            Formula::Bottom => "bot",
            Formula::One => "1",
            Formula::Zero => "0",
            Formula::And(..) => "/\\",
            Formula::Or(..) => "\\/",
            Formula::Imp(..) => "->",
            Formula::Star(..) => "*",
            Formula::Wand(..) => "-*",
            Formula::Lolli(..) => "-o",
            Formula::Tensor(..) => "*",
            Formula::With(..) => "&",
            Formula::Plus(..) => "+",
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self.children() {
            Some((l, r)) => 1 + l.size() + r.size(),
            None => 1,
        }
    }

    pub fn collect_atoms(&self, vocab: &mut Vocabulary) {
        match self {
            Formula::Atom(a) => vocab.insert(a.clone()),
            _ => {
                if let Some((l, r)) = self.children() {
                    l.collect_atoms(vocab);
                    r.collect_atoms(vocab);
                }
            }
        }
    }

    /// All subformulas including the formula itself, parents after children.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Some((l, r)) = f.children() {
                walk(l, out);
                walk(r, out);
            }
            out.push(f);
        }
        walk(self, &mut out);
        out
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::render_formula(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::render_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(n: &str) -> Formula {
        Formula::Atom(Atom::new(n).unwrap())
    }

    #[test]
    fn well_formedness_per_logic() {
        let ipl = Formula::imp(at("p"), at("q"));
        assert!(ipl.is_well_formed(Logic::Ipl));
        assert!(ipl.is_well_formed(Logic::Bi));
        assert!(!ipl.is_well_formed(Logic::Imall));

        let imall = Formula::lolli(at("e1"), at("c"));
        assert!(imall.is_well_formed(Logic::Imall));
        assert!(!imall.is_well_formed(Logic::Ipl));

        let mixed = Formula::and(Formula::lolli(at("p"), at("q")), at("r"));
        assert!(!mixed.is_well_formed(Logic::Ipl));
        assert!(!mixed.is_well_formed(Logic::Imall));
        assert!(!mixed.is_well_formed(Logic::Bi));
    }

    #[test]
    fn sizes_and_subformulas() {
        let f = Formula::wand(at("p"), Formula::star(Formula::and(at("p"), at("t")), at("h")));
        assert_eq!(f.size(), 7);
        assert_eq!(f.subformulas().len(), 7);
    }
}
