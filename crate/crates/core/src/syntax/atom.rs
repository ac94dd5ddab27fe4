//! Atomic propositions and finite vocabularies.

use std::fmt;
use std::sync::Arc;

use crate::error::ParseError;

/// Words that the formula grammar claims for itself.
pub const RESERVED: &[&str] = &["top", "bot", "emp"];

/// An atomic proposition, compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    /// Checks the lexical shape `[a-z][A-Za-z0-9_]*` and rejects reserved words.
    pub fn new(name: &str) -> Result<Atom, ParseError> {
        if !is_atom_name(name) {
            return Err(ParseError::new(0, format!("invalid atom name `{name}`")));
        }
        if RESERVED.contains(&name) {
            return Err(ParseError::new(0, format!("`{name}` is a reserved word")));
        }
        Ok(Atom(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Atom({})", self.0)
    }
}

/// A finite, ordered, duplicate-free set of atoms.
///
/// Bounded quantification (over "all atoms") always ranges over a declared
/// vocabulary, so iteration order must be deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Vocabulary {
    atoms: Vec<Atom>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    pub fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        let mut v = Vocabulary::new();
        for a in iter {
            v.insert(a);
        }
        v
    }

    /// Inserts keeping sorted order; duplicates are ignored.
    pub fn insert(&mut self, atom: Atom) {
        if let Err(i) = self.atoms.binary_search(&atom) {
            self.atoms.insert(i, atom);
        }
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.binary_search(atom).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> + Clone {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn union(&self, other: &Vocabulary) -> Vocabulary {
        let mut v = self.clone();
        for a in other.iter() {
            v.insert(a.clone());
        }
        v
    }

    /// A fresh atom not present in the vocabulary, built from `stem`.
    pub fn fresh(&self, stem: &str) -> Atom {
        let mut i = 0usize;
        loop {
            let candidate = format!("{stem}{i}");
            if let Ok(atom) = Atom::new(&candidate) {
                if !self.contains(&atom) {
                    return atom;
                }
            }
            i += 1;
        }
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.atoms.iter().map(|a| a.name()).collect();
        f.write_str(&names.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_names() {
        assert!(Atom::new("p").is_ok());
        assert!(Atom::new("s_acc").is_ok());
        assert!(Atom::new("e1").is_ok());
        assert!(Atom::new("P").is_err());
        assert!(Atom::new("").is_err());
        assert!(Atom::new("1e").is_err());
        assert!(Atom::new("top").is_err());
    }

    #[test]
    fn vocabulary_dedups_and_orders() {
        let p = Atom::new("p").unwrap();
        let q = Atom::new("q").unwrap();
        let v = Vocabulary::from_iter([q.clone(), p.clone(), q.clone()]);
        let got: Vec<&Atom> = v.iter().collect();
        assert_eq!(got, vec![&p, &q]);
    }

    #[test]
    fn fresh_avoids_collisions() {
        let v = Vocabulary::from_iter([Atom::new("f0").unwrap()]);
        assert_eq!(v.fresh("f").name(), "f1");
    }
}
