//! Finite multisets of atoms, the resource contexts of the linear regime.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::Atom;

/// Counts are always positive; zero-count entries are removed eagerly so
/// structural equality coincides with multiset equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Multiset {
    counts: BTreeMap<Atom, usize>,
}

impl Multiset {
    pub fn empty() -> Multiset {
        Multiset::default()
    }

    pub fn singleton(a: Atom) -> Multiset {
        let mut m = Multiset::empty();
        m.insert(a);
        m
    }

    pub fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Multiset {
        let mut m = Multiset::empty();
        for a in iter {
            m.insert(a);
        }
        m
    }

    pub fn insert(&mut self, a: Atom) {
        *self.counts.entry(a).or_insert(0) += 1;
    }

    /// Removes one occurrence; false when absent.
    pub fn remove_one(&mut self, a: &Atom) -> bool {
        match self.counts.get_mut(a) {
            Some(n) if *n > 1 => {
                *n -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(a);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, a: &Atom) -> usize {
        self.counts.get(a).copied().unwrap_or(0)
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.count(a) > 0
    }

    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn is_singleton_of(&self, a: &Atom) -> bool {
        self.len() == 1 && self.contains(a)
    }

    /// Multiset union; commutative and associative with `empty` as unit.
    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut m = self.clone();
        for (a, n) in &other.counts {
            *m.counts.entry(a.clone()).or_insert(0) += n;
        }
        m
    }

    /// True when `self` is a sub-multiset of `other` (count-wise).
    pub fn subset_of(&self, other: &Multiset) -> bool {
        self.counts.iter().all(|(a, n)| other.count(a) >= *n)
    }

    /// Count-wise difference, saturating at zero.
    pub fn difference(&self, other: &Multiset) -> Multiset {
        let mut m = Multiset::empty();
        for (a, n) in &self.counts {
            let k = n.saturating_sub(other.count(a));
            if k > 0 {
                m.counts.insert(a.clone(), k);
            }
        }
        m
    }

    /// Distinct atoms, in order.
    pub fn support(&self) -> impl Iterator<Item = &Atom> {
        self.counts.keys()
    }

    /// Every element with multiplicity, in order.
    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.counts.iter().flat_map(|(a, n)| std::iter::repeat(a).take(*n))
    }

    /// All sub-multisets, including empty and self.
    pub fn sub_multisets(&self) -> Vec<Multiset> {
        let entries: Vec<(&Atom, usize)> = self.counts.iter().map(|(a, n)| (a, *n)).collect();
        let mut out = vec![Multiset::empty()];
        for (a, n) in entries {
            let mut next = Vec::with_capacity(out.len() * (n + 1));
            for m in &out {
                for k in 0..=n {
                    let mut m2 = m.clone();
                    if k > 0 {
                        m2.counts.insert(a.clone(), k);
                    }
                    next.push(m2);
                }
            }
            out = next;
        }
        out
    }

    /// All ordered splits of `self` into `k` parts.
    pub fn splits(&self, k: usize) -> Vec<Vec<Multiset>> {
        if k == 0 {
            return if self.is_empty() { vec![vec![]] } else { vec![] };
        }
        if k == 1 {
            return vec![vec![self.clone()]];
        }
        let mut out = Vec::new();
        for first in self.sub_multisets() {
            let rest = self.difference(&first);
            for mut tail in rest.splits(k - 1) {
                let mut split = Vec::with_capacity(k);
                split.push(first.clone());
                split.append(&mut tail);
                out.push(split);
            }
        }
        out
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e*");
        }
        let parts: Vec<String> = self.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(" , "))
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(n: &str) -> Atom {
        Atom::new(n).unwrap()
    }

    fn ms(names: &[&str]) -> Multiset {
        Multiset::from_iter(names.iter().map(|n| at(n)))
    }

    #[test]
    fn union_is_commutative_with_unit() {
        let a = ms(&["p", "p", "q"]);
        let b = ms(&["q"]);
        assert_eq!(a.union(&b), b.union(&a));
        assert_eq!(a.union(&Multiset::empty()), a);
    }

    #[test]
    fn splits_cover_everything() {
        let m = ms(&["p", "q"]);
        let parts = m.splits(2);
        // (pq,-), (p,q), (q,p), (-,pq)
        assert_eq!(parts.len(), 4);
        for s in parts {
            assert_eq!(s[0].union(&s[1]), m);
        }
    }

    #[test]
    fn sub_multisets_count() {
        let m = ms(&["p", "p", "q"]);
        // multiplicities (2+1)*(1+1) = 6
        assert_eq!(m.sub_multisets().len(), 6);
    }
}
