//! Bunches: tree-shaped contexts with an additive former `;` (unit `e+`)
//! and a multiplicative former `,` (unit `e*`).
//!
//! Coherent equivalence makes both formers commutative monoids; it is decided
//! by comparing canonical forms (flatten, drop units, sort). Bunch-extension
//! (written `>=` below) is the closure of additive weakening inside any
//! sub-bunch and is decided by stripping search.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::QueryError;

/// A bunch over items of type `T`. Items are atoms for resource contexts and
/// formulas for policy contexts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bunch<T> {
    Leaf(T),
    /// The additive unit, written `e+`.
    AddUnit,
    /// The multiplicative unit, written `e*`.
    MulUnit,
    /// `l ; r`
    AddJoin(Box<Bunch<T>>, Box<Bunch<T>>),
    /// `l , r`
    MulJoin(Box<Bunch<T>>, Box<Bunch<T>>),
}

/// The two join kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoinKind {
    Add,
    Mul,
}

impl JoinKind {
    pub fn unit<T>(self) -> Bunch<T> {
        match self {
            JoinKind::Add => Bunch::AddUnit,
            JoinKind::Mul => Bunch::MulUnit,
        }
    }

    pub fn join<T>(self, l: Bunch<T>, r: Bunch<T>) -> Bunch<T> {
        match self {
            JoinKind::Add => Bunch::AddJoin(Box::new(l), Box::new(r)),
            JoinKind::Mul => Bunch::MulJoin(Box::new(l), Box::new(r)),
        }
    }
}

/// One step of a path from the root of a bunch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Left,
    Right,
}

/// Identifies a single occurrence of a sub-bunch.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BunchPath(pub Vec<Step>);

impl BunchPath {
    pub fn root() -> BunchPath {
        BunchPath(Vec::new())
    }
}

impl<T> Bunch<T> {
    pub fn leaf(item: T) -> Bunch<T> {
        Bunch::Leaf(item)
    }

    pub fn add(l: Bunch<T>, r: Bunch<T>) -> Bunch<T> {
        Bunch::AddJoin(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Bunch<T>, r: Bunch<T>) -> Bunch<T> {
        Bunch::MulJoin(Box::new(l), Box::new(r))
    }

    pub fn join_kind(&self) -> Option<JoinKind> {
        match self {
            Bunch::AddJoin(..) => Some(JoinKind::Add),
            Bunch::MulJoin(..) => Some(JoinKind::Mul),
            _ => None,
        }
    }

    /// Number of tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Bunch::AddJoin(l, r) | Bunch::MulJoin(l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    /// Number of leaves carrying items.
    pub fn leaf_count(&self) -> usize {
        match self {
            Bunch::Leaf(_) => 1,
            Bunch::AddUnit | Bunch::MulUnit => 0,
            Bunch::AddJoin(l, r) | Bunch::MulJoin(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn leaves(&self) -> Vec<&T> {
        match self {
            Bunch::Leaf(x) => vec![x],
            Bunch::AddUnit | Bunch::MulUnit => vec![],
            Bunch::AddJoin(l, r) | Bunch::MulJoin(l, r) => {
                let mut v = l.leaves();
                v.extend(r.leaves());
                v
            }
        }
    }

    pub fn map<U>(&self, f: &mut impl FnMut(&T) -> U) -> Bunch<U> {
        match self {
            Bunch::Leaf(x) => Bunch::Leaf(f(x)),
            Bunch::AddUnit => Bunch::AddUnit,
            Bunch::MulUnit => Bunch::MulUnit,
            Bunch::AddJoin(l, r) => Bunch::add(l.map(f), r.map(f)),
            Bunch::MulJoin(l, r) => Bunch::mul(l.map(f), r.map(f)),
        }
    }

    /// Replaces every leaf by a whole bunch, splicing it in place.
    pub fn bind<U>(&self, f: &mut impl FnMut(&T) -> Bunch<U>) -> Bunch<U> {
        match self {
            Bunch::Leaf(x) => f(x),
            Bunch::AddUnit => Bunch::AddUnit,
            Bunch::MulUnit => Bunch::MulUnit,
            Bunch::AddJoin(l, r) => Bunch::add(l.bind(f), r.bind(f)),
            Bunch::MulJoin(l, r) => Bunch::mul(l.bind(f), r.bind(f)),
        }
    }

    /// Resolves a path to the occurrence it addresses.
    pub fn at(&self, path: &BunchPath) -> Result<&Bunch<T>, QueryError> {
        let mut cur = self;
        for step in &path.0 {
            cur = match (cur, step) {
                (Bunch::AddJoin(l, _), Step::Left) | (Bunch::MulJoin(l, _), Step::Left) => l,
                (Bunch::AddJoin(_, r), Step::Right) | (Bunch::MulJoin(_, r), Step::Right) => r,
                _ => return Err(QueryError::Shape("path does not resolve".into())),
            };
        }
        Ok(cur)
    }

    /// Paths of every sub-bunch occurrence, preorder.
    pub fn occurrence_paths(&self) -> Vec<BunchPath> {
        let mut out = Vec::new();
        fn walk<T>(b: &Bunch<T>, prefix: &mut Vec<Step>, out: &mut Vec<BunchPath>) {
            out.push(BunchPath(prefix.clone()));
            if let Bunch::AddJoin(l, r) | Bunch::MulJoin(l, r) = b {
                prefix.push(Step::Left);
                walk(l, prefix, out);
                prefix.pop();
                prefix.push(Step::Right);
                walk(r, prefix, out);
                prefix.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

impl<T: Clone> Bunch<T> {
    /// Replaces exactly the addressed occurrence, leaving all others alone.
    pub fn substitute_at(&self, path: &BunchPath, replacement: Bunch<T>) -> Result<Bunch<T>, QueryError> {
        fn go<T: Clone>(b: &Bunch<T>, steps: &[Step], r: Bunch<T>) -> Result<Bunch<T>, QueryError> {
            match steps.split_first() {
                None => Ok(r),
                Some((step, rest)) => match (b, step) {
                    (Bunch::AddJoin(l, rr), Step::Left) => Ok(Bunch::add(go(l, rest, r)?, (**rr).clone())),
                    (Bunch::AddJoin(l, rr), Step::Right) => Ok(Bunch::add((**l).clone(), go(rr, rest, r)?)),
                    (Bunch::MulJoin(l, rr), Step::Left) => Ok(Bunch::mul(go(l, rest, r)?, (**rr).clone())),
                    (Bunch::MulJoin(l, rr), Step::Right) => Ok(Bunch::mul((**l).clone(), go(rr, rest, r)?)),
                    _ => Err(QueryError::Shape("path does not resolve".into())),
                },
            }
        }
        go(self, &path.0, replacement)
    }
}

impl<T: Clone + Ord> Bunch<T> {
    /// Canonical representative of the coherent-equivalence class: same-former
    /// nests are flattened, units dropped (a join of nothing collapses to its
    /// unit, a join of one to its sole child), children sorted, and the node
    /// rebuilt right-nested.
    pub fn normalize(&self) -> Bunch<T> {
        match self {
            Bunch::Leaf(_) | Bunch::AddUnit | Bunch::MulUnit => self.clone(),
            Bunch::AddJoin(..) => rebuild(JoinKind::Add, self.flatten_normal(JoinKind::Add)),
            Bunch::MulJoin(..) => rebuild(JoinKind::Mul, self.flatten_normal(JoinKind::Mul)),
        }
    }

    /// Normalized children of a `kind` nest, units removed, sorted.
    fn flatten_normal(&self, kind: JoinKind) -> Vec<Bunch<T>> {
        let mut out = Vec::new();
        fn collect<T: Clone + Ord>(b: &Bunch<T>, kind: JoinKind, out: &mut Vec<Bunch<T>>) {
            if b.join_kind() == Some(kind) {
                if let Bunch::AddJoin(l, r) | Bunch::MulJoin(l, r) = b {
                    collect(l, kind, out);
                    collect(r, kind, out);
                }
            } else {
                let n = b.normalize();
                if n != kind.unit() {
                    out.push(n);
                }
            }
        }
        collect(self, kind, &mut out);
        out.sort();
        out
    }

    /// Coherent equivalence: the least congruence making both formers
    /// commutative monoids over their units.
    pub fn equiv(&self, other: &Bunch<T>) -> bool {
        self.normalize() == other.normalize()
    }

    /// Flattened children of the root when it is a join of `kind` in
    /// canonical form, otherwise the bunch itself as a singleton list.
    pub fn canonical_children(&self, kind: JoinKind) -> Vec<Bunch<T>> {
        if self.join_kind() == Some(kind) {
            self.flatten_normal(kind)
        } else {
            vec![self.normalize()]
        }
    }

    /// Bunch-extension `self >= other`: the least relation closed under
    /// additive weakening at any occurrence and transitivity (hence
    /// reflexive). Decided by searching weakening-removals downward from
    /// `self`; every strip strictly shrinks the canonical tree, so the search
    /// terminates.
    pub fn extends(&self, other: &Bunch<T>) -> bool {
        let start = self.normalize();
        let goal = other.normalize();
        if start == goal {
            return true;
        }
        let goal_size = goal.size();
        let mut seen: BTreeSet<Bunch<T>> = BTreeSet::new();
        let mut queue: VecDeque<Bunch<T>> = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(cur) = queue.pop_front() {
            for next in strip_steps(&cur) {
                if next == goal {
                    return true;
                }
                if next.size() < goal_size {
                    continue;
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        false
    }

    /// Every canonical bunch below `self` under bunch-extension, including
    /// the canonical form of `self` itself.
    pub fn weakening_downset(&self) -> Vec<Bunch<T>> {
        let start = self.normalize();
        let mut seen: BTreeSet<Bunch<T>> = BTreeSet::new();
        let mut queue: VecDeque<Bunch<T>> = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(cur) = queue.pop_front() {
            for next in strip_steps(&cur) {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Rebuilds a sorted child list as a canonical right-nested join.
pub fn rebuild<T>(kind: JoinKind, mut children: Vec<Bunch<T>>) -> Bunch<T> {
    match children.len() {
        0 => kind.unit(),
        1 => children.pop().unwrap(),
        _ => {
            let mut it = children.into_iter().rev();
            let mut acc = it.next().unwrap();
            for c in it {
                acc = kind.join(c, acc);
            }
            acc
        }
    }
}

/// All canonical bunches reachable from `b` by removing one weakening:
/// either some occurrence collapses to `e+`, or an additive node keeps a
/// nonempty proper sub-multiset of its children.
fn strip_steps<T: Clone + Ord>(b: &Bunch<T>) -> Vec<Bunch<T>> {
    let mut out = BTreeSet::new();
    for path in b.occurrence_paths() {
        let here = b.at(&path).expect("own path");
        if *here != Bunch::AddUnit {
            let stripped = b.substitute_at(&path, Bunch::AddUnit).expect("own path");
            out.insert(stripped.normalize());
        }
        if here.join_kind() == Some(JoinKind::Add) {
            let children = here.flatten_normal(JoinKind::Add);
            for subset in proper_subsets(&children) {
                let replacement = rebuild(JoinKind::Add, subset);
                let next = b.substitute_at(&path, replacement).expect("own path");
                out.insert(next.normalize());
            }
        }
    }
    out.into_iter().collect()
}

/// Nonempty proper sub-multisets, by index subsets deduplicated on content.
fn proper_subsets<T: Clone + Ord>(children: &[Bunch<T>]) -> Vec<Vec<Bunch<T>>> {
    let n = children.len();
    let mut out = BTreeSet::new();
    for mask in 1..(1u32 << n) - 1 {
        let subset: Vec<Bunch<T>> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| children[i].clone()).collect();
        out.insert(subset);
    }
    out.into_iter().collect()
}

/// A leaf of a contextual bunch: an ordinary item or the unique hole.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CtxLeaf<T> {
    Item(T),
    Hole,
}

/// A bunch with exactly one hole; applying it substitutes the hole.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextualBunch<T> {
    shape: Bunch<CtxLeaf<T>>,
}

impl<T: Clone + Ord> Default for ContextualBunch<T> {
    fn default() -> Self {
        ContextualBunch::identity()
    }
}

impl<T: Clone + Ord> ContextualBunch<T> {
    /// The identity contextual bunch `(.)`.
    pub fn identity() -> ContextualBunch<T> {
        ContextualBunch { shape: Bunch::Leaf(CtxLeaf::Hole) }
    }

    pub fn new(shape: Bunch<CtxLeaf<T>>) -> Result<ContextualBunch<T>, QueryError> {
        let holes = shape.leaves().iter().filter(|l| ***l == CtxLeaf::Hole).count();
        if holes != 1 {
            return Err(QueryError::Shape(format!("contextual bunch must have exactly one hole, found {holes}")));
        }
        Ok(ContextualBunch { shape })
    }

    /// The bunch with the hole at `path` in `b`.
    pub fn from_hole_at(b: &Bunch<T>, path: &BunchPath) -> Result<ContextualBunch<T>, QueryError> {
        let shape = b.map(&mut |x| CtxLeaf::Item(x.clone()));
        let shape = shape.substitute_at(path, Bunch::Leaf(CtxLeaf::Hole))?;
        ContextualBunch::new(shape)
    }

    pub fn shape(&self) -> &Bunch<CtxLeaf<T>> {
        &self.shape
    }

    pub fn size(&self) -> usize {
        self.shape.size()
    }

    /// Plugs `filler` into the hole.
    pub fn apply(&self, filler: &Bunch<T>) -> Bunch<T> {
        fn go<T: Clone>(shape: &Bunch<CtxLeaf<T>>, filler: &Bunch<T>) -> Bunch<T> {
            match shape {
                Bunch::Leaf(CtxLeaf::Item(x)) => Bunch::Leaf(x.clone()),
                Bunch::Leaf(CtxLeaf::Hole) => filler.clone(),
                Bunch::AddUnit => Bunch::AddUnit,
                Bunch::MulUnit => Bunch::MulUnit,
                Bunch::AddJoin(l, r) => Bunch::add(go(l, filler), go(r, filler)),
                Bunch::MulJoin(l, r) => Bunch::mul(go(l, filler), go(r, filler)),
            }
        }
        go(&self.shape, filler)
    }
}

impl<T: Clone + Ord + fmt::Display> fmt::Display for ContextualBunch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = crate::syntax::render_bunch_with(&self.shape, &mut |l: &CtxLeaf<T>| match l {
            CtxLeaf::Item(x) => x.to_string(),
            CtxLeaf::Hole => "(.)".to_string(),
        });
        f.write_str(&rendered)
    }
}

impl<T: fmt::Display> fmt::Display for Bunch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_bunch_with(self, &mut |x: &T| x.to_string()))
    }
}

impl<T: fmt::Debug> fmt::Debug for Bunch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_bunch_with(self, &mut |x: &T| format!("{x:?}")))
    }
}

impl<T: fmt::Debug> fmt::Debug for ContextualBunch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = crate::syntax::render_bunch_with(&self.shape, &mut |l: &CtxLeaf<T>| match l {
            CtxLeaf::Item(x) => format!("{x:?}"),
            CtxLeaf::Hole => "(.)".to_string(),
        });
        f.write_str(&rendered)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Atom;

    fn at(n: &str) -> Bunch<Atom> {
        Bunch::Leaf(Atom::new(n).unwrap())
    }

    #[test]
    fn normalize_flattens_sorts_and_strips_units() {
        // (p , (q , r)) flattens and sorts
        let b = Bunch::mul(at("p"), Bunch::mul(at("q"), at("r")));
        let c = Bunch::mul(Bunch::mul(at("r"), at("q")), at("p"));
        assert_eq!(b.normalize(), c.normalize());

        // (e+ ; p) -> p
        let b = Bunch::add(Bunch::AddUnit, at("p"));
        assert_eq!(b.normalize(), at("p"));

        // ((q ; p) , e*) -> additive pair only
        let b = Bunch::mul(Bunch::add(at("q"), at("p")), Bunch::MulUnit);
        assert_eq!(b.normalize(), Bunch::add(at("p"), at("q")));

        // a join of units collapses to the unit
        let b = Bunch::<Atom>::add(Bunch::AddUnit, Bunch::AddUnit);
        assert_eq!(b.normalize(), Bunch::AddUnit);

        // e+ inside a multiplicative join is not a unit there
        let b = Bunch::mul(Bunch::AddUnit, at("p"));
        assert_eq!(b.normalize().size(), 3);
    }

    #[test]
    fn equiv_examples() {
        let pq = Bunch::mul(at("p"), at("q"));
        let qp = Bunch::mul(at("q"), at("p"));
        assert!(pq.equiv(&qp));

        let g = Bunch::add(at("p"), Bunch::mul(at("q"), at("r")));
        let g_unit = Bunch::add(g.clone(), Bunch::AddUnit);
        assert!(g_unit.equiv(&g));

        let a = Bunch::mul(at("p"), Bunch::add(at("q"), Bunch::AddUnit));
        let b = Bunch::mul(at("p"), at("q"));
        assert!(a.equiv(&b));

        assert!(!pq.equiv(&Bunch::add(at("p"), at("q"))));
    }

    #[test]
    fn extends_examples() {
        // (p ; q) >= p by weakening
        assert!(Bunch::add(at("p"), at("q")).extends(&at("p")));
        // reflexivity
        assert!(at("p").extends(&at("p")));
        // ((p ; q) , r) >= (p , r)
        let g = Bunch::mul(Bunch::add(at("p"), at("q")), at("r"));
        let h = Bunch::mul(at("p"), at("r"));
        assert!(g.extends(&h));
        // no multiplicative weakening
        assert!(!Bunch::mul(at("p"), at("q")).extends(&at("p")));
        // anything >= e+
        assert!(at("p").extends(&Bunch::AddUnit));
        assert!(!at("p").extends(&Bunch::MulUnit));
        // additive material inserted below a leaf: ((p ; t) , h) >= (t , h)
        let g = Bunch::mul(Bunch::add(at("p"), at("t")), at("h"));
        assert!(g.extends(&Bunch::mul(at("t"), at("h"))));
        assert!(!Bunch::mul(at("t"), at("h")).extends(&g));
    }

    #[test]
    fn substitute_at_is_occurrence_sensitive() {
        let g = Bunch::mul(at("p"), at("p"));
        let got = g.substitute_at(&BunchPath(vec![Step::Left]), at("q")).unwrap();
        assert_eq!(got, Bunch::mul(at("q"), at("p")));

        // root replacement
        let g = Bunch::add(at("p"), at("t"));
        assert_eq!(g.substitute_at(&BunchPath::root(), at("h")).unwrap(), at("h"));

        // ((p;t),h) at Left.Right replaced by (t;s)
        let g = Bunch::mul(Bunch::add(at("p"), at("t")), at("h"));
        let r = Bunch::add(at("t"), at("s"));
        let got = g.substitute_at(&BunchPath(vec![Step::Left, Step::Right]), r.clone()).unwrap();
        assert_eq!(got, Bunch::mul(Bunch::add(at("p"), r), at("h")));
    }

    #[test]
    fn contextual_bunch_apply() {
        let hole_in_pair = ContextualBunch::from_hole_at(
            &Bunch::mul(at("p"), at("q")),
            &BunchPath(vec![Step::Right]),
        )
        .unwrap();
        let applied = hole_in_pair.apply(&Bunch::add(at("a"), at("b")));
        assert_eq!(applied, Bunch::mul(at("p"), Bunch::add(at("a"), at("b"))));

        let id = ContextualBunch::identity();
        assert_eq!(id.apply(&at("p")), at("p"));
    }
}
