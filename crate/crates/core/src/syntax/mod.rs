//! Atom vocabularies, formula ASTs, the bunch algebra, parsing and printing.

mod atom;
mod bunch;
mod formula;
mod multiset;
pub(crate) mod parse;
mod render;
pub(crate) mod token;

pub use atom::{is_atom_name, Atom, Vocabulary, RESERVED};
pub use bunch::{rebuild, Bunch, BunchPath, ContextualBunch, CtxLeaf, JoinKind, Step};
pub use formula::{Formula, Logic};
pub use multiset::Multiset;
pub use parse::{parse_bunch, parse_formula, parse_formula_bunch};
pub use render::{
    render_bunch, render_bunch_with, render_formula, render_formula_bunch, render_formula_unicode,
};
