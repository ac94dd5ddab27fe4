//! Printers. Compound arguments of binary connectives are always
//! parenthesized, so output re-parses to a structurally equal tree.

use crate::syntax::{Bunch, Formula};

/// ASCII rendering of a formula.
pub fn render_formula(f: &Formula) -> String {
    render_with_symbols(f, false)
}

/// Rendering with typeset connectives (`∧`, `⊸`, `∗`, ...).
pub fn render_formula_unicode(f: &Formula) -> String {
    render_with_symbols(f, true)
}

fn render_with_symbols(f: &Formula, unicode: bool) -> String {
    match f {
        Formula::Atom(a) => a.name().to_string(),
        Formula::Top => if unicode { "⊤" } else { "top" }.to_string(),
        Formula::MTop => if unicode { "⊤*" } else { "emp" }.to_string(),
        Formula::Bottom => if unicode { "⊥" } else { "bot" }.to_string(),
        Formula::One => "1".to_string(),
        Formula::Zero => "0".to_string(),
        _ => {
            let (l, r) = f.children().expect("binary");
            let op = binop_symbol(f, unicode);
            format!("{} {} {}", wrap(l, unicode), op, wrap(r, unicode))
        }
    }
}

fn binop_symbol(f: &Formula, unicode: bool) -> &'static str {
    match (f, unicode) {
        (Formula::And(..), false) => "/\\",
        (Formula::And(..), true) => "∧",
        (Formula::Or(..), false) => "\\/",
        (Formula::Or(..), true) => "∨",
        (Formula::Imp(..), false) => "->",
        (Formula::Imp(..), true) => "→",
        (Formula::Star(..), false) => "*",
        (Formula::Star(..), true) => "∗",
        (Formula::Wand(..), false) => "-*",
        (Formula::Wand(..), true) => "−∗",
        (Formula::Lolli(..), false) => "-o",
        (Formula::Lolli(..), true) => "⊸",
        (Formula::Tensor(..), false) => "*",
        (Formula::Tensor(..), true) => "⊗",
        (Formula::With(..), _) => "&",
        (Formula::Plus(..), false) => "+",
        (Formula::Plus(..), true) => "⊕",
        _ => unreachable!("not a binary connective"),
    }
}

fn wrap(f: &Formula, unicode: bool) -> String {
    let s = render_with_symbols(f, unicode);
    if f.children().is_some() {
        format!("({s})")
    } else {
        s
    }
}

/// Renders a bunch, turning leaves into text with `show`.
pub fn render_bunch_with<T>(b: &Bunch<T>, show: &mut impl FnMut(&T) -> String) -> String {
    match b {
        Bunch::Leaf(x) => show(x),
        Bunch::AddUnit => "e+".to_string(),
        Bunch::MulUnit => "e*".to_string(),
        Bunch::AddJoin(l, r) => format!("{} ; {}", wrap_bunch(l, show), wrap_bunch(r, show)),
        Bunch::MulJoin(l, r) => format!("{} , {}", wrap_bunch(l, show), wrap_bunch(r, show)),
    }
}

fn wrap_bunch<T>(b: &Bunch<T>, show: &mut impl FnMut(&T) -> String) -> String {
    let compound = b.join_kind().is_some();
    let s = render_bunch_with(b, show);
    if compound {
        format!("({s})")
    } else {
        s
    }
}

/// Renders a bunch of atoms.
pub fn render_bunch(b: &Bunch<crate::syntax::Atom>) -> String {
    render_bunch_with(b, &mut |a| a.name().to_string())
}

/// Renders a bunch of formulas; formula leaves that are compound get
/// parentheses so the result re-parses unambiguously.
pub fn render_formula_bunch(b: &Bunch<Formula>) -> String {
    render_bunch_with(b, &mut |f| {
        if f.children().is_some() {
            format!("({})", render_formula(f))
        } else {
            render_formula(f)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_bunch, parse_formula, Atom, Logic};

    #[test]
    fn pinned_renderings() {
        let f = parse_formula("p -* ((p /\\ t) * h)", Logic::Bi).unwrap();
        assert_eq!(render_formula(&f), "p -* ((p /\\ t) * h)");

        assert_eq!(render_bunch(&Bunch::<Atom>::MulUnit), "e*");

        let f = parse_formula("p + q", Logic::Imall).unwrap();
        assert_eq!(render_formula(&f), "p + q");
    }

    #[test]
    fn bunch_round_trip() {
        for src in ["(p ; t) , h", "p , p", "e+", "(p , q) ; (e* , h)"] {
            let b = parse_bunch(src).unwrap();
            assert_eq!(parse_bunch(&render_bunch(&b)).unwrap(), b);
        }
    }

    #[test]
    fn unicode_mode() {
        let f = parse_formula("e1 -o (c * c)", Logic::Imall).unwrap();
        assert_eq!(render_formula_unicode(&f), "e1 ⊸ (c ⊗ c)");
    }
}
