//! Recursive-descent parsers for formulas and bunches.
//!
//! Precedence, tightest first: `* /\ &` then `\/ +` then `-> -o -*`.
//! Conjunction and disjunction levels associate to the left, implications to
//! the right. Bunch formers `,` and `;` sit at one level and may not be mixed
//! without parentheses.

use crate::error::ParseError;
use crate::syntax::token::{lex, Cursor, Tok};
use crate::syntax::{Atom, Bunch, Formula, JoinKind, Logic};

pub fn parse_formula(text: &str, logic: Logic) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(lex(text, false)?, text.len());
    if cur.at_end() {
        return Err(ParseError::new(0, "empty input"));
    }
    let f = formula(&mut cur, logic)?;
    cur.expect_end()?;
    Ok(f)
}

pub fn parse_bunch(text: &str) -> Result<Bunch<Atom>, ParseError> {
    let mut cur = Cursor::new(lex(text, false)?, text.len());
    if cur.at_end() {
        return Err(ParseError::new(0, "empty input"));
    }
    let b = bunch(&mut cur, &mut atom_leaf)?;
    cur.expect_end()?;
    Ok(b)
}

/// A bunch whose leaves are formulas of `logic` (used for BI policy
/// contexts). Parentheses first try to be a bunch group; if what follows the
/// closing paren continues a formula, the group is re-read as a formula leaf.
pub fn parse_formula_bunch(text: &str, logic: Logic) -> Result<Bunch<Formula>, ParseError> {
    let mut cur = Cursor::new(lex(text, false)?, text.len());
    if cur.at_end() {
        return Err(ParseError::new(0, "empty input"));
    }
    let b = bunch(&mut cur, &mut |c| formula(c, logic))?;
    cur.expect_end()?;
    Ok(b)
}

pub(crate) fn formula(cur: &mut Cursor, logic: Logic) -> Result<Formula, ParseError> {
    imp_level(cur, logic)
}

fn imp_level(cur: &mut Cursor, logic: Logic) -> Result<Formula, ParseError> {
    let left = or_level(cur, logic)?;
    let pos = cur.pos();
    let make = match cur.peek() {
        Some(Tok::Arrow) => {
            require(logic, &[Logic::Ipl, Logic::Bi], "->", pos)?;
            Formula::imp
        }
        Some(Tok::Lolli) => {
            require(logic, &[Logic::Imall], "-o", pos)?;
            Formula::lolli
        }
        Some(Tok::Wand) => {
            require(logic, &[Logic::Bi], "-*", pos)?;
            Formula::wand
        }
        _ => return Ok(left),
    };
    cur.bump();
    let right = imp_level(cur, logic)?;
    Ok(make(left, right))
}

fn or_level(cur: &mut Cursor, logic: Logic) -> Result<Formula, ParseError> {
    let mut acc = and_level(cur, logic)?;
    loop {
        let pos = cur.pos();
        let make = match cur.peek() {
            Some(Tok::OrOp) => {
                require(logic, &[Logic::Ipl, Logic::Bi], "\\/", pos)?;
                Formula::or
            }
            Some(Tok::Plus) => {
                require(logic, &[Logic::Imall], "+", pos)?;
                Formula::plus
            }
            _ => break,
        };
        cur.bump();
        let rhs = and_level(cur, logic)?;
        acc = make(acc, rhs);
    }
    Ok(acc)
}

fn and_level(cur: &mut Cursor, logic: Logic) -> Result<Formula, ParseError> {
    let mut acc = unary(cur, logic)?;
    loop {
        let pos = cur.pos();
        let make = match cur.peek() {
            Some(Tok::Star) => match logic {
                Logic::Imall => Formula::tensor,
                Logic::Bi => Formula::star,
                Logic::Ipl => return Err(not_in_logic("*", logic, pos)),
            },
            Some(Tok::AndOp) => {
                require(logic, &[Logic::Ipl, Logic::Bi], "/\\", pos)?;
                Formula::and
            }
            Some(Tok::With) => {
                require(logic, &[Logic::Imall], "&", pos)?;
                Formula::with
            }
            _ => break,
        };
        cur.bump();
        let rhs = unary(cur, logic)?;
        acc = make(acc, rhs);
    }
    Ok(acc)
}

fn unary(cur: &mut Cursor, logic: Logic) -> Result<Formula, ParseError> {
    let pos = cur.pos();
    match cur.peek().cloned() {
        Some(Tok::Ident(name)) => {
            cur.bump();
            match name.as_str() {
                "top" => {
                    require(logic, &[Logic::Bi], "top", pos)?;
                    Ok(Formula::Top)
                }
                "bot" => {
                    require(logic, &[Logic::Ipl, Logic::Bi], "bot", pos)?;
                    Ok(Formula::Bottom)
                }
                "emp" => {
                    require(logic, &[Logic::Bi], "emp", pos)?;
                    Ok(Formula::MTop)
                }
                _ => Atom::new(&name).map(Formula::Atom).map_err(|e| ParseError::new(pos, e.msg)),
            }
        }
        Some(Tok::One) => {
            cur.bump();
            require(logic, &[Logic::Imall], "1", pos)?;
            Ok(Formula::One)
        }
        Some(Tok::Zero) => {
            cur.bump();
            require(logic, &[Logic::Imall], "0", pos)?;
            Ok(Formula::Zero)
        }
        Some(Tok::LParen) => {
            cur.bump();
            let f = formula(cur, logic)?;
            cur.expect(&Tok::RParen, "`)`")?;
            Ok(f)
        }
        Some(t) => Err(ParseError::new(pos, format!("expected a formula, found {t:?}"))),
        None => Err(ParseError::new(pos, "expected a formula")),
    }
}

fn require(logic: Logic, allowed: &[Logic], conn: &str, pos: usize) -> Result<(), ParseError> {
    if allowed.contains(&logic) {
        Ok(())
    } else {
        Err(not_in_logic(conn, logic, pos))
    }
}

fn not_in_logic(conn: &str, logic: Logic, pos: usize) -> ParseError {
    ParseError::new(pos, format!("connective `{conn}` is not part of {logic}"))
}

/// Parses a bunch whose leaves come from `leaf`. `,` and `;` share one
/// precedence level; chains of one former associate left; mixing requires
/// parentheses.
pub(crate) fn bunch<T: Clone>(
    cur: &mut Cursor,
    leaf: &mut impl FnMut(&mut Cursor) -> Result<T, ParseError>,
) -> Result<Bunch<T>, ParseError> {
    let mut acc = bunch_term(cur, leaf)?;
    let mut kind: Option<JoinKind> = None;
    loop {
        let pos = cur.pos();
        let here = match cur.peek() {
            Some(Tok::Comma) => JoinKind::Mul,
            Some(Tok::Semi) => JoinKind::Add,
            _ => break,
        };
        if let Some(k) = kind {
            if k != here {
                return Err(ParseError::new(pos, "mixing `,` and `;` requires parentheses"));
            }
        }
        kind = Some(here);
        cur.bump();
        let rhs = bunch_term(cur, leaf)?;
        acc = here.join(acc, rhs);
    }
    Ok(acc)
}

fn bunch_term<T: Clone>(
    cur: &mut Cursor,
    leaf: &mut impl FnMut(&mut Cursor) -> Result<T, ParseError>,
) -> Result<Bunch<T>, ParseError> {
    match cur.peek() {
        Some(Tok::MulUnit) => {
            cur.bump();
            Ok(Bunch::MulUnit)
        }
        Some(Tok::AddUnit) => {
            cur.bump();
            Ok(Bunch::AddUnit)
        }
        Some(Tok::LParen) => {
            // Could be a bunch group or parentheses inside a leaf expression.
            // Try the group reading; if the leaf parser can consume further
            // from the `(`, prefer the leaf (backtracking on the cursor).
            let save = cur.idx;
            cur.bump();
            let inner = bunch(cur, leaf)?;
            cur.expect(&Tok::RParen, "`)`")?;
            if matches!(inner, Bunch::Leaf(_)) && continues_leaf(cur.peek()) {
                cur.idx = save;
                return leaf(cur).map(Bunch::Leaf);
            }
            Ok(inner)
        }
        _ => leaf(cur).map(Bunch::Leaf),
    }
}

/// Tokens that extend a formula, signalling that a parenthesized group was
/// really a formula's own bracketing.
fn continues_leaf(tok: Option<&Tok>) -> bool {
    matches!(
        tok,
        Some(Tok::Star | Tok::AndOp | Tok::With | Tok::OrOp | Tok::Plus | Tok::Arrow | Tok::Lolli | Tok::Wand)
    )
}

pub(crate) fn atom_leaf(cur: &mut Cursor) -> Result<Atom, ParseError> {
    let pos = cur.pos();
    match cur.bump().map(|s| s.tok) {
        Some(Tok::Ident(name)) => Atom::new(&name).map_err(|e| ParseError::new(pos, e.msg)),
        other => Err(ParseError::new(pos, format!("expected an atom, found {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::render_formula;

    fn at(n: &str) -> Formula {
        Formula::Atom(Atom::new(n).unwrap())
    }

    fn batom(n: &str) -> Bunch<Atom> {
        Bunch::Leaf(Atom::new(n).unwrap())
    }

    #[test]
    fn wand_example() {
        let f = parse_formula("p -* ((p /\\ t) * h)", Logic::Bi).unwrap();
        let expected = Formula::wand(at("p"), Formula::star(Formula::and(at("p"), at("t")), at("h")));
        assert_eq!(f, expected);
    }

    #[test]
    fn atom_and_lolli() {
        assert_eq!(parse_formula("p", Logic::Ipl).unwrap(), at("p"));
        assert_eq!(
            parse_formula("e1 -o c", Logic::Imall).unwrap(),
            Formula::lolli(at("e1"), at("c"))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        // conjunction binds tighter than disjunction, tighter than implication
        let f = parse_formula("p /\\ q \\/ r -> s", Logic::Ipl).unwrap();
        let expected = Formula::imp(Formula::or(Formula::and(at("p"), at("q")), at("r")), at("s"));
        assert_eq!(f, expected);
        // implications nest to the right
        let f = parse_formula("p -> q -> r", Logic::Ipl).unwrap();
        assert_eq!(f, Formula::imp(at("p"), Formula::imp(at("q"), at("r"))));
        // conjunction chains to the left
        let f = parse_formula("p * q * r", Logic::Bi).unwrap();
        assert_eq!(f, Formula::star(Formula::star(at("p"), at("q")), at("r")));
    }

    #[test]
    fn connective_not_in_logic() {
        assert!(parse_formula("p * q", Logic::Ipl).is_err());
        assert!(parse_formula("p -> q", Logic::Imall).is_err());
        assert!(parse_formula("p -o q", Logic::Bi).is_err());
        assert!(parse_formula("emp", Logic::Imall).is_err());
        let err = parse_formula("p /\\ (q -o r)", Logic::Bi).unwrap_err();
        assert!(err.msg.contains("-o"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_formula("p -> ", Logic::Ipl).unwrap_err();
        assert_eq!(err.pos, 5);
    }

    #[test]
    fn bunch_examples() {
        let b = parse_bunch("(p ; t) , h").unwrap();
        assert_eq!(b, Bunch::mul(Bunch::add(batom("p"), batom("t")), batom("h")));

        assert_eq!(parse_bunch("e*").unwrap(), Bunch::MulUnit);
        assert_eq!(parse_bunch("e+").unwrap(), Bunch::AddUnit);

        let b = parse_bunch("p , p").unwrap();
        assert_eq!(b, Bunch::mul(batom("p"), batom("p")));

        // same-former chains associate left without parens
        let b = parse_bunch("p , q , r").unwrap();
        assert_eq!(b, Bunch::mul(Bunch::mul(batom("p"), batom("q")), batom("r")));
    }

    #[test]
    fn bunch_mixing_requires_parens() {
        assert!(parse_bunch("p , q ; r").is_err());
        assert!(parse_bunch("p ; q , r").is_err());
        assert!(parse_bunch("(p , q) ; r").is_ok());
    }

    #[test]
    fn unit_lexing_is_contextual() {
        // e times q, not a unit
        let f = parse_formula("e*q", Logic::Bi).unwrap();
        assert_eq!(f, Formula::star(at("e"), at("q")));
        let f = parse_formula("e * q", Logic::Bi).unwrap();
        assert_eq!(f, Formula::star(at("e"), at("q")));
        // e+ as a plain atom chain in IMALL
        let f = parse_formula("e+q", Logic::Imall).unwrap();
        assert_eq!(f, Formula::plus(at("e"), at("q")));
    }

    #[test]
    fn formula_bunch_policies() {
        let b = parse_formula_bunch("(p * o) -* s", Logic::Bi).unwrap();
        assert!(matches!(b, Bunch::Leaf(_)));

        let b = parse_formula_bunch("(p -* q) , (q -> r)", Logic::Bi).unwrap();
        match &b {
            Bunch::MulJoin(l, r) => {
                assert_eq!(format!("{}", render_formula(match &**l {
                    Bunch::Leaf(f) => f,
                    _ => panic!(),
                })), "p -* q");
                assert!(matches!(&**r, Bunch::Leaf(_)));
            }
            other => panic!("expected multiplicative join, got {other:?}"),
        }

        let b = parse_formula_bunch("(p ; q) , r", Logic::Bi).unwrap();
        assert_eq!(b.leaf_count(), 3);
    }
}
