//! The `.rsm` model format: line-oriented declarations of a logic, an atom
//! vocabulary, named bases with rules in the per-logic surface syntax,
//! named policies, and judgments with expected statuses.

use std::collections::BTreeMap;

use crate::bases::{
    Base, BiRule, BiSchema, BiSequent, ImallPremise, ImallRule, IplPremise, IplRule, PremiseGroup, SchemaAtom,
    SchemaContext, SchemaSequent,
};
use crate::error::{ModelError, ParseError};
use crate::modelkit::{Expectation, Model, ModelJudgment};
use crate::support::{Resource, SupportContext};
use crate::syntax::token::{lex, Cursor, Tok};
use crate::syntax::{
    is_atom_name, parse::atom_leaf, parse::bunch, parse::formula, Atom, Bunch, ContextualBunch, Formula,
    JoinKind, Logic, Multiset, Vocabulary,
};

pub fn load_model(source: &str) -> Result<Model, ModelError> {
    let mut logic: Option<Logic> = None;
    let mut vocab = Vocabulary::new();
    let mut bases: BTreeMap<String, Base> = BTreeMap::new();
    let mut base_order: Vec<String> = Vec::new();
    let mut policies: BTreeMap<String, Bunch<Formula>> = BTreeMap::new();
    let mut judgments: Vec<ModelJudgment> = Vec::new();

    let lines: Vec<&str> = source.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let line_no = i + 1;
        let line = strip_comment(lines[i]);
        let trimmed = line.trim();
        i += 1;
        if trimmed.is_empty() {
            continue;
        }
        let at_line = |e: ParseError| ModelError::new(line_no, e.pos + 1, e.msg);
        let mut words = trimmed.split_whitespace();
        match words.next() {
            Some("logic") => {
                let name = words.next().ok_or_else(|| ModelError::new(line_no, 1, "missing logic name"))?;
                logic = Some(
                    Logic::parse(name)
                        .ok_or_else(|| ModelError::new(line_no, 1, format!("unknown logic `{name}`")))?,
                );
            }
            Some("atoms") => {
                for w in words {
                    let atom = Atom::new(w).map_err(at_line)?;
                    vocab.insert(atom);
                }
            }
            Some("base") => {
                let logic = logic.ok_or_else(|| ModelError::new(line_no, 1, "declare `logic` before bases"))?;
                let rest: Vec<&str> = words.collect();
                let (name, decl) = parse_base_header(&rest, line_no)?;
                match decl {
                    BaseHeader::Union(parts) => {
                        let mut acc = Base::empty(name.clone(), logic);
                        for part in parts {
                            let b = bases
                                .get(&part)
                                .ok_or_else(|| ModelError::new(line_no, 1, format!("unknown base `{part}`")))?;
                            acc = acc.union(b).map_err(|e| ModelError::new(line_no, 1, e.to_string()))?;
                        }
                        acc.name = name.clone();
                        base_order.push(name.clone());
                        bases.insert(name, acc);
                    }
                    BaseHeader::Block => {
                        let mut base = Base::empty(name.clone(), logic);
                        loop {
                            if i >= lines.len() {
                                return Err(ModelError::new(line_no, 1, "unterminated base block"));
                            }
                            let rule_line_no = i + 1;
                            let raw = strip_comment(lines[i]);
                            let rule_line = raw.trim();
                            i += 1;
                            if rule_line == "}" {
                                break;
                            }
                            if rule_line.is_empty() {
                                continue;
                            }
                            add_rule(&mut base, logic, rule_line, rule_line_no)?;
                        }
                        base_order.push(name.clone());
                        bases.insert(name, base);
                    }
                }
            }
            Some("policy") => {
                let logic = logic.ok_or_else(|| ModelError::new(line_no, 1, "declare `logic` before policies"))?;
                let name = words.next().ok_or_else(|| ModelError::new(line_no, 1, "missing policy name"))?;
                let rest = trimmed
                    .splitn(2, '=')
                    .nth(1)
                    .ok_or_else(|| ModelError::new(line_no, 1, "expected `policy NAME = ...`"))?;
                let ctx = crate::syntax::parse_formula_bunch(rest.trim(), logic).map_err(at_line)?;
                policies.insert(name.to_string(), ctx);
            }
            Some("judgment") => {
                let logic =
                    logic.ok_or_else(|| ModelError::new(line_no, 1, "declare `logic` before judgments"))?;
                let rest = trimmed.strip_prefix("judgment").unwrap().trim();
                let j = parse_judgment(rest, logic, &bases, &policies, &vocab, line_no)?;
                judgments.push(j);
            }
            Some(other) => {
                return Err(ModelError::new(line_no, 1, format!("unknown declaration `{other}`")));
            }
            None => {}
        }
    }

    let logic = logic.ok_or_else(|| ModelError::new(1, 1, "model declares no logic"))?;
    Ok(Model { logic, vocab, base_order, bases, policies, judgments })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

enum BaseHeader {
    Block,
    Union(Vec<String>),
}

fn parse_base_header(rest: &[&str], line_no: usize) -> Result<(String, BaseHeader), ModelError> {
    match rest {
        [name, "{"] => Ok((name.to_string(), BaseHeader::Block)),
        [name, "=", parts @ ..] if !parts.is_empty() => {
            let spec = parts.join(" ");
            let names: Vec<String> = spec.split('+').map(|s| s.trim().to_string()).collect();
            if names.iter().any(|n| n.is_empty()) {
                return Err(ModelError::new(line_no, 1, "expected `base NAME = B1 + B2 + ...`"));
            }
            Ok((name.to_string(), BaseHeader::Union(names)))
        }
        _ => Err(ModelError::new(line_no, 1, "expected `base NAME {` or `base NAME = B1 + B2`")),
    }
}

/// Rule surface syntax:
///   IPL    `[hyps > concl, ...] => p` or `=> p`
///   IMALL  `{hyps > p, ...} {...} => p` (a bare atom premise means no hyps)
///   BI     `P |- p, ... => Q |- q`, schemas prefixed `forall U . forall x .`
fn add_rule(base: &mut Base, logic: Logic, line: &str, line_no: usize) -> Result<(), ModelError> {
    let at_line = |e: ParseError| ModelError::new(line_no, e.pos + 1, e.msg);
    let toks = lex(line, false).map_err(at_line)?;
    let mut cur = Cursor::new(toks, line.len());
    match logic {
        Logic::Ipl => {
            let rule = parse_ipl_rule(&mut cur).map_err(at_line)?;
            base.add_ipl_rule(rule).map_err(|e| ModelError::new(line_no, 1, e.to_string()))
        }
        Logic::Imall => {
            let rule = parse_imall_rule(&mut cur).map_err(at_line)?;
            base.add_imall_rule(rule).map_err(|e| ModelError::new(line_no, 1, e.to_string()))
        }
        Logic::Bi => {
            if looks_like_schema(&cur) {
                let schema = parse_bi_schema(&mut cur).map_err(at_line)?;
                base.add_bi_schema(schema).map_err(|e| ModelError::new(line_no, 1, e.to_string()))
            } else {
                let rule = parse_bi_rule(&mut cur).map_err(at_line)?;
                base.add_bi_rule(rule).map_err(|e| ModelError::new(line_no, 1, e.to_string()))
            }
        }
    }
}

fn parse_ipl_rule(cur: &mut Cursor) -> Result<IplRule, ParseError> {
    let mut premises = Vec::new();
    if cur.eat(&Tok::LBracket) {
        loop {
            // hyps > concl, or a bare conclusion
            let mut atoms = Vec::new();
            while let Some(Tok::Ident(_)) = cur.peek() {
                atoms.push(atom_leaf(cur)?);
            }
            let premise = if cur.eat(&Tok::Gt) {
                let concl = atom_leaf(cur)?;
                IplPremise { hypotheses: atoms.into_iter().collect(), conclusion: concl }
            } else {
                if atoms.len() != 1 {
                    return Err(ParseError::new(cur.pos(), "expected `hyps > concl` or a bare atom"));
                }
                IplPremise { hypotheses: Default::default(), conclusion: atoms.pop().unwrap() }
            };
            premises.push(premise);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(&Tok::RBracket, "`]`")?;
    }
    cur.expect(&Tok::Implies, "`=>`")?;
    let conclusion = atom_leaf(cur)?;
    cur.expect_end()?;
    Ok(IplRule { premises, conclusion })
}

fn parse_imall_rule(cur: &mut Cursor) -> Result<ImallRule, ParseError> {
    let mut groups = Vec::new();
    while cur.eat(&Tok::LBrace) {
        let mut group = Vec::new();
        loop {
            let mut atoms = Vec::new();
            while let Some(Tok::Ident(_)) = cur.peek() {
                atoms.push(atom_leaf(cur)?);
            }
            let premise = if cur.eat(&Tok::Gt) {
                let concl = atom_leaf(cur)?;
                ImallPremise { hypotheses: Multiset::from_iter(atoms.into_iter()), conclusion: concl }
            } else {
                if atoms.len() != 1 {
                    return Err(ParseError::new(cur.pos(), "expected `hyps > concl` or a bare atom"));
                }
                ImallPremise { hypotheses: Multiset::empty(), conclusion: atoms.pop().unwrap() }
            };
            group.push(premise);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(&Tok::RBrace, "`}`")?;
        groups.push(PremiseGroup(group));
    }
    cur.expect(&Tok::Implies, "`=>`")?;
    let conclusion = atom_leaf(cur)?;
    cur.expect_end()?;
    Ok(ImallRule { groups, conclusion })
}

fn parse_bi_rule(cur: &mut Cursor) -> Result<BiRule, ParseError> {
    let mut premises = Vec::new();
    if !cur.eat(&Tok::Implies) {
        loop {
            premises.push(parse_bi_sequent(cur)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(&Tok::Implies, "`=>`")?;
    }
    let conclusion = parse_bi_sequent(cur)?;
    cur.expect_end()?;
    Ok(BiRule { premises, conclusion })
}

fn parse_bi_sequent(cur: &mut Cursor) -> Result<BiSequent, ParseError> {
    let context = bunch(cur, &mut atom_leaf)?;
    cur.expect(&Tok::Turnstile, "`|-`")?;
    let succedent = atom_leaf(cur)?;
    Ok(BiSequent { context, succedent })
}

fn looks_like_schema(cur: &Cursor) -> bool {
    matches!(cur.peek(), Some(Tok::Ident(w)) if w == "forall")
}

/// `forall U . forall x . U(arg) |- x, P |- p => U(arg) |- x`
fn parse_bi_schema(cur: &mut Cursor) -> Result<BiSchema, ParseError> {
    let mut vars: Vec<String> = Vec::new();
    while matches!(cur.peek(), Some(Tok::Ident(w)) if w == "forall") {
        cur.bump();
        let pos = cur.pos();
        let Some(Tok::Ident(name)) = cur.bump().map(|s| s.tok) else {
            return Err(ParseError::new(pos, "expected a variable name after `forall`"));
        };
        vars.push(name);
        cur.expect(&Tok::Dot, "`.`")?;
    }
    if vars.is_empty() {
        return Err(ParseError::new(cur.pos(), "a schema needs at least one `forall`"));
    }
    let hole_var = vars[0].clone();
    let atom_vars: Vec<String> = vars[1..].to_vec();

    let mut premises = Vec::new();
    if !cur.eat(&Tok::Implies) {
        loop {
            premises.push(parse_schema_sequent(cur, &hole_var, &atom_vars)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(&Tok::Implies, "`=>`")?;
    }
    let conclusion = parse_schema_sequent(cur, &hole_var, &atom_vars)?;
    cur.expect_end()?;
    Ok(BiSchema { hole_var, atom_vars, premises, conclusion })
}

fn parse_schema_sequent(cur: &mut Cursor, hole_var: &str, atom_vars: &[String]) -> Result<SchemaSequent, ParseError> {
    // `U( bunch )` applies the hole; anything else is a plain bunch pattern
    let holed = matches!(cur.peek(), Some(Tok::Ident(w)) if w == hole_var)
        && matches!(cur.peek2(), Some(Tok::LParen));
    let context = if holed {
        cur.bump();
        cur.bump();
        let arg = bunch(cur, &mut |c| schema_atom(c, atom_vars))?;
        cur.expect(&Tok::RParen, "`)`")?;
        SchemaContext::Holed(arg)
    } else {
        SchemaContext::Plain(bunch(cur, &mut |c| schema_atom(c, atom_vars))?)
    };
    cur.expect(&Tok::Turnstile, "`|-`")?;
    let succedent = schema_atom(cur, atom_vars)?;
    Ok(SchemaSequent { context, succedent })
}

fn schema_atom(cur: &mut Cursor, atom_vars: &[String]) -> Result<SchemaAtom, ParseError> {
    let pos = cur.pos();
    match cur.bump().map(|s| s.tok) {
        Some(Tok::Ident(name)) if atom_vars.contains(&name) => Ok(SchemaAtom::Var(name)),
        Some(Tok::Ident(name)) => {
            let atom = Atom::new(&name).map_err(|e| ParseError::new(pos, e.msg))?;
            Ok(SchemaAtom::Const(atom))
        }
        other => Err(ParseError::new(pos, format!("expected an atom or schema variable, found {other:?}"))),
    }
}

/// `judgment NAME : BASE ; RESOURCE |- GOAL expect holds|fails|unknown`
/// with an optional `; POLICY` between the resource and the turnstile.
fn parse_judgment(
    rest: &str,
    logic: Logic,
    bases: &BTreeMap<String, Base>,
    policies: &BTreeMap<String, Bunch<Formula>>,
    vocab: &Vocabulary,
    line_no: usize,
) -> Result<ModelJudgment, ModelError> {
    let err = |msg: &str| ModelError::new(line_no, 1, msg.to_string());

    // name : spec
    let (name, spec) = rest.split_once(':').ok_or_else(|| err("expected `judgment NAME : ...`"))?;
    let name = name.trim().to_string();
    if !is_atom_name(&name) {
        return Err(err("judgment names use the atom lexical shape"));
    }

    // optional trailing expectation
    let (spec, expect) = match spec.rsplit_once("expect") {
        Some((head, tail)) => {
            let expectation = match tail.trim() {
                "holds" => Expectation::Holds,
                "fails" => Expectation::Fails,
                "unknown" => Expectation::Unknown,
                other => return Err(err(&format!("unknown expectation `{other}`"))),
            };
            (head, Some(expectation))
        }
        None => (spec, None),
    };

    // BASE ; RESOURCE [; POLICY] |- GOAL
    let (lhs, goal_text) = spec.rsplit_once("|-").ok_or_else(|| err("expected `|-` in the judgment"))?;
    let parts: Vec<&str> = lhs.split(';').map(|s| s.trim()).collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(err("expected `BASE ; RESOURCE [; POLICY] |- GOAL`"));
    }
    let base = bases.get(parts[0]).ok_or_else(|| err(&format!("unknown base `{}`", parts[0])))?.clone();
    let at_line = |e: ParseError| ModelError::new(line_no, e.pos + 1, e.msg);
    let goal = crate::syntax::parse_formula(goal_text.trim(), logic).map_err(at_line)?;

    let policy = match parts.get(2) {
        Some(pname) => {
            Some(policies.get(*pname).ok_or_else(|| err(&format!("unknown policy `{pname}`")))?.clone())
        }
        None => None,
    };

    let resource_text = parts[1];
    let (resource, context) = match logic {
        Logic::Ipl => {
            if resource_text != "-" && !resource_text.is_empty() {
                return Err(err("IPL judgments carry no resources; write `-`"));
            }
            let ctx = match &policy {
                Some(b) => bunch_to_list(b).ok_or_else(|| err("IPL policies must be flat"))?,
                None => vec![],
            };
            (Resource::None, SupportContext::Ipl(ctx))
        }
        Logic::Imall => {
            let m = parse_resource_multiset(resource_text, line_no)?;
            let ctx = match &policy {
                Some(b) => bunch_to_list(b).ok_or_else(|| err("IMALL policies must be flat"))?,
                None => vec![],
            };
            (Resource::Multiset(m), SupportContext::Imall(ctx))
        }
        Logic::Bi => {
            let b = crate::syntax::parse_bunch(resource_text).map_err(at_line)?;
            match &policy {
                Some(ctx) => {
                    // with a context the resource becomes the hole `S , (.)`
                    let shape = Bunch::mul(
                        b.map(&mut |a: &Atom| crate::syntax::CtxLeaf::Item(a.clone())),
                        Bunch::Leaf(crate::syntax::CtxLeaf::Hole),
                    );
                    let hole = ContextualBunch::new(shape).expect("one hole");
                    (Resource::Contextual(hole), SupportContext::Bi(Some(ctx.clone())))
                }
                None => (Resource::Bunch(b), SupportContext::Bi(None)),
            }
        }
    };

    let judgment = crate::support::Judgment {
        logic,
        base,
        resource,
        context,
        goal,
        vocab: vocab.clone(),
    };
    judgment.validate().map_err(|e| ModelError::new(line_no, 1, e.to_string()))?;
    Ok(ModelJudgment { name, judgment, expect })
}

/// IMALL resources: `e*` for the empty multiset, otherwise a `,`-joined
/// bunch flattened into a multiset.
fn parse_resource_multiset(text: &str, line_no: usize) -> Result<Multiset, ModelError> {
    let at_line = |e: ParseError| ModelError::new(line_no, e.pos + 1, e.msg);
    let b = crate::syntax::parse_bunch(text).map_err(at_line)?;
    let mut out = Multiset::empty();
    fn walk(b: &Bunch<Atom>, out: &mut Multiset) -> bool {
        match b {
            Bunch::Leaf(a) => {
                out.insert(a.clone());
                true
            }
            Bunch::MulUnit => true,
            Bunch::MulJoin(l, r) => walk(l, out) && walk(r, out),
            _ => false,
        }
    }
    if !walk(&b, &mut out) {
        return Err(ModelError::new(line_no, 1, "IMALL resources are `,`-joined multisets".into()));
    }
    Ok(out)
}

/// Flattens an all-additive or single-former policy bunch into a list.
fn bunch_to_list(b: &Bunch<Formula>) -> Option<Vec<Formula>> {
    match b {
        Bunch::Leaf(f) => Some(vec![f.clone()]),
        Bunch::AddUnit | Bunch::MulUnit => Some(vec![]),
        Bunch::AddJoin(l, r) | Bunch::MulJoin(l, r) => {
            let mut out = bunch_to_list(l)?;
            out.extend(bunch_to_list(r)?);
            Some(out)
        }
    }
}

// formula() is re-exported for the CLI's inline parsing needs
pub(crate) use formula as _formula_parser;

const _: () = {
    // the schema parser needs JoinKind only through bunch construction
    fn _assert_kinds(_: JoinKind) {}
};
