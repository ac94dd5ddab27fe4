//! Support evaluation against the worked examples: the vending machine,
//! counterexample search over base extensions, simulation bases, and
//! prover/simulation agreement.

use rsw_core::bases::{Base, ExtensionBounds, ImallPremise, ImallRule, IplRule, PremiseGroup, Rules};
use rsw_core::derivability::SearchBounds;
use rsw_core::provers::ProofContext;
use rsw_core::support::{
    build_simulation_base, check_completeness_instance, check_support, check_validity,
    find_counterexample_extension, verdict_to_json, Judgment, Method, Resource, Strategy, SupportContext,
};
use rsw_core::syntax::{parse_formula, Atom, Bunch, Formula, Logic, Multiset, Vocabulary};

fn at(n: &str) -> Atom {
    Atom::new(n).unwrap()
}

fn ms(names: &[&str]) -> Multiset {
    Multiset::from_iter(names.iter().map(|n| at(n)))
}

fn vending_base() -> Base {
    let rule = ImallRule {
        groups: vec![PremiseGroup(vec![ImallPremise { hypotheses: Multiset::empty(), conclusion: at("e1") }])],
        conclusion: at("c"),
    };
    Base::from_imall_rules("V", [rule])
}

fn vending_judgment(resource: Multiset, ctx: Vec<Formula>, goal: &str) -> Judgment {
    Judgment {
        logic: Logic::Imall,
        base: vending_base(),
        resource: Resource::Multiset(resource),
        context: SupportContext::Imall(ctx),
        goal: parse_formula(goal, Logic::Imall).unwrap(),
        vocab: Vocabulary::from_iter([at("e1"), at("c"), at("d")]),
    }
}

#[test]
fn one_euro_buys_one_chocolate_bar() {
    let j = vending_judgment(ms(&["e1"]), vec![], "c");
    let v = check_support(&j, Strategy::Auto, &SearchBounds::default()).unwrap();
    assert!(v.is_holds(), "expected Holds, got {}", v.status.name());
    assert_eq!(v.method(), Some(Method::AtomicReduction));

    // two euros do not buy one bar
    let j = vending_judgment(ms(&["e1", "e1"]), vec![], "c");
    let v = check_support(&j, Strategy::Auto, &SearchBounds::default()).unwrap();
    assert!(v.is_fails(), "expected Fails, got {}", v.status.name());
}

#[test]
fn mtop_at_the_multiplicative_unit() {
    let j = Judgment {
        logic: Logic::Bi,
        base: Base::empty("b", Logic::Bi),
        resource: Resource::Bunch(Bunch::MulUnit),
        context: SupportContext::Bi(None),
        goal: Formula::MTop,
        vocab: Vocabulary::from_iter([at("p")]),
    };
    let v = check_support(&j, Strategy::Auto, &SearchBounds::default()).unwrap();
    assert!(v.is_holds());

    // and at a plain atom it is refutable
    let j = Judgment {
        resource: Resource::Bunch(Bunch::leaf(at("p"))),
        ..j
    };
    let v = check_support(&j, Strategy::Refute, &SearchBounds::default()).unwrap();
    assert!(v.is_fails(), "expected Fails, got {}: {:?}", v.status.name(), v.notes);
}

#[test]
fn bi_top_always_holds() {
    let j = Judgment {
        logic: Logic::Bi,
        base: Base::empty("b", Logic::Bi),
        resource: Resource::Bunch(Bunch::leaf(at("p"))),
        context: SupportContext::Bi(None),
        goal: Formula::Top,
        vocab: Vocabulary::from_iter([at("p")]),
    };
    let v = check_support(&j, Strategy::Auto, &SearchBounds::default()).unwrap();
    assert!(v.is_holds());
}

#[test]
fn validity_matches_the_vending_entailments() {
    let bounds = SearchBounds::default();
    let machine = parse_formula("e1 -o c", Logic::Imall).unwrap();

    let good = parse_formula("(e1 * e1) -o (c * c)", Logic::Imall).unwrap();
    let v = check_validity(Logic::Imall, &ProofContext::Imall(vec![machine.clone()]), &good, &bounds).unwrap();
    assert!(v.is_holds());
    assert_eq!(v.method(), Some(Method::ProverBacked));

    let bad = parse_formula("e1 -o (c * c)", Logic::Imall).unwrap();
    let v = check_validity(Logic::Imall, &ProofContext::Imall(vec![machine]), &bad, &bounds).unwrap();
    assert!(v.is_fails());

    let idem = parse_formula("p -> p", Logic::Ipl).unwrap();
    let v = check_validity(Logic::Ipl, &ProofContext::Ipl(vec![]), &idem, &bounds).unwrap();
    assert!(v.is_holds());
}

#[test]
fn empty_base_refutes_an_atom() {
    // |= p fails at the empty base itself
    let j = Judgment {
        logic: Logic::Ipl,
        base: Base::empty("empty", Logic::Ipl),
        resource: Resource::None,
        context: SupportContext::Ipl(vec![]),
        goal: parse_formula("p", Logic::Ipl).unwrap(),
        vocab: Vocabulary::from_iter([at("p"), at("q")]),
    };
    let v = check_support(&j, Strategy::Auto, &SearchBounds::default()).unwrap();
    assert!(v.is_fails());
}

#[test]
fn counterexample_for_p_supports_q() {
    let j = Judgment {
        logic: Logic::Ipl,
        base: Base::empty("empty", Logic::Ipl),
        resource: Resource::None,
        context: SupportContext::Ipl(vec![parse_formula("p", Logic::Ipl).unwrap()]),
        goal: parse_formula("q", Logic::Ipl).unwrap(),
        vocab: Vocabulary::from_iter([at("p"), at("q")]),
    };
    let witness = find_counterexample_extension(&j, &ExtensionBounds::default(), &SearchBounds::default())
        .unwrap()
        .expect("a witness extension");
    // the witness extension makes p hold while q fails: {axiom p} at least
    let Rules::Ipl(rules) = witness.base.rules() else { panic!() };
    assert!(rules.contains(&IplRule::axiom(at("p"))), "witness rules: {rules:?}");

    // the failing subgoal replays to a failure
    let sub = check_support(&witness.subgoal, Strategy::Auto, &SearchBounds::default()).unwrap();
    assert!(sub.is_fails());
}

#[test]
fn counterexample_for_one_coin_two_bars() {
    let machine = parse_formula("e1 -o c", Logic::Imall).unwrap();
    let j = vending_judgment(Multiset::empty(), vec![machine], "e1 -o (c * c)");
    let witness = find_counterexample_extension(&j, &ExtensionBounds::default(), &SearchBounds::default())
        .unwrap()
        .expect("a witness extension within default bounds");
    let sub = check_support(&witness.subgoal, Strategy::Auto, &SearchBounds::default()).unwrap();
    assert!(sub.is_fails(), "witness must replay: {}", witness.subgoal.describe());
}

#[test]
fn no_false_positive_for_the_good_entailment() {
    // {e1 -o c} |= (e1*e1) -o (c*c) is valid, so refutation finds nothing;
    // the scan is exhaustive-within-bounds, so give it a budget it can spend
    let machine = parse_formula("e1 -o c", Logic::Imall).unwrap();
    let j = vending_judgment(Multiset::empty(), vec![machine], "(e1 * e1) -o (c * c)");
    let bounds = SearchBounds { node_budget: 8_000, ..SearchBounds::default() };
    let witness = find_counterexample_extension(&j, &ExtensionBounds::default(), &bounds).unwrap();
    assert!(witness.is_none(), "unexpected witness for a valid entailment");
}

#[test]
fn simulation_base_for_disjunction_is_the_five_rule_family() {
    let fs = vec![parse_formula("p \\/ q", Logic::Ipl).unwrap()];
    let (base, enc) = build_simulation_base(&fs, Logic::Ipl).unwrap();
    // two injections plus one elimination per vocabulary atom {p, q, d}
    assert_eq!(base.rule_count(), 5);
    assert_eq!(enc.vocabulary().len(), 3);
    let d = enc.encode(&fs[0]).unwrap();
    assert!(!["p", "q"].contains(&d.name()));
}

#[test]
fn simulation_base_for_a_plain_atom_is_empty() {
    let fs = vec![parse_formula("p", Logic::Ipl).unwrap()];
    let (base, enc) = build_simulation_base(&fs, Logic::Ipl).unwrap();
    assert_eq!(base.rule_count(), 0);
    assert_eq!(enc.encode(&fs[0]).unwrap(), &at("p"));
}

#[test]
fn simulation_base_for_tensor_mirrors_the_displayed_rules() {
    let fs = vec![parse_formula("p * q", Logic::Imall).unwrap()];
    let (base, enc) = build_simulation_base(&fs, Logic::Imall).unwrap();
    // one introduction + one elimination per vocabulary atom {p, q, t}
    assert_eq!(base.rule_count(), 4);
    let t = enc.encode(&fs[0]).unwrap().clone();
    let Rules::Imall(rules) = base.rules() else { panic!() };
    // the introduction draws p and q from separate groups
    let intro = rules.iter().find(|r| r.conclusion == t).expect("introduction rule");
    assert_eq!(intro.groups.len(), 2);
}

#[test]
fn completeness_instances_agree() {
    let bounds = SearchBounds::default();

    let idem = parse_formula("p -> p", Logic::Ipl).unwrap();
    let rec = check_completeness_instance(&[], &idem, Logic::Ipl, &bounds).unwrap();
    assert_eq!(rec.prover, "Proved");
    assert_eq!(rec.simulation, "Derivable");
    assert_eq!(rec.agree, Some(true));

    let machine = parse_formula("e1 -o c", Logic::Imall).unwrap();
    let good = parse_formula("(e1 * e1) -o (c * c)", Logic::Imall).unwrap();
    let rec = check_completeness_instance(&[machine.clone()], &good, Logic::Imall, &bounds).unwrap();
    assert_eq!((rec.prover, rec.simulation, rec.agree), ("Proved", "Derivable", Some(true)));

    let bad = parse_formula("e1 -o (c * c)", Logic::Imall).unwrap();
    let rec = check_completeness_instance(&[machine], &bad, Logic::Imall, &bounds).unwrap();
    assert_eq!((rec.prover, rec.simulation, rec.agree), ("Refuted", "NotDerivable", Some(true)));
}

#[test]
fn verdict_json_has_the_published_shape() {
    let j = vending_judgment(ms(&["e1"]), vec![], "c");
    let bounds = SearchBounds::default();
    let v = check_support(&j, Strategy::Auto, &bounds).unwrap();
    let json = verdict_to_json(&v, &j, &bounds);
    let obj = json.as_object().unwrap();
    for key in ["status", "bounds", "vocabulary", "notes", "vocab_bounded"] {
        assert!(obj.contains_key(key), "missing key {key}");
    }
    assert_eq!(obj["status"], "holds");
    assert!(obj.contains_key("method") && obj.contains_key("evidence"));
}
