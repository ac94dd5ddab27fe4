//! Simulation bases: fresh atoms stand for compound subformulas and atomic
//! rules mirror the natural-deduction introduction and elimination rules.
//! This is the engine of the completeness arguments, and cross-checking the
//! prover against derivability over a simulation base exercises both
//! directions of the theorems at desk scale.

use std::collections::BTreeMap;

use crate::bases::{Base, ImallPremise, ImallRule, IplPremise, IplRule, PremiseGroup};
use crate::derivability::{derive_imall, derive_ipl, DerivationStatus, SearchBounds};
use crate::error::QueryError;
use crate::provers::{prove, ProofContext, ProofStatus};
use crate::syntax::{Atom, Formula, Logic, Multiset, Vocabulary};

/// A bijection between a subformula-closed set and atoms; atoms encode
/// themselves, compound formulas get fresh atoms disjoint from the source
/// vocabulary.
#[derive(Clone, Debug)]
pub struct EncodingMap {
    map: BTreeMap<Formula, Atom>,
    vocab: Vocabulary,
}

impl EncodingMap {
    pub fn encode(&self, f: &Formula) -> Option<&Atom> {
        self.map.get(f)
    }

    /// Source atoms plus encoding atoms.
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }
}

/// Builds the simulation base for a formula set (closed under subformulas
/// here for convenience). Elimination rules that quantify over an arbitrary
/// atom are instantiated for every atom of the encoding vocabulary, since
/// atomic rules are never closed under substitution.
pub fn build_simulation_base(fs: &[Formula], logic: Logic) -> Result<(Base, EncodingMap), QueryError> {
    if logic == Logic::Bi {
        return Err(QueryError::Shape("simulation bases cover IPL and IMALL only".into()));
    }
    for f in fs {
        f.validate(logic)?;
    }

    // close under subformulas, deterministically ordered
    let mut closed: Vec<Formula> = Vec::new();
    for f in fs {
        for sub in f.subformulas() {
            if !closed.contains(sub) {
                closed.push(sub.clone());
            }
        }
    }
    closed.sort();

    let mut source_vocab = Vocabulary::new();
    for f in &closed {
        f.collect_atoms(&mut source_vocab);
    }

    let mut map: BTreeMap<Formula, Atom> = BTreeMap::new();
    let mut vocab = source_vocab.clone();
    for f in &closed {
        if let Formula::Atom(a) = f {
            map.insert(f.clone(), a.clone());
        } else {
            let fresh = vocab.fresh("f");
            vocab.insert(fresh.clone());
            map.insert(f.clone(), fresh);
        }
    }

    let enc = |f: &Formula| -> Atom { map[f].clone() };
    let all_atoms: Vec<Atom> = vocab.iter().cloned().collect();

    let mut base = Base::empty("simulation", logic);
    for f in &closed {
        match logic {
            Logic::Ipl => add_ipl_rules(&mut base, f, &enc, &all_atoms)?,
            Logic::Imall => add_imall_rules(&mut base, f, &enc, &all_atoms)?,
            Logic::Bi => unreachable!(),
        }
    }
    Ok((base, EncodingMap { map, vocab }))
}

fn add_ipl_rules(
    base: &mut Base,
    f: &Formula,
    enc: &impl Fn(&Formula) -> Atom,
    all_atoms: &[Atom],
) -> Result<(), QueryError> {
    let x = enc(f);
    match f {
        Formula::And(alpha, beta) => {
            let (a, b) = (enc(alpha), enc(beta));
            // a, b => x ; x => a ; x => b
            base.add_ipl_rule(IplRule {
                premises: vec![bare_ipl(a.clone()), bare_ipl(b.clone())],
                conclusion: x.clone(),
            })?;
            base.add_ipl_rule(IplRule { premises: vec![bare_ipl(x.clone())], conclusion: a })?;
            base.add_ipl_rule(IplRule { premises: vec![bare_ipl(x)], conclusion: b })?;
        }
        Formula::Or(alpha, beta) => {
            let (a, b) = (enc(alpha), enc(beta));
            base.add_ipl_rule(IplRule { premises: vec![bare_ipl(a.clone())], conclusion: x.clone() })?;
            base.add_ipl_rule(IplRule { premises: vec![bare_ipl(b.clone())], conclusion: x.clone() })?;
            // (a |- v), (b |- v), x => v for every atom v
            for v in all_atoms {
                base.add_ipl_rule(IplRule {
                    premises: vec![
                        IplPremise { hypotheses: [a.clone()].into_iter().collect(), conclusion: v.clone() },
                        IplPremise { hypotheses: [b.clone()].into_iter().collect(), conclusion: v.clone() },
                        bare_ipl(x.clone()),
                    ],
                    conclusion: v.clone(),
                })?;
            }
        }
        Formula::Imp(alpha, beta) => {
            let (a, b) = (enc(alpha), enc(beta));
            // ([a] |- b) => x ; x, a => b
            base.add_ipl_rule(IplRule {
                premises: vec![IplPremise {
                    hypotheses: [a.clone()].into_iter().collect(),
                    conclusion: b.clone(),
                }],
                conclusion: x.clone(),
            })?;
            base.add_ipl_rule(IplRule { premises: vec![bare_ipl(x), bare_ipl(a)], conclusion: b })?;
        }
        Formula::Bottom => {
            for v in all_atoms {
                base.add_ipl_rule(IplRule { premises: vec![bare_ipl(x.clone())], conclusion: v.clone() })?;
            }
        }
        _ => {}
    }
    Ok(())
}

fn bare_ipl(conclusion: Atom) -> IplPremise {
    IplPremise { hypotheses: Default::default(), conclusion }
}

fn add_imall_rules(
    base: &mut Base,
    f: &Formula,
    enc: &impl Fn(&Formula) -> Atom,
    all_atoms: &[Atom],
) -> Result<(), QueryError> {
    let x = enc(f);
    let bare = |a: Atom| ImallPremise { hypotheses: Multiset::empty(), conclusion: a };
    let with_hyps = |hyps: Vec<Atom>, concl: Atom| ImallPremise {
        hypotheses: Multiset::from_iter(hyps.into_iter()),
        conclusion: concl,
    };
    match f {
        Formula::Tensor(alpha, beta) => {
            let (a, b) = (enc(alpha), enc(beta));
            // {a} {b} => x — separate groups split the context
            base.add_imall_rule(ImallRule {
                groups: vec![PremiseGroup(vec![bare(a.clone())]), PremiseGroup(vec![bare(b.clone())])],
                conclusion: x.clone(),
            })?;
            // {x} {[a,b] |- v} => v
            for v in all_atoms {
                base.add_imall_rule(ImallRule {
                    groups: vec![
                        PremiseGroup(vec![bare(x.clone())]),
                        PremiseGroup(vec![with_hyps(vec![a.clone(), b.clone()], v.clone())]),
                    ],
                    conclusion: v.clone(),
                })?;
            }
        }
        Formula::Lolli(alpha, beta) => {
            let (a, b) = (enc(alpha), enc(beta));
            base.add_imall_rule(ImallRule {
                groups: vec![PremiseGroup(vec![with_hyps(vec![a.clone()], b.clone())])],
                conclusion: x.clone(),
            })?;
            base.add_imall_rule(ImallRule {
                groups: vec![PremiseGroup(vec![bare(x)]), PremiseGroup(vec![bare(a)])],
                conclusion: b,
            })?;
        }
        Formula::With(alpha, beta) => {
            let (a, b) = (enc(alpha), enc(beta));
            // one group, two premises: both from the same share
            base.add_imall_rule(ImallRule {
                groups: vec![PremiseGroup(vec![bare(a.clone()), bare(b.clone())])],
                conclusion: x.clone(),
            })?;
            base.add_imall_rule(ImallRule { groups: vec![PremiseGroup(vec![bare(x.clone())])], conclusion: a })?;
            base.add_imall_rule(ImallRule { groups: vec![PremiseGroup(vec![bare(x)])], conclusion: b })?;
        }
        Formula::Plus(alpha, beta) => {
            let (a, b) = (enc(alpha), enc(beta));
            base.add_imall_rule(ImallRule {
                groups: vec![PremiseGroup(vec![bare(a.clone())])],
                conclusion: x.clone(),
            })?;
            base.add_imall_rule(ImallRule {
                groups: vec![PremiseGroup(vec![bare(b.clone())])],
                conclusion: x.clone(),
            })?;
            // {x} {[a]|-v, [b]|-v} => v — the case split shares its slice
            for v in all_atoms {
                base.add_imall_rule(ImallRule {
                    groups: vec![
                        PremiseGroup(vec![bare(x.clone())]),
                        PremiseGroup(vec![
                            with_hyps(vec![a.clone()], v.clone()),
                            with_hyps(vec![b.clone()], v.clone()),
                        ]),
                    ],
                    conclusion: v.clone(),
                })?;
            }
        }
        Formula::One => {
            base.add_imall_rule(ImallRule::axiom(x.clone()))?;
            for v in all_atoms {
                base.add_imall_rule(ImallRule {
                    groups: vec![PremiseGroup(vec![bare(x.clone())]), PremiseGroup(vec![bare(v.clone())])],
                    conclusion: v.clone(),
                })?;
            }
        }
        Formula::Zero => {
            for v in all_atoms {
                base.add_imall_rule(ImallRule {
                    groups: vec![PremiseGroup(vec![bare(x.clone())])],
                    conclusion: v.clone(),
                })?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// One prover-vs-simulation comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessRecord {
    pub prover: &'static str,
    pub simulation: &'static str,
    /// None when either side was indefinite.
    pub agree: Option<bool>,
}

/// Runs the prover and derivability-over-the-simulation-base on the same
/// instance and records whether they agree. The context enters the
/// simulation side as encoded context atoms for IPL and as axioms for
/// IMALL, matching the reusable-theory reading of contexts.
pub fn check_completeness_instance(
    ctx: &[Formula],
    goal: &Formula,
    logic: Logic,
    bounds: &SearchBounds,
) -> Result<CompletenessRecord, QueryError> {
    let mut fs: Vec<Formula> = ctx.to_vec();
    fs.push(goal.clone());
    let (base, enc) = build_simulation_base(&fs, logic)?;
    let goal_atom = enc.encode(goal).expect("goal encoded").clone();

    let (prover_status, sim_status) = match logic {
        Logic::Ipl => {
            let r = prove(logic, &ProofContext::Ipl(ctx.to_vec()), goal, bounds)?;
            let context: std::collections::BTreeSet<Atom> =
                ctx.iter().map(|f| enc.encode(f).expect("context encoded").clone()).collect();
            let d = derive_ipl(&base, &context, &goal_atom)?;
            (r.status, d.status)
        }
        Logic::Imall => {
            let r = prove(logic, &ProofContext::Imall(ctx.to_vec()), goal, bounds)?;
            let mut with_axioms = base.clone();
            for f in ctx {
                let a = enc.encode(f).expect("context encoded").clone();
                with_axioms.add_imall_rule(ImallRule::axiom(a))?;
            }
            let d = derive_imall(&with_axioms, &Multiset::empty(), &goal_atom, bounds)?;
            (r.status, d.status)
        }
        Logic::Bi => return Err(QueryError::Shape("simulation bases cover IPL and IMALL only".into())),
    };

    let prover = match &prover_status {
        ProofStatus::Proved(_) => "Proved",
        ProofStatus::Refuted => "Refuted",
        ProofStatus::Unknown(_) => "Unknown",
    };
    let simulation = sim_status.name();
    let agree = match (&prover_status, &sim_status) {
        (ProofStatus::Proved(_), DerivationStatus::Derivable(_)) => Some(true),
        (ProofStatus::Refuted, DerivationStatus::NotDerivable) => Some(true),
        (ProofStatus::Proved(_), DerivationStatus::NotDerivable) => Some(false),
        (ProofStatus::Refuted, DerivationStatus::Derivable(_)) => Some(false),
        _ => None,
    };
    Ok(CompletenessRecord { prover, simulation, agree })
}
