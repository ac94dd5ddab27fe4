//! Evaluation of support judgments.
//!
//! Definitional unfoldings are exact: the atomic clause reduces to
//! derivability, implications move their antecedent into the context,
//! additive conjunctions split, and a judgment whose context and goal are
//! atomic reduces to one derivability query. Clauses that quantify over all
//! base extensions are handled per strategy: `refute` enumerates extensions
//! and resource instantiations within bounds and can only ever produce a
//! counterexample, `internalize` translates the base to formulas and asks
//! the prover (a heuristic, flagged in the verdict), and `auto` tries the
//! reduction, then refutation, then internalization. A verdict is never
//! `Holds` from bounded enumeration alone.
//!
//! Universal quantifiers over "all atoms" range over the judgment's declared
//! vocabulary; verdicts carry a note whenever that bound was load-bearing.

mod internalize;
mod json;
mod refute;
mod simulate;

pub use json::verdict_to_json;
pub use simulate::{build_simulation_base, check_completeness_instance, CompletenessRecord, EncodingMap};

use std::fmt;

use crate::bases::{Base, ExtensionBounds};
use crate::derivability::{derive_bi, derive_imall, derive_ipl, DerivationNode, DerivationStatus, SearchBounds};
use crate::error::QueryError;
use crate::provers::{prove, ProofContext, ProofNode, ProofStatus};
use crate::syntax::{
    render_bunch, render_formula, render_formula_bunch, Atom, Bunch, ContextualBunch, Formula, Logic,
    Multiset, Vocabulary,
};

/// The resource term of a judgment.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Resource {
    /// IPL judgments carry no resources.
    None,
    /// IMALL: a multiset of atoms.
    Multiset(Multiset),
    /// BI without a context: a bunch of atoms.
    Bunch(Bunch<Atom>),
    /// BI with a context: a bunch with a hole for the context's resources.
    Contextual(ContextualBunch<Atom>),
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::None => f.write_str("-"),
            Resource::Multiset(m) => write!(f, "{m}"),
            Resource::Bunch(b) => f.write_str(&render_bunch(b)),
            Resource::Contextual(c) => write!(f, "{c}"),
        }
    }
}

/// The formula context of a judgment, shaped by the logic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SupportContext {
    Ipl(Vec<Formula>),
    Imall(Vec<Formula>),
    Bi(Option<Bunch<Formula>>),
}

impl SupportContext {
    pub fn is_empty(&self) -> bool {
        match self {
            SupportContext::Ipl(v) | SupportContext::Imall(v) => v.is_empty(),
            SupportContext::Bi(b) => b.is_none(),
        }
    }
}

/// A support query: logic, base, resource term, context, and goal, together
/// with the finite vocabulary that bounded quantifiers range over.
#[derive(Clone, Debug)]
pub struct Judgment {
    pub logic: Logic,
    pub base: Base,
    pub resource: Resource,
    pub context: SupportContext,
    pub goal: Formula,
    pub vocab: Vocabulary,
}

impl Judgment {
    /// Shape checks: resource and context forms must match the logic, the
    /// BI contextual-resource form is used exactly when a context is
    /// present, and every formula must be well-formed for the logic.
    pub fn validate(&self) -> Result<(), QueryError> {
        if self.base.logic() != self.logic {
            return Err(QueryError::LogicMismatch { expected: self.logic.name(), got: self.base.logic().name() });
        }
        self.goal.validate(self.logic)?;
        match (self.logic, &self.resource, &self.context) {
            (Logic::Ipl, Resource::None, SupportContext::Ipl(ctx)) => {
                for f in ctx {
                    f.validate(self.logic)?;
                }
                Ok(())
            }
            (Logic::Imall, Resource::Multiset(_), SupportContext::Imall(ctx)) => {
                for f in ctx {
                    f.validate(self.logic)?;
                }
                Ok(())
            }
            (Logic::Bi, Resource::Bunch(_), SupportContext::Bi(None)) => Ok(()),
            (Logic::Bi, Resource::Contextual(_), SupportContext::Bi(Some(ctx))) => {
                for f in ctx.leaves() {
                    f.validate(self.logic)?;
                }
                Ok(())
            }
            (Logic::Bi, Resource::Bunch(_), SupportContext::Bi(Some(_))) => Err(QueryError::Shape(
                "a BI judgment with a context needs a contextual resource".into(),
            )),
            _ => Err(QueryError::Shape("resource or context shape does not match the logic".into())),
        }
    }

    pub fn describe(&self) -> String {
        let ctx = match &self.context {
            SupportContext::Ipl(v) | SupportContext::Imall(v) if !v.is_empty() => {
                let parts: Vec<String> = v.iter().map(render_formula).collect();
                format!("{} ", parts.join(" , "))
            }
            SupportContext::Bi(Some(b)) => format!("{} ", render_formula_bunch(b)),
            _ => String::new(),
        };
        format!("{}|={}[{}] {}", ctx, self.base.name, self.resource, render_formula(&self.goal))
    }
}

/// How a positive verdict was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    /// Exact reduction to derivability in a base.
    AtomicReduction,
    /// Via the soundness/completeness theorems and a sequent prover.
    ProverBacked,
    /// Via base internalization; heuristic, not theorem-backed.
    Internalized,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::AtomicReduction => "atomic-reduction",
            Method::ProverBacked => "prover-backed",
            Method::Internalized => "internalized",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Evidence {
    Derivation(Box<DerivationNode>),
    Proof(Box<ProofNode>),
    Note(String),
    All(Vec<Evidence>),
}

/// A concrete counterexample: the extension and resource instantiation at
/// which a required subgoal fails. Re-evaluating the subgoal reproduces the
/// failure.
#[derive(Clone, Debug)]
pub struct Witness {
    pub base: Base,
    pub resource: Resource,
    pub subgoal: Box<Judgment>,
}

#[derive(Clone, Debug)]
pub enum Status {
    Holds { method: Method, evidence: Evidence },
    Fails { witness: Witness },
    Unknown { reason: String },
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Holds { .. } => "Holds",
            Status::Fails { .. } => "Fails",
            Status::Unknown { .. } => "Unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    /// Set when a universal clause was decided over the finite vocabulary.
    pub vocab_bounded: bool,
    pub notes: Vec<String>,
}

impl Verdict {
    fn holds(method: Method, evidence: Evidence) -> Verdict {
        Verdict { status: Status::Holds { method, evidence }, vocab_bounded: false, notes: vec![] }
    }

    fn fails(witness: Witness) -> Verdict {
        Verdict { status: Status::Fails { witness }, vocab_bounded: false, notes: vec![] }
    }

    fn unknown(reason: impl Into<String>) -> Verdict {
        Verdict { status: Status::Unknown { reason: reason.into() }, vocab_bounded: false, notes: vec![] }
    }

    fn noted(mut self, note: impl Into<String>) -> Verdict {
        self.notes.push(note.into());
        self
    }

    fn with_vocab_bound(mut self) -> Verdict {
        self.vocab_bounded = true;
        self
    }

    pub fn holds_soundly(&self) -> bool {
        matches!(&self.status, Status::Holds { method, .. } if *method != Method::Internalized)
    }

    pub fn is_holds(&self) -> bool {
        matches!(self.status, Status::Holds { .. })
    }

    pub fn is_fails(&self) -> bool {
        matches!(self.status, Status::Fails { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.status, Status::Unknown { .. })
    }

    pub fn method(&self) -> Option<Method> {
        match &self.status {
            Status::Holds { method, .. } => Some(*method),
            _ => None,
        }
    }
}

/// Evaluation strategy for the universal clauses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Refute,
    Internalize,
}

impl Strategy {
    pub fn parse(s: &str) -> Option<Strategy> {
        match s {
            "auto" => Some(Strategy::Auto),
            "refute" => Some(Strategy::Refute),
            "internalize" => Some(Strategy::Internalize),
            _ => None,
        }
    }
}

/// Validity via the soundness/completeness theorems: the context supports
/// the goal in every base iff the sequent is provable.
pub fn check_validity(
    logic: Logic,
    context: &ProofContext,
    goal: &Formula,
    bounds: &SearchBounds,
) -> Result<Verdict, QueryError> {
    let result = prove(logic, context, goal, bounds)?;
    Ok(match result.status {
        ProofStatus::Proved(tree) => Verdict::holds(Method::ProverBacked, Evidence::Proof(Box::new(tree)))
            .noted("valid by the provability-support correspondence"),
        ProofStatus::Refuted => {
            let judgment = validity_judgment(logic, context, goal);
            Verdict::fails(Witness {
                base: judgment.base.clone(),
                resource: judgment.resource.clone(),
                subgoal: Box::new(judgment),
            })
            .noted("refuted by exhaustive sequent search")
        }
        ProofStatus::Unknown(reason) => Verdict::unknown(reason),
    })
}

fn validity_judgment(logic: Logic, context: &ProofContext, goal: &Formula) -> Judgment {
    let (resource, sctx) = match (logic, context) {
        (Logic::Ipl, ProofContext::Ipl(v)) => (Resource::None, SupportContext::Ipl(v.clone())),
        (Logic::Imall, ProofContext::Imall(v)) => {
            (Resource::Multiset(Multiset::empty()), SupportContext::Imall(v.clone()))
        }
        (Logic::Bi, ProofContext::Bi(b)) => (
            Resource::Contextual(ContextualBunch::identity()),
            SupportContext::Bi(Some(b.clone())),
        ),
        _ => (Resource::None, SupportContext::Ipl(vec![])),
    };
    let mut vocab = Vocabulary::new();
    goal.collect_atoms(&mut vocab);
    Judgment { logic, base: Base::empty("empty", logic), resource, context: sctx, goal: goal.clone(), vocab }
}

/// Evaluates a support judgment.
pub fn check_support(j: &Judgment, strategy: Strategy, bounds: &SearchBounds) -> Result<Verdict, QueryError> {
    check_support_bounded(j, strategy, bounds, &ExtensionBounds::default())
}

/// As `check_support` but with explicit extension-enumeration bounds.
pub fn check_support_bounded(
    j: &Judgment,
    strategy: Strategy,
    bounds: &SearchBounds,
    ext_bounds: &ExtensionBounds,
) -> Result<Verdict, QueryError> {
    j.validate()?;
    let mut eval = Evaluator {
        strategy,
        bounds: *bounds,
        ext_bounds: *ext_bounds,
        budget: bounds.node_budget,
        ext_budget: ext_bounds.max_added_rules,
        memo: Default::default(),
    };
    Ok(eval.judgment(j, bounds.max_depth))
}

/// Searches for an extension and resource instantiation refuting the
/// judgment. The top clause is refuted by enumeration when it is universal;
/// other shapes fall back to plain evaluation (an atomic judgment fails at
/// its own base or not at all). Absence of a witness within bounds is not a
/// `Holds` claim.
pub fn find_counterexample_extension(
    j: &Judgment,
    ext_bounds: &ExtensionBounds,
    bounds: &SearchBounds,
) -> Result<Option<Witness>, QueryError> {
    j.validate()?;
    let mut eval = Evaluator {
        strategy: Strategy::Refute,
        bounds: *bounds,
        ext_bounds: *ext_bounds,
        budget: bounds.node_budget,
        ext_budget: ext_bounds.max_added_rules,
        memo: Default::default(),
    };
    if let Status::Fails { witness } = refute::refute(&mut eval, j, bounds.max_depth).status {
        return Ok(Some(witness));
    }
    match eval.judgment(j, bounds.max_depth).status {
        Status::Fails { witness } => Ok(Some(witness)),
        _ => Ok(None),
    }
}

type MemoKey = (Base, Resource, SupportContext, Formula, usize);

pub(crate) struct Evaluator {
    pub(crate) strategy: Strategy,
    pub(crate) bounds: SearchBounds,
    pub(crate) ext_bounds: ExtensionBounds,
    pub(crate) budget: usize,
    /// Rules the whole evaluation may still add across nested extension
    /// enumerations; quantifier nesting shares this allowance.
    pub(crate) ext_budget: usize,
    /// Definitive verdicts (never Unknown) per judgment and remaining
    /// extension allowance.
    memo: std::collections::BTreeMap<MemoKey, Verdict>,
}

impl Evaluator {
    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    pub(crate) fn judgment(&mut self, j: &Judgment, depth: usize) -> Verdict {
        if depth == 0 || !self.spend() {
            return Verdict::unknown("evaluation budget exhausted");
        }
        let key: MemoKey =
            (j.base.clone(), j.resource.clone(), j.context.clone(), j.goal.clone(), self.ext_budget);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let verdict = self.judgment_uncached(j, depth);
        if !verdict.is_unknown() {
            self.memo.insert(key, verdict.clone());
        }
        verdict
    }

    fn judgment_uncached(&mut self, j: &Judgment, depth: usize) -> Verdict {
        match j.logic {
            Logic::Ipl => {
                let SupportContext::Ipl(ctx) = &j.context else { unreachable!("validated") };
                self.ipl(&j.base, ctx.clone(), &j.goal, &j.vocab, depth)
            }
            Logic::Imall => {
                let (SupportContext::Imall(ctx), Resource::Multiset(s)) = (&j.context, &j.resource) else {
                    unreachable!("validated")
                };
                self.imall(&j.base, ctx.clone(), s.clone(), &j.goal, &j.vocab, depth)
            }
            Logic::Bi => match (&j.context, &j.resource) {
                (SupportContext::Bi(None), Resource::Bunch(s)) => self.bi(&j.base, s.clone(), &j.goal, &j.vocab, depth),
                (SupportContext::Bi(Some(ctx)), Resource::Contextual(r)) => {
                    self.bi_inf(&j.base, ctx.clone(), r.clone(), &j.goal, &j.vocab, depth)
                }
                _ => unreachable!("validated"),
            },
        }
    }

    // ----- IPL ----------------------------------------------------------

    fn ipl(&mut self, base: &Base, mut ctx: Vec<Formula>, goal: &Formula, vocab: &Vocabulary, depth: usize) -> Verdict {
        // structural unfoldings
        let mut goal = goal.clone();
        loop {
            match goal {
                Formula::Imp(a, b) => {
                    ctx.push((*a).clone());
                    goal = (*b).clone();
                }
                Formula::And(a, b) => {
                    let left = self.ipl(base, ctx.clone(), &a, vocab, depth - 1);
                    if !left.is_holds() {
                        return left;
                    }
                    let right = self.ipl(base, ctx.clone(), &b, vocab, depth - 1);
                    if !right.is_holds() {
                        return right;
                    }
                    return combine_holds(vec![left, right]);
                }
                _ => break,
            }
        }

        // sound introduction fallback: a supported disjunct supports the
        // disjunction (the clause plus monotonicity)
        if let Formula::Or(a, b) = &goal {
            for part in [a, b] {
                let v = self.ipl(base, ctx.clone(), part, vocab, depth - 1);
                if v.holds_soundly() {
                    return v.noted("by the disjunction introduction");
                }
            }
        }

        match (&goal, all_atoms(&ctx)) {
            (Formula::Atom(p), Some(atoms)) => {
                let set = atoms.into_iter().collect();
                match derive_ipl(base, &set, p) {
                    Ok(r) => {
                        self.from_derivation(r.status, base, Resource::None, ipl_judgment(base, &ctx, &goal, vocab))
                    }
                    Err(e) => Verdict::unknown(e.to_string()),
                }
            }
            (Formula::Bottom, Some(_)) if ctx.is_empty() => {
                // (Bot): every atom of the vocabulary must be supported
                for p in vocab.iter() {
                    match derive_ipl(base, &Default::default(), p) {
                        Ok(r) if r.is_derivable() => continue,
                        Ok(_) => {
                            let sub = ipl_judgment(base, &[], &Formula::Atom(p.clone()), vocab);
                            return Verdict::fails(Witness {
                                base: base.clone(),
                                resource: Resource::None,
                                subgoal: Box::new(sub),
                            });
                        }
                        Err(e) => return Verdict::unknown(e.to_string()),
                    }
                }
                Verdict::holds(Method::AtomicReduction, Evidence::Note("every vocabulary atom is derivable".into()))
                    .with_vocab_bound()
            }
            _ => {
                // universal clause or compound context: strategy decides
                let j = ipl_judgment(base, &ctx, &goal, vocab);
                self.universal(&j, depth)
            }
        }
    }

    // ----- IMALL --------------------------------------------------------

    fn imall(
        &mut self,
        base: &Base,
        mut ctx: Vec<Formula>,
        resource: Multiset,
        goal: &Formula,
        vocab: &Vocabulary,
        depth: usize,
    ) -> Verdict {
        let mut goal = goal.clone();
        loop {
            match goal {
                Formula::Lolli(a, b) => {
                    ctx.push((*a).clone());
                    goal = (*b).clone();
                }
                Formula::With(a, b) => {
                    let left = self.imall(base, ctx.clone(), resource.clone(), &a, vocab, depth - 1);
                    if !left.is_holds() {
                        return left;
                    }
                    let right = self.imall(base, ctx.clone(), resource.clone(), &b, vocab, depth - 1);
                    if !right.is_holds() {
                        return right;
                    }
                    return combine_holds(vec![left, right]);
                }
                _ => break,
            }
        }

        // sound introduction fallbacks, justified by the soundness half of
        // the theorems: supported parts introduce the compound
        if ctx.is_empty() {
            match &goal {
                Formula::Plus(a, b) => {
                    for part in [a, b] {
                        let v = self.imall(base, vec![], resource.clone(), part, vocab, depth - 1);
                        if v.holds_soundly() {
                            return v.noted("by the sum introduction");
                        }
                    }
                }
                Formula::Tensor(a, b) => {
                    for split in resource.splits(2) {
                        let left = self.imall(base, vec![], split[0].clone(), a, vocab, depth - 1);
                        if !left.holds_soundly() {
                            continue;
                        }
                        let right = self.imall(base, vec![], split[1].clone(), b, vocab, depth - 1);
                        if right.holds_soundly() {
                            return combine_holds(vec![left, right]).noted("by the tensor introduction");
                        }
                    }
                }
                Formula::One if resource.is_empty() => {
                    return Verdict::holds(
                        Method::AtomicReduction,
                        Evidence::Note("the unit clause at empty resources is its own premise".into()),
                    );
                }
                _ => {}
            }
        }

        match (&goal, all_atoms(&ctx)) {
            (Formula::Atom(p), Some(atoms)) => {
                let pool = resource.union(&Multiset::from_iter(atoms.into_iter()));
                match derive_imall(base, &pool, p, &self.bounds) {
                    Ok(r) => self.from_derivation(
                        r.status,
                        base,
                        Resource::Multiset(resource.clone()),
                        imall_judgment(base, &ctx, &resource, &goal, vocab),
                    ),
                    Err(e) => Verdict::unknown(e.to_string()),
                }
            }
            (Formula::Zero, Some(_)) if ctx.is_empty() => {
                // (0): the resources derive every vocabulary atom
                for p in vocab.iter() {
                    match derive_imall(base, &resource, p, &self.bounds) {
                        Ok(r) if r.is_derivable() => continue,
                        Ok(r) if matches!(r.status, DerivationStatus::NotDerivable) => {
                            let sub = imall_judgment(base, &[], &resource, &Formula::Atom(p.clone()), vocab);
                            return Verdict::fails(Witness {
                                base: base.clone(),
                                resource: Resource::Multiset(resource.clone()),
                                subgoal: Box::new(sub),
                            });
                        }
                        Ok(_) => return Verdict::unknown("derivability search exhausted"),
                        Err(e) => return Verdict::unknown(e.to_string()),
                    }
                }
                Verdict::holds(Method::AtomicReduction, Evidence::Note("every vocabulary atom is derivable".into()))
                    .with_vocab_bound()
            }
            _ => {
                let j = imall_judgment(base, &ctx, &resource, &goal, vocab);
                self.universal(&j, depth)
            }
        }
    }

    // ----- BI -----------------------------------------------------------

    fn bi(&mut self, base: &Base, resource: Bunch<Atom>, goal: &Formula, vocab: &Vocabulary, depth: usize) -> Verdict {
        match goal {
            Formula::Atom(p) => match derive_bi(base, &resource, p, &self.bounds) {
                Ok(r) => self.from_derivation(
                    r.status,
                    base,
                    Resource::Bunch(resource.clone()),
                    bi_judgment(base, None, &Resource::Bunch(resource.clone()), goal, vocab),
                ),
                Err(e) => Verdict::unknown(e.to_string()),
            },
            Formula::Imp(a, b) => {
                // (->): the antecedent becomes the context, its resources
                // shared: the hole is S ; (.)
                let hole = extend_hole(&resource, crate::syntax::JoinKind::Add);
                self.bi_inf(base, Bunch::leaf((**a).clone()), hole, b, vocab, depth - 1)
            }
            Formula::Wand(a, b) => {
                // (-*): resources separated: the hole is S , (.)
                let hole = extend_hole(&resource, crate::syntax::JoinKind::Mul);
                self.bi_inf(base, Bunch::leaf((**a).clone()), hole, b, vocab, depth - 1)
            }
            Formula::Top => {
                // U(S) always extends U(e+), so weakening closes the clause
                Verdict::holds(
                    Method::AtomicReduction,
                    Evidence::Note("S extends e+; weakening closes the clause".into()),
                )
            }
            Formula::MTop if resource.extends(&Bunch::MulUnit) => Verdict::holds(
                Method::AtomicReduction,
                Evidence::Note("S extends e*, so U(S) derives whatever U(e*) does".into()),
            ),
            Formula::Or(a, b) => {
                for part in [a, b] {
                    let v = self.bi(base, resource.clone(), part, vocab, depth - 1);
                    if v.holds_soundly() {
                        return v.noted("by the disjunction introduction");
                    }
                }
                let j = bi_judgment(base, None, &Resource::Bunch(resource.clone()), goal, vocab);
                self.universal(&j, depth)
            }
            Formula::And(a, b) => {
                // both parts at the same shared resources introduce the
                // conjunction
                let left = self.bi(base, resource.clone(), a, vocab, depth - 1);
                if left.holds_soundly() {
                    let right = self.bi(base, resource.clone(), b, vocab, depth - 1);
                    if right.holds_soundly() {
                        return combine_holds(vec![left, right]).noted("by the conjunction introduction");
                    }
                }
                let j = bi_judgment(base, None, &Resource::Bunch(resource.clone()), goal, vocab);
                self.universal(&j, depth)
            }
            Formula::Star(a, b) => {
                // a split of the resources introduces the star
                for (s1, s2) in refute::mul_splits(&resource) {
                    let left = self.bi(base, s1, a, vocab, depth - 1);
                    if !left.holds_soundly() {
                        continue;
                    }
                    let right = self.bi(base, s2, b, vocab, depth - 1);
                    if right.holds_soundly() {
                        return combine_holds(vec![left, right]).noted("by the star introduction");
                    }
                }
                let j = bi_judgment(base, None, &Resource::Bunch(resource.clone()), goal, vocab);
                self.universal(&j, depth)
            }
            _ => {
                let j = bi_judgment(base, None, &Resource::Bunch(resource.clone()), goal, vocab);
                self.universal(&j, depth)
            }
        }
    }

    fn bi_inf(
        &mut self,
        base: &Base,
        ctx: Bunch<Formula>,
        resource: ContextualBunch<Atom>,
        goal: &Formula,
        vocab: &Vocabulary,
        depth: usize,
    ) -> Verdict {
        // atomic fast path: atomic context bunch, atomic goal
        if let (Some(atoms), Formula::Atom(p)) = (bunch_atoms(&ctx), goal) {
            let plugged = resource.apply(&atoms);
            return match derive_bi(base, &plugged, p, &self.bounds) {
                Ok(r) => self.from_derivation(
                    r.status,
                    base,
                    Resource::Contextual(resource.clone()),
                    bi_judgment(base, Some(&ctx), &Resource::Contextual(resource.clone()), goal, vocab),
                ),
                Err(e) => Verdict::unknown(e.to_string()),
            };
        }
        let j = bi_judgment(base, Some(&ctx), &Resource::Contextual(resource.clone()), goal, vocab);
        self.universal(&j, depth)
    }

    // ----- shared -------------------------------------------------------

    fn from_derivation(
        &mut self,
        status: DerivationStatus,
        base: &Base,
        resource: Resource,
        judgment: Judgment,
    ) -> Verdict {
        match status {
            DerivationStatus::Derivable(tree) => {
                Verdict::holds(Method::AtomicReduction, Evidence::Derivation(Box::new(tree)))
            }
            DerivationStatus::NotDerivable => {
                Verdict::fails(Witness { base: base.clone(), resource, subgoal: Box::new(judgment) })
            }
            DerivationStatus::Exhausted => Verdict::unknown("derivability search exhausted"),
        }
    }

    /// Universal clauses, handled per strategy.
    fn universal(&mut self, j: &Judgment, depth: usize) -> Verdict {
        match self.strategy {
            Strategy::Refute => refute::refute(self, j, depth),
            Strategy::Internalize => internalize::internalized_holds(self, j),
            Strategy::Auto => {
                let refuted = refute::refute(self, j, depth);
                if refuted.is_fails() {
                    return refuted;
                }
                let internal = internalize::internalized_holds(self, j);
                if internal.is_holds() {
                    return internal;
                }
                refuted
            }
        }
    }

    /// A premise used to justify a `Fails` must itself hold soundly.
    pub(crate) fn sound_premise(&mut self, j: &Judgment, depth: usize) -> bool {
        let saved = self.strategy;
        self.strategy = Strategy::Refute;
        let v = self.judgment(j, depth);
        self.strategy = saved;
        v.holds_soundly()
    }
}

fn combine_holds(verdicts: Vec<Verdict>) -> Verdict {
    let method = verdicts.iter().filter_map(|v| v.method()).max().unwrap_or(Method::AtomicReduction);
    let vocab_bounded = verdicts.iter().any(|v| v.vocab_bounded);
    let notes: Vec<String> = verdicts.iter().flat_map(|v| v.notes.clone()).collect();
    let evidence = Evidence::All(
        verdicts
            .into_iter()
            .map(|v| match v.status {
                Status::Holds { evidence, .. } => evidence,
                _ => unreachable!("combine_holds on non-holds"),
            })
            .collect(),
    );
    Verdict { status: Status::Holds { method, evidence }, vocab_bounded, notes }
}

fn all_atoms(ctx: &[Formula]) -> Option<Vec<Atom>> {
    ctx.iter().map(|f| f.as_atom().cloned()).collect()
}

/// The atoms of an all-atomic formula bunch.
pub(crate) fn bunch_atoms(b: &Bunch<Formula>) -> Option<Bunch<Atom>> {
    match b {
        Bunch::Leaf(f) => f.as_atom().map(|a| Bunch::leaf(a.clone())),
        Bunch::AddUnit => Some(Bunch::AddUnit),
        Bunch::MulUnit => Some(Bunch::MulUnit),
        Bunch::AddJoin(l, r) => Some(Bunch::add(bunch_atoms(l)?, bunch_atoms(r)?)),
        Bunch::MulJoin(l, r) => Some(Bunch::mul(bunch_atoms(l)?, bunch_atoms(r)?)),
    }
}

/// `S ; (.)` or `S , (.)` — the resource holes of the implication clauses.
fn extend_hole(s: &Bunch<Atom>, kind: crate::syntax::JoinKind) -> ContextualBunch<Atom> {
    let shape = kind.join(
        s.map(&mut |a| crate::syntax::CtxLeaf::Item(a.clone())),
        Bunch::Leaf(crate::syntax::CtxLeaf::Hole),
    );
    ContextualBunch::new(shape).expect("one hole")
}

pub(crate) fn ipl_judgment(base: &Base, ctx: &[Formula], goal: &Formula, vocab: &Vocabulary) -> Judgment {
    Judgment {
        logic: Logic::Ipl,
        base: base.clone(),
        resource: Resource::None,
        context: SupportContext::Ipl(ctx.to_vec()),
        goal: goal.clone(),
        vocab: vocab.clone(),
    }
}

pub(crate) fn imall_judgment(
    base: &Base,
    ctx: &[Formula],
    resource: &Multiset,
    goal: &Formula,
    vocab: &Vocabulary,
) -> Judgment {
    Judgment {
        logic: Logic::Imall,
        base: base.clone(),
        resource: Resource::Multiset(resource.clone()),
        context: SupportContext::Imall(ctx.to_vec()),
        goal: goal.clone(),
        vocab: vocab.clone(),
    }
}

pub(crate) fn bi_judgment(
    base: &Base,
    ctx: Option<&Bunch<Formula>>,
    resource: &Resource,
    goal: &Formula,
    vocab: &Vocabulary,
) -> Judgment {
    Judgment {
        logic: Logic::Bi,
        base: base.clone(),
        resource: resource.clone(),
        context: SupportContext::Bi(ctx.cloned()),
        goal: goal.clone(),
        vocab: vocab.clone(),
    }
}
