//! Bounded sequent-calculus provers, used as validity oracles: by the
//! soundness/completeness theorems, provability coincides with support.
//!
//! Contexts hold reusable hypotheses. For IPL that is ordinary; for IMALL
//! the context is an unrestricted theory zone alongside a linear zone, which
//! matches reading the context as a policy a base supports persistently
//! (the machine `e1 -o c` can fire twice for `(e1 * e1) -o (c * c)` but can
//! never turn one coin into two bars). BI contexts are bunches of formulas
//! with the usual additive structural rules.

mod bi;
mod imall;
mod ipl;

use std::fmt;

use crate::error::QueryError;
use crate::syntax::{render_formula, render_formula_bunch, Bunch, Formula, Logic};

/// A sequent as recorded in proof trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofSequent {
    Ipl { context: Vec<Formula>, goal: Formula },
    Imall { theory: Vec<Formula>, linear: Vec<Formula>, goal: Formula },
    Bi { context: Bunch<Formula>, goal: Formula },
}

impl fmt::Display for ProofSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |fs: &[Formula]| fs.iter().map(render_formula).collect::<Vec<_>>().join(" , ");
        match self {
            ProofSequent::Ipl { context, goal } => write!(f, "{} |- {}", join(context), render_formula(goal)),
            ProofSequent::Imall { theory, linear, goal } => {
                write!(f, "{} ; {} |- {}", join(theory), join(linear), render_formula(goal))
            }
            ProofSequent::Bi { context, goal } => {
                write!(f, "{} |- {}", render_formula_bunch(context), render_formula(goal))
            }
        }
    }
}

/// One proof node: a rule name, its conclusion, and the premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: String,
    pub sequent: ProofSequent,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn new(rule: &str, sequent: ProofSequent, children: Vec<ProofNode>) -> ProofNode {
        ProofNode { rule: rule.to_string(), sequent, children }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        fn go(node: &ProofNode, depth: usize, out: &mut String) {
            out.push_str(&format!("{}{}: {}\n", "  ".repeat(depth), node.rule, node.sequent));
            for c in &node.children {
                go(c, depth + 1, out);
            }
        }
        go(self, 0, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofStatus {
    Proved(ProofNode),
    Refuted,
    Unknown(String),
}

impl ProofStatus {
    pub fn name(&self) -> &'static str {
        match self {
            ProofStatus::Proved(_) => "Proved",
            ProofStatus::Refuted => "Refuted",
            ProofStatus::Unknown(_) => "Unknown",
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, ProofStatus::Proved(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofResult {
    pub status: ProofStatus,
    pub nodes_expanded: usize,
}

/// The context of a `prove` query: a set, multiset, or bunch of formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofContext {
    Ipl(Vec<Formula>),
    Imall(Vec<Formula>),
    Bi(Bunch<Formula>),
}

pub fn prove(
    logic: Logic,
    context: &ProofContext,
    goal: &Formula,
    bounds: &crate::derivability::SearchBounds,
) -> Result<ProofResult, QueryError> {
    goal.validate(logic)?;
    match (logic, context) {
        (Logic::Ipl, ProofContext::Ipl(ctx)) => {
            for f in ctx {
                f.validate(logic)?;
            }
            Ok(ipl::prove_ipl(ctx, goal))
        }
        (Logic::Imall, ProofContext::Imall(ctx)) => {
            for f in ctx {
                f.validate(logic)?;
            }
            Ok(imall::prove_imall(ctx, goal, bounds))
        }
        (Logic::Bi, ProofContext::Bi(ctx)) => {
            for f in ctx.leaves() {
                f.validate(logic)?;
            }
            Ok(bi::prove_bi(ctx, goal, bounds))
        }
        _ => Err(QueryError::Shape(format!("context shape does not match {logic}"))),
    }
}

/// Replays a proof tree, checking every node is a correct rule instance.
/// Returns false on any malformed node.
pub fn check_proof(logic: Logic, proof: &ProofNode) -> bool {
    match logic {
        Logic::Ipl => ipl::check(proof),
        Logic::Imall => imall::check(proof),
        Logic::Bi => bi::check(proof),
    }
}
