//! Engines for a workbench over base-extension resource semantics.
//!
//! The crate covers three regimes: intuitionistic propositional logic (IPL),
//! intuitionistic multiplicative-additive linear logic (IMALL), and the logic
//! of bunched implications (BI). For each it provides:
//!
//! - syntax: formulas, bunches, multisets, parsing and printing ([`syntax`]);
//! - atomic rules and bases, with schema instantiation and bounded
//!   enumeration of base extensions ([`bases`]);
//! - derivability in a base, paired with an independent fixpoint oracle
//!   ([`derivability`]);
//! - bounded sequent-calculus provers used as validity oracles ([`provers`]);
//! - evaluation of support judgments, counterexample search over base
//!   extensions, and simulation-base construction ([`support`]);
//! - a small model DSL with executable fixtures ([`modelkit`]).

pub mod bases;
pub mod derivability;
pub mod error;
pub mod modelkit;
pub mod provers;
pub mod support;
pub mod syntax;
