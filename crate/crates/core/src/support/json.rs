//! The published JSON shape of verdicts:
//! `{status, method?, witness?, evidence?, bounds, vocabulary, notes}`.

use serde_json::{json, Value};

use crate::derivability::SearchBounds;
use crate::support::{Evidence, Judgment, Status, Verdict};

pub fn verdict_to_json(verdict: &Verdict, judgment: &Judgment, bounds: &SearchBounds) -> Value {
    let mut obj = json!({
        "status": verdict.status.name().to_lowercase(),
        "bounds": {
            "max_depth": bounds.max_depth,
            "max_context_size": bounds.max_context_size,
            "node_budget": bounds.node_budget,
        },
        "vocabulary": judgment.vocab.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "vocab_bounded": verdict.vocab_bounded,
        "notes": verdict.notes,
    });
    let map = obj.as_object_mut().expect("object");
    match &verdict.status {
        Status::Holds { method, evidence } => {
            map.insert("method".into(), json!(method.name()));
            map.insert("evidence".into(), evidence_json(evidence));
        }
        Status::Fails { witness } => {
            map.insert(
                "witness".into(),
                json!({
                    "base": witness.base.name,
                    "base_rules": witness.base.rule_count(),
                    "resource": witness.resource.to_string(),
                    "subgoal": witness.subgoal.describe(),
                }),
            );
        }
        Status::Unknown { reason } => {
            map.insert("reason".into(), json!(reason));
        }
    }
    obj
}

fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::Derivation(tree) => json!({ "derivation": tree.render() }),
        Evidence::Proof(tree) => json!({ "proof": tree.render() }),
        Evidence::Note(s) => json!({ "note": s }),
        Evidence::All(parts) => Value::Array(parts.iter().map(evidence_json).collect()),
    }
}
