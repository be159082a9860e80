//! Signature satisfaction: does a set of components fulfil a technique's
//! required, optional and alternative terms.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::compiler::features::{extract, VarTable};
use crate::compiler::graph::ComponentGraph;
use crate::diag::Diagnostic;
use crate::model::Document;
use crate::registry::{Component, ComponentKind, Registry, Term, TechniqueSignature};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureReport {
    pub technique: String,
    pub satisfied: bool,
    /// Unsatisfied terms in signature notation.
    pub missing: Vec<String>,
    pub extraneous: Vec<Component>,
}

/// Whether a present component fills a term. Field and component
/// references are state variables too.
pub fn fills(term: &Component, present: &Component) -> bool {
    if term.accepts(present) {
        return true;
    }
    term.kind == ComponentKind::StateVariable
        && matches!(present.kind, ComponentKind::FieldReference | ComponentKind::ComponentReference)
}

fn available(term: &Component, present: &BTreeSet<Component>) -> bool {
    present.iter().any(|p| fills(term, p))
}

fn group_text(g: &[Component]) -> String {
    g.iter().map(Component::to_string).collect::<Vec<_>>().join(" + ")
}

pub fn check_components(present: &BTreeSet<Component>, sig: &TechniqueSignature) -> SignatureReport {
    let mut missing = Vec::new();
    for t in &sig.terms {
        match t {
            Term::Required(c) if !available(c, present) => missing.push(c.to_string()),
            Term::OneOf(groups) if !groups.iter().any(|g| g.iter().all(|c| available(c, present))) => {
                missing.push(format!("({})", groups.iter().map(|g| group_text(g)).collect::<Vec<_>>().join(" | ")))
            }
            _ => {}
        }
    }
    let mentioned = sig.mentioned();
    let extraneous = present.iter().filter(|p| !mentioned.iter().any(|m| fills(m, p))).cloned().collect();
    SignatureReport { technique: sig.id.clone(), satisfied: missing.is_empty(), missing, extraneous }
}

/// Checks a compiled graph against a registered technique.
pub fn check_signature(
    registry: &Registry,
    graph: &ComponentGraph,
    technique: &str,
    doc: &Document,
    vars: &VarTable,
) -> Result<SignatureReport, Diagnostic> {
    let sig = registry.signature_of(technique)?;
    Ok(check_components(&extract(graph, doc, vars).present, sig))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[&str]) -> BTreeSet<Component> {
        ids.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn check(t: &str, ids: &[&str]) -> SignatureReport {
        check_components(&set(ids), Registry::builtin().signature_of(t).unwrap())
    }

    #[test]
    fn deleted_term_is_reported() {
        let r = check("point_select", &["hit_object", "evaluator:predicate"]);
        assert!(!r.satisfied);
        assert_eq!(r.missing, vec!["evaluation_scale"]);
    }

    #[test]
    fn group_branch_and_optional_terms() {
        assert!(check("cross_filter", &["predicate", "target_data"]).satisfied);
        assert!(!check("cross_filter", &["predicate", "evaluator"]).satisfied);
        let d = check("deselect", &["predicate", "evaluator", "evaluation_scale"]);
        assert!(d.satisfied && d.extraneous.is_empty());
    }

    #[test]
    fn qualifiers_and_reference_kinds() {
        assert!(!check("sort", &["field_reference", "evaluator:predicate"]).satisfied);
        assert!(check("sort", &["field_reference", "evaluator:order"]).satisfied);
        let r = check("reposition", &["component_reference", "evaluator:layout", "hit_object"]);
        assert!(r.satisfied);
        assert_eq!(r.extraneous.len(), 2);
    }
}
