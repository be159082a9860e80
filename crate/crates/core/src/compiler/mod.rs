//! Elaboration (intent/technique to graph) and classification (graph to
//! technique/intent).

pub mod classify;
pub mod elaborate;
pub mod explain;
pub mod features;
pub mod graph;
pub mod instantiate;
pub mod signature;

use serde::Serialize;

use crate::compiler::classify::{classify_interaction, Tier};
use crate::compiler::elaborate::elaborate_intent;
use crate::compiler::graph::ComponentGraph;
use crate::compiler::instantiate::instantiate;
use crate::diag::{has_errors, Code, Diagnostic};
use crate::model::{validate_document, Document, Level};
use crate::registry::Registry;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompiledInteraction {
    pub unit: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub level: Level,
    pub technique: String,
    pub user_intents: Vec<String>,
    pub authoring_intents: Vec<String>,
    pub graph: ComponentGraph,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CompileOutput {
    pub interactions: Vec<CompiledInteraction>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Validates, then lowers every unit to a component graph. Units that fail
/// are left out and reported.
pub fn compile_document(registry: &Registry, doc: &Document) -> CompileOutput {
    let mut out = CompileOutput { interactions: Vec::new(), diagnostics: validate_document(doc) };
    if has_errors(&out.diagnostics) {
        return out;
    }
    for (i, unit) in doc.interactions.iter().enumerate() {
        let at = format!("/interactions/{i}");
        let level = unit.level();
        let compiled: Result<(String, ComponentGraph), Diagnostic> = match level {
            Level::Intent => match elaborate_intent(registry, doc, unit) {
                Err(d) => Err(d),
                Ok(mut e) => {
                    let choice = unit.bindings.get("choose").and_then(|v| v.as_str());
                    let pick = match choice {
                        Some(c) => e.candidates.iter().position(|(t, _)| t == c),
                        None if e.candidates.is_empty() => None,
                        None => Some(0),
                    };
                    out.diagnostics.append(&mut e.hints);
                    match pick {
                        Some(p) => Ok(e.candidates.swap_remove(p)),
                        None => Err(Diagnostic::error(
                            Code::NoCandidate,
                            format!("{at}/intent"),
                            match choice {
                                Some(c) => format!("`{c}` is not a candidate for this intent"),
                                None => "no technique can realise this intent here".to_string(),
                            },
                        )),
                    }
                }
            },
            Level::Technique => {
                let t = unit.technique.as_deref().unwrap_or_default();
                instantiate(registry, doc, unit, t).map(|g| (t.to_string(), g))
            }
            Level::Component => {
                let g = ComponentGraph {
                    event: unit.on.event,
                    listener: unit.on.listener.clone(),
                    key: unit.on.key.clone(),
                    targets: unit.target.clone(),
                    parts: unit.components.clone().unwrap_or_default(),
                };
                let r = classify_interaction(registry, &unit.name, &g, doc);
                let top = &r.candidates[0];
                match &r.technique {
                    None => Err(Diagnostic::error(
                        Code::Unclassified,
                        format!("{at}/components"),
                        format!("no technique fits; nearest is {} missing {}", top.technique, top.missing.join(", ")),
                    )),
                    Some(t) => {
                        if top.tier == Tier::Unsatisfied {
                            out.diagnostics.push(Diagnostic::warning(
                                Code::SignatureIncomplete,
                                format!("{at}/components"),
                                format!("classified as {t} without {}", top.missing.join(", ")),
                            ));
                        }
                        if !top.extraneous.is_empty() {
                            out.diagnostics.push(Diagnostic::warning(
                                Code::ExtraneousComponent,
                                format!("{at}/components"),
                                format!("{t} does not use {}", top.extraneous.join(", ")),
                            ));
                        }
                        Ok((t.clone(), g))
                    }
                }
            }
        };
        match compiled {
            Ok((technique, graph)) => {
                let (user_intents, authoring_intents) = registry.intents_of_technique(&technique).unwrap_or_default();
                out.interactions.push(CompiledInteraction {
                    unit: unit.name.clone(),
                    label: unit.label.clone(),
                    level,
                    technique,
                    user_intents,
                    authoring_intents,
                    graph,
                });
            }
            Err(d) => out.diagnostics.push(d),
        }
    }
    out
}
