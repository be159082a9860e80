//! Case-study tables: one row per unit, as markdown or JSON.

use crate::compiler::classify::{classify_interaction, ClassificationReport};
use crate::compiler::compile_document;
use crate::diag::{has_errors, Diagnostic};
use crate::model::Document;
use crate::registry::Registry;

pub const COLUMNS: [&str; 8] =
    ["Action", "User Intent", "Technique", "Event", "Listener", "Hit Object", "Target", "Internal Components"];

/// Reports for every unit that compiled.
pub fn explain_document(registry: &Registry, doc: &Document) -> Result<Vec<ClassificationReport>, Vec<Diagnostic>> {
    let out = compile_document(registry, doc);
    if has_errors(&out.diagnostics) {
        return Err(out.diagnostics);
    }
    Ok(out.interactions.iter().map(|c| classify_interaction(registry, &c.unit, &c.graph, doc)).collect())
}

/// The eight table cells of a report.
pub fn row(registry: &Registry, r: &ClassificationReport) -> [String; 8] {
    let intents: Vec<String> = r
        .user_intents
        .iter()
        .map(|u| registry.user_intent(u).map(|x| x.short.clone()).unwrap_or_else(|| u.clone()))
        .collect();
    [
        r.action.clone(),
        intents.join(", "),
        r.technique_label.clone(),
        r.event.clone(),
        r.listener.clone(),
        r.hit_object.clone().unwrap_or_else(|| "none".into()),
        r.target.clone(),
        r.internal_components.join(", "),
    ]
}

pub fn to_markdown(registry: &Registry, reports: &[ClassificationReport]) -> String {
    let mut s = format!("| {} |\n|{}\n", COLUMNS.join(" | "), "---|".repeat(COLUMNS.len()));
    for r in reports {
        s.push_str(&format!("| {} |\n", row(registry, r).join(" | ")));
    }
    s
}

pub fn to_json(registry: &Registry, reports: &[ClassificationReport]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            let cells = row(registry, r);
            let mut m = serde_json::Map::new();
            for (c, v) in COLUMNS.iter().zip(cells) {
                m.insert(c.to_string(), v.into());
            }
            m.insert("report".into(), serde_json::to_value(r).expect("report serializes"));
            serde_json::Value::Object(m)
        })
        .collect();
    serde_json::Value::Array(rows)
}
