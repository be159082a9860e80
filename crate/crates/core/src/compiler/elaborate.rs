//! Intent to techniques: every technique serving the intent that can be
//! instantiated for the unit's listener and targets.

use crate::compiler::graph::ComponentGraph;
use crate::compiler::instantiate::instantiate;
use crate::diag::{Code, Diagnostic};
use crate::model::{Document, InteractionSpec};
use crate::registry::Registry;

#[derive(Debug, Clone, PartialEq)]
pub struct Elaboration {
    /// Candidates in registry order.
    pub candidates: Vec<(String, ComponentGraph)>,
    /// H061 when nothing fits, naming what each technique lacked.
    pub hints: Vec<Diagnostic>,
}

pub fn elaborate_intent(registry: &Registry, doc: &Document, unit: &InteractionSpec) -> Result<Elaboration, Diagnostic> {
    let i = doc.interactions.iter().position(|u| u.name == unit.name).unwrap_or(0);
    let path = format!("/interactions/{i}/intent");
    let with_path = |mut d: Diagnostic| {
        d.path = path.clone();
        d
    };
    let intent = unit.intent.as_ref();
    let techniques = match (intent.and_then(|x| x.user.as_deref()), intent.and_then(|x| x.authoring.as_deref())) {
        (Some(u), _) => registry.techniques_for_user_intent(u).map_err(with_path)?,
        (None, Some(a)) => registry.techniques_for_authoring_intent(a).map_err(with_path)?,
        (None, None) => {
            return Err(Diagnostic::error(Code::MissingIntent, path, "the unit names no intent"));
        }
    };
    let mut candidates = Vec::new();
    let mut lacks: Vec<String> = Vec::new();
    for t in techniques {
        match instantiate(registry, doc, unit, t) {
            Ok(g) => candidates.push((t.to_string(), g)),
            Err(d) if d.code == Code::MissingBinding => {
                let term = d.message.rsplit('`').nth(1).unwrap_or("").to_string();
                lacks.push(format!("{t}: {term}"));
            }
            Err(_) => {}
        }
    }
    let mut hints = Vec::new();
    if candidates.is_empty() {
        let mut msg = "no technique fits this listener and these targets".to_string();
        if !lacks.is_empty() {
            msg = format!("{msg}; missing {}", lacks.join("; "));
        }
        hints.push(Diagnostic::hint(Code::Unsatisfiable, path, msg));
    }
    Ok(Elaboration { candidates, hints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_document;

    const DOC: &str = r#"{"name":"z",
      "data":[{"name":"t","fields":[{"name":"k","kind":"string"}],"rows":[{"k":"a"}]}],
      "scenes":[{"name":"main","objects":[{"name":"c","kind":"collection","source":"t",
        "template":{"name":"m","kind":"mark","shape":"rect"}}]}],
      "interactions":[{"name":"u","on":{"event":"wheel","listener":"main"},"target":"c",
        "intent":{"userIntent":"steer"}}]}"#;

    #[test]
    fn camera_off_leaves_steer_unsatisfiable() {
        let doc = parse_document(DOC).unwrap().0;
        let e = elaborate_intent(Registry::builtin(), &doc, &doc.interactions[0]).unwrap();
        assert!(e.candidates.is_empty());
        assert_eq!(e.hints[0].code, Code::Unsatisfiable);
        assert!(e.hints[0].message.contains("enable camera"));
        let on = parse_document(&DOC.replace(r#""name":"main","#, r#""name":"main","cameraEnabled":true,"#)).unwrap().0;
        let e = elaborate_intent(Registry::builtin(), &on, &on.interactions[0]).unwrap();
        let ids: Vec<&str> = e.candidates.iter().map(|c| c.0.as_str()).collect();
        assert_eq!(ids, vec!["geometric_zoom", "pan"]);
    }
}
