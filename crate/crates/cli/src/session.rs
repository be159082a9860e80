//! One serve-protocol session: a loaded document, its runtime, and the
//! reply messages for each client message.

use serde_json::{json, Value as Json};

use vizact_core::compiler::classify::classify_interaction;
use vizact_core::interaction::Event;
use vizact_core::model::{parse_document, Document};
use vizact_core::registry::Registry;
use vizact_core::runtime::Runtime;
use vizact_core::{Code, Diagnostic};

pub struct Session {
    registry: &'static Registry,
    loaded: Option<(Document, Runtime)>,
}

fn diagnostics(d: &[Diagnostic]) -> Json {
    json!({"op": "diagnostics", "diagnostics": d})
}

fn error(code: Code, path: &str, message: impl Into<String>) -> Vec<Json> {
    vec![diagnostics(&[Diagnostic::error(code, path, message)])]
}

impl Session {
    pub fn new(registry: &'static Registry) -> Self {
        Session { registry, loaded: None }
    }

    /// Replies to one client message, in the order they should be sent.
    pub fn handle(&mut self, text: &str) -> Vec<Json> {
        let msg: Json = match serde_json::from_str(text) {
            Ok(m) => m,
            Err(e) => return error(Code::Syntax, "", e.to_string()),
        };
        match msg.get("op").and_then(Json::as_str) {
            Some("load") => self.load(&msg["doc"]),
            Some("event") => self.event(&msg["event"]),
            Some("inspect") => self.inspect(&msg["unit"]),
            Some(other) => error(Code::UnknownKey, "/op", format!("unknown op `{other}`")),
            None => error(Code::WrongKind, "/op", "message has no `op`"),
        }
    }

    fn load(&mut self, doc: &Json) -> Vec<Json> {
        let text = match doc {
            Json::String(s) => s.clone(),
            Json::Null => return error(Code::WrongKind, "/doc", "`load` needs a `doc`"),
            other => other.to_string(),
        };
        let (d, warnings) = match parse_document(&text) {
            Ok(p) => p,
            Err(diags) => return vec![diagnostics(&diags)],
        };
        match Runtime::load(self.registry, &d) {
            Err(diags) => vec![diagnostics(&diags)],
            Ok(rt) => {
                let scene = json!({"op": "scene", "svg": rt.render_page()});
                self.loaded = Some((d, rt));
                vec![diagnostics(&warnings), scene]
            }
        }
    }

    fn event(&mut self, e: &Json) -> Vec<Json> {
        let Some((_, rt)) = self.loaded.as_mut() else {
            return error(Code::UnresolvedName, "/event", "no document loaded");
        };
        let e: Event = match serde_json::from_value(e.clone()) {
            Ok(e) => e,
            Err(err) => return error(Code::WrongKind, "/event", err.to_string()),
        };
        let entry = rt.dispatch(&e);
        vec![json!({"op": "trace", "entry": entry}), json!({"op": "scene", "svg": rt.render_page()})]
    }

    fn inspect(&self, unit: &Json) -> Vec<Json> {
        let Some((doc, rt)) = self.loaded.as_ref() else {
            return error(Code::UnresolvedName, "/unit", "no document loaded");
        };
        let name = unit.as_str().unwrap_or_default();
        match rt.compiled.iter().find(|c| c.unit == name) {
            Some(c) => {
                let report = classify_interaction(self.registry, &c.unit, &c.graph, doc);
                vec![json!({"op": "report", "report": report})]
            }
            None => error(Code::UnresolvedName, "/unit", format!("unknown unit `{name}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session_with_bars() -> Session {
        let mut s = Session::new(Registry::builtin());
        let doc = vizact_core::fixtures::get("bars").unwrap().doc;
        let out = s.handle(&json!({"op": "load", "doc": doc}).to_string());
        assert_eq!(out[0]["diagnostics"], json!([]));
        assert_eq!(out[1]["op"], "scene");
        s
    }

    #[test]
    fn load_renders_three_bars() {
        let mut s = Session::new(Registry::builtin());
        let doc: Json = serde_json::from_str(vizact_core::fixtures::get("bars").unwrap().doc).unwrap();
        let out = s.handle(&json!({"op": "load", "doc": doc}).to_string());
        assert_eq!(out[1]["svg"].as_str().unwrap().matches("<rect id=\"bars/").count(), 3);
    }

    #[test]
    fn event_replies_with_trace_then_scene() {
        let mut s = session_with_bars();
        let out = s.handle(r#"{"op":"event","event":{"tick":1,"kind":"click","x":100,"y":200}}"#);
        assert_eq!(out[0]["op"], "trace");
        assert_eq!(out[0]["entry"]["hit"], "bars/USA");
        assert_eq!(out[1]["op"], "scene");
    }

    #[test]
    fn inspect_reports_the_technique() {
        let mut s = session_with_bars();
        let out = s.handle(r#"{"op":"inspect","unit":"pick"}"#);
        assert_eq!(out[0]["op"], "report");
        assert_eq!(out[0]["report"]["technique"], "point_select");
    }

    #[test]
    fn bad_messages_become_diagnostics() {
        let mut s = Session::new(Registry::builtin());
        for m in ["not json", r#"{"op":"fly"}"#, r#"{"op":"event","event":{}}"#, r#"{"op":"inspect","unit":"x"}"#, "{}"] {
            let out = s.handle(m);
            assert_eq!(out.len(), 1, "{m}");
            assert_eq!(out[0]["op"], "diagnostics", "{m}");
            assert_eq!(out[0]["diagnostics"][0]["severity"], "error", "{m}");
        }
        let mut s = session_with_bars();
        let out = s.handle(r#"{"op":"inspect","unit":"nope"}"#);
        assert_eq!(out[0]["diagnostics"][0]["code"], "E001_UNRESOLVED_NAME");
    }

    #[test]
    fn broken_document_is_reported() {
        let mut s = Session::new(Registry::builtin());
        let out = s.handle(r#"{"op":"load","doc":"{\"name\": 1}"}"#);
        assert_eq!(out[0]["op"], "diagnostics");
        assert!(!out[0]["diagnostics"].as_array().unwrap().is_empty());
    }
}
