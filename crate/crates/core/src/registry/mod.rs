//! The taxonomy as data: authoring intents, user intents and technique
//! signatures, loaded from a versioned JSON file.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diag::{Code, Diagnostic};

const BUILTIN: &str = include_str!("../../data/registry.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    MouseParams,
    HitObject,
    Predicate,
    StateVariable,
    FieldReference,
    ComponentReference,
    Evaluator,
    EvaluationScale,
    Camera,
    TargetData,
    Encoding,
    Scale,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 12] = [
        ComponentKind::MouseParams,
        ComponentKind::HitObject,
        ComponentKind::Predicate,
        ComponentKind::StateVariable,
        ComponentKind::FieldReference,
        ComponentKind::ComponentReference,
        ComponentKind::Evaluator,
        ComponentKind::EvaluationScale,
        ComponentKind::Camera,
        ComponentKind::TargetData,
        ComponentKind::Encoding,
        ComponentKind::Scale,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ComponentKind::MouseParams => "mouse_params",
            ComponentKind::HitObject => "hit_object",
            ComponentKind::Predicate => "predicate",
            ComponentKind::StateVariable => "state_variable",
            ComponentKind::FieldReference => "field_reference",
            ComponentKind::ComponentReference => "component_reference",
            ComponentKind::Evaluator => "evaluator",
            ComponentKind::EvaluationScale => "evaluation_scale",
            ComponentKind::Camera => "camera",
            ComponentKind::TargetData => "target_data",
            ComponentKind::Encoding => "encoding",
            ComponentKind::Scale => "scale",
        }
    }

    /// Display form used in explain tables.
    pub fn label(self) -> &'static str {
        match self {
            ComponentKind::MouseParams => "mouse parameters",
            ComponentKind::HitObject => "hit object",
            ComponentKind::Predicate => "predicate",
            ComponentKind::StateVariable => "state variable",
            ComponentKind::FieldReference => "field reference",
            ComponentKind::ComponentReference => "component reference",
            ComponentKind::Evaluator => "target evaluator",
            ComponentKind::EvaluationScale => "evaluation scale",
            ComponentKind::Camera => "camera",
            ComponentKind::TargetData => "target data",
            ComponentKind::Encoding => "encoding",
            ComponentKind::Scale => "scale",
        }
    }

    pub fn parse(s: &str) -> Option<ComponentKind> {
        ComponentKind::ALL.into_iter().find(|k| k.id() == s)
    }
}

/// A component id with an optional qualifier, e.g. `evaluator:order`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    pub kind: ComponentKind,
    pub qualifier: Option<String>,
}

impl Component {
    pub fn plain(kind: ComponentKind) -> Self {
        Component { kind, qualifier: None }
    }

    pub fn qualified(kind: ComponentKind, q: &str) -> Self {
        Component { kind, qualifier: Some(q.to_string()) }
    }

    /// Whether a present component fulfils this requirement: an
    /// unqualified requirement accepts any qualifier.
    pub fn accepts(&self, present: &Component) -> bool {
        self.kind == present.kind && (self.qualifier.is_none() || self.qualifier == present.qualifier)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.qualifier {
            Some(q) => write!(f, "{}:{q}", self.kind.id()),
            None => f.write_str(self.kind.id()),
        }
    }
}

impl std::str::FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (k, q) = match s.split_once(':') {
            Some((k, q)) => (k, Some(q.to_string())),
            None => (s, None),
        };
        let kind = ComponentKind::parse(k).ok_or_else(|| format!("unknown component `{k}`"))?;
        Ok(Component { kind, qualifier: q })
    }
}

impl Serialize for Component {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Component {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Term {
    Required(Component),
    Optional(Component),
    /// Alternatives; a group counts only when all its members are present.
    OneOf(Vec<Vec<Component>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    S,
    M,
    SM,
}

impl Scope {
    pub fn admits_single(self) -> bool {
        matches!(self, Scope::S | Scope::SM)
    }

    pub fn admits_multi(self) -> bool {
        matches!(self, Scope::M | Scope::SM)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scope::S => "S",
            Scope::M => "M",
            Scope::SM => "S/M",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TechniqueSignature {
    pub id: String,
    pub label: String,
    pub user_intents: Vec<String>,
    pub scope: Scope,
    pub terms: Vec<Term>,
    #[serde(default)]
    pub aliases: Vec<String>,
}

impl TechniqueSignature {
    /// Number of required terms, a OneOf counting as its smallest branch.
    pub fn specificity(&self) -> usize {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Required(_) => 1,
                Term::Optional(_) => 0,
                Term::OneOf(groups) => groups.iter().map(Vec::len).min().unwrap_or(0),
            })
            .sum()
    }

    /// Every component the signature mentions.
    pub fn mentioned(&self) -> Vec<&Component> {
        let mut out = Vec::new();
        for t in &self.terms {
            match t {
                Term::Required(c) | Term::Optional(c) => out.push(c),
                Term::OneOf(groups) => out.extend(groups.iter().flatten()),
            }
        }
        out
    }

    /// Compact textual form: `(hit_object | predicate) evaluator [x]`.
    pub fn notation(&self) -> String {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Required(c) => c.to_string(),
                Term::Optional(c) => format!("[{c}]"),
                Term::OneOf(groups) => format!(
                    "({})",
                    groups
                        .iter()
                        .map(|g| g.iter().map(Component::to_string).collect::<Vec<_>>().join(" + "))
                        .collect::<Vec<_>>()
                        .join(" | ")
                ),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserIntent {
    pub id: String,
    pub short: String,
    pub definition: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AuthoringIntent {
    pub id: String,
    pub label: String,
    pub user_intents: Vec<UserIntent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub version: String,
    #[serde(default)]
    pub note: String,
    pub intents: Vec<AuthoringIntent>,
    pub techniques: Vec<TechniqueSignature>,
    #[serde(default)]
    pub unsupported: Vec<String>,
}

/// Lowercases and folds runs of non-alphanumerics into `_`.
pub fn normalize(name: &str) -> String {
    let mut out = String::new();
    for ch in name.trim().chars() {
        if ch.is_alphanumeric() {
            out.extend(ch.to_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

impl Registry {
    /// The registry shipped with the crate.
    pub fn builtin() -> &'static Registry {
        static R: OnceLock<Registry> = OnceLock::new();
        R.get_or_init(|| Registry::from_json(BUILTIN).expect("builtin registry is valid"))
    }

    pub fn from_json(text: &str) -> Result<Registry, String> {
        let r: Registry = serde_json::from_str(text).map_err(|e| e.to_string())?;
        r.check()?;
        Ok(r)
    }

    fn check(&self) -> Result<(), String> {
        let intents: BTreeSet<&str> =
            self.intents.iter().flat_map(|a| a.user_intents.iter().map(|u| u.id.as_str())).collect();
        let mut names = BTreeSet::new();
        for t in &self.techniques {
            if t.terms.is_empty() {
                return Err(format!("technique `{}` has no terms", t.id));
            }
            if t.user_intents.is_empty() {
                return Err(format!("technique `{}` has no user intent", t.id));
            }
            for u in &t.user_intents {
                if !intents.contains(u.as_str()) {
                    return Err(format!("technique `{}` names unknown user intent `{u}`", t.id));
                }
            }
            for n in std::iter::once(&t.id).chain(&t.aliases) {
                if !names.insert(normalize(n)) {
                    return Err(format!("name `{n}` is registered twice"));
                }
            }
        }
        for u in &self.unsupported {
            if !names.insert(normalize(u)) {
                return Err(format!("name `{u}` is registered twice"));
            }
        }
        Ok(())
    }

    /// Resolves a technique id or alias.
    pub fn technique(&self, name: &str) -> Option<&TechniqueSignature> {
        let n = normalize(name);
        self.techniques
            .iter()
            .find(|t| normalize(&t.id) == n)
            .or_else(|| self.techniques.iter().find(|t| t.aliases.iter().any(|a| normalize(a) == n)))
    }

    pub fn signature_of(&self, name: &str) -> Result<&TechniqueSignature, Diagnostic> {
        self.technique(name).ok_or_else(|| {
            let unsupported = self.unsupported.iter().any(|u| normalize(u) == normalize(name));
            let msg = if unsupported {
                format!("`{name}` is a known technique without runtime support")
            } else {
                format!("unknown technique `{name}`")
            };
            Diagnostic::error(Code::UnknownTechnique, "", msg)
        })
    }

    pub fn position(&self, id: &str) -> usize {
        self.techniques.iter().position(|t| t.id == id).unwrap_or(usize::MAX)
    }

    /// A user intent by id or short form (`enter`, `abstract`).
    pub fn user_intent(&self, name: &str) -> Option<&UserIntent> {
        let n = normalize(name);
        self.intents.iter().flat_map(|a| &a.user_intents).find(|u| u.id == n || u.short == n)
    }

    pub fn authoring_intent(&self, id: &str) -> Option<&AuthoringIntent> {
        self.intents.iter().find(|a| a.id.eq_ignore_ascii_case(id))
    }

    pub fn authoring_of(&self, user_intent: &str) -> Option<&str> {
        let u = self.user_intent(user_intent)?;
        self.intents.iter().find(|a| a.user_intents.iter().any(|x| x.id == u.id)).map(|a| a.id.as_str())
    }

    pub fn techniques_for_user_intent(&self, intent: &str) -> Result<Vec<&str>, Diagnostic> {
        let u = self
            .user_intent(intent)
            .ok_or_else(|| Diagnostic::error(Code::UnknownIntent, "", format!("unknown user intent `{intent}`")))?;
        Ok(self.techniques.iter().filter(|t| t.user_intents.contains(&u.id)).map(|t| t.id.as_str()).collect())
    }

    pub fn techniques_for_authoring_intent(&self, id: &str) -> Result<Vec<&str>, Diagnostic> {
        let a = self
            .authoring_intent(id)
            .ok_or_else(|| Diagnostic::error(Code::UnknownIntent, "", format!("unknown authoring intent `{id}`")))?;
        Ok(self
            .techniques
            .iter()
            .filter(|t| t.user_intents.iter().any(|u| a.user_intents.iter().any(|x| &x.id == u)))
            .map(|t| t.id.as_str())
            .collect())
    }

    /// (user intents, authoring intents) of a technique.
    pub fn intents_of_technique(&self, name: &str) -> Result<(Vec<String>, Vec<String>), Diagnostic> {
        let t = self.signature_of(name)?;
        let mut ais: Vec<String> = Vec::new();
        for u in &t.user_intents {
            if let Some(a) = self.authoring_of(u) {
                if !ais.iter().any(|x| x == a) {
                    ais.push(a.to_string());
                }
            }
        }
        Ok((t.user_intents.clone(), ais))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let r = Registry::builtin();
        assert_eq!(r.intents.len(), 4);
        assert_eq!(r.techniques.len(), 27);
    }

    #[test]
    fn alias_lookup_is_normalized() {
        let r = Registry::builtin();
        assert_eq!(r.signature_of("Brushing and Linking").unwrap().id, "linked_select");
        assert_eq!(r.signature_of("add-object").unwrap().id, "click_to_add_data_points");
        assert_eq!(r.signature_of("bookmark").unwrap_err().code, Code::UnknownTechnique);
        assert_eq!(r.signature_of("teleport").unwrap_err().code, Code::UnknownTechnique);
    }

    #[test]
    fn notation_and_specificity() {
        let r = Registry::builtin();
        let p = r.signature_of("point_select").unwrap();
        assert_eq!(p.notation(), "(hit_object | predicate) evaluator evaluation_scale");
        assert_eq!(p.specificity(), 3);
        let d = r.signature_of("deselect").unwrap();
        assert_eq!(d.notation(), "[hit_object] predicate evaluator evaluation_scale");
        let dq = r.signature_of("dynamic_queries").unwrap();
        assert_eq!(dq.specificity(), 2);
    }

    #[test]
    fn intent_queries() {
        let r = Registry::builtin();
        assert_eq!(r.intents_of_technique("pan").unwrap(), (vec!["steer".to_string()], vec!["AI2".to_string()]));
        assert_eq!(
            r.intents_of_technique("direct_walk").unwrap(),
            (vec!["select".into(), "steer".into()], vec!["AI1".into(), "AI2".into()])
        );
        assert_eq!(r.techniques_for_user_intent("enter").unwrap(), vec!["click_to_add_data_points"]);
        assert_eq!(r.techniques_for_user_intent("nope").unwrap_err().code, Code::UnknownIntent);
        assert_eq!(r.techniques_for_authoring_intent("AI2").unwrap().len(), 6);
    }

    #[test]
    fn duplicate_alias_is_rejected() {
        let text = BUILTIN.replace("\"click select\"", "\"pan\"");
        assert!(Registry::from_json(&text).unwrap_err().contains("twice"));
    }
}
