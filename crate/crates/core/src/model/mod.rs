//! The specification language: JSON text to [`Document`], plus structural
//! validation.

pub mod csv;
pub mod index;
pub mod parse;
pub mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use crate::compiler::graph::GraphParts;
use crate::interaction::event::Trigger;
use crate::interaction::predicate::Predicate;
use crate::scene::transform::Transform;
use crate::scene::{Channel, ChannelMap, MarkShape, ObjectKind, Orient};
use crate::value::{Row, Value};

pub use index::{DocIndex, ListenerRef};
pub use parse::{parse_document, parse_document_bytes, parse_document_with, DirResolver, FileResolver, NoFiles};
pub use validate::validate_document;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Number,
    String,
    Boolean,
    Date,
}

impl FieldKind {
    pub fn admits(self, v: &Value) -> bool {
        match (self, v) {
            (_, Value::Null) => true,
            (FieldKind::Number, Value::Number(_)) => true,
            (FieldKind::String, Value::String(_)) => true,
            (FieldKind::Boolean, Value::Bool(_)) => true,
            (FieldKind::Date, Value::String(s)) => is_iso_date(s),
            _ => false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Number => "number",
            FieldKind::String => "string",
            FieldKind::Boolean => "boolean",
            FieldKind::Date => "date",
        }
    }
}

/// `YYYY-MM-DD`, optionally followed by a `T...` time part.
pub fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() < 10 {
        return false;
    }
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    let date_ok = digits(0..4) && b[4] == b'-' && digits(5..7) && b[7] == b'-' && digits(8..10);
    date_ok && (b.len() == 10 || b[10] == b'T')
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDef {
    pub name: String,
    pub kind: FieldKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    pub name: String,
    #[serde(default)]
    pub fields: Vec<FieldDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default)]
    pub rows: Vec<Row>,
}

impl DataTable {
    /// Stable row key: the named key field, else the first declared field.
    pub fn key_field(&self) -> Option<&str> {
        self.key.as_deref().or_else(|| self.fields.first().map(|f| f.name.as_str()))
    }

    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleKind {
    Linear,
    Band,
    Point,
    Ordinal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Values(Vec<Value>),
    Data { data: String, field: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleDef {
    pub name: String,
    pub kind: ScaleKind,
    pub domain: DomainSpec,
    #[serde(default)]
    pub range: Vec<Value>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub padding: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObjectDecl {
    pub name: String,
    pub kind: ObjectKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<MarkShape>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub channels: ChannelMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_by: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<Box<ObjectDecl>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<ObjectDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orient: Option<Orient>,
    /// Text field of an annotation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// Singular noun for one instance, e.g. "magnet".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Plural noun for the members of a collection, e.g. "dust particles".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub items: Option<String>,
}

impl ObjectDecl {
    pub fn is_mark_like(&self) -> bool {
        matches!(self.kind, ObjectKind::Mark | ObjectKind::Annotation)
    }

    /// Visits this declaration and every nested template/part, depth first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a ObjectDecl)) {
        f(self);
        if let Some(t) = &self.template {
            t.walk(f);
        }
        for p in &self.parts {
            p.walk(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingDecl {
    pub name: String,
    pub target: String,
    pub field: String,
    pub channel: Channel,
    pub scale: String,
    /// Use the band width instead of the band start (band scales only).
    #[serde(default, skip_serializing_if = "is_false")]
    pub band: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlKind {
    Button,
    Dropdown,
    Slider,
    Checkbox,
    Tab,
    Breadcrumb,
    Scroller,
}

impl ControlKind {
    pub fn name(self) -> &'static str {
        match self {
            ControlKind::Button => "button",
            ControlKind::Dropdown => "dropdown",
            ControlKind::Slider => "slider",
            ControlKind::Checkbox => "checkbox",
            ControlKind::Tab => "tab",
            ControlKind::Breadcrumb => "breadcrumb",
            ControlKind::Scroller => "scroller",
        }
    }

    /// Display name used when a control carries no label of its own.
    pub fn display(self) -> &'static str {
        match self {
            ControlKind::Dropdown => "dropdown menu",
            other => other.name(),
        }
    }

    pub fn needs_options(self) -> bool {
        matches!(self, ControlKind::Dropdown | ControlKind::Checkbox | ControlKind::Tab | ControlKind::Breadcrumb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlDecl {
    pub name: String,
    pub kind: ControlKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    /// Data field the control queries, when it drives a predicate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Noun for one option, e.g. "field" in "choose field".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialData {
    /// Default source table for collections that name none.
    Table(String),
    /// Rows of `table` shown initially in this scene.
    Filter { table: String, predicate: Predicate },
}

impl InitialData {
    pub fn table(&self) -> &str {
        match self {
            InitialData::Table(t) | InitialData::Filter { table: t, .. } => t,
        }
    }
}

fn default_width() -> f64 {
    400.0
}

fn default_height() -> f64 {
    300.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SceneSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
    /// Page offset of the scene; events arrive in page coordinates.
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_height")]
    pub height: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub camera_enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_zoom: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_zoom: Option<f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub hidden: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_data: Option<InitialData>,
    #[serde(default)]
    pub objects: Vec<ObjectDecl>,
    #[serde(default)]
    pub encodings: Vec<EncodingDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<ControlDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Intent,
    Technique,
    Component,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Intent => "intent",
            Level::Technique => "technique",
            Level::Component => "component",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventBinding {
    pub event: Trigger,
    pub listener: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentRef {
    #[serde(default, rename = "authoringIntent", skip_serializing_if = "Option::is_none")]
    pub authoring: Option<String>,
    #[serde(default, rename = "userIntent", skip_serializing_if = "Option::is_none")]
    pub user: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub name: String,
    /// Action name shown in explain tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Level>,
    pub on: EventBinding,
    #[serde(default, deserialize_with = "one_or_many")]
    pub target: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intent: Option<IntentRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub technique: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<GraphParts>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, serde_json::Value>,
}

impl InteractionSpec {
    /// Declared level, or the inferred one when omitted.
    pub fn level(&self) -> Level {
        self.level.unwrap_or(if self.components.is_some() {
            Level::Component
        } else if self.technique.is_some() {
            Level::Technique
        } else {
            Level::Intent
        })
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub name: String,
    #[serde(default)]
    pub data: Vec<DataTable>,
    #[serde(default)]
    pub scales: Vec<ScaleDef>,
    #[serde(default)]
    pub scenes: Vec<SceneSpec>,
    #[serde(default)]
    pub interactions: Vec<InteractionSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl Document {
    pub fn table(&self, name: &str) -> Option<&DataTable> {
        self.data.iter().find(|t| t.name == name)
    }

    pub fn scale(&self, name: &str) -> Option<&ScaleDef> {
        self.scales.iter().find(|s| s.name == name)
    }

    pub fn scene(&self, name: &str) -> Option<&SceneSpec> {
        self.scenes.iter().find(|s| s.name == name)
    }

    pub fn interaction(&self, name: &str) -> Option<&InteractionSpec> {
        self.interactions.iter().find(|i| i.name == name)
    }

    pub fn control(&self, name: &str) -> Option<(&SceneSpec, &ControlDecl)> {
        self.scenes
            .iter()
            .find_map(|s| s.controls.iter().find(|c| c.name == name).map(|c| (s, c)))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}
