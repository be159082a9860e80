//! The wired set of interaction components for one interaction unit.
//!
//! [`GraphParts`] is both the raw `components` fragment authors write at the
//! component level and the body of every compiled [`ComponentGraph`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::interaction::event::Trigger;
use crate::interaction::predicate::PredOp;
use crate::scene::{Channel, ChannelMap, ChannelValue, MarkShape};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Predicate,
    FieldReference,
    ComponentReference,
    Scalar,
}

impl StateKind {
    pub fn label(self) -> &'static str {
        match self {
            StateKind::Predicate => "predicate",
            StateKind::FieldReference => "field reference",
            StateKind::ComponentReference => "component reference",
            StateKind::Scalar => "state variable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDecl {
    pub name: String,
    pub kind: StateKind,
    /// Predicate variable (field or `@channel`) for predicate state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<PredOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<serde_json::Value>,
    /// Human label used in explain tables, e.g. "logical operator".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum When {
    #[default]
    Always,
    Hit,
    Background,
}

impl When {
    pub fn is_always(&self) -> bool {
        *self == When::Always
    }

    pub fn admits(self, hit: bool) -> bool {
        match self {
            When::Always => true,
            When::Hit => hit,
            When::Background => !hit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlOp {
    #[default]
    Eq,
    Lte,
    Gte,
    /// Toggle the value in or out of an `in` list.
    Toggle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

/// Where a state update takes its new value from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    /// Key (or `field`) of the hit member.
    HitKey {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<String>,
    },
    /// Adds or removes the hit member's key in an `in` list.
    ToggleHitKey {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<String>,
    },
    RemoveHitKey {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<String>,
    },
    /// Expands the hit to every object sharing its value of `field`.
    HitGroup { field: String },
    /// Range predicate from the drag rectangle, inverted through the
    /// position encoding (or raw world coordinates when none is named).
    Brush {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        encoding: Option<String>,
        #[serde(default = "default_axis")]
        axis: Axis,
    },
    Pointer { axis: Axis },
    Control {
        #[serde(default)]
        op: ControlOp,
        /// A control value that clears the variable instead of setting it.
        #[serde(default, rename = "clearOn", skip_serializing_if = "Option::is_none")]
        clear_on: Option<Value>,
    },
    Clear,
    Step {
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max: Option<f64>,
    },
    Cycle { values: Vec<Value> },
    /// Cumulative scroll crosses `thresholds`; the value is `values[i]`
    /// where `i` counts thresholds passed.
    Scroll { thresholds: Vec<f64>, values: Vec<Value> },
    /// Zoom level of a scene camera mapped through thresholds.
    ZoomLevel {
        scene: String,
        thresholds: Vec<f64>,
        values: Vec<Value>,
    },
    HitObject,
    CollectionMembers { collection: String },
    Constant { value: serde_json::Value },
}

impl Source {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Source::HitKey { .. } => "hit_key",
            Source::ToggleHitKey { .. } => "toggle_hit_key",
            Source::RemoveHitKey { .. } => "remove_hit_key",
            Source::HitGroup { .. } => "hit_group",
            Source::Brush { .. } => "brush",
            Source::Pointer { .. } => "pointer",
            Source::Control { .. } => "control",
            Source::Clear => "clear",
            Source::Step { .. } => "step",
            Source::Cycle { .. } => "cycle",
            Source::Scroll { .. } => "scroll",
            Source::ZoomLevel { .. } => "zoom_level",
            Source::HitObject => "hit_object",
            Source::CollectionMembers { .. } => "collection_members",
            Source::Constant { .. } => "constant",
        }
    }
}

fn default_axis() -> Axis {
    Axis::X
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateUpdate {
    pub var: String,
    pub from: Source,
    #[serde(default, skip_serializing_if = "When::is_always")]
    pub when: When,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Asc,
    Desc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Index,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutPolicy {
    /// Dropping one view onto another swaps their slots.
    GridSwap,
    /// Targets are pulled toward the referenced magnets by field value.
    Attraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluatorSpec {
    Predicate { predicate: String },
    /// Sorts targets by a field (or by the field named in a field-reference
    /// variable) and reassigns the existing slot positions on `channel`.
    Order {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        var: Option<String>,
        #[serde(default)]
        direction: Direction,
        channel: Channel,
    },
    Distance {
        metric: Metric,
        /// `hit` or a predicate variable naming the anchor.
        #[serde(default = "default_anchor")]
        anchor: String,
    },
    Layout {
        policy: LayoutPolicy,
        /// Component-reference variable holding the magnets.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        refs: Option<String>,
        /// Datum field of a magnet naming the target field it attracts by.
        #[serde(default, rename = "fieldKey", skip_serializing_if = "Option::is_none")]
        field_key: Option<String>,
    },
}

fn default_anchor() -> String {
    "hit".to_string()
}

impl EvaluatorSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EvaluatorSpec::Predicate { .. } => "predicate",
            EvaluatorSpec::Order { .. } => "order",
            EvaluatorSpec::Distance { .. } => "distance",
            EvaluatorSpec::Layout { .. } => "layout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorDecl {
    pub name: String,
    /// Target selector the evaluator reads.
    pub targets: String,
    #[serde(flatten)]
    pub spec: EvaluatorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BooleanMap {
    #[serde(default)]
    pub true_props: ChannelMap,
    #[serde(default)]
    pub false_props: ChannelMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberMap {
    pub domain: [f64; 2],
    /// Per-channel output range, interpolated linearly over the domain.
    pub channels: BTreeMap<Channel, [f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleInput {
    Boolean(BooleanMap),
    Number(NumberMap),
    /// Rank r takes the r-th smallest existing value of `channel`.
    Rank { channel: Channel },
}

impl ScaleInput {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ScaleInput::Boolean(_) => "boolean",
            ScaleInput::Number(_) => "number",
            ScaleInput::Rank { .. } => "rank",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalScaleDecl {
    pub evaluator: String,
    #[serde(flatten)]
    pub input: ScaleInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CameraOp {
    /// Focus moves against the drag delta.
    Pan {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scene: Option<String>,
    },
    /// Anchor-invariant zoom: wheel steps of `step` per unit delta, or a
    /// fixed `step` factor for non-wheel events.
    Zoom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scene: Option<String>,
        #[serde(default = "default_zoom_step")]
        step: f64,
    },
    /// Jump the focus of `scene` to the object whose `field` matches the
    /// hit member's value.
    FocusHit {
        scene: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<String>,
    },
    /// Jump the focus of `scene` to the object named by a variable.
    ShowView {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scene: Option<String>,
        var: String,
    },
}

fn default_zoom_step() -> f64 {
    1.25
}

impl CameraOp {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CameraOp::Pan { .. } => "pan",
            CameraOp::Zoom { .. } => "zoom",
            CameraOp::FocusHit { .. } => "focus_hit",
            CameraOp::ShowView { .. } => "show_view",
        }
    }

    pub fn scene(&self) -> Option<&str> {
        match self {
            CameraOp::Pan { scene } | CameraOp::Zoom { scene, .. } | CameraOp::ShowView { scene, .. } => {
                scene.as_deref()
            }
            CameraOp::FocusHit { scene, .. } => Some(scene),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppendFrom {
    /// Inverts the click position through the collection's x/y encodings.
    Pointer,
    /// Stores the control value in `field`.
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DataUpdateRule {
    FilterByPredicate { target: String, predicate: String },
    /// Replace the target's bound rows with the source rows matching the
    /// predicate (tooltips, detail panels).
    ReplaceRows { target: String, predicate: String },
    AppendRow {
        target: String,
        from: AppendFrom,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<String>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        defaults: BTreeMap<String, Value>,
    },
    /// Recompute the target's transform with its parameter taken from a
    /// state variable.
    Recompute { target: String, var: String },
    /// Combine the drag-origin member and the drop member under a new
    /// parent row one level up.
    Nest {
        target: String,
        #[serde(rename = "parentField")]
        parent_field: String,
        #[serde(rename = "levelField")]
        level_field: String,
    },
}

impl DataUpdateRule {
    pub fn kind_name(&self) -> &'static str {
        match self {
            DataUpdateRule::FilterByPredicate { .. } => "filter_by_predicate",
            DataUpdateRule::ReplaceRows { .. } => "replace_rows",
            DataUpdateRule::AppendRow { .. } => "append_row",
            DataUpdateRule::Recompute { .. } => "recompute",
            DataUpdateRule::Nest { .. } => "nest",
        }
    }

    pub fn target(&self) -> &str {
        match self {
            DataUpdateRule::FilterByPredicate { target, .. }
            | DataUpdateRule::ReplaceRows { target, .. }
            | DataUpdateRule::AppendRow { target, .. }
            | DataUpdateRule::Recompute { target, .. }
            | DataUpdateRule::Nest { target, .. } => target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartVariant {
    pub shape: MarkShape,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub channels: ChannelMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodingUpdate {
    /// Rebind the encoding's field: from the control value when `var` is
    /// absent, else from a field-reference variable. The scale domain is
    /// refit to the new field.
    Field {
        encoding: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        var: Option<String>,
    },
    /// Swap the mark shape of a collection's template by variable value.
    ChartType {
        target: String,
        var: String,
        variants: BTreeMap<String, ChartVariant>,
    },
}

impl EncodingUpdate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EncodingUpdate::Field { .. } => "field",
            EncodingUpdate::ChartType { .. } => "chart_type",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleSource {
    Pointer {
        axis: Axis,
        #[serde(default)]
        offset: f64,
    },
    /// Center of the hit member on an axis.
    HitCenter {
        axis: Axis,
        #[serde(default)]
        offset: f64,
    },
    /// One value while something is hit, another otherwise.
    HitPresent {
        #[serde(rename = "then")]
        yes: ChannelValue,
        #[serde(rename = "else")]
        no: ChannelValue,
    },
    /// `yes` on targets whose id (or key) equals the variable value, `no`
    /// on the rest.
    VarMatch {
        var: String,
        #[serde(rename = "then")]
        yes: ChannelValue,
        #[serde(rename = "else")]
        no: ChannelValue,
    },
    /// Lookup of the variable's value in a table.
    VarTable {
        var: String,
        table: BTreeMap<String, ChannelValue>,
    },
    /// Move the hit member (and its subtree) by the pointer delta.
    Translate,
    Constant { value: ChannelValue },
}

impl RuleSource {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RuleSource::Pointer { .. } => "pointer",
            RuleSource::HitCenter { .. } => "hit_center",
            RuleSource::HitPresent { .. } => "hit_present",
            RuleSource::VarMatch { .. } => "var_match",
            RuleSource::VarTable { .. } => "var_table",
            RuleSource::Translate => "translate",
            RuleSource::Constant { .. } => "constant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRule {
    /// Target selector, or `hit` for the hit member.
    pub target: String,
    /// Unused by `translate`, which moves x and y together.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<Channel>,
    pub from: RuleSource,
    #[serde(default, skip_serializing_if = "When::is_always")]
    pub when: When,
}

/// How the hit object is obtained: a canvas hit test, optionally resolved
/// to the member of a collection that contains the hit mark.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HitRule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphParts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hit: Option<HitRule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub state: Vec<StateDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub updates: Vec<StateUpdate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evaluators: Vec<EvaluatorDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scales: Vec<EvalScaleDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub camera: Vec<CameraOp>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub data: Vec<DataUpdateRule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub encodings: Vec<EncodingUpdate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rules: Vec<ChannelRule>,
}

impl GraphParts {
    pub fn is_empty(&self) -> bool {
        self == &GraphParts::default()
    }
}

/// A compiled unit's complete wiring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentGraph {
    pub event: Trigger,
    pub listener: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    pub targets: Vec<String>,
    #[serde(flatten)]
    pub parts: GraphParts,
}
