//! Graph to technique: rank every registered signature against a graph and
//! describe the unit in the columns of a case-study table.

use std::cmp::Reverse;

use serde::Serialize;

use crate::compiler::features::{extract, var_kind, Features, VarTable};
use crate::compiler::graph::{AppendFrom, ComponentGraph, DataUpdateRule, Source, StateKind};
use crate::compiler::signature::{check_components, SignatureReport};
use crate::interaction::event::{EventKind, Trigger};
use crate::model::index::Role;
use crate::model::{DocIndex, Document, ListenerRef};
use crate::registry::{Registry, Scope};
use crate::scene::ObjectKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Exact,
    Extras,
    Unsatisfied,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub technique: String,
    pub tier: Tier,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extraneous: Vec<String>,
    #[serde(skip)]
    specificity: usize,
    #[serde(skip)]
    position: usize,
    #[serde(skip)]
    held: Vec<String>,
}

/// Number of candidates kept in a report.
pub const REPORTED_CANDIDATES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub unit: String,
    pub action: String,
    pub event: String,
    pub listener: String,
    pub hit_object: Option<String>,
    pub target: String,
    pub internal_components: Vec<String>,
    /// `None` when nothing fits.
    pub technique: Option<String>,
    pub technique_label: String,
    pub user_intents: Vec<String>,
    pub authoring_intents: Vec<String>,
    pub candidates: Vec<Candidate>,
    pub why: Vec<String>,
}

type Checks = Vec<(&'static str, bool)>;

/// Behavioural checks that separate techniques whose signatures coincide.
fn traits(id: &str, f: &Features) -> Checks {
    match id {
        "point_select" => vec![
            ("predicate set from the hit key", f.pred("hit_key")),
            ("selection replaces rather than accumulates", !f.pred("toggle_hit_key")),
            ("targets stay visible", !f.filters()),
        ],
        "multi_select" => vec![("hit keys toggle in and out of the predicate", f.pred("toggle_hit_key"))],
        "range_select" => vec![
            ("predicate set from a brushed range", f.pred("brush")),
            ("targets stay visible", !f.filters()),
        ],
        "generalized_select" => vec![("hit expands to the group sharing a field", f.pred("hit_group"))],
        "linked_select" => vec![
            (
                "predicate set from the pointer or the hit",
                f.pred("hit_key") || f.pred("brush") || f.pred("toggle_hit_key"),
            ),
            ("targets stay visible", !f.filters()),
        ],
        "deselect" => vec![("predicate operand cleared", f.pred("clear"))],
        "show_hide_reference_lines" => vec![("rules drive a line annotation", f.line_annotation_rule)],
        "show_hide_tooltip_container" => vec![("rules drive an annotation container", f.other_annotation_rule)],
        "reposition" => vec![
            ("positions follow the pointer, a step or attraction", f.position_rule || f.layouts.contains(&crate::compiler::graph::LayoutPolicy::Attraction)),
        ],
        "sort" => vec![("an order evaluator reassigns slots", f.evaluators.contains("order"))],
        "organize_views" => vec![(
            "a layout evaluator swaps views",
            f.layouts.contains(&crate::compiler::graph::LayoutPolicy::GridSwap),
        )],
        "geometric_zoom" => vec![("the camera zooms", f.camera_ops.contains("zoom"))],
        "pan" => vec![
            ("the camera focus moves with the drag", f.camera_ops.contains("pan")),
            ("zoom is untouched", !f.camera_ops.contains("zoom")),
        ],
        "toggle_views" => vec![
            ("one view is shown at a time", f.view_switch_rule || f.camera_ops.contains("show_view")),
            ("views are switched directly rather than navigated", !f.has(crate::registry::ComponentKind::ComponentReference)),
        ],
        "navigate_scene_section" => vec![
            ("a component reference tracks the current view", f.has(crate::registry::ComponentKind::ComponentReference)),
            ("the referenced view is shown", f.view_switch_rule),
        ],
        "change_field_in_encoding" => vec![("an encoding is rebound to another field", f.encoding_ops.contains("field"))],
        "change_chart_type" => vec![("the chart type definition is swapped", f.encoding_ops.contains("chart_type"))],
        "click_to_add_data_points" => vec![("a row is appended", f.data("append_row"))],
        "dynamic_queries" => vec![
            ("a querying control sets the predicate", f.pred("control")),
            ("non-matching items are filtered", f.filters()),
        ],
        "details_on_demand" => vec![("detail rows are replaced by the predicate", f.data("replace_rows"))],
        "cross_filter" => vec![
            ("interaction on the canvas sets the predicate", f.canvas && !f.pred("control")),
            ("non-matching items are filtered", f.filters()),
        ],
        "move_up_down_hierarchy" => {
            vec![("the hierarchy level changes", f.data("recompute:hierarchy") || f.data("nest"))]
        }
        "drill_down_roll_up" => vec![("dimensions are drilled or rolled up", f.data("recompute:drill"))],
        "recompute_field_new_baseline" => vec![("values are indexed to a baseline", f.data("recompute:rebase"))],
        "change_aggregator" => vec![("the aggregator is recomputed", f.data("recompute:aggregate"))],
        "semantic_zoom" => vec![(
            "the zoom level changes the level of detail",
            f.data("recompute:bin") || f.var("zoom_level"),
        )],
        "direct_walk" => vec![("the camera walks to the hit item", f.camera_ops.contains("focus_hit"))],
        _ => Vec::new(),
    }
}

fn tier_of(r: &SignatureReport) -> Tier {
    if !r.satisfied {
        Tier::Unsatisfied
    } else if r.extraneous.is_empty() {
        Tier::Exact
    } else {
        Tier::Extras
    }
}

/// Every registered technique, best first. Ranking: trait violations, then
/// satisfaction tier, then specificity, then registry order.
pub fn rank(registry: &Registry, f: &Features) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = registry
        .techniques
        .iter()
        .enumerate()
        .map(|(position, sig)| {
            let report = check_components(&f.present, sig);
            let mut checks = traits(&sig.id, f);
            match sig.scope {
                Scope::S => checks.push(("all targets in the listener's scene", !f.multi)),
                Scope::M => checks.push(("targets span scenes", f.multi)),
                Scope::SM => {}
            }
            let violations = checks.iter().filter(|c| !c.1).map(|c| c.0.to_string()).collect();
            let held = checks.iter().filter(|c| c.1).map(|c| c.0.to_string()).collect();
            Candidate {
                technique: sig.id.clone(),
                tier: tier_of(&report),
                violations,
                missing: report.missing,
                extraneous: report.extraneous.iter().map(|c| c.to_string()).collect(),
                specificity: sig.specificity(),
                position,
                held,
            }
        })
        .collect();
    out.sort_by_key(|c| (c.violations.len(), c.tier, Reverse(c.specificity), c.position));
    out
}

fn plural(s: &str) -> String {
    if s.ends_with('s') || s.ends_with('x') || s.ends_with("ch") {
        format!("{s}es")
    } else {
        format!("{s}s")
    }
}

/// Singular noun for a member of `decl`.
fn member_label(idx: &DocIndex<'_>, decl: &str) -> String {
    match idx.decl(decl) {
        Some(d) if d.kind == ObjectKind::Collection => match &d.template {
            Some(t) => idx.label_of(&t.name),
            None => idx.label_of(decl),
        },
        _ => idx.label_of(decl),
    }
}

pub fn event_label(doc: &Document, g: &ComponentGraph) -> String {
    match g.event {
        Trigger::Drag | Trigger::Event(EventKind::DragStart | EventKind::DragMove) => "click + drag".into(),
        Trigger::Event(EventKind::DragEnd) => "drag end".into(),
        Trigger::Event(EventKind::PointerMove) => "hover".into(),
        Trigger::Event(EventKind::UiChange) => {
            let item = doc.control(&g.listener).and_then(|(_, c)| c.item.clone());
            format!("choose {}", item.unwrap_or_else(|| "option".into()))
        }
        Trigger::Event(k) => k.name().replace('_', " "),
    }
}

pub fn listener_label(doc: &Document, listener: &str) -> String {
    match DocIndex::new(doc).listener(listener) {
        Some(ListenerRef::Scene(_)) => "canvas".into(),
        Some(ListenerRef::Control(_, c)) => c.label.clone().unwrap_or_else(|| c.kind.display().into()),
        Some(ListenerRef::Section(s)) => format!("section {s}"),
        None => listener.into(),
    }
}

pub fn hit_label(doc: &Document, g: &ComponentGraph) -> Option<String> {
    let h = g.parts.hit.as_ref()?;
    let idx = DocIndex::new(doc);
    Some(match &h.target {
        Some(t) => member_label(&idx, t),
        None => "object".into(),
    })
}

pub fn target_label(doc: &Document, g: &ComponentGraph) -> String {
    let idx = DocIndex::new(doc);
    let appended = |t: &str| g.parts.data.iter().any(|d| matches!(d, DataUpdateRule::AppendRow { target, .. } if target == t));
    g.targets
        .iter()
        .map(|t| {
            if appended(t) {
                return format!("new {}", member_label(&idx, t));
            }
            match idx.decl(t) {
                Some(d) if d.kind == ObjectKind::Collection && idx.info(t).is_some_and(|i| i.role != Role::Template) => {
                    format!("all {}", d.items.clone().unwrap_or_else(|| plural(&member_label(&idx, t))))
                }
                Some(_) => idx.label_of(t),
                None => t.clone(),
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Non-observable components, in table order.
pub fn internal_components(g: &ComponentGraph, vars: &VarTable) -> Vec<String> {
    let p = &g.parts;
    let refs = crate::compiler::features::referenced_vars(g);
    let kind_of = |v: &str| var_kind(g, vars, v);
    let decl_of = |v: &str| p.state.iter().find(|s| s.name == v).or_else(|| vars.get(v));
    let mut out: Vec<String> = Vec::new();
    let push = |s: String, out: &mut Vec<String>| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    if refs.iter().any(|v| kind_of(v) == Some(StateKind::Predicate)) {
        push("predicate".into(), &mut out);
    }
    for v in refs.iter().filter(|v| kind_of(v) == Some(StateKind::Scalar)) {
        match decl_of(v).and_then(|d| d.label.clone()) {
            Some(l) => push(format!("state variable ({l})"), &mut out),
            None => push("state variable".into(), &mut out),
        }
    }
    if refs.iter().any(|v| kind_of(v) == Some(StateKind::FieldReference)) {
        push("field reference".into(), &mut out);
    }
    let comp: Vec<&String> = refs.iter().filter(|v| kind_of(v) == Some(StateKind::ComponentReference)).collect();
    if !comp.is_empty() {
        let many = comp.len() > 1
            || p.updates.iter().any(|u| comp.contains(&&u.var) && matches!(u.from, Source::CollectionMembers { .. }));
        push(if many { "component references" } else { "component reference" }.into(), &mut out);
    }
    if !p.evaluators.is_empty() {
        push("target evaluator".into(), &mut out);
    }
    if !p.scales.is_empty() {
        push("evaluation scale".into(), &mut out);
    }
    if !p.camera.is_empty() {
        push("camera".into(), &mut out);
    }
    if !p.encodings.is_empty() {
        push("encoding".into(), &mut out);
        push("scale".into(), &mut out);
    }
    if !p.data.is_empty() {
        push("target data".into(), &mut out);
    }
    out
}

/// Display name of a technique as realised by this graph.
pub fn technique_label(registry: &Registry, technique: &str, g: &ComponentGraph, doc: &Document) -> String {
    let idx = DocIndex::new(doc);
    match technique {
        "click_to_add_data_points" => {
            let from_control = g.parts.data.iter().find_map(|d| match d {
                DataUpdateRule::AppendRow { target, from: AppendFrom::Control, .. } => Some(target),
                _ => None,
            });
            if let Some(t) = from_control {
                let kind = idx.decl(t).and_then(|d| d.template.as_ref()).map(|t| t.kind.name()).unwrap_or("object");
                return format!("add {kind}");
            }
        }
        "move_up_down_hierarchy" if g.parts.data.iter().any(|d| matches!(d, DataUpdateRule::Nest { .. })) => {
            return "move up a hierarchy".into();
        }
        _ => {}
    }
    registry.technique(technique).map(|t| t.label.clone()).unwrap_or_else(|| technique.to_string())
}

pub fn classify_graph(
    registry: &Registry,
    unit: &str,
    action: &str,
    g: &ComponentGraph,
    doc: &Document,
    vars: &VarTable,
) -> ClassificationReport {
    let f = extract(g, doc, vars);
    let mut candidates = rank(registry, &f);
    let top = &candidates[0];
    let unclassified = !top.violations.is_empty() && top.tier == Tier::Unsatisfied;
    let (technique, label, user, authoring, why) = if unclassified {
        let why = vec![format!("nearest miss {}: missing {}", top.technique, top.missing.join(", "))];
        (None, "unclassified".to_string(), Vec::new(), Vec::new(), why)
    } else {
        let (u, a) = registry.intents_of_technique(&top.technique).unwrap_or_default();
        let label = technique_label(registry, &top.technique, g, doc);
        (Some(top.technique.clone()), label, u, a, top.held.clone())
    };
    candidates.truncate(REPORTED_CANDIDATES);
    ClassificationReport {
        unit: unit.to_string(),
        action: action.to_string(),
        event: event_label(doc, g),
        listener: listener_label(doc, &g.listener),
        hit_object: hit_label(doc, g),
        target: target_label(doc, g),
        internal_components: internal_components(g, vars),
        technique,
        technique_label: label,
        user_intents: user,
        authoring_intents: authoring,
        candidates,
        why,
    }
}

/// Classifies the named unit's compiled graph; declarations of other
/// component-level units are visible.
pub fn classify_interaction(registry: &Registry, unit: &str, g: &ComponentGraph, doc: &Document) -> ClassificationReport {
    let mut vars = VarTable::new();
    for u in &doc.interactions {
        if let Some(parts) = &u.components {
            for s in &parts.state {
                vars.entry(s.name.clone()).or_insert_with(|| s.clone());
            }
        }
    }
    let action = doc.interaction(unit).and_then(|u| u.label.clone()).unwrap_or_else(|| unit.to_string());
    classify_graph(registry, unit, &action, g, doc, &vars)
}
