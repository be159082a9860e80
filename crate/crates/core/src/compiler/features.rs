//! Structural facts about a component graph: which components it holds and
//! how they are wired. Classification and signature checks read only these,
//! so renaming objects or fields never changes the outcome.

use std::collections::{BTreeMap, BTreeSet};

use crate::compiler::graph::{
    AppendFrom, CameraOp, ComponentGraph, DataUpdateRule, EncodingUpdate, EvaluatorSpec, LayoutPolicy, RuleSource,
    ScaleInput, Source, StateDecl, StateKind,
};
use crate::interaction::event::Trigger;
use crate::model::{ControlKind, DocIndex, Document, ListenerRef};
use crate::registry::{Component, ComponentKind};
use crate::scene::{Channel, ChannelValue, MarkShape, ObjectKind};

/// State declarations visible to a graph, by name.
pub type VarTable = BTreeMap<String, StateDecl>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListenerKind {
    Canvas,
    Control(ControlKind),
    Section,
    Unknown,
}

#[derive(Debug, Clone, Default)]
pub struct Features {
    pub present: BTreeSet<Component>,
    pub multi: bool,
    pub canvas: bool,
    pub control: bool,
    pub trigger: Option<Trigger>,
    pub pred_sources: BTreeSet<&'static str>,
    pub var_sources: BTreeSet<&'static str>,
    pub evaluators: BTreeSet<&'static str>,
    pub layouts: BTreeSet<LayoutPolicy>,
    /// A boolean evaluation scale hides the false side.
    pub hides: bool,
    pub camera_ops: BTreeSet<&'static str>,
    pub data_ops: BTreeSet<String>,
    pub encoding_ops: BTreeSet<&'static str>,
    pub line_annotation_rule: bool,
    pub other_annotation_rule: bool,
    pub position_rule: bool,
    pub view_switch_rule: bool,
}

impl Features {
    pub fn has(&self, kind: ComponentKind) -> bool {
        self.present.iter().any(|c| c.kind == kind)
    }

    pub fn pred(&self, source: &str) -> bool {
        self.pred_sources.contains(source)
    }

    pub fn var(&self, source: &str) -> bool {
        self.var_sources.contains(source)
    }

    pub fn data(&self, op: &str) -> bool {
        self.data_ops.contains(op)
    }

    pub fn filters(&self) -> bool {
        self.hides || self.data("filter_by_predicate")
    }
}

/// Names of every state variable a graph reads or writes.
pub fn referenced_vars(g: &ComponentGraph) -> BTreeSet<String> {
    let p = &g.parts;
    let mut out: BTreeSet<String> = p.state.iter().map(|s| s.name.clone()).collect();
    out.extend(p.updates.iter().map(|u| u.var.clone()));
    for e in &p.evaluators {
        match &e.spec {
            EvaluatorSpec::Predicate { predicate } => {
                out.insert(predicate.clone());
            }
            EvaluatorSpec::Order { var: Some(v), .. } | EvaluatorSpec::Layout { refs: Some(v), .. } => {
                out.insert(v.clone());
            }
            EvaluatorSpec::Distance { anchor, .. } if anchor != "hit" => {
                out.insert(anchor.clone());
            }
            _ => {}
        }
    }
    for d in &p.data {
        match d {
            DataUpdateRule::FilterByPredicate { predicate, .. } | DataUpdateRule::ReplaceRows { predicate, .. } => {
                out.insert(predicate.clone());
            }
            DataUpdateRule::Recompute { var, .. } => {
                out.insert(var.clone());
            }
            _ => {}
        }
    }
    for e in &p.encodings {
        match e {
            EncodingUpdate::Field { var: Some(v), .. } | EncodingUpdate::ChartType { var: v, .. } => {
                out.insert(v.clone());
            }
            _ => {}
        }
    }
    for c in &p.camera {
        if let CameraOp::ShowView { var, .. } = c {
            out.insert(var.clone());
        }
    }
    for r in &p.rules {
        if let RuleSource::VarMatch { var, .. } | RuleSource::VarTable { var, .. } = &r.from {
            out.insert(var.clone());
        }
    }
    out
}

/// The graph's own declarations first, then `outer`.
pub fn var_kind(g: &ComponentGraph, outer: &VarTable, name: &str) -> Option<StateKind> {
    g.parts.state.iter().find(|s| s.name == name).map(|s| s.kind).or_else(|| outer.get(name).map(|s| s.kind))
}

/// S or M: targets span two scenes, or sit outside the listener's scene.
pub fn is_multi_scene(doc: &Document, listener: &str, targets: &[String]) -> bool {
    let idx = DocIndex::new(doc);
    let mut scenes: BTreeSet<&str> = BTreeSet::new();
    for t in targets {
        scenes.extend(idx.selector_scenes(t));
    }
    if scenes.len() >= 2 {
        return true;
    }
    match idx.listener(listener).and_then(|l| l.scene()) {
        Some(l) => !scenes.is_empty() && !scenes.contains(l),
        None => false,
    }
}

pub fn listener_kind(doc: &Document, listener: &str) -> ListenerKind {
    match DocIndex::new(doc).listener(listener) {
        Some(ListenerRef::Scene(_)) => ListenerKind::Canvas,
        Some(ListenerRef::Control(_, c)) => ListenerKind::Control(c.kind),
        Some(ListenerRef::Section(_)) => ListenerKind::Section,
        None => ListenerKind::Unknown,
    }
}

fn mouse_source(s: &Source) -> bool {
    matches!(s, Source::Brush { .. } | Source::Pointer { .. } | Source::Scroll { .. })
}

pub fn extract(g: &ComponentGraph, doc: &Document, outer: &VarTable) -> Features {
    let idx = DocIndex::new(doc);
    let p = &g.parts;
    let mut f = Features { trigger: Some(g.event), ..Default::default() };
    let add = |f: &mut Features, c: Component| {
        f.present.insert(c);
    };
    f.multi = is_multi_scene(doc, &g.listener, &g.targets);
    match listener_kind(doc, &g.listener) {
        ListenerKind::Canvas | ListenerKind::Section => f.canvas = true,
        ListenerKind::Control(_) => f.control = true,
        ListenerKind::Unknown => {}
    }
    if p.hit.is_some() {
        add(&mut f, Component::plain(ComponentKind::HitObject));
    }
    for v in referenced_vars(g) {
        let kind = match var_kind(g, outer, &v) {
            Some(StateKind::Predicate) => ComponentKind::Predicate,
            Some(StateKind::FieldReference) => ComponentKind::FieldReference,
            Some(StateKind::ComponentReference) => ComponentKind::ComponentReference,
            Some(StateKind::Scalar) => ComponentKind::StateVariable,
            None => continue,
        };
        add(&mut f, Component::plain(kind));
    }
    for u in &p.updates {
        if mouse_source(&u.from) {
            add(&mut f, Component::plain(ComponentKind::MouseParams));
        }
        if var_kind(g, outer, &u.var) == Some(StateKind::Predicate) {
            f.pred_sources.insert(u.from.kind_name());
        } else {
            f.var_sources.insert(u.from.kind_name());
        }
    }
    for e in &p.evaluators {
        add(&mut f, Component::qualified(ComponentKind::Evaluator, e.spec.kind_name()));
        f.evaluators.insert(e.spec.kind_name());
        if let EvaluatorSpec::Layout { policy, .. } = &e.spec {
            f.layouts.insert(*policy);
            if *policy == LayoutPolicy::GridSwap {
                add(&mut f, Component::plain(ComponentKind::MouseParams));
            }
        }
    }
    for s in &p.scales {
        add(&mut f, Component::plain(ComponentKind::EvaluationScale));
        if let ScaleInput::Boolean(m) = &s.input {
            if m.false_props.get(&Channel::Visible) == Some(&ChannelValue::Bool(false)) {
                f.hides = true;
            }
        }
    }
    for c in &p.camera {
        add(&mut f, Component::plain(ComponentKind::Camera));
        if matches!(c, CameraOp::Pan { .. } | CameraOp::Zoom { .. }) {
            add(&mut f, Component::plain(ComponentKind::MouseParams));
        }
        f.camera_ops.insert(c.kind_name());
    }
    for d in &p.data {
        add(&mut f, Component::plain(ComponentKind::TargetData));
        match d {
            DataUpdateRule::AppendRow { from: AppendFrom::Pointer, .. } => {
                add(&mut f, Component::plain(ComponentKind::MouseParams));
            }
            DataUpdateRule::Recompute { target, .. } => {
                if let Some(t) = idx.decl(target).and_then(|d| d.transform.as_ref()) {
                    f.data_ops.insert(format!("recompute:{}", t.op_name()));
                }
            }
            _ => {}
        }
        f.data_ops.insert(d.kind_name().to_string());
    }
    for e in &p.encodings {
        add(&mut f, Component::plain(ComponentKind::Encoding));
        add(&mut f, Component::plain(ComponentKind::Scale));
        f.encoding_ops.insert(e.kind_name());
    }
    for r in &p.rules {
        if matches!(r.from, RuleSource::Pointer { .. } | RuleSource::Translate) {
            add(&mut f, Component::plain(ComponentKind::MouseParams));
        }
        let decl = idx.decl(&r.target);
        let annotation = decl.filter(|d| d.kind == ObjectKind::Annotation);
        match annotation {
            Some(a) if a.shape == Some(MarkShape::Line) => f.line_annotation_rule = true,
            Some(_) => f.other_annotation_rule = true,
            None => {
                let positional = matches!(r.channel, Some(Channel::X | Channel::Y))
                    && matches!(r.from, RuleSource::Pointer { .. } | RuleSource::VarTable { .. });
                if positional || r.from == RuleSource::Translate {
                    f.position_rule = true;
                }
            }
        }
        let is_view = doc.scene(&r.target).is_some() || idx.is_section(&r.target);
        if is_view && matches!(r.from, RuleSource::VarMatch { .. }) {
            f.view_switch_rule = true;
        }
    }
    f
}
