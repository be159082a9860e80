//! Technique to graph: fills a technique's component template from the
//! unit's listener, targets and bindings.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;

use crate::compiler::features::{is_multi_scene, listener_kind, ListenerKind};
use crate::compiler::graph::{
    AppendFrom, Axis, BooleanMap, CameraOp, ChannelRule, ChartVariant, ComponentGraph, ControlOp, DataUpdateRule,
    Direction, EncodingUpdate, EvalScaleDecl, EvaluatorDecl, EvaluatorSpec, GraphParts, HitRule, LayoutPolicy,
    RuleSource, ScaleInput, Source, StateDecl, StateKind, StateUpdate, When,
};
use crate::diag::{Code, Diagnostic};
use crate::interaction::predicate::PredOp;
use crate::model::{ControlDecl, ControlKind, DocIndex, Document, EncodingDecl, FieldKind, InteractionSpec};
use crate::registry::{Registry, Scope};
use crate::scene::transform::Transform;
use crate::scene::{Channel, ChannelMap, ChannelValue, MarkShape, ObjectKind};
use crate::value::Value;

type Res<T = ()> = Result<T, Diagnostic>;

struct Inst<'a> {
    doc: &'a Document,
    idx: DocIndex<'a>,
    unit: &'a InteractionSpec,
    technique: &'a str,
    path: String,
    parts: GraphParts,
}

impl<'a> Inst<'a> {
    fn binding(&self, name: &str) -> Option<&'a serde_json::Value> {
        self.unit.bindings.get(name)
    }

    fn parse<T: DeserializeOwned>(&self, name: &str) -> Res<Option<T>> {
        match self.binding(name) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| {
                Diagnostic::error(Code::WrongKind, format!("{}/bindings/{name}", self.path), e.to_string())
            }),
        }
    }

    fn string(&self, name: &str) -> Res<Option<String>> {
        self.parse(name)
    }

    fn missing(&self, term: &str) -> Diagnostic {
        Diagnostic::error(
            Code::MissingBinding,
            format!("{}/bindings/{}", self.path, term.replace(' ', "_")),
            format!("technique `{}` has no value for `{term}`", self.technique),
        )
    }

    fn var(&self, suffix: &str) -> String {
        format!("{}_{suffix}", self.unit.name)
    }

    fn declare(&mut self, name: &str, kind: StateKind, field: Option<String>, op: Option<PredOp>) {
        if !self.parts.state.iter().any(|s| s.name == name) {
            self.parts.state.push(StateDecl { name: name.to_string(), kind, field, op, initial: None, label: None });
        }
    }

    fn set_initial(&mut self, name: &str, v: serde_json::Value) {
        if let Some(s) = self.parts.state.iter_mut().find(|s| s.name == name) {
            s.initial = Some(v);
        }
    }

    fn predicate(&mut self, field: &str, op: PredOp) -> Res<String> {
        let name = self.string("predicate")?.unwrap_or_else(|| self.var("pred"));
        self.declare(&name, StateKind::Predicate, Some(field.to_string()), Some(op));
        Ok(name)
    }

    fn update(&mut self, var: &str, from: Source, when: When) {
        self.parts.updates.push(StateUpdate { var: var.to_string(), from, when });
    }

    fn hit(&mut self, target: &str) {
        self.parts.hit = Some(HitRule { target: Some(target.to_string()) });
    }

    fn is_collection(&self, name: &str) -> bool {
        self.idx.decl(name).is_some_and(|d| d.kind == ObjectKind::Collection)
    }

    fn target_collection(&self) -> Option<String> {
        self.unit.target.iter().find(|t| self.is_collection(t)).cloned()
    }

    fn need_collection(&self) -> Res<String> {
        self.target_collection().ok_or_else(|| self.missing("target collection"))
    }

    fn listener_scene(&self) -> Option<&'a str> {
        self.idx.listener(&self.unit.on.listener).and_then(|l| l.scene())
    }

    fn control(&self) -> Option<&'a ControlDecl> {
        self.doc.control(&self.unit.on.listener).map(|(_, c)| c)
    }

    fn on_control(&self) -> bool {
        self.control().is_some()
    }

    /// Hit source on the listener's canvas: the `source` binding, else the
    /// first collection target there, else the scene's first collection.
    fn source_collection(&self) -> Res<String> {
        if let Some(s) = self.string("source")? {
            return Ok(s);
        }
        let scene = self.listener_scene().ok_or_else(|| self.missing("source"))?;
        let here = |t: &&String| self.idx.selector_scenes(t).contains(&scene);
        if let Some(t) = self.unit.target.iter().filter(|t| self.is_collection(t)).find(here) {
            return Ok(t.clone());
        }
        self.doc
            .scene(scene)
            .and_then(|s| s.objects.iter().find(|o| o.kind == ObjectKind::Collection))
            .map(|o| o.name.clone())
            .ok_or_else(|| self.missing("source"))
    }

    /// Key field of the members of `coll`.
    fn key_of(&self, coll: &str) -> String {
        let tpl = self.idx.decl(coll).and_then(|d| d.template.as_ref()).map(|t| t.name.clone());
        tpl.and_then(|t| self.idx.instance_schema(&t))
            .or_else(|| self.idx.rows_schema(coll))
            .map(|s| s.key)
            .unwrap_or_else(|| "id".into())
    }

    fn member_fields(&self, coll: &str, numeric: bool) -> Vec<String> {
        let tpl = self.idx.decl(coll).and_then(|d| d.template.as_ref()).map(|t| t.name.clone());
        let schema = tpl.and_then(|t| self.idx.instance_schema(&t)).or_else(|| self.idx.rows_schema(coll));
        schema
            .map(|s| s.fields.into_iter().filter(|f| !numeric || f.kind == FieldKind::Number).map(|f| f.name).collect())
            .unwrap_or_default()
    }

    /// Position encoding applied to the members of `coll` on `channel`.
    fn encoding_on(&self, coll: &str, channel: Channel) -> Option<&'a EncodingDecl> {
        let scene = self.idx.scene_of(coll)?;
        let tpl = self.idx.encoding_decl(coll)?.name.clone();
        scene
            .encodings
            .iter()
            .find(|e| e.channel == channel && self.idx.encoding_decl(&e.target).is_some_and(|d| d.name == tpl))
    }

    fn evaluate(&mut self, target: &str, predicate: &str) -> String {
        let name = if self.parts.evaluators.is_empty() {
            self.var("eval")
        } else {
            self.var(&format!("eval{}", self.parts.evaluators.len() + 1))
        };
        self.parts.evaluators.push(EvaluatorDecl {
            name: name.clone(),
            targets: target.to_string(),
            spec: EvaluatorSpec::Predicate { predicate: predicate.to_string() },
        });
        name
    }

    fn select_scale(&mut self, evaluator: &str) -> Res {
        let mut true_props = ChannelMap::new();
        true_props.insert(Channel::Stroke, "#000".into());
        let mut false_props = ChannelMap::new();
        false_props.insert(Channel::Opacity, 0.3.into());
        let true_props = self.parse("trueProps")?.unwrap_or(true_props);
        let false_props = self.parse("falseProps")?.unwrap_or(false_props);
        self.parts.scales.push(EvalScaleDecl {
            evaluator: evaluator.to_string(),
            input: ScaleInput::Boolean(BooleanMap { true_props, false_props }),
        });
        Ok(())
    }

    fn hide_scale(&mut self, evaluator: &str) {
        let mut false_props = ChannelMap::new();
        false_props.insert(Channel::Visible, false.into());
        self.parts.scales.push(EvalScaleDecl {
            evaluator: evaluator.to_string(),
            input: ScaleInput::Boolean(BooleanMap { true_props: ChannelMap::new(), false_props }),
        });
    }

    /// Either hides non-matching members through an evaluator, or filters
    /// the target rows (`path`: `evaluator` or `target_data`).
    fn filter_targets(&mut self, predicate: &str) -> Res {
        let path = self.string("path")?.unwrap_or_else(|| "evaluator".into());
        let targets: Vec<String> = self.unit.target.iter().filter(|t| self.is_collection(t)).cloned().collect();
        if targets.is_empty() {
            return Err(self.missing("target collection"));
        }
        for t in targets {
            match path.as_str() {
                "target_data" => self
                    .parts
                    .data
                    .push(DataUpdateRule::FilterByPredicate { target: t, predicate: predicate.to_string() }),
                "evaluator" => {
                    let e = self.evaluate(&t, predicate);
                    self.hide_scale(&e);
                }
                other => {
                    return Err(Diagnostic::error(
                        Code::WrongKind,
                        format!("{}/bindings/path", self.path),
                        format!("unknown path `{other}`, expected `evaluator` or `target_data`"),
                    ))
                }
            }
        }
        Ok(())
    }

    fn need_camera(&self, scene: &str) -> Res {
        match self.doc.scene(scene) {
            Some(s) if s.camera_enabled => Ok(()),
            _ => Err(self.missing("enable camera")),
        }
    }

    fn scene_targets(&self) -> Vec<String> {
        self.unit.target.iter().filter(|t| self.doc.scene(t).is_some()).cloned().collect()
    }

    fn view_rules(&mut self, var: &str) -> Res {
        let scenes = self.scene_targets();
        if scenes.len() < 2 {
            return Err(self.missing("views"));
        }
        let first = scenes[0].clone();
        self.set_initial(var, serde_json::Value::String(first));
        for s in scenes {
            self.parts.rules.push(ChannelRule {
                target: s,
                channel: Some(Channel::Visible),
                from: RuleSource::VarMatch { var: var.to_string(), yes: true.into(), no: false.into() },
                when: When::Always,
            });
        }
        Ok(())
    }

    /// First target carrying a transform of `op`.
    fn transform_target(&self, op: &str) -> Res<(String, &'a Transform)> {
        for t in &self.unit.target {
            if let Some(tr) = self.idx.decl(t).and_then(|d| d.transform.as_ref()) {
                if tr.op_name() == op {
                    return Ok((t.clone(), tr));
                }
            }
        }
        Err(self.missing(&format!("{op} transform")))
    }

    fn recompute(&mut self, op: &str) -> Res {
        let (target, tr) = self.transform_target(op)?;
        let var = self.var(tr.param_name());
        self.declare(&var, StateKind::Scalar, None, None);
        self.set_initial(&var, serde_json::to_value(tr.param()).expect("value serializes"));
        let from = if self.on_control() {
            Source::Control { op: ControlOp::Eq, clear_on: None }
        } else {
            match tr {
                Transform::Hierarchy { .. } => Source::Step {
                    delta: self.parse("delta")?.unwrap_or(1.0),
                    min: Some(self.parse("min")?.unwrap_or(0.0)),
                    max: self.parse("max")?,
                },
                Transform::Drill { dims, .. } => {
                    let prefixes = (1..=dims.len()).map(|n| Value::from(dims[..n].join(","))).collect();
                    Source::Cycle { values: self.parse("values")?.unwrap_or(prefixes) }
                }
                Transform::Rebase { key, .. } => {
                    self.hit(&target);
                    self.update(&var, Source::HitKey { field: Some(key.clone()) }, When::Hit);
                    self.parts.data.push(DataUpdateRule::Recompute { target, var });
                    return Ok(());
                }
                Transform::Aggregate { aggregator, .. } => {
                    let names: &[&str] = if matches!(aggregator.name(), "and" | "or") {
                        &["and", "or"]
                    } else {
                        &["sum", "mean", "min", "max"]
                    };
                    let values = names.iter().map(|s| Value::from(*s)).collect();
                    Source::Cycle { values: self.parse("values")?.unwrap_or(values) }
                }
                Transform::Bin { size, .. } => {
                    let values = vec![Value::from(*size * 2.0), Value::from(*size / 2.0), Value::from(*size)];
                    Source::Cycle { values: self.parse("values")?.unwrap_or(values) }
                }
            }
        };
        self.update(&var, from, When::Always);
        self.parts.data.push(DataUpdateRule::Recompute { target, var });
        Ok(())
    }

    fn axis(&self) -> Res<Axis> {
        Ok(self.parse("axis")?.unwrap_or(Axis::X))
    }

    fn build(&mut self) -> Res {
        let unit = self.unit;
        match self.technique {
            "point_select" | "multi_select" => {
                let t = self.need_collection()?;
                let key = self.key_of(&t);
                self.hit(&t);
                let multi = self.technique == "multi_select";
                let p = self.predicate(&key, if multi { PredOp::In } else { PredOp::Eq })?;
                let from = if multi { Source::ToggleHitKey { field: None } } else { Source::HitKey { field: None } };
                self.update(&p, from, When::Hit);
                let e = self.evaluate(&t, &p);
                self.select_scale(&e)?;
            }
            "range_select" => {
                let t = self.need_collection()?;
                let axis = self.axis()?;
                let enc = match self.string("encoding")? {
                    Some(name) => self.doc.scenes.iter().flat_map(|s| &s.encodings).find(|e| e.name == name),
                    None => self.encoding_on(&t, if axis == Axis::X { Channel::X } else { Channel::Y }),
                };
                let enc = enc.ok_or_else(|| self.missing("encoding"))?;
                let p = self.predicate(&enc.field, PredOp::Between)?;
                self.update(&p, Source::Brush { encoding: Some(enc.name.clone()), axis }, When::Always);
                let e = self.evaluate(&t, &p);
                self.select_scale(&e)?;
            }
            "generalized_select" => {
                let t = self.need_collection()?;
                let field = self.string("field")?.ok_or_else(|| self.missing("field"))?;
                self.hit(&t);
                let p = self.predicate(&field, PredOp::Eq)?;
                self.update(&p, Source::HitGroup { field }, When::Hit);
                let e = self.evaluate(&t, &p);
                self.select_scale(&e)?;
            }
            "linked_select" | "direct_walk" => {
                let src = self.source_collection()?;
                let field = self.string("field")?.unwrap_or_else(|| self.key_of(&src));
                let t = self
                    .unit
                    .target
                    .iter()
                    .find(|t| self.is_collection(t) && **t != src)
                    .cloned()
                    .ok_or_else(|| self.missing("target collection"))?;
                self.hit(&src);
                let p = self.predicate(&field, PredOp::Eq)?;
                self.update(&p, Source::HitKey { field: Some(field.clone()) }, When::Hit);
                if self.technique == "direct_walk" {
                    let scene = self.idx.scene_of(&t).map(|s| s.name.clone()).unwrap_or_default();
                    self.need_camera(&scene)?;
                    self.parts.camera.push(CameraOp::FocusHit { scene, field: Some(field) });
                }
                let e = self.evaluate(&t, &p);
                self.select_scale(&e)?;
            }
            "deselect" => {
                let t = self.need_collection()?;
                let key = self.key_of(&t);
                self.hit(&t);
                let p = self.predicate(&key, PredOp::Eq)?;
                self.update(&p, Source::Clear, When::Background);
                let e = self.evaluate(&t, &p);
                self.select_scale(&e)?;
            }
            "show_hide_reference_lines" | "show_hide_tooltip_container" => {
                let lines = self.technique == "show_hide_reference_lines";
                let is_line = |t: &String| {
                    self.idx
                        .decl(t)
                        .is_some_and(|d| d.kind == ObjectKind::Annotation && d.shape == Some(MarkShape::Line))
                };
                let is_other = |t: &String| {
                    self.idx
                        .decl(t)
                        .is_some_and(|d| d.kind == ObjectKind::Annotation && d.shape != Some(MarkShape::Line))
                };
                let ann = if lines {
                    unit.target.iter().find(|t| is_line(t))
                } else {
                    unit.target.iter().find(|t| is_other(t))
                };
                let ann = ann.cloned().ok_or_else(|| {
                    self.missing(if lines { "line annotation" } else { "tooltip annotation" })
                })?;
                let src = self.source_collection()?;
                self.hit(&src);
                let rule = |channel, from, when| ChannelRule { target: ann.clone(), channel: Some(channel), from, when };
                let present = RuleSource::HitPresent { yes: true.into(), no: false.into() };
                self.parts.rules.push(rule(Channel::Visible, present, When::Always));
                if lines {
                    let axis = self.axis()?;
                    let ch = if axis == Axis::X { Channel::X } else { Channel::Y };
                    self.parts.rules.push(rule(ch, RuleSource::HitCenter { axis, offset: 0.0 }, When::Hit));
                } else {
                    let offset = self.parse("offset")?.unwrap_or(10.0);
                    self.parts.rules.push(rule(Channel::X, RuleSource::Pointer { axis: Axis::X, offset }, When::Hit));
                    self.parts.rules.push(rule(Channel::Y, RuleSource::Pointer { axis: Axis::Y, offset }, When::Hit));
                }
            }
            "reposition" => {
                let t = self.need_collection()?;
                if self.on_control() {
                    let table: BTreeMap<String, ChannelValue> =
                        self.parse("positions")?.ok_or_else(|| self.missing("positions"))?;
                    let var = self.var("slot");
                    self.declare(&var, StateKind::Scalar, None, None);
                    self.update(&var, Source::Control { op: ControlOp::Eq, clear_on: None }, When::Always);
                    let channel = if self.axis()? == Axis::X { Channel::X } else { Channel::Y };
                    self.parts.rules.push(ChannelRule {
                        target: t,
                        channel: Some(channel),
                        from: RuleSource::VarTable { var, table },
                        when: When::Always,
                    });
                } else {
                    self.hit(&t);
                    self.parts.rules.push(ChannelRule {
                        target: "hit".into(),
                        channel: None,
                        from: RuleSource::Translate,
                        when: When::Hit,
                    });
                }
            }
            "sort" => {
                let t = self.need_collection()?;
                let var = self.var("sortBy");
                self.declare(&var, StateKind::FieldReference, None, None);
                let from = if self.on_control() {
                    Source::Control { op: ControlOp::Eq, clear_on: None }
                } else {
                    let fields: Vec<Value> = match self.parse("fields")? {
                        Some(f) => f,
                        None => self.member_fields(&t, true).into_iter().map(Value::from).collect(),
                    };
                    if fields.is_empty() {
                        return Err(self.missing("fields"));
                    }
                    Source::Cycle { values: fields }
                };
                self.update(&var, from, When::Always);
                let direction: Direction = self.parse("direction")?.unwrap_or_default();
                let channel = self.parse("channel")?.unwrap_or(Channel::X);
                self.parts.evaluators.push(EvaluatorDecl {
                    name: self.var("order"),
                    targets: t,
                    spec: EvaluatorSpec::Order { field: None, var: Some(var), direction, channel },
                });
            }
            "organize_views" => {
                if self.scene_targets().len() < 2 {
                    return Err(self.missing("views"));
                }
                self.parts.evaluators.push(EvaluatorDecl {
                    name: self.var("layout"),
                    targets: unit.on.listener.clone(),
                    spec: EvaluatorSpec::Layout { policy: LayoutPolicy::GridSwap, refs: None, field_key: None },
                });
            }
            "geometric_zoom" | "pan" => {
                let scene = self.listener_scene().ok_or_else(|| self.missing("canvas listener"))?;
                self.need_camera(scene)?;
                self.parts.camera.push(if self.technique == "pan" {
                    CameraOp::Pan { scene: None }
                } else {
                    CameraOp::Zoom { scene: None, step: self.parse("step")?.unwrap_or(1.25) }
                });
            }
            "toggle_views" => {
                let var = self.var("view");
                self.declare(&var, StateKind::Scalar, None, None);
                let from = if self.on_control() {
                    Source::Control { op: ControlOp::Eq, clear_on: None }
                } else {
                    Source::Cycle { values: self.scene_targets().into_iter().map(Value::from).collect() }
                };
                self.update(&var, from, When::Always);
                self.view_rules(&var)?;
            }
            "navigate_scene_section" => {
                let var = self.var("current");
                self.declare(&var, StateKind::ComponentReference, None, None);
                let from = if self.on_control() {
                    Source::Control { op: ControlOp::Eq, clear_on: None }
                } else {
                    let scenes = self.scene_targets();
                    let default: Vec<f64> = (1..scenes.len()).map(|i| 300.0 * i as f64).collect();
                    let thresholds = self.parse("thresholds")?.unwrap_or(default);
                    Source::Scroll { thresholds, values: scenes.into_iter().map(Value::from).collect() }
                };
                self.update(&var, from, When::Always);
                self.view_rules(&var)?;
            }
            "change_field_in_encoding" => {
                let t = self.need_collection()?;
                let enc = match self.string("encoding")? {
                    Some(e) => e,
                    None => {
                        let channel = if self.axis()? == Axis::X { Channel::X } else { Channel::Y };
                        self.encoding_on(&t, channel).map(|e| e.name.clone()).ok_or_else(|| self.missing("encoding"))?
                    }
                };
                let var = if self.on_control() {
                    None
                } else {
                    let fields: Vec<Value> = self.parse("fields")?.ok_or_else(|| self.missing("fields"))?;
                    let v = self.var("field");
                    self.declare(&v, StateKind::FieldReference, None, None);
                    self.update(&v, Source::Cycle { values: fields }, When::Always);
                    Some(v)
                };
                self.parts.encodings.push(EncodingUpdate::Field { encoding: enc, var });
            }
            "change_chart_type" => {
                let t = self.need_collection()?;
                let variants: BTreeMap<String, ChartVariant> = match self.parse("variants")? {
                    Some(v) => v,
                    None => [("bar", MarkShape::Rect), ("dot", MarkShape::Circle)]
                        .into_iter()
                        .map(|(k, shape)| (k.to_string(), ChartVariant { shape, channels: ChannelMap::new() }))
                        .collect(),
                };
                let var = self.var("chart");
                self.declare(&var, StateKind::Scalar, None, None);
                let from = if self.on_control() {
                    Source::Control { op: ControlOp::Eq, clear_on: None }
                } else {
                    Source::Cycle { values: variants.keys().map(|k| Value::from(k.as_str())).collect() }
                };
                self.update(&var, from, When::Always);
                self.parts.encodings.push(EncodingUpdate::ChartType { target: t, var, variants });
            }
            "click_to_add_data_points" => {
                let t = self.need_collection()?;
                let defaults = self.parse("defaults")?.unwrap_or_default();
                let rule = match self.control() {
                    Some(c) => {
                        let field = match self.string("field")? {
                            Some(f) => f,
                            None => c.field.clone().unwrap_or_else(|| self.key_of(&t)),
                        };
                        DataUpdateRule::AppendRow { target: t, from: AppendFrom::Control, field: Some(field), defaults }
                    }
                    None => DataUpdateRule::AppendRow { target: t, from: AppendFrom::Pointer, field: None, defaults },
                };
                self.parts.data.push(rule);
            }
            "dynamic_queries" => {
                let c = self.control().ok_or_else(|| self.missing("control listener"))?;
                let field = match self.string("field")? {
                    Some(f) => f,
                    None => c.field.clone().ok_or_else(|| self.missing("field"))?,
                };
                let (op, pop) = match c.kind {
                    ControlKind::Slider => (ControlOp::Lte, PredOp::Lte),
                    ControlKind::Checkbox => (ControlOp::Toggle, PredOp::In),
                    _ => (ControlOp::Eq, PredOp::Eq),
                };
                let op = self.parse("op")?.unwrap_or(op);
                let pop = match op {
                    ControlOp::Lte => PredOp::Lte,
                    ControlOp::Gte => PredOp::Gte,
                    ControlOp::Toggle => PredOp::In,
                    ControlOp::Eq => pop,
                };
                let p = self.predicate(&field, pop)?;
                if c.kind == ControlKind::Checkbox {
                    self.set_initial(&p, serde_json::to_value(&c.options).expect("value serializes"));
                }
                let clear_on = match self.parse("clearOn")? {
                    Some(v) => Some(v),
                    None if matches!(c.kind, ControlKind::Dropdown | ControlKind::Tab) => Some(Value::from("All")),
                    None => None,
                };
                self.update(&p, Source::Control { op, clear_on }, When::Always);
                self.filter_targets(&p)?;
            }
            "details_on_demand" => {
                let ann = unit
                    .target
                    .iter()
                    .find(|t| self.idx.decl(t).is_some_and(|d| d.kind == ObjectKind::Annotation && d.source.is_some()))
                    .cloned()
                    .ok_or_else(|| self.missing("detail annotation"))?;
                let src = self.source_collection()?;
                let field = self.string("field")?.unwrap_or_else(|| self.key_of(&src));
                self.hit(&src);
                let p = self.predicate(&field, PredOp::Eq)?;
                self.update(&p, Source::HitKey { field: Some(field) }, When::Hit);
                self.update(&p, Source::Clear, When::Background);
                self.parts.data.push(DataUpdateRule::ReplaceRows { target: ann, predicate: p });
            }
            "cross_filter" => {
                if listener_kind(self.doc, &unit.on.listener) != ListenerKind::Canvas {
                    return Err(self.missing("canvas listener"));
                }
                let src = self.source_collection()?;
                if unit.on.event.is_drag_family() {
                    let axis = self.axis()?;
                    let enc = self
                        .encoding_on(&src, if axis == Axis::X { Channel::X } else { Channel::Y })
                        .ok_or_else(|| self.missing("encoding"))?;
                    let p = self.predicate(&enc.field, PredOp::Between)?;
                    self.update(&p, Source::Brush { encoding: Some(enc.name.clone()), axis }, When::Always);
                    self.filter_targets(&p)?;
                } else {
                    let field = self.string("field")?.unwrap_or_else(|| self.key_of(&src));
                    self.hit(&src);
                    let p = self.predicate(&field, PredOp::Eq)?;
                    self.update(&p, Source::HitKey { field: Some(field) }, When::Hit);
                    self.update(&p, Source::Clear, When::Background);
                    self.filter_targets(&p)?;
                }
            }
            "move_up_down_hierarchy" => self.recompute("hierarchy")?,
            "drill_down_roll_up" => self.recompute("drill")?,
            "recompute_field_new_baseline" => self.recompute("rebase")?,
            "change_aggregator" => self.recompute("aggregate")?,
            "semantic_zoom" => {
                let scene = self.listener_scene().ok_or_else(|| self.missing("canvas listener"))?.to_string();
                self.need_camera(&scene)?;
                let (target, tr) = self.transform_target("bin")?;
                let size = tr.param().as_f64().unwrap_or(1.0);
                let var = self.var("size");
                self.declare(&var, StateKind::Scalar, None, None);
                self.set_initial(&var, serde_json::json!(size));
                self.parts.camera.push(CameraOp::Zoom { scene: None, step: self.parse("step")?.unwrap_or(1.25) });
                let thresholds = self.parse("thresholds")?.unwrap_or(vec![2.0, 4.0]);
                let default = vec![Value::from(size), Value::from(size / 2.0), Value::from(size / 4.0)];
                let values = self.parse("values")?.unwrap_or(default);
                self.update(&var, Source::ZoomLevel { scene, thresholds, values }, When::Always);
                self.parts.data.push(DataUpdateRule::Recompute { target, var });
            }
            other => {
                return Err(Diagnostic::error(
                    Code::UnknownTechnique,
                    format!("{}/technique", self.path),
                    format!("no template for technique `{other}`"),
                ))
            }
        }
        Ok(())
    }
}

/// Builds the component graph of `unit` as an instance of `technique`.
pub fn instantiate(
    registry: &Registry,
    doc: &Document,
    unit: &InteractionSpec,
    technique: &str,
) -> Result<ComponentGraph, Diagnostic> {
    let i = doc.interactions.iter().position(|u| u.name == unit.name).unwrap_or(0);
    let path = format!("/interactions/{i}");
    let sig = registry.signature_of(technique).map_err(|mut d| {
        d.path = format!("{path}/technique");
        d
    })?;
    let multi = is_multi_scene(doc, &unit.on.listener, &unit.target);
    let fits = match sig.scope {
        Scope::S => !multi,
        Scope::M => multi,
        Scope::SM => true,
    };
    if !fits {
        let want = if sig.scope == Scope::S { "a single scene" } else { "targets in other scenes" };
        return Err(Diagnostic::error(
            Code::ScopeMismatch,
            format!("{path}/target"),
            format!("technique `{}` needs {want}", sig.id),
        ));
    }
    let mut inst =
        Inst { doc, idx: DocIndex::new(doc), unit, technique: &sig.id, path, parts: GraphParts::default() };
    inst.build()?;
    Ok(ComponentGraph {
        event: unit.on.event,
        listener: unit.on.listener.clone(),
        key: unit.on.key.clone(),
        targets: unit.target.clone(),
        parts: inst.parts,
    })
}
