//! Deterministic execution of compiled interactions against event scripts.
//!
//! One [`Runtime`] owns the scene graph, cameras and state variables. Each
//! event runs every matching unit in document order through the fixed
//! step order camera, state, data, encodings, evaluators and scales, then
//! channel rules. Diffs are taken by comparing snapshots around the whole
//! event, so later units overwrite earlier ones per channel.

pub mod render;
pub mod state;
pub mod trace;

use std::collections::BTreeMap;

use crate::compiler::graph::{
    AppendFrom, Axis, CameraOp, ChannelRule, ComponentGraph, ControlOp, DataUpdateRule, EncodingUpdate,
    EvaluatorDecl, EvaluatorSpec, LayoutPolicy, RuleSource, ScaleInput, Source, StateUpdate,
};
use crate::compiler::{compile_document, CompiledInteraction};
use crate::diag::{has_errors, Code, Diagnostic};
use crate::interaction::eval_scale::{apply_evaluation_scale, restore_base, EvalResults};
use crate::interaction::evaluator::{distance_targets, evaluate_targets, order_targets};
use crate::interaction::event::{Event, EventKind, EventScript};
use crate::interaction::hit::{hit_test, HitObject};
use crate::interaction::predicate::{PredOp, Predicate};
use crate::interaction::Camera;
use crate::model::{DocIndex, Document, ListenerRef, ObjectDecl};
use crate::registry::Registry;
use crate::scene::encode::set_encoding_field;
use crate::scene::encode::diff_channels;
use crate::scene::{
    build_scene_graph, query_objects, update_object_data, Channel, ChannelValue, DataUpdate, ObjectKind, SceneGraph,
    StructuralDiff,
};
use crate::value::{Row, Value};

pub use state::{Var, VarValue};
pub use trace::{to_jsonl, StateDiff, TraceEntry};

/// Pointer travel (screen px) that turns a press into a drag.
pub const DRAG_THRESHOLD: f64 = 3.0;
/// Zoom factor of a double click.
pub const DOUBLE_CLICK_ZOOM: f64 = 2.0;
/// Largest wheel delta honoured per event.
pub const MAX_WHEEL_DELTA: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
struct Drag {
    origin: (f64, f64),
    last: (f64, f64),
    scene: Option<String>,
    hit: Option<HitObject>,
}

/// What every unit sees of the current event.
#[derive(Debug, Clone, Default)]
struct Ctx {
    kind: Option<EventKind>,
    pos: Option<(f64, f64)>,
    delta: (f64, f64),
    wheel: f64,
    scene: Option<String>,
    origin: Option<(f64, f64)>,
    hit: Option<HitObject>,
    drop_scene: Option<String>,
    key: Option<String>,
    control: Option<String>,
    value: Option<Value>,
}

#[derive(Debug, Clone)]
pub struct Runtime {
    pub graph: SceneGraph,
    pub compiled: Vec<CompiledInteraction>,
    /// Cameras of camera-enabled scenes.
    pub cameras: BTreeMap<String, Camera>,
    pub vars: BTreeMap<String, Var>,
    /// Last processed tick.
    pub tick: Option<u64>,
    /// Cumulative scroll offset.
    pub scroll: f64,
    press: Option<(f64, f64)>,
    drag: Option<Drag>,
    pointer: Option<(f64, f64)>,
    /// Template declarations as authored, before chart-type swaps.
    templates: BTreeMap<String, ObjectDecl>,
}

impl Runtime {
    /// Compiles the document, builds the initial state and settles it.
    pub fn load(registry: &Registry, doc: &Document) -> Result<Runtime, Vec<Diagnostic>> {
        let out = compile_document(registry, doc);
        if has_errors(&out.diagnostics) {
            return Err(out.diagnostics);
        }
        Runtime::with_compiled(doc, out.interactions)
    }

    pub fn with_compiled(doc: &Document, compiled: Vec<CompiledInteraction>) -> Result<Runtime, Vec<Diagnostic>> {
        let graph = build_scene_graph(doc)?;
        let cameras = doc
            .scenes
            .iter()
            .filter(|s| s.camera_enabled)
            .map(|s| {
                let mut c = Camera::identity(s.width, s.height);
                if let Some(z) = s.min_zoom {
                    c.min_zoom = z;
                }
                if let Some(z) = s.max_zoom {
                    c.max_zoom = z;
                }
                (s.name.clone(), c)
            })
            .collect();
        let mut vars = BTreeMap::new();
        for c in &compiled {
            for s in &c.graph.parts.state {
                vars.entry(s.name.clone()).or_insert_with(|| Var::declare(s));
            }
        }
        let mut rt = Runtime {
            graph,
            compiled,
            cameras,
            vars,
            tick: None,
            scroll: 0.0,
            press: None,
            drag: None,
            pointer: None,
            templates: BTreeMap::new(),
        };
        rt.settle();
        Ok(rt)
    }

    /// Brings channels and bound rows in line with the initial state
    /// variables: row filters, evaluators and pointer-free rules.
    fn settle(&mut self) {
        let ctx = Ctx::default();
        let mut errors = Vec::new();
        for i in 0..self.compiled.len() {
            let g = self.compiled[i].graph.clone();
            for d in &g.parts.data {
                if matches!(d, DataUpdateRule::FilterByPredicate { .. } | DataUpdateRule::ReplaceRows { .. }) {
                    self.data_rule(&g, d, None, &ctx, &mut errors);
                }
            }
            for ev in &g.parts.evaluators {
                self.evaluator(&g, ev, None, &ctx, &mut errors);
            }
            for r in &g.parts.rules {
                let pointer_free = matches!(
                    r.from,
                    RuleSource::HitPresent { .. }
                        | RuleSource::VarMatch { .. }
                        | RuleSource::VarTable { .. }
                        | RuleSource::Constant { .. }
                );
                if pointer_free && r.when.is_always() {
                    self.rule(r, None, &ctx, &mut errors);
                }
            }
        }
    }

    pub fn var(&self, name: &str) -> Option<&Var> {
        self.vars.get(name)
    }

    pub fn camera(&self, scene: &str) -> Camera {
        self.cameras.get(scene).copied().unwrap_or_else(|| {
            let o = self.graph.get(scene);
            let (w, h) = o.map(|o| (o.channels.width, o.channels.height)).unwrap_or((0.0, 0.0));
            Camera::identity(w, h)
        })
    }

    /// Top-most shown scene containing page point (x, y).
    pub fn scene_at(&self, x: f64, y: f64) -> Option<String> {
        self.graph
            .doc
            .scenes
            .iter()
            .rev()
            .filter(|s| self.graph.is_shown(&s.name))
            .find(|s| {
                let c = &self.graph.objects[&s.name].channels;
                x >= c.x && x <= c.x + c.width && y >= c.y && y <= c.y + c.height
            })
            .map(|s| s.name.clone())
    }

    fn local(&self, scene: &str, (x, y): (f64, f64)) -> (f64, f64) {
        let c = &self.graph.objects[scene].channels;
        (x - c.x, y - c.y)
    }

    /// Page point to world coordinates of `scene`.
    pub fn world(&self, scene: &str, p: (f64, f64)) -> (f64, f64) {
        let (sx, sy) = self.local(scene, p);
        self.camera(scene).screen_to_world(sx, sy)
    }

    /// Hit test at a page point, optionally ignoring one subtree.
    fn hit_at(&mut self, p: (f64, f64), skip: Option<&str>) -> Option<HitObject> {
        let scene = self.scene_at(p.0, p.1)?;
        let (sx, sy) = self.local(&scene, p);
        let cam = self.camera(&scene);
        let hidden = skip.and_then(|id| self.graph.get_mut(id)).map(|o| std::mem::replace(&mut o.channels.visible, false));
        let hit = hit_test(&self.graph, &scene, &cam, sx, sy);
        if let (Some(id), Some(v)) = (skip, hidden) {
            if let Some(o) = self.graph.get_mut(id) {
                o.channels.visible = v;
            }
        }
        hit
    }

    /// Ancestor-or-self of `id` that is an instance or member of `target`.
    fn resolve_hit(&self, id: &str, target: Option<&str>) -> Option<String> {
        let Some(target) = target else { return Some(id.to_string()) };
        let mut cur = self.graph.get(id);
        while let Some(o) = cur {
            if o.decl == target {
                return Some(o.id.clone());
            }
            let parent = o.parent.as_deref().and_then(|p| self.graph.get(p));
            if parent.is_some_and(|p| p.kind == ObjectKind::Collection && p.decl == target) {
                return Some(o.id.clone());
            }
            cur = parent;
        }
        None
    }

    /// Tracks press and drag state and returns the effective event kind
    /// with its screen-space delta.
    fn gesture(&mut self, e: &Event, pos: Option<(f64, f64)>) -> (EventKind, (f64, f64)) {
        let given = (e.dx.unwrap_or(0.0), e.dy.unwrap_or(0.0));
        let explicit = e.dx.is_some() || e.dy.is_some();
        let step = |from: (f64, f64), to: Option<(f64, f64)>| match to {
            _ if explicit => given,
            Some(p) => (p.0 - from.0, p.1 - from.1),
            None => (0.0, 0.0),
        };
        match e.kind {
            EventKind::PointerDown => {
                self.press = pos;
                self.drag = None;
                (EventKind::PointerDown, (0.0, 0.0))
            }
            EventKind::PointerMove => match (&mut self.drag, self.press, pos) {
                (Some(d), _, _) => {
                    let delta = step(d.last, pos);
                    if let Some(p) = pos {
                        d.last = p;
                    }
                    (EventKind::DragMove, delta)
                }
                (None, Some(origin), Some(p)) if (p.0 - origin.0).hypot(p.1 - origin.1) >= DRAG_THRESHOLD => {
                    self.begin_drag(origin, p);
                    (EventKind::DragStart, step(origin, pos))
                }
                _ => (EventKind::PointerMove, (0.0, 0.0)),
            },
            EventKind::PointerUp => {
                self.press = None;
                match &self.drag {
                    Some(d) => (EventKind::DragEnd, step(d.last, pos)),
                    None => (EventKind::PointerUp, (0.0, 0.0)),
                }
            }
            EventKind::DragStart => {
                let p = pos.unwrap_or((0.0, 0.0));
                self.begin_drag(p, p);
                (EventKind::DragStart, given)
            }
            EventKind::DragMove | EventKind::DragEnd => {
                if self.drag.is_none() {
                    let p = pos.unwrap_or((0.0, 0.0));
                    self.begin_drag(p, p);
                }
                let d = self.drag.as_mut().expect("drag begun");
                let delta = step(d.last, pos);
                if let Some(p) = pos {
                    d.last = p;
                }
                (e.kind, delta)
            }
            k => (k, (0.0, 0.0)),
        }
    }

    fn begin_drag(&mut self, origin: (f64, f64), last: (f64, f64)) {
        let scene = self.scene_at(origin.0, origin.1);
        let hit = self.hit_at(origin, None);
        self.drag = Some(Drag { origin, last, scene, hit });
    }

    fn matches(&self, g: &ComponentGraph, ctx: &Ctx, idx: &DocIndex<'_>) -> bool {
        let Some(kind) = ctx.kind else { return false };
        if !g.event.matches(kind) {
            return false;
        }
        let keyed = matches!(kind, EventKind::KeyDown | EventKind::KeyUp);
        match (&g.key, &ctx.key) {
            (Some(k), Some(e)) if k != e => return false,
            (Some(_), None) => return false,
            (None, Some(_)) if !keyed => return false,
            _ => {}
        }
        match idx.listener(&g.listener) {
            Some(ListenerRef::Control(_, c)) => ctx.control.as_deref() == Some(c.name.as_str()),
            Some(ListenerRef::Scene(s)) => {
                ctx.control.is_none() && (!kind.is_positional() || ctx.scene.as_deref() == Some(s.name.as_str()))
            }
            Some(ListenerRef::Section(sec)) => {
                if ctx.control.is_some() {
                    return false;
                }
                match &ctx.scene {
                    None => true,
                    Some(scene) => {
                        sec == crate::model::index::ROOT_SECTION
                            || idx.doc.scene(scene).and_then(|s| s.section.as_deref()) == Some(sec)
                    }
                }
            }
            None => false,
        }
    }

    /// Processes one event and reports what changed.
    pub fn dispatch(&mut self, e: &Event) -> TraceEntry {
        if let Some(t) = self.tick {
            if e.tick <= t {
                let mut entry = TraceEntry::empty(e.tick, e.kind);
                entry.errors.push(Diagnostic::error(
                    Code::TickOrder,
                    "/events",
                    format!("tick {} does not follow tick {t}", e.tick),
                ));
                return entry;
            }
        }
        self.tick = Some(e.tick);
        let pos = if e.kind.is_positional() { e.position().or(self.pointer) } else { None };
        if e.position().is_some() {
            self.pointer = e.position();
        }
        let (kind, delta) = self.gesture(e, pos);
        if kind == EventKind::Scroll {
            self.scroll = (self.scroll + e.delta.or(e.dy).unwrap_or(0.0)).max(0.0);
        }
        let dragging = matches!(kind, EventKind::DragStart | EventKind::DragMove | EventKind::DragEnd);
        let drag = if dragging { self.drag.clone() } else { None };
        let scene = match &drag {
            Some(d) => d.scene.clone(),
            None => pos.and_then(|p| self.scene_at(p.0, p.1)),
        };
        let mut ctx = Ctx {
            kind: Some(kind),
            pos,
            delta,
            wheel: e.delta.unwrap_or(0.0).clamp(-MAX_WHEEL_DELTA, MAX_WHEEL_DELTA),
            scene,
            origin: drag.as_ref().map(|d| d.origin),
            hit: None,
            drop_scene: if kind == EventKind::DragEnd { pos.and_then(|p| self.scene_at(p.0, p.1)) } else { None },
            key: e.key.clone(),
            control: e.control.clone(),
            value: e.value.clone(),
        };
        let mut entry = TraceEntry::empty(e.tick, kind);
        let matched: Vec<usize> = {
            let idx = DocIndex::new(&self.graph.doc);
            (0..self.compiled.len()).filter(|&i| self.matches(&self.compiled[i].graph, &ctx, &idx)).collect()
        };
        if kind == EventKind::DragEnd {
            self.drag = None;
        }
        if matched.iter().any(|&i| self.compiled[i].graph.parts.hit.is_some()) {
            ctx.hit = match &drag {
                Some(d) => d.hit.clone(),
                None => pos.and_then(|p| self.hit_at(p, None)),
            };
            entry.hit = ctx.hit.as_ref().map(|h| h.object_id.clone());
        }
        let channels = self.graph.channel_snapshot();
        let vars = self.vars.clone();
        let cameras = self.cameras.clone();
        let mut data = Vec::new();
        for &i in &matched {
            entry.matched.push(self.compiled[i].unit.clone());
            let g = self.compiled[i].graph.clone();
            let unit = self.compiled[i].unit.clone();
            let mut errors = Vec::new();
            data.extend(self.run(&g, &ctx, &mut errors));
            let at = self.graph.doc.interactions.iter().position(|u| u.name == unit).unwrap_or(0);
            for mut d in errors {
                if d.path.is_empty() {
                    d.path = format!("/interactions/{at}");
                }
                entry.errors.push(d);
            }
        }
        if !data.is_empty() {
            let mut errors = Vec::new();
            for i in (0..self.compiled.len()).filter(|i| !matched.contains(i)) {
                let g = self.compiled[i].graph.clone();
                for ev in &g.parts.evaluators {
                    if !matches!(ev.spec, EvaluatorSpec::Layout { .. }) {
                        self.evaluator(&g, ev, None, &Ctx::default(), &mut errors);
                    }
                }
            }
            entry.errors.extend(errors);
        }
        entry.channel_diffs = diff_channels(&channels, &self.graph.channel_snapshot());
        entry.state_diffs = self
            .vars
            .iter()
            .filter_map(|(k, v)| {
                let old = vars.get(k)?;
                (old != v).then(|| StateDiff { var: k.clone(), old: old.value.clone(), new: v.value.clone() })
            })
            .collect();
        entry.data_diffs = data;
        entry.camera_diffs = self
            .cameras
            .iter()
            .flat_map(|(s, c)| cameras.get(s).map(|old| old.diff(c, s)).unwrap_or_default())
            .collect();
        entry
    }

    fn run(&mut self, g: &ComponentGraph, ctx: &Ctx, errors: &mut Vec<Diagnostic>) -> Vec<StructuralDiff> {
        let hit = match (&g.parts.hit, &ctx.hit) {
            (Some(rule), Some(h)) => self.resolve_hit(&h.object_id, rule.target.as_deref()),
            _ => None,
        };
        let hit = hit.as_deref();
        for op in &g.parts.camera {
            if !matches!(op, CameraOp::ShowView { .. }) {
                self.camera_op(g, op, hit, ctx, errors);
            }
        }
        for u in &g.parts.updates {
            self.update(u, hit, ctx, errors);
        }
        for op in &g.parts.camera {
            if matches!(op, CameraOp::ShowView { .. }) {
                self.camera_op(g, op, hit, ctx, errors);
            }
        }
        let mut out = Vec::new();
        for d in &g.parts.data {
            if let Some(diff) = self.data_rule(g, d, hit, ctx, errors) {
                out.push(diff);
            }
        }
        for enc in &g.parts.encodings {
            self.encoding(enc, ctx, errors);
        }
        for ev in &g.parts.evaluators {
            self.evaluator(g, ev, hit, ctx, errors);
        }
        for r in &g.parts.rules {
            self.rule(r, hit, ctx, errors);
        }
        out
    }

    fn listener_scene(&self, g: &ComponentGraph) -> Option<String> {
        DocIndex::new(&self.graph.doc).listener(&g.listener).and_then(|l| l.scene()).map(String::from)
    }

    /// World-space center of an object.
    fn center(&self, id: &str) -> Option<(f64, f64)> {
        let o = self.graph.get(id)?;
        let (cx, cy) = o.channels.center(o.shape);
        let (ox, oy) = self.graph.origin(id);
        Some((cx + ox, cy + oy))
    }

    fn camera_op(&mut self, g: &ComponentGraph, op: &CameraOp, hit: Option<&str>, ctx: &Ctx, errors: &mut Vec<Diagnostic>) {
        let Some(scene) = op.scene().map(String::from).or_else(|| self.listener_scene(g)) else { return };
        let Some(cam) = self.cameras.get(&scene).copied() else {
            errors.push(Diagnostic::error(Code::UnresolvedName, "", format!("scene `{scene}` has no camera")));
            return;
        };
        let next = match op {
            CameraOp::Pan { .. } => {
                let drag = matches!(ctx.kind, Some(EventKind::DragStart | EventKind::DragMove | EventKind::DragEnd));
                if !drag || ctx.delta == (0.0, 0.0) {
                    return;
                }
                cam.pan(ctx.delta.0, ctx.delta.1)
            }
            CameraOp::Zoom { step, .. } => {
                let factor = match ctx.kind {
                    Some(EventKind::Wheel) => step.powf(-ctx.wheel),
                    Some(EventKind::DoubleClick) => DOUBLE_CLICK_ZOOM,
                    _ => *step,
                };
                if factor == 1.0 {
                    return;
                }
                let (ax, ay) = match ctx.pos {
                    Some(p) => self.local(&scene, p),
                    None => (cam.viewport_w / 2.0, cam.viewport_h / 2.0),
                };
                match cam.zoom_at(factor, ax, ay) {
                    Ok(c) => c,
                    Err(d) => {
                        errors.push(d);
                        return;
                    }
                }
            }
            CameraOp::FocusHit { field, .. } => {
                let Some(h) = hit.and_then(|h| self.graph.get(h)) else { return };
                let v = match field {
                    Some(f) => h.datum.as_ref().and_then(|d| d.get(f)).cloned().unwrap_or_default(),
                    None => Value::from(h.key()),
                };
                let found = self.graph.descendants(&scene).into_iter().find(|id| {
                    let o = &self.graph.objects[*id];
                    let member = o.parent.as_deref().and_then(|p| self.graph.get(p)).is_some_and(|p| p.kind == ObjectKind::Collection);
                    let mine = match field {
                        Some(f) => o.datum.as_ref().and_then(|d| d.get(f)).is_some_and(|x| x.key_string() == v.key_string()),
                        None => o.key() == v.key_string(),
                    };
                    member && mine
                });
                let Some((x, y)) = found.map(String::from).and_then(|id| self.center(&id)) else { return };
                cam.focus_on(x, y)
            }
            CameraOp::ShowView { var, .. } => {
                let Some(id) = self.vars.get(var).and_then(|v| v.scalar()).map(Value::key_string) else { return };
                let Some((x, y)) = self.center(&id) else { return };
                cam.focus_on(x, y)
            }
        };
        self.cameras.insert(scene, next);
    }

    fn hit_value(&self, hit: &str, field: Option<&str>) -> Result<Value, Diagnostic> {
        let o = &self.graph.objects[hit];
        match field {
            None => Ok(Value::from(o.key())),
            Some(f) => o.datum.as_ref().and_then(|d| d.get(f)).cloned().ok_or_else(|| {
                Diagnostic::error(Code::UnresolvedVariable, "", format!("field `{f}` not present on `{hit}`"))
            }),
        }
    }

    /// Offset of the members of the collection an encoding targets.
    fn encoding_origin(&self, target: &str) -> (f64, f64) {
        let idx = DocIndex::new(&self.graph.doc);
        let decl = idx.encoding_decl(target).map(|d| d.name.clone()).unwrap_or_default();
        match self.graph.objects.values().find(|o| o.decl == decl) {
            Some(o) => self.graph.origin(&o.id),
            None => self.graph.get(target).map(|o| {
                let (x, y) = self.graph.origin(&o.id);
                (x + o.channels.x, y + o.channels.y)
            }).unwrap_or((0.0, 0.0)),
        }
    }

    fn update(&mut self, u: &StateUpdate, hit: Option<&str>, ctx: &Ctx, errors: &mut Vec<Diagnostic>) {
        if !u.when.admits(hit.is_some()) {
            return;
        }
        let Some(mut var) = self.vars.get(&u.var).cloned() else {
            errors.push(Diagnostic::error(Code::UnresolvedVariable, "", format!("unknown state variable `{}`", u.var)));
            return;
        };
        let mut hit_value = |field: &Option<String>| -> Option<Value> {
            let h = hit?;
            match self.hit_value(h, field.as_deref()) {
                Ok(v) => Some(v),
                Err(d) => {
                    errors.push(d);
                    None
                }
            }
        };
        match &u.from {
            Source::HitKey { field } => match hit_value(field) {
                Some(v) => var.assign(v),
                None => return,
            },
            Source::ToggleHitKey { field } => match hit_value(field) {
                Some(v) => var.toggle(v),
                None => return,
            },
            Source::RemoveHitKey { field } => match hit_value(field) {
                Some(v) => var.remove(&v),
                None => return,
            },
            Source::HitGroup { field } => match hit_value(&Some(field.clone())) {
                Some(v) => var.assign(v),
                None => return,
            },
            Source::Brush { encoding, axis } => {
                let (Some(origin), Some(pos), Some(scene)) = (ctx.origin, ctx.pos, ctx.scene.as_deref()) else { return };
                let (a, b) = (self.world(scene, origin), self.world(scene, pos));
                let pick = |p: (f64, f64)| if *axis == Axis::X { p.0 } else { p.1 };
                let (mut lo, mut hi) = (pick(a), pick(b));
                let Some(p) = var.value_predicate_mut() else {
                    errors.push(Diagnostic::error(Code::KindMismatch, "", format!("`{}` is not a predicate", u.var)));
                    return;
                };
                if (hi - lo).abs() < f64::EPSILON {
                    p.clear();
                } else {
                    let enc = encoding.as_ref().and_then(|n| {
                        self.graph.doc.scenes.iter().flat_map(|s| &s.encodings).find(|e| &e.name == n)
                    });
                    match enc {
                        Some(enc) => {
                            let off = self.encoding_origin(&enc.target);
                            let off = if *axis == Axis::X { off.0 } else { off.1 };
                            lo -= off;
                            hi -= off;
                            match self.graph.scales.get(&enc.scale).and_then(|s| s.brush(lo, hi)) {
                                Some((op, operand)) => {
                                    p.variable = enc.field.clone();
                                    p.op = op;
                                    p.operand = operand;
                                }
                                None => p.clear(),
                            }
                        }
                        None => {
                            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
                            *p = Predicate::between(p.variable.clone(), lo, hi);
                        }
                    }
                }
            }
            Source::Pointer { axis } => {
                let (Some(pos), Some(scene)) = (ctx.pos, ctx.scene.as_deref()) else { return };
                let w = self.world(scene, pos);
                var.assign(Value::from(if *axis == Axis::X { w.0 } else { w.1 }));
            }
            Source::Control { op, clear_on } => {
                let Some(v) = ctx.value.clone() else { return };
                if clear_on.as_ref().is_some_and(|c| c.key_string() == v.key_string()) {
                    var.clear();
                } else {
                    if let Some(p) = var.value_predicate_mut() {
                        match op {
                            ControlOp::Lte => p.op = PredOp::Lte,
                            ControlOp::Gte => p.op = PredOp::Gte,
                            ControlOp::Toggle => p.op = PredOp::In,
                            ControlOp::Eq => {}
                        }
                    }
                    match op {
                        ControlOp::Toggle => var.toggle(v),
                        _ => var.assign(v),
                    }
                }
            }
            Source::Clear => var.clear(),
            Source::Step { delta, min, max } => {
                let down = ctx.wheel < 0.0
                    || ctx.delta.1 < 0.0
                    || matches!(ctx.key.as_deref(), Some("ArrowDown" | "ArrowLeft" | "-"));
                let cur = var.scalar().and_then(Value::as_f64).unwrap_or(0.0);
                let mut next = if down { cur - delta } else { cur + delta };
                if let Some(m) = min {
                    next = next.max(*m);
                }
                if let Some(m) = max {
                    next = next.min(*m);
                }
                var.assign(Value::from(next));
            }
            Source::Cycle { values } => {
                if values.is_empty() {
                    return;
                }
                let cur = var.scalar().map(Value::key_string);
                let next = match cur.and_then(|c| values.iter().position(|v| v.key_string() == c)) {
                    Some(i) => values[(i + 1) % values.len()].clone(),
                    None => values[0].clone(),
                };
                var.assign(next);
            }
            Source::Scroll { thresholds, values } => {
                let i = thresholds.iter().filter(|t| self.scroll >= **t).count();
                if let Some(v) = values.get(i).or(values.last()) {
                    var.assign(v.clone());
                }
            }
            Source::ZoomLevel { scene, thresholds, values } => {
                let zoom = self.camera(scene).zoom;
                let i = thresholds.iter().filter(|t| zoom >= **t).count();
                if let Some(v) = values.get(i).or(values.last()) {
                    var.assign(v.clone());
                }
            }
            Source::HitObject => var.assign(hit.map(Value::from).unwrap_or_default()),
            Source::CollectionMembers { collection } => {
                var.value = VarValue::List(query_objects(&self.graph, collection).into_iter().map(Value::from).collect());
            }
            Source::Constant { value } => match value {
                serde_json::Value::Array(_) => {
                    var.value = VarValue::List(serde_json::from_value(value.clone()).unwrap_or_default());
                }
                v => var.assign(serde_json::from_value(v.clone()).unwrap_or_default()),
            },
        }
        self.vars.insert(u.var.clone(), var);
    }

    fn predicate(&self, name: &str) -> Result<Predicate, Diagnostic> {
        match self.vars.get(name) {
            None => Err(Diagnostic::error(Code::UnresolvedVariable, "", format!("unknown state variable `{name}`"))),
            Some(v) => v.predicate().cloned().ok_or_else(|| {
                Diagnostic::error(Code::KindMismatch, "", format!("`{name}` is not a predicate"))
            }),
        }
    }

    fn data_rule(
        &mut self,
        g: &ComponentGraph,
        rule: &DataUpdateRule,
        hit: Option<&str>,
        ctx: &Ctx,
        errors: &mut Vec<Diagnostic>,
    ) -> Option<StructuralDiff> {
        let update = match rule {
            DataUpdateRule::FilterByPredicate { target, predicate } | DataUpdateRule::ReplaceRows { target, predicate } => {
                let p = match self.predicate(predicate) {
                    Ok(p) => p,
                    Err(d) => {
                        errors.push(d);
                        return None;
                    }
                };
                let target = target.clone();
                if matches!(rule, DataUpdateRule::FilterByPredicate { .. }) {
                    DataUpdate::Filter { target, predicate: p }
                } else {
                    DataUpdate::Replace { target, predicate: p }
                }
            }
            DataUpdateRule::AppendRow { target, from, field, defaults } => {
                let mut row: Row = defaults.clone();
                match from {
                    AppendFrom::Control => {
                        let v = ctx.value.clone()?;
                        row.insert(field.clone()?, v);
                    }
                    AppendFrom::Pointer => {
                        let (pos, scene) = (ctx.pos?, ctx.scene.as_deref()?);
                        let (wx, wy) = self.world(scene, pos);
                        let idx = DocIndex::new(&self.graph.doc);
                        let tpl = idx.encoding_decl(target).map(|d| d.name.clone());
                        let s = idx.scene_of(target)?;
                        let (ox, oy) = self.encoding_origin(target);
                        for e in &s.encodings {
                            if idx.encoding_decl(&e.target).map(|d| d.name.clone()) != tpl || e.band {
                                continue;
                            }
                            let px = match e.channel {
                                Channel::X => wx - ox,
                                Channel::Y => wy - oy,
                                _ => continue,
                            };
                            if let Some(v) = self.graph.scales.get(&e.scale).and_then(|sc| sc.invert(px)) {
                                row.insert(e.field.clone(), Value::from((v * 1000.0).round() / 1000.0));
                            }
                        }
                    }
                }
                DataUpdate::Append { target: target.clone(), row }
            }
            DataUpdateRule::Recompute { target, var } => {
                let v = self.vars.get(var)?.scalar()?.clone();
                let current = DocIndex::new(&self.graph.doc).decl(target)?.transform.as_ref()?.param();
                if current.key_string() == v.key_string() {
                    return None;
                }
                DataUpdate::SetParam { target: target.clone(), value: v }
            }
            DataUpdateRule::Nest { target, parent_field, level_field } => {
                let origin = self.resolve_hit(&ctx.hit.as_ref()?.object_id, g.parts.hit.as_ref()?.target.as_deref())?;
                let _ = hit;
                let drop = self.hit_at(ctx.pos?, Some(&origin))?;
                let b = self.resolve_hit(&drop.object_id, Some(target))?;
                let a = self.resolve_hit(&origin, Some(target))?;
                let (ka, kb) = (self.graph.objects[&a].key().to_string(), self.graph.objects[&b].key().to_string());
                DataUpdate::Nest {
                    target: target.clone(),
                    a: ka,
                    b: kb,
                    parent_field: parent_field.clone(),
                    level_field: level_field.clone(),
                }
            }
        };
        match update_object_data(&mut self.graph, &update) {
            Ok(d) if d.is_empty() => None,
            Ok(d) => Some(d),
            Err(d) => {
                errors.push(d);
                None
            }
        }
    }

    fn encoding(&mut self, enc: &EncodingUpdate, ctx: &Ctx, errors: &mut Vec<Diagnostic>) {
        match enc {
            EncodingUpdate::Field { encoding, var } => {
                let field = match var {
                    Some(v) => self.vars.get(v).and_then(|v| v.scalar()).and_then(Value::as_str).map(String::from),
                    None => ctx.value.as_ref().and_then(Value::as_str).map(String::from),
                };
                let Some(field) = field else { return };
                let current = self.graph.doc.scenes.iter().flat_map(|s| &s.encodings).find(|e| &e.name == encoding);
                if current.is_some_and(|e| e.field == field) {
                    return;
                }
                if let Err(d) = set_encoding_field(&mut self.graph, encoding, &field) {
                    errors.push(d);
                }
            }
            EncodingUpdate::ChartType { target, var, variants } => {
                let Some(key) = self.vars.get(var).and_then(|v| v.scalar()).map(Value::key_string) else { return };
                let Some(variant) = variants.get(&key) else { return };
                let idx = DocIndex::new(&self.graph.doc);
                let Some(tpl) = idx.decl(target).and_then(|d| d.template.as_deref()).cloned() else { return };
                let original = self.templates.entry(tpl.name.clone()).or_insert(tpl).clone();
                let Some(decl) = self.graph.decl_mut(&original.name) else { return };
                decl.shape = Some(variant.shape);
                decl.channels = original.channels.clone();
                decl.channels.extend(variant.channels.clone());
                let top = self.graph.top_of(target).unwrap_or_else(|| target.clone());
                if let Err(mut d) = self.graph.rebuild(&top) {
                    errors.push(d.remove(0));
                }
            }
        }
    }

    fn evaluator(&mut self, g: &ComponentGraph, ev: &EvaluatorDecl, hit: Option<&str>, ctx: &Ctx, errors: &mut Vec<Diagnostic>) {
        let targets = query_objects(&self.graph, &ev.targets);
        let scales: Vec<ScaleInput> =
            g.parts.scales.iter().filter(|s| s.evaluator == ev.name).map(|s| s.input.clone()).collect();
        let restore = |rt: &mut Runtime| {
            for s in &scales {
                restore_base(&mut rt.graph, &targets, &touched(s));
            }
        };
        let results = match &ev.spec {
            EvaluatorSpec::Predicate { predicate } => {
                let p = match self.predicate(predicate) {
                    Ok(p) => p,
                    Err(d) => return errors.push(d),
                };
                if p.is_cleared() {
                    return restore(self);
                }
                let objs: Vec<_> = targets.iter().filter_map(|id| self.graph.get(id)).collect();
                match evaluate_targets(&objs, &p) {
                    Ok(r) => EvalResults::Bool(r),
                    Err(d) => return errors.push(d),
                }
            }
            EvaluatorSpec::Order { field, var, direction, channel } => {
                let by = match var {
                    Some(v) => self.vars.get(v).and_then(|v| v.scalar()).and_then(Value::as_str).map(String::from),
                    None => field.clone(),
                };
                let Some(by) = by else { return };
                let objs: Vec<_> = targets.iter().filter_map(|id| self.graph.get(id)).collect();
                let perm = match order_targets(&objs, &by, *direction) {
                    Ok(p) => p,
                    Err(d) => return errors.push(d),
                };
                let results = EvalResults::Rank(perm);
                if scales.is_empty() {
                    if let Err(d) = apply_evaluation_scale(&mut self.graph, &results, &ScaleInput::Rank { channel: *channel }, &targets) {
                        errors.push(d);
                    }
                    return;
                }
                results
            }
            EvaluatorSpec::Distance { metric, anchor } => {
                let anchor_id = if anchor == "hit" {
                    hit.map(String::from)
                } else {
                    self.vars.get(anchor).and_then(|v| v.scalar()).map(Value::key_string).and_then(|k| {
                        targets.iter().find(|id| self.graph.objects[*id].key() == k).cloned()
                    })
                };
                let Some(a) = anchor_id else { return restore(self) };
                let centers: Vec<(f64, f64)> = targets.iter().map(|id| self.center(id).unwrap_or_default()).collect();
                match distance_targets(&targets, &centers, *metric, &a, None) {
                    Ok(d) => EvalResults::Number(d),
                    Err(d) => return errors.push(d),
                }
            }
            EvaluatorSpec::Layout { policy: LayoutPolicy::GridSwap, .. } => {
                return self.grid_swap(g, ctx);
            }
            EvaluatorSpec::Layout { policy: LayoutPolicy::Attraction, refs, field_key } => {
                return self.attract(&targets, refs.as_deref(), field_key.as_deref());
            }
        };
        for s in &scales {
            if let Err(d) = apply_evaluation_scale(&mut self.graph, &results, s, &targets) {
                errors.push(d);
            }
        }
    }

    /// Dropping one view onto another swaps their positions.
    fn grid_swap(&mut self, g: &ComponentGraph, ctx: &Ctx) {
        if ctx.kind != Some(EventKind::DragEnd) {
            return;
        }
        let (Some(a), Some(b)) = (ctx.scene.clone(), ctx.drop_scene.clone()) else { return };
        let views: Vec<&String> = g.targets.iter().filter(|t| self.graph.doc.scene(t).is_some()).collect();
        if a == b || !views.contains(&&a) || !views.contains(&&b) {
            return;
        }
        let pa = self.graph.objects[&a].channels.clone();
        let pb = self.graph.objects[&b].channels.clone();
        for (id, p) in [(&a, &pb), (&b, &pa)] {
            let o = self.graph.get_mut(id).expect("scene object");
            o.channels.x = p.x;
            o.channels.y = p.y;
        }
    }

    /// Each target moves from its encoded position toward the magnets,
    /// weighted by its value in each magnet's field relative to the
    /// largest such value: p = (b + sum w_m c_m) / (1 + sum w_m).
    fn attract(&mut self, targets: &[String], refs: Option<&str>, field_key: Option<&str>) {
        let Some(refs) = refs.and_then(|r| self.vars.get(r)) else { return };
        let magnets: Vec<(String, (f64, f64))> = refs
            .list()
            .iter()
            .filter_map(|id| {
                let id = id.key_string();
                let o = self.graph.get(&id)?;
                let field = match field_key {
                    Some(k) => o.datum.as_ref()?.get(k)?.as_str()?.to_string(),
                    None => o.key().to_string(),
                };
                Some((field, self.center(&id)?))
            })
            .collect();
        let value = |rt: &Runtime, id: &str, f: &str| {
            rt.graph.get(id).and_then(|o| o.datum.as_ref()).and_then(|d| d.get(f)).and_then(Value::as_f64).unwrap_or(0.0)
        };
        let peaks: Vec<f64> = magnets
            .iter()
            .map(|(f, _)| targets.iter().map(|t| value(self, t, f).abs()).fold(0.0, f64::max))
            .collect();
        for t in targets {
            let Some(o) = self.graph.get(t) else { continue };
            let (bx, by) = o.base.center(o.shape);
            let (ox, oy) = self.graph.origin(t);
            let (bx, by) = (bx + ox, by + oy);
            let (mut sx, mut sy, mut sw) = (bx, by, 1.0);
            for ((f, (cx, cy)), peak) in magnets.iter().zip(&peaks) {
                if *peak > 0.0 {
                    let w = (value(self, t, f) / peak).max(0.0);
                    sx += w * cx;
                    sy += w * cy;
                    sw += w;
                }
            }
            let (nx, ny) = (sx / sw, sy / sw);
            let o = self.graph.get_mut(t).expect("target exists");
            let (x, y) = (o.base.x + nx - bx, o.base.y + ny - by);
            o.channels.set(Channel::X, &x.into());
            o.channels.set(Channel::Y, &y.into());
        }
    }

    fn rule(&mut self, r: &ChannelRule, hit: Option<&str>, ctx: &Ctx, errors: &mut Vec<Diagnostic>) {
        if !r.when.admits(hit.is_some()) {
            return;
        }
        let targets: Vec<String> = if r.target == "hit" {
            hit.map(String::from).into_iter().collect()
        } else {
            query_objects(&self.graph, &r.target)
        };
        if let RuleSource::Translate = r.from {
            let drag = matches!(ctx.kind, Some(EventKind::DragStart | EventKind::DragMove | EventKind::DragEnd));
            if !drag {
                return;
            }
            for t in targets {
                let zoom = self.graph.get(&t).and_then(|o| o.scene.clone()).map(|s| self.camera(&s).zoom).unwrap_or(1.0);
                let o = self.graph.get_mut(&t).expect("target exists");
                let (x, y) = (o.channels.x + ctx.delta.0 / zoom, o.channels.y + ctx.delta.1 / zoom);
                o.channels.set(Channel::X, &x.into());
                o.channels.set(Channel::Y, &y.into());
            }
            return;
        }
        let Some(channel) = r.channel else {
            errors.push(Diagnostic::error(Code::KindMismatch, "", format!("rule on `{}` names no channel", r.target)));
            return;
        };
        let var_key = |rt: &Runtime, var: &str| rt.vars.get(var).and_then(|v| v.scalar()).map(Value::key_string);
        for t in targets {
            let value: Option<ChannelValue> = match &r.from {
                RuleSource::Pointer { axis, offset } => {
                    let (Some(pos), Some(scene)) = (ctx.pos, ctx.scene.as_deref()) else { return };
                    let w = self.world(scene, pos);
                    let o = self.graph.origin(&t);
                    Some(if *axis == Axis::X { w.0 - o.0 + offset } else { w.1 - o.1 + offset }.into())
                }
                RuleSource::HitCenter { axis, offset } => {
                    let Some(c) = hit.and_then(|h| self.center(h)) else { return };
                    let o = self.graph.origin(&t);
                    Some(if *axis == Axis::X { c.0 - o.0 + offset } else { c.1 - o.1 + offset }.into())
                }
                RuleSource::HitPresent { yes, no } => Some(if hit.is_some() { yes.clone() } else { no.clone() }),
                RuleSource::VarMatch { var, yes, no } => {
                    let o = &self.graph.objects[&t];
                    let m = var_key(self, var).is_some_and(|v| v == o.id || v == o.key());
                    Some(if m { yes.clone() } else { no.clone() })
                }
                RuleSource::VarTable { var, table } => var_key(self, var).and_then(|k| table.get(&k).cloned()),
                RuleSource::Constant { value } => Some(value.clone()),
                RuleSource::Translate => None,
            };
            let Some(v) = value else { continue };
            let o = self.graph.get_mut(&t).expect("target exists");
            if o.channels.set(channel, &v).is_none() {
                errors.push(Diagnostic::error(
                    Code::KindMismatch,
                    "",
                    format!("channel `{}` cannot take `{}`", channel.name(), v.to_value()),
                ));
            }
        }
    }

    /// SVG of one scene in its current state.
    pub fn render_svg(&self, scene: &str) -> Result<String, Diagnostic> {
        render::render_scene(self, scene)
    }

    /// SVG of every shown scene at its page position.
    pub fn render_page(&self) -> String {
        render::render_page(self)
    }
}

/// Channels an evaluation scale writes.
fn touched(s: &ScaleInput) -> Vec<Channel> {
    let mut out: Vec<Channel> = match s {
        ScaleInput::Boolean(m) => m.true_props.keys().chain(m.false_props.keys()).copied().collect(),
        ScaleInput::Number(m) => m.channels.keys().copied().collect(),
        ScaleInput::Rank { channel } => vec![*channel],
    };
    out.sort();
    out.dedup();
    out
}

impl Var {
    fn value_predicate_mut(&mut self) -> Option<&mut Predicate> {
        match &mut self.value {
            VarValue::Predicate(p) => Some(p),
            _ => None,
        }
    }
}

/// Runs a whole script from a freshly loaded state.
pub fn run_script(registry: &Registry, doc: &Document, script: &EventScript) -> Result<(Runtime, Vec<TraceEntry>), Vec<Diagnostic>> {
    let problems = script.check();
    if has_errors(&problems) {
        return Err(problems);
    }
    let mut rt = Runtime::load(registry, doc)?;
    let entries = script.events.iter().map(|e| rt.dispatch(e)).collect();
    Ok((rt, entries))
}
