//! The live scene graph built from a document: one [`VisualObject`] per
//! section, scene, collection, member, glyph part, axis, legend and
//! annotation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::diag::{Code, Diagnostic};
use crate::interaction::predicate::{eval_predicate, Predicate, Subject};
use crate::model::index::{DocIndex, Role, ROOT_SECTION};
use crate::model::{Document, EncodingDecl, InitialData, ObjectDecl};
use crate::scene::{ChannelSet, MarkShape, ObjectKind, Scale};
use crate::value::{Row, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisualObject {
    pub id: String,
    pub kind: ObjectKind,
    /// Declaration this object instantiates (scene or section name for
    /// those kinds).
    pub decl: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<MarkShape>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scene: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datum: Option<Row>,
    pub channels: ChannelSet,
    /// Channels as encoded, before any interaction touched them.
    #[serde(skip)]
    pub base: ChannelSet,
}

impl VisualObject {
    fn new(id: String, kind: ObjectKind, decl: &str) -> Self {
        VisualObject {
            id,
            kind,
            decl: decl.to_string(),
            shape: None,
            scene: None,
            parent: None,
            children: Vec::new(),
            datum: None,
            channels: ChannelSet::default(),
            base: ChannelSet::default(),
        }
    }

    /// Row key of a collection member: the last id segment.
    pub fn key(&self) -> &str {
        self.id.rsplit('/').next().unwrap_or(&self.id)
    }
}

/// Ids (added, removed, updated) by a subtree rebuild.
pub type Rebuilt = (Vec<String>, Vec<String>, Vec<String>);

/// Which rows a scene-level collection or sourced annotation binds.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum RowMode {
    #[default]
    All,
    /// Rows satisfying the predicate; a cleared predicate keeps every row.
    Filter(Predicate),
    /// Rows satisfying the predicate; a cleared predicate keeps none.
    Replace(Predicate),
}

#[derive(Debug, Clone)]
pub struct SceneGraph {
    pub doc: Document,
    pub objects: BTreeMap<String, VisualObject>,
    pub scales: BTreeMap<String, Scale>,
    /// Current table contents; appends and nesting mutate these.
    pub tables: BTreeMap<String, Vec<Row>>,
    /// Row modes keyed by scene-level declaration name.
    pub modes: BTreeMap<String, RowMode>,
}

/// Builds the initial scene graph. Encoding failures (unknown field, value
/// outside a scale's domain, non-numeric value) are errors.
pub fn build_scene_graph(doc: &Document) -> Result<SceneGraph, Vec<Diagnostic>> {
    let mut scales = BTreeMap::new();
    let mut diags = Vec::new();
    for (i, def) in doc.scales.iter().enumerate() {
        match Scale::resolve(def, doc) {
            Ok(s) => {
                scales.insert(def.name.clone(), s);
            }
            Err(mut d) => {
                d.path = format!("/scales/{i}/domain");
                diags.push(d);
            }
        }
    }
    let tables = doc.data.iter().map(|t| (t.name.clone(), t.rows.clone())).collect();
    let mut g = SceneGraph { doc: doc.clone(), objects: BTreeMap::new(), scales, tables, modes: BTreeMap::new() };
    diags.extend(g.build_all());
    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok(g)
    }
}

impl SceneGraph {
    pub fn get(&self, id: &str) -> Option<&VisualObject> {
        self.objects.get(id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut VisualObject> {
        self.objects.get_mut(id)
    }

    /// Depth-first ids from the root; siblings follow their `order`
    /// channel (stable), so this is also paint order.
    pub fn paint_order(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.objects.len());
        self.walk(ROOT_SECTION, &mut out);
        out
    }

    fn walk<'a>(&'a self, id: &str, out: &mut Vec<&'a str>) {
        let Some(o) = self.objects.get(id) else { return };
        out.push(&o.id);
        let mut kids: Vec<&VisualObject> = o.children.iter().filter_map(|c| self.objects.get(c)).collect();
        kids.sort_by_key(|k| k.channels.order);
        for k in kids {
            self.walk(&k.id, out);
        }
    }

    /// Every descendant of `id` (excluding itself), in paint order.
    pub fn descendants(&self, id: &str) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(id, &mut out);
        if !out.is_empty() {
            out.remove(0);
        }
        out
    }

    /// Sum of the x/y offsets of collection and glyph ancestors.
    pub fn origin(&self, id: &str) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        let mut cur = self.objects.get(id).and_then(|o| o.parent.clone());
        while let Some(p) = cur {
            let Some(o) = self.objects.get(&p) else { break };
            if matches!(o.kind, ObjectKind::Collection | ObjectKind::Glyph) {
                x += o.channels.x;
                y += o.channels.y;
            }
            cur = o.parent.clone();
        }
        (x, y)
    }

    /// Nearest ancestor-or-self that is a member of an instance of the
    /// collection declaration `coll`.
    pub fn member_of(&self, id: &str, coll: &str) -> Option<&str> {
        let mut cur = self.objects.get(id);
        while let Some(o) = cur {
            let parent = o.parent.as_deref().and_then(|p| self.objects.get(p));
            if let Some(p) = parent {
                if p.kind == ObjectKind::Collection && p.decl == coll {
                    return Some(&o.id);
                }
            }
            cur = parent;
        }
        None
    }

    /// Whether the object and all its ancestors are visible.
    pub fn is_shown(&self, id: &str) -> bool {
        let mut cur = self.objects.get(id);
        while let Some(o) = cur {
            if !o.channels.visible {
                return false;
            }
            cur = o.parent.as_deref().and_then(|p| self.objects.get(p));
        }
        true
    }

    pub fn channel_snapshot(&self) -> BTreeMap<String, ChannelSet> {
        self.objects.iter().map(|(k, o)| (k.clone(), o.channels.clone())).collect()
    }

    fn build_all(&mut self) -> Vec<Diagnostic> {
        self.objects.clear();
        let mut root = VisualObject::new(ROOT_SECTION.into(), ObjectKind::Section, ROOT_SECTION);
        root.channels.fill = "none".into();
        self.objects.insert(ROOT_SECTION.into(), root);
        let scenes = self.doc.scenes.clone();
        let mut diags = Vec::new();
        for s in &scenes {
            let section = s.section.clone().unwrap_or_else(|| ROOT_SECTION.to_string());
            if !self.objects.contains_key(&section) {
                let mut sec = VisualObject::new(section.clone(), ObjectKind::Section, &section);
                sec.parent = Some(ROOT_SECTION.into());
                sec.channels.fill = "none".into();
                self.objects.insert(section.clone(), sec);
                self.push_child(ROOT_SECTION, &section);
            }
            let mut so = VisualObject::new(s.name.clone(), ObjectKind::Scene, &s.name);
            so.scene = Some(s.name.clone());
            so.parent = Some(section.clone());
            so.channels.x = s.x;
            so.channels.y = s.y;
            so.channels.width = s.width;
            so.channels.height = s.height;
            so.channels.fill = "none".into();
            so.channels.visible = !s.hidden;
            so.base = so.channels.clone();
            self.objects.insert(s.name.clone(), so);
            self.push_child(&section, &s.name);
            for o in &s.objects {
                match self.build_top(&o.name) {
                    Ok(objs) => {
                        self.push_child(&s.name, &o.name);
                        self.objects.extend(objs);
                    }
                    Err(d) => diags.extend(d),
                }
            }
        }
        diags
    }

    fn push_child(&mut self, parent: &str, child: &str) {
        if let Some(p) = self.objects.get_mut(parent) {
            if !p.children.iter().any(|c| c == child) {
                p.children.push(child.to_string());
            }
        }
    }

    /// Builds the subtree of a scene-level declaration without touching the
    /// graph.
    fn build_top(&self, name: &str) -> Result<BTreeMap<String, VisualObject>, Vec<Diagnostic>> {
        let idx = DocIndex::new(&self.doc);
        let info = idx.info(name).ok_or_else(|| {
            vec![Diagnostic::error(Code::UnresolvedName, "", format!("unknown declaration `{name}`"))]
        })?;
        let scene = &self.doc.scenes[info.scene];
        let mut b = Builder {
            idx: &idx,
            scales: &self.scales,
            scene_index: info.scene,
            scene: &scene.name,
            encodings: &scene.encodings,
            out: BTreeMap::new(),
            diags: Vec::new(),
        };
        let decl = info.decl;
        match decl.kind {
            ObjectKind::Collection => {
                let rows = self.top_rows(&idx, name, &mut b.diags);
                b.collection(decl, name.to_string(), &scene.name, None, rows);
            }
            ObjectKind::Annotation if decl.source.is_some() => {
                let rows = self.top_rows(&idx, name, &mut b.diags);
                let mut o = b.leaf(decl, name.to_string(), &scene.name, rows.first().cloned());
                if let Some(f) = &decl.field {
                    let text: Vec<String> =
                        rows.iter().filter_map(|r| r.get(f)).filter(|v| !v.is_null()).map(Value::key_string).collect();
                    o.channels.text = text.join(", ");
                }
                o.channels.visible = o.channels.visible && !rows.is_empty();
                o.base = o.channels.clone();
                b.out.insert(o.id.clone(), o);
            }
            _ => {
                let o = b.leaf(decl, name.to_string(), &scene.name, None);
                b.out.insert(o.id.clone(), o);
            }
        }
        if b.diags.iter().any(Diagnostic::is_error) {
            Err(b.diags)
        } else {
            Ok(b.out)
        }
    }

    /// Rows bound by a scene-level declaration after the scene's initial
    /// filter and the current row mode.
    fn top_rows(&self, idx: &DocIndex<'_>, name: &str, diags: &mut Vec<Diagnostic>) -> Vec<Row> {
        let Some(table) = idx.source_table(name) else { return Vec::new() };
        let mut rows = self.tables.get(table).cloned().unwrap_or_default();
        let mut keep = |rows: &mut Vec<Row>, p: &Predicate| {
            rows.retain(|r| match eval_predicate(p, &Subject::datum(r)) {
                Ok(b) => b,
                Err(d) => {
                    diags.push(d);
                    false
                }
            })
        };
        if let Some(scene) = idx.scene_of(name) {
            if let Some(InitialData::Filter { table: t, predicate }) = &scene.initial_data {
                if t == table {
                    keep(&mut rows, predicate);
                }
            }
        }
        match self.modes.get(name) {
            None | Some(RowMode::All) => {}
            Some(RowMode::Filter(p)) => {
                if !p.is_cleared() {
                    keep(&mut rows, p)
                }
            }
            Some(RowMode::Replace(p)) => {
                if p.is_cleared() {
                    rows.clear()
                } else {
                    keep(&mut rows, p)
                }
            }
        }
        rows
    }

    /// Scene-level declaration containing `decl`.
    pub fn top_of(&self, decl: &str) -> Option<String> {
        let idx = DocIndex::new(&self.doc);
        let mut cur = idx.info(decl)?;
        while cur.role != Role::SceneChild {
            cur = idx.info(cur.parent?)?;
        }
        Some(cur.decl.name.clone())
    }

    /// Rebuilds one scene-level subtree. Objects that survive keep their
    /// interactive channel state except where their encoded base changed.
    /// Returns (added, removed, updated) ids.
    pub fn rebuild(&mut self, top: &str) -> Result<Rebuilt, Vec<Diagnostic>> {
        let fresh = self.build_top(top)?;
        let old_ids: Vec<String> = std::iter::once(top.to_string())
            .chain(self.descendants(top).into_iter().map(String::from))
            .collect();
        let mut old: BTreeMap<String, VisualObject> =
            old_ids.iter().filter_map(|id| self.objects.remove(id).map(|o| (id.clone(), o))).collect();
        let (mut added, mut updated) = (Vec::new(), Vec::new());
        for (id, mut o) in fresh {
            match old.remove(&id) {
                Some(prev) => {
                    if prev.datum != o.datum {
                        updated.push(id.clone());
                    }
                    let mut ch = prev.channels.clone();
                    for c in crate::scene::Channel::ALL {
                        let nb = o.base.get(c);
                        if prev.base.get(c) != nb {
                            ch.set(c, &nb);
                        }
                    }
                    o.channels = ch;
                }
                None => added.push(id.clone()),
            }
            self.objects.insert(id, o);
        }
        let removed: Vec<String> = old.into_keys().filter(|id| id != top).collect();
        added.retain(|id| id != top);
        Ok((added, removed, updated))
    }

    /// Rebuilds every scene-level subtree.
    pub fn rebuild_all(&mut self) -> Result<(), Vec<Diagnostic>> {
        let tops: Vec<String> =
            self.doc.scenes.iter().flat_map(|s| s.objects.iter().map(|o| o.name.clone())).collect();
        for t in tops {
            self.rebuild(&t)?;
        }
        Ok(())
    }

    /// Mutable declaration lookup, including templates and parts.
    pub fn decl_mut(&mut self, name: &str) -> Option<&mut ObjectDecl> {
        fn find<'a>(o: &'a mut ObjectDecl, name: &str) -> Option<&'a mut ObjectDecl> {
            if o.name == name {
                return Some(o);
            }
            if let Some(t) = o.template.as_deref_mut() {
                if let Some(hit) = find(t, name) {
                    return Some(hit);
                }
            }
            o.parts.iter_mut().find_map(|p| find(p, name))
        }
        self.doc.scenes.iter_mut().flat_map(|s| s.objects.iter_mut()).find_map(|o| find(o, name))
    }
}

struct Builder<'a, 'd> {
    idx: &'a DocIndex<'d>,
    scales: &'a BTreeMap<String, Scale>,
    scene_index: usize,
    scene: &'a str,
    encodings: &'a [EncodingDecl],
    out: BTreeMap<String, VisualObject>,
    diags: Vec<Diagnostic>,
}

impl Builder<'_, '_> {
    fn leaf(&mut self, decl: &ObjectDecl, id: String, parent: &str, datum: Option<Row>) -> VisualObject {
        let mut o = VisualObject::new(id, decl.kind, &decl.name);
        o.shape = decl.shape;
        o.scene = Some(self.scene.to_string());
        o.parent = Some(parent.to_string());
        if !decl.is_mark_like() && decl.kind != ObjectKind::Glyph {
            o.channels.fill = "none".into();
        }
        o.channels.apply(&decl.channels);
        if let Some(d) = &datum {
            self.encode(&decl.name, d, &mut o.channels);
        }
        o.datum = datum;
        o.base = o.channels.clone();
        o
    }

    fn encode(&mut self, decl: &str, datum: &Row, ch: &mut ChannelSet) {
        for (ei, e) in self.encodings.iter().enumerate() {
            if self.idx.encoding_decl(&e.target).map(|d| d.name.as_str()) != Some(decl) {
                continue;
            }
            let path = format!("/scenes/{}/encodings/{ei}", self.scene_index);
            let Some(scale) = self.scales.get(&e.scale) else { continue };
            let value = if e.band {
                Ok(scale.bandwidth().into())
            } else {
                match datum.get(&e.field) {
                    None => Err(Diagnostic::error(
                        Code::UnknownField,
                        format!("{path}/field"),
                        format!("datum has no field `{}`", e.field),
                    )),
                    Some(v) => scale.apply(v).map_err(|mut d| {
                        d.path = path.clone();
                        d
                    }),
                }
            };
            match value {
                Ok(v) => {
                    ch.set(e.channel, &v);
                }
                Err(d) => self.diags.push(d),
            }
        }
    }

    fn collection(&mut self, decl: &ObjectDecl, id: String, parent: &str, datum: Option<Row>, rows: Vec<Row>) {
        let rows = match &decl.transform {
            Some(t) => match t.apply(&rows) {
                Ok(r) => r,
                Err(d) => {
                    self.diags.push(d);
                    Vec::new()
                }
            },
            None => rows,
        };
        let mut o = self.leaf(decl, id.clone(), parent, datum);
        let mut children = Vec::new();
        for p in &decl.parts {
            let pid = format!("{id}/{}", p.name);
            let part = self.leaf(p, pid.clone(), &id, o.datum.clone());
            children.push(pid.clone());
            self.out.insert(pid, part);
        }
        let Some(template) = decl.template.as_deref() else {
            o.children = children;
            self.out.insert(id, o);
            return;
        };
        let claim = |key: String, children: &mut Vec<String>| {
            let mut cid = format!("{id}/{key}");
            let mut n = 1;
            while children.contains(&cid) {
                n += 1;
                cid = format!("{id}/{key}#{n}");
            }
            children.push(cid.clone());
            cid
        };
        match &decl.group_by {
            Some(g) => {
                let mut groups: Vec<(Value, Vec<Row>)> = Vec::new();
                for r in rows {
                    let v = r.get(g).cloned().unwrap_or_default();
                    match groups.iter_mut().find(|(k, _)| k.key_string() == v.key_string()) {
                        Some((_, members)) => members.push(r),
                        None => groups.push((v, vec![r])),
                    }
                }
                for (v, members) in groups {
                    let cid = claim(v.key_string(), &mut children);
                    let mut datum = Row::new();
                    datum.insert(g.clone(), v);
                    self.member(template, cid, &id, datum, members);
                }
            }
            None => {
                let key = self.idx.rows_schema(&decl.name).map(|s| s.key);
                for (i, r) in rows.into_iter().enumerate() {
                    let k = key
                        .as_deref()
                        .and_then(|k| r.get(k))
                        .filter(|v| !v.is_null())
                        .map(Value::key_string)
                        .unwrap_or_else(|| i.to_string());
                    let cid = claim(k, &mut children);
                    self.member(template, cid, &id, r.clone(), vec![r]);
                }
            }
        }
        o.children = children;
        self.out.insert(id, o);
    }

    fn member(&mut self, template: &ObjectDecl, id: String, parent: &str, datum: Row, rows: Vec<Row>) {
        match template.kind {
            ObjectKind::Collection => self.collection(template, id, parent, Some(datum), rows),
            ObjectKind::Glyph => {
                let mut o = self.leaf(template, id.clone(), parent, Some(datum.clone()));
                for p in &template.parts {
                    let pid = format!("{id}/{}", p.name);
                    let part = self.leaf(p, pid.clone(), &id, Some(datum.clone()));
                    o.children.push(pid.clone());
                    self.out.insert(pid, part);
                }
                self.out.insert(id, o);
            }
            _ => {
                let o = self.leaf(template, id.clone(), parent, Some(datum));
                self.out.insert(id, o);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_document;
    use crate::scene::ChannelValue;

    const BARS: &str = r#"{
      "name": "bars",
      "data": [{"name": "t", "fields": [{"name":"k","kind":"string"},{"name":"v","kind":"number"}],
                "rows": [{"k":"A","v":10},{"k":"B","v":20},{"k":"C","v":30},{"k":"D","v":40}]}],
      "scales": [{"name": "x", "kind": "band", "domain": ["A","B","C","D"], "range": [0, 400]},
                 {"name": "y", "kind": "linear", "domain": [0, 40], "range": [0, 200]}],
      "scenes": [{"name": "main", "objects": [
        {"name": "bars", "kind": "collection", "source": "t",
         "template": {"name": "bar", "kind": "mark", "shape": "rect"}}],
        "encodings": [
          {"name": "ex", "target": "bars", "field": "k", "channel": "x", "scale": "x"},
          {"name": "ew", "target": "bars", "field": "k", "channel": "width", "scale": "x", "band": true},
          {"name": "eh", "target": "bars", "field": "v", "channel": "height", "scale": "y"}]}]
    }"#;

    #[test]
    fn members_are_encoded() {
        let (doc, _) = parse_document(BARS).unwrap();
        let g = build_scene_graph(&doc).unwrap();
        let b = g.get("bars/B").unwrap();
        assert_eq!(b.channels.x, 100.0);
        assert_eq!(b.channels.width, 100.0);
        assert_eq!(b.channels.height, 100.0);
        assert_eq!(b.decl, "bar");
        assert_eq!(g.get("bars").unwrap().children.len(), 4);
        let order = g.paint_order();
        assert_eq!(order[..3], ["$root", "main", "bars"]);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let text = BARS.replace(r#"["A","B","C","D"]"#, r#"["A","B","C"]"#);
        let (doc, _) = parse_document(&text).unwrap();
        let errs = build_scene_graph(&doc).unwrap_err();
        assert!(errs.iter().all(|d| d.code == Code::OutOfDomain));
        assert_eq!(errs[0].path, "/scenes/0/encodings/0");
    }

    #[test]
    fn rebuild_keeps_interactive_state() {
        let (doc, _) = parse_document(BARS).unwrap();
        let mut g = build_scene_graph(&doc).unwrap();
        g.get_mut("bars/A").unwrap().channels.set(crate::scene::Channel::Opacity, &ChannelValue::Number(0.3));
        g.modes.insert("bars".into(), RowMode::Filter(Predicate::one_of("k", vec!["A".into(), "B".into()])));
        let (added, removed, updated) = g.rebuild("bars").unwrap();
        assert!(added.is_empty() && updated.is_empty());
        assert_eq!(removed, vec!["bars/C".to_string(), "bars/D".to_string()]);
        assert_eq!(g.get("bars/A").unwrap().channels.opacity, 0.3);
    }
}
