//! Structural validation: namespaces, cross references, row schemas,
//! object hierarchy and scale well-formedness.

use std::collections::{BTreeMap, BTreeSet};

use crate::compiler::graph::{CameraOp, DataUpdateRule, EncodingUpdate, EvaluatorSpec, GraphParts, Source};
use crate::diag::{Code, Diagnostic};
use crate::model::index::{DocIndex, Role, ROOT_SECTION};
use crate::model::{Document, DomainSpec, FieldKind, Level, ObjectDecl, ScaleKind};
use crate::scene::ObjectKind;
use crate::value::Value;

/// Diagnostics sorted by path; empty iff the document is consistent.
pub fn validate_document(doc: &Document) -> Vec<Diagnostic> {
    let idx = DocIndex::new(doc);
    let mut v = Validator { idx: &idx, out: Vec::new() };
    v.tables();
    v.scales();
    v.scenes();
    v.interactions();
    let mut out = v.out;
    out.sort_by(|a, b| a.path.cmp(&b.path));
    out
}

struct Validator<'i, 'a> {
    idx: &'i DocIndex<'a>,
    out: Vec<Diagnostic>,
}

/// Tracks first declarations of names within one namespace.
struct Namespace(BTreeSet<String>);

impl Namespace {
    fn new() -> Self {
        Namespace(BTreeSet::new())
    }

    fn claim(&mut self, name: &str, path: String, what: &str, out: &mut Vec<Diagnostic>) {
        if !self.0.insert(name.to_string()) {
            out.push(Diagnostic::error(Code::DuplicateName, path, format!("duplicate {what} `{name}`")));
        }
    }
}

impl<'i, 'a> Validator<'i, 'a> {
    fn err(&mut self, code: Code, path: impl Into<String>, msg: impl Into<String>) {
        self.out.push(Diagnostic::error(code, path, msg));
    }

    fn doc(&self) -> &'a Document {
        self.idx.doc
    }

    fn tables(&mut self) {
        let mut ns = Namespace::new();
        for (i, t) in self.doc().data.iter().enumerate() {
            ns.claim(&t.name, format!("/data/{i}/name"), "table", &mut self.out);
            let mut fns = Namespace::new();
            for (j, f) in t.fields.iter().enumerate() {
                fns.claim(&f.name, format!("/data/{i}/fields/{j}/name"), "field", &mut self.out);
            }
            if let Some(k) = &t.key {
                if t.field(k).is_none() {
                    self.err(Code::UnresolvedName, format!("/data/{i}/key"), format!("key field `{k}` is not declared"));
                }
            }
            let mut keys = BTreeSet::new();
            for (r, row) in t.rows.iter().enumerate() {
                for f in &t.fields {
                    match row.get(&f.name) {
                        None => self.err(
                            Code::RowSchema,
                            format!("/data/{i}/rows/{r}"),
                            format!("row lacks field `{}`", f.name),
                        ),
                        Some(v) if !f.kind.admits(v) => self.err(
                            Code::RowSchema,
                            format!("/data/{i}/rows/{r}/{}", f.name),
                            format!("`{v}` is not a {}", f.kind.name()),
                        ),
                        _ => {}
                    }
                }
                for k in row.keys() {
                    if t.field(k).is_none() {
                        self.err(Code::RowSchema, format!("/data/{i}/rows/{r}/{k}"), format!("undeclared field `{k}`"));
                    }
                }
                if let Some(k) = t.key_field().and_then(|k| row.get(k)) {
                    if !keys.insert(k.key_string()) {
                        self.err(
                            Code::DuplicateName,
                            format!("/data/{i}/rows/{r}"),
                            format!("duplicate row key `{k}`"),
                        );
                    }
                }
            }
        }
    }

    fn scales(&mut self) {
        let mut ns = Namespace::new();
        for (i, s) in self.doc().scales.iter().enumerate() {
            let at = format!("/scales/{i}");
            ns.claim(&s.name, format!("{at}/name"), "scale", &mut self.out);
            let values: Option<Vec<Value>> = match &s.domain {
                DomainSpec::Values(v) => Some(v.clone()),
                DomainSpec::Data { data, field } => {
                    match self.doc().table(data) {
                        None => self.err(Code::UnresolvedName, format!("{at}/domain/data"), format!("unknown table `{data}`")),
                        Some(t) => match t.field(field) {
                            None => self.err(Code::UnresolvedName, format!("{at}/domain/field"), format!("unknown field `{field}`")),
                            Some(f) if s.kind == ScaleKind::Linear && f.kind != FieldKind::Number => {
                                self.err(Code::BadScale, format!("{at}/domain"), "linear scale over a non-numeric field")
                            }
                            _ => {}
                        },
                    }
                    None
                }
            };
            match s.kind {
                ScaleKind::Linear => {
                    if let Some(v) = values {
                        let nums: Vec<f64> = v.iter().filter_map(Value::as_f64).collect();
                        if nums.len() != 2 || v.len() != 2 || !nums.iter().all(|n| n.is_finite()) || nums[0] == nums[1] {
                            self.err(Code::BadScale, format!("{at}/domain"), "linear domain needs two distinct finite numbers");
                        }
                    }
                }
                ScaleKind::Ordinal | ScaleKind::Band | ScaleKind::Point => {
                    if let Some(v) = values {
                        let mut seen = BTreeSet::new();
                        if v.iter().any(|x| !seen.insert(x.key_string())) {
                            self.err(Code::BadScale, format!("{at}/domain"), "categorical domain values must be unique");
                        }
                    }
                }
            }
            match s.kind {
                ScaleKind::Ordinal => {
                    if s.range.is_empty() {
                        self.err(Code::BadScale, format!("{at}/range"), "ordinal range is empty");
                    }
                }
                _ => {
                    let ok = s.range.len() == 2 && s.range.iter().all(|r| r.as_f64().is_some_and(f64::is_finite));
                    if !ok {
                        self.err(Code::BadScale, format!("{at}/range"), "range needs two finite numbers");
                    }
                }
            }
            if !(0.0..1.0).contains(&s.padding) {
                self.err(Code::BadScale, format!("{at}/padding"), "band padding must lie in [0, 1)");
            }
        }
    }

    fn scenes(&mut self) {
        let doc = self.doc();
        let mut objects = Namespace::new();
        let mut listeners = Namespace::new();
        let mut encodings = Namespace::new();
        objects.0.insert(ROOT_SECTION.to_string());
        for (si, s) in doc.scenes.iter().enumerate() {
            let at = format!("/scenes/{si}");
            objects.claim(&s.name, format!("{at}/name"), "object", &mut self.out);
            listeners.claim(&s.name, format!("{at}/name"), "listener", &mut self.out);
            if !(s.width > 0.0 && s.height > 0.0) {
                self.err(Code::WrongKind, format!("{at}/width"), "scene size must be positive");
            }
            let (lo, hi) = (s.min_zoom.unwrap_or(0.1), s.max_zoom.unwrap_or(40.0));
            if !(lo > 0.0 && lo <= hi) {
                self.err(Code::WrongKind, format!("{at}/minZoom"), "zoom bounds need 0 < minZoom <= maxZoom");
            }
            if let Some(init) = &s.initial_data {
                match doc.table(init.table()) {
                    None => self.err(Code::UnresolvedName, format!("{at}/initialData"), format!("unknown table `{}`", init.table())),
                    Some(t) => {
                        if let crate::model::InitialData::Filter { predicate, .. } = init {
                            if let Err(e) = predicate.check() {
                                self.err(Code::BadPredicate, format!("{at}/initialData/predicate"), e);
                            }
                            for f in predicate.fields() {
                                if t.field(f).is_none() {
                                    self.err(Code::UnknownField, format!("{at}/initialData/predicate"), format!("unknown field `{f}`"));
                                }
                            }
                        }
                    }
                }
            }
            for (oi, o) in s.objects.iter().enumerate() {
                let path = format!("{at}/objects/{oi}");
                if !ObjectKind::Scene.allows_child(o.kind) {
                    self.err(Code::BadHierarchy, format!("{path}/kind"), format!("a scene cannot contain a {}", o.kind.name()));
                }
                self.object(o, &path, &mut objects);
            }
            for (ei, e) in s.encodings.iter().enumerate() {
                let path = format!("{at}/encodings/{ei}");
                encodings.claim(&e.name, format!("{path}/name"), "encoding", &mut self.out);
                match self.idx.encoding_decl(&e.target) {
                    None => self.err(Code::UnresolvedName, format!("{path}/target"), format!("`{}` is not an encodable collection", e.target)),
                    Some(d) => match self.idx.instance_schema(&d.name) {
                        Some(schema) if !schema.has(&e.field) => {
                            self.err(Code::UnknownField, format!("{path}/field"), format!("unknown field `{}`", e.field))
                        }
                        None => self.err(Code::UnresolvedName, format!("{path}/target"), "target binds no data"),
                        _ => {}
                    },
                }
                match doc.scale(&e.scale) {
                    None => self.err(Code::UnresolvedName, format!("{path}/scale"), format!("unknown scale `{}`", e.scale)),
                    Some(sc) if e.band && sc.kind != ScaleKind::Band => {
                        self.err(Code::BadScale, format!("{path}/band"), "`band` needs a band scale")
                    }
                    _ => {}
                }
            }
            for (ci, c) in s.controls.iter().enumerate() {
                let path = format!("{at}/controls/{ci}");
                listeners.claim(&c.name, format!("{path}/name"), "listener", &mut self.out);
                if c.kind.needs_options() && c.options.is_empty() {
                    self.err(Code::ControlDomain, path.clone(), format!("a {} needs options", c.kind.name()));
                }
                if c.kind == crate::model::ControlKind::Slider {
                    match c.domain {
                        Some([lo, hi]) if lo < hi => {}
                        _ => self.err(Code::ControlDomain, path.clone(), "a slider needs a domain [lo, hi] with lo < hi"),
                    }
                }
            }
        }
        for (si, s) in doc.scenes.iter().enumerate() {
            if let Some(sec) = &s.section {
                if doc.scene(sec).is_some() || self.idx.decl(sec).is_some() || sec == ROOT_SECTION {
                    self.err(Code::DuplicateName, format!("/scenes/{si}/section"), format!("section `{sec}` collides with another name"));
                }
            }
        }
    }

    fn object(&mut self, o: &ObjectDecl, path: &str, ns: &mut Namespace) {
        let doc = self.doc();
        ns.claim(&o.name, format!("{path}/name"), "object", &mut self.out);
        match o.kind {
            ObjectKind::Mark if o.shape.is_none() => self.err(Code::WrongKind, path.to_string(), "a mark needs a `shape`"),
            ObjectKind::Collection => {
                match self.idx.source_table(&o.name) {
                    Some(t) if doc.table(t).is_none() => {
                        self.err(Code::UnresolvedName, format!("{path}/source"), format!("unknown table `{t}`"))
                    }
                    None => {
                        let grouped_parent = self.idx.info(&o.name).is_some_and(|i| i.role == Role::Template);
                        if !grouped_parent {
                            self.err(Code::BadHierarchy, path.to_string(), "a collection needs a source table")
                        }
                    }
                    _ => {}
                }
                match &o.template {
                    None => self.err(Code::BadHierarchy, path.to_string(), "a collection needs a per-row `template`"),
                    Some(t) if !ObjectKind::Collection.allows_child(t.kind) => self.err(
                        Code::BadHierarchy,
                        format!("{path}/template/kind"),
                        format!("a collection cannot contain a {}", t.kind.name()),
                    ),
                    _ => {}
                }
                if let Some(rows) = self.idx.info(&o.name).and_then(|_| self.pre_transform_schema(&o.name)) {
                    if let Some(g) = &o.group_by {
                        let after = self.idx.rows_schema(&o.name);
                        if !after.is_some_and(|s| s.has(g)) {
                            self.err(Code::UnknownField, format!("{path}/groupBy"), format!("unknown field `{g}`"));
                        }
                    }
                    if let Some(t) = &o.transform {
                        for f in t.input_fields() {
                            if !rows.iter().any(|d| d.name == f) {
                                self.err(Code::UnknownField, format!("{path}/transform"), format!("unknown field `{f}`"));
                            }
                        }
                    }
                }
            }
            ObjectKind::Glyph => {
                if o.parts.is_empty() {
                    self.err(Code::BadHierarchy, path.to_string(), "a glyph needs mark `parts`");
                }
                for (pi, p) in o.parts.iter().enumerate() {
                    if p.kind != ObjectKind::Mark {
                        self.err(Code::BadHierarchy, format!("{path}/parts/{pi}/kind"), "glyph parts must be marks");
                    }
                }
            }
            ObjectKind::Axis | ObjectKind::Legend => match &o.scale {
                None => self.err(Code::WrongKind, path.to_string(), format!("a {} needs a `scale`", o.kind.name())),
                Some(s) if doc.scale(s).is_none() => {
                    self.err(Code::UnresolvedName, format!("{path}/scale"), format!("unknown scale `{s}`"))
                }
                _ => {}
            },
            ObjectKind::Annotation => {
                if let Some(src) = &o.source {
                    match doc.table(src) {
                        None => self.err(Code::UnresolvedName, format!("{path}/source"), format!("unknown table `{src}`")),
                        Some(t) => {
                            if let Some(f) = &o.field {
                                if t.field(f).is_none() {
                                    self.err(Code::UnknownField, format!("{path}/field"), format!("unknown field `{f}`"));
                                }
                            }
                        }
                    }
                }
            }
            _ => {}
        }
        if o.kind != ObjectKind::Collection && o.template.is_some() {
            self.err(Code::BadHierarchy, format!("{path}/template"), "only collections have templates");
        }
        if !matches!(o.kind, ObjectKind::Glyph | ObjectKind::Collection) && !o.parts.is_empty() {
            self.err(Code::BadHierarchy, format!("{path}/parts"), "only glyphs and collections have parts");
        }
        if o.kind == ObjectKind::Collection {
            for (pi, p) in o.parts.iter().enumerate() {
                if p.kind != ObjectKind::Mark {
                    self.err(Code::BadHierarchy, format!("{path}/parts/{pi}/kind"), "collection parts must be marks");
                }
            }
        }
        if let Some(t) = &o.template {
            self.object(t, &format!("{path}/template"), ns);
        }
        for (pi, p) in o.parts.iter().enumerate() {
            self.object(p, &format!("{path}/parts/{pi}"), ns);
        }
    }

    /// Fields a collection's transform reads from.
    fn pre_transform_schema(&self, coll: &str) -> Option<Vec<crate::model::FieldDef>> {
        let info = self.idx.info(coll)?;
        if info.role == Role::Template {
            let parent = self.idx.decl(info.parent?)?;
            if parent.group_by.is_some() {
                return self.idx.rows_schema(&parent.name).map(|s| s.fields);
            }
        }
        self.doc().table(self.idx.source_table(coll)?).map(|t| t.fields.clone())
    }

    fn interactions(&mut self) {
        let doc = self.doc();
        let mut ns = Namespace::new();
        let mut vars = Namespace::new();
        let mut declared: BTreeMap<String, crate::compiler::graph::StateKind> = BTreeMap::new();
        for (i, u) in doc.interactions.iter().enumerate() {
            if let Some(parts) = &u.components {
                for (j, s) in parts.state.iter().enumerate() {
                    vars.claim(&s.name, format!("/interactions/{i}/components/state/{j}/name"), "state variable", &mut self.out);
                    declared.entry(s.name.clone()).or_insert(s.kind);
                }
            }
        }
        for (i, u) in doc.interactions.iter().enumerate() {
            let at = format!("/interactions/{i}");
            ns.claim(&u.name, format!("{at}/name"), "interaction", &mut self.out);
            if self.idx.listener(&u.on.listener).is_none() {
                self.err(Code::UnresolvedName, format!("{at}/on/listener"), format!("unknown listener `{}`", u.on.listener));
            }
            if u.target.is_empty() {
                self.err(Code::MissingTarget, at.clone(), "an interaction unit needs at least one target");
            }
            for t in &u.target {
                if !self.idx.selector_resolves(t) {
                    self.err(Code::UnresolvedName, format!("{at}/target"), format!("unresolved target `{t}`"));
                }
            }
            match u.level() {
                Level::Intent if u.intent.is_none() => self.err(Code::MissingIntent, at.clone(), "level `intent` needs an `intent`"),
                Level::Technique if u.technique.is_none() => {
                    self.err(Code::MissingTechnique, at.clone(), "level `technique` needs a `technique`")
                }
                Level::Component if u.components.is_none() => {
                    self.err(Code::MissingComponents, at.clone(), "level `component` needs `components`")
                }
                _ => {}
            }
            if let Some(parts) = &u.components {
                self.parts(parts, &format!("{at}/components"), &declared);
            }
        }
    }

    fn parts(
        &mut self,
        p: &GraphParts,
        at: &str,
        vars: &BTreeMap<String, crate::compiler::graph::StateKind>,
    ) {
        let doc = self.doc();
        let object = |v: &Validator, name: &str| v.idx.selector_resolves(name);
        let var = |v: &mut Validator, name: &str, path: String| {
            if !vars.contains_key(name) {
                v.err(Code::UnresolvedVariable, path, format!("unknown state variable `{name}`"));
            }
        };
        if let Some(h) = &p.hit {
            if let Some(t) = &h.target {
                if !object(self, t) {
                    self.err(Code::UnresolvedName, format!("{at}/hit/target"), format!("unknown object `{t}`"));
                }
            }
        }
        for (j, s) in p.state.iter().enumerate() {
            if s.op.is_some() && s.kind != crate::compiler::graph::StateKind::Predicate {
                self.err(Code::WrongKind, format!("{at}/state/{j}/op"), "`op` applies to predicate state only");
            }
        }
        let evaluators: BTreeSet<&str> = p.evaluators.iter().map(|e| e.name.as_str()).collect();
        for (j, u) in p.updates.iter().enumerate() {
            var(self, &u.var, format!("{at}/updates/{j}/var"));
            match &u.from {
                Source::Brush { encoding: Some(e), .. } => {
                    if !doc.scenes.iter().any(|s| s.encodings.iter().any(|x| &x.name == e)) {
                        self.err(Code::UnresolvedName, format!("{at}/updates/{j}/from/encoding"), format!("unknown encoding `{e}`"));
                    }
                }
                Source::ZoomLevel { scene, .. } if doc.scene(scene).is_none() => {
                    self.err(Code::UnresolvedName, format!("{at}/updates/{j}/from/scene"), format!("unknown scene `{scene}`"))
                }
                Source::CollectionMembers { collection } if !object(self, collection) => self.err(
                    Code::UnresolvedName,
                    format!("{at}/updates/{j}/from/collection"),
                    format!("unknown collection `{collection}`"),
                ),
                _ => {}
            }
        }
        for (j, e) in p.evaluators.iter().enumerate() {
            if !object(self, &e.targets) {
                self.err(Code::UnresolvedName, format!("{at}/evaluators/{j}/targets"), format!("unresolved target `{}`", e.targets));
            }
            match &e.spec {
                EvaluatorSpec::Predicate { predicate } => var(self, predicate, format!("{at}/evaluators/{j}/predicate")),
                EvaluatorSpec::Order { var: Some(v), .. } => var(self, v, format!("{at}/evaluators/{j}/var")),
                EvaluatorSpec::Layout { refs: Some(r), .. } => var(self, r, format!("{at}/evaluators/{j}/refs")),
                EvaluatorSpec::Distance { anchor, .. } if anchor != "hit" => {
                    var(self, anchor, format!("{at}/evaluators/{j}/anchor"))
                }
                _ => {}
            }
        }
        for (j, s) in p.scales.iter().enumerate() {
            if !evaluators.contains(s.evaluator.as_str()) {
                self.err(Code::UnresolvedName, format!("{at}/scales/{j}/evaluator"), format!("unknown evaluator `{}`", s.evaluator));
            }
        }
        for (j, c) in p.camera.iter().enumerate() {
            if let Some(s) = c.scene() {
                if doc.scene(s).is_none() {
                    self.err(Code::UnresolvedName, format!("{at}/camera/{j}/scene"), format!("unknown scene `{s}`"));
                }
            }
            if let CameraOp::ShowView { var: v, .. } = c {
                var(self, v, format!("{at}/camera/{j}/var"));
            }
        }
        for (j, d) in p.data.iter().enumerate() {
            if !object(self, d.target()) {
                self.err(Code::UnresolvedName, format!("{at}/data/{j}/target"), format!("unresolved target `{}`", d.target()));
            }
            match d {
                DataUpdateRule::FilterByPredicate { predicate, .. } | DataUpdateRule::ReplaceRows { predicate, .. } => {
                    var(self, predicate, format!("{at}/data/{j}/predicate"))
                }
                DataUpdateRule::Recompute { var: v, target } => {
                    var(self, v, format!("{at}/data/{j}/var"));
                    if self.idx.decl(target).is_some_and(|d| d.transform.is_none()) {
                        self.err(Code::WrongKind, format!("{at}/data/{j}/target"), format!("`{target}` has no transform to recompute"));
                    }
                }
                _ => {}
            }
        }
        for (j, e) in p.encodings.iter().enumerate() {
            match e {
                EncodingUpdate::Field { encoding, var: v } => {
                    if !doc.scenes.iter().any(|s| s.encodings.iter().any(|x| &x.name == encoding)) {
                        self.err(Code::UnresolvedName, format!("{at}/encodings/{j}/encoding"), format!("unknown encoding `{encoding}`"));
                    }
                    if let Some(v) = v {
                        var(self, v, format!("{at}/encodings/{j}/var"));
                    }
                }
                EncodingUpdate::ChartType { target, var: v, .. } => {
                    if !object(self, target) {
                        self.err(Code::UnresolvedName, format!("{at}/encodings/{j}/target"), format!("unresolved target `{target}`"));
                    }
                    var(self, v, format!("{at}/encodings/{j}/var"));
                }
            }
        }
        for (j, r) in p.rules.iter().enumerate() {
            if r.target != "hit" && !object(self, &r.target) {
                self.err(Code::UnresolvedName, format!("{at}/rules/{j}/target"), format!("unresolved target `{}`", r.target));
            }
            if r.channel.is_none() && r.from != crate::compiler::graph::RuleSource::Translate {
                self.err(Code::WrongKind, format!("{at}/rules/{j}"), "rule needs a `channel`");
            }
            match &r.from {
                crate::compiler::graph::RuleSource::VarMatch { var: v, .. }
                | crate::compiler::graph::RuleSource::VarTable { var: v, .. } => var(self, v, format!("{at}/rules/{j}/from/var")),
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_document;

    fn diags(text: &str) -> Vec<(Code, String)> {
        let (doc, _) = parse_document(text).unwrap();
        validate_document(&doc).into_iter().map(|d| (d.code, d.path)).collect()
    }

    const BARS: &str = r#"{
      "name": "bars",
      "data": [{"name": "countries", "fields": [{"name":"country","kind":"string"},{"name":"pop","kind":"number"}],
                "rows": [{"country":"USA","pop":331},{"country":"CAN","pop":38}]}],
      "scales": [{"name": "y", "kind": "linear", "domain": [0, 400], "range": [0, 200]}],
      "scenes": [{"name": "main", "objects": [
        {"name": "bars", "kind": "collection", "source": "countries",
         "template": {"name": "bar", "kind": "mark", "shape": "rect"}}],
        "encodings": [{"name": "h", "target": "bars", "field": "pop", "channel": "height", "scale": "y"}]}],
      "interactions": [{"name": "pick", "on": {"event": "click", "listener": "main"}, "target": "bars", "technique": "point_select"}]
    }"#;

    #[test]
    fn well_formed_document_is_clean() {
        assert_eq!(diags(BARS), vec![]);
    }

    #[test]
    fn unresolved_target() {
        let text = BARS.replace(r#""target": "bars", "technique""#, r#""target": "sceneX", "technique""#);
        assert_eq!(diags(&text), vec![(Code::UnresolvedName, "/interactions/0/target".to_string())]);
    }

    #[test]
    fn duplicate_table() {
        let text = r#"{"name":"d","data":[{"name":"t","fields":[],"rows":[]},{"name":"t","fields":[],"rows":[]}]}"#;
        assert_eq!(diags(text), vec![(Code::DuplicateName, "/data/1/name".to_string())]);
    }

    #[test]
    fn row_kind_mismatch() {
        let text = BARS.replace(r#""pop":38"#, r#""pop":"lots""#);
        assert_eq!(diags(&text), vec![(Code::RowSchema, "/data/0/rows/1/pop".to_string())]);
    }

    #[test]
    fn encoding_on_missing_field() {
        let text = BARS.replace(r#""field": "pop""#, r#""field": "gdp""#);
        assert_eq!(diags(&text), vec![(Code::UnknownField, "/scenes/0/encodings/0/field".to_string())]);
    }

    #[test]
    fn marks_cannot_sit_in_scenes() {
        let text = BARS.replace(
            r#""objects": ["#,
            r#""objects": [{"name":"lonely","kind":"mark","shape":"rect"},"#,
        );
        assert_eq!(diags(&text), vec![(Code::BadHierarchy, "/scenes/0/objects/0/kind".to_string())]);
    }

    #[test]
    fn degenerate_linear_domain() {
        let text = BARS.replace("[0, 400]", "[5, 5]");
        assert_eq!(diags(&text), vec![(Code::BadScale, "/scales/0/domain".to_string())]);
    }

    #[test]
    fn output_is_sorted_by_path() {
        let text = BARS
            .replace(r#""listener": "main""#, r#""listener": "nowhere""#)
            .replace(r#""scale": "y""#, r#""scale": "nope""#);
        let paths: Vec<String> = diags(&text).into_iter().map(|(_, p)| p).collect();
        let mut sorted = paths.clone();
        sorted.sort();
        assert_eq!(paths, sorted);
        assert_eq!(paths.len(), 2);
    }
}
