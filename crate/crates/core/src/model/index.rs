//! Name resolution over a [`Document`]: declarations, row schemas and
//! listeners, shared by validation, scene building and compilation.

use std::collections::BTreeMap;

use crate::model::{ControlDecl, Document, FieldDef, ObjectDecl, SceneSpec};
use crate::scene::ObjectKind;

/// Implicit section holding every scene that names no section.
pub const ROOT_SECTION: &str = "$root";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    SceneChild,
    Template,
    Part,
}

#[derive(Debug, Clone)]
pub struct DeclInfo<'a> {
    pub decl: &'a ObjectDecl,
    pub scene: usize,
    pub path: String,
    pub parent: Option<&'a str>,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub fields: Vec<FieldDef>,
    pub key: String,
}

impl Schema {
    pub fn has(&self, field: &str) -> bool {
        self.fields.iter().any(|f| f.name == field)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ListenerRef<'a> {
    Scene(&'a SceneSpec),
    Control(&'a SceneSpec, &'a ControlDecl),
    Section(&'a str),
}

impl<'a> ListenerRef<'a> {
    /// The scene a listener lives in, if it is bound to exactly one.
    pub fn scene(&self) -> Option<&'a str> {
        match self {
            ListenerRef::Scene(s) | ListenerRef::Control(s, _) => Some(&s.name),
            ListenerRef::Section(_) => None,
        }
    }
}

pub struct DocIndex<'a> {
    pub doc: &'a Document,
    pub decls: BTreeMap<&'a str, DeclInfo<'a>>,
    /// Declaration names in document order.
    pub order: Vec<&'a str>,
}

impl<'a> DocIndex<'a> {
    /// First declaration wins on duplicate names; validation reports them.
    pub fn new(doc: &'a Document) -> Self {
        let mut idx = DocIndex { doc, decls: BTreeMap::new(), order: Vec::new() };
        for (si, s) in doc.scenes.iter().enumerate() {
            for (oi, o) in s.objects.iter().enumerate() {
                idx.add(o, si, format!("/scenes/{si}/objects/{oi}"), None, Role::SceneChild);
            }
        }
        idx
    }

    fn add(&mut self, o: &'a ObjectDecl, scene: usize, path: String, parent: Option<&'a str>, role: Role) {
        if !self.decls.contains_key(o.name.as_str()) {
            self.decls.insert(&o.name, DeclInfo { decl: o, scene, path: path.clone(), parent, role });
            self.order.push(&o.name);
        }
        if let Some(t) = &o.template {
            self.add(t, scene, format!("{path}/template"), Some(&o.name), Role::Template);
        }
        for (pi, p) in o.parts.iter().enumerate() {
            self.add(p, scene, format!("{path}/parts/{pi}"), Some(&o.name), Role::Part);
        }
    }

    pub fn decl(&self, name: &str) -> Option<&'a ObjectDecl> {
        self.decls.get(name).map(|d| d.decl)
    }

    pub fn info(&self, name: &str) -> Option<&DeclInfo<'a>> {
        self.decls.get(name)
    }

    pub fn scene_of(&self, decl: &str) -> Option<&'a SceneSpec> {
        self.decls.get(decl).map(|d| &self.doc.scenes[d.scene])
    }

    pub fn sections(&self) -> Vec<&'a str> {
        let mut out = vec![ROOT_SECTION];
        for s in &self.doc.scenes {
            if let Some(sec) = s.section.as_deref() {
                if !out.contains(&sec) {
                    out.push(sec);
                }
            }
        }
        out
    }

    pub fn is_section(&self, name: &str) -> bool {
        self.sections().contains(&name)
    }

    pub fn listener(&self, name: &str) -> Option<ListenerRef<'a>> {
        if let Some(s) = self.doc.scene(name) {
            return Some(ListenerRef::Scene(s));
        }
        if let Some((s, c)) = self.doc.control(name) {
            return Some(ListenerRef::Control(s, c));
        }
        self.sections().into_iter().find(|s| *s == name).map(ListenerRef::Section)
    }

    /// Collection whose members are instances of `decl`, when `decl` is a
    /// template.
    pub fn owning_collection(&self, decl: &str) -> Option<&'a ObjectDecl> {
        let info = self.decls.get(decl)?;
        match info.role {
            Role::Template => self.decl(info.parent?),
            Role::Part => self.owning_collection(info.parent?),
            Role::SceneChild => None,
        }
    }

    /// Effective source table of a collection (or sourced annotation).
    pub fn source_table(&self, decl: &str) -> Option<&'a str> {
        let info = self.decls.get(decl)?;
        if let Some(s) = info.decl.source.as_deref() {
            return Some(s);
        }
        match info.role {
            Role::Template | Role::Part => self.source_table(info.parent?),
            Role::SceneChild => {
                self.doc.scenes[info.scene].initial_data.as_ref().map(|i| i.table()).filter(|_| {
                    info.decl.kind == ObjectKind::Collection
                })
            }
        }
    }

    /// Schema of the rows a collection binds (after its transform).
    pub fn rows_schema(&self, collection: &str) -> Option<Schema> {
        let info = self.decls.get(collection)?;
        let inherited = match info.role {
            Role::Template => {
                let parent = self.decl(info.parent?)?;
                if parent.group_by.is_some() {
                    self.rows_schema(&parent.name)
                } else {
                    None
                }
            }
            _ => None,
        };
        let mut schema = match inherited {
            Some(s) => s,
            None => {
                let table = self.doc.table(self.source_table(collection)?)?;
                Schema { fields: table.fields.clone(), key: table.key_field()?.to_string() }
            }
        };
        if let Some(t) = &info.decl.transform {
            let (fields, key) = t.output_schema(&schema.fields, &schema.key);
            schema = Schema { fields, key };
        }
        Some(schema)
    }

    /// Schema of the datum carried by each instance of `decl`.
    pub fn instance_schema(&self, decl: &str) -> Option<Schema> {
        let info = self.decls.get(decl)?;
        match info.role {
            Role::Template => {
                let coll = self.decl(info.parent?)?;
                let rows = self.rows_schema(&coll.name)?;
                match &coll.group_by {
                    Some(g) => {
                        let f = rows.field(g)?.clone();
                        Some(Schema { fields: vec![f], key: g.clone() })
                    }
                    None => Some(rows),
                }
            }
            Role::Part => self.instance_schema(info.parent?),
            Role::SceneChild => {
                let table = self.doc.table(info.decl.source.as_deref()?)?;
                Some(Schema { fields: table.fields.clone(), key: table.key_field()?.to_string() })
            }
        }
    }

    /// Declaration an encoding applies to: a collection's template, or a
    /// template/part named directly.
    pub fn encoding_decl(&self, target: &str) -> Option<&'a ObjectDecl> {
        let d = self.decl(target)?;
        if d.kind == ObjectKind::Collection {
            if let Some(t) = &d.template {
                return Some(t);
            }
        }
        match self.decls.get(target)?.role {
            Role::Template | Role::Part => Some(d),
            Role::SceneChild => None,
        }
    }

    /// Whether a target selector resolves.
    pub fn selector_resolves(&self, sel: &str) -> bool {
        if let Some(kind) = sel.strip_prefix("kind=") {
            return ObjectKind::parse(kind).is_some();
        }
        if let Some(c) = sel.strip_prefix("collection:") {
            return self.decl(c).is_some_and(|d| d.kind == ObjectKind::Collection);
        }
        if let Some(s) = sel.strip_prefix("scene:") {
            return self.doc.scene(s).is_some();
        }
        self.decls.contains_key(sel) || self.doc.scene(sel).is_some() || self.is_section(sel)
    }

    /// Scene names a selector touches (empty for kind selectors).
    pub fn selector_scenes(&self, sel: &str) -> Vec<&'a str> {
        let name = sel
            .strip_prefix("collection:")
            .or_else(|| sel.strip_prefix("scene:"))
            .unwrap_or(sel);
        if let Some(info) = self.decls.get(name) {
            return vec![&self.doc.scenes[info.scene].name];
        }
        if let Some(s) = self.doc.scene(name) {
            return vec![&s.name];
        }
        if self.is_section(name) {
            return self
                .doc
                .scenes
                .iter()
                .filter(|s| s.section.as_deref().unwrap_or(ROOT_SECTION) == name || name == ROOT_SECTION)
                .map(|s| s.name.as_str())
                .collect();
        }
        Vec::new()
    }

    /// Display noun for one instance of a declaration.
    pub fn label_of(&self, decl: &str) -> String {
        self.decl(decl).and_then(|d| d.label.clone()).unwrap_or_else(|| decl.replace('_', " "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_document;

    const DOC: &str = r#"{
      "name": "n",
      "data": [{"name": "t", "fields": [{"name":"year","kind":"number"},{"name":"country","kind":"string"},{"name":"pop","kind":"number"}],
                "key": "country", "rows": []}],
      "scenes": [{"name": "main", "objects": [
        {"name": "years", "kind": "collection", "source": "t", "groupBy": "year",
         "template": {"name": "panel", "kind": "collection",
           "template": {"name": "bar", "kind": "mark", "shape": "rect"}}}
      ]}]
    }"#;

    #[test]
    fn nested_schemas_follow_grouping() {
        let (doc, _) = parse_document(DOC).unwrap();
        let idx = DocIndex::new(&doc);
        let panel = idx.instance_schema("panel").unwrap();
        assert_eq!(panel.key, "year");
        assert_eq!(panel.fields.len(), 1);
        let bar = idx.instance_schema("bar").unwrap();
        assert_eq!(bar.key, "country");
        assert!(bar.has("pop"));
        assert_eq!(idx.source_table("bar"), Some("t"));
        assert_eq!(idx.encoding_decl("panel").unwrap().name, "bar");
    }

    #[test]
    fn selectors() {
        let (doc, _) = parse_document(DOC).unwrap();
        let idx = DocIndex::new(&doc);
        assert!(idx.selector_resolves("kind=mark"));
        assert!(idx.selector_resolves("collection:years"));
        assert!(!idx.selector_resolves("collection:bar"));
        assert!(idx.selector_resolves("main"));
        assert!(!idx.selector_resolves("sceneX"));
        assert_eq!(idx.selector_scenes("bar"), vec!["main"]);
    }
}
