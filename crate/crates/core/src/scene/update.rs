//! Structural data updates: rows bound to a collection change, so members
//! appear, disappear or receive a new datum.

use serde::Serialize;

use crate::diag::{Code, Diagnostic};
use crate::interaction::predicate::Predicate;
use crate::model::{DocIndex, FieldKind};
use crate::scene::{RowMode, SceneGraph};
use crate::value::{Row, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum DataUpdate {
    Filter { target: String, predicate: Predicate },
    Replace { target: String, predicate: Predicate },
    Append { target: String, row: Row },
    /// Sets the tunable parameter of the target declaration's transform.
    SetParam { target: String, value: Value },
    /// Adds a parent row one level above rows `a` and `b`.
    Nest {
        target: String,
        a: String,
        b: String,
        parent_field: String,
        level_field: String,
    },
}

impl DataUpdate {
    pub fn target(&self) -> &str {
        match self {
            DataUpdate::Filter { target, .. }
            | DataUpdate::Replace { target, .. }
            | DataUpdate::Append { target, .. }
            | DataUpdate::SetParam { target, .. }
            | DataUpdate::Nest { target, .. } => target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralDiff {
    pub target: String,
    pub added: Vec<String>,
    pub removed: Vec<String>,
    pub updated: Vec<String>,
}

impl StructuralDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.updated.is_empty()
    }
}

fn mismatch(msg: String) -> Diagnostic {
    Diagnostic::error(Code::SchemaMismatch, "", msg)
}

/// Applies one update and rebuilds the affected scene-level subtree.
pub fn update_object_data(graph: &mut SceneGraph, update: &DataUpdate) -> Result<StructuralDiff, Diagnostic> {
    let target = update.target().to_string();
    let top = graph
        .top_of(&target)
        .ok_or_else(|| Diagnostic::error(Code::UnresolvedName, "", format!("unknown target `{target}`")))?;
    match update {
        DataUpdate::Filter { predicate, .. } => {
            graph.modes.insert(top.clone(), RowMode::Filter(predicate.clone()));
        }
        DataUpdate::Replace { predicate, .. } => {
            graph.modes.insert(top.clone(), RowMode::Replace(predicate.clone()));
        }
        DataUpdate::Append { row, .. } => append(graph, &target, row.clone())?,
        DataUpdate::SetParam { value, .. } => {
            let decl = graph.decl_mut(&target).expect("target resolved");
            let t = decl
                .transform
                .as_mut()
                .ok_or_else(|| mismatch(format!("`{target}` has no transform to recompute")))?;
            t.set_param(value).map_err(mismatch)?;
        }
        DataUpdate::Nest { a, b, parent_field, level_field, .. } => nest(graph, &target, a, b, parent_field, level_field)?,
    }
    let (added, removed, updated) = graph.rebuild(&top).map_err(|mut d| d.remove(0))?;
    Ok(StructuralDiff { target, added, removed, updated })
}

fn table_of(graph: &SceneGraph, target: &str) -> Result<(String, Vec<crate::model::FieldDef>, String), Diagnostic> {
    let idx = DocIndex::new(&graph.doc);
    let name = idx
        .source_table(target)
        .ok_or_else(|| mismatch(format!("`{target}` is not bound to a table")))?
        .to_string();
    let t = graph.doc.table(&name).expect("validated source table");
    Ok((name, t.fields.clone(), t.key_field().unwrap_or_default().to_string()))
}

fn append(graph: &mut SceneGraph, target: &str, mut row: Row) -> Result<(), Diagnostic> {
    let (table, fields, key) = table_of(graph, target)?;
    for (k, v) in &row {
        let f = fields.iter().find(|f| &f.name == k).ok_or_else(|| mismatch(format!("table `{table}` has no field `{k}`")))?;
        if !f.kind.admits(v) {
            return Err(mismatch(format!("`{v}` is not a {} for field `{k}`", f.kind.name())));
        }
    }
    for f in &fields {
        row.entry(f.name.clone()).or_insert(Value::Null);
    }
    let rows = graph.tables.entry(table).or_default();
    let taken = |v: &Value, rows: &[Row]| rows.iter().any(|r| r.get(&key).is_some_and(|k| k.key_string() == v.key_string()));
    if row.get(&key).is_none_or(Value::is_null) {
        let kind = fields.iter().find(|f| f.name == key).map(|f| f.kind).unwrap_or(FieldKind::String);
        let mut n = rows.len() + 1;
        let make = |n: usize| match kind {
            FieldKind::Number => Value::Number(n as f64),
            _ => Value::String(format!("{}{n}", key)),
        };
        while taken(&make(n), rows) {
            n += 1;
        }
        row.insert(key.clone(), make(n));
    } else if taken(&row[&key], rows) {
        return Err(mismatch(format!("duplicate key `{}`", row[&key])));
    }
    rows.push(row);
    Ok(())
}

fn nest(graph: &mut SceneGraph, target: &str, a: &str, b: &str, parent_field: &str, level_field: &str) -> Result<(), Diagnostic> {
    let (table, _, key) = table_of(graph, target)?;
    let rows = graph.tables.entry(table).or_default();
    let find = |k: &str, rows: &[Row]| rows.iter().position(|r| r.get(&key).is_some_and(|v| v.key_string() == k));
    let (Some(ia), Some(ib)) = (find(a, rows), find(b, rows)) else {
        return Err(Diagnostic::error(Code::UnresolvedName, "", format!("no rows `{a}` and `{b}` to nest")));
    };
    if ia == ib {
        return Ok(());
    }
    let parent_key = format!("{a}+{b}");
    if find(&parent_key, rows).is_some() {
        return Ok(());
    }
    let level = |r: &Row| r.get(level_field).and_then(Value::as_f64).unwrap_or(0.0);
    let mut parent = rows[ia].clone();
    parent.insert(key.clone(), parent_key.clone().into());
    parent.insert(level_field.to_string(), (level(&rows[ia]).max(level(&rows[ib])) + 1.0).into());
    parent.insert(parent_field.to_string(), Value::Null);
    for i in [ia, ib] {
        rows[i].insert(parent_field.to_string(), parent_key.clone().into());
    }
    rows.push(parent);
    Ok(())
}
