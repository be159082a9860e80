//! Target selectors to object ids.

use crate::model::index::{DocIndex, Role};
use crate::scene::{ObjectKind, SceneGraph};

/// Resolves a selector to object ids in paint order.
///
/// `kind=K` selects every object of kind K; `collection:N` and the name of
/// a scene-level collection select its members; other declaration names
/// select their instances; scene and section names select that object.
pub fn query_objects(graph: &SceneGraph, selector: &str) -> Vec<String> {
    let order = graph.paint_order();
    if let Some(k) = selector.strip_prefix("kind=") {
        let Some(kind) = ObjectKind::parse(k) else { return Vec::new() };
        return order.into_iter().filter(|id| graph.objects[*id].kind == kind).map(String::from).collect();
    }
    let idx = DocIndex::new(&graph.doc);
    if let Some(c) = selector.strip_prefix("collection:") {
        return members(graph, &order, c);
    }
    if let Some(s) = selector.strip_prefix("scene:") {
        return graph.objects.get(s).filter(|o| o.kind == ObjectKind::Scene).map(|o| vec![o.id.clone()]).unwrap_or_default();
    }
    match idx.info(selector) {
        Some(info) if info.role == Role::SceneChild && info.decl.kind == ObjectKind::Collection => {
            members(graph, &order, selector)
        }
        Some(_) => order.into_iter().filter(|id| graph.objects[*id].decl == selector).map(String::from).collect(),
        None => graph
            .objects
            .get(selector)
            .filter(|o| matches!(o.kind, ObjectKind::Scene | ObjectKind::Section))
            .map(|o| vec![o.id.clone()])
            .unwrap_or_default(),
    }
}

fn members(graph: &SceneGraph, order: &[&str], coll: &str) -> Vec<String> {
    order
        .iter()
        .filter(|id| {
            let o = &graph.objects[**id];
            o.parent
                .as_deref()
                .and_then(|p| graph.objects.get(p))
                .is_some_and(|p| p.kind == ObjectKind::Collection && p.decl == coll)
        })
        .map(|id| id.to_string())
        .collect()
}
