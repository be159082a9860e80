//! Encodings map datum fields through scales onto channels.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::diag::{Code, Diagnostic};
use crate::model::DocIndex;
use crate::scene::{Channel, ChannelSet, ChannelValue, SceneGraph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelDiff {
    pub id: String,
    pub channel: Channel,
    pub old: ChannelValue,
    pub new: ChannelValue,
}

/// Channel changes between two snapshots, for ids present in both, sorted
/// by (id, channel).
pub fn diff_channels(before: &BTreeMap<String, ChannelSet>, after: &BTreeMap<String, ChannelSet>) -> Vec<ChannelDiff> {
    let mut out = Vec::new();
    for (id, a) in before {
        let Some(b) = after.get(id) else { continue };
        if a == b {
            continue;
        }
        for ch in Channel::ALL {
            let (old, new) = (a.get(ch), b.get(ch));
            if old != new {
                out.push(ChannelDiff { id: id.clone(), channel: ch, old, new });
            }
        }
    }
    out
}

/// Re-applies every encoding to every instance and returns the resulting
/// channel changes.
pub fn apply_encodings(graph: &mut SceneGraph) -> Result<Vec<ChannelDiff>, Vec<Diagnostic>> {
    let before = graph.channel_snapshot();
    graph.rebuild_all()?;
    Ok(diff_channels(&before, &graph.channel_snapshot()))
}

/// Rebinds an encoding to another field, refits its scale to the values
/// of that field and re-encodes the affected subtree.
pub fn set_encoding_field(graph: &mut SceneGraph, encoding: &str, field: &str) -> Result<(), Diagnostic> {
    let (target, scale) = {
        let Some((si, ei)) = graph.doc.scenes.iter().enumerate().find_map(|(si, s)| {
            s.encodings.iter().position(|e| e.name == encoding).map(|ei| (si, ei))
        }) else {
            return Err(Diagnostic::error(Code::UnresolvedName, "", format!("unknown encoding `{encoding}`")));
        };
        let e = &graph.doc.scenes[si].encodings[ei];
        let idx = DocIndex::new(&graph.doc);
        let decl = idx.encoding_decl(&e.target).map(|d| d.name.clone()).unwrap_or_default();
        if !idx.instance_schema(&decl).is_some_and(|s| s.has(field)) {
            return Err(Diagnostic::error(
                Code::UnknownField,
                format!("/scenes/{si}/encodings/{ei}/field"),
                format!("unknown field `{field}`"),
            ));
        }
        let scale = e.scale.clone();
        let target = e.target.clone();
        graph.doc.scenes[si].encodings[ei].field = field.to_string();
        (target, scale)
    };
    let decl = DocIndex::new(&graph.doc).encoding_decl(&target).map(|d| d.name.clone()).unwrap_or_default();
    let values: Vec<crate::value::Value> = graph
        .objects
        .values()
        .filter(|o| o.decl == decl)
        .filter_map(|o| o.datum.as_ref().and_then(|d| d.get(field)).cloned())
        .collect();
    if let Some(s) = graph.scales.get_mut(&scale) {
        s.refit(values.iter());
    }
    let top = graph.top_of(&decl).unwrap_or(target);
    graph.rebuild(&top).map_err(|mut d| d.remove(0))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_document;
    use crate::scene::build_scene_graph;

    const DOC: &str = r#"{
      "name": "d",
      "data": [{"name": "t", "rows": [{"k":"A","v":1,"w":2},{"k":"B","v":2,"w":4},{"k":"C","v":3,"w":6},{"k":"D","v":4,"w":8}]}],
      "scales": [{"name": "y", "kind": "linear", "domain": [0, 4], "range": [0, 200]}],
      "scenes": [{"name": "main", "objects": [
        {"name": "bars", "kind": "collection", "source": "t", "template": {"name": "bar", "kind": "mark", "shape": "rect"}}],
        "encodings": [{"name": "eh", "target": "bars", "field": "v", "channel": "height", "scale": "y"}]}]
    }"#;

    #[test]
    fn diffs_are_sorted_and_skip_unchanged() {
        let mut a = BTreeMap::new();
        a.insert("b".to_string(), ChannelSet::default());
        a.insert("a".to_string(), ChannelSet::default());
        let mut b = a.clone();
        b.get_mut("b").unwrap().opacity = 0.5;
        b.get_mut("a").unwrap().x = 3.0;
        b.get_mut("a").unwrap().fill = "red".into();
        let d = diff_channels(&a, &b);
        let keys: Vec<(&str, Channel)> = d.iter().map(|d| (d.id.as_str(), d.channel)).collect();
        assert_eq!(keys, vec![("a", Channel::X), ("a", Channel::Fill), ("b", Channel::Opacity)]);
    }

    #[test]
    fn changing_field_refits_scale() {
        let (doc, _) = parse_document(DOC).unwrap();
        let mut g = build_scene_graph(&doc).unwrap();
        let before = g.channel_snapshot();
        set_encoding_field(&mut g, "eh", "w").unwrap();
        let diffs = diff_channels(&before, &g.channel_snapshot());
        // w = 2v, refit domain [2, 8] -> heights 0 .. 200
        assert_eq!(g.get("bars/A").unwrap().channels.height, 0.0);
        assert_eq!(g.get("bars/D").unwrap().channels.height, 200.0);
        assert!(diffs.iter().all(|d| d.channel == Channel::Height));
        assert_eq!(set_encoding_field(&mut g, "eh", "nope").unwrap_err().code, Code::UnknownField);
    }
}
