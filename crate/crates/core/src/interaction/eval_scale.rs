//! Evaluation scales turn evaluator results into channel changes.

use crate::compiler::graph::ScaleInput;
use crate::diag::{Code, Diagnostic};
use crate::scene::{Channel, ChannelDiff, ChannelMap, SceneGraph};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalResults {
    Bool(Vec<bool>),
    Number(Vec<f64>),
    /// Permutation from an order evaluator.
    Rank(Vec<usize>),
}

impl EvalResults {
    pub fn len(&self) -> usize {
        match self {
            EvalResults::Bool(v) => v.len(),
            EvalResults::Number(v) => v.len(),
            EvalResults::Rank(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind_name(&self) -> &'static str {
        match self {
            EvalResults::Bool(_) => "boolean",
            EvalResults::Number(_) => "number",
            EvalResults::Rank(_) => "rank",
        }
    }
}

fn set(graph: &mut SceneGraph, id: &str, props: &ChannelMap, out: &mut Vec<ChannelDiff>) {
    let Some(o) = graph.get_mut(id) else { return };
    for (ch, v) in props {
        let old = o.channels.get(*ch);
        if let Some(new) = o.channels.set(*ch, v) {
            if new != old {
                out.push(ChannelDiff { id: id.to_string(), channel: *ch, old, new });
            }
        }
    }
}

/// Applies `scale` to the targets and returns only the changes made.
pub fn apply_evaluation_scale(
    graph: &mut SceneGraph,
    results: &EvalResults,
    scale: &ScaleInput,
    targets: &[String],
) -> Result<Vec<ChannelDiff>, Diagnostic> {
    if results.len() != targets.len() {
        return Err(Diagnostic::error(Code::KindMismatch, "", "result and target counts differ"));
    }
    let mut out = Vec::new();
    match (results, scale) {
        (EvalResults::Bool(r), ScaleInput::Boolean(m)) => {
            // channels named on either side fall back to base on the other
            let touched: Vec<Channel> = m.true_props.keys().chain(m.false_props.keys()).copied().collect();
            for (id, b) in targets.iter().zip(r) {
                let Some(o) = graph.get(id) else { continue };
                let chosen = if *b { &m.true_props } else { &m.false_props };
                let props: ChannelMap =
                    touched.iter().map(|c| (*c, chosen.get(c).cloned().unwrap_or_else(|| o.base.get(*c)))).collect();
                set(graph, id, &props, &mut out);
            }
        }
        (EvalResults::Number(r), ScaleInput::Number(m)) => {
            let [lo, hi] = m.domain;
            for (id, x) in targets.iter().zip(r) {
                let t = if hi > lo { ((x.clamp(lo, hi)) - lo) / (hi - lo) } else { 0.0 };
                let props: ChannelMap =
                    m.channels.iter().map(|(ch, [a, b])| (*ch, (a + (b - a) * t).into())).collect();
                set(graph, id, &props, &mut out);
            }
        }
        (EvalResults::Rank(perm), ScaleInput::Rank { channel }) => {
            let mut slots: Vec<f64> =
                targets.iter().filter_map(|id| graph.get(id)).filter_map(|o| o.base.get(*channel).as_f64()).collect();
            slots.sort_by(f64::total_cmp);
            for (r, &i) in perm.iter().enumerate() {
                if let Some(v) = slots.get(r) {
                    let mut props = ChannelMap::new();
                    props.insert(*channel, (*v).into());
                    set(graph, &targets[i], &props, &mut out);
                }
            }
        }
        (r, s) => {
            return Err(Diagnostic::error(
                Code::KindMismatch,
                "",
                format!("a {} evaluation scale cannot take {} results", s.kind_name(), r.kind_name()),
            ))
        }
    }
    Ok(out)
}

/// Restores the encoded value of `channels` on every target.
pub fn restore_base(graph: &mut SceneGraph, targets: &[String], channels: &[Channel]) -> Vec<ChannelDiff> {
    let mut out = Vec::new();
    for id in targets {
        let Some(o) = graph.get(id) else { continue };
        let props: ChannelMap = channels.iter().map(|c| (*c, o.base.get(*c))).collect();
        set(graph, id, &props, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::graph::{BooleanMap, NumberMap};
    use crate::model::parse_document;
    use crate::scene::build_scene_graph;
    use std::collections::BTreeMap;

    fn graph() -> SceneGraph {
        let text = r#"{"name":"e","data":[{"name":"t","rows":[{"k":"USA","x":1},{"k":"CAN","x":3},{"k":"MEX","x":2}]}],
          "scales":[{"name":"x","kind":"linear","domain":[0,3],"range":[0,300]}],
          "scenes":[{"name":"main","objects":[{"name":"bars","kind":"collection","source":"t",
            "template":{"name":"bar","kind":"mark","shape":"rect"}}],
            "encodings":[{"name":"ex","target":"bars","field":"x","channel":"x","scale":"x"}]}]}"#;
        build_scene_graph(&parse_document(text).unwrap().0).unwrap()
    }

    fn ids() -> Vec<String> {
        ["bars/USA", "bars/CAN", "bars/MEX"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn boolean_scale_emits_only_changes() {
        let mut g = graph();
        let mut m = BooleanMap { true_props: ChannelMap::new(), false_props: ChannelMap::new() };
        m.true_props.insert(Channel::Stroke, "#000".into());
        m.false_props.insert(Channel::Opacity, 0.3.into());
        let s = ScaleInput::Boolean(m);
        let r = EvalResults::Bool(vec![true, false, false]);
        let d = apply_evaluation_scale(&mut g, &r, &s, &ids()).unwrap();
        let got: Vec<(&str, Channel)> = d.iter().map(|d| (d.id.as_str(), d.channel)).collect();
        assert_eq!(got, vec![("bars/USA", Channel::Stroke), ("bars/CAN", Channel::Opacity), ("bars/MEX", Channel::Opacity)]);
        assert!(apply_evaluation_scale(&mut g, &r, &s, &ids()).unwrap().is_empty());
        let back = restore_base(&mut g, &ids(), &[Channel::Stroke, Channel::Opacity]);
        assert_eq!(back.len(), 3);
    }

    #[test]
    fn number_scale_interpolates() {
        let mut g = graph();
        let mut channels = BTreeMap::new();
        channels.insert(Channel::Opacity, [0.2, 1.0]);
        let s = ScaleInput::Number(NumberMap { domain: [0.0, 1.0], channels });
        let d = apply_evaluation_scale(&mut g, &EvalResults::Number(vec![0.5, 1.0, 7.0]), &s, &ids()).unwrap();
        assert_eq!(d.len(), 1);
        assert!((g.get("bars/USA").unwrap().channels.opacity - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rank_scale_reassigns_slots() {
        let mut g = graph();
        // ranks CAN, MEX, USA take the sorted slots 100, 200, 300
        let s = ScaleInput::Rank { channel: Channel::X };
        apply_evaluation_scale(&mut g, &EvalResults::Rank(vec![1, 2, 0]), &s, &ids()).unwrap();
        assert_eq!(g.get("bars/CAN").unwrap().channels.x, 100.0);
        assert_eq!(g.get("bars/MEX").unwrap().channels.x, 200.0);
        assert_eq!(g.get("bars/USA").unwrap().channels.x, 300.0);
    }

    #[test]
    fn mismatch_is_e032() {
        let mut g = graph();
        let s = ScaleInput::Rank { channel: Channel::X };
        let e = apply_evaluation_scale(&mut g, &EvalResults::Bool(vec![true; 3]), &s, &ids()).unwrap_err();
        assert_eq!(e.code, Code::KindMismatch);
    }
}
