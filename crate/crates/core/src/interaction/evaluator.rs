//! Target evaluators: predicate membership, ordering and distance.

use crate::compiler::graph::{Direction, Metric};
use crate::diag::{Code, Diagnostic};
use crate::interaction::predicate::{eval_predicate, Predicate, Subject};
use crate::scene::VisualObject;
use crate::value::Value;

/// One boolean per target; a cleared predicate yields all `false`.
pub fn evaluate_targets(targets: &[&VisualObject], p: &Predicate) -> Result<Vec<bool>, Diagnostic> {
    targets
        .iter()
        .map(|o| eval_predicate(p, &Subject { datum: o.datum.as_ref(), channels: Some(&o.channels) }))
        .collect()
}

/// Stable argsort of the targets by `field`: `result[r]` is the index of
/// the target ranked r-th.
pub fn order_targets(targets: &[&VisualObject], field: &str, direction: Direction) -> Result<Vec<usize>, Diagnostic> {
    let keys: Vec<&Value> = targets
        .iter()
        .map(|o| {
            o.datum.as_ref().and_then(|d| d.get(field)).ok_or_else(|| {
                Diagnostic::error(Code::UnresolvedVariable, "", format!("`{field}` does not resolve on `{}`", o.id))
            })
        })
        .collect::<Result<_, _>>()?;
    let mut perm: Vec<usize> = (0..targets.len()).collect();
    perm.sort_by(|&a, &b| match direction {
        Direction::Asc => keys[a].total_cmp(keys[b]),
        Direction::Desc => keys[b].total_cmp(keys[a]),
    });
    Ok(perm)
}

/// Distance of every target to the anchor. Index distance needs the
/// anchor among the targets; euclidean distance uses world centers.
pub fn distance_targets(
    ids: &[String],
    centers: &[(f64, f64)],
    metric: Metric,
    anchor: &str,
    anchor_center: Option<(f64, f64)>,
) -> Result<Vec<f64>, Diagnostic> {
    match metric {
        Metric::Index => {
            let a = ids.iter().position(|i| i == anchor).ok_or_else(|| {
                Diagnostic::error(Code::AnchorNotInTargets, "", format!("anchor `{anchor}` is not a target"))
            })?;
            Ok((0..ids.len()).map(|i| (i as f64 - a as f64).abs()).collect())
        }
        Metric::Euclidean => {
            let (ax, ay) = match anchor_center {
                Some(c) => c,
                None => {
                    let a = ids.iter().position(|i| i == anchor).ok_or_else(|| {
                        Diagnostic::error(Code::AnchorNotInTargets, "", format!("anchor `{anchor}` does not resolve"))
                    })?;
                    centers[a]
                }
            };
            Ok(centers.iter().map(|(x, y)| ((x - ax).powi(2) + (y - ay).powi(2)).sqrt()).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{ChannelSet, ObjectKind};
    use crate::value::Row;

    fn obj(id: &str, field: &str, v: Value) -> VisualObject {
        let mut d = Row::new();
        d.insert(field.into(), v);
        VisualObject {
            id: id.into(),
            kind: ObjectKind::Mark,
            decl: "bar".into(),
            shape: None,
            scene: None,
            parent: None,
            children: vec![],
            datum: Some(d),
            channels: ChannelSet::default(),
            base: ChannelSet::default(),
        }
    }

    #[test]
    fn country_predicate() {
        let objs: Vec<VisualObject> =
            ["USA", "CAN", "MEX"].iter().map(|c| obj(c, "country", (*c).into())).collect();
        let refs: Vec<&VisualObject> = objs.iter().collect();
        assert_eq!(evaluate_targets(&refs, &Predicate::eq("country", "USA")).unwrap(), vec![true, false, false]);
        assert!(evaluate_targets(&[], &Predicate::eq("country", "USA")).unwrap().is_empty());
        let mut cleared = Predicate::eq("country", "USA");
        cleared.clear();
        assert_eq!(evaluate_targets(&refs, &cleared).unwrap(), vec![false; 3]);
    }

    #[test]
    fn order_is_stable_argsort() {
        let objs: Vec<VisualObject> = [30.0, 10.0, 20.0].iter().enumerate().map(|(i, v)| obj(&i.to_string(), "pop", (*v).into())).collect();
        let refs: Vec<&VisualObject> = objs.iter().collect();
        assert_eq!(order_targets(&refs, "pop", Direction::Asc).unwrap(), vec![1, 2, 0]);
        assert_eq!(order_targets(&refs, "pop", Direction::Desc).unwrap(), vec![0, 2, 1]);
        assert_eq!(order_targets(&refs, "nope", Direction::Asc).unwrap_err().code, Code::UnresolvedVariable);
    }

    #[test]
    fn index_distance() {
        let ids: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let centers = vec![(0.0, 0.0); 5];
        assert_eq!(distance_targets(&ids, &centers, Metric::Index, "2", None).unwrap(), vec![2.0, 1.0, 0.0, 1.0, 2.0]);
        assert_eq!(distance_targets(&ids, &centers, Metric::Index, "9", None).unwrap_err().code, Code::AnchorNotInTargets);
        let e = distance_targets(&ids[..1], &[(3.0, 4.0)], Metric::Euclidean, "x", Some((0.0, 0.0))).unwrap();
        assert_eq!(e, vec![5.0]);
    }
}
