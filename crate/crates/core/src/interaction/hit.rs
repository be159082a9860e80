//! Hit testing against mark geometry in world space.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::interaction::camera::Camera;
use crate::scene::{ChannelSet, MarkShape, ObjectKind, SceneGraph};

/// Screen-pixel tolerance around line and path marks.
pub const LINE_TOLERANCE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HitObject {
    pub object_id: String,
    pub local_x: f64,
    pub local_y: f64,
}

/// Whether world point (px, py) lies on a mark with channels `c`, its
/// parents offsetting it by `origin`.
pub fn contains(shape: MarkShape, c: &ChannelSet, origin: (f64, f64), px: f64, py: f64, zoom: f64) -> bool {
    let x = c.x + origin.0;
    let y = c.y + origin.1;
    match shape {
        MarkShape::Rect | MarkShape::Text | MarkShape::Image => {
            px >= x && px <= x + c.width && py >= y && py <= y + c.height
        }
        MarkShape::Circle => {
            let (dx, dy) = (px - x, py - y);
            dx * dx + dy * dy <= c.radius * c.radius
        }
        MarkShape::Arc => {
            let (dx, dy) = (px - x, py - y);
            let r = (dx * dx + dy * dy).sqrt();
            if r < c.width || r > c.radius {
                return false;
            }
            let span = c.end_angle - c.start_angle;
            if span >= TAU {
                return true;
            }
            let a = dx.atan2(-dy).rem_euclid(TAU);
            let rel = (a - c.start_angle).rem_euclid(TAU);
            rel <= span
        }
        MarkShape::Line | MarkShape::Path => {
            segment_distance(px, py, x, y, x + c.width, y + c.height) <= LINE_TOLERANCE / zoom
        }
    }
}

fn segment_distance(px: f64, py: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    let (vx, vy) = (x1 - x0, y1 - y0);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 { 0.0 } else { (((px - x0) * vx + (py - y0) * vy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (x0 + t * vx, y0 + t * vy);
    ((px - qx).powi(2) + (py - qy).powi(2)).sqrt()
}

/// Top-most visible mark of `scene` under scene-local screen point
/// (sx, sy). Marks inside a glyph report the glyph.
pub fn hit_test(graph: &SceneGraph, scene: &str, camera: &Camera, sx: f64, sy: f64) -> Option<HitObject> {
    let (wx, wy) = camera.screen_to_world(sx, sy);
    let mut best: Option<&str> = None;
    for id in graph.descendants(scene) {
        let o = &graph.objects[id];
        if o.kind != ObjectKind::Mark {
            continue;
        }
        let Some(shape) = o.shape else { continue };
        if graph.is_shown(id) && contains(shape, &o.channels, graph.origin(id), wx, wy, camera.zoom) {
            best = Some(id);
        }
    }
    let id = best?;
    let o = &graph.objects[id];
    let id = match o.parent.as_deref().and_then(|p| graph.objects.get(p)) {
        Some(p) if p.kind == ObjectKind::Glyph => p.id.clone(),
        _ => o.id.clone(),
    };
    Some(HitObject { object_id: id, local_x: wx, local_y: wy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_document;
    use crate::scene::build_scene_graph;

    fn graph(objects: &str) -> SceneGraph {
        let text = format!(
            r#"{{"name":"h","data":[{{"name":"t","rows":[{{"k":"a"}}]}}],"scenes":[{{"name":"main","width":100,"height":100,"objects":[{objects}]}}]}}"#
        );
        build_scene_graph(&parse_document(&text).unwrap().0).unwrap()
    }

    #[test]
    fn circle_radius_boundary() {
        let g = graph(
            r#"{"name":"c","kind":"collection","source":"t","template":{"name":"dot","kind":"mark","shape":"circle","channels":{"x":50,"y":50,"radius":10}}}"#,
        );
        let cam = Camera::identity(100.0, 100.0);
        assert_eq!(hit_test(&g, "main", &cam, 55.0, 50.0).unwrap().object_id, "c/a");
        assert!(hit_test(&g, "main", &cam, 61.0, 50.0).is_none());
    }

    #[test]
    fn later_painted_wins_and_glyphs_are_reported() {
        let g = graph(
            r#"{"name":"c","kind":"collection","source":"t","template":{"name":"g","kind":"glyph","parts":[
                {"name":"under","kind":"mark","shape":"rect","channels":{"x":0,"y":0,"width":50,"height":50}},
                {"name":"over","kind":"mark","shape":"rect","channels":{"x":25,"y":25,"width":50,"height":50}}]}}"#,
        );
        let cam = Camera::identity(100.0, 100.0);
        assert_eq!(hit_test(&g, "main", &cam, 30.0, 30.0).unwrap().object_id, "c/a");
    }

    #[test]
    fn arcs_measure_clockwise_from_twelve() {
        let c = ChannelSet { x: 0.0, y: 0.0, width: 5.0, radius: 10.0, start_angle: 0.0, end_angle: TAU / 4.0, ..Default::default() };
        assert!(contains(MarkShape::Arc, &c, (0.0, 0.0), 1.0, -7.0, 1.0));
        assert!(contains(MarkShape::Arc, &c, (0.0, 0.0), 7.0, -1.0, 1.0));
        assert!(!contains(MarkShape::Arc, &c, (0.0, 0.0), -7.0, -1.0, 1.0));
        assert!(!contains(MarkShape::Arc, &c, (0.0, 0.0), 1.0, -2.0, 1.0));
    }

    #[test]
    fn line_tolerance_is_in_screen_pixels() {
        let c = ChannelSet { x: 0.0, y: 10.0, width: 100.0, height: 0.0, ..Default::default() };
        assert!(contains(MarkShape::Line, &c, (0.0, 0.0), 50.0, 12.9, 1.0));
        assert!(!contains(MarkShape::Line, &c, (0.0, 0.0), 50.0, 12.9, 2.0));
    }
}
