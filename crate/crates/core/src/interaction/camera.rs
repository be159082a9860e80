//! 2D camera: focus point, zoom and rotation over a fixed viewport.

use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic};

pub const MIN_ZOOM: f64 = 0.1;
pub const MAX_ZOOM: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Camera {
    pub focus_x: f64,
    pub focus_y: f64,
    pub zoom: f64,
    pub rotation: f64,
    pub viewport_w: f64,
    pub viewport_h: f64,
    #[serde(default = "min_zoom")]
    pub min_zoom: f64,
    #[serde(default = "max_zoom")]
    pub max_zoom: f64,
}

fn min_zoom() -> f64 {
    MIN_ZOOM
}

fn max_zoom() -> f64 {
    MAX_ZOOM
}

/// One changed camera field, named as in the serialized camera.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CameraDiff {
    pub scene: String,
    pub field: &'static str,
    pub old: f64,
    pub new: f64,
}

impl Camera {
    /// Identity camera: world coordinates equal viewport coordinates.
    pub fn identity(w: f64, h: f64) -> Self {
        Camera {
            focus_x: w / 2.0,
            focus_y: h / 2.0,
            zoom: 1.0,
            rotation: 0.0,
            viewport_w: w,
            viewport_h: h,
            min_zoom: MIN_ZOOM,
            max_zoom: MAX_ZOOM,
        }
    }

    /// (x, y, width, height) of the visible world region, ignoring
    /// rotation.
    pub fn view_box(&self) -> (f64, f64, f64, f64) {
        let w = self.viewport_w / self.zoom;
        let h = self.viewport_h / self.zoom;
        (self.focus_x - w / 2.0, self.focus_y - h / 2.0, w, h)
    }

    fn rotate(&self, x: f64, y: f64, sign: f64) -> (f64, f64) {
        if self.rotation == 0.0 {
            return (x, y);
        }
        let (s, c) = (sign * self.rotation).sin_cos();
        (x * c - y * s, x * s + y * c)
    }

    pub fn screen_to_world(&self, sx: f64, sy: f64) -> (f64, f64) {
        let u = (sx - self.viewport_w / 2.0) / self.zoom;
        let v = (sy - self.viewport_h / 2.0) / self.zoom;
        let (u, v) = self.rotate(u, v, 1.0);
        (self.focus_x + u, self.focus_y + v)
    }

    pub fn world_to_screen(&self, wx: f64, wy: f64) -> (f64, f64) {
        let (u, v) = self.rotate(wx - self.focus_x, wy - self.focus_y, -1.0);
        (self.viewport_w / 2.0 + u * self.zoom, self.viewport_h / 2.0 + v * self.zoom)
    }

    /// Moves the focus against a screen-space drag; zoom is untouched.
    pub fn pan(&self, dx: f64, dy: f64) -> Camera {
        let (dx, dy) = self.rotate(dx / self.zoom, dy / self.zoom, 1.0);
        Camera { focus_x: self.focus_x - dx, focus_y: self.focus_y - dy, ..*self }
    }

    /// Anchor-invariant zoom: the world point under the anchor stays put.
    pub fn zoom_at(&self, factor: f64, ax: f64, ay: f64) -> Result<Camera, Diagnostic> {
        if factor <= 0.0 || !factor.is_finite() {
            return Err(Diagnostic::error(Code::NonPositiveFactor, "", format!("zoom factor {factor} is not positive")));
        }
        let (wx, wy) = self.screen_to_world(ax, ay);
        let zoom = (self.zoom * factor).clamp(self.min_zoom, self.max_zoom);
        let mut c = Camera { zoom, ..*self };
        let (u, v) = c.rotate((ax - self.viewport_w / 2.0) / zoom, (ay - self.viewport_h / 2.0) / zoom, 1.0);
        c.focus_x = wx - u;
        c.focus_y = wy - v;
        Ok(c)
    }

    /// Centers the view on a world point.
    pub fn focus_on(&self, x: f64, y: f64) -> Camera {
        Camera { focus_x: x, focus_y: y, ..*self }
    }

    pub fn diff(&self, other: &Camera, scene: &str) -> Vec<CameraDiff> {
        let fields = [
            ("focusX", self.focus_x, other.focus_x),
            ("focusY", self.focus_y, other.focus_y),
            ("zoom", self.zoom, other.zoom),
            ("rotation", self.rotation, other.rotation),
        ];
        fields
            .into_iter()
            .filter(|(_, a, b)| a != b)
            .map(|(field, old, new)| CameraDiff { scene: scene.to_string(), field, old, new })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn pan_divides_by_zoom() {
        let c = Camera::identity(100.0, 100.0);
        assert_eq!(c.pan(10.0, 0.0).focus_x, 40.0);
        let z = Camera { zoom: 2.0, ..c };
        assert_eq!(z.pan(10.0, 0.0).focus_x, 45.0);
        assert_eq!(c.pan(0.0, 0.0), c);
    }

    #[test]
    fn zoom_at_center_keeps_focus() {
        let c = Camera::identity(100.0, 100.0);
        let z = c.zoom_at(2.0, 50.0, 50.0).unwrap();
        assert_eq!((z.focus_x, z.focus_y, z.zoom), (50.0, 50.0, 2.0));
    }

    #[test]
    fn zoom_at_corner_is_anchor_invariant() {
        let c = Camera::identity(100.0, 100.0);
        let before = c.screen_to_world(0.0, 0.0);
        let z = c.zoom_at(2.0, 0.0, 0.0).unwrap();
        let after = z.screen_to_world(0.0, 0.0);
        assert!(close(before.0, after.0) && close(before.1, after.1));
        let back = z.zoom_at(0.5, 0.0, 0.0).unwrap();
        assert!(close(back.focus_x, c.focus_x) && close(back.focus_y, c.focus_y) && close(back.zoom, 1.0));
    }

    #[test]
    fn zoom_clamps_and_rejects_bad_factors() {
        let c = Camera::identity(100.0, 100.0);
        assert_eq!(c.zoom_at(1000.0, 50.0, 50.0).unwrap().zoom, MAX_ZOOM);
        assert_eq!(c.zoom_at(0.0, 0.0, 0.0).unwrap_err().code, Code::NonPositiveFactor);
        assert_eq!(c.zoom_at(-2.0, 0.0, 0.0).unwrap_err().code, Code::NonPositiveFactor);
    }

    #[test]
    fn rotation_round_trips() {
        let c = Camera { rotation: 0.7, zoom: 1.5, ..Camera::identity(200.0, 100.0) };
        let (wx, wy) = c.screen_to_world(13.0, 77.0);
        let (sx, sy) = c.world_to_screen(wx, wy);
        assert!(close(sx, 13.0) && close(sy, 77.0));
    }
}
