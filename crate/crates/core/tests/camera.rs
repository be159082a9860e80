mod common;

use proptest::prelude::*;
use vizact_core::interaction::Camera;

#[test]
fn thousand_random_sequences() {
    common::camera_sequence_check(1000, 1).unwrap();
}

#[test]
fn camera_scripts_touch_only_cameras() {
    common::camera_conservation_check(10, 2).unwrap();
}

#[test]
fn non_positive_zoom_is_rejected() {
    let c = Camera::identity(400.0, 300.0);
    assert!(c.zoom_at(0.0, 10.0, 10.0).is_err());
    assert!(c.zoom_at(-2.0, 10.0, 10.0).is_err());
    assert!(c.zoom_at(f64::NAN, 10.0, 10.0).is_err());
}

#[test]
fn zoom_is_clamped() {
    let c = Camera::identity(400.0, 300.0).zoom_at(1e9, 0.0, 0.0).unwrap();
    assert_eq!(c.zoom, c.max_zoom);
}

fn cam() -> impl Strategy<Value = Camera> {
    (-500f64..500.0, -500f64..500.0, 0.25f64..8.0, -3f64..3.0).prop_map(|(fx, fy, z, r)| Camera {
        focus_x: fx,
        focus_y: fy,
        zoom: z,
        rotation: r,
        ..Camera::identity(400.0, 300.0)
    })
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn zoom_keeps_the_anchor(c in cam(), f in 0.5f64..2.0, ax in 0f64..400.0, ay in 0f64..300.0) {
        let (wx, wy) = c.screen_to_world(ax, ay);
        let (nx, ny) = c.zoom_at(f, ax, ay).unwrap().screen_to_world(ax, ay);
        prop_assert!(near(wx, nx) && near(wy, ny));
    }

    #[test]
    fn zoom_inverse(c in cam(), f in 0.5f64..2.0, ax in 0f64..400.0, ay in 0f64..300.0) {
        let back = c.zoom_at(f, ax, ay).unwrap().zoom_at(1.0 / f, ax, ay).unwrap();
        prop_assert!(near(back.zoom, c.zoom) && near(back.focus_x, c.focus_x) && near(back.focus_y, c.focus_y));
    }

    #[test]
    fn pan_inverse_and_keeps_zoom(c in cam(), dx in -300f64..300.0, dy in -300f64..300.0) {
        let p = c.pan(dx, dy);
        prop_assert_eq!(p.zoom, c.zoom);
        let back = p.pan(-dx, -dy);
        prop_assert!(near(back.focus_x, c.focus_x) && near(back.focus_y, c.focus_y));
    }

    #[test]
    fn pan_moves_content_with_the_pointer(c in cam(), dx in -300f64..300.0, dy in -300f64..300.0, wx in -500f64..500.0, wy in -500f64..500.0) {
        let (sx, sy) = c.world_to_screen(wx, wy);
        let (tx, ty) = c.pan(dx, dy).world_to_screen(wx, wy);
        prop_assert!(near(tx - sx, dx) && near(ty - sy, dy));
    }

    #[test]
    fn screen_world_round_trip(c in cam(), wx in -1e3f64..1e3, wy in -1e3f64..1e3) {
        let (sx, sy) = c.world_to_screen(wx, wy);
        let (rx, ry) = c.screen_to_world(sx, sy);
        prop_assert!(near(rx, wx) && near(ry, wy));
    }
}
