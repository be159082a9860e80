//! Checks shared by the per-area test files and the acceptance report.
//! Each returns a short detail line on success and the reason on failure.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use vizact_core::compiler::classify::classify_interaction;
use vizact_core::compiler::compile_document;
use vizact_core::compiler::explain::{explain_document, row};
use vizact_core::compiler::graph::Metric;
use vizact_core::fixtures::{self, ALL};
use vizact_core::interaction::{distance_targets, evaluate_targets, hit_test, Camera, Event, EventKind, Predicate};
use vizact_core::model::{parse_document, parse_document_bytes, Document};
use vizact_core::registry::Registry;
use vizact_core::runtime::{Runtime, TraceEntry};
use vizact_core::scene::{build_scene_graph, ObjectKind, SceneGraph, VisualObject};
use vizact_core::Value;

pub type Check = Result<String, String>;

pub const REGISTRY_JSON: &str = include_str!("../../data/registry.json");
pub const TAXONOMY: &str = include_str!("../../fixtures/taxonomy.json");
pub const DNM: &str = include_str!("../../fixtures/dnm.json");
pub const ONSET: &str = include_str!("../../fixtures/onset.json");

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(took)
}

pub fn doc(text: &str) -> Document {
    match parse_document(text) {
        Ok((d, _)) => d,
        Err(e) => panic!("document does not parse: {e:?}"),
    }
}

pub fn fixture_json(name: &str) -> Json {
    serde_json::from_str(fixtures::get(name).expect("known fixture").doc).unwrap()
}

pub fn doc_from(v: &Json) -> Document {
    doc(&v.to_string())
}

/// Member objects of collection declaration `coll`, in paint order.
pub fn members<'a>(g: &'a SceneGraph, coll: &str) -> Vec<&'a VisualObject> {
    g.paint_order()
        .into_iter()
        .map(|id| &g.objects[id])
        .filter(|o| {
            o.parent
                .as_deref()
                .and_then(|p| g.objects.get(p))
                .is_some_and(|p| p.kind == ObjectKind::Collection && p.decl == coll)
        })
        .collect()
}

// ---- registry -------------------------------------------------------------

pub const PARTITION: [(&str, &[&str]); 4] = [
    ("AI1", &["select", "annotate", "reconfigure"]),
    ("AI2", &["steer"]),
    ("AI3", &["encode", "enter_exit"]),
    ("AI4", &["filter", "abstract_elaborate", "derive"]),
];

/// (id, user intents, scope, signature).
pub const SIGNATURES: [(&str, &[&str], &str, &str); 27] = [
    ("point_select", &["select"], "S", "(hit_object | predicate) evaluator evaluation_scale"),
    ("multi_select", &["select"], "S", "(hit_object | predicate) evaluator evaluation_scale"),
    ("range_select", &["select"], "S", "(mouse_params | predicate) evaluator evaluation_scale"),
    ("generalized_select", &["select"], "S/M", "hit_object predicate evaluator evaluation_scale"),
    ("linked_select", &["select"], "M", "(mouse_params | hit_object) predicate evaluator evaluation_scale"),
    ("deselect", &["select"], "S/M", "[hit_object] predicate evaluator evaluation_scale"),
    ("show_hide_reference_lines", &["annotate"], "S", "(hit_object | predicate) [mouse_params]"),
    ("show_hide_tooltip_container", &["annotate"], "S", "(hit_object | predicate) [mouse_params]"),
    ("reposition", &["reconfigure"], "S/M", "(state_variable | mouse_params)"),
    ("sort", &["reconfigure"], "S", "field_reference evaluator:order"),
    ("organize_views", &["reconfigure"], "M", "mouse_params evaluator:layout"),
    ("geometric_zoom", &["steer"], "S", "mouse_params camera"),
    ("pan", &["steer"], "S", "mouse_params camera"),
    ("toggle_views", &["steer"], "M", "(camera | state_variable)"),
    ("navigate_scene_section", &["steer"], "M", "component_reference [mouse_params]"),
    ("change_field_in_encoding", &["encode"], "S", "encoding scale"),
    ("change_chart_type", &["encode"], "S", "state_variable encoding scale"),
    ("click_to_add_data_points", &["enter_exit"], "S", "target_data"),
    ("dynamic_queries", &["filter"], "S/M", "predicate (evaluator + evaluation_scale | target_data)"),
    ("details_on_demand", &["filter"], "S", "hit_object predicate target_data"),
    ("cross_filter", &["filter"], "M", "[hit_object] predicate (evaluator + evaluation_scale | target_data)"),
    ("move_up_down_hierarchy", &["abstract_elaborate"], "S/M", "state_variable target_data"),
    ("drill_down_roll_up", &["abstract_elaborate"], "S/M", "state_variable target_data"),
    ("recompute_field_new_baseline", &["derive"], "S", "state_variable target_data"),
    ("change_aggregator", &["derive"], "S", "state_variable target_data"),
    ("semantic_zoom", &["steer", "abstract_elaborate"], "S", "camera state_variable target_data"),
    ("direct_walk", &["select", "steer"], "M", "(hit_object | predicate) camera evaluator evaluation_scale"),
];

pub fn registry_check() -> Check {
    let start = Instant::now();
    let r = Registry::from_json(REGISTRY_JSON)?;
    let ids: Vec<&str> = r.intents.iter().map(|a| a.id.as_str()).collect();
    ensure!(ids == ["AI1", "AI2", "AI3", "AI4"], "authoring intents {ids:?}");
    for (a, (id, users)) in r.intents.iter().zip(PARTITION) {
        let got: Vec<&str> = a.user_intents.iter().map(|u| u.id.as_str()).collect();
        ensure!(a.id == id && got == users, "{} holds {got:?}, want {users:?}", a.id);
    }
    let users: Vec<&str> = r.intents.iter().flat_map(|a| a.user_intents.iter().map(|u| u.id.as_str())).collect();
    let distinct: BTreeSet<&str> = users.iter().copied().collect();
    ensure!(users.len() == 9 && distinct.len() == 9, "user intents are not a 9-way partition: {users:?}");
    ensure!(r.techniques.len() == 27, "{} techniques", r.techniques.len());
    for (id, intents, scope, notation) in SIGNATURES {
        let t = r.signature_of(id).map_err(|d| d.message)?;
        ensure!(t.id == id, "{id} resolves to {}", t.id);
        ensure!(t.user_intents == intents, "{id}: intents {:?}", t.user_intents);
        ensure!(t.scope.name() == scope, "{id}: scope {}", t.scope.name());
        ensure!(t.notation() == notation, "{id}: signature `{}`", t.notation());
        for u in intents {
            let listed = r.techniques_for_user_intent(u).map_err(|d| d.message)?;
            ensure!(listed.contains(&id), "{id} missing from intent {u}");
        }
    }
    let took = within(start, Duration::from_secs(1), "registry load and check")?;
    Ok(format!("4 authoring intents, 9 user intents, 27 signatures in {took:?}"))
}

// ---- round trip -------------------------------------------------------------

pub fn roundtrip_check() -> Check {
    let start = Instant::now();
    let r = Registry::builtin();
    let d = doc(TAXONOMY);
    let out = compile_document(r, &d);
    ensure!(out.diagnostics.iter().all(|x| x.severity != vizact_core::Severity::Error), "{:?}", out.diagnostics);
    let mut ok = 0;
    let mut seen = BTreeSet::new();
    for ci in &out.interactions {
        let rep = classify_interaction(r, &ci.unit, &ci.graph, &d);
        let first = rep.candidates.first().map(|c| c.technique.as_str());
        ensure!(
            rep.technique.as_deref() == Some(ci.technique.as_str()) && first == Some(ci.technique.as_str()),
            "{} instantiated as {} classifies as {:?} (top {:?})",
            ci.unit,
            ci.technique,
            rep.technique,
            first
        );
        seen.insert(ci.technique.clone());
        ok += 1;
    }
    let all: BTreeSet<String> = r.techniques.iter().map(|t| t.id.clone()).collect();
    ensure!(seen == all, "round trip covers {} of {} techniques", seen.len(), all.len());
    let took = within(start, Duration::from_secs(5), "round trip")?;
    Ok(format!("{ok}/27 in {took:?}"))
}

// ---- explain ----------------------------------------------------------------

pub const DNM_TABLE: [[&str; 8]; 2] = [
    ["Add Magnet", "enter", "add mark", "choose field", "dropdown menu", "none", "new magnet", "target data"],
    [
        "Move Magnet",
        "reconfigure",
        "reposition",
        "click + drag",
        "canvas",
        "magnet",
        "all dust particles",
        "component references, target evaluator",
    ],
];

pub const ONSET_TABLE: [[&str; 8]; 4] = [
    ["Add Matrix", "enter", "add collection", "choose set", "set list", "none", "new matrix", "target data"],
    [
        "Move Matrix",
        "select",
        "point select",
        "click + drag",
        "canvas",
        "matrix",
        "all matrices",
        "predicate, target evaluator, evaluation scale",
    ],
    ["Compare Matrices", "abstract", "move up a hierarchy", "drag end", "canvas", "matrix", "all matrices", "target data"],
    [
        "Change Operator",
        "derive",
        "change aggregator",
        "click",
        "canvas",
        "operator mark",
        "matrix",
        "state variable (logical operator), target data",
    ],
];

pub fn explain_rows(text: &str) -> Result<Vec<[String; 8]>, String> {
    let r = Registry::builtin();
    let reports = explain_document(r, &doc(text)).map_err(|d| format!("{d:?}"))?;
    Ok(reports.iter().map(|rep| row(r, rep)).collect())
}

fn table_matches(name: &str, got: &[[String; 8]], want: &[[&str; 8]]) -> Result<(), String> {
    ensure!(got.len() == want.len(), "{name}: {} rows, want {}", got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        for (c, (a, b)) in g.iter().zip(w).enumerate() {
            ensure!(a == b, "{name} `{}` column {c}: `{a}`, want `{b}`", w[0]);
        }
    }
    Ok(())
}

pub fn explain_check() -> Check {
    table_matches("DnM", &explain_rows(DNM)?, &DNM_TABLE)?;
    table_matches("OnSet", &explain_rows(ONSET)?, &ONSET_TABLE)?;
    Ok("DnM 2/2 rows, OnSet 4/4 rows".into())
}

// ---- golden traces ------------------------------------------------------------

pub fn golden_check() -> Check {
    let start = Instant::now();
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for f in &ALL {
        let a = f.trace();
        let b = f.trace();
        ensure!(a == b, "{} differs between runs", f.name);
        let want = std::fs::read_to_string(dir.join(format!("{}.trace.jsonl", f.name))).map_err(|e| e.to_string())?;
        ensure!(a == want, "{} differs from its golden trace", f.name);
    }
    let took = within(start, Duration::from_secs(10), "golden traces")?;
    Ok(format!("{} fixtures byte-identical in {took:?}", ALL.len()))
}

// ---- predicates ---------------------------------------------------------------

pub fn predicate_check() -> Check {
    let g = build_scene_graph(&fixtures::get("bars").unwrap().document()).map_err(|d| format!("{d:?}"))?;
    let bars = members(&g, "bars");
    let keys: Vec<&str> = bars.iter().map(|o| o.key()).collect();
    ensure!(keys == ["USA", "China", "Japan"], "bars {keys:?}");

    let eq = evaluate_targets(&bars, &Predicate::eq("country", "USA")).map_err(|d| d.message)?;
    ensure!(eq == [true, false, false], "country = USA gives {eq:?}");

    let all: Vec<Value> = ["USA", "China", "Japan"].into_iter().map(Value::from).collect();
    let every = evaluate_targets(&bars, &Predicate::one_of("country", all)).map_err(|d| d.message)?;
    ensure!(every == [true, true, true], "in [all three] gives {every:?}");
    let some = evaluate_targets(&bars, &Predicate::one_of("country", vec!["USA".into(), "Japan".into()]))
        .map_err(|d| d.message)?;
    ensure!(some == [true, false, true], "in [USA, Japan] gives {some:?}");

    let xs = [24.999, 25.0, 50.0, 50.001];
    let probes: Vec<VisualObject> = xs
        .iter()
        .map(|&x| {
            let mut o = bars[0].clone();
            o.channels.x = x;
            o
        })
        .collect();
    let refs: Vec<&VisualObject> = probes.iter().collect();
    let between = evaluate_targets(&refs, &Predicate::between("@x", 25.0, 50.0)).map_err(|d| d.message)?;
    ensure!(between == [false, true, true, false], "@x between [25,50] gives {between:?}");

    let ids: Vec<String> = ["a", "b", "c", "d", "e"].into_iter().map(String::from).collect();
    let dist = distance_targets(&ids, &[(0.0, 0.0); 5], Metric::Index, "c", None).map_err(|d| d.message)?;
    ensure!(dist == [2.0, 1.0, 0.0, 1.0, 2.0], "index distance gives {dist:?}");
    Ok("eq, in, inclusive between, index distance".into())
}

// ---- camera ---------------------------------------------------------------------

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn random_camera(rng: &mut ChaCha8Rng) -> Camera {
    let mut c = Camera::identity(rng.random_range(100.0..800.0), rng.random_range(100.0..600.0));
    c.focus_x = rng.random_range(-500.0..500.0);
    c.focus_y = rng.random_range(-500.0..500.0);
    c.zoom = rng.random_range(0.25..8.0);
    c.rotation = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(-3.0..3.0) };
    c
}

/// Walks `sequences` random pan/zoom sequences checking anchor invariance,
/// inverses and that pan never touches zoom.
pub fn camera_sequence_check(sequences: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-9;
    let mut steps = 0;
    for _ in 0..sequences {
        let mut cam = random_camera(&mut rng);
        for _ in 0..rng.random_range(1..20) {
            steps += 1;
            if rng.random_bool(0.5) {
                let (dx, dy) = (rng.random_range(-300.0..300.0), rng.random_range(-300.0..300.0));
                let next = cam.pan(dx, dy);
                ensure!(next.zoom == cam.zoom, "pan changed zoom {} -> {}", cam.zoom, next.zoom);
                let back = next.pan(-dx, -dy);
                ensure!(
                    close(back.focus_x, cam.focus_x, tol) && close(back.focus_y, cam.focus_y, tol),
                    "pan inverse drifted: {cam:?} vs {back:?}"
                );
                cam = next;
            } else {
                let f = rng.random_range(0.5..2.0);
                let (ax, ay) = (rng.random_range(0.0..cam.viewport_w), rng.random_range(0.0..cam.viewport_h));
                let before = cam.screen_to_world(ax, ay);
                let next = cam.zoom_at(f, ax, ay).map_err(|d| d.message)?;
                let after = next.screen_to_world(ax, ay);
                ensure!(
                    close(before.0, after.0, tol) && close(before.1, after.1, tol),
                    "anchor moved from {before:?} to {after:?}"
                );
                let clamped = next.zoom != cam.zoom * f;
                if !clamped {
                    let back = next.zoom_at(1.0 / f, ax, ay).map_err(|d| d.message)?;
                    ensure!(
                        close(back.zoom, cam.zoom, tol)
                            && close(back.focus_x, cam.focus_x, tol)
                            && close(back.focus_y, cam.focus_y, tol),
                        "zoom inverse drifted: {cam:?} vs {back:?}"
                    );
                }
                cam = next;
            }
            let (wx, wy) = (rng.random_range(-1e3..1e3), rng.random_range(-1e3..1e3));
            let (sx, sy) = cam.world_to_screen(wx, wy);
            let (rx, ry) = cam.screen_to_world(sx, sy);
            ensure!(close(rx, wx, tol) && close(ry, wy, tol), "screen/world round trip drifted");
        }
    }
    Ok(format!("{sequences} sequences, {steps} steps within 1e-9"))
}

// ---- family conservation ----------------------------------------------------------

/// Random pointer script over a `w` x `h` page: clicks (some with shift),
/// hovers, and press-move-release gestures.
pub fn pointer_script(rng: &mut ChaCha8Rng, n: usize, w: f64, h: f64) -> Vec<Event> {
    let mut out = Vec::new();
    let mut tick = 0;
    let mut next = || {
        tick += 1;
        tick
    };
    while out.len() < n {
        let (x, y) = (rng.random_range(0.0..w), rng.random_range(0.0..h));
        match rng.random_range(0..4) {
            0 => {
                let mut e = Event::at(next(), EventKind::Click, x, y);
                if rng.random_bool(0.3) {
                    e.key = Some("shift".into());
                }
                out.push(e);
            }
            1 => out.push(Event::at(next(), EventKind::PointerMove, x, y)),
            2 => out.push(Event::at(next(), EventKind::Click, x, y)),
            _ => {
                out.push(Event::at(next(), EventKind::PointerDown, x, y));
                let (mut px, mut py) = (x, y);
                for _ in 0..rng.random_range(1..4) {
                    px = (px + rng.random_range(-60.0..60.0)).clamp(0.0, w);
                    py = (py + rng.random_range(-60.0..60.0)).clamp(0.0, h);
                    out.push(Event::at(next(), EventKind::PointerMove, px, py));
                }
                out.push(Event::at(next(), EventKind::PointerUp, px, py));
            }
        }
    }
    out
}

pub fn run_events(d: &Document, events: &[Event]) -> Result<(Runtime, Vec<TraceEntry>), String> {
    let mut rt = Runtime::load(Registry::builtin(), d).map_err(|e| format!("{e:?}"))?;
    let trace = events.iter().map(|e| rt.dispatch(e)).collect();
    Ok((rt, trace))
}

fn keep_units(mut v: Json, units: &[&str]) -> Json {
    let list = v["interactions"].as_array_mut().unwrap();
    list.retain(|u| units.contains(&u["name"].as_str().unwrap_or("")));
    v
}

/// Select-family documents and their page size.
pub fn select_docs() -> Vec<(&'static str, Document, f64, f64)> {
    vec![
        ("bars", doc_from(&fixture_json("bars")), 400.0, 300.0),
        ("scatter", doc_from(&keep_units(fixture_json("scatter"), &["pick"])), 420.0, 300.0),
        ("date-series", doc_from(&fixture_json("date-series")), 500.0, 260.0),
        ("sunburst-lite", doc_from(&fixture_json("sunburst-lite")), 300.0, 300.0),
        ("dashboard", doc_from(&keep_units(fixture_json("dashboard"), &["link"])), 580.0, 260.0),
    ]
}

pub fn select_conservation_check(scripts: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = 0;
    let mut touched = 0;
    for (name, d, w, h) in select_docs() {
        for _ in 0..scripts {
            let script = pointer_script(&mut rng, 40, w, h);
            let (_, trace) = run_events(&d, &script)?;
            for e in &trace {
                ensure!(
                    e.camera_diffs.is_empty() && e.data_diffs.is_empty(),
                    "{name} tick {} ({}): camera {:?} data {:?}",
                    e.tick,
                    e.event,
                    e.camera_diffs,
                    e.data_diffs
                );
                touched += usize::from(!e.channel_diffs.is_empty());
            }
            events += trace.len();
        }
    }
    ensure!(touched > 0, "no select script changed a channel");
    Ok(format!("{events} events, {touched} with channel diffs, none with camera or data diffs"))
}

/// Scatter and bars with the camera on and only camera techniques bound.
pub fn camera_docs() -> Vec<(&'static str, Document, f64, f64)> {
    let mk = |name: &str, scene: &str, target: &str| {
        let mut v = fixture_json(name);
        v["scenes"][0]["cameraEnabled"] = json!(true);
        v["interactions"] = json!([
            {"name": "zoom", "on": {"event": "wheel", "listener": scene}, "target": target, "technique": "geometric_zoom"},
            {"name": "zoomIn", "on": {"event": "double_click", "listener": scene}, "target": target, "technique": "geometric_zoom"},
            {"name": "pan", "on": {"event": "drag", "listener": scene}, "target": target, "technique": "pan"}
        ]);
        doc_from(&v)
    };
    vec![("bars", mk("bars", "chart", "bars"), 400.0, 300.0), ("scatter", mk("scatter", "plot", "cars"), 420.0, 300.0)]
}

pub fn camera_script(rng: &mut ChaCha8Rng, n: usize, w: f64, h: f64) -> Vec<Event> {
    let mut out = pointer_script(rng, n, w, h);
    for e in out.iter_mut() {
        if e.kind == EventKind::Click && rng.random_bool(0.5) {
            *e = if rng.random_bool(0.5) {
                Event::wheel(e.tick, e.x.unwrap(), e.y.unwrap(), rng.random_range(-3.0..3.0))
            } else {
                Event::at(e.tick, EventKind::DoubleClick, e.x.unwrap(), e.y.unwrap())
            };
        }
    }
    out
}

pub fn camera_conservation_check(scripts: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = 0;
    let mut moved = 0;
    for (name, d, w, h) in camera_docs() {
        for _ in 0..scripts {
            let script = camera_script(&mut rng, 40, w, h);
            let (_, trace) = run_events(&d, &script)?;
            for e in &trace {
                ensure!(
                    e.channel_diffs.is_empty() && e.data_diffs.is_empty(),
                    "{name} tick {} ({}): channel {:?} data {:?}",
                    e.tick,
                    e.event,
                    e.channel_diffs,
                    e.data_diffs
                );
                if e.matched == ["pan"] {
                    ensure!(e.camera_diffs.iter().all(|c| c.field != "zoom"), "{name} tick {}: pan zoomed", e.tick);
                }
                moved += usize::from(!e.camera_diffs.is_empty());
            }
            events += trace.len();
        }
    }
    ensure!(moved > 0, "no camera script moved a camera");
    Ok(format!("{events} events, {moved} with camera diffs, none with channel or data diffs"))
}

// ---- dynamic queries --------------------------------------------------------------

pub struct DqCase {
    pub fixture: &'static str,
    pub collection: &'static str,
    pub control: &'static str,
    pub field: &'static str,
}

pub const DQ_CASES: [DqCase; 4] = [
    DqCase { fixture: "bars", collection: "bars", control: "valueSlider", field: "value" },
    DqCase { fixture: "bars", collection: "bars", control: "regionPick", field: "region" },
    DqCase { fixture: "scatter", collection: "cars", control: "hpSlider", field: "hp" },
    DqCase { fixture: "scatter", collection: "cars", control: "originPick", field: "origin" },
];

fn dq_doc(c: &DqCase, path: &str) -> Document {
    let mut v = fixture_json(c.fixture);
    v["interactions"] = json!([{
        "name": "query", "on": {"event": "ui_change", "listener": c.control},
        "target": c.collection, "technique": "dynamic_queries", "bindings": {"path": path}
    }]);
    doc_from(&v)
}

pub fn visible_keys(rt: &Runtime, coll: &str) -> BTreeSet<String> {
    members(&rt.graph, coll).into_iter().filter(|o| rt.graph.is_shown(&o.id)).map(|o| o.key().to_string()).collect()
}

/// Rows the query should keep, computed straight from the table.
fn expected_keys(d: &Document, c: &DqCase, value: &Value) -> BTreeSet<String> {
    let table = &d.data[0];
    let key = table.key_field().unwrap();
    table
        .rows
        .iter()
        .filter(|r| match value {
            Value::Number(n) => r.get(c.field).and_then(Value::as_f64).is_some_and(|v| v <= *n),
            Value::String(s) if s == "All" => true,
            other => r.get(c.field) == Some(other),
        })
        .map(|r| r[key].key_string())
        .collect()
}

pub fn dq_script(rng: &mut ChaCha8Rng, d: &Document, c: &DqCase, n: usize) -> Vec<Event> {
    let (_, ctrl) = d.control(c.control).expect("control exists");
    (1..=n as u64)
        .map(|t| {
            let v: Value = if ctrl.options.is_empty() {
                let [lo, hi] = ctrl.domain.expect("slider domain");
                match rng.random_range(0..3) {
                    0 => Value::from(rng.random_range(lo..=hi).round()),
                    1 => Value::from(rng.random_range(lo..=hi)),
                    _ => Value::from(if rng.random_bool(0.5) { lo } else { hi }),
                }
            } else {
                ctrl.options[rng.random_range(0..ctrl.options.len())].clone()
            };
            Event::ui(t, c.control, v)
        })
        .collect()
}

pub fn dq_equivalence_check(events: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0;
    for c in &DQ_CASES {
        let (da, db) = (dq_doc(c, "evaluator"), dq_doc(c, "target_data"));
        let script = dq_script(&mut rng, &da, c, events);
        let mut a = Runtime::load(Registry::builtin(), &da).map_err(|e| format!("{e:?}"))?;
        let mut b = Runtime::load(Registry::builtin(), &db).map_err(|e| format!("{e:?}"))?;
        ensure!(visible_keys(&a, c.collection) == visible_keys(&b, c.collection), "{} differs at load", c.control);
        for e in &script {
            let (ta, tb) = (a.dispatch(e), b.dispatch(e));
            ensure!(ta.errors.is_empty() && tb.errors.is_empty(), "errors {:?} {:?}", ta.errors, tb.errors);
            let (ka, kb) = (visible_keys(&a, c.collection), visible_keys(&b, c.collection));
            ensure!(ka == kb, "{} tick {}: evaluator {ka:?} vs target_data {kb:?}", c.control, e.tick);
            let want = expected_keys(&da, c, e.value.as_ref().unwrap());
            ensure!(ka == want, "{} tick {}: {ka:?}, want {want:?}", c.control, e.tick);
            compared += 1;
        }
    }
    Ok(format!("{compared} events over bars and scatter controls, identical key sets"))
}

// ---- hit testing ------------------------------------------------------------------

pub struct HitScene {
    pub doc: Document,
    pub rects: Vec<(String, f64, f64, f64, f64)>,
    pub dots: Vec<(String, f64, f64, f64)>,
}

pub fn random_hit_scene(rng: &mut ChaCha8Rng) -> HitScene {
    let rects: Vec<_> = (0..rng.random_range(1..12))
        .map(|i| {
            (
                format!("r{i}"),
                rng.random_range(0.0..350.0),
                rng.random_range(0.0..250.0),
                rng.random_range(0.0..120.0),
                rng.random_range(0.0..120.0),
            )
        })
        .collect();
    let dots: Vec<_> = (0..rng.random_range(1..12))
        .map(|i| {
            (format!("d{i}"), rng.random_range(0.0..400.0), rng.random_range(0.0..300.0), rng.random_range(0.0..40.0))
        })
        .collect();
    let id = json!({"kind": "linear", "domain": [0, 1000], "range": [0, 1000]});
    let scale = |n: &str| {
        let mut s = id.clone();
        s["name"] = json!(n);
        s
    };
    let v = json!({
        "name": "hits",
        "data": [
            {"name": "boxes", "key": "id",
             "fields": [{"name": "id", "kind": "string"}, {"name": "x", "kind": "number"}, {"name": "y", "kind": "number"},
                        {"name": "w", "kind": "number"}, {"name": "h", "kind": "number"}],
             "rows": rects.iter().map(|(i, x, y, w, h)| json!({"id": i, "x": x, "y": y, "w": w, "h": h})).collect::<Vec<_>>()},
            {"name": "points", "key": "id",
             "fields": [{"name": "id", "kind": "string"}, {"name": "x", "kind": "number"}, {"name": "y", "kind": "number"},
                        {"name": "r", "kind": "number"}],
             "rows": dots.iter().map(|(i, x, y, r)| json!({"id": i, "x": x, "y": y, "r": r})).collect::<Vec<_>>()}
        ],
        "scales": [scale("px")],
        "scenes": [{"name": "s", "width": 400, "height": 300,
            "objects": [
                {"name": "rects", "kind": "collection", "source": "boxes", "items": "rects",
                 "template": {"name": "rect", "kind": "mark", "shape": "rect"}},
                {"name": "dots", "kind": "collection", "source": "points", "items": "dots",
                 "template": {"name": "dot", "kind": "mark", "shape": "circle"}}
            ],
            "encodings": [
                {"name": "rx", "target": "rects", "field": "x", "channel": "x", "scale": "px"},
                {"name": "ry", "target": "rects", "field": "y", "channel": "y", "scale": "px"},
                {"name": "rw", "target": "rects", "field": "w", "channel": "width", "scale": "px"},
                {"name": "rh", "target": "rects", "field": "h", "channel": "height", "scale": "px"},
                {"name": "dx", "target": "dots", "field": "x", "channel": "x", "scale": "px"},
                {"name": "dy", "target": "dots", "field": "y", "channel": "y", "scale": "px"},
                {"name": "dr", "target": "dots", "field": "r", "channel": "radius", "scale": "px"}
            ]}],
        "interactions": []
    });
    HitScene { doc: doc_from(&v), rects, dots }
}

/// Brute force: map the probe to world space by hand and return the last
/// painted shape containing it.
pub fn brute_hit(s: &HitScene, cam: &Camera, sx: f64, sy: f64) -> Option<String> {
    let u = (sx - cam.viewport_w / 2.0) / cam.zoom;
    let v = (sy - cam.viewport_h / 2.0) / cam.zoom;
    let (sin, cos) = cam.rotation.sin_cos();
    let (wx, wy) = (cam.focus_x + u * cos - v * sin, cam.focus_y + u * sin + v * cos);
    let mut best = None;
    for (i, x, y, w, h) in &s.rects {
        if wx >= *x && wx <= x + w && wy >= *y && wy <= y + h {
            best = Some(format!("rects/{i}"));
        }
    }
    for (i, x, y, r) in &s.dots {
        if (wx - x).powi(2) + (wy - y).powi(2) <= r * r {
            best = Some(format!("dots/{i}"));
        }
    }
    best
}

pub fn hit_oracle_check(scenes: usize, probes_per_scene: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut probes, mut hits) = (0, 0);
    for _ in 0..scenes {
        let s = random_hit_scene(&mut rng);
        let g = build_scene_graph(&s.doc).map_err(|d| format!("{d:?}"))?;
        let mut cam = Camera::identity(400.0, 300.0);
        cam.focus_x = rng.random_range(100.0..300.0);
        cam.focus_y = rng.random_range(80.0..220.0);
        cam.zoom = rng.random_range(0.5..3.0);
        cam.rotation = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(-1.0..1.0) };
        for _ in 0..probes_per_scene {
            let (sx, sy) = (rng.random_range(0.0..400.0), rng.random_range(0.0..300.0));
            let got = hit_test(&g, "s", &cam, sx, sy).map(|h| h.object_id);
            let want = brute_hit(&s, &cam, sx, sy);
            ensure!(got == want, "probe ({sx}, {sy}) with {cam:?}: {got:?}, want {want:?}");
            probes += 1;
            hits += usize::from(want.is_some());
        }
    }
    ensure!(hits > probes / 10 && hits < probes, "degenerate probe mix: {hits}/{probes} hits");
    Ok(format!("{probes} probes over {scenes} scenes, {hits} hits, all match"))
}

// ---- parser fuzz ------------------------------------------------------------------

fn mutate_bytes(rng: &mut ChaCha8Rng, src: &[u8]) -> Vec<u8> {
    const SPECIAL: &[u8] = b"{}[]\":,-.0123456789eEtrufalsn \\\x00\xff";
    let mut b = src.to_vec();
    for _ in 0..rng.random_range(1..6) {
        if b.is_empty() {
            b.push(b'{');
        }
        let i = rng.random_range(0..b.len());
        match rng.random_range(0..6) {
            0 => {
                b.remove(i);
            }
            1 => b.insert(i, SPECIAL[rng.random_range(0..SPECIAL.len())]),
            2 => b[i] = rng.random_range(0..=255u8),
            3 => b.truncate(i),
            4 => {
                let j = rng.random_range(i..b.len().min(i + 64) + 1).min(b.len());
                let chunk = b[i..j].to_vec();
                let k = rng.random_range(0..=b.len());
                b.splice(k..k, chunk);
            }
            _ => {
                let j = rng.random_range(0..b.len());
                b.swap(i, j);
            }
        }
    }
    b
}

fn random_json(rng: &mut ChaCha8Rng) -> Json {
    match rng.random_range(0..8) {
        0 => Json::Null,
        1 => json!(rng.random_bool(0.5)),
        2 => json!(rng.random_range(-1e6..1e6)),
        3 => json!(-1),
        4 => json!(""),
        5 => json!(["USA", 3, null]),
        6 => json!({"name": "x"}),
        _ => json!("bars"),
    }
}

/// Replaces, deletes or retypes one random node of the document tree.
fn mutate_tree(rng: &mut ChaCha8Rng, v: &mut Json) {
    let mut cur = v;
    loop {
        let n = match &*cur {
            Json::Object(m) => m.len(),
            Json::Array(a) => a.len(),
            _ => 0,
        };
        if n == 0 || rng.random_bool(0.25) {
            break;
        }
        let i = rng.random_range(0..n);
        let delete = rng.random_bool(0.15);
        match cur {
            Json::Object(m) => {
                let k = m.keys().nth(i).unwrap().clone();
                if delete {
                    m.remove(&k);
                    return;
                }
                cur = m.get_mut(&k).unwrap();
            }
            Json::Array(a) => {
                if delete {
                    a.remove(i);
                    return;
                }
                cur = &mut a[i];
            }
            _ => unreachable!(),
        }
    }
    *cur = random_json(rng);
}

pub fn fuzz_inputs(n: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus: Vec<&str> = ALL.iter().map(|f| f.doc).chain([TAXONOMY, DNM, ONSET]).collect();
    (0..n)
        .map(|_| {
            let src = corpus[rng.random_range(0..corpus.len())];
            if rng.random_bool(0.5) {
                mutate_bytes(&mut rng, src.as_bytes())
            } else {
                let mut v: Json = serde_json::from_str(src).unwrap();
                for _ in 0..rng.random_range(1..4) {
                    mutate_tree(&mut rng, &mut v);
                }
                v.to_string().into_bytes()
            }
        })
        .collect()
}

pub fn parser_fuzz_check(n: usize, seed: u64) -> Check {
    let inputs = fuzz_inputs(n, seed);
    let prev = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut rejected = 0;
    let mut result = Ok(());
    for (i, bytes) in inputs.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(|| match parse_document_bytes(bytes) {
            Ok((d, _)) => {
                let _ = compile_document(Registry::builtin(), &d);
                Ok(true)
            }
            Err(diags) => Err(diags),
        }));
        match outcome {
            Err(_) => {
                result = Err(format!("input {i} panicked: {:?}", String::from_utf8_lossy(bytes)));
                break;
            }
            Ok(Err(diags)) => {
                if diags.is_empty() {
                    result = Err(format!("input {i} failed without a diagnostic"));
                    break;
                }
                rejected += 1;
            }
            Ok(Ok(_)) => {}
        }
    }
    std::panic::set_hook(prev);
    result?;
    Ok(format!("{n} mutated inputs, {rejected} rejected with diagnostics, no crashes"))
}
