//! SVG snapshots of the current scene state.

use std::fmt::Write;

use crate::diag::{Code, Diagnostic};
use crate::runtime::Runtime;
use crate::scene::{ChannelSet, MarkShape, ObjectKind, Orient, SceneGraph, VisualObject};

const TICK: f64 = 5.0;
const SWATCH: f64 = 10.0;
const LEGEND_ROW: f64 = 16.0;

fn num(n: f64) -> String {
    let s = format!("{n:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn paint(c: &ChannelSet) -> String {
    format!(
        " fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\" opacity=\"{}\"",
        esc(&c.fill),
        esc(&c.stroke),
        num(c.stroke_width),
        num(c.opacity)
    )
}

/// Point on a circle of radius `r` at angle `a`, clockwise from twelve.
fn polar(x: f64, y: f64, r: f64, a: f64) -> (f64, f64) {
    (x + r * a.sin(), y - r * a.cos())
}

fn arc_path(c: &ChannelSet) -> String {
    let (outer, inner) = (c.radius, c.width.min(c.radius));
    let (a0, a1) = (c.start_angle, c.end_angle);
    let large = if (a1 - a0).abs() > std::f64::consts::PI { 1 } else { 0 };
    let sweep = if a1 >= a0 { 1 } else { 0 };
    let p0 = polar(c.x, c.y, outer, a0);
    let p1 = polar(c.x, c.y, outer, a1);
    let q1 = polar(c.x, c.y, inner, a1);
    let q0 = polar(c.x, c.y, inner, a0);
    format!(
        "M {} {} A {} {} 0 {large} {sweep} {} {} L {} {} A {} {} 0 {large} {} {} {} Z",
        num(p0.0),
        num(p0.1),
        num(outer),
        num(outer),
        num(p1.0),
        num(p1.1),
        num(q1.0),
        num(q1.1),
        num(inner),
        num(inner),
        1 - sweep,
        num(q0.0),
        num(q0.1)
    )
}

fn shape(out: &mut String, o: &VisualObject, shape: Option<MarkShape>) {
    let c = &o.channels;
    let id = esc(&o.id);
    let p = paint(c);
    let _ = match shape {
        Some(MarkShape::Rect) => writeln!(
            out,
            "<rect id=\"{id}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"{p}/>",
            num(c.x),
            num(c.y),
            num(c.width),
            num(c.height)
        ),
        Some(MarkShape::Circle) => {
            writeln!(out, "<circle id=\"{id}\" cx=\"{}\" cy=\"{}\" r=\"{}\"{p}/>", num(c.x), num(c.y), num(c.radius))
        }
        Some(MarkShape::Line) | Some(MarkShape::Path) => writeln!(
            out,
            "<path id=\"{id}\" d=\"M {} {} L {} {}\"{p}/>",
            num(c.x),
            num(c.y),
            num(c.x + c.width),
            num(c.y + c.height)
        ),
        Some(MarkShape::Arc) => writeln!(out, "<path id=\"{id}\" d=\"{}\"{p}/>", arc_path(c)),
        Some(MarkShape::Image) => writeln!(
            out,
            "<image id=\"{id}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" href=\"{}\" opacity=\"{}\"/>",
            num(c.x),
            num(c.y),
            num(c.width),
            num(c.height),
            esc(&c.text),
            num(c.opacity)
        ),
        Some(MarkShape::Text) | None => {
            writeln!(out, "<text id=\"{id}\" x=\"{}\" y=\"{}\"{p}>{}</text>", num(c.x), num(c.y), esc(&c.text))
        }
    };
}

fn axis(out: &mut String, g: &SceneGraph, o: &VisualObject) {
    let c = &o.channels;
    let decl = crate::model::DocIndex::new(&g.doc).decl(&o.decl);
    let orient = decl.and_then(|d| d.orient).unwrap_or_default();
    let scale = decl.and_then(|d| d.scale.as_deref()).and_then(|s| g.scales.get(s));
    let _ = writeln!(
        out,
        "<g id=\"{}\" class=\"axis\" transform=\"translate({},{})\">",
        esc(&o.id),
        num(c.x),
        num(c.y)
    );
    let ticks = scale.map(|s| s.ticks()).unwrap_or_default();
    let horizontal = matches!(orient, Orient::Bottom | Orient::Top);
    let dir = if matches!(orient, Orient::Bottom | Orient::Right) { 1.0 } else { -1.0 };
    let lo = ticks.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let hi = ticks.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if lo <= hi {
        let (x0, y0, x1, y1) = if horizontal { (lo, 0.0, hi, 0.0) } else { (0.0, lo, 0.0, hi) };
        let _ = writeln!(
            out,
            "<path class=\"domain\" d=\"M {} {} L {} {}\" stroke=\"{}\"/>",
            num(x0),
            num(y0),
            num(x1),
            num(y1),
            esc(&c.stroke)
        );
    }
    for (v, px) in ticks {
        let (x, y, tx, ty) = if horizontal {
            (px, 0.0, px, dir * TICK)
        } else {
            (0.0, px, dir * TICK, px)
        };
        let (lx, ly) = if horizontal { (tx, ty + dir * 2.0 * TICK) } else { (tx + dir * 2.0 * TICK, ty) };
        let _ = writeln!(
            out,
            "<path d=\"M {} {} L {} {}\" stroke=\"{}\"/><text x=\"{}\" y=\"{}\">{}</text>",
            num(x),
            num(y),
            num(tx),
            num(ty),
            esc(&c.stroke),
            num(lx),
            num(ly),
            esc(&v.key_string())
        );
    }
    out.push_str("</g>\n");
}

fn legend(out: &mut String, g: &SceneGraph, o: &VisualObject) {
    let c = &o.channels;
    let decl = crate::model::DocIndex::new(&g.doc).decl(&o.decl);
    let scale = decl.and_then(|d| d.scale.as_deref()).and_then(|s| g.scales.get(s));
    let _ = writeln!(
        out,
        "<g id=\"{}\" class=\"legend\" transform=\"translate({},{})\">",
        esc(&o.id),
        num(c.x),
        num(c.y)
    );
    if let Some(s) = scale {
        for (i, (v, _)) in s.ticks().into_iter().enumerate() {
            let fill = s.apply(&v).map(|c| c.to_value().key_string()).unwrap_or_default();
            let y = i as f64 * LEGEND_ROW;
            let _ = writeln!(
                out,
                "<rect x=\"0.000\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/><text x=\"{}\" y=\"{}\">{}</text>",
                num(y),
                num(SWATCH),
                num(SWATCH),
                esc(&fill),
                num(SWATCH + 4.0),
                num(y + SWATCH),
                esc(&v.key_string())
            );
        }
    }
    out.push_str("</g>\n");
}

fn node(out: &mut String, g: &SceneGraph, id: &str) {
    let Some(o) = g.get(id) else { return };
    if !o.channels.visible {
        return;
    }
    match o.kind {
        ObjectKind::Collection | ObjectKind::Glyph => {
            let _ = writeln!(
                out,
                "<g id=\"{}\" class=\"{}\" transform=\"translate({},{})\">",
                esc(&o.id),
                o.kind.name(),
                num(o.channels.x),
                num(o.channels.y)
            );
            children(out, g, o);
            out.push_str("</g>\n");
        }
        ObjectKind::Mark => shape(out, o, o.shape.or(Some(MarkShape::Rect))),
        ObjectKind::Annotation => shape(out, o, o.shape),
        ObjectKind::Axis => axis(out, g, o),
        ObjectKind::Legend => legend(out, g, o),
        ObjectKind::Scene | ObjectKind::Section => children(out, g, o),
    }
}

fn children(out: &mut String, g: &SceneGraph, o: &VisualObject) {
    let mut kids: Vec<&VisualObject> = o.children.iter().filter_map(|c| g.get(c)).collect();
    kids.sort_by_key(|k| k.channels.order);
    for k in kids {
        node(out, g, &k.id);
    }
}

fn scene_svg(rt: &Runtime, scene: &str, at: Option<(f64, f64)>) -> Result<String, Diagnostic> {
    let o = rt
        .graph
        .get(scene)
        .filter(|o| o.kind == ObjectKind::Scene)
        .ok_or_else(|| Diagnostic::error(Code::UnresolvedName, "", format!("unknown scene `{scene}`")))?;
    let (w, h) = (o.channels.width, o.channels.height);
    let (vx, vy, vw, vh) = match rt.cameras.get(scene) {
        Some(c) => c.view_box(),
        None => (0.0, 0.0, w, h),
    };
    let pos = match at {
        Some((x, y)) => format!(" x=\"{}\" y=\"{}\"", num(x), num(y)),
        None => " xmlns=\"http://www.w3.org/2000/svg\"".into(),
    };
    let mut out = format!(
        "<svg{pos} id=\"{}\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
        esc(scene),
        num(w),
        num(h),
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );
    children(&mut out, &rt.graph, o);
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_scene(rt: &Runtime, scene: &str) -> Result<String, Diagnostic> {
    scene_svg(rt, scene, None)
}

pub fn render_page(rt: &Runtime) -> String {
    let shown: Vec<&str> =
        rt.graph.doc.scenes.iter().map(|s| s.name.as_str()).filter(|s| rt.graph.is_shown(s)).collect();
    let (w, h) = shown.iter().filter_map(|s| rt.graph.get(s)).fold((0.0f64, 0.0f64), |(w, h), o| {
        (w.max(o.channels.x + o.channels.width), h.max(o.channels.y + o.channels.height))
    });
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0.000 0.000 {} {}\">\n",
        num(w),
        num(h),
        num(w),
        num(h)
    );
    for s in shown {
        let o = &rt.graph.objects[s];
        if let Ok(svg) = scene_svg(rt, s, Some((o.channels.x, o.channels.y))) {
            out.push_str(&svg);
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_prints_positive() {
        assert_eq!(num(-0.0001), "0.000");
        assert_eq!(num(1.23456), "1.235");
    }

    #[test]
    fn arc_starts_at_twelve() {
        let (x, y) = polar(10.0, 10.0, 5.0, 0.0);
        assert!((x - 10.0).abs() < 1e-12 && (y - 5.0).abs() < 1e-12);
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(esc("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
