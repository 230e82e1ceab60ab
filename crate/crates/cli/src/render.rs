//! Deterministic SVG 1.1 output.

use std::fmt::Write;

use islands::algos::SeparatingLine;
use islands::geom::scalar_to_f64;
use islands::island::Instance;

/// Fill colors indexed by color id, wrapping around.
pub const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

pub const WIDTH_PX: f64 = 800.0;

pub fn color_of(c: usize) -> &'static str {
    PALETTE[c % PALETTE.len()]
}

fn num(v: f64) -> String {
    // adding 0.0 turns -0.0 into 0.0
    format!("{:.6}", v + 0.0)
}

/// Viewport `(min_x, min_y, width, height)` in SVG coordinates, where SVG `y`
/// is the negated input `y`.
fn viewport(inst: &Instance) -> (f64, f64, f64, f64) {
    let pts = inst.points();
    let mut min_x = pts[0].x.clone();
    let mut max_x = pts[0].x.clone();
    let mut min_y = pts[0].y.clone();
    let mut max_y = pts[0].y.clone();
    for p in pts {
        if p.x < min_x {
            min_x = p.x.clone();
        }
        if p.x > max_x {
            max_x = p.x.clone();
        }
        if p.y < min_y {
            min_y = p.y.clone();
        }
        if p.y > max_y {
            max_y = p.y.clone();
        }
    }
    let w = scalar_to_f64(&(&max_x - &min_x));
    let h = scalar_to_f64(&(&max_y - &min_y));
    let span = w.max(h);
    let margin = if span > 0.0 { 0.05 * span } else { 1.0 };
    (
        scalar_to_f64(&min_x) - margin,
        -scalar_to_f64(&max_y) - margin,
        w + 2.0 * margin,
        h + 2.0 * margin,
    )
}

/// Clips `a x + b y = c` (input frame) to the viewport, returning SVG
/// endpoints.
fn clip_line(l: &SeparatingLine, vp: (f64, f64, f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (a, b, c) = (
        scalar_to_f64(l.a()),
        scalar_to_f64(l.b()),
        scalar_to_f64(l.c()),
    );
    // in SVG coordinates (X, Y) = (x, -y) the line is a X - b Y = c
    let (a, b) = (a, -b);
    let nn = a * a + b * b;
    let p0 = (a * c / nn, b * c / nn);
    let d = (-b, a);
    let (x0, y0, w, h) = vp;
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, q) in [
        (-d.0, p0.0 - x0),
        (d.0, x0 + w - p0.0),
        (-d.1, p0.1 - y0),
        (d.1, y0 + h - p0.1),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 < t1).then_some((
        (p0.0 + t0 * d.0, p0.1 + t0 * d.1),
        (p0.0 + t1 * d.0, p0.1 + t1 * d.1),
    ))
}

/// Renders points, optional island hulls (member lists) and optional lines.
pub fn render_svg(inst: &Instance, islands: &[Vec<usize>], lines: &[SeparatingLine]) -> String {
    let vp = viewport(inst);
    let (x0, y0, w, h) = vp;
    let span = w.max(h);
    let stroke = span / 400.0;
    let radius = span / 160.0;
    let height_px = (WIDTH_PX * h / w).round().max(1.0);
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        WIDTH_PX,
        height_px,
        num(x0),
        num(y0),
        num(w),
        num(h)
    );
    let _ = writeln!(
        s,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        num(x0),
        num(y0),
        num(w),
        num(h)
    );
    if !islands.is_empty() {
        let _ = writeln!(s, "<g class=\"hulls\" stroke-width=\"{}\" stroke-linejoin=\"round\" stroke-linecap=\"round\">", num(stroke));
        for members in islands {
            let Ok(hull) = inst.hull_of(members) else {
                continue;
            };
            let col = color_of(inst.color(members[0]));
            let pts: Vec<String> = hull
                .vertices()
                .iter()
                .map(|p| {
                    let (x, y) = p.to_f64();
                    format!("{},{}", num(x), num(-y))
                })
                .collect();
            let _ = writeln!(
                s,
                "<polygon class=\"hull\" points=\"{}\" fill=\"{col}\" fill-opacity=\"0.25\" stroke=\"{col}\"/>",
                pts.join(" ")
            );
        }
        s.push_str("</g>\n");
    }
    if !lines.is_empty() {
        let _ = writeln!(
            s,
            "<g class=\"lines\" stroke=\"#333333\" stroke-width=\"{}\">",
            num(stroke)
        );
        for l in lines {
            if let Some(((ax, ay), (bx, by))) = clip_line(l, vp) {
                let _ = writeln!(
                    s,
                    "<line class=\"line\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    num(ax),
                    num(ay),
                    num(bx),
                    num(by)
                );
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("<g class=\"points\">\n");
    for (i, p) in inst.points().iter().enumerate() {
        let (x, y) = p.to_f64();
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            num(x),
            num(-y),
            num(radius),
            color_of(inst.color(i))
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
