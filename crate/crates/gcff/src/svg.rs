//! Static SVG drawings of a solved frame: persons as oriented glyphs, the
//! segment from each person to their transactional centre, one o-space
//! centre per group and the convex hull of each group's members.

use std::fmt::Write as _;

use gcff_core::{transactional_center, Detection, Params, Point, Scene};

const STYLE: &str = "\
.person circle{fill:#fff;stroke:#333;stroke-width:1.5}\
.person line{stroke:#333;stroke-width:2}\
.segment{stroke:#999;stroke-dasharray:3 2}\
.center{fill:#c0392b}\
.hull{fill:#2980b9;fill-opacity:0.15;stroke:#2980b9}";

fn escape(s: &str) -> String {
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

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u)
}

/// Counter-clockwise convex hull (monotone chain); collinear points are
/// dropped, so two points give a two-vertex hull.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.u.total_cmp(&b.u).then(a.v.total_cmp(&b.v)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Draws `detection` over `scene`. Output depends only on the inputs.
pub fn render(scene: &Scene, detection: &Detection, params: &Params) -> String {
    let d = params.stride_d;
    let r = 0.25 * d;
    let mu: Vec<Point> = scene.persons().iter().map(|p| transactional_center(p, d)).collect();

    let (mut lo, mut hi) = (
        Point::new(f64::INFINITY, f64::INFINITY),
        Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for p in scene.persons().iter().map(|p| p.position()).chain(mu.iter().copied()) {
        lo = Point::new(lo.u.min(p.u), lo.v.min(p.v));
        hi = Point::new(hi.u.max(p.u), hi.v.max(p.v));
    }
    if scene.is_empty() {
        lo = Point::new(0.0, 0.0);
        hi = Point::new(0.0, 0.0);
    }
    let margin = d;
    // y grows upwards in the scene, downwards in SVG
    let (x0, y0) = (lo.u - margin, -hi.v - margin);
    let (w, h) = (hi.u - lo.u + 2.0 * margin, hi.v - lo.v + 2.0 * margin);

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.2} {y0:.2} {w:.2} {h:.2}" width="{:.0}" height="{:.0}">"#,
        w.max(1.0),
        h.max(1.0)
    )
    .unwrap();
    writeln!(out, "<title>frame {}</title>", escape(&scene.frame_id)).unwrap();
    writeln!(out, "<style>{STYLE}</style>").unwrap();
    writeln!(out, r#"<g transform="scale(1 -1)">"#).unwrap();

    for group in detection.groups.iter() {
        let members: Vec<usize> = group.members().iter().filter_map(|&m| scene.index_of(m)).collect();
        let hull = convex_hull(
            &members
                .iter()
                .map(|&i| scene.persons()[i].position())
                .collect::<Vec<_>>(),
        );
        let points: Vec<String> = hull.iter().map(|p| format!("{:.2},{:.2}", p.u, p.v)).collect();
        writeln!(out, r#"<polygon class="hull" points="{}"/>"#, points.join(" ")).unwrap();
        if let Some(&first) = members.first() {
            let c = detection.assignment.centers[detection.assignment.label_of[first]];
            writeln!(
                out,
                r#"<circle class="center" cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
                c.u,
                c.v,
                0.15 * d
            )
            .unwrap();
        }
    }
    for (p, m) in scene.persons().iter().zip(&mu) {
        writeln!(
            out,
            r#"<line class="segment" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            p.x, p.y, m.u, m.v
        )
        .unwrap();
    }
    for p in scene.persons() {
        let (s, c) = p.theta().sin_cos();
        writeln!(
            out,
            r#"<g class="person" data-id="{}"><circle cx="{:.2}" cy="{:.2}" r="{r:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"#,
            p.id.0,
            p.x,
            p.y,
            p.x,
            p.y,
            p.x + 2.0 * r * c,
            p.y + 2.0 * r * s
        )
        .unwrap();
    }
    writeln!(out, "</g>\n</svg>").unwrap();
    out
}
