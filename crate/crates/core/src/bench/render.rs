use std::fmt::Write;

use crate::instance::{Instance, Point};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Position of a node; `0` and `|C| + 1` are the depot.
fn node_point(inst: &Instance, node: usize) -> Option<Point> {
    let n = inst.num_customers();
    match node {
        0 => Some(inst.depot_coord),
        v if v == n + 1 => Some(inst.depot_coord),
        v if v <= n => Some(inst.customer_coords[v - 1]),
        _ => None,
    }
}

/// SVG with one line per arc, a square depot marker and a circle for every
/// customer that appears in an arc.
pub fn render_routes_svg(routes: &[Vec<[usize; 2]>], inst: &Instance) -> String {
    let mut pts = vec![inst.depot_coord];
    pts.extend(&inst.customer_coords);
    let (min_x, max_x) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
        (a.0.min(p.0), a.1.max(p.0))
    });
    let (min_y, max_y) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
        (a.0.min(p.1), a.1.max(p.1))
    });
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let tx = |p: Point| {
        (
            MARGIN + (p.0 - min_x) * scale,
            SIZE - MARGIN - (p.1 - min_y) * scale,
        )
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let mut seen = vec![false; inst.num_customers() + 2];
    for (k, route) in routes.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        for &[a, b] in route {
            let (Some(pa), Some(pb)) = (node_point(inst, a), node_point(inst, b)) else {
                continue;
            };
            seen[a] = true;
            seen[b] = true;
            let ((x1, y1), (x2, y2)) = (tx(pa), tx(pb));
            let _ = writeln!(
                s,
                r#"  <line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" stroke-width="1.5"/>"#
            );
        }
    }
    for (c, &p) in inst.customer_coords.iter().enumerate() {
        if seen[c + 1] {
            let (x, y) = tx(p);
            let _ = writeln!(
                s,
                r#"  <circle cx="{x:.2}" cy="{y:.2}" r="3" fill="black"/>"#
            );
        }
    }
    let (x, y) = tx(inst.depot_coord);
    let _ = writeln!(
        s,
        r#"  <rect x="{:.2}" y="{:.2}" width="8" height="8" fill="red"/>"#,
        x - 4.0,
        y - 4.0
    );
    s.push_str("</svg>\n");
    s
}
