//! Deterministic SVG projection of the embedded points.

use std::fmt::Write;

use choquet::sets::PointSet;
use choquet::{Error, FunctionSystem, Result};

const SIZE: f64 = 480.0;
const PAD: f64 = 40.0;

fn projection(sys: &FunctionSystem, axes: Option<&[usize]>) -> Result<Vec<[f64; 2]>> {
    let b = sys.basis();
    let rows: Vec<usize> = match axes {
        Some(a) => {
            if a.is_empty() || a.len() > 2 {
                return Err(Error::InvalidInput(format!("plot takes one or two axes, got {}", a.len())));
            }
            if let Some(&i) = a.iter().find(|&&i| i >= sys.d()) {
                return Err(Error::InvalidInput(format!("axis {i} out of range for {} basis rows", sys.d())));
            }
            a.to_vec()
        }
        None => {
            if let Some(c) = sys.space().coords() {
                return Ok(c.to_vec());
            }
            (0..sys.d())
                .filter(|&i| {
                    let row = b.row(i);
                    row.max() - row.min() > 1e-12
                })
                .take(2)
                .collect()
        }
    };
    Ok((0..sys.n())
        .map(|j| [rows.first().map_or(0.0, |&i| b[(i, j)]), rows.get(1).map_or(0.0, |&i| b[(i, j)])])
        .collect())
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by the monotone chain, counterclockwise.
fn hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render(sys: &FunctionSystem, boundary: &PointSet, overlay: Option<&PointSet>, axes: Option<&[usize]>) -> Result<String> {
    let pts = projection(sys, axes)?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (SIZE - 2.0 * PAD) / span;
    let centre = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let map = |p: [f64; 2]| [SIZE / 2.0 + (p[0] - centre[0]) * scale, SIZE / 2.0 - (p[1] - centre[1]) * scale];

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let h = hull(&pts);
    if h.len() >= 2 {
        let path: Vec<String> = h.iter().map(|&p| map(p)).map(|[x, y]| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(
            svg,
            r##"<polygon points="{}" fill="#eef2fb" stroke="#8da0cb" stroke-width="1"/>"##,
            path.join(" ")
        );
    }
    for (j, &p) in pts.iter().enumerate() {
        let [x, y] = map(p);
        let label = escape(sys.space().label(j));
        if overlay.is_some_and(|s| s.contains(j)) {
            let _ = writeln!(svg, r##"<circle cx="{x:.3}" cy="{y:.3}" r="7" fill="none" stroke="#1f78b4" stroke-width="1.5"/>"##);
        }
        let (r, fill) = if boundary.contains(j) { (4.0, "#d7301f") } else { (2.5, "#737373") };
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"><title>{label}</title></circle>"#);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
