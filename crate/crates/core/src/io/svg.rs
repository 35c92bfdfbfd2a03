//! Standalone SVG scatter chart of a joint projection.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::indicators::IndicatorResult;
use crate::projection::SetProjection;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const WIDTH: f64 = 900.0;
const PLOT: f64 = 560.0;
const MARGIN: f64 = 40.0;
const LEGEND_X: f64 = 2.0 * MARGIN + PLOT;
const CAPTION_Y: f64 = 2.0 * MARGIN + PLOT;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl Circle {
    fn contains(&self, p: [f64; 2]) -> bool {
        let tol = 1e-9 * (1.0 + self.r);
        (p[0] - self.x).hypot(p[1] - self.y) <= self.r + tol
    }
}

/// Smallest circle enclosing every point (Welzl's incremental algorithm on a
/// fixed-seed shuffle, so the output is reproducible).
pub fn min_enclosing_circle(points: &[[f64; 2]]) -> Option<Circle> {
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let mut c = Circle { x: pts.first()?[0], y: pts[0][1], r: 0.0 };
    for i in 1..pts.len() {
        if c.contains(pts[i]) {
            continue;
        }
        c = Circle { x: pts[i][0], y: pts[i][1], r: 0.0 };
        for j in 0..i {
            if c.contains(pts[j]) {
                continue;
            }
            c = diameter_circle(pts[i], pts[j]);
            for k in 0..j {
                if !c.contains(pts[k]) {
                    c = circumcircle(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Some(c)
}

fn diameter_circle(a: [f64; 2], b: [f64; 2]) -> Circle {
    Circle {
        x: 0.5 * (a[0] + b[0]),
        y: 0.5 * (a[1] + b[1]),
        r: 0.5 * (a[0] - b[0]).hypot(a[1] - b[1]),
    }
}

fn circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Circle {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        // collinear: the widest pair spans the circle
        let pairs = [(a, b), (a, c), (b, c)];
        return pairs
            .iter()
            .map(|&(p, q)| diameter_circle(p, q))
            .max_by(|u, v| u.r.total_cmp(&v.r))
            .expect("three pairs");
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Circle { x: a[0] + ux, y: a[1] + uy, r: ux.hypot(uy) }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One marker per solution colored by set, a legend, one enclosing circle per
/// set and a caption with each set's MAS and MS (when `indicators` has a row
/// for it). Axes carry no labels: MDS axes have no meaning of their own.
pub fn emit_scatter_svg(sets: &[SetProjection], indicators: &[IndicatorResult]) -> String {
    let circles: Vec<Option<Circle>> = sets
        .iter()
        .map(|s| min_enclosing_circle(&s.points.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>()))
        .collect();

    // bounding box of markers and circles, fitted with equal axis scaling
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in circles.iter().flatten() {
        lo = [lo[0].min(c.x - c.r), lo[1].min(c.y - c.r)];
        hi = [hi[0].max(c.x + c.r), hi[1].max(c.y + c.r)];
    }
    if !lo[0].is_finite() {
        lo = [0.0, 0.0];
        hi = [0.0, 0.0];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if span > 0.0 { (PLOT - 20.0) / span } else { 1.0 };
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let to_px = |x: f64, y: f64| {
        (
            MARGIN + 0.5 * PLOT + (x - center[0]) * scale,
            MARGIN + 0.5 * PLOT - (y - center[1]) * scale,
        )
    };

    let caption_lines = sets.len();
    let height = CAPTION_Y + 20.0 * caption_lines as f64 + MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="#cccccc"/>"##
    );

    for (k, (set, circle)) in sets.iter().zip(&circles).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(svg, r#"<g class="set" data-label="{}">"#, escape(&set.label));
        if let Some(c) = circle {
            let (cx, cy) = to_px(c.x, c.y);
            let _ = writeln!(
                svg,
                r#"<circle class="enclosing" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="{color}" fill-opacity="0.08" stroke="{color}" stroke-width="1.5"/>"#,
                (c.r * scale).max(4.0)
            );
        }
        for p in &set.points {
            let (x, y) = to_px(p.x, p.y);
            let _ = writeln!(
                svg,
                r#"<circle class="marker" cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"><title>{}</title></circle>"#,
                escape(&p.id)
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (k, set) in sets.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = MARGIN + 10.0 + 22.0 * k as f64;
        let _ = writeln!(svg, r#"<rect x="{LEGEND_X}" y="{y}" width="12" height="12" fill="{color}"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13">{}</text>"#,
            LEGEND_X + 18.0,
            y + 11.0,
            escape(&set.label)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="caption">"#);
    for (k, set) in sets.iter().enumerate() {
        let text = match indicators.iter().find(|r| r.set_label == set.label) {
            Some(r) => format!("{}: MAS = {:.4}, MS = {:.4}", set.label, r.mas, r.ms),
            None => set.label.clone(),
        };
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="13">{}</text>"#,
            CAPTION_Y + 20.0 * k as f64,
            escape(&text)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
