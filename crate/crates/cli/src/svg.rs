//! Deterministic SVG rendering of a Newton polygon over its Hodge bound.

use std::fmt::Write;

use asnp_core::valuation::fmt_rational;
use num_rational::Rational64;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

/// Everything a plot needs, in exact arithmetic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotData {
    pub polygon: Vec<(i64, Rational64)>,
    pub hodge: Vec<(i64, Rational64)>,
    /// (index, ord, exact)
    pub points: Vec<(i64, Rational64, bool)>,
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn new(data: &PlotData) -> Self {
        let xs = data
            .polygon
            .iter()
            .chain(&data.hodge)
            .map(|v| v.0)
            .chain(data.points.iter().map(|p| p.0));
        let ys = data
            .polygon
            .iter()
            .chain(&data.hodge)
            .map(|v| v.1)
            .chain(data.points.iter().map(|p| p.1));
        let x_max = xs.max().unwrap_or(0).max(1) as f64;
        let y_max = ys.max().map(to_f64).unwrap_or(0.0).max(1.0);
        Frame { x_max, y_max }
    }

    fn x(&self, x: i64) -> f64 {
        MARGIN + (x as f64) * (WIDTH - 2.0 * MARGIN) / self.x_max
    }

    fn y(&self, y: Rational64) -> f64 {
        HEIGHT - MARGIN - to_f64(y) * (HEIGHT - 2.0 * MARGIN) / self.y_max
    }
}

fn polyline(
    out: &mut String,
    frame: &Frame,
    id: &str,
    color: &str,
    vertices: &[(i64, Rational64)],
) {
    if vertices.is_empty() {
        return;
    }
    let pts: Vec<String> = vertices
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.x(x), frame.y(y)))
        .collect();
    let inner: Vec<String> = vertices[1..vertices.len().saturating_sub(1)]
        .iter()
        .map(|v| v.0.to_string())
        .collect();
    writeln!(
        out,
        r#"  <polyline id="{id}" data-breakpoints="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
        inner.join(","),
        pts.join(" ")
    )
    .unwrap();
    for &(x, y) in vertices {
        writeln!(
            out,
            r#"  <circle class="{id}-vertex" data-x="{x}" data-y="{}" cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
            fmt_rational(y),
            frame.x(x),
            frame.y(y)
        )
        .unwrap();
    }
}

pub fn render(data: &PlotData) -> String {
    let frame = Frame::new(data);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    writeln!(
        out,
        r#"  <line id="x-axis" x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="gray"/>"#,
        WIDTH - MARGIN
    )
    .unwrap();
    writeln!(
        out,
        r#"  <line id="y-axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN}" stroke="gray"/>"#
    )
    .unwrap();
    for i in 0..=frame.x_max as i64 {
        writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{i}</text>"#,
            frame.x(i),
            y0 + 14.0
        )
        .unwrap();
    }
    polyline(&mut out, &frame, "hodge", "red", &data.hodge);
    polyline(&mut out, &frame, "newton", "black", &data.polygon);
    for &(i, y, exact) in &data.points {
        let fill = if exact { "black" } else { "none" };
        writeln!(
            out,
            r#"  <circle class="point" data-x="{i}" data-y="{}" data-exact="{exact}" cx="{:.2}" cy="{:.2}" r="3" fill="{fill}" stroke="black"/>"#,
            fmt_rational(y),
            frame.x(i),
            frame.y(y)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
