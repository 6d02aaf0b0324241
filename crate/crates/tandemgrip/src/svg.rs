//! Minimal SVG: polylines and axes, nothing else.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 180.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const GAP: f64 = 40.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }
}

/// One panel of a stacked chart; all panels share the x axis.
#[derive(Debug, Clone)]
pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn polyline(out: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str) {
    let mut d = String::new();
    for (x, y) in pts {
        if x.is_finite() && y.is_finite() {
            let _ = write!(d, "{x:.2},{y:.2} ");
        }
    }
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        d.trim_end()
    );
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{x:.1}" y="{y:.1}" font-size="11" text-anchor="{anchor}">{}</text>"#,
        escape(s)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Stacked line chart with a shared x axis.
pub fn stacked_chart(title: &str, x_label: &str, panels: &[Panel]) -> String {
    let height = MARGIN_TOP + panels.len() as f64 * (PANEL_HEIGHT + GAP) + 10.0;
    let (x0, x1) = bounds(
        panels
            .iter()
            .flat_map(|p| &p.series)
            .flat_map(|s| s.points.iter().map(|p| p.0)),
    );
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.0}" viewBox="0 0 {WIDTH} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    text(&mut out, WIDTH / 2.0, 18.0, "middle", title);
    for (k, panel) in panels.iter().enumerate() {
        let top = MARGIN_TOP + k as f64 * (PANEL_HEIGHT + GAP);
        let bottom = top + PANEL_HEIGHT;
        let (y0, y1) = bounds(
            panel
                .series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| p.1)),
        );
        let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * PANEL_HEIGHT;
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_LEFT}" y="{top:.1}" width="{plot_w:.1}" height="{PANEL_HEIGHT}" fill="none" stroke="black" stroke-width="0.8"/>"#
        );
        text(
            &mut out,
            MARGIN_LEFT - 4.0,
            top + 10.0,
            "end",
            &crate::num::sig(y1),
        );
        text(
            &mut out,
            MARGIN_LEFT - 4.0,
            bottom,
            "end",
            &crate::num::sig(y0),
        );
        text(
            &mut out,
            12.0,
            top + PANEL_HEIGHT / 2.0,
            "start",
            &panel.y_label,
        );
        text(
            &mut out,
            MARGIN_LEFT,
            bottom + 14.0,
            "middle",
            &crate::num::sig(x0),
        );
        text(
            &mut out,
            WIDTH - MARGIN_RIGHT,
            bottom + 14.0,
            "middle",
            &crate::num::sig(x1),
        );
        for (i, s) in panel.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            polyline(
                &mut out,
                s.points.iter().map(|&(x, y)| (sx(x), sy(y))),
                color,
            );
            if panel.series.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="{color}" text-anchor="end">{}</text>"#,
                    WIDTH - MARGIN_RIGHT - 4.0,
                    top + 12.0 + 12.0 * i as f64,
                    escape(&s.name)
                );
            }
        }
    }
    let last_bottom = MARGIN_TOP + panels.len() as f64 * (PANEL_HEIGHT + GAP) - GAP;
    text(&mut out, WIDTH / 2.0, last_bottom + 28.0, "middle", x_label);
    out.push_str("</svg>\n");
    out
}

/// Equal-aspect drawing of curves and circles in model coordinates, y up.
pub fn drawing(title: &str, curves: &[Series], circles: &[(f64, f64, f64)]) -> String {
    let xs = curves
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .chain(circles.iter().flat_map(|c| [c.0 - c.2, c.0 + c.2]));
    let ys = curves
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .chain(circles.iter().flat_map(|c| [c.1 - c.2, c.1 + c.2]));
    let (x0, x1) = bounds(xs);
    let (y0, y1) = bounds(ys);
    let size = 560.0;
    let scale = size / (x1 - x0).max(y1 - y0);
    let (w, h) = ((x1 - x0) * scale + 40.0, (y1 - y0) * scale + 60.0);
    let tx = |x: f64| 20.0 + (x - x0) * scale;
    let ty = |y: f64| 40.0 + (y1 - y) * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    text(&mut out, w / 2.0, 18.0, "middle", title);
    // Axes through the origin when it is in view.
    if (x0..=x1).contains(&0.0) {
        let _ = writeln!(
            out,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#888" stroke-width="0.6"/>"##,
            tx(0.0),
            ty(y0),
            ty(y1)
        );
    }
    if (y0..=y1).contains(&0.0) {
        let _ = writeln!(
            out,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="#888" stroke-width="0.6"/>"##,
            tx(x0),
            ty(0.0),
            tx(x1)
        );
    }
    for (cx, cy, r) in circles {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#555" stroke-dasharray="4 3"/>"##,
            tx(*cx),
            ty(*cy),
            r * scale
        );
    }
    for (i, s) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        polyline(
            &mut out,
            s.points.iter().map(|&(x, y)| (tx(x), ty(y))),
            color,
        );
    }
    out.push_str("</svg>\n");
    out
}
