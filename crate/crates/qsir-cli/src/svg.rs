//! Static SVG line charts. Self-contained output: inline styling only, no
//! scripts, fonts, or external references, so files diff cleanly in tests.

use std::fmt::Write as _;
use std::path::Path;

use qsir_core::Trajectory;

use crate::config::CliError;
use crate::csv_io::write_atomic;

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 52.0;

/// Colors for the x, y, z compartments, in that order.
pub const COMPARTMENT_COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// Dash patterns distinguishing trajectories that share compartment colors.
pub const LINE_DASHES: [&str; 4] = ["", "6 4", "2 3", "8 3 2 3"];

pub struct Series {
    pub label: String,
    pub color: String,
    /// SVG stroke-dasharray value; empty means solid.
    pub dash: String,
    pub points: Vec<(f64, f64)>,
}

pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Three series (x, y, z over time) per trajectory. Labels are the bare
/// compartment names for a single trajectory, suffixed with the trajectory
/// label otherwise.
pub fn trajectory_chart(title: &str, labeled: &[(&str, &Trajectory)]) -> ChartSpec {
    let mut series = Vec::with_capacity(3 * labeled.len());
    for (ti, (label, traj)) in labeled.iter().enumerate() {
        let comps: [(&str, fn(&qsir_core::SirState) -> f64); 3] = [
            ("x", |s| s.x()),
            ("y", |s| s.y()),
            ("z", |s| s.z()),
        ];
        for (ci, (comp, get)) in comps.iter().enumerate() {
            series.push(Series {
                label: if labeled.len() == 1 {
                    comp.to_string()
                } else {
                    format!("{comp} ({label})")
                },
                color: COMPARTMENT_COLORS[ci].to_string(),
                dash: LINE_DASHES[ti % LINE_DASHES.len()].to_string(),
                points: traj.records().iter().map(|r| (r.t, get(&r.state))).collect(),
            });
        }
    }
    ChartSpec {
        title: title.to_string(),
        x_label: "t".to_string(),
        y_label: "compartment size".to_string(),
        series,
    }
}

pub fn render_chart(spec: &ChartSpec, path: &Path) -> Result<(), CliError> {
    write_atomic(path, chart_svg(spec).as_bytes())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Data window with a small margin; degenerate spans get an absolute pad so a
/// single point sits mid-plot instead of on a zero-width axis.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span <= 0.0 {
        let pad = lo.abs().mul_add(0.5, 0.5);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.04 * span, hi + 0.04 * span)
    }
}

/// Tick positions at a 1/2/5 step covering [lo, hi].
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm <= 1.0 {
            1.0
        } else if norm <= 2.0 {
            2.0
        } else if norm <= 5.0 {
            5.0
        } else {
            10.0
        };
    let mut v = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while v <= hi + step * 1e-9 {
        out.push(if v == 0.0 { 0.0 } else { v });
        v += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e7 || a < 1e-4 {
        return format!("{v:e}");
    }
    let mut s = format!("{v:.6}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

pub fn chart_svg(spec: &ChartSpec) -> String {
    let finite = |pts: &[(f64, f64)]| {
        pts.iter()
            .copied()
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .collect::<Vec<_>>()
    };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in &spec.series {
        for (px, py) in finite(&s.points) {
            x_min = x_min.min(px);
            x_max = x_max.max(px);
            y_min = y_min.min(py);
            y_max = y_max.max(py);
        }
    }
    let (x0, x1) = padded(x_min, x_max);
    let (y0, y1) = padded(y_min, y_max);

    let right = WIDTH - RIGHT;
    let bottom = HEIGHT - BOTTOM;
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * (right - LEFT);
    let sy = |v: f64| bottom - (v - y0) / (y1 - y0) * (bottom - TOP);

    let mut out = String::with_capacity(8 * 1024);
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"28\" text-anchor=\"middle\" font-size=\"15\" \
         font-weight=\"600\" fill=\"#222222\">{}</text>",
        (LEFT + right) / 2.0,
        xml_escape(&spec.title)
    );

    for v in nice_ticks(x0, x1, 6) {
        let px = sx(v);
        let _ = writeln!(
            out,
            "<line x1=\"{px:.3}\" y1=\"{TOP}\" x2=\"{px:.3}\" y2=\"{bottom}\" \
             stroke=\"#e6e6e6\"/>"
        );
        let _ = writeln!(
            out,
            "<line x1=\"{px:.3}\" y1=\"{bottom}\" x2=\"{px:.3}\" y2=\"{:.3}\" \
             stroke=\"#333333\"/>",
            bottom + 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{px:.3}\" y=\"{:.3}\" text-anchor=\"middle\" font-size=\"11\" \
             fill=\"#333333\">{}</text>",
            bottom + 17.0,
            tick_label(v)
        );
    }
    for v in nice_ticks(y0, y1, 6) {
        let py = sy(v);
        let _ = writeln!(
            out,
            "<line x1=\"{LEFT}\" y1=\"{py:.3}\" x2=\"{right}\" y2=\"{py:.3}\" \
             stroke=\"#e6e6e6\"/>"
        );
        let _ = writeln!(
            out,
            "<line x1=\"{:.3}\" y1=\"{py:.3}\" x2=\"{LEFT}\" y2=\"{py:.3}\" \
             stroke=\"#333333\"/>",
            LEFT - 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"end\" font-size=\"11\" \
             fill=\"#333333\">{}</text>",
            LEFT - 8.0,
            py + 4.0,
            tick_label(v)
        );
    }

    let _ = writeln!(
        out,
        "<line x1=\"{LEFT}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" \
         stroke=\"#333333\"/>"
    );
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{bottom}\" \
         stroke=\"#333333\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\" font-size=\"12\" \
         fill=\"#222222\">{}</text>",
        (LEFT + right) / 2.0,
        HEIGHT - 12.0,
        xml_escape(&spec.x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.3}\" text-anchor=\"middle\" font-size=\"12\" \
         fill=\"#222222\" transform=\"rotate(-90 16 {:.3})\">{}</text>",
        (TOP + bottom) / 2.0,
        (TOP + bottom) / 2.0,
        xml_escape(&spec.y_label)
    );

    for s in &spec.series {
        let pts = finite(&s.points);
        let dash = if s.dash.is_empty() {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{}\"", s.dash)
        };
        if pts.len() == 1 {
            let (px, py) = pts[0];
            let _ = writeln!(
                out,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"{}\"/>",
                sx(px),
                sy(py),
                s.color
            );
        } else if !pts.is_empty() {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(px, py)| format!("{:.3},{:.3}", sx(px), sy(py)))
                .collect();
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} \
                 points=\"{}\"/>",
                s.color,
                dash,
                coords.join(" ")
            );
        }
    }

    let legend_x = right + 16.0;
    for (i, s) in spec.series.iter().enumerate() {
        let ly = TOP + 24.0 + 22.0 * i as f64;
        let dash = if s.dash.is_empty() {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{}\"", s.dash)
        };
        let _ = writeln!(
            out,
            "<line x1=\"{legend_x:.3}\" y1=\"{ly:.3}\" x2=\"{:.3}\" y2=\"{ly:.3}\" \
             stroke=\"{}\" stroke-width=\"1.5\"{}/>",
            legend_x + 28.0,
            s.color,
            dash
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" fill=\"#222222\">{}</text>",
            legend_x + 34.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }

    out.push_str("</svg>\n");
    out
}
