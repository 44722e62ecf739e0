//! Deterministic CSV and SVG writers.

use std::fmt::Write;

use schottky_lab::schottky::OrbitPacking;

use crate::canonical::format_float;

/// CSV table whose first line is a `#` comment carrying the scene hash.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(scene_hash: &str, header: &[String]) -> Self {
        let mut text = format!("# schottky-lab {} scene_hash={scene_hash}\n", crate::TOOL_VERSION);
        text.push_str(&header.join(","));
        text.push('\n');
        Csv { text, columns: header.len() }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        assert_eq!(cells.len(), self.columns, "row width differs from header");
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Empty => String::new(),
        }
    }
}

/// Column names `{prefix}0 … {prefix}{n−1}`.
pub fn axis_columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

const PALETTE: [&str; 8] = ["#1b2a49", "#2f5d8a", "#3f88c5", "#44bba4", "#e94f37", "#f6ae2d", "#86bbd8", "#9e2a2b"];

/// Canvas width in pixels; the height follows the aspect ratio.
const CANVAS: f64 = 800.0;

/// Planar orbit packing as SVG circles, one group per depth. Stroke colour
/// cycles through a fixed palette and stroke width halves every two levels.
pub fn orbit_svg(packing: &OrbitPacking, scene_hash: &str, label: Option<&str>) -> String {
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for b in packing.at_depth(0) {
        let (c, r) = b.ball.bounded().expect("removed balls are bounded");
        lo_x = lo_x.min(c[0] - r);
        hi_x = hi_x.max(c[0] + r);
        lo_y = lo_y.min(c[1] - r);
        hi_y = hi_y.max(c[1] + r);
    }
    let pad = 0.05 * (hi_x - lo_x).max(hi_y - lo_y);
    let (x0, y0) = (lo_x - pad, lo_y - pad);
    let (w, h) = (hi_x - lo_x + 2.0 * pad, hi_y - lo_y + 2.0 * pad);
    let base_stroke = w.max(h) / 400.0;
    let f = format_float;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        CANVAS.round(),
        (CANVAS * h / w).round(),
        f(x0),
        f(-(y0 + h)),
        f(w),
        f(h)
    );
    let _ = writeln!(out, "<!-- schottky-lab {} scene_hash={scene_hash} -->", crate::TOOL_VERSION);
    if let Some(l) = label {
        let escaped = l.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(out, "<title>{escaped}</title>");
    }
    let _ = writeln!(out, "<g transform=\"scale(1,-1)\" fill=\"none\">");
    let depth = packing.max_radius_by_depth.len();
    for d in 0..depth {
        let stroke = base_stroke * 0.5f64.powf(d as f64 / 2.0);
        let _ = writeln!(
            out,
            "<g class=\"depth-{d}\" stroke=\"{}\" stroke-width=\"{}\">",
            PALETTE[d % PALETTE.len()],
            f(stroke)
        );
        for b in packing.at_depth(d) {
            let (c, r) = b.ball.bounded().expect("orbit balls of a valid set are bounded");
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", f(c[0]), f(c[1]), f(r));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</g>\n</svg>\n");
    out
}
