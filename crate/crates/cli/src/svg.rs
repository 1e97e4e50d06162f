//! Minimal self-contained SVG line charts, enough for quick visual checks
//! of filter paths, estimation traces, and likelihood slices.

use std::fs;
use std::path::Path;

use svol_core::error::{Error, Result};

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// Write one chart with shared axes for all series.
pub fn line_chart(path: &Path, title: &str, series: &[Series<'_>]) -> Result<()> {
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .collect();
    if all.is_empty() {
        return Err(Error::domain("cannot chart empty series"));
    }
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in &all {
        x_min = x_min.min(*x);
        x_max = x_max.max(*x);
        y_min = y_min.min(*y);
        y_max = y_max.max(*y);
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let sx = (WIDTH - 2.0 * MARGIN) / (x_max - x_min);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y_max - y_min);
    let tx = |x: f64| MARGIN + (x - x_min) * sx;
    let ty = |y: f64| HEIGHT - MARGIN - (y - y_min) * sy;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
    // axes
    out.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    ));
    for (v, x, y, anchor) in [
        (x_min, MARGIN, HEIGHT - MARGIN + 18.0, "middle"),
        (x_max, WIDTH - MARGIN, HEIGHT - MARGIN + 18.0, "middle"),
        (y_min, MARGIN - 6.0, HEIGHT - MARGIN, "end"),
        (y_max, MARGIN - 6.0, MARGIN + 4.0, "end"),
    ] {
        out.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{v:.4}</text>\n"
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", tx(*x), ty(*y)))
            .collect();
        let dash = if s.dashed {
            " stroke-dasharray=\"5,4\""
        } else {
            ""
        };
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"{dash} points=\"{}\"/>\n",
            s.color,
            pts.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>\n",
            WIDTH - MARGIN - 150.0,
            MARGIN + 16.0 * (i as f64 + 1.0),
            s.color,
            escape(s.label)
        ));
    }
    out.push_str("</svg>\n");
    fs::write(path, out).map_err(|e| Error::io_at(path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
