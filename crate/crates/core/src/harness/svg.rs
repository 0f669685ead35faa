//! Deterministic SVG line charts of mean cumulative regret.
//!
//! Output depends only on the inputs: fixed palette, fixed layout and fixed
//! decimal precision, so equal inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use super::run::AggregateResult;
use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 1000;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// A vertical dashed line, e.g. the step after which an adversary takes over.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub t: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChartOptions {
    pub title: String,
    pub markers: Vec<Marker>,
    /// Draws `coef · ln t` as a dotted reference curve.
    pub log_overlay: Option<f64>,
}

impl ChartOptions {
    pub fn titled(title: &str) -> Self {
        ChartOptions {
            title: title.to_string(),
            ..Default::default()
        }
    }
}

pub fn emit_svg(results: &[AggregateResult], path: &Path, title: &str) -> Result<()> {
    emit_svg_with(results, path, &ChartOptions::titled(title))
}

pub fn emit_svg_with(results: &[AggregateResult], path: &Path, opts: &ChartOptions) -> Result<()> {
    std::fs::write(path, render_svg(results, opts)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Step of roughly `span / 5` rounded to 1, 2 or 5 times a power of ten.
fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    format!("{v:.decimals$}")
}

/// Indices kept when drawing `n` points, always including the last.
fn sample_indices(n: usize) -> Vec<usize> {
    if n <= MAX_POINTS {
        return (0..n).collect();
    }
    let stride = n.div_ceil(MAX_POINTS);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    idx
}

pub fn render_svg(results: &[AggregateResult], opts: &ChartOptions) -> String {
    let t_max = results.iter().map(|r| r.mean.len()).max().unwrap_or(0).max(1) as f64;
    let mut y_max = results
        .iter()
        .flat_map(|r| r.mean.iter().zip(&r.stderr).map(|(m, s)| m + s))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    if let Some(coef) = opts.log_overlay {
        y_max = y_max.max(coef * t_max.ln());
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    let y_step = nice_step(y_max);
    let y_top = (y_max / y_step).ceil() * y_step;
    let x_step = nice_step(t_max);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + plot_w * t / t_max;
    let sy = |v: f64| TOP + plot_h * (1.0 - v / y_top);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&opts.title)
    );

    // Axes, ticks and labels.
    let (x0, y0, x1, y1) = (LEFT, TOP + plot_h, LEFT + plot_w, TOP);
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" fill="none" stroke="black"/>"#
    );
    let mut t = 0.0;
    while t <= t_max + 1e-9 * t_max {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            fmt_tick(t, x_step)
        );
        t += x_step;
    }
    let mut v = 0.0;
    while v <= y_top + 1e-9 * y_top {
        let y = sy(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            fmt_tick(v, y_step)
        );
        v += y_step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">cumulative regret</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (k, res) in results.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let idx = sample_indices(res.mean.len());
        if idx.is_empty() {
            continue;
        }
        let mut band = String::new();
        for &i in &idx {
            let _ = write!(band, "{:.2},{:.2} ", sx(i as f64 + 1.0), sy(res.mean[i] + res.stderr[i]));
        }
        for &i in idx.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", sx(i as f64 + 1.0), sy((res.mean[i] - res.stderr[i]).max(0.0)));
        }
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.trim_end()
        );
        let line: Vec<String> = idx
            .iter()
            .map(|&i| format!("{:.2},{:.2}", sx(i as f64 + 1.0), sy(res.mean[i])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        let ly = TOP + 20.0 * k as f64 + 10.0;
        let label = if res.scheme.is_empty() {
            res.agent.clone()
        } else {
            format!("{} ({})", res.agent, res.scheme)
        };
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x1 + 10.0,
            x1 + 30.0,
            x1 + 35.0,
            ly + 4.0,
            escape(&label)
        );
    }

    if let Some(coef) = opts.log_overlay {
        let n = t_max as usize;
        let pts: Vec<String> = sample_indices(n)
            .iter()
            .map(|&i| {
                let t = i as f64 + 1.0;
                format!("{:.2},{:.2}", sx(t), sy(coef * t.ln()))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="gray" stroke-dasharray="2,3"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 20.0 * results.len() as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="gray">{coef:.3}·ln t</text>"#,
            x1 + 10.0,
            ly + 4.0
        );
    }

    for m in &opts.markers {
        if !(m.t >= 0.0 && m.t <= t_max) {
            continue;
        }
        let x = sx(m.t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{y0:.2}" stroke="black" stroke-dasharray="5,4"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 3.0,
            y1 + 12.0,
            escape(&m.label)
        );
    }

    s.push_str("</svg>\n");
    s
}
