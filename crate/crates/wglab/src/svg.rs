//! The `figure1` plot: the limiting distance as a function of `c`, with the finite-`n`
//! Monte Carlo estimates on top.
//!
//! The output is plain SVG 1.1 built from the CSV rows alone. Every plotted
//! number is also stored as a `data-*` attribute so the figure can be scraped
//! back without inverting the pixel mapping.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use wglab_core::limit_theory::{limiting_tv_closed_form, LimitParams};
use wglab_core::stats::Z_99;

use crate::config::MIN_FIGURE_POINTS;
use crate::error::{Error, Result};
use crate::sweep::SweepRow;

/// Closed-form evaluations along the curve.
pub const LIMIT_CURVE_POINTS: usize = 200;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 64.0;

const CURVE_COLOR: &str = "#1f77b4";
const POINT_COLORS: [&str; 6] = [
    "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

struct Frame {
    c_min: f64,
    c_max: f64,
}

impl Frame {
    fn x(&self, c: f64) -> f64 {
        LEFT + (c - self.c_min) / (self.c_max - self.c_min) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, tv: f64) -> f64 {
        HEIGHT - BOTTOM - tv.clamp(0.0, 1.0) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Round tick step (1, 2 or 5 times a power of ten) giving about `target`
/// intervals over `span`.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let m = raw / mag;
    let nice = if m < 1.5 {
        1.0
    } else if m < 3.5 {
        2.0
    } else if m < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64, target: f64) -> Vec<f64> {
    let step = tick_step(hi - lo, target);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|k| k as f64 * step)
        // trim representation noise such as 0.30000000000000004
        .map(|t| format!("{t:.12}").parse::<f64>().unwrap_or(t))
        .collect()
}

fn tick_label(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn distinct_c(rows: &[SweepRow]) -> Vec<f64> {
    let mut cs: Vec<f64> = rows.iter().map(|r| r.c).collect();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    cs
}

/// Renders the figure. Needs at least five distinct `c` values.
pub fn render_figure1_svg(rows: &[SweepRow]) -> Result<String> {
    let cs = distinct_c(rows);
    if cs.len() < MIN_FIGURE_POINTS {
        return Err(Error::config(format!(
            "figure needs at least {MIN_FIGURE_POINTS} distinct c values, got {}",
            cs.len()
        )));
    }
    if let Some(r) = rows.iter().find(|r| !(r.c.is_finite() && r.c > 0.0)) {
        return Err(Error::config(format!("row with invalid c = {}", r.c)));
    }
    let f = Frame {
        c_min: cs[0],
        c_max: cs[cs.len() - 1],
    };
    let (plot_w, plot_h) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let mut s = String::new();

    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">Limiting total variation distance as a function of c</text>"#,
        LEFT + plot_w / 2.0
    );

    // axes, grid and ticks
    let _ = writeln!(
        s,
        r##"<g id="axes" stroke="#000" stroke-width="1" fill="none">"##
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}"/>"#
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="x-ticks" text-anchor="middle">"#);
    for t in ticks(f.c_min, f.c_max, 5.0) {
        let x = f.x(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/><text x="{x:.2}" y="{:.2}">{}</text>"##,
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 5.0,
            HEIGHT - BOTTOM + 19.0,
            tick_label(t)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="y-ticks" text-anchor="end">"#);
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let y = f.y(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}">{}</text>"##,
            WIDTH - RIGHT,
            LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">c = lim d / n³</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">total variation distance</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    // limit curve
    let mut points = Vec::with_capacity(LIMIT_CURVE_POINTS);
    let mut c_attr = Vec::with_capacity(LIMIT_CURVE_POINTS);
    let mut tv_attr = Vec::with_capacity(LIMIT_CURVE_POINTS);
    for i in 0..LIMIT_CURVE_POINTS {
        let c = if i + 1 == LIMIT_CURVE_POINTS {
            f.c_max
        } else {
            f.c_min + (f.c_max - f.c_min) * i as f64 / (LIMIT_CURVE_POINTS - 1) as f64
        };
        let tv = limiting_tv_closed_form(LimitParams::new(c)?);
        points.push(format!("{:.2},{:.2}", f.x(c), f.y(tv)));
        c_attr.push(c.to_string());
        tv_attr.push(tv.to_string());
    }
    let _ = writeln!(
        s,
        r#"<polyline id="limit-curve" fill="none" stroke="{CURVE_COLOR}" stroke-width="2" points="{}" data-c="{}" data-tv="{}"/>"#,
        points.join(" "),
        c_attr.join(" "),
        tv_attr.join(" ")
    );

    // Monte Carlo points, one group per n
    let mut ns: Vec<u64> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for (k, &n) in ns.iter().enumerate() {
        let color = POINT_COLORS[k % POINT_COLORS.len()];
        let _ = writeln!(
            s,
            r#"<g class="mc" data-n="{n}" stroke="{color}" fill="{color}">"#
        );
        for r in rows.iter().filter(|r| r.n == n) {
            let x = f.x(r.c);
            let half = Z_99 * r.tv_stderr;
            let _ = writeln!(
                s,
                r#"<g class="mc-point" data-c="{}" data-n="{}" data-d="{}" data-tv-mc="{}" data-tv-stderr="{}" data-tv-limit="{}" data-frac-in-q="{}" data-seed="{}"><line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke-width="1.5"/><circle cx="{x:.2}" cy="{:.2}" r="3.5"/></g>"#,
                r.c,
                r.n,
                r.d,
                r.tv_mc,
                r.tv_stderr,
                r.tv_limit,
                r.frac_in_q,
                r.seed,
                f.y(r.tv_mc - half),
                f.y(r.tv_mc + half),
                f.y(r.tv_mc),
            );
        }
        let _ = writeln!(s, "</g>");
    }

    // legend
    let (lx, ly) = (WIDTH - RIGHT - 270.0, TOP + 16.0);
    let _ = writeln!(s, r#"<g id="legend">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{CURVE_COLOR}" stroke-width="2"/><text x="{:.2}" y="{:.2}">limit Erf(1 / (4 √(3c)))</text>"#,
        lx + 24.0,
        lx + 32.0,
        ly + 4.0
    );
    for (k, &n) in ns.iter().enumerate() {
        let color = POINT_COLORS[k % POINT_COLORS.len()];
        let y = ly + 18.0 * (k + 1) as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{y:.2}" r="3.5" fill="{color}"/><text x="{:.2}" y="{:.2}">Monte Carlo, n = {n} (± 2.58 stderr)</text>"#,
            lx + 12.0,
            lx + 32.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Renders the figure and writes it to `path`.
pub fn emit_figure1_svg(rows: &[SweepRow], path: &Path) -> Result<()> {
    let svg = render_figure1_svg(rows)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
