//! Minimal deterministic SVG charts. All numbers are printed with fixed
//! precision so identical inputs give identical bytes.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    pub annotation: Option<String>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(vals: impl Iterator<Item = f64>, log: bool) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in vals.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
            (lo, hi) = (lo - pad, hi + pad);
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        } else {
            let pad = 0.05 * (hi - lo);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Axis { lo, hi, log }
    }

    fn map(&self, v: f64, a: f64, b: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some(a + (v - self.lo) / (self.hi - self.lo) * (b - a))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let step = ((self.hi - self.lo) / 6.0).ceil().max(1.0);
            let mut out = Vec::new();
            let mut e = self.lo;
            while e <= self.hi + 1e-9 {
                out.push((10f64.powf(e), format!("1e{}", e as i64)));
                e += step;
            }
            out
        } else {
            (0..=5)
                .map(|i| {
                    let v = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                    (v, format!("{v:.3}"))
                })
                .collect()
        }
    }
}

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, esc(title));
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, LEFT + (W - LEFT - RIGHT) / 2.0, H - 12.0, esc(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + (H - TOP - BOTTOM) / 2.0,
        TOP + (H - TOP - BOTTOM) / 2.0,
        esc(y_label)
    );
}

pub fn line_chart_svg(c: &LineChart) -> String {
    let xs = Axis::fit(c.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), c.log_x);
    let ys = Axis::fit(c.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), c.log_y);
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
    let mut out = String::new();
    frame(&mut out, &c.title, &c.x_label, &c.y_label);
    let _ = writeln!(out, r##"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##, x1 - x0, y0 - y1);
    for (v, label) in xs.ticks() {
        if let Some(x) = xs.map(v, x0, x1) {
            let _ = writeln!(out, r##"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/>"##, y0 + 5.0);
            let _ = writeln!(out, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#, y0 + 18.0);
        }
    }
    for (v, label) in ys.ticks() {
        if let Some(y) = ys.map(v, y0, y1) {
            let _ = writeln!(out, r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="#333"/>"##, x0 - 5.0);
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#, x0 - 8.0, y + 4.0);
        }
    }
    for (i, s) in c.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter_map(|&(a, b)| Some(format!("{:.2},{:.2}", xs.map(a, x0, x1)?, ys.map(b, y0, y1)?)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#, pts.join(" "));
        for p in &pts {
            let (a, b) = p.split_once(',').expect("pair");
            let _ = writeln!(out, r#"<circle cx="{a}" cy="{b}" r="2.5" fill="{color}"/>"#);
        }
        let ly = y1 + 16.0 + 16.0 * i as f64;
        let _ = writeln!(out, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/>"#, x1 - 150.0, x1 - 130.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x1 - 125.0, ly + 4.0, esc(&s.name));
    }
    if let Some(a) = &c.annotation {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-style="italic">{}</text>"#, x0 + 10.0, y0 - 10.0, esc(a));
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap of `log10(value)`; rows are `y` samples, columns `x` samples.
pub fn heatmap_svg(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], values: &[Vec<f64>]) -> String {
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT - 60.0, H - BOTTOM, TOP);
    let logs: Vec<f64> = values.iter().flatten().filter(|v| **v > 0.0 && v.is_finite()).map(|v| v.log10()).collect();
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (0.0, 1.0) };
    let mut out = String::new();
    frame(&mut out, title, x_label, y_label);
    let (nx, ny) = (xs.len().max(1) as f64, ys.len().max(1) as f64);
    let (cw, ch) = ((x1 - x0) / nx, (y0 - y1) / ny);
    for (r, row) in values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let u = if v > 0.0 && v.is_finite() { (v.log10() - lo) / (hi - lo) } else { 0.0 };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x0 + c as f64 * cw,
                y0 - (r + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                ramp(u)
            );
        }
    }
    for (i, &x) in xs.iter().enumerate().step_by((xs.len() / 8).max(1)) {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x}</text>"#, x0 + (i as f64 + 0.5) * cw, y0 + 18.0);
    }
    for (i, &y) in ys.iter().enumerate().step_by((ys.len() / 6).max(1)) {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y:.2}</text>"#, x0 - 8.0, y0 - (i as f64 + 0.5) * ch + 4.0);
    }
    for i in 0..=10 {
        let u = i as f64 / 10.0;
        let _ = writeln!(out, r#"<rect x="{:.1}" y="{:.1}" width="16" height="{:.1}" fill="{}"/>"#, x1 + 20.0, y0 - (i + 1) as f64 * (y0 - y1) / 11.0, (y0 - y1) / 11.0 + 0.05, ramp(u));
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">1e{lo:.1}</text>"#, x1 + 38.0, y0 - 2.0);
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">1e{hi:.1}</text>"#, x1 + 38.0, y1 + 12.0);
    out.push_str("</svg>\n");
    out
}

/// Dark blue → teal → yellow.
fn ramp(u: f64) -> String {
    let u = u.clamp(0.0, 1.0);
    let stops = [(68.0, 1.0, 84.0), (33.0, 145.0, 140.0), (253.0, 231.0, 37.0)];
    let (a, b, s) = if u < 0.5 { (stops[0], stops[1], u * 2.0) } else { (stops[1], stops[2], u * 2.0 - 1.0) };
    let mix = |p: f64, q: f64| (p + (q - p) * s).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}
