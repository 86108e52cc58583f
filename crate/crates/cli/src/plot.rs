//! Minimal SVG 1.1 charts for signals and analytics tables.

use std::fmt::Write as _;

use shotmem_core::analytics::LetterValues;
use shotmem_core::Aspect;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 90.0;

/// Series class, written as the polyline's `class` attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Raw,
    Smoothed(usize),
}

#[derive(Debug, Clone)]
pub struct Series {
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
}

/// Background band spanning `[x0, x1)` in data units.
#[derive(Debug, Clone, Copy)]
pub struct Band {
    pub x0: f64,
    pub x1: f64,
    pub aspect: Aspect,
}

pub fn aspect_colour(a: Aspect) -> &'static str {
    match a {
        Aspect::CrimeScene => "#8dd3c7",
        Aspect::Victim => "#ffffb3",
        Aspect::DeathCause => "#bebada",
        Aspect::Evidence => "#fb8072",
        Aspect::Perpetrator => "#80b1d3",
        Aspect::Motive => "#fdb462",
        Aspect::Suspect => "#b3de69",
        Aspect::None => "#eeeeee",
    }
}

const LINE_COLOURS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(lo, hi): (f64, f64)| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self { x: widen(x), y: widen(y) }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<title>{}</title>
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        escape(title),
        WIDTH / 2.0,
        escape(title)
    );
}

fn y_axis(out: &mut String, f: &Frame) {
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#,
        HEIGHT - BOTTOM
    );
    for k in 0..=4 {
        let v = f.y.0 + (f.y.1 - f.y.0) * f64::from(k) / 4.0;
        let y = f.py(v);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Line chart of raw and smoothed series over aspect-coloured bands.
pub fn signal_chart(title: &str, series: &[Series], bands: &[Band]) -> String {
    let xs = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).chain(bands.iter().flat_map(|b| [b.x0, b.x1])));
    let ys = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let f = Frame::new(xs, ys);
    let mut out = String::new();
    open(&mut out, title);
    for b in bands {
        let _ = writeln!(
            out,
            r#"<rect class="band" data-aspect="{}" x="{:.2}" y="{TOP}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.6"/>"#,
            escape(b.aspect.label()),
            f.px(b.x0),
            (f.px(b.x1) - f.px(b.x0)).max(0.0),
            HEIGHT - TOP - BOTTOM,
            aspect_colour(b.aspect)
        );
    }
    y_axis(&mut out, &f);
    for (i, s) in series.iter().enumerate() {
        let (class, extra, colour, width) = match s.kind {
            SeriesKind::Raw => ("raw", String::new(), "#999999", 0.8),
            SeriesKind::Smoothed(n) => ("smoothed", format!(r#" data-window="{n}""#), LINE_COLOURS[i % LINE_COLOURS.len()], 1.8),
        };
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline class="{class}"{extra} fill="none" stroke="{colour}" stroke-width="{width}" points="{}"/>"#,
            pts.join(" ")
        );
    }
    // Legend: series first, then the aspects that appear.
    let mut lx = LEFT;
    let ly = HEIGHT - BOTTOM + 40.0;
    for (i, s) in series.iter().enumerate() {
        let (label, colour) = match s.kind {
            SeriesKind::Raw => ("raw".to_string(), "#999999"),
            SeriesKind::Smoothed(n) => (format!("N={n}"), LINE_COLOURS[i % LINE_COLOURS.len()]),
        };
        let _ = writeln!(out, r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="4" fill="{colour}"/><text x="{:.2}" y="{ly:.2}">{label}</text>"#, ly - 4.0, lx + 16.0);
        lx += 70.0;
    }
    let mut seen: Vec<Aspect> = bands.iter().map(|b| b.aspect).collect();
    seen.sort();
    seen.dedup();
    for a in seen {
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="12" fill="{}"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
            ly - 10.0,
            aspect_colour(a),
            lx + 16.0,
            escape(a.label())
        );
        lx += 100.0;
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">shot start (min)</text>"#,
        WIDTH / 2.0,
        HEIGHT - BOTTOM + 20.0
    );
    out.push_str("</svg>\n");
    out
}

fn category_x(i: usize, n: usize) -> (f64, f64) {
    let slot = (WIDTH - LEFT - RIGHT) / n.max(1) as f64;
    (LEFT + slot * i as f64, slot)
}

fn category_label(out: &mut String, i: usize, n: usize, label: &str) {
    let (x, slot) = category_x(i, n);
    let cx = x + slot / 2.0;
    let cy = HEIGHT - BOTTOM + 14.0;
    let _ = writeln!(
        out,
        r#"<text x="{cx:.2}" y="{cy:.2}" text-anchor="end" transform="rotate(-35 {cx:.2} {cy:.2})">{}</text>"#,
        escape(label)
    );
}

/// Vertical bars, one per labelled value.
pub fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    let (_, hi) = range(bars.iter().map(|b| b.1));
    let f = Frame::new((0.0, 1.0), (0.0, if hi > 0.0 { hi } else { 1.0 }));
    let mut out = String::new();
    open(&mut out, title);
    y_axis(&mut out, &f);
    for (i, (label, v)) in bars.iter().enumerate() {
        let (x, slot) = category_x(i, bars.len());
        let top = f.py(*v);
        let _ = writeln!(
            out,
            r##"<rect class="bar" x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="#4c72b0"/>"##,
            x + slot * 0.15,
            slot * 0.7,
            f.py(0.0) - top
        );
        category_label(&mut out, i, bars.len(), label);
    }
    out.push_str("</svg>\n");
    out
}

/// Boxen-style chart: nested boxes for fourths, eighths and sixteenths, a
/// median tick, and `n` under each group. Empty groups get a label only.
pub fn letter_value_chart(title: &str, groups: &[(String, usize, Option<LetterValues>)]) -> String {
    let ys = range(groups.iter().filter_map(|g| g.2).flat_map(|v| [v.sixteenths.0, v.sixteenths.1]));
    let f = Frame::new((0.0, 1.0), if ys.0.is_finite() { ys } else { (0.0, 1.0) });
    let mut out = String::new();
    open(&mut out, title);
    y_axis(&mut out, &f);
    for (i, (label, n, stats)) in groups.iter().enumerate() {
        let (x, slot) = category_x(i, groups.len());
        let cx = x + slot / 2.0;
        if let Some(v) = stats {
            for (k, (lo, hi), shade) in [
                (0.30, v.sixteenths, "#c6dbef"),
                (0.38, v.eighths, "#6baed6"),
                (0.45, (v.q1, v.q3), "#2171b5"),
            ] {
                let half = slot * (0.5 - k);
                let _ = writeln!(
                    out,
                    r#"<rect class="letter-value" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{shade}"/>"#,
                    cx - half,
                    f.py(hi),
                    2.0 * half,
                    (f.py(lo) - f.py(hi)).max(0.5)
                );
            }
            let _ = writeln!(
                out,
                r#"<line class="median" x1="{:.2}" y1="{my:.2}" x2="{:.2}" y2="{my:.2}" stroke="white" stroke-width="2"/>"#,
                cx - slot * 0.2,
                cx + slot * 0.2,
                my = f.py(v.median)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-size="10">n={n}</text>"#,
            TOP - 4.0
        );
        category_label(&mut out, i, groups.len(), label);
    }
    out.push_str("</svg>\n");
    out
}
