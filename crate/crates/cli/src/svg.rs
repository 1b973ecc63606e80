//! Minimal static SVG charts: stacked panels of point/line series with
//! optional error bars or shaded bands.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 280.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const GAP: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spread {
    None,
    /// Vertical error bar at each point.
    Bars,
    /// Filled band between the lower and upper values.
    Band,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    /// `(x, y, lower, upper)`; `lower`/`upper` are used only with a spread.
    pub points: Vec<(f64, f64, f64, f64)>,
    pub spread: Spread,
    pub connect: bool,
}

impl Series {
    pub fn new(name: impl Into<String>, spread: Spread, connect: bool) -> Self {
        Self {
            name: name.into(),
            points: Vec::new(),
            spread,
            connect,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
    /// Dashed horizontal reference lines.
    pub references: Vec<(f64, String)>,
    /// Categorical x labels placed at `x = 0, 1, ...`; numeric ticks if empty.
    pub categories: Vec<String>,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub panels: Vec<Panel>,
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|k| k * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.06 * (hi - lo) } else { 0.5 * lo.abs().max(1e-3) };
    Some((lo - pad, hi + pad))
}

pub fn render(chart: &Chart) -> String {
    let height = MARGIN_TOP + chart.panels.len() as f64 * (PANEL_HEIGHT + GAP) + 10.0;
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&chart.title));

    for (p_idx, panel) in chart.panels.iter().enumerate() {
        let top = MARGIN_TOP + p_idx as f64 * (PANEL_HEIGHT + GAP);
        let bottom = top + PANEL_HEIGHT;
        let pts = || panel.series.iter().flat_map(|s| s.points.iter());
        let (x0, x1) = if panel.categories.is_empty() {
            range(pts().map(|p| p.0)).unwrap_or((0.0, 1.0))
        } else {
            (-0.5, panel.categories.len() as f64 - 0.5)
        };
        let ys = pts()
            .flat_map(|p| [p.1, p.2, p.3])
            .chain(panel.references.iter().map(|r| r.0));
        let (y0, y1) = range(ys).unwrap_or((0.0, 1.0));
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * PANEL_HEIGHT;

        let _ = writeln!(s, r##"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{PANEL_HEIGHT}" fill="none" stroke="#444"/>"##);
        for t in nice_ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN_LEFT}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
                MARGIN_LEFT + plot_w,
                MARGIN_LEFT - 6.0,
                y + 4.0,
                fmt_tick(t)
            );
        }
        if panel.categories.is_empty() {
            for t in nice_ticks(x0, x1) {
                let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, sx(t), bottom + 16.0, fmt_tick(t));
            }
        } else {
            for (i, c) in panel.categories.iter().enumerate() {
                let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, sx(i as f64), bottom + 16.0, escape(c));
            }
        }
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            top + PANEL_HEIGHT / 2.0,
            escape(&panel.y_label)
        );
        if p_idx + 1 == chart.panels.len() {
            let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, MARGIN_LEFT + plot_w / 2.0, bottom + 34.0, escape(&chart.x_label));
        }
        for (v, label) in &panel.references {
            let y = sy(*v);
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN_LEFT}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#333" stroke-dasharray="5 4"/><text x="{}" y="{:.2}" fill="#333">{}</text>"##,
                MARGIN_LEFT + plot_w,
                MARGIN_LEFT + plot_w + 6.0,
                y + 4.0,
                escape(label)
            );
        }

        for (k, series) in panel.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let p = &series.points;
            match series.spread {
                Spread::Band if !p.is_empty() => {
                    let mut d = String::new();
                    for (i, q) in p.iter().enumerate() {
                        let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(q.0), sy(q.3));
                    }
                    for q in p.iter().rev() {
                        let _ = write!(d, "L{:.2},{:.2} ", sx(q.0), sy(q.2));
                    }
                    let _ = writeln!(s, r#"<path d="{d}Z" fill="{color}" fill-opacity="0.18" stroke="none"/>"#);
                }
                Spread::Bars => {
                    for q in p {
                        let x = sx(q.0);
                        let _ = writeln!(
                            s,
                            r#"<line x1="{x:.2}" x2="{x:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}"/><line x1="{:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}"/><line x1="{:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                            sy(q.2),
                            sy(q.3),
                            x - 4.0,
                            x + 4.0,
                            sy(q.2),
                            sy(q.2),
                            x - 4.0,
                            x + 4.0,
                            sy(q.3),
                            sy(q.3)
                        );
                    }
                }
                _ => {}
            }
            if series.connect && p.len() > 1 {
                let pts: Vec<String> = p.iter().map(|q| format!("{:.2},{:.2}", sx(q.0), sy(q.1))).collect();
                let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#, pts.join(" "));
            }
            if !series.connect || p.len() <= 60 {
                for q in p {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(q.0), sy(q.1));
                }
            }
            let ly = top + 14.0 + 18.0 * k as f64;
            let lx = MARGIN_LEFT + plot_w + 10.0;
            let _ = writeln!(
                s,
                r#"<rect x="{lx}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{}" y="{ly:.2}">{}</text>"#,
                ly - 9.0,
                lx + 14.0,
                escape(&series.name)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
