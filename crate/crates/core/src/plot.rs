//! Minimal self-contained SVG line charts.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glyph {
    Circle,
    Square,
    Triangle,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, color: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            color: color.into(),
            points,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Marker {
    pub label: String,
    pub color: String,
    pub at: (f64, f64),
    pub glyph: Glyph,
}

impl Marker {
    pub fn new(label: impl Into<String>, color: impl Into<String>, at: (f64, f64), glyph: Glyph) -> Self {
        Marker {
            label: label.into(),
            color: color.into(),
            at,
            glyph,
        }
    }
}

/// Horizontal dashed reference line.
#[derive(Debug, Clone)]
pub struct HLine {
    pub label: String,
    pub color: String,
    pub y: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
    pub hlines: Vec<HLine>,
}

impl Panel {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Panel {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Default::default()
        }
    }

    pub fn series(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn marker(mut self, m: Marker) -> Self {
        self.markers.push(m);
        self
    }

    pub fn hline(mut self, label: impl Into<String>, color: impl Into<String>, y: f64) -> Self {
        self.hlines.push(HLine {
            label: label.into(),
            color: color.into(),
            y,
        });
        self
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = xs;
        let grow = |r: &mut (f64, f64), v: f64| {
            if v.is_finite() {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        };
        for s in &self.series {
            for &(x, y) in &s.points {
                grow(&mut xs, x);
                grow(&mut ys, y);
            }
        }
        for m in &self.markers {
            grow(&mut xs, m.at.0);
            grow(&mut ys, m.at.1);
        }
        for h in &self.hlines {
            grow(&mut ys, h.y);
        }
        (pad(xs), pad(ys))
    }
}

fn pad(r: (f64, f64)) -> (f64, f64) {
    if !r.0.is_finite() {
        return (-1.0, 1.0);
    }
    let span = r.1 - r.0;
    if span <= 1e-12 * r.0.abs().max(1.0) {
        return (r.0 - 1.0, r.1 + 1.0);
    }
    (r.0 - 0.05 * span, r.1 + 0.05 * span)
}

/// Roughly `n` round tick values covering `r`.
fn ticks(r: (f64, f64), n: usize) -> Vec<f64> {
    let raw = (r.1 - r.0) / n as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (r.0 / step).ceil() as i64;
    let last = (r.1 / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Keeps at most `max` points, always including the last one.
pub fn thin(points: &[(f64, f64)], max: usize) -> Vec<(f64, f64)> {
    if points.len() <= max || max < 2 {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(max - 1);
    let mut out: Vec<_> = points.iter().step_by(stride).copied().collect();
    if out.last() != points.last() {
        out.push(*points.last().unwrap());
    }
    out
}

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 50.0); // left, right, top, bottom

/// Renders panels stacked vertically into one SVG document.
pub fn render(panels: &[Panel]) -> String {
    let height = PANEL_HEIGHT * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, i as f64 * PANEL_HEIGHT);
    }
    out.push_str("</svg>\n");
    out
}

fn render_panel(out: &mut String, p: &Panel, y_off: f64) {
    let (l, r, t, b) = MARGIN;
    let (x0, x1) = (l, WIDTH - r);
    let (y0, y1) = (y_off + t, y_off + PANEL_HEIGHT - b);
    let (xr, yr) = p.bounds();
    let sx = |x: f64| x0 + (x - xr.0) / (xr.1 - xr.0) * (x1 - x0);
    let sy = |y: f64| y1 - (y - yr.0) / (yr.1 - yr.0) * (y1 - y0);

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        0.5 * (x0 + x1),
        y_off + 22.0,
        escape(&p.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
        x1 - x0,
        y1 - y0
    );
    for v in ticks(xr, 6) {
        let x = sx(v);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{y1:.1}" x2="{x:.1}" y2="{:.1}" stroke="#444"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            y1 + 5.0,
            y1 + 18.0,
            fmt_tick(v)
        );
    }
    for v in ticks(yr, 6) {
        let y = sy(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="#444"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        y1 + 36.0,
        escape(&p.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 - 50.0,
        0.5 * (y0 + y1),
        x0 - 50.0,
        0.5 * (y0 + y1),
        escape(&p.y_label)
    );

    for h in &p.hlines {
        let y = sy(h.y);
        let _ = writeln!(
            out,
            r#"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="{}" stroke-dasharray="6 4"/>"#,
            h.color
        );
    }
    for s in &p.series {
        let mut pts = String::new();
        for &(x, y) in &thin(&s.points, 4000) {
            let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1" points="{}"/>"#,
            s.color,
            pts.trim_end()
        );
    }
    for m in &p.markers {
        let (x, y) = (sx(m.at.0), sy(m.at.1));
        let shape = match m.glyph {
            Glyph::Circle => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="5""#),
            Glyph::Square => format!(r#"<rect x="{:.2}" y="{:.2}" width="10" height="10""#, x - 5.0, y - 5.0),
            Glyph::Triangle => format!(
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}""#,
                x,
                y - 6.0,
                x - 6.0,
                y + 5.0,
                x + 6.0,
                y + 5.0
            ),
        };
        let _ = writeln!(out, r##"{shape} fill="{}" stroke="#000"/>"##, m.color);
    }

    // legend
    let mut ly = y0 + 14.0;
    let entries = p
        .series
        .iter()
        .map(|s| (&s.label, &s.color))
        .chain(p.markers.iter().map(|m| (&m.label, &m.color)))
        .chain(p.hlines.iter().map(|h| (&h.label, &h.color)));
    for (label, color) in entries {
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            x1 - 150.0,
            ly - 9.0,
            x1 - 135.0,
            ly,
            escape(label)
        );
        ly += 16.0;
    }
}
