//! Minimal SVG figures: line charts, heatmaps and the trajectory overlay.
//! Coordinates are printed with two decimals so output is byte-stable.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Axis {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Axis { lo, hi, log }
    }

    /// Position in [0, 1], or `None` for values a log axis cannot show.
    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v > 0.0 {
                v.log10()
            } else {
                return None;
            }
        } else {
            v
        };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.floor() as i32, self.hi.ceil() as i32);
            return (a..=b)
                .map(f64::from)
                .filter(|e| *e >= self.lo - 1e-9 && *e <= self.hi + 1e-9)
                .map(|e| ((e - self.lo) / (self.hi - self.lo), format!("1e{e}")))
                .collect();
        }
        (0..=4)
            .map(|i| {
                let f = f64::from(i) / 4.0;
                let v = self.lo + f * (self.hi - self.lo);
                (f, format!("{}", (v * 1000.0).round() / 1000.0))
            })
            .collect()
    }
}

impl LineChart {
    pub fn render(&self) -> String {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let x = Axis::fit(pts().map(|p| p.0), self.log_x);
        let y = Axis::fit(pts().map(|p| p.1), self.log_y);
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let px = |u: f64| LEFT + u * pw;
        let py = |u: f64| TOP + (1.0 - u) * ph;

        let mut out = String::new();
        header(&mut out, W, H, &self.title);
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
        );
        for (u, label) in x.ticks() {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                px(u),
                TOP + ph + 16.0
            );
        }
        for (u, label) in y.ticks() {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                LEFT - 6.0,
                py(u) + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let coords: Vec<String> = s
                .points
                .iter()
                .filter_map(|&(a, b)| Some((x.unit(a)?, y.unit(b)?)))
                .map(|(a, b)| format!("{:.2},{:.2}", px(a), py(b)))
                .collect();
            let c = color(i);
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
            for p in &coords {
                let (a, b) = p.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(out, r#"<circle cx="{a}" cy="{b}" r="2.5" fill="{c}"/>"#);
            }
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = W - RIGHT + 12.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{c}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 16.0,
                lx + 20.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// A matrix drawn as colored cells: rows top to bottom, columns left to
/// right, values mapped linearly from 0 (white) to the maximum (dark blue).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub rows: Vec<Vec<f64>>,
}

impl Heatmap {
    pub fn render(&self) -> String {
        let n_rows = self.rows.len().max(1);
        let n_cols = self.rows.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let max = self
            .rows
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(*v))
            .max(1e-300);
        let pw = W - LEFT - 40.0;
        let ph = H - TOP - BOTTOM;
        let cw = pw / n_cols as f64;
        let ch = ph / n_rows as f64;

        let mut out = String::new();
        header(&mut out, W, H, &self.title);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let f = (v / max).clamp(0.0, 1.0);
                let shade = |full: f64| (255.0 - f * (255.0 - full)).round() as u8;
                let _ = writeln!(
                    out,
                    r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{:02x}{:02x}{:02x}"/>"##,
                    LEFT + c as f64 * cw,
                    TOP + r as f64 * ch,
                    cw,
                    ch,
                    shade(8.0),
                    shade(48.0),
                    shade(107.0)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{} (1..{n_cols})</text>"#,
            LEFT + pw / 2.0,
            H - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="24" y="{:.2}" text-anchor="middle" transform="rotate(-90 24 {:.2})">{} (1..{n_rows})</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        out.push_str("</svg>\n");
        out
    }
}

/// Axis-aligned rectangle in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub hallway: bool,
}

/// Trajectory points colored by cluster over the map, landmarks as diamonds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryPlot {
    pub title: String,
    pub regions: Vec<Region>,
    pub landmarks: Vec<[f64; 2]>,
    /// Position and 1-based cluster label.
    pub points: Vec<([f64; 2], usize)>,
}

impl TrajectoryPlot {
    pub fn render(&self) -> String {
        let xs = self
            .regions
            .iter()
            .flat_map(|r| [r.x_min, r.x_max])
            .chain(self.points.iter().map(|p| p.0[0]));
        let ys = self
            .regions
            .iter()
            .flat_map(|r| [r.y_min, r.y_max])
            .chain(self.points.iter().map(|p| p.0[1]));
        let x = Axis::fit(xs, false);
        let y = Axis::fit(ys, false);
        let span = (x.hi - x.lo).max(y.hi - y.lo);
        let size = 560.0;
        let scale = size / span;
        let margin = 30.0;
        let width = (x.hi - x.lo) * scale + 2.0 * margin;
        let height = (y.hi - y.lo) * scale + 2.0 * margin + 20.0;
        let px = |v: f64| margin + (v - x.lo) * scale;
        let py = |v: f64| height - margin - (v - y.lo) * scale;

        let mut out = String::new();
        header(&mut out, width, height, &self.title);
        for r in &self.regions {
            let fill = if r.hallway { "#eeeeee" } else { "#f8f8f0" };
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" stroke="#555555"/>"##,
                px(r.x_min),
                py(r.y_max),
                (r.x_max - r.x_min) * scale,
                (r.y_max - r.y_min) * scale
            );
        }
        for l in &self.landmarks {
            let (cx, cy) = (px(l[0]), py(l[1]));
            let d = 5.0;
            let _ = writeln!(
                out,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="black"/>"#,
                cx,
                cy - d,
                cx + d,
                cy,
                cx,
                cy + d,
                cx - d,
                cy
            );
        }
        for (p, label) in &self.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
                px(p[0]),
                py(p[1]),
                color(label.saturating_sub(1))
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
