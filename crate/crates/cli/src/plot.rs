//! Self-contained SVG line plots with a logarithmic `eps` axis.

use std::fmt::Write;

const W: f64 = 680.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub log_y: bool,
    /// Dashed `c sqrt(eps)` line through the largest-`eps` point of the first series.
    pub sqrt_guide: bool,
    /// Horizontal reference values.
    pub hlines: Vec<f64>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Option<Axis> {
        let v: Vec<f64> = values
            .filter(|x| x.is_finite() && (!log || *x > 0.0))
            .collect();
        if v.is_empty() {
            return None;
        }
        let (mn, mx) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        if log {
            let (lo, mut hi) = (mn.log10().floor(), mx.log10().ceil());
            if hi <= lo {
                hi = lo + 1.0;
            }
            Some(Axis { lo, hi, log })
        } else {
            let pad = if mx > mn {
                0.08 * (mx - mn)
            } else {
                0.5 * mn.abs().max(1.0)
            };
            Some(Axis {
                lo: mn - pad,
                hi: mx + pad,
                log,
            })
        }
    }

    /// Position in `[0, 1]`.
    fn frac(&self, x: f64) -> f64 {
        let t = if self.log { x.log10() } else { x };
        (t - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            (self.lo as i32..=self.hi as i32)
                .map(|k| (10f64.powi(k), format!("1e{k}")))
                .collect()
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

impl Plot {
    /// `None` when no point is drawable.
    pub fn render(&self) -> Option<String> {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let xa = Axis::new(pts().map(|p| p.0), true)?;
        let ys = pts().map(|p| p.1).chain(self.hlines.iter().copied());
        let ya = Axis::new(ys, self.log_y)?;
        let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
        let px = |x: f64| LEFT + pw * xa.frac(x);
        let py = |y: f64| TOP + ph * (1.0 - ya.frac(y));
        let ok = |p: &(f64, f64)| {
            p.0 > 0.0 && p.0.is_finite() && p.1.is_finite() && (!self.log_y || p.1 > 0.0)
        };

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            esc(&self.title)
        );
        for (v, label) in xa.ticks() {
            let x = px(v);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
                TOP + ph
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                TOP + ph + 18.0
            );
        }
        for (v, label) in ya.ticks() {
            let y = py(v);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
                LEFT + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                LEFT - 6.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{TOP}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#333"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 14.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            esc(&self.y_label)
        );
        for &h in &self.hlines {
            if ya.log && h <= 0.0 {
                continue;
            }
            let y = py(h);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#555" stroke-dasharray="2,3"/>"##,
                LEFT + pw
            );
        }
        if self.sqrt_guide {
            let anchor = self.series.first().and_then(|f| {
                f.points
                    .iter()
                    .filter(|p| ok(p))
                    .max_by(|a, b| a.0.total_cmp(&b.0))
            });
            if let Some(&(x0, y0)) = anchor {
                let (xl, xr) = (10f64.powf(xa.lo), 10f64.powf(xa.hi));
                let g = |x: f64| y0 * (x / x0).sqrt();
                let _ = writeln!(
                    s,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" stroke-dasharray="6,4" clip-path="url(#plot)"/>"##,
                    px(xl),
                    py(g(xl)),
                    px(xr),
                    py(g(xr))
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw:.2}" height="{ph:.2}"/></clipPath>"#
        );
        for (k, ser) in self.series.iter().enumerate() {
            let c = COLORS[k % COLORS.len()];
            let p: Vec<String> = ser
                .points
                .iter()
                .filter(|p| ok(p))
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            if p.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.6" clip-path="url(#plot)"/>"#,
                p.join(" ")
            );
            for q in &p {
                let (x, y) = q.split_once(',').expect("pair");
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.6" fill="{c}"/>"#);
            }
        }
        let mut ly = TOP + 8.0;
        let lx = LEFT + pw + 14.0;
        for (k, ser) in self.series.iter().enumerate() {
            let c = COLORS[k % COLORS.len()];
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{c}" stroke-width="2"/>"#,
                lx + 22.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 28.0,
                ly + 4.0,
                esc(&ser.label)
            );
            ly += 18.0;
        }
        if self.sqrt_guide {
            let _ = writeln!(
                s,
                r##"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="#000" stroke-dasharray="6,4"/>"##,
                lx + 22.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">sqrt(eps)</text>"#,
                lx + 28.0,
                ly + 4.0
            );
        }
        s.push_str("</svg>\n");
        Some(s)
    }
}
