//! Dependency-free SVG line plots of fidelity trade-off curves.
//!
//! The estimation fidelity G runs along the horizontal axis and the
//! operation fidelity F along the vertical one. Curves are distinguished by
//! the dash patterns solid / dashed / dotted-dashed / dotted, cycling with a
//! grey fallback beyond four series.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 56.0;

const DASHES: [&str; 4] = ["", "9,5", "12,4,2,4", "2,4"];

pub struct Series {
    pub label: String,
    /// (G, F) pairs.
    pub points: Vec<(f64, f64)>,
    pub style: usize,
}

pub struct Plot {
    pub title: String,
    pub series: Vec<Series>,
    /// Plot window in data coordinates, ticks every 0.05 on both axes.
    pub g_range: (f64, f64),
    pub f_range: (f64, f64),
}

impl Plot {
    /// Absolute fidelity window [1/2, 1] x [1/2, 1].
    pub fn absolute(title: String, series: Vec<Series>) -> Self {
        Self {
            title,
            series,
            g_range: (0.5, 1.0),
            f_range: (0.5, 1.0),
        }
    }

    /// Relative window [0, 1] x [0, 1] for rescaled fidelities.
    pub fn relative(title: String, series: Vec<Series>) -> Self {
        Self {
            title,
            series,
            g_range: (0.0, 1.0),
            f_range: (0.0, 1.0),
        }
    }

    fn x_px(&self, g: f64) -> f64 {
        let (lo, hi) = self.g_range;
        MARGIN_LEFT + (g - lo) / (hi - lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y_px(&self, f: f64) -> f64 {
        let (lo, hi) = self.f_range;
        HEIGHT - MARGIN_BOTTOM - (f - lo) / (hi - lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif">"#
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="18" font-size="14" text-anchor="middle">{}</text>"#,
            (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            xml_escape(&self.title)
        );

        // frame
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black" stroke-width="1"/>"#,
            MARGIN_LEFT,
            MARGIN_TOP,
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        );

        // ticks every 0.05
        let mut tick = (self.g_range.0 / 0.05).round() * 0.05;
        while tick <= self.g_range.1 + 1e-9 {
            let x = self.x_px(tick);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black" stroke-width="1"/>"#,
                HEIGHT - MARGIN_BOTTOM,
                HEIGHT - MARGIN_BOTTOM + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{tick:.2}</text>"#,
                HEIGHT - MARGIN_BOTTOM + 18.0
            );
            tick += 0.05;
        }
        let mut tick = (self.f_range.0 / 0.05).round() * 0.05;
        while tick <= self.f_range.1 + 1e-9 {
            let y = self.y_px(tick);
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black" stroke-width="1"/>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{tick:.2}</text>"#,
                MARGIN_LEFT - 9.0,
                y + 4.0
            );
            tick += 0.05;
        }

        // axis labels
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">G</text>"#,
            (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            HEIGHT - 14.0
        );
        let _ = writeln!(
            out,
            r#"<text x="20" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 20 {:.1})">F</text>"#,
            (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
            (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0
        );

        for (i, series) in self.series.iter().enumerate() {
            let dash = DASHES[series.style % DASHES.len()];
            let stroke = if series.style < DASHES.len() {
                "black"
            } else {
                "grey"
            };
            let mut points = String::new();
            for &(g, f) in &series.points {
                if !g.is_finite() || !f.is_finite() {
                    continue;
                }
                let _ = write!(points, "{:.2},{:.2} ", self.x_px(g), self.y_px(f));
            }
            let dash_attr = if dash.is_empty() {
                String::new()
            } else {
                format!(r#" stroke-dasharray="{dash}""#)
            };
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{stroke}" stroke-width="1.4"{dash_attr} points="{}"/>"#,
                points.trim_end()
            );

            // legend entry
            let ly = MARGIN_TOP + 16.0 + 18.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{stroke}" stroke-width="1.4"{dash_attr}/>"#,
                MARGIN_LEFT + 12.0,
                MARGIN_LEFT + 52.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                MARGIN_LEFT + 58.0,
                ly + 4.0,
                xml_escape(&series.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
