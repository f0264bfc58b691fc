//! Minimal SVG line plots: axes, labeled polylines, and vertical arrows for
//! point masses.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Debug, Default)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Point mass drawn as an arrow of the given height.
#[derive(Clone, Debug)]
pub struct Arrow {
    pub x: f64,
    pub height: f64,
    pub label: String,
}

#[derive(Clone, Debug, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub arrows: Vec<Arrow>,
    /// Use the same scale on both axes (for curves in the plane).
    pub equal_aspect: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

impl Plot {
    fn frame(&self) -> Frame {
        let mut xs: Vec<f64> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .collect();
        let mut ys: Vec<f64> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .collect();
        for a in &self.arrows {
            xs.push(a.x);
            ys.push(0.0);
            ys.push(a.height);
        }
        xs.retain(|v| v.is_finite());
        ys.retain(|v| v.is_finite());
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let (mut x0, mut x1) = span(&xs);
        let (mut y0, mut y1) = span(&ys);
        if self.equal_aspect {
            let sx = (x1 - x0) / (WIDTH - 2.0 * MARGIN);
            let sy = (y1 - y0) / (HEIGHT - 2.0 * MARGIN);
            let s = sx.max(sy);
            let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            x0 = cx - 0.5 * s * (WIDTH - 2.0 * MARGIN);
            x1 = cx + 0.5 * s * (WIDTH - 2.0 * MARGIN);
            y0 = cy - 0.5 * s * (HEIGHT - 2.0 * MARGIN);
            y1 = cy + 0.5 * s * (HEIGHT - 2.0 * MARGIN);
        }
        Frame { x0, x1, y0, y1 }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        out.push_str(
            r#"<defs><marker id="head" markerWidth="8" markerHeight="8" refX="4" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="black"/></marker></defs>"#,
        );
        out.push('\n');
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        // axes through the origin when it is in view, else along the frame
        let ax = if f.y0 <= 0.0 && f.y1 >= 0.0 {
            f.py(0.0)
        } else {
            HEIGHT - MARGIN
        };
        let ay = if f.x0 <= 0.0 && f.x1 >= 0.0 {
            f.px(0.0)
        } else {
            MARGIN
        };
        let _ = writeln!(
            out,
            r#"<line x1="{MARGIN}" y1="{ax:.2}" x2="{:.2}" y2="{ax:.2}" stroke="gray"/>"#,
            WIDTH - MARGIN
        );
        let _ = writeln!(
            out,
            r#"<line x1="{ay:.2}" y1="{MARGIN}" x2="{ay:.2}" y2="{:.2}" stroke="gray"/>"#,
            HEIGHT - MARGIN
        );
        for (v, anchor) in [(f.x0, "start"), (f.x1, "end")] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}" font-size="11">{v:.3}</text>"#,
                f.px(v),
                HEIGHT - MARGIN + 16.0
            );
        }
        for v in [f.y0, f.y1] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{v:.3}</text>"#,
                MARGIN - 4.0,
                f.py(v) + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
                pts.join(" "),
                escape(&s.label)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}">{}</text>"#,
                WIDTH - MARGIN - 150.0,
                MARGIN + 16.0 * i as f64,
                escape(&s.label)
            );
        }
        for a in &self.arrows {
            let (x, y0, y1) = (f.px(a.x), f.py(0.0), f.py(a.height));
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="black" stroke-width="1.5" marker-end="url(#head)"/>"#
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                x + 4.0,
                y1 - 4.0,
                escape(&a.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_curves_and_arrows() {
        let plot = Plot {
            title: "t <1>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![
                Series {
                    label: "a".into(),
                    points: vec![(0.0, 0.0), (1.0, 1.0)],
                },
                Series {
                    label: "b".into(),
                    points: vec![(0.0, 1.0), (1.0, f64::NAN)],
                },
            ],
            arrows: vec![Arrow {
                x: 0.5,
                height: 2.0,
                label: "m".into(),
            }],
            equal_aspect: false,
        };
        let s = plot.render();
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("marker-end"));
        assert!(s.contains("t &lt;1&gt;"));
        assert!(!s.contains("NaN"));
    }

    #[test]
    fn empty_plot_is_valid() {
        let s = Plot::default().render();
        assert!(s.contains("</svg>"));
        assert!(!s.contains("NaN") && !s.contains("inf"));
    }
}
