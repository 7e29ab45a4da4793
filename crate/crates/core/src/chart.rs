//! Deterministic SVG line charts.
//!
//! Output depends only on the input: no timestamps, no random ids, fixed
//! number formatting. Each chart comes with a CSV (`series,x,y`) of exactly
//! the points drawn.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn with_series(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartDocument {
    pub svg: String,
    pub csv: String,
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        values.fold(None, |acc, v| match acc {
            None => Some(Range { lo: v, hi: v }),
            Some(r) => Some(Range {
                lo: r.lo.min(v),
                hi: r.hi.max(v),
            }),
        })
    }

    fn padded(self) -> Self {
        if self.hi > self.lo {
            self
        } else {
            let pad = if self.lo == 0.0 { 1.0 } else { self.lo.abs() * 0.5 };
            Range {
                lo: self.lo - pad,
                hi: self.hi + pad,
            }
        }
    }

    fn scale(&self, v: f64, out_lo: f64, out_hi: f64) -> f64 {
        out_lo + (v - self.lo) / (self.hi - self.lo) * (out_hi - out_lo)
    }
}

/// About five round-numbered ticks covering the range.
fn ticks(r: Range) -> Vec<f64> {
    let raw = (r.hi - r.lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (r.lo / step).ceil() as i64;
    let last = (r.hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders the chart. Non-finite points are dropped; a series left without
/// points keeps its legend entry but draws no line. Fails if no series has
/// any finite point.
pub fn emit_chart(chart: &Chart) -> Result<ChartDocument> {
    let series: Vec<(&str, Vec<(f64, f64)>)> = chart
        .series
        .iter()
        .map(|s| {
            let pts = s
                .points
                .iter()
                .copied()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            (s.name.as_str(), pts)
        })
        .collect();

    let all = || series.iter().flat_map(|(_, p)| p.iter());
    let (xr, yr) = match (Range::of(all().map(|p| p.0)), Range::of(all().map(|p| p.1))) {
        (Some(x), Some(y)) => (x.padded(), y.padded()),
        _ => return Err(Error::EmptyChart),
    };

    let plot_left = MARGIN_LEFT;
    let plot_right = WIDTH - MARGIN_RIGHT;
    let plot_top = MARGIN_TOP;
    let plot_bottom = HEIGHT - MARGIN_BOTTOM;
    let px = |x: f64| xr.scale(x, plot_left, plot_right);
    let py = |y: f64| yr.scale(y, plot_bottom, plot_top);

    let mut svg = String::new();
    // writing to a String cannot fail
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (plot_left + plot_right) / 2.0,
        escape(&chart.title)
    );

    let _ = writeln!(svg, r##"<g stroke="#dddddd" stroke-width="1">"##);
    for t in ticks(xr) {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{plot_top:.2}" x2="{x:.2}" y2="{plot_bottom:.2}"/>"#
        );
    }
    for t in ticks(yr) {
        let y = py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{plot_left:.2}" y1="{y:.2}" x2="{plot_right:.2}" y2="{y:.2}"/>"#
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r#"<rect x="{plot_left:.2}" y="{plot_top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        plot_right - plot_left,
        plot_bottom - plot_top
    );
    for t in ticks(xr) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(t),
            plot_bottom + 18.0,
            tick_label(t)
        );
    }
    for t in ticks(yr) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            plot_left - 6.0,
            py(t) + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (plot_left + plot_right) / 2.0,
        HEIGHT - 18.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
        (plot_top + plot_bottom) / 2.0,
        escape(&chart.y_label)
    );

    let mut csv = String::from("series,x,y\n");
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if !pts.is_empty() {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = plot_top + 10.0 + 18.0 * i as f64;
        let lx = plot_right + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
        let field = csv_field(name);
        for (x, y) in pts {
            let _ = writeln!(csv, "{field},{x},{y}");
        }
    }
    svg.push_str("</svg>\n");
    Ok(ChartDocument { svg, csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Chart {
        Chart::new("t", "x", "y").with_series(Series::new("a", vec![(0.0, 1.0), (1.0, 2.0)]))
    }

    #[test]
    fn one_series_one_polyline() {
        let doc = emit_chart(&sample()).unwrap();
        assert_eq!(doc.svg.matches("<polyline").count(), 1);
        assert_eq!(doc.csv, "series,x,y\na,0,1\na,1,2\n");
    }

    #[test]
    fn deterministic() {
        assert_eq!(emit_chart(&sample()).unwrap(), emit_chart(&sample()).unwrap());
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(
            emit_chart(&Chart::new("t", "x", "y")),
            Err(Error::EmptyChart)
        ));
        let only_empty = Chart::new("t", "x", "y").with_series(Series::new("a", vec![]));
        assert!(matches!(emit_chart(&only_empty), Err(Error::EmptyChart)));
    }

    #[test]
    fn drops_non_finite_and_keeps_empty_legend() {
        let chart = sample()
            .with_series(Series::new("b", vec![(f64::NAN, 1.0), (2.0, f64::INFINITY)]))
            .with_series(Series::new("c, \"q\"", vec![(0.5, 0.5)]));
        let doc = emit_chart(&chart).unwrap();
        assert_eq!(doc.svg.matches("<polyline").count(), 2);
        assert!(doc.svg.contains(">b</text>"));
        assert!(doc.svg.contains("c, &quot;q&quot;"));
        assert!(doc.csv.ends_with("\"c, \"\"q\"\"\",0.5,0.5\n"));
    }

    #[test]
    fn flat_series_gets_padded_range() {
        let chart = Chart::new("t", "x", "y").with_series(Series::new("a", vec![(1.0, 0.0), (1.0, 0.0)]));
        let doc = emit_chart(&chart).unwrap();
        assert!(!doc.svg.contains("NaN"));
    }

    #[test]
    fn ticks_cover_range() {
        let t = ticks(Range { lo: 0.0103, hi: 0.0317 });
        assert!(!t.is_empty());
        assert!(t.iter().all(|v| (0.0103..=0.0317).contains(v)));
    }
}
