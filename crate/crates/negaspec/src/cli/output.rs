//! Minimal self-contained SVG scatter/line renderer. No plotting
//! dependency; output is a pure function of the input data.

use crate::Result;
use std::fmt::Write as _;
use std::path::Path;

pub struct SvgSeries {
    pub label: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
    pub line: bool,
}

impl SvgSeries {
    pub fn points(label: &str, color: &str, points: Vec<(f64, f64)>) -> Self {
        SvgSeries {
            label: label.into(),
            color: color.into(),
            points,
            line: false,
        }
    }

    pub fn line(label: &str, color: &str, points: Vec<(f64, f64)>) -> Self {
        SvgSeries {
            label: label.into(),
            color: color.into(),
            points,
            line: true,
        }
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 50.0;

pub fn write_svg_scatter(path: &Path, title: &str, series: &[SvgSeries]) -> Result<()> {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if xmax - xmin < 1e-12 {
        xmax = xmin + 1.0;
    }
    if ymax - ymin < 1e-12 {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - xmin) / (xmax - xmin) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - ymin) / (ymax - ymin) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="monospace" font-size="14">{title}</text>"#,
        MARGIN
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{m:.1}" y1="{b:.1}" x2="{r:.1}" y2="{b:.1}" stroke="black"/>"#,
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{m:.1}" y1="{t:.1}" x2="{m:.1}" y2="{b:.1}" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN
    );
    for (v, x_axis) in [(xmin, true), (xmax, true), (ymin, false), (ymax, false)] {
        if x_axis {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="11" text-anchor="middle">{v:.4}</text>"#,
                sx(v),
                H - MARGIN + 16.0
            );
        } else {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="11" text-anchor="end">{v:.4}</text>"#,
                MARGIN - 6.0,
                sy(v) + 4.0
            );
        }
    }
    // zero axes when inside the frame
    if ymin < 0.0 && ymax > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{m:.1}" y1="{y:.1}" x2="{r:.1}" y2="{y:.1}" stroke="#cccccc" stroke-dasharray="4 3"/>"##,
            m = MARGIN,
            r = W - MARGIN,
            y = sy(0.0)
        );
    }
    for (si, s) in series.iter().enumerate() {
        if s.line {
            let mut d = String::new();
            for (pi, &(x, y)) in s.points.iter().enumerate() {
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                let _ = write!(
                    d,
                    "{}{:.2},{:.2} ",
                    if pi == 0 { "M" } else { "L" },
                    sx(x),
                    sy(y)
                );
            }
            let _ = writeln!(
                svg,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                d.trim_end(),
                s.color
            );
        } else {
            for &(x, y) in &s.points {
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.6" fill="{}" fill-opacity="0.75"/>"#,
                    sx(x),
                    sy(y),
                    s.color
                );
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="12" fill="{}">{}</text>"#,
            W - MARGIN - 150.0,
            MARGIN + 16.0 * si as f64,
            s.color,
            s.label
        );
    }
    let _ = writeln!(svg, "</svg>");
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, svg)?;
    Ok(())
}
