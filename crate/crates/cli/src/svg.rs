//! Minimal self-contained SVG emission: line charts for value curves and a
//! colored grid for regime maps. No plotting dependency; static SVG 1.1.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str, bounds: (f64, f64, f64, f64)) {
    let (x_min, x_max, y_min, y_max) = bounds;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black" stroke-width="1"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{b}" stroke="black" stroke-width="1"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let x_val = x_min + t * (x_max - x_min);
        let y_val = y_min + t * (y_max - y_min);
        let x_pos = MARGIN + t * plot_w;
        let y_pos = HEIGHT - MARGIN - t * plot_h;
        let _ = writeln!(
            out,
            r#"<line x1="{x_pos}" y1="{b}" x2="{x_pos}" y2="{b2}" stroke="black"/><text x="{x_pos}" y="{ty}" font-size="11" text-anchor="middle">{x_val:.3}</text>"#,
            b = HEIGHT - MARGIN,
            b2 = HEIGHT - MARGIN + 4.0,
            ty = HEIGHT - MARGIN + 16.0
        );
        let _ = writeln!(
            out,
            r#"<line x1="{m2}" y1="{y_pos}" x2="{m}" y2="{y_pos}" stroke="black"/><text x="{tx}" y="{ty}" font-size="11" text-anchor="end">{y_val:.3}</text>"#,
            m = MARGIN,
            m2 = MARGIN - 4.0,
            tx = MARGIN - 7.0,
            ty = y_pos + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{x}" y="{y}" font-size="12" text-anchor="middle">{x_label}</text>"#,
        x = WIDTH / 2.0,
        y = HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{y}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {y})">{y_label}</text>"#,
        y = HEIGHT / 2.0
    );
}

/// Writes a line chart of one or more series sharing the axes.
pub fn line_chart(
    path: &std::path::Path,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> std::io::Result<()> {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
    for (x, y) in all {
        x_min = x_min.min(*x);
        x_max = x_max.max(*x);
        y_min = y_min.min(*y);
        y_max = y_max.max(*y);
    }
    if !x_min.is_finite() || x_max <= x_min {
        x_min = 0.0;
        x_max = 1.0;
    }
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * plot_h;

    let mut out = String::new();
    header(&mut out);
    axes(&mut out, x_label, y_label, (x_min, x_max, y_min, y_max));
    for (i, s) in series.iter().enumerate() {
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|(x, y)| format!("{:.3},{:.3}", sx(*x), sy(*y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            s.color,
            coords.join(" ")
        );
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{x0}" y1="{ly}" x2="{x1}" y2="{ly}" stroke="{c}" stroke-width="2"/><text x="{tx}" y="{ty}" font-size="11">{label}</text>"#,
            x0 = WIDTH - MARGIN - 140.0,
            x1 = WIDTH - MARGIN - 118.0,
            c = s.color,
            tx = WIDTH - MARGIN - 112.0,
            ty = ly + 4.0,
            label = s.label
        );
    }
    let _ = writeln!(out, "</svg>");
    std::fs::write(path, out)
}

/// Writes a colored grid: one square per `(x, y)` cell.
pub fn grid_chart(
    path: &std::path::Path,
    x_label: &str,
    y_label: &str,
    cells: &[(f64, f64, &'static str)],
    step: f64,
    legend: &[(&str, &'static str)],
) -> std::io::Result<()> {
    let x_max = cells.iter().map(|c| c.0).fold(0.0, f64::max) + step;
    let y_max = cells.iter().map(|c| c.1).fold(0.0, f64::max) + step;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + x / x_max * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - y / y_max * plot_h;
    let cell_w = step / x_max * plot_w;
    let cell_h = step / y_max * plot_h;

    let mut out = String::new();
    header(&mut out);
    for (x, y, color) in cells {
        let _ = writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
            sx(*x),
            sy(*y) - cell_h,
            cell_w,
            cell_h,
            color
        );
    }
    axes(&mut out, x_label, y_label, (0.0, x_max, 0.0, y_max));
    for (i, (label, color)) in legend.iter().enumerate() {
        let ly = MARGIN + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{y}" width="12" height="12" fill="{color}" stroke="black" stroke-width="0.5"/><text x="{tx}" y="{ty}" font-size="11">{label}</text>"#,
            x = WIDTH - MARGIN - 130.0,
            y = ly - 10.0,
            tx = WIDTH - MARGIN - 112.0,
            ty = ly
        );
    }
    let _ = writeln!(out, "</svg>");
    std::fs::write(path, out)
}
