//! Minimal SVG renderings: heatmaps for phase diagrams and line plots for
//! traces and series.
//!
//! Heatmap colours are normalized to the data range of the diagram; the
//! bounds are recorded in the `<metadata>` element.

use std::fmt::Write as _;

use crate::sweep::PhaseDiagram;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 110.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;
const MISSING: &str = "#bdbdbd";

// viridis control points
const STOPS: [(f64, [u8; 3]); 5] = [
    (0.0, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.5, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.0, [253, 231, 37]),
];

const LINE_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn colour(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let k = STOPS
        .iter()
        .rposition(|(s, _)| *s <= t)
        .unwrap_or(0)
        .min(STOPS.len() - 2);
    let (t0, c0) = STOPS[k];
    let (t1, c1) = STOPS[k + 1];
    let f = (t - t0) / (t1 - t0);
    let mix = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(c0[0], c1[0]),
        mix(c0[1], c1[1]),
        mix(c0[2], c1[2])
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, metadata: &[(&str, String)]) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    out.push_str("<metadata>\n");
    for (k, v) in metadata {
        let _ = writeln!(out, "{}: {}", escape(k), escape(v));
    }
    out.push_str("</metadata>\n");
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str, xr: (f64, f64), yr: (f64, f64)) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = x0 + f * (x1 - x0);
        let py = y0 - f * (y0 - y1);
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#,
            y0 + 16.0,
            xr.0 + f * (xr.1 - xr.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            x0 - 6.0,
            py + 4.0,
            yr.0 + f * (yr.1 - yr.0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

/// Data range of the finite values, widened when degenerate.
fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

/// Cell edges centred on the grid values.
fn edges(vals: &[f64]) -> Vec<f64> {
    if vals.len() == 1 {
        return vec![vals[0] - 0.5, vals[0] + 0.5];
    }
    let mut e = Vec::with_capacity(vals.len() + 1);
    e.push(vals[0] - (vals[1] - vals[0]) / 2.0);
    for w in vals.windows(2) {
        e.push((w[0] + w[1]) / 2.0);
    }
    let n = vals.len();
    e.push(vals[n - 1] + (vals[n - 1] - vals[n - 2]) / 2.0);
    e
}

pub fn heatmap(diagram: &PhaseDiagram, title: &str, metadata: &[(&str, String)]) -> String {
    let (vmin, vmax) = bounds(diagram.values.iter().flatten().copied());
    let mut meta: Vec<(&str, String)> = metadata.to_vec();
    meta.push(("scale_min", vmin.to_string()));
    meta.push(("scale_max", vmax.to_string()));
    meta.push(("missing_cells", diagram.missing_cells().to_string()));
    let mut out = String::new();
    header(&mut out, &meta);

    let xe = edges(&diagram.x_values);
    let ye = edges(&diagram.y_values);
    let xr = (xe[0], *xe.last().unwrap());
    let yr = (ye[0], *ye.last().unwrap());
    let (px0, px1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (py0, py1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let sx = |x: f64| px0 + (x - xr.0) / (xr.1 - xr.0) * (px1 - px0);
    let sy = |y: f64| py0 - (y - yr.0) / (yr.1 - yr.0) * (py0 - py1);

    for iy in 0..diagram.y_values.len() {
        for ix in 0..diagram.x_values.len() {
            let fill = match diagram.value(ix, iy) {
                Some(v) if v.is_finite() => colour((v - vmin) / (vmax - vmin)),
                _ => MISSING.to_string(),
            };
            let (xa, xb) = (sx(xe[ix]), sx(xe[ix + 1]));
            let (ya, yb) = (sy(ye[iy + 1]), sy(ye[iy]));
            let _ = writeln!(
                out,
                r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                xb - xa + 0.3,
                yb - ya + 0.3
            );
        }
    }
    axes(
        &mut out,
        diagram.x_param.name(),
        diagram.y_param.name(),
        xr,
        yr,
    );

    // colour bar
    let bx = WIDTH - MARGIN_R + 20.0;
    let steps = 50;
    let h = (py0 - py1) / steps as f64;
    for k in 0..steps {
        let t = (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            py0 - (k + 1) as f64 * h,
            h + 0.3,
            colour(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{:.1}">{vmax:.3}</text>"#,
        bx + 22.0,
        py1 + 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{:.1}">{vmin:.3}</text>"#,
        bx + 22.0,
        py0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="18" text-anchor="middle">{}</text>"#,
        (px0 + px1) / 2.0,
        escape(title)
    );
    out.push_str("</svg>\n");
    out
}

/// A named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub fn line_plot(
    series: &[Series],
    x_label: &str,
    y_label: &str,
    title: &str,
    metadata: &[(&str, String)],
) -> String {
    let xr = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yr = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let mut out = String::new();
    header(&mut out, metadata);
    let (px0, px1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (py0, py1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let sx = |x: f64| px0 + (x - xr.0) / (xr.1 - xr.0) * (px1 - px0);
    let sy = |y: f64| py0 - (y - yr.0) / (yr.1 - yr.0) * (py0 - py1);
    for (k, s) in series.iter().enumerate() {
        let c = LINE_COLORS[k % LINE_COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{c}" stroke-width="1.2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = py1 + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{c}" stroke-width="2"/>"#,
            px1 + 8.0,
            px1 + 24.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            px1 + 28.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    axes(&mut out, x_label, y_label, xr, yr);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="18" text-anchor="middle">{}</text>"#,
        (px0 + px1) / 2.0,
        escape(title)
    );
    out.push_str("</svg>\n");
    out
}
