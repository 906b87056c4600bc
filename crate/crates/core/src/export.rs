//! Flat-file renderings: CSV number formatting and a minimal SVG scatter plot.

use std::fmt::Write;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Plot options for [`svg_scatter`].
#[derive(Clone, Debug)]
pub struct ScatterStyle {
    pub width: f64,
    pub height: f64,
    pub radius: f64,
    /// Same scale on both axes (for points in the complex plane).
    pub equal_aspect: bool,
    pub x_label: String,
    pub y_label: String,
}

impl Default for ScatterStyle {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 480.0,
            radius: 2.0,
            equal_aspect: true,
            x_label: "Re z".into(),
            y_label: "Im z".into(),
        }
    }
}

const MARGIN: f64 = 48.0;

/// Static scatter plot with a frame, the coordinate axes where they fall
/// inside the view, one `<circle>` per point, and a caption.
pub fn svg_scatter(points: &[(f64, f64)], caption: &str, style: &ScatterStyle) -> String {
    let finite: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = finite.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if finite.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let span = hi - lo;
        let p = if span > 0.0 { 0.05 * span } else { 0.5 * lo.abs().max(1.0) };
        (lo - p, hi + p)
    };
    (x0, x1) = pad(x0, x1);
    (y0, y1) = pad(y0, y1);
    let (pw, ph) = (style.width - 2.0 * MARGIN, style.height - 2.0 * MARGIN);
    let (mut sx, mut sy) = (pw / (x1 - x0), ph / (y1 - y0));
    if style.equal_aspect {
        let s = sx.min(sy);
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        (sx, sy) = (s, s);
        x0 = cx - 0.5 * pw / s;
        x1 = cx + 0.5 * pw / s;
        y0 = cy - 0.5 * ph / s;
        y1 = cy + 0.5 * ph / s;
    }
    let px = |x: f64| MARGIN + (x - x0) * sx;
    let py = |y: f64| MARGIN + (y1 - y) * sy;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, style.width, style.height);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    if y0 <= 0.0 && 0.0 <= y1 {
        let _ = writeln!(
            s,
            r##"<line class="axis" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-width="0.8"/>"##,
            MARGIN,
            py(0.0),
            MARGIN + pw,
            py(0.0)
        );
    }
    if x0 <= 0.0 && 0.0 <= x1 {
        let _ = writeln!(
            s,
            r##"<line class="axis" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-width="0.8"/>"##,
            px(0.0),
            MARGIN,
            px(0.0),
            MARGIN + ph
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{} [{:.4}, {:.4}]</text>"#,
        MARGIN + 0.5 * pw,
        MARGIN + ph + 18.0,
        escape(&style.x_label),
        x0,
        x1
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 12 {:.2})">{} [{:.4}, {:.4}]</text>"#,
        MARGIN + 0.5 * ph,
        MARGIN + 0.5 * ph,
        escape(&style.y_label),
        y0,
        y1
    );
    for &(x, y) in &finite {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="{}" fill="black"/>"#, px(x), py(y), style.radius);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
        0.5 * style.width,
        0.6 * MARGIN,
        escape(caption)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// `(cx, cy)` of every `<circle>` in an SVG produced by [`svg_scatter`].
pub fn svg_circle_centers(svg: &str) -> Vec<(f64, f64)> {
    let attr = |line: &str, name: &str| -> Option<f64> {
        let key = format!("{name}=\"");
        let start = line.find(&key)? + key.len();
        let end = start + line[start..].find('"')?;
        line[start..end].parse().ok()
    };
    svg.lines()
        .filter(|l| l.starts_with("<circle"))
        .filter_map(|l| Some((attr(l, "cx")?, attr(l, "cy")?)))
        .collect()
}

/// Pixel row of the real axis, if drawn.
pub fn svg_real_axis_row(svg: &str) -> Option<f64> {
    svg.lines().find(|l| l.starts_with(r#"<line class="axis""#)).and_then(|l| {
        let key = "y1=\"";
        let start = l.find(key)? + key.len();
        let end = start + l[start..].find('"')?;
        l[start..end].parse().ok()
    })
}
