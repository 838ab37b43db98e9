//! Minimal SVG line plots of rate-distance curves.

use std::fmt::Write;

use crate::curve::CurvePoint;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One named polyline.
pub struct Series<'a> {
    pub name: &'a str,
    pub points: &'a [CurvePoint],
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    step * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Draws every series as a polyline over `δ ∈ [0, max δ]`, rate `∈ [0, max rate]`,
/// with ticks on both axes and a legend. Non-finite points are skipped.
pub fn render_svg(title: &str, series: &[Series<'_>]) -> String {
    let finite = |p: &&CurvePoint| p.delta.is_finite() && p.rate.is_finite();
    let all = || series.iter().flat_map(|s| s.points.iter().filter(finite));
    let x_max = all().map(|p| p.delta).fold(0.0, f64::max).max(1e-3);
    let y_max = all().map(|p| p.rate).fold(0.0, f64::max).max(1e-3);
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + pw * x / x_max;
    let sy = |y: f64| HEIGHT - MARGIN - ph * y / y_max;

    let mut o = String::new();
    writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(o, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        o,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        o,
        r#"<path d="M{:.2} {:.2} L{:.2} {:.2} L{:.2} {:.2}" fill="none" stroke="black"/>"#,
        sx(0.0),
        sy(y_max),
        sx(0.0),
        sy(0.0),
        sx(x_max),
        sy(0.0)
    )
    .unwrap();
    for (axis, max) in [('x', x_max), ('y', y_max)] {
        let step = nice_step(max);
        let mut k = 0;
        loop {
            let v = k as f64 * step;
            if v > max * (1.0 + 1e-9) {
                break;
            }
            let label = format!("{:.*}", (-step.log10().floor()).max(0.0) as usize, v);
            if axis == 'x' {
                let x = sx(v);
                let y = sy(0.0);
                writeln!(o, r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y + 5.0).unwrap();
                writeln!(o, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, y + 18.0).unwrap();
            } else {
                let x = sx(0.0);
                let y = sy(v);
                writeln!(o, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x:.2}" y2="{y:.2}" stroke="black"/>"#, x - 5.0).unwrap();
                writeln!(o, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, x - 8.0, y + 4.0).unwrap();
            }
            k += 1;
        }
    }
    writeln!(
        o,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">relative distance</text>"#,
        MARGIN + pw / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        o,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">rate</text>"#,
        MARGIN + ph / 2.0,
        MARGIN + ph / 2.0
    )
    .unwrap();
    for (i, s) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(finite)
            .map(|p| format!("{:.2},{:.2}", sx(p.delta), sy(p.rate)))
            .collect();
        writeln!(
            o,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            pts.join(" ")
        )
        .unwrap();
        let ly = MARGIN + 16.0 * i as f64;
        let lx = WIDTH - MARGIN - 120.0;
        writeln!(
            o,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 20.0
        )
        .unwrap();
        writeln!(o, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(s.name)).unwrap();
    }
    o.push_str("</svg>\n");
    o
}
