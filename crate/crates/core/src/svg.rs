//! Hand-written SVG output. Every number is formatted with a fixed precision so the
//! bytes depend only on the input values.

use std::fmt::Write;

use chrono::NaiveDate;

use crate::correlation::CorrelationMatrix;

const CELL: f64 = 72.0;
const LABEL_GUTTER: f64 = 120.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Dark for -1, light for +1.
fn heat_color(r: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, [f64; 3]); 3] =
        [(-1.0, [27.0, 12.0, 65.0]), (0.0, [187.0, 55.0, 84.0]), (1.0, [252.0, 255.0, 164.0])];
    let r = r.clamp(-1.0, 1.0);
    let (lo, hi) = if r <= 0.0 { (STOPS[0], STOPS[1]) } else { (STOPS[1], STOPS[2]) };
    let t = (r - lo.0) / (hi.0 - lo.0);
    let ch = |k: usize| (lo.1[k] + t * (hi.1[k] - lo.1[k])).round() as u8;
    (ch(0), ch(1), ch(2))
}

pub fn heatmap(matrix: &CorrelationMatrix) -> String {
    let k = matrix.size();
    let width = LABEL_GUTTER + CELL * k as f64 + 20.0;
    let height = LABEL_GUTTER + CELL * k as f64 + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (j, label) in matrix.labels.iter().enumerate() {
        let x = LABEL_GUTTER + CELL * (j as f64 + 0.5);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="start" transform="rotate(-45 {x:.1} {:.1})">{}</text>"#,
            LABEL_GUTTER - 8.0,
            LABEL_GUTTER - 8.0,
            escape(label)
        );
    }
    for i in 0..k {
        let y = LABEL_GUTTER + CELL * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            LABEL_GUTTER - 8.0,
            y + CELL / 2.0,
            escape(&matrix.labels[i])
        );
        for j in 0..k {
            let v = matrix.get(i, j);
            let (r, g, b) = heat_color(v);
            let x = LABEL_GUTTER + CELL * j as f64;
            let ink = if (r as u32 + g as u32 + b as u32) < 380 { "white" } else { "black" };
            let _ = writeln!(
                s,
                r##"<g data-row="{i}" data-col="{j}" data-value="{v:?}"><rect x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="#{r:02x}{g:02x}{b:02x}" stroke="white"/><text x="{:.1}" y="{:.1}" text-anchor="middle" dominant-baseline="middle" fill="{ink}">{v:.3}</text></g>"##,
                x + CELL / 2.0,
                y + CELL / 2.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Two labelled polylines over a shared date axis.
pub fn line_chart(title: &str, dates: &[NaiveDate], series: &[(&str, &[f64], &str)]) -> String {
    const W: f64 = 900.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 50.0;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;

    let all = series.iter().flat_map(|(_, v, _)| v.iter().copied()).filter(|v| v.is_finite());
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let n = series.iter().map(|(_, v, _)| v.len()).max().unwrap_or(0);
    let xs = |i: usize| LEFT + if n > 1 { pw * i as f64 / (n - 1) as f64 } else { pw / 2.0 };
    let ys = |v: f64| TOP + ph * (1.0 - (v - lo) / (hi - lo));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0}" height="{H:.0}" viewBox="0 0 {W:.0} {H:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ =
        writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="16">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT:.1}" y="{TOP:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#444"/>"##
    );
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let y = ys(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{y:.1}" text-anchor="end" dominant-baseline="middle">{v:.4}</text>"##,
            LEFT + pw,
            LEFT - 6.0
        );
    }
    if let (Some(first), Some(last)) = (dates.first(), dates.last()) {
        let _ = writeln!(s, r#"<text x="{LEFT:.1}" y="{:.1}" text-anchor="start">{first}</text>"#, H - BOTTOM + 20.0);
        let _ =
            writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{last}</text>"#, LEFT + pw, H - BOTTOM + 20.0);
    }
    for (k, (label, values, color)) in series.iter().enumerate() {
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, v)| format!("{:.2},{:.2}", xs(i), ys(*v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline data-series="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(label),
            points.join(" ")
        );
        let ly = TOP + 16.0 * k as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{ly:.1}" dominant-baseline="middle">{}</text>"#,
            LEFT + 10.0,
            LEFT + 30.0,
            LEFT + 36.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_ramp_gets_lighter() {
        let lum = |r: f64| {
            let (a, b, c) = heat_color(r);
            a as u32 + b as u32 + c as u32
        };
        assert!(lum(-1.0) < lum(0.0) && lum(0.0) < lum(1.0));
    }

    #[test]
    fn labels_are_escaped() {
        let m = CorrelationMatrix { labels: vec!["a<b".into(), "c&d".into()], values: vec![1.0, 0.5, 0.5, 1.0] };
        let svg = heatmap(&m);
        assert!(svg.contains("a&lt;b") && svg.contains("c&amp;d"));
    }
}
