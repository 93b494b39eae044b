//! Bar chart of the posterior distribution of the number of clusters.

use std::collections::BTreeMap;
use std::fmt::Write as _;

const W: f64 = 480.0;
const H: f64 = 320.0;
const LEFT: f64 = 56.0;
const BOTTOM: f64 = 40.0;
const TOP: f64 = 24.0;
const RIGHT: f64 = 16.0;

/// SVG histogram of relative frequencies, one bar per `K` from the smallest
/// to the largest observed value.
pub fn histogram_svg(hist: &BTreeMap<usize, usize>, title: &str) -> String {
    let total: usize = hist.values().sum();
    let (lo, hi) = match (hist.keys().next(), hist.keys().next_back()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (1, 1),
    };
    let bins = hi - lo + 1;
    let peak = hist
        .values()
        .map(|&c| c as f64 / total.max(1) as f64)
        .fold(0.0, f64::max);
    // y axis rounded up to the next tenth
    let ymax = ((peak * 10.0).ceil() / 10.0).max(0.1);
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let bw = pw / bins as f64;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="16" text-anchor="middle" font-size="13">{}</text>"#,
        W / 2.0,
        escape(title)
    )
    .unwrap();
    for k in 0..bins {
        let c = hist.get(&(lo + k)).copied().unwrap_or(0);
        let f = c as f64 / total.max(1) as f64;
        let h = ph * f / ymax;
        let x = LEFT + k as f64 * bw;
        writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue"/>"#,
            x + 0.1 * bw,
            TOP + ph - h,
            0.8 * bw,
            h
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x + bw / 2.0,
            TOP + ph + 16.0,
            lo + k
        )
        .unwrap();
    }
    let ticks = (ymax * 10.0).round() as usize;
    let step = if ticks > 5 { 2 } else { 1 };
    for t in (0..=ticks).step_by(step) {
        let v = t as f64 / 10.0;
        let y = TOP + ph - ph * v / ymax;
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 4.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"#,
            LEFT - 6.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        TOP + ph
    )
    .unwrap();
    writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        TOP + ph,
        W - RIGHT,
        TOP + ph
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">number of clusters</text>"#,
        LEFT + pw / 2.0,
        H - 6.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">frequency</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
