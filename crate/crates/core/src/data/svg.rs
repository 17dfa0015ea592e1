//! Static plot of an effect curve: one marker and one vertical CI whisker
//! per grid point, a dashed reference line, axes with a few ticks.

use std::fmt::Write;

use crate::curve::{EffectCurve, Scale};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Step from {1, 2, 5} x 10^k giving roughly `target` intervals.
fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|i| i as f64 * step).collect()
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn fmt_tick(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

pub fn render_svg(curve: &EffectCurve) -> String {
    // relative curves are drawn in percent
    let k = if curve.scale == Scale::Relative { 100.0 } else { 1.0 };
    let (x_lo, x_hi) = if curve.points.is_empty() {
        curve.valid_range
    } else {
        let xs = curve.points.iter().map(|p| p.x);
        (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max))
    };
    let (x_lo, x_hi) = padded(x_lo, x_hi);

    let mut y_lo = 0.0f64;
    let mut y_hi = 0.0f64;
    for p in &curve.points {
        y_lo = y_lo.min(p.ci_low * k).min(p.estimate * k);
        y_hi = y_hi.max(p.ci_high * k).max(p.estimate * k);
    }
    if let Some(r) = curve.reference {
        y_lo = y_lo.min(r * k);
        y_hi = y_hi.max(r * k);
    }
    let (y_lo, y_hi) = padded(y_lo, y_hi);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let title = format!(
        "{} ({}), {} - {:.0}% CI",
        curve.kind.as_str().to_uppercase(),
        curve.scale,
        curve.provenance.trial_id,
        (1.0 - curve.alpha) * 100.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&title)
    );

    // axes
    let (bx, by) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black"><line x1="{bx}" y1="{by}" x2="{}" y2="{by}"/><line x1="{bx}" y1="{TOP}" x2="{bx}" y2="{by}"/></g>"#,
        LEFT + plot_w
    );
    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{x:.2}" y1="{by}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            by + 5.0,
            by + 18.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{}" y1="{y:.2}" x2="{bx}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            bx - 5.0,
            bx - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">Control-group outcome</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{y}" text-anchor="middle" transform="rotate(-90 18 {y})">{}</text>"#,
        escape(&curve.y_label()),
        y = TOP + plot_h / 2.0
    );

    if y_lo < 0.0 && y_hi > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(
            s,
            r##"<line class="zero" x1="{bx}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#bbbbbb"/>"##,
            LEFT + plot_w
        );
    }
    if let Some(r) = curve.reference {
        let y = sy(r * k);
        let _ = writeln!(
            s,
            r##"<line class="reference" x1="{bx}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#555555" stroke-dasharray="6 4"/>"##,
            LEFT + plot_w
        );
    }

    for p in &curve.points {
        let x = sx(p.x);
        let _ = writeln!(
            s,
            r#"<line class="whisker" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            sy(p.ci_low * k),
            sy(p.ci_high * k)
        );
        let _ = writeln!(
            s,
            r##"<circle class="estimate" cx="{x:.2}" cy="{:.2}" r="3.5" fill="#d62728"/>"##,
            sy(p.estimate * k)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps() {
        assert_eq!(nice_step(10.0, 5), 2.0);
        assert_eq!(nice_step(0.9, 5), 0.2);
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn escaping() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
