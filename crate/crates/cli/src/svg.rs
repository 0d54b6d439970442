//! Minimal SVG line charts, assembled from primitives so the output is
//! byte-stable and needs no plotting dependency.
//!
//! The rate axis is logarithmic and fixed to [1e-12, 1]: points below the
//! floor are dropped, points above the ceiling (the repeaterless bound near
//! zero distance) are drawn clamped to the top edge.

use std::fmt::Write;

use mpqkd::{ScanRow, ScanTable};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const M_LEFT: f64 = 70.0;
const M_RIGHT: f64 = 160.0;
const M_TOP: f64 = 40.0;
const M_BOTTOM: f64 = 50.0;
const Y_DECADES: f64 = 12.0;
const X_TICKS: usize = 6;

pub struct Series {
    pub name: &'static str,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

/// Chart for a distance sweep: the three engine rates plus the
/// repeaterless bound, on a log rate axis.
pub fn scan_chart(table: &ScanTable) -> String {
    let pick = |f: fn(&ScanRow) -> f64| -> Vec<(f64, f64)> {
        table.rows.iter().map(|r| (r.l_km, f(r))).collect()
    };
    let series = [
        Series {
            name: "original",
            color: "#d62728",
            dashed: false,
            points: pick(|r| r.rate_original),
        },
        Series {
            name: "info",
            color: "#1f77b4",
            dashed: false,
            points: pick(|r| r.rate_info),
        },
        Series {
            name: "ad",
            color: "#2ca02c",
            dashed: false,
            points: pick(|r| r.rate_ad),
        },
        Series {
            name: "plob",
            color: "#7f7f7f",
            dashed: true,
            points: pick(|r| r.plob),
        },
    ];
    line_chart("secret key rate vs distance", "L (km)", &series)
}

pub fn line_chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, _) in &s.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
        }
    }
    if !x0.is_finite() || !x1.is_finite() {
        x0 = 0.0;
        x1 = 1.0;
    }
    if x1 - x0 < 1e-12 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let plot_w = WIDTH - M_LEFT - M_RIGHT;
    let plot_h = HEIGHT - M_TOP - M_BOTTOM;
    let x_px = |x: f64| M_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let y_px = |y: f64| {
        let ly = y.log10().min(0.0);
        M_TOP + (-ly / Y_DECADES) * plot_h
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        M_LEFT + plot_w / 2.0
    );

    // Horizontal gridlines and tick labels, one per decade.
    for k in 0..=Y_DECADES as i32 {
        let y = M_TOP + f64::from(k) / Y_DECADES * plot_h;
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd" stroke-width="1"/>"##,
            M_LEFT,
            M_LEFT + plot_w
        );
        let label = if k == 0 { "1e0".to_owned() } else { format!("1e-{k}") };
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
            M_LEFT - 6.0,
            y + 4.0
        );
    }

    // Vertical ticks.
    for i in 0..X_TICKS {
        let frac = i as f64 / (X_TICKS - 1) as f64;
        let x = M_LEFT + frac * plot_w;
        let value = x0 + frac * (x1 - x0);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#dddddd" stroke-width="1"/>"##,
            M_TOP,
            M_TOP + plot_h
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{value:.0}</text>"#,
            M_TOP + plot_h + 16.0
        );
    }

    // Axes on top of the grid.
    let _ = writeln!(
        out,
        r##"<rect x="{:.1}" y="{:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#000000" stroke-width="1"/>"##,
        M_LEFT, M_TOP
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
        M_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90, 16, {:.1})">rate (bits per round)</text>"#,
        M_TOP + plot_h / 2.0,
        M_TOP + plot_h / 2.0
    );

    for s in series {
        let kept: Vec<(f64, f64)> = s
            .points
            .iter()
            .copied()
            .filter(|&(_, y)| y >= 1e-12)
            .collect();
        if kept.is_empty() {
            continue;
        }
        let mut coords = String::new();
        for (x, y) in &kept {
            let _ = write!(coords, "{:.2},{:.2} ", x_px(*x), y_px(*y));
        }
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            coords.trim_end(),
            s.color
        );
    }

    // Legend in the right margin.
    for (i, s) in series.iter().enumerate() {
        let y = M_TOP + 14.0 + i as f64 * 18.0;
        let x = M_LEFT + plot_w + 14.0;
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            x + 24.0,
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 30.0,
            y + 4.0,
            s.name
        );
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart_for(points: Vec<(f64, f64)>) -> String {
        let series = [Series {
            name: "only",
            color: "#000000",
            dashed: false,
            points,
        }];
        line_chart("t", "x", &series)
    }

    #[test]
    fn drops_points_below_the_axis_floor() {
        let doc = chart_for(vec![(0.0, 1e-3), (10.0, 1e-13), (20.0, 0.0)]);
        // Only the first point survives, so the polyline has one coordinate pair.
        let poly = doc
            .lines()
            .find(|l| l.starts_with("<polyline"))
            .expect("series drawn");
        assert_eq!(poly.matches(',').count(), 1, "{poly}");
    }

    #[test]
    fn clamps_points_above_one_to_the_top_edge() {
        let doc = chart_for(vec![(0.0, 10.0), (10.0, 1.0)]);
        let poly = doc.lines().find(|l| l.starts_with("<polyline")).unwrap();
        // Both points sit on the top edge of the plot.
        assert!(poly.contains("40.00"), "{poly}");
    }

    #[test]
    fn empty_series_is_skipped_but_document_stays_valid() {
        let doc = chart_for(vec![(5.0, 0.0)]);
        assert!(!doc.contains("<polyline"));
        assert!(doc.ends_with("</svg>\n"));
        assert!(doc.contains("1e-12"));
    }
}
