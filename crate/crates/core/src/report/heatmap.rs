use std::fmt::Write as _;

use super::{date_label, escape, tick_indices};
use crate::analysis::{ModeAssignment, SimilarityMatrix};

const PLOT: usize = 600;
const LEFT: usize = 120;
const TOP: usize = 40;
const BOTTOM: usize = 130;

/// Gray level for `v`: `min` maps to 255 (white) and `max` to 0 (black).
/// A flat matrix renders black.
fn gray(v: f64, min: f64, max: f64) -> u8 {
    if max <= min {
        0
    } else {
        (255.0 * (max - v) / (max - min)).round().clamp(0.0, 255.0) as u8
    }
}

/// Grayscale similarity heatmap in matrix order, darker meaning more
/// similar. With `modes`, tick marks and cluster ids are drawn above the
/// grid wherever the cluster changes.
pub fn render_heatmap(matrix: &SimilarityMatrix, modes: Option<&ModeAssignment>) -> String {
    let n = matrix.len();
    let cell = (PLOT / n.max(1)).max(1);
    let side = cell * n;
    let width = LEFT + side + 160;
    let height = TOP + side + BOTTOM;
    let (min, max) = if n == 0 { (0.0, 0.0) } else { matrix.min_max() };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    writeln!(svg, r#"<g class="cells" shape-rendering="crispEdges">"#).unwrap();
    for i in 0..n {
        for j in 0..n {
            let g = gray(matrix.get(i, j), min, max);
            writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="#{g:02x}{g:02x}{g:02x}"/>"##,
                LEFT + j * cell,
                TOP + i * cell
            )
            .unwrap();
        }
    }
    svg.push_str("</g>\n");
    writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{side}" height="{side}" fill="none" stroke="black"/>"#
    )
    .unwrap();

    svg.push_str(r#"<g class="axes" font-family="sans-serif" font-size="10">"#);
    svg.push('\n');
    for i in tick_indices(n, 12) {
        let label = escape(&date_label(matrix.times()[i]));
        let c = cell as f64 / 2.0;
        let y = TOP as f64 + i as f64 * cell as f64 + c;
        writeln!(
            svg,
            r#"<text x="{}" y="{y:.1}" text-anchor="end" dominant-baseline="middle">{label}</text>"#,
            LEFT - 4
        )
        .unwrap();
        let x = LEFT as f64 + i as f64 * cell as f64 + c;
        let yb = TOP + side + 6;
        writeln!(
            svg,
            r#"<text x="{x:.1}" y="{yb}" text-anchor="end" transform="rotate(-60 {x:.1} {yb})">{label}</text>"#
        )
        .unwrap();
    }
    svg.push_str("</g>\n");

    if let Some(modes) = modes {
        svg.push_str(r#"<g class="modes" font-family="sans-serif" font-size="10">"#);
        svg.push('\n');
        let mut previous = None;
        for (i, &t) in matrix.times().iter().enumerate() {
            let cluster = modes.cluster_of(t);
            if cluster != previous {
                let x = LEFT + i * cell;
                writeln!(
                    svg,
                    r#"<line x1="{x}" y1="{}" x2="{x}" y2="{TOP}" stroke="red"/>"#,
                    TOP - 8
                )
                .unwrap();
                if let Some(c) = cluster {
                    writeln!(svg, r#"<text x="{}" y="{}">{c}</text>"#, x + 2, TOP - 10).unwrap();
                }
                previous = cluster;
            }
        }
        svg.push_str("</g>\n");
    }

    let lx = LEFT + side + 30;
    svg.push_str(r#"<defs><linearGradient id="scale" x1="0" y1="0" x2="0" y2="1"><stop offset="0" stop-color="black"/><stop offset="1" stop-color="white"/></linearGradient></defs>"#);
    svg.push('\n');
    writeln!(
        svg,
        r#"<g class="legend" font-family="sans-serif" font-size="10"><rect x="{lx}" y="{TOP}" width="16" height="120" fill="url(#scale)" stroke="black"/><text x="{}" y="{}">{max:.4}</text><text x="{}" y="{}">{min:.4}</text><text x="{lx}" y="{}">similarity</text></g>"#,
        lx + 20,
        TOP + 8,
        lx + 20,
        TOP + 120,
        TOP - 6
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}
