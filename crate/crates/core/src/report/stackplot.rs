use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{date_label, escape, tick_indices};
use crate::model::{format_number, CatchmentLabel};
use crate::quantify::AggregateVector;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 110.0;
const LEGEND: f64 = 160.0;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#bcbd22",
    "#17becf", "#aec7e8", "#ffbb78", "#98df8a",
];

fn reserved_color(label: &CatchmentLabel) -> &'static str {
    match label {
        CatchmentLabel::Error => "#555555",
        CatchmentLabel::Other => "#999999",
        _ => "#dddddd",
    }
}

/// Stacking order: sites in `site_order` (then any remaining sites by
/// descending mean count), followed by error, other and unknown. Labels
/// that are zero everywhere are dropped.
fn stack_order(
    series: &[AggregateVector],
    site_order: Option<&[CatchmentLabel]>,
) -> Vec<CatchmentLabel> {
    let present: BTreeSet<&CatchmentLabel> = series
        .iter()
        .flat_map(|a| a.counts.iter())
        .filter(|&(_, &v)| v > 0.0)
        .map(|(l, _)| l)
        .collect();
    let mean = |l: &CatchmentLabel| series.iter().map(|a| a.get(l)).sum::<f64>();
    let mut order: Vec<CatchmentLabel> = Vec::new();
    if let Some(given) = site_order {
        for l in given {
            if l.is_site() && present.contains(l) && !order.contains(l) {
                order.push(l.clone());
            }
        }
    }
    let mut rest: Vec<&CatchmentLabel> = present
        .iter()
        .copied()
        .filter(|l| l.is_site() && !order.contains(l))
        .collect();
    rest.sort_by(|a, b| mean(b).total_cmp(&mean(a)).then_with(|| a.cmp(b)));
    order.extend(rest.into_iter().cloned());
    for reserved in [
        CatchmentLabel::Error,
        CatchmentLabel::Other,
        CatchmentLabel::Unknown,
    ] {
        if present.contains(&reserved) {
            order.push(reserved);
        }
    }
    order
}

/// Stacked area chart of catchment sizes over time, one `<polygon>` per
/// label carrying a `data-label` attribute.
pub fn render_stackplot(
    series: &[AggregateVector],
    site_order: Option<&[CatchmentLabel]>,
) -> String {
    let mut series: Vec<&AggregateVector> = series.iter().collect();
    series.sort_by_key(|a| a.time);
    let owned: Vec<AggregateVector> = series.iter().map(|a| (*a).clone()).collect();
    let order = stack_order(&owned, site_order);

    let width = LEFT + WIDTH + LEGEND;
    let height = TOP + HEIGHT + BOTTOM;
    let peak = owned.iter().map(AggregateVector::total).fold(0.0, f64::max);
    let (t0, t1) = match (owned.first(), owned.last()) {
        (Some(a), Some(b)) => (a.time, b.time),
        _ => (0, 0),
    };
    let x = |t: i64| {
        if t1 == t0 {
            LEFT
        } else {
            LEFT + WIDTH * (t - t0) as f64 / (t1 - t0) as f64
        }
    };
    let y = |v: f64| {
        if peak > 0.0 {
            TOP + HEIGHT * (1.0 - v / peak)
        } else {
            TOP + HEIGHT
        }
    };
    // A single time still spans the full width.
    let xs: Vec<(f64, usize)> = if owned.len() == 1 {
        vec![(LEFT, 0), (LEFT + WIDTH, 0)]
    } else {
        owned
            .iter()
            .enumerate()
            .map(|(i, a)| (x(a.time), i))
            .collect()
    };

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

    let mut below = vec![0.0; owned.len()];
    let mut site_index = 0;
    svg.push_str("<g class=\"bands\">\n");
    for label in &order {
        let color = if label.is_site() {
            let c = PALETTE[site_index % PALETTE.len()];
            site_index += 1;
            c
        } else {
            reserved_color(label)
        };
        let above: Vec<f64> = owned
            .iter()
            .zip(&below)
            .map(|(a, b)| b + a.get(label))
            .collect();
        let mut points = Vec::with_capacity(xs.len() * 2);
        for &(px, i) in &xs {
            points.push(format!("{px:.2},{:.2}", y(above[i])));
        }
        for &(px, i) in xs.iter().rev() {
            points.push(format!("{px:.2},{:.2}", y(below[i])));
        }
        writeln!(
            svg,
            r#"<polygon data-label="{}" fill="{color}" points="{}"/>"#,
            escape(label.as_str()),
            points.join(" ")
        )
        .unwrap();
        below = above;
    }
    svg.push_str("</g>\n");

    svg.push_str(r#"<g class="axes" font-family="sans-serif" font-size="10">"#);
    svg.push('\n');
    writeln!(
        svg,
        r#"<path d="M{LEFT} {TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + HEIGHT,
        LEFT + WIDTH
    )
    .unwrap();
    for (v, text) in [(0.0, "0".to_string()), (peak, format_number(peak))] {
        writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{text}</text>"#,
            LEFT - 4.0,
            y(v)
        )
        .unwrap();
    }
    for i in tick_indices(owned.len(), 8) {
        let px = if owned.len() == 1 {
            LEFT
        } else {
            x(owned[i].time)
        };
        let py = TOP + HEIGHT + 6.0;
        writeln!(
            svg,
            r#"<text x="{px:.2}" y="{py}" text-anchor="end" transform="rotate(-60 {px:.2} {py})">{}</text>"#,
            escape(&date_label(owned[i].time))
        )
        .unwrap();
    }
    svg.push_str("</g>\n");

    svg.push_str(r#"<g class="legend" font-family="sans-serif" font-size="10">"#);
    svg.push('\n');
    let lx = LEFT + WIDTH + 16.0;
    // Legend lists the top band first.
    let mut site_index = order.iter().filter(|l| l.is_site()).count();
    for (k, label) in order.iter().rev().enumerate() {
        let color = if label.is_site() {
            site_index -= 1;
            PALETTE[site_index % PALETTE.len()]
        } else {
            reserved_color(label)
        };
        let ly = TOP + 14.0 * k as f64;
        writeln!(
            svg,
            r#"<rect x="{lx}" y="{ly}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            lx + 14.0,
            ly + 9.0,
            escape(label.as_str())
        )
        .unwrap();
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}
