//! SVG figures, text tables and flow exports.

mod heatmap;
mod stackplot;
mod tables;

pub use heatmap::render_heatmap;
pub use stackplot::render_stackplot;
pub use tables::{
    export_sankey, render_transition_table, sankey_links, snapshots_to_csv, write_snapshots,
    write_snapshots_to, SankeyLink,
};

use crate::model::Timestamp;

pub(crate) fn date_label(t: Timestamp) -> String {
    match chrono::DateTime::from_timestamp(t, 0) {
        Some(d) => d.format("%Y-%m-%d %H:%M").to_string(),
        None => t.to_string(),
    }
}

pub(crate) fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Indices `0..n` spaced so that at most `max` of them are picked, always
/// including the first and last.
pub(crate) fn tick_indices(n: usize, max: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let stride = n.div_ceil(max.max(1)).max(1);
    let mut ticks: Vec<usize> = (0..n).step_by(stride).collect();
    if *ticks.last().unwrap() != n - 1 {
        if ticks.len() >= max && ticks.len() > 1 {
            ticks.pop();
        }
        ticks.push(n - 1);
    }
    ticks
}
