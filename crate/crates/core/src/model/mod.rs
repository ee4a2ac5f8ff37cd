//! Domain types shared by every other module.

mod event;
mod label;
mod series;
mod snapshot;
mod weights;

pub use event::{GroundTruthEvent, Visibility};
pub use label::{CatchmentLabel, LabelError, SiteName};
pub use series::{LabelCode, SeriesBuilder, SnapshotSeries};
pub use snapshot::{NetworkId, Snapshot};
pub use weights::WeightVector;

/// UTC epoch seconds.
pub type Timestamp = i64;

/// Renders a weight or count: plain integer text when the value is
/// integral, shortest round-trip decimal otherwise.
pub fn format_number(value: f64) -> String {
    if value.is_finite() && value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}
