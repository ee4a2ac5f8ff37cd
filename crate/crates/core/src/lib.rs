//! Routing-vector analysis for catchment measurements.
//!
//! A *snapshot* maps every observed network to the catchment (anycast site,
//! upstream provider, front-end) it reached at one instant. This crate turns
//! series of snapshots into weighted similarity matrices, groups recurring
//! routing modes with agglomerative clustering, flags routing-change events,
//! scores them against operator logs, and renders the operator-facing
//! figures and tables.
//!
//! Module map:
//!
//! * [`model`] shared domain types ([`CatchmentLabel`], [`Snapshot`],
//!   [`WeightVector`], the dense [`SnapshotSeries`]).
//! * [`ingest`] file parsers, NSID rules, traceroute hop extraction and
//!   EDNS client-subnet lookups.
//! * [`prep`] cleaning and weight construction.
//! * [`analysis`] similarity, clustering and change detection.
//! * [`quantify`] aggregates, transition matrices and latency summaries.
//! * [`eval`] ground-truth grouping, confusion scoring, synthetic scenarios.
//! * [`report`] SVG figures, text tables, Sankey flows, canonical writers.

pub mod analysis;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod model;
pub mod prep;
pub mod quantify;
pub mod report;

pub use error::{Error, Result};
pub use model::{
    CatchmentLabel, GroundTruthEvent, LabelError, NetworkId, SiteName, Snapshot, SnapshotSeries,
    Timestamp, Visibility, WeightVector,
};
