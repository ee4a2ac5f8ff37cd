//! Pairwise similarity, routing-mode discovery and change detection.

mod changes;
mod hac;
mod similarity;

pub use changes::{
    boundary_scores, consecutive_similarity, detect_changes, detect_changes_in_matrix, ChangeEvent,
    ChangeParams,
};
pub use hac::{
    adaptive_threshold, dendrogram, hac_cluster, hac_cluster_with, mode_phi_range, select_modes,
    Dendrogram, Linkage, Merge, ModeAssignment, SweepParams, MERGE_TOLERANCE,
};
pub use similarity::{similarity, similarity_matrix, SimilarityMatrix};
