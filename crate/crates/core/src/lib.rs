//! Measurement toolkit for collaborative-tagging communities.
//!
//! A community is a set of timestamped `(user, tag, item)` assignments. From
//! it this crate derives:
//!
//! - per-user activity rank distributions and Hoerl-curve fits ([`activity`]),
//! - interest-sharing graphs under Jaccard and containment similarity, with
//!   component statistics across threshold sweeps ([`graph`], [`components`]),
//! - item-popularity entropy, neighborhood entropy and random baselines
//!   ([`entropy`]),
//! - a temporal replay measuring how well neighbors predict a user's next
//!   items ([`predict`]).
//!
//! [`ingest`] reads and cleans TSV traces; [`urn`] simulates Pólya urns and
//! generates synthetic traces. The `examples/` directory has one runnable
//! program per capability, and the `folksonomy` binary wraps everything as
//! subcommands.

pub mod activity;
pub mod cli;
pub mod components;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod predict;
pub mod threshold;
pub mod urn;

pub use activity::{
    correlation_r2, eval_hoerl, fit_hoerl, fit_hoerl_points, rank_distribution, ActivityMetric, FitReport, HoerlParams,
    RankDistribution,
};
pub use components::{component_summary, threshold_sweep, ComponentSummary, SweepRow};
pub use entropy::{
    average_neighborhood_entropy, entropy, entropy_timeline, item_popularity, neighborhood_entropy, EntropyPoint,
    NeighborhoodEntropyReport, NeighborhoodMode, PopularityDistribution, PopularityMode,
};
pub use error::{Error, Result};
pub use graph::{build_graph, similarity, InterestGraph, SimilarityKind};
pub use ingest::{clean, parse_trace, read_community, CleaningConfig, CleaningReport, ParseMode, RawRecord};
pub use model::{build_community, Community, ItemId, Labels, SummaryStats, TagAssignment, TagId, UserId};
pub use predict::{hit_ratio, HitRatioReport};
pub use threshold::Threshold;
pub use urn::{generate_trace, urn_converged_fraction, urn_run, SyntheticTraceConfig, UrnState, UrnTrajectory};
