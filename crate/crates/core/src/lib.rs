//! Signed correlation networks over SDG indicator panels and a logistic
//! classifier of synergy- versus trade-off-dominated indicators.
//!
//! Per country, every pair of cleaned indicator series is joined by an
//! edge weighted with their Spearman correlation. Each indicator gets a
//! label (positive incident weight at least as large as negative) and two
//! predictors: the share of positively weighted incident edges, and its
//! harmonic centrality in the subgraph of strong (≥ 0.8) correlations. A
//! pooled logistic regression on these predictors, fitted on a stratified
//! split of countries' indicators, classifies indicators of any country.

pub mod error;
pub mod features;
pub mod fixtures;
pub mod ingest;
pub mod model;
pub mod network;
pub mod pipeline;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
pub use features::{direct_effect, feature_table, harmonic_centrality, NodeFeatures};
pub use ingest::{
    categorize_country, clean_panel, normalize_wide, parse_long_csv, CountryPanel, IndicatorSeries,
    PerformanceCategory, RawRecord, YearWindow,
};
pub use model::{
    classify, evaluate, fit_logistic, predict_probability, stratified_split, vif, wald_inference, EvalReport,
    FittedModel, SplitPlan, PUBLISHED_BETA,
};
pub use network::{build_network, label, spearman, strengths, strong_subgraph, IndicatorNetwork, StrengthRecord, StrongGraph};
pub use pipeline::{run_pipeline, run_stage, Manifest, ModelSource, PipelineConfig, Stage};
pub use report::{country_report, distribution_export, heatmap_export, CountryReport};
