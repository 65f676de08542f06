//! Automated data integration: schema matching, value normalization, entity
//! matching, clustering and data fusion, with every configuration artifact
//! produced by a pluggable oracle.

pub mod blocking;
pub mod clustering;
pub mod config;
pub mod datamodel;
pub mod fusion;
pub mod matching;
pub mod metrics;
pub mod normalization;
pub mod oracle;
pub mod pipeline;
pub mod schema_matching;
pub mod similarity;
pub mod synth;
