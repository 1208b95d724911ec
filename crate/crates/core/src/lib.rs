//! Causal discovery on coupled nonlinear time series.
//!
//! Pairwise convergent cross mapping proposes an initial directed graph; partial cross
//! mapping conditioned on intermediate nodes then removes links that are only carried by
//! mediating variables.

pub mod bench;
pub mod crossmap;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod gridsearch;
pub mod io;
pub mod metrics;
pub mod mxmap;
pub mod pcm;
pub mod simgen;

pub use embedding::{Dataset, EmbedParams, Embedding, TimeSeries};
pub use error::{Error, Result};
pub use graph::{CausalGraph, GraphFormat};
pub use metrics::{evaluate, MetricsReport};
pub use mxmap::{discover, DiscoveryReport, MXMapConfig, PairGate};
pub use pcm::{multi_pcm, pcm_univariate, ConditionMapping, PCMConfig, PCMResult};
