//! Experiment harness around `glct-core`: configuration, dataset ingestion,
//! the synthetic and real-data denoising suites, and the strategy benchmark.

pub mod bench;
pub mod config;
pub mod data;
pub mod reference;
pub mod report;
pub mod suite;
