//! Batch driver for L-invariant computations: configuration, fixtures,
//! pipeline wiring and JSON reports.

pub mod config;
pub mod fixture;
pub mod pipeline;
pub mod report;
