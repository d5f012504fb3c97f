//! Financial time-series forecasting toolkit: OHLCV ingestion and rolling
//! normalization, natural-visibility graphs, a graph-augmented recurrent
//! forecaster with reverse-mode autodiff, accuracy metrics, and the paired
//! and multi-algorithm significance tests used to compare forecasters.

pub mod metrics;
pub mod series;
pub mod statcompare;
pub mod tgmodel;
pub mod visgraph;
