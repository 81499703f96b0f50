//! Moving-average cluster entropy for time series.
//!
//! A series is cut into clusters at its intersections with its own trailing
//! moving average; the durations of those clusters form a distribution whose
//! self-information `S(τ, n) = −ln P(τ, n)` measures the information content
//! at each time scale. Integrating `S` gives the market heterogeneity index
//! (MIX) used to compare series and to derive allocation weights, next to a
//! classical Sharpe-ratio baseline. Fractional Brownian motion generators
//! serve as the validation oracle.
//!
//! Numerical routines are generic over [`Scalar`] (`f32`/`f64`); the aliases
//! below fix the scalar to `f64`, which the pipeline uses throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod heterogeneity;
pub mod ingest;
pub mod linalg;
pub mod partition;
pub mod pipeline;
pub mod portfolio;
pub mod preprocess;
pub mod quadrature;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PriceSeries = ingest::PriceSeries<f64>;
pub type ReturnSeries = preprocess::ReturnSeries<f64>;
pub type VolatilitySeries = preprocess::VolatilitySeries<f64>;
pub type MovingAverageSeries = partition::MovingAverageSeries<f64>;
pub type DurationDistribution = entropy::DurationDistribution<f64>;
pub type EntropyCurve = entropy::EntropyCurve<f64>;
pub type PowerLawFit = entropy::PowerLawFit<f64>;
pub type EntropyModelFit = entropy::EntropyModelFit<f64>;
pub type HMixCurve = heterogeneity::HMixCurve<f64>;
pub type MixReport = heterogeneity::MixReport<f64>;
pub type AssetPanel = portfolio::AssetPanel<f64>;
pub type PanelStats = portfolio::PanelStats<f64>;
pub type SharpeSolution = portfolio::SharpeSolution<f64>;

pub type PriceSeriesF32 = ingest::PriceSeries<f32>;
pub type DurationDistributionF32 = entropy::DurationDistribution<f32>;
pub type EntropyCurveF32 = entropy::EntropyCurve<f32>;

pub use partition::ClusterPartition;
pub use synthetic::{FbmSpec, GarchSpec};
