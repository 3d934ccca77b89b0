//! Graph linear canonical transforms and transform-domain Wiener filtering.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod error;
pub mod graph;
pub mod io;
pub mod lct;
pub mod optimize;
pub mod scalar;
pub mod spectral;
pub mod transforms;
pub mod wiener;

pub use error::{GlctError, Result};
pub use transforms::{Basis, Method, Variant};

pub type Graph64 = graph::Graph<f64>;
pub type GraphSignal64 = graph::GraphSignal<f64>;
pub type SignalCovariance64 = graph::SignalCovariance<f64>;
pub type LctParams64 = lct::LctParams<f64>;
pub type TransformFactory64 = transforms::TransformFactory<f64>;
pub type GlctOperator64 = transforms::GlctOperator<f64>;
pub type ObservationModel64 = wiener::ObservationModel<f64>;
pub type DiagonalFilter64 = wiener::DiagonalFilter<f64>;
pub type GridSpec64 = optimize::GridSpec<f64>;
pub type TrainConfig64 = optimize::TrainConfig<f64>;
pub type TrainState64 = optimize::TrainState<f64>;
