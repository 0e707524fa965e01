//! Genetic-algorithm feature selection feeding a stacked-generalization
//! classifier, plus the data handling, base learners, metrics and
//! experiment pipeline around it.
//!
//! Numeric code is generic over [`Float`]; the aliases below fix the scalar
//! to `f64` (the default used by the CLI) or `f32`.

// Negated float comparisons in this crate also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod genetic;
pub mod learners;
pub mod matrix;
pub mod metrics;
pub mod num;
pub mod persist;
pub mod pipeline;
pub mod rng;
pub mod stacking;
pub mod synthetic;

pub use error::{Error, Result};
pub use num::Float;

pub type Matrix = matrix::Matrix<f64>;
pub type Dataset = dataset::Dataset<f64>;
pub type TrainedModel = learners::TrainedModel<f64>;

pub type Matrix32 = matrix::Matrix<f32>;
pub type Dataset32 = dataset::Dataset<f32>;
pub type TrainedModel32 = learners::TrainedModel<f32>;
pub type StackModel = stacking::StackModel<f64>;
pub type StackModel32 = stacking::StackModel<f32>;
