//! Robust coresets for the geometric median and `(k, z)`-clustering with outliers.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod coreset1d;
pub mod coreset_nd;
pub mod cost;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod instances;
pub mod numeric;
pub mod solver;

pub use error::{CoresetError, Result};
pub use geometry::{CenterSet, Dataset, Point, Power, WeightedSet};
