//! Exact coefficient arithmetic: rationals, multi-indices, polynomials, ℏ-series.

mod multi_index;
mod poly;
mod rational;
mod series;

pub use multi_index::MultiIndex;
pub use poly::Poly;
pub use rational::{ParseRationalError, Rational};
pub use series::{HSeries, SeriesCoeff, DEFAULT_ORDER};
