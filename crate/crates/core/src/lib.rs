//! Deformation quantization on ℝ^d: polyvector fields and polydifferential
//! operators with their graded brackets, Maurer–Cartan and gauge calculus,
//! Kontsevich graphs and weights, and low-order star products.

pub mod algebra;
pub mod error;
pub mod par;

pub use error::{Error, Result};
pub mod tpoly;
pub mod dpoly;
pub mod mc;
pub mod fixtures;
pub mod graphs;
pub mod weights;
pub mod star;
pub mod hochschild;
pub mod report;
