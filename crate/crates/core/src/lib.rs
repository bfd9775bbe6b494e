//! Cantor-set construction, Cantor functions, valuated ultrametrics and
//! measure diagnostics at arbitrary precision.

pub mod cantor_function;
pub mod construction;
pub mod error;
pub mod numerics;
pub mod scale_free_de;
pub mod set_statistics;
pub mod ultrametrics;

pub use error::{Error, Result};
