pub mod acceptance;
pub mod bounds;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod quadrature;
pub mod special_fn;
pub mod sweep;

pub use error::{Error, Result};
