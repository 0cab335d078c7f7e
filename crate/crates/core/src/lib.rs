pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod growth;
pub mod quadrature;
pub mod roof;
pub mod verify;

pub use error::{NqdError, Result};
pub use geometry::{catalog, Domain, C64};
