//! Finite spectral triples with a vertical/horizontal split of the Dirac operator.
//!
//! The crate builds matrix models (tori, crossed products, products, circle-bundle
//! blocks, point collapses), rescales the vertical part of the Dirac operator,
//! and measures spectra, Connes distances and the quantitative collapse bounds.

pub mod builders;
pub mod cli_io;
pub mod collapse;
pub mod estimates;
pub mod error;
pub mod matrix;
pub mod operator;
pub mod qmetric;
pub mod triple;

pub use error::{Error, Result};
