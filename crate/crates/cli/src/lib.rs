//! Front end for the `skewprod` binary: reports, raster output and the
//! verification suites.

pub mod analyze;
pub mod config;
pub mod grid;
pub mod render;
pub mod suites;

pub use config::RunConfig;
