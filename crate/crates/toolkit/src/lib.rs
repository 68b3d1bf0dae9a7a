//! File formats and the command line front end for `resetproof-core`.

pub mod bundle;
pub mod cli;
pub mod dot;

pub use bundle::{Bundle, BundleError, InstanceSpec, Loaded};
