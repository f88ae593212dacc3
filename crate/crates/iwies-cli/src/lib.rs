//! Experiment harness for the `iwies` optimizer: configuration files, the
//! repeated-change statistical protocol, CSV/summary emission, and the
//! scalability timing sweep. The `iwies` binary is a thin layer over this
//! library.

pub mod config;
pub mod experiment;
pub mod report;
pub mod timing;
