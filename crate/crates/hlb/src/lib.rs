//! IO, caching and the command-line harness around `hlb-core`.
//!
//! Everything numeric lives in `hlb-core`; this crate adds JSON/CSV file
//! formats, exact rational parsing of `p`, a parallel multi-start driver,
//! an on-disk result cache, run manifests and the `hlb` binary.

pub mod cache;
pub mod cli;
pub mod formats;
pub mod manifest;
pub mod parallel;
pub mod rational;
pub mod tables;
pub mod verify;
