//! Support library for the `shoal` binary: config files, CSV artifacts,
//! and run manifests. The binary itself only does argument plumbing.

pub mod config;
pub mod manifest;
pub mod output;
