//! Command-line layer: scenario files, sweeps, figure presets and density
//! design, all writing CSV with a provenance header.

pub mod config;
pub mod design;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod sweep;
