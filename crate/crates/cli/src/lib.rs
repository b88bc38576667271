//! Experiment manifests, CSV and SVG artifacts, and the bundled figure
//! suite behind the `affdyn` binary.

pub mod csv;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod manifest;
pub mod svg;

pub use error::{CliError, Result};
pub use experiment::{run_experiment, run_manifest, Check, EngineRun, ExperimentResult};
pub use manifest::ExperimentManifest;
