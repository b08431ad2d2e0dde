//! Library half of the `attrsel` binary: config file handling, pipeline
//! orchestration, and report emission. Kept as a library so integration
//! tests can drive each stage without spawning processes.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::PipelineConfig;
pub use pipeline::{run_pipeline, PipelineOutcome};
