//! Pipeline driver, preset catalog and exporters for the fundamental-domain
//! construction; the `lfd` binary is a thin wrapper around this crate.

pub mod config;
pub mod export;
pub mod pipeline;
pub mod presets;

use std::path::Path;

use config::{Format, RunConfig};
use pipeline::{PipelineError, PipelineOutput};

/// Runs the pipeline and writes the requested artifacts into the output
/// directory: `domain.obj`, `report.json`, `domain.svg`, and always
/// `timings.json` (timings stay out of the deterministic report).
pub fn run_and_export(config: &RunConfig) -> Result<PipelineOutput, PipelineError> {
    let out = pipeline::run_pipeline(config)?;
    write_artifacts(config, &out)?;
    Ok(out)
}

pub fn write_artifacts(config: &RunConfig, out: &PipelineOutput) -> Result<(), PipelineError> {
    let dir: &Path = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::Io(format!("{}: {e}", dir.display())))?;
    for format in &config.formats {
        match format {
            Format::Obj => export::write_obj(&dir.join("domain.obj"), &out.mesh, &out.pairing)?,
            Format::Json => export::write_report(&dir.join("report.json"), &out.report)?,
            Format::Svg => export::write_svg(&dir.join("domain.svg"), &out.mesh)?,
        }
    }
    export::write_timings(&dir.join("timings.json"), &out.timings)
}
