//! End-to-end design runs driven by a JSON configuration.

mod config;
mod run;
mod svg;

pub use config::{
    determine_w1, parse_config, parse_config_str, DesignConfig, OutputFormat, PositioningConfig,
    SectionConfig, W1Spec,
};
pub use run::{
    csv_with_speeds, node_speeds, pipeline_grid, position_contours, run_pipeline, write_artifacts,
    GlueReport, RunReport, RunResult, SectionOutcome, SectionReport, Verdict, GLUE_TOL,
    MODIFIED_CR_TOL, TOOL_VERSION,
};
pub use svg::{export_svg, render_svg};
