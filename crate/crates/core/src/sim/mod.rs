//! Scenario configuration, the per-TTI closed loop, comparison runs,
//! weight sweeps, the warm-start study, and report/CSV emission.

mod config;
mod report;
mod runner;

pub use config::{Bandwidth, OutputConfig, ScenarioConfig};
pub use report::{
    csv_header, csv_row, format_real6, render_compare_summary, render_csv, render_simulate_summary,
    render_sweep_summary, render_warmstart_summary,
};
pub use runner::{
    compare_schedulers, generations_to_threshold, run_once, run_scenario, warmstart_study,
    weight_sweep, ComparisonRow, RunOutput, RunSummary, SimulateArtifact, Simulation, SweepRow,
    WarmstartReport, WarmstartSample, BOOTSTRAP_ROWS_PER_CLUSTER,
};
