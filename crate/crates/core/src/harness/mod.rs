//! Reproducible experiments: multi-trial campaigns, sensitivity sweeps,
//! worker-count timing, front comparison and the CSV files behind them.
//!
//! Trial `t` of a campaign runs with seed `derive_seed(master, t)`; trials run
//! one after another while each population is evaluated on the configured
//! worker pool. No output depends on the worker count except wall-clock time.

mod campaign;
mod compare;
mod config;
pub mod io;

pub use campaign::{
    baseline_cost, run_campaign, run_campaign_observed, sensitivity_sweep, timing_comparison,
    ArchiveObserver, Band, CampaignReport, Summary, SweepAxis, SweepRow, TimingRow,
    TrajectoryBands, TrialReport,
};
pub use compare::{compare_fronts, FrontComparison};
pub use config::{
    Algorithm, ExperimentConfig, ExperimentSection, SimulationSection, WeightsSection,
};
