//! Experiment campaigns, fits, configuration and CSV output.

mod config;
mod csv;
mod experiments;
mod fit;

pub use crate::noise::ExperimentRow;
pub use config::{
    Config, ExperimentSection, PulseSection, RatioRow, ReportMode, DEFAULT_DETUNINGS, DEFAULT_EPSILONS,
    DEFAULT_RATIO_ROWS,
};
pub use csv::{
    column, detuning_csv, fmt_g, numeric_csv, parse_numeric_csv, plot_stub, ratio_csv, ratio_line, scaling_csv,
    scaling_line, RATIO_HEADER, SCALING_HEADER,
};
pub use experiments::{
    classical_baseline, dd_check, learning_comparison, ratio_experiment, scaling_experiment, CostSummary, DdReport,
    LearningSummary, RatioOutput, ScalingOutput, WindowCheck,
};
pub use fit::{fit_linear, fit_power_law, fit_power_law_weighted, LinearFit, PowerLawFit};
