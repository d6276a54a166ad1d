//! Experiment configs, the brute-force oracle, rate experiments and output.

mod cli;
mod config;
mod experiment;
mod oracle;
mod output;

pub use cli::cli_main;
pub use config::{
    AutoTag, BallSpec, DeltaGrid, ExperimentConfig, GridSpec, LevelProfile, NormSpec, ProblemConfig, RhoChoice,
    RuleConfig, Spike, TruthSpec, CONFIG_VERSION,
};
pub use experiment::{
    auto_rho, derive_seeds, generate_truth, log_log_fit, run_rate_experiment, RateReport, RateRow, RowStatus,
    MIN_FIT_ROWS, PLATEAU_RATIO,
};
pub use oracle::{
    oracle_minimize, prox_test_corpus, run_prox_test, ProxInstance, ProxTestReport, CORPUS_EXPONENTS, ORACLE_MAX_COORDS,
};
pub use output::{gnuplot_script, write_json, write_plot_csv, write_rows, write_trace};
