//! The three Poisson benchmarks, their tables and plots, and the
//! interpolation and norm studies behind the command-line tool.

pub mod config;
pub mod output;
pub mod problems;
pub mod runner;
pub mod studies;

pub use config::Config;
pub use output::{emit_plot, read_csv, table_csv, table_json, write_csv, Heatmap};
pub use problems::{h1_relative_error, make_problem, JetOracle, Problem, ProblemId};
pub use runner::{
    lstar_agreement, run_experiment, run_seed, ExperimentOutput, LossKind, ResultRow, RunSpec,
    SeedRun, BENCHMARK_GAMMA, EVAL_POINTS,
};
pub use studies::{
    convergence_study, norm_equivalence_study, projector_error, ConvergenceResult,
    EquivalenceBand, StudyNorm, TestFunction,
};
