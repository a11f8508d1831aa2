//! Corpus generation, convergence experiments and reports.

mod corpus;
mod experiment;
mod report;

pub use corpus::{discrete_corpus, generate_corpus, pwl_corpus, Corpus, CorpusKind, DiscreteParams, PwlParams};
pub use experiment::{
    discrete_perturbation, run_discrete_experiment, run_discrete_experiment_with, run_fractional_experiment,
    run_fractional_experiment_with, default_bump, DiscreteConfig, FractionalConfig,
};
pub use report::{emit_report, significant, Check, ExperimentReport, Metadata, Metric, ReportFormat, ReportKind, ReportRow};
