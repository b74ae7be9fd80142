//! Error metrics, correlation significance and the experiment protocols.

mod experiment;
mod metrics;
mod special;

pub use experiment::{
    ablation, cross_matrix, fraction_range, protocol_for, run_experiment, run_experiment_keyed, AblationPoint,
    CellKey, Corpus, CrossMatrix, EvalReport, ExperimentConfig, PreparedCorpus, Protocol, RunResult, Trace,
    Utterance,
};
pub use metrics::{
    pearson, per_coefficient_correlation, per_coefficient_correlation_dataset, rmse, CoeffCorrelation, Correlation,
};
pub use special::{inc_beta, ln_gamma, student_t_two_sided_p};
