//! End-to-end plumbing shared by the CLI and the acceptance suite: corpus
//! analysis, CSV/JSON artifacts and the three batch commands.

mod analysis;
mod commands;
mod config;
mod io;

pub use analysis::{analyze, analyze_stimuli, stimulus_id};
pub use commands::{
    cmd_eval, cmd_extract, cmd_synth, AblationRow, CoeffRow, EvalSummary, ExperimentSummary, ExtractOutcome,
    MatrixSummary, SynthOutcome,
};
pub use config::{parse_fractions, RunConfig};
pub use io::{atomic_write, f0_csv, fmt_sig, load_features, mfcc_csv, model_csv, read_f0_csv, read_mfcc_csv};
