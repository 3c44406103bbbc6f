//! Simulated randomized experiments: completely randomized and randomized
//! block designs, their effect estimators, and significance tests.

mod replicate;
mod run;
pub mod stats;

use thiserror::Error;

use crate::scm::ScmError;

pub use replicate::{
    replicate, replicate_designs, replicate_with, DesignSummary, RepRow, ReplicationTable,
};
pub use run::{run_crd, run_design, run_rbd, summarize, BlockSummary, Design, ExperimentRun, RunSummary, Unit};
pub use stats::{count_blocks, f_test_from_variances, f_test_variances, t_test_effects};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Scm(#[from] ScmError),
    #[error("an experiment needs at least 2 units, got {0}")]
    TooFewUnits(usize),
    #[error("at least 1 replication is required, got {0}")]
    TooFewReps(usize),
    #[error("{0} is not a covariate")]
    NotCovariate(String),
    #[error("one treatment arm is empty")]
    EmptyArm,
    #[error("no block contains both treatment arms")]
    NoCompleteBlock,
    #[error("{0}")]
    Stats(String),
}
