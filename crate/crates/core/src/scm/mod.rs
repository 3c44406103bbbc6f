//! Discrete structural causal models over binary variables.

pub mod enumerate;
pub mod expr;
pub mod model;
pub mod sample;
pub mod variance;

pub use enumerate::{
    enumerate, enumerate_with, true_effect, true_effect_with, JointTable, DEFAULT_QUADRATURE,
};
pub use model::{load_model, parse_model, DiscreteScm, Latent, ScmError};
pub use sample::{sample, sample_with, UnitNoise};
pub use variance::{variance_decomposition, Allocation, StrataProfile, Stratum, VarianceTerms};
