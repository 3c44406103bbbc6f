//! Variance-minimizing stable blocking sets for randomized experiments over
//! semi-Markovian causal graphs, plus a discrete structural-causal-model
//! simulator for comparing completely randomized and randomized block designs.

pub mod admg;
pub mod bitset;
pub mod blocking;
pub mod experiment;
pub mod graph;
pub mod par;
pub mod rng;
pub mod scm;

pub use admg::{parse_graph, serialize_graph, validate, Admg, GraphError, NodeId, NodeSet, RawGraph};
pub use blocking::{
    post_treatment_ancestors, reduce, stable_causal_blocking, verify_blocking_set,
    verify_minimality, BlockingReport, Minimality, ReductionTrace,
};
pub use graph::{ancestors, c_component_of, c_components, d_separated, descendants, parents};
