//! Stable causal blocking: graph reductions, the blocking set itself, and
//! the verifiers (separation, stability, minimality).

use serde_json::{json, Value};
use thiserror::Error;

use crate::admg::{Admg, GraphError, NodeSet};
use crate::bitset::BitSet;
use crate::graph::{
    ancestors_of_set, c_component_bits, d_separated_bits, descendants_of_set, parents_of_set,
};
use crate::par::{self, Execution};

/// Largest reduced graph accepted by [`verify_minimality`].
pub const MINIMALITY_NODE_LIMIT: usize = 20;
/// Above this many nodes the report's verification flags are not computed.
pub const VERIFY_NODE_LIMIT: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockingError {
    #[error("reduced graph has {nodes} nodes; exhaustive search is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("{0} is not a covariate of the graph")]
    NotCovariate(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The three successive reductions of the input graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    /// Input graph without arrowheads into the treatment.
    pub g_xtilde: Admg,
    /// `g_xtilde` without covariates that have no directed path to the response.
    pub g_prime_xtilde: Admg,
    /// `g_prime_xtilde` restricted to ancestors of the response (treatment kept).
    pub g_xtilde_anc: Admg,
    pub removed_no_path: NodeSet,
    pub removed_non_ancestors: NodeSet,
}

pub fn reduce(graph: &Admg) -> ReductionTrace {
    let n = graph.len();
    let (x, y) = (graph.treatment(), graph.response());
    let g_xtilde = graph.without_arrowheads_into(x);

    let mut keep = ancestors_of_set(graph, &BitSet::from_indices(n, [y]));
    keep.insert(x);
    let mut dropped = BitSet::full(n);
    dropped.difference_with(&keep);
    let removed_no_path = graph.to_node_set(&dropped);
    let g_prime_xtilde = g_xtilde.induced_subgraph(&keep);

    let m = g_prime_xtilde.len();
    let mut keep = ancestors_of_set(
        &g_prime_xtilde,
        &BitSet::from_indices(m, [g_prime_xtilde.response()]),
    );
    keep.insert(g_prime_xtilde.treatment());
    let mut dropped = BitSet::full(m);
    dropped.difference_with(&keep);
    let removed_non_ancestors = g_prime_xtilde.to_node_set(&dropped);
    let g_xtilde_anc = g_prime_xtilde.induced_subgraph(&keep);

    ReductionTrace {
        g_xtilde,
        g_prime_xtilde,
        g_xtilde_anc,
        removed_no_path,
        removed_non_ancestors,
    }
}

fn post_treatment_bits(g: &Admg) -> BitSet {
    let n = g.len();
    let (x, y) = (g.treatment(), g.response());
    let mut m = descendants_of_set(g, &BitSet::from_indices(n, [x]));
    m.intersect_with(&ancestors_of_set(g, &BitSet::from_indices(n, [y])));
    m.remove(x);
    m.remove(y);
    m
}

/// Covariates that are descendants of the treatment and ancestors of the
/// response in the fully reduced graph.
pub fn post_treatment_ancestors(trace: &ReductionTrace) -> NodeSet {
    let g = &trace.g_xtilde_anc;
    g.to_node_set(&post_treatment_bits(g))
}

/// Ancestors of the response other than treatment and response.
fn candidate_bits(g: &Admg) -> BitSet {
    let n = g.len();
    let mut c = ancestors_of_set(g, &BitSet::from_indices(n, [g.response()]));
    c.remove(g.treatment());
    c.remove(g.response());
    c
}

/// Does conditioning on `z` (plus the treatment) separate the response from
/// every other candidate covariate in `g`?
fn separates(g: &Admg, candidates: &BitSet, z: &BitSet) -> bool {
    let n = g.len();
    let mut rest = candidates.clone();
    rest.difference_with(z);
    if rest.is_empty() {
        return true;
    }
    let mut given = z.clone();
    given.insert(g.treatment());
    given.remove(g.response());
    d_separated_bits(g, &BitSet::from_indices(n, [g.response()]), &rest, &given)
}

/// Output of [`stable_causal_blocking`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingReport {
    pub treatment: String,
    pub response: String,
    pub z_star: NodeSet,
    /// The response's c-component and its parents, minus treatment and response.
    pub pre_stability_set: NodeSet,
    pub post_treatment_set: NodeSet,
    pub c_component_of_y: NodeSet,
    /// Parents of the c-component of the response (may contain the treatment).
    pub c_component_parents: NodeSet,
    pub trace: ReductionTrace,
    /// `None` when the graph is too large to verify.
    pub verified_d_separation: Option<bool>,
    pub verified_stable: Option<bool>,
    pub notes: Vec<String>,
}

fn flag(v: Option<bool>) -> Value {
    match v {
        Some(b) => Value::Bool(b),
        None => Value::String("unverified: size".into()),
    }
}

impl BlockingReport {
    /// JSON document with sorted keys and name-sorted arrays.
    pub fn to_json(&self) -> Value {
        json!({
            "treatment": self.treatment,
            "response": self.response,
            "z_star": self.z_star,
            "pre_stability_set": self.pre_stability_set,
            "post_treatment_set": self.post_treatment_set,
            "c_component_of_y": self.c_component_of_y,
            "c_component_parents": self.c_component_parents,
            "removed_no_path": self.trace.removed_no_path,
            "removed_non_ancestors": self.trace.removed_non_ancestors,
            "verified_d_separation": flag(self.verified_d_separation),
            "verified_stable": flag(self.verified_stable),
            "notes": self.notes,
        })
    }
}

pub fn stable_causal_blocking(graph: &Admg) -> BlockingReport {
    let trace = reduce(graph);
    let g = &trace.g_xtilde_anc;
    let n = g.len();
    let (x, y) = (g.treatment(), g.response());

    let c_y = c_component_bits(g, y);
    let pa = parents_of_set(g, &c_y);
    let mut pre = c_y.clone();
    pre.union_with(&pa);
    pre.remove(x);
    pre.remove(y);
    let m = post_treatment_bits(g);
    let mut z = pre.clone();
    z.difference_with(&m);

    let (verified_d_separation, verified_stable) = if graph.len() <= VERIFY_NODE_LIMIT {
        (
            Some(separates(g, &candidate_bits(g), &pre)),
            Some(z.is_disjoint(&m) && !z.contains(x) && !z.contains(y)),
        )
    } else {
        (None, None)
    };

    let mut notes = Vec::new();
    if !descendants_of_set(g, &BitSet::from_indices(n, [x])).contains(y) {
        notes.push(format!(
            "{} is not an ancestor of {}; the treatment has no causal path to the response",
            g.treatment_id(),
            g.response_id()
        ));
    }

    BlockingReport {
        treatment: g.treatment_id().to_string(),
        response: g.response_id().to_string(),
        z_star: g.to_node_set(&z),
        pre_stability_set: g.to_node_set(&pre),
        post_treatment_set: g.to_node_set(&m),
        c_component_of_y: g.to_node_set(&c_y),
        c_component_parents: g.to_node_set(&pa),
        verified_d_separation,
        verified_stable,
        notes,
        trace,
    }
}

/// Verdicts for a user-chosen blocking set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetVerdict {
    pub d_separation: bool,
    pub stable: bool,
}

/// Checks an arbitrary covariate set: it is stable when disjoint from the
/// post-treatment ancestors, and separating when, together with those
/// post-treatment ancestors, it separates the response from the remaining
/// candidate covariates of the reduced graph.
pub fn verify_blocking_set(
    graph: &Admg,
    report: &BlockingReport,
    z: &NodeSet,
) -> Result<SetVerdict, BlockingError> {
    let covariates = graph.covariates();
    for id in z {
        if !covariates.contains(id.as_str()) {
            return Err(BlockingError::NotCovariate(id.to_string()));
        }
    }
    let g = &report.trace.g_xtilde_anc;
    let m = post_treatment_bits(g);
    let mut bits = BitSet::new(g.len());
    for id in z {
        if let Some(i) = g.index_of(id.as_str()) {
            bits.insert(i);
        }
    }
    let stable = bits.is_disjoint(&m);
    bits.union_with(&m);
    Ok(SetVerdict {
        d_separation: separates(g, &candidate_bits(g), &bits),
        stable,
    })
}

/// Outcome of the exhaustive minimality search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Minimality {
    Minimal,
    /// The lexicographically first separating set of the smallest cardinality found.
    SmallerSet(NodeSet),
    /// The pre-stability set does not separate at all.
    NotSeparating,
}

pub fn verify_minimality(report: &BlockingReport) -> Result<Minimality, BlockingError> {
    verify_minimality_with(report, Execution::default())
}

pub fn verify_minimality_with(
    report: &BlockingReport,
    exec: Execution,
) -> Result<Minimality, BlockingError> {
    let g = &report.trace.g_xtilde_anc;
    if g.len() > MINIMALITY_NODE_LIMIT {
        return Err(BlockingError::TooLarge {
            nodes: g.len(),
            limit: MINIMALITY_NODE_LIMIT,
        });
    }
    let candidates = candidate_bits(g);
    let pre = g.to_bitset(&report.pre_stability_set)?;
    if !separates(g, &candidates, &pre) {
        return Ok(Minimality::NotSeparating);
    }
    let pool: Vec<usize> = candidates.iter().collect();
    for k in 0..pre.count() {
        let subsets = combinations(&pool, k, g.len());
        if let Some(i) = par::first_match(exec, subsets.len(), |i| {
            separates(g, &candidates, &subsets[i])
        }) {
            return Ok(Minimality::SmallerSet(g.to_node_set(&subsets[i])));
        }
    }
    Ok(Minimality::Minimal)
}

/// All `k`-subsets of `pool` in lexicographic order of their sorted members.
fn combinations(pool: &[usize], k: usize, capacity: usize) -> Vec<BitSet> {
    let mut out = Vec::new();
    if k > pool.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(BitSet::from_indices(capacity, idx.iter().map(|&i| pool[i])));
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + pool.len() - k) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic() {
        let subsets = combinations(&[0, 1, 2, 3], 2, 4);
        let lists: Vec<Vec<usize>> = subsets.iter().map(|s| s.iter().collect()).collect();
        assert_eq!(
            lists,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(&[0, 1], 0, 2).len(), 1);
        assert!(combinations(&[0], 2, 2).is_empty());
    }

    #[test]
    fn xy_only_is_trivial() {
        let g = Admg::new(&["X", "Y"], &[("X", "Y")], &[], "X", "Y").unwrap();
        let r = stable_causal_blocking(&g);
        assert!(r.z_star.is_empty());
        assert_eq!(r.trace.g_xtilde_anc, g);
        assert_eq!(verify_minimality(&r).unwrap(), Minimality::Minimal);
        assert_eq!(r.verified_d_separation, Some(true));
    }

    #[test]
    fn irrelevant_treatment_is_noted() {
        let g = Admg::new(&["X", "Y", "A"], &[("A", "Y")], &[], "X", "Y").unwrap();
        let r = stable_causal_blocking(&g);
        assert_eq!(r.z_star, NodeSet::from_names(["A"]).unwrap());
        assert_eq!(r.notes.len(), 1);
    }

    #[test]
    fn markovian_blocking_is_parents_of_response() {
        let g = Admg::new(
            &["X", "Y", "A", "B", "C"],
            &[("X", "Y"), ("A", "Y"), ("B", "A"), ("C", "X")],
            &[],
            "X",
            "Y",
        )
        .unwrap();
        let r = stable_causal_blocking(&g);
        assert_eq!(r.z_star, NodeSet::from_names(["A"]).unwrap());
        assert_eq!(r.trace.removed_non_ancestors, NodeSet::from_names(["C"]).unwrap());
    }
}
