//! Reachability, c-components and d-separation.
//!
//! d-separation is decided on the canonical DAG expansion of the mixed graph:
//! each bidirected edge `u <-> v` stands for a fresh latent `L` with `L -> u`
//! and `L -> v` that is never conditioned on. The latents are not
//! materialized; the traversal below handles them implicitly.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::admg::{Admg, GraphError, NodeId, NodeSet};
use crate::bitset::BitSet;

fn closure(graph: &Admg, seeds: &BitSet, step: impl Fn(usize) -> BitSet) -> BitSet {
    let mut seen = seeds.clone();
    let mut work: Vec<usize> = seeds.iter().collect();
    while let Some(v) = work.pop() {
        for w in step(v).iter() {
            if seen.insert(w) {
                work.push(w);
            }
        }
    }
    debug_assert_eq!(seen.capacity(), graph.len());
    seen
}

/// Every node with a directed path into some member of `seeds`, seeds included.
pub fn ancestors_of_set(graph: &Admg, seeds: &BitSet) -> BitSet {
    closure(graph, seeds, |v| graph.parents_of(v).clone())
}

/// Every node reachable by a directed path from some member of `seeds`, seeds included.
pub fn descendants_of_set(graph: &Admg, seeds: &BitSet) -> BitSet {
    closure(graph, seeds, |v| graph.children_of(v).clone())
}

pub fn ancestors(graph: &Admg, node: &str) -> Result<NodeSet, GraphError> {
    let i = graph.require(node)?;
    let bits = ancestors_of_set(graph, &BitSet::from_indices(graph.len(), [i]));
    Ok(graph.to_node_set(&bits))
}

pub fn descendants(graph: &Admg, node: &str) -> Result<NodeSet, GraphError> {
    let i = graph.require(node)?;
    let bits = descendants_of_set(graph, &BitSet::from_indices(graph.len(), [i]));
    Ok(graph.to_node_set(&bits))
}

pub(crate) fn parents_of_set(graph: &Admg, set: &BitSet) -> BitSet {
    let mut out = BitSet::new(graph.len());
    for v in set.iter() {
        out.union_with(graph.parents_of(v));
    }
    out
}

/// Tails of all directed edges whose head lies in `set`. May overlap `set`.
pub fn parents(graph: &Admg, set: &NodeSet) -> Result<NodeSet, GraphError> {
    let bits = graph.to_bitset(set)?;
    Ok(graph.to_node_set(&parents_of_set(graph, &bits)))
}

/// Partition of the nodes into confounded components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CComponentPartition {
    /// Components sorted by their least member.
    pub components: Vec<NodeSet>,
    pub index_of: BTreeMap<NodeId, usize>,
}

impl CComponentPartition {
    pub fn component_of(&self, node: &str) -> Option<&NodeSet> {
        self.index_of
            .iter()
            .find(|(id, _)| id.as_str() == node)
            .map(|(_, &i)| &self.components[i])
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Component label per node index; labels are assigned in order of least member.
pub(crate) fn component_labels(graph: &Admg) -> Vec<usize> {
    let mut label = vec![usize::MAX; graph.len()];
    let mut next = 0;
    for root in 0..graph.len() {
        if label[root] != usize::MAX {
            continue;
        }
        label[root] = next;
        let mut work = vec![root];
        while let Some(v) = work.pop() {
            for s in graph.spouses_of(v).iter() {
                if label[s] == usize::MAX {
                    label[s] = next;
                    work.push(s);
                }
            }
        }
        next += 1;
    }
    label
}

pub fn c_components(graph: &Admg) -> CComponentPartition {
    let labels = component_labels(graph);
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut components = vec![NodeSet::new(); count];
    let mut index_of = BTreeMap::new();
    for (i, &c) in labels.iter().enumerate() {
        components[c].insert(graph.name(i).clone());
        index_of.insert(graph.name(i).clone(), c);
    }
    CComponentPartition {
        components,
        index_of,
    }
}

pub(crate) fn c_component_bits(graph: &Admg, node: usize) -> BitSet {
    closure(graph, &BitSet::from_indices(graph.len(), [node]), |v| {
        graph.spouses_of(v).clone()
    })
}

pub fn c_component_of(graph: &Admg, node: &str) -> Result<NodeSet, GraphError> {
    let i = graph.require(node)?;
    Ok(graph.to_node_set(&c_component_bits(graph, i)))
}

/// Bitset form of [`d_separated`]; inputs are assumed disjoint.
pub fn d_separated_bits(graph: &Admg, a: &BitSet, b: &BitSet, given: &BitSet) -> bool {
    let n = graph.len();
    let anc_given = ancestors_of_set(graph, given);
    // visited[0] = arrived from a child (moving up), visited[1] = arrived from a parent
    let mut visited = [BitSet::new(n), BitSet::new(n)];
    let mut work: Vec<(usize, usize)> = Vec::new();
    for v in a.iter() {
        if visited[0].insert(v) {
            work.push((v, 0));
        }
    }
    let push = |visited: &mut [BitSet; 2], work: &mut Vec<(usize, usize)>, v: usize, dir: usize| {
        if visited[dir].insert(v) {
            work.push((v, dir));
        }
    };
    while let Some((v, dir)) = work.pop() {
        let observed = given.contains(v);
        if !observed && b.contains(v) {
            return false;
        }
        if dir == 0 {
            if observed {
                continue;
            }
            for p in graph.parents_of(v).iter() {
                push(&mut visited, &mut work, p, 0);
            }
            for c in graph.children_of(v).iter() {
                push(&mut visited, &mut work, c, 1);
            }
            // up into the latent parent, then down to the other child
            for s in graph.spouses_of(v).iter() {
                push(&mut visited, &mut work, s, 1);
            }
        } else {
            if !observed {
                for c in graph.children_of(v).iter() {
                    push(&mut visited, &mut work, c, 1);
                }
            }
            if anc_given.contains(v) {
                for p in graph.parents_of(v).iter() {
                    push(&mut visited, &mut work, p, 0);
                }
                for s in graph.spouses_of(v).iter() {
                    push(&mut visited, &mut work, s, 1);
                }
            }
        }
    }
    true
}

/// True iff `a` and `b` are d-separated by `given` in the DAG expansion.
pub fn d_separated(
    graph: &Admg,
    a: &NodeSet,
    b: &NodeSet,
    given: &NodeSet,
) -> Result<bool, GraphError> {
    let (ab, bb, gb) = (graph.to_bitset(a)?, graph.to_bitset(b)?, graph.to_bitset(given)?);
    for (x, y, what) in [(&ab, &bb, "a and b"), (&ab, &gb, "a and given"), (&bb, &gb, "b and given")] {
        if !x.is_disjoint(y) {
            let mut common = x.clone();
            common.intersect_with(y);
            return Err(GraphError::Overlap {
                sets: what,
                nodes: graph.to_node_set(&common).to_string(),
            });
        }
    }
    Ok(d_separated_bits(graph, &ab, &bb, &gb))
}
