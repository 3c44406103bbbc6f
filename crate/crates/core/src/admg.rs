//! Acyclic directed mixed graphs with a designated treatment and response.
//!
//! Latent confounders are represented only through bidirected edges (the
//! latent projection); there are no explicit latent nodes in the data model.
//! Nodes are stored in lexicographic byte order of their names, so node
//! indices, set iteration and serialized output all share one ordering.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bitset::BitSet;

/// Hard cap on graph size.
pub const MAX_NODES: usize = 4096;

/// A node name: non-empty, ASCII letters, digits and underscore.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: &str) -> Result<NodeId, GraphError> {
        if is_valid_name(name) {
            Ok(NodeId(name.to_string()))
        } else {
            Err(GraphError::InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// Ordered set of node names (lexicographic byte order).
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeSet(BTreeSet<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet::default()
    }

    /// Builds a set from names, validating each one.
    pub fn from_names<I, S>(names: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        names
            .into_iter()
            .map(|n| NodeId::new(n.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()
            .map(NodeSet)
    }

    /// Parses a comma-separated list such as `"A,B,C"`; the empty (or
    /// all-blank) string is the empty set.
    pub fn parse_list(list: &str) -> Result<Self, GraphError> {
        if list.trim().is_empty() {
            return Ok(NodeSet::new());
        }
        NodeSet::from_names(list.split(',').map(str::trim))
    }

    pub fn insert(&mut self, id: NodeId) -> bool {
        self.0.insert(id)
    }

    pub fn remove(&mut self, name: &str) -> bool {
        let before = self.0.len();
        self.0.retain(|n| n.as_str() != name);
        self.0.len() != before
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|n| n.as_str() == name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeId> {
        self.0.iter()
    }

    pub fn names(&self) -> Vec<&str> {
        self.0.iter().map(NodeId::as_str).collect()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(","))
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a NodeId;
    type IntoIter = std::collections::btree_set::Iter<'a, NodeId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A single violated graph invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InvalidName(String),
    DuplicateNode(String),
    UnknownEndpoint { edge: String, node: String },
    SelfLoop(String),
    DuplicateEdge(String),
    DirectedCycle(Vec<String>),
    MissingTreatment,
    MissingResponse,
    UnknownTreatment(String),
    UnknownResponse(String),
    TreatmentEqualsResponse,
    TooManyNodes(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidName(n) => write!(f, "invalid node name {n:?}"),
            Violation::DuplicateNode(n) => write!(f, "duplicate node {n}"),
            Violation::UnknownEndpoint { edge, node } => {
                write!(f, "unknown node {node} in edge {edge}")
            }
            Violation::SelfLoop(n) => write!(f, "self-loop at {n}"),
            Violation::DuplicateEdge(e) => write!(f, "duplicate edge {e}"),
            Violation::DirectedCycle(nodes) => write!(f, "directed cycle: {}", nodes.join(",")),
            Violation::MissingTreatment => f.write_str("missing treatment"),
            Violation::MissingResponse => f.write_str("missing response"),
            Violation::UnknownTreatment(n) => write!(f, "unknown treatment node {n}"),
            Violation::UnknownResponse(n) => write!(f, "unknown response node {n}"),
            Violation::TreatmentEqualsResponse => f.write_str("treatment equals response"),
            Violation::TooManyNodes(n) => {
                write!(f, "graph has {n} nodes, more than the limit of {MAX_NODES}")
            }
        }
    }
}

/// Result of [`validate`]: either ok, or every violation found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationVerdict {
    pub violations: Vec<Violation>,
}

impl ValidationVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("syntax error at line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("{reason} at line {line}")]
    Semantic { line: usize, reason: String },
    #[error("{0}")]
    MissingDirective(&'static str),
    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("invalid node name {0:?}")]
    InvalidName(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("{sets} overlap in {nodes}")]
    Overlap { sets: &'static str, nodes: String },
}

/// Unvalidated graph description, as read from a document or assembled in code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawGraph {
    pub nodes: Vec<String>,
    pub directed: Vec<(String, String)>,
    pub bidirected: Vec<(String, String)>,
    pub treatment: Option<String>,
    pub response: Option<String>,
}

/// Checks every [`Admg`] invariant and reports all violations.
pub fn validate(raw: &RawGraph) -> ValidationVerdict {
    let mut violations = Vec::new();
    let mut known: HashMap<&str, usize> = HashMap::new();
    for name in &raw.nodes {
        if !is_valid_name(name) {
            violations.push(Violation::InvalidName(name.clone()));
        }
        let next = known.len();
        if known.contains_key(name.as_str()) {
            violations.push(Violation::DuplicateNode(name.clone()));
        } else {
            known.insert(name.as_str(), next);
        }
    }
    if known.len() > MAX_NODES {
        violations.push(Violation::TooManyNodes(known.len()));
    }

    let mut seen_directed = BTreeSet::new();
    for (a, b) in &raw.directed {
        let label = format!("{a} -> {b}");
        check_edge(&known, a, b, &label, &mut violations);
        if !seen_directed.insert((a.as_str(), b.as_str())) {
            violations.push(Violation::DuplicateEdge(label));
        }
    }
    let mut seen_bidirected = BTreeSet::new();
    for (a, b) in &raw.bidirected {
        let label = format!("{a} <-> {b}");
        check_edge(&known, a, b, &label, &mut violations);
        let key = if a <= b { (a.as_str(), b.as_str()) } else { (b.as_str(), a.as_str()) };
        if !seen_bidirected.insert(key) {
            violations.push(Violation::DuplicateEdge(label));
        }
    }

    match &raw.treatment {
        None => violations.push(Violation::MissingTreatment),
        Some(t) if !known.contains_key(t.as_str()) => {
            violations.push(Violation::UnknownTreatment(t.clone()))
        }
        _ => {}
    }
    match &raw.response {
        None => violations.push(Violation::MissingResponse),
        Some(r) if !known.contains_key(r.as_str()) => {
            violations.push(Violation::UnknownResponse(r.clone()))
        }
        _ => {}
    }
    if raw.treatment.is_some() && raw.treatment == raw.response {
        violations.push(Violation::TreatmentEqualsResponse);
    }

    if let Some(cycle) = find_directed_cycle(&known, &raw.directed) {
        violations.push(Violation::DirectedCycle(cycle));
    }
    ValidationVerdict { violations }
}

fn check_edge(
    known: &HashMap<&str, usize>,
    a: &str,
    b: &str,
    label: &str,
    out: &mut Vec<Violation>,
) {
    for end in [a, b] {
        if !known.contains_key(end) {
            out.push(Violation::UnknownEndpoint {
                edge: label.to_string(),
                node: end.to_string(),
            });
        }
    }
    if a == b {
        out.push(Violation::SelfLoop(a.to_string()));
    }
}

/// Returns the members of one directed cycle (sorted), if any.
fn find_directed_cycle(
    known: &HashMap<&str, usize>,
    directed: &[(String, String)],
) -> Option<Vec<String>> {
    let n = known.len();
    let mut names = vec![""; n];
    for (name, &i) in known {
        names[i] = name;
    }
    let mut succ = vec![Vec::new(); n];
    for (a, b) in directed {
        if let (Some(&i), Some(&j)) = (known.get(a.as_str()), known.get(b.as_str())) {
            if i == j {
                continue;
            }
            succ[i].push(j);
        }
    }
    // iterative DFS with colors: 0 = new, 1 = on stack, 2 = done
    let mut color = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    1 => {
                        let mut cycle = vec![names[w].to_string()];
                        let mut u = v;
                        while u != w {
                            cycle.push(names[u].to_string());
                            u = parent[u];
                        }
                        cycle.sort();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// A validated acyclic directed mixed graph. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct Admg {
    names: Vec<NodeId>,
    index: HashMap<String, usize>,
    parents: Vec<BitSet>,
    children: Vec<BitSet>,
    spouses: Vec<BitSet>,
    treatment: usize,
    response: usize,
}

impl fmt::Debug for Admg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_graph(self))
    }
}

impl Admg {
    /// Validates and builds a graph.
    pub fn from_raw(raw: &RawGraph) -> Result<Admg, GraphError> {
        let verdict = validate(raw);
        if !verdict.is_ok() {
            return Err(GraphError::Invalid(verdict.violations));
        }
        let mut sorted: Vec<&String> = raw.nodes.iter().collect();
        sorted.sort();
        let names: Vec<NodeId> = sorted.iter().map(|s| NodeId((*s).clone())).collect();
        let index: HashMap<String, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.0.clone(), i))
            .collect();
        let n = names.len();
        let mut parents = vec![BitSet::new(n); n];
        let mut children = vec![BitSet::new(n); n];
        let mut spouses = vec![BitSet::new(n); n];
        for (a, b) in &raw.directed {
            let (i, j) = (index[a], index[b]);
            children[i].insert(j);
            parents[j].insert(i);
        }
        for (a, b) in &raw.bidirected {
            let (i, j) = (index[a], index[b]);
            spouses[i].insert(j);
            spouses[j].insert(i);
        }
        let treatment = index[raw.treatment.as_ref().expect("validated")];
        let response = index[raw.response.as_ref().expect("validated")];
        Ok(Admg {
            names,
            index,
            parents,
            children,
            spouses,
            treatment,
            response,
        })
    }

    /// Convenience constructor from string slices.
    pub fn new(
        nodes: &[&str],
        directed: &[(&str, &str)],
        bidirected: &[(&str, &str)],
        treatment: &str,
        response: &str,
    ) -> Result<Admg, GraphError> {
        let own = |v: &[(&str, &str)]| {
            v.iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect::<Vec<_>>()
        };
        Admg::from_raw(&RawGraph {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            directed: own(directed),
            bidirected: own(bidirected),
            treatment: Some(treatment.to_string()),
            response: Some(response.to_string()),
        })
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            nodes: self.names.iter().map(|n| n.0.clone()).collect(),
            directed: self
                .directed_edges()
                .map(|(a, b)| (self.names[a].0.clone(), self.names[b].0.clone()))
                .collect(),
            bidirected: self
                .bidirected_edges()
                .map(|(a, b)| (self.names[a].0.clone(), self.names[b].0.clone()))
                .collect(),
            treatment: Some(self.names[self.treatment].0.clone()),
            response: Some(self.names[self.response].0.clone()),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[NodeId] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &NodeId {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize, GraphError> {
        self.index_of(name)
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn treatment(&self) -> usize {
        self.treatment
    }

    pub fn response(&self) -> usize {
        self.response
    }

    pub fn treatment_id(&self) -> &NodeId {
        &self.names[self.treatment]
    }

    pub fn response_id(&self) -> &NodeId {
        &self.names[self.response]
    }

    pub fn node_set(&self) -> NodeSet {
        self.names.iter().cloned().collect()
    }

    /// Observed covariates: every node except treatment and response.
    pub fn covariates(&self) -> NodeSet {
        self.names
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.treatment && i != self.response)
            .map(|(_, n)| n.clone())
            .collect()
    }

    pub fn parents_of(&self, i: usize) -> &BitSet {
        &self.parents[i]
    }

    pub fn children_of(&self, i: usize) -> &BitSet {
        &self.children[i]
    }

    pub fn spouses_of(&self, i: usize) -> &BitSet {
        &self.spouses[i]
    }

    pub fn has_directed_edge(&self, tail: &str, head: &str) -> bool {
        match (self.index_of(tail), self.index_of(head)) {
            (Some(a), Some(b)) => self.children[a].contains(b),
            _ => false,
        }
    }

    pub fn has_bidirected_edge(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self.spouses[a].contains(b),
            _ => false,
        }
    }

    /// Directed edges `(tail, head)` in canonical order.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |a| self.children[a].iter().map(move |b| (a, b)))
    }

    /// Bidirected edges `(a, b)` with `a < b`, in canonical order.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |a| {
            self.spouses[a]
                .iter()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    pub fn directed_edge_count(&self) -> usize {
        self.children.iter().map(BitSet::count).sum()
    }

    pub fn bidirected_edge_count(&self) -> usize {
        self.spouses.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Kahn topological order; ties broken by node index.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(BitSet::count).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for c in self.children[v].iter() {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "validated graphs are acyclic");
        order
    }

    pub fn to_node_set(&self, bits: &BitSet) -> NodeSet {
        bits.iter().map(|i| self.names[i].clone()).collect()
    }

    pub fn to_bitset(&self, set: &NodeSet) -> Result<BitSet, GraphError> {
        let mut bits = BitSet::new(self.len());
        for id in set {
            bits.insert(self.require(id.as_str())?);
        }
        Ok(bits)
    }

    /// Copy with every edge carrying an arrowhead into `node` removed: directed
    /// edges `* -> node` and bidirected edges `node <-> *`.
    pub fn without_arrowheads_into(&self, node: usize) -> Admg {
        let mut g = self.clone();
        for p in self.parents[node].iter() {
            g.children[p].remove(node);
        }
        g.parents[node] = BitSet::new(self.len());
        for s in self.spouses[node].iter() {
            g.spouses[s].remove(node);
        }
        g.spouses[node] = BitSet::new(self.len());
        g
    }

    /// Subgraph induced by `keep`; edges with a removed endpoint are dropped.
    /// Treatment and response must be kept.
    pub fn induced_subgraph(&self, keep: &BitSet) -> Admg {
        assert!(keep.contains(self.treatment) && keep.contains(self.response));
        let old: Vec<usize> = keep.iter().collect();
        let mut new_of = vec![usize::MAX; self.len()];
        for (new, &o) in old.iter().enumerate() {
            new_of[o] = new;
        }
        let n = old.len();
        let remap = |bits: &BitSet| {
            BitSet::from_indices(n, bits.iter().filter(|&i| keep.contains(i)).map(|i| new_of[i]))
        };
        let names: Vec<NodeId> = old.iter().map(|&o| self.names[o].clone()).collect();
        Admg {
            index: names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.0.clone(), i))
                .collect(),
            names,
            parents: old.iter().map(|&o| remap(&self.parents[o])).collect(),
            children: old.iter().map(|&o| remap(&self.children[o])).collect(),
            spouses: old.iter().map(|&o| remap(&self.spouses[o])).collect(),
            treatment: new_of[self.treatment],
            response: new_of[self.response],
        }
    }
}

/// Parses a graph document.
///
/// ```text
/// node <NodeId>
/// edge <NodeId> -> <NodeId>
/// bidirected <NodeId> <-> <NodeId>
/// treatment <NodeId>
/// response <NodeId>
/// ```
///
/// `#` starts a comment; blank lines are ignored. Nodes must be declared
/// before they appear in an edge.
pub fn parse_graph(document: &str) -> Result<Admg, GraphError> {
    let mut raw = RawGraph::default();
    let mut declared: HashMap<String, usize> = HashMap::new();
    let mut directed_seen = BTreeSet::new();
    let mut bidirected_seen = BTreeSet::new();

    for (lineno, line) in document.lines().enumerate() {
        let line_no = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let syntax = |reason: String| GraphError::Syntax {
            line: line_no,
            reason,
        };
        let semantic = |reason: String| GraphError::Semantic {
            line: line_no,
            reason,
        };
        let name = |tok: &str| -> Result<String, GraphError> {
            if is_valid_name(tok) {
                Ok(tok.to_string())
            } else {
                Err(syntax(format!("invalid node name {tok:?}")))
            }
        };
        match tokens.as_slice() {
            ["node", id] => {
                let id = name(id)?;
                if declared.contains_key(&id) {
                    return Err(semantic(format!("duplicate node {id}")));
                }
                declared.insert(id.clone(), raw.nodes.len());
                raw.nodes.push(id);
            }
            ["edge", a, "->", b] | ["bidirected", a, "<->", b] => {
                let (a, b) = (name(a)?, name(b)?);
                if a == b {
                    return Err(semantic("self-loop".to_string()));
                }
                for end in [&a, &b] {
                    if !declared.contains_key(end) {
                        return Err(semantic(format!("unknown node {end}")));
                    }
                }
                if tokens[0] == "edge" {
                    if !directed_seen.insert((a.clone(), b.clone())) {
                        return Err(semantic(format!("duplicate edge {a} -> {b}")));
                    }
                    raw.directed.push((a, b));
                } else {
                    let key = if a < b { (a, b) } else { (b, a) };
                    if !bidirected_seen.insert(key.clone()) {
                        return Err(semantic(format!(
                            "duplicate edge {} <-> {}",
                            key.0, key.1
                        )));
                    }
                    raw.bidirected.push(key);
                }
            }
            [kw @ ("treatment" | "response"), id] => {
                let id = name(id)?;
                if !declared.contains_key(&id) {
                    return Err(semantic(format!("unknown node {id}")));
                }
                let slot = if *kw == "treatment" {
                    &mut raw.treatment
                } else {
                    &mut raw.response
                };
                if slot.is_some() {
                    return Err(semantic(format!("duplicate {kw} directive")));
                }
                *slot = Some(id);
            }
            [kw, ..] => {
                return Err(match *kw {
                    "node" | "edge" | "bidirected" | "treatment" | "response" => {
                        syntax(format!("malformed {kw} directive"))
                    }
                    other => syntax(format!("unknown directive {other:?}")),
                })
            }
            [] => unreachable!(),
        }
    }
    if raw.treatment.is_none() {
        return Err(GraphError::MissingDirective("missing treatment directive"));
    }
    if raw.response.is_none() {
        return Err(GraphError::MissingDirective("missing response directive"));
    }
    Admg::from_raw(&raw)
}

/// Canonical document: sorted nodes, sorted directed edges, sorted
/// bidirected edges (`a <-> b` with `a < b`), then treatment and response.
pub fn serialize_graph(graph: &Admg) -> String {
    let mut out = String::new();
    for n in &graph.names {
        out.push_str(&format!("node {n}\n"));
    }
    for (a, b) in graph.directed_edges() {
        out.push_str(&format!("edge {} -> {}\n", graph.names[a], graph.names[b]));
    }
    for (a, b) in graph.bidirected_edges() {
        out.push_str(&format!(
            "bidirected {} <-> {}\n",
            graph.names[a], graph.names[b]
        ));
    }
    out.push_str(&format!("treatment {}\n", graph.treatment_id()));
    out.push_str(&format!("response {}\n", graph.response_id()));
    out
}
