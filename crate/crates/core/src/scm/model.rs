use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use super::expr::{parse_expr, Expr, ExprError, Slot};
use crate::admg::{parse_graph, Admg, GraphError};

/// Slack allowed when checking mechanism probabilities against [0, 1].
pub const BOUND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScmError {
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("syntax error at line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("{}", match .line { Some(l) => format!("{reason} at line {l}"), None => reason.clone() })]
    Semantic { line: Option<usize>, reason: String },
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("mechanism of {node} ranges over [{lo}, {hi}], outside [0, 1]")]
    OutOfBounds { node: String, lo: f64, hi: f64 },
    #[error("{0}")]
    TooLarge(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("{0}")]
    Invalid(String),
}

fn semantic(line: usize, reason: impl Into<String>) -> ScmError {
    ScmError::Semantic {
        line: Some(line),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    /// Node indices, ascending.
    pub attached: Vec<usize>,
}

/// Binary structural causal model with shared uniform latents.
#[derive(Clone, PartialEq)]
pub struct DiscreteScm {
    graph: Admg,
    latents: Vec<Latent>,
    mechanisms: Vec<Expr>,
    sources: Vec<String>,
    node_latents: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl fmt::Debug for DiscreteScm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteScm")
            .field("nodes", &self.graph.names())
            .field("latents", &self.latents)
            .field("mechanisms", &self.sources)
            .finish()
    }
}

impl DiscreteScm {
    pub fn graph(&self) -> &Admg {
        &self.graph
    }

    pub fn latents(&self) -> &[Latent] {
        &self.latents
    }

    pub fn mechanism(&self, node: usize) -> &Expr {
        &self.mechanisms[node]
    }

    /// Mechanism text as written in the model file.
    pub fn mechanism_source(&self, node: usize) -> &str {
        &self.sources[node]
    }

    /// Latents attached to `node`, ascending.
    pub fn node_latents(&self, node: usize) -> &[usize] {
        &self.node_latents[node]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// P(node = 1 | values, latents), clamped to [0, 1].
    #[inline]
    pub fn prob_one(&self, node: usize, values: &[u8], latents: &[f64]) -> f64 {
        self.mechanisms[node].eval(values, latents).clamp(0.0, 1.0)
    }

    pub(crate) fn resolve_intervention(
        &self,
        intervention: Option<(&str, u8)>,
    ) -> Result<Option<(usize, u8)>, ScmError> {
        match intervention {
            None => Ok(None),
            Some((name, v)) => {
                let i = self
                    .graph
                    .index_of(name)
                    .ok_or_else(|| ScmError::UnknownNode(name.to_string()))?;
                if v > 1 {
                    return Err(ScmError::Invalid(format!(
                        "intervention value for {name} must be 0 or 1, got {v}"
                    )));
                }
                Ok(Some((i, v)))
            }
        }
    }
}

/// Reads a model file; its `graph` directive is resolved relative to the
/// model's directory.
pub fn load_model(path: &Path) -> Result<DiscreteScm, ScmError> {
    let io = |p: &Path, e: std::io::Error| ScmError::Io {
        path: p.display().to_string(),
        reason: e.to_string(),
    };
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_model(&text, |rel| {
        let gp = base.join(rel);
        let doc = std::fs::read_to_string(&gp).map_err(|e| io(&gp, e))?;
        Ok(parse_graph(&doc)?)
    })
}

/// Parses a model document. `load_graph` receives the argument of the
/// `graph` directive.
///
/// ```text
/// graph <path>
/// latent <name> uniform <lower> <upper>
/// attach <latent> <node> [<node> ...]
/// mech <node> = <expression>
/// ```
pub fn parse_model(
    document: &str,
    load_graph: impl FnOnce(&str) -> Result<Admg, ScmError>,
) -> Result<DiscreteScm, ScmError> {
    let mut graph_ref: Option<(usize, String)> = None;
    let mut latent_decls: Vec<(usize, String, f64, f64)> = Vec::new();
    let mut attaches: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut mechs: Vec<(usize, String, String)> = Vec::new();

    for (k, raw) in document.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |reason: String| ScmError::Syntax { line, reason };
        let (kw, rest) = content
            .split_once(char::is_whitespace)
            .map(|(a, b)| (a, b.trim()))
            .unwrap_or((content, ""));
        match kw {
            "graph" => {
                if rest.is_empty() {
                    return Err(syntax("graph directive needs a path".into()));
                }
                if graph_ref.is_some() {
                    return Err(semantic(line, "duplicate graph directive"));
                }
                graph_ref = Some((line, rest.to_string()));
            }
            "latent" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [name, "uniform", lo, hi] = parts.as_slice() else {
                    return Err(syntax("expected: latent <name> uniform <lower> <upper>".into()));
                };
                let num = |s: &str| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| syntax(format!("invalid bound {s:?}")))
                };
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo >= hi {
                    return Err(semantic(line, format!("latent {name} has empty range")));
                }
                latent_decls.push((line, name.to_string(), lo, hi));
            }
            "attach" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() < 2 {
                    return Err(syntax("expected: attach <latent> <node> [<node> ...]".into()));
                }
                attaches.push((
                    line,
                    parts[0].to_string(),
                    parts[1..].iter().map(|s| s.to_string()).collect(),
                ));
            }
            "mech" => {
                let Some((node, expr)) = rest.split_once('=') else {
                    return Err(syntax("expected: mech <node> = <expression>".into()));
                };
                let node = node.trim();
                if node.is_empty() || node.contains(char::is_whitespace) {
                    return Err(syntax(format!("invalid mechanism target {node:?}")));
                }
                mechs.push((line, node.to_string(), expr.trim().to_string()));
            }
            other => return Err(syntax(format!("unknown directive {other:?}"))),
        }
    }

    let Some((_, graph_path)) = graph_ref else {
        return Err(ScmError::Semantic {
            line: None,
            reason: "missing graph directive".into(),
        });
    };
    let graph = load_graph(&graph_path)?;
    let n = graph.len();

    let mut latent_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut latents = Vec::new();
    for (line, name, lo, hi) in latent_decls {
        let valid = name.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(semantic(line, format!("invalid latent name {name:?}")));
        }
        if graph.index_of(&name).is_some() {
            return Err(semantic(line, format!("latent {name} clashes with a node name")));
        }
        if latent_index.insert(name.clone(), latents.len()).is_some() {
            return Err(semantic(line, format!("duplicate latent {name}")));
        }
        latents.push(Latent {
            name,
            lower: lo,
            upper: hi,
            attached: Vec::new(),
        });
    }

    let mut node_latents = vec![Vec::new(); n];
    for (line, lname, nodes) in attaches {
        let &k = latent_index
            .get(&lname)
            .ok_or_else(|| semantic(line, format!("unknown latent {lname}")))?;
        for node in nodes {
            let i = graph
                .index_of(&node)
                .ok_or_else(|| semantic(line, format!("unknown node {node}")))?;
            if latents[k].attached.contains(&i) {
                return Err(semantic(line, format!("{lname} attached to {node} twice")));
            }
            latents[k].attached.push(i);
            node_latents[i].push(k);
        }
    }
    for l in &mut latents {
        if l.attached.is_empty() {
            return Err(ScmError::Semantic {
                line: None,
                reason: format!("latent {} is not attached to any node", l.name),
            });
        }
        l.attached.sort_unstable();
    }
    for nl in &mut node_latents {
        nl.sort_unstable();
    }
    check_latent_pattern(&graph, &latents)?;

    let mut mechanisms: Vec<Option<(Expr, String)>> = vec![None; n];
    for (line, node, src) in mechs {
        let i = graph
            .index_of(&node)
            .ok_or_else(|| semantic(line, format!("unknown node {node}")))?;
        if mechanisms[i].is_some() {
            return Err(semantic(line, format!("duplicate mechanism for {node}")));
        }
        let lookup = |s: &str| -> Result<Slot, ExprError> {
            if let Some(p) = graph.index_of(s) {
                if graph.parents_of(i).contains(p) {
                    return Ok(Slot::Node(p));
                }
                return Err(ExprError(format!("{s} is not a parent of {node}")));
            }
            if let Some(&k) = latent_index.get(s) {
                if node_latents[i].contains(&k) {
                    return Ok(Slot::Latent(k));
                }
                return Err(ExprError(format!("latent {s} is not attached to {node}")));
            }
            Err(ExprError(format!("unknown symbol {s}")))
        };
        let expr = parse_expr(&src)
            .and_then(|e| e.resolve(&lookup))
            .map_err(|e| semantic(line, format!("mechanism of {node}: {e}")))?;
        check_bounds(&graph, &latents, i, &expr).map_err(|e| match e {
            ScmError::OutOfBounds { .. } => ScmError::Semantic {
                line: Some(line),
                reason: e.to_string(),
            },
            other => other,
        })?;
        mechanisms[i] = Some((expr, src));
    }

    let mut exprs = Vec::with_capacity(n);
    let mut sources = Vec::with_capacity(n);
    for (i, m) in mechanisms.into_iter().enumerate() {
        let (e, s) = m.ok_or_else(|| ScmError::Semantic {
            line: None,
            reason: format!("missing mechanism for {}", graph.name(i)),
        })?;
        exprs.push(e);
        sources.push(s);
    }
    let order = graph.topological_order();
    Ok(DiscreteScm {
        graph,
        latents,
        mechanisms: exprs,
        sources,
        node_latents,
        order,
    })
}

/// Two nodes share a latent iff they are joined by a bidirected edge.
fn check_latent_pattern(graph: &Admg, latents: &[Latent]) -> Result<(), ScmError> {
    let mut shared = BTreeSet::new();
    for l in latents {
        for (k, &a) in l.attached.iter().enumerate() {
            for &b in &l.attached[k + 1..] {
                shared.insert((a.min(b), a.max(b)));
            }
        }
    }
    let edges: BTreeSet<(usize, usize)> = graph.bidirected_edges().collect();
    if let Some(&(a, b)) = shared.difference(&edges).next() {
        return Err(ScmError::Semantic {
            line: None,
            reason: format!(
                "{} and {} share a latent but have no bidirected edge",
                graph.name(a),
                graph.name(b)
            ),
        });
    }
    if let Some(&(a, b)) = edges.difference(&shared).next() {
        return Err(ScmError::Semantic {
            line: None,
            reason: format!(
                "bidirected edge {} <-> {} has no shared latent",
                graph.name(a),
                graph.name(b)
            ),
        });
    }
    Ok(())
}

const MAX_BOUND_PARENTS: usize = 20;

fn check_bounds(graph: &Admg, latents: &[Latent], node: usize, expr: &Expr) -> Result<(), ScmError> {
    let parents: Vec<usize> = graph.parents_of(node).iter().collect();
    if parents.len() > MAX_BOUND_PARENTS {
        return Err(ScmError::TooLarge(format!(
            "{} has {} parents; bound checking supports at most {MAX_BOUND_PARENTS}",
            graph.name(node),
            parents.len()
        )));
    }
    let bounds: Vec<(f64, f64)> = latents.iter().map(|l| (l.lower, l.upper)).collect();
    let mut values = vec![0u8; graph.len()];
    for a in 0u32..(1 << parents.len()) {
        for (j, &p) in parents.iter().enumerate() {
            values[p] = ((a >> j) & 1) as u8;
        }
        let (lo, hi) = expr.eval_interval(&values, &bounds);
        if !(lo >= -BOUND_TOLERANCE && hi <= 1.0 + BOUND_TOLERANCE) || lo.is_nan() || hi.is_nan() {
            return Err(ScmError::OutOfBounds {
                node: graph.name(node).to_string(),
                lo,
                hi,
            });
        }
    }
    Ok(())
}
