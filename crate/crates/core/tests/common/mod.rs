#![allow(dead_code)]

use std::path::PathBuf;

use causal_blocking::{parse_graph, Admg, NodeSet};
use proptest::prelude::*;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load(name: &str) -> Admg {
    let path = corpus_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_graph(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn set(names: &[&str]) -> NodeSet {
    NodeSet::from_names(names).unwrap()
}

/// Every valid graph file in the corpus.
pub const CORPUS_GRAPHS: &[&str] = &[
    "fig3.graph",
    "fig4.graph",
    "fig5a.graph",
    "fig5b.graph",
    "fig6a.graph",
    "fig6b.graph",
    "fig7a.graph",
    "fig7b.graph",
    "fig12.graph",
    "fig13.graph",
    "fig14.graph",
    "xy_only.graph",
    "drug_bp.graph",
    "drug_bp_as_written.graph",
    "three_covariate.graph",
];

/// Explicit DAG expansion: observed nodes keep their indices, each
/// bidirected edge adds one latent parent of both endpoints.
pub struct Expansion {
    pub n_observed: usize,
    pub children: Vec<Vec<usize>>,
    pub parents: Vec<Vec<usize>>,
}

impl Expansion {
    pub fn new(g: &Admg) -> Self {
        let n = g.len();
        let mut edges: Vec<(usize, usize)> = g.directed_edges().collect();
        let mut total = n;
        for (a, b) in g.bidirected_edges() {
            edges.push((total, a));
            edges.push((total, b));
            total += 1;
        }
        let mut children = vec![Vec::new(); total];
        let mut parents = vec![Vec::new(); total];
        for (t, h) in edges {
            children[t].push(h);
            parents[h].push(t);
        }
        Expansion {
            n_observed: n,
            children,
            parents,
        }
    }

    fn descendants(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.children.len()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &c in &self.children[u] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// All simple paths from `a` to `b` in the skeleton.
    pub fn paths(&self, a: usize, b: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = vec![a];
        let mut on_path = vec![false; self.children.len()];
        on_path[a] = true;
        self.extend(b, &mut path, &mut on_path, &mut out);
        out
    }

    fn extend(&self, b: usize, path: &mut Vec<usize>, on: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == b {
            out.push(path.clone());
            return;
        }
        let nbrs: Vec<usize> = self.children[v].iter().chain(&self.parents[v]).copied().collect();
        for w in nbrs {
            if !on[w] {
                on[w] = true;
                path.push(w);
                self.extend(b, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }

    pub fn path_open(&self, path: &[usize], given: &[bool]) -> bool {
        for k in 1..path.len() - 1 {
            let (p, w, q) = (path[k - 1], path[k], path[k + 1]);
            let collider = self.children[p].contains(&w) && self.children[q].contains(&w);
            if collider {
                let desc = self.descendants(w);
                if !(0..self.n_observed).any(|u| desc[u] && given[u]) {
                    return false;
                }
            } else if w < self.n_observed && given[w] {
                return false;
            }
        }
        true
    }
}

/// Brute-force d-separation of two single nodes.
pub fn oracle_d_separated(g: &Admg, a: usize, b: usize, given: &[usize]) -> bool {
    let e = Expansion::new(g);
    let mut mask = vec![false; g.len()];
    for &z in given {
        mask[z] = true;
    }
    !e.paths(a, b).iter().any(|p| e.path_open(p, &mask))
}

/// Random ADMG: directed edges only run from lower to higher index, the
/// response is the last node and the treatment any earlier one.
pub fn arb_admg(max_nodes: usize) -> impl Strategy<Value = Admg> {
    (3..=max_nodes).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            0..n - 1,
            proptest::collection::vec(0u8..10, pairs),
            proptest::collection::vec(0u8..10, pairs),
        )
            .prop_map(|(n, x, dir, bi)| {
                let names: Vec<String> = (0..n).map(|i| format!("N{i:02}")).collect();
                let mut d = Vec::new();
                let mut b = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if dir[k] < 3 {
                            d.push((names[i].as_str(), names[j].as_str()));
                        }
                        if bi[k] < 1 {
                            b.push((names[i].as_str(), names[j].as_str()));
                        }
                        k += 1;
                    }
                }
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                Admg::new(&refs, &d, &b, refs[x], refs[n - 1]).unwrap()
            })
    })
}
