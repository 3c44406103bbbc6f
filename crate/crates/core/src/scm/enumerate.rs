//! Exact joint tables by midpoint quadrature over the latents.
//!
//! The joint factorizes over groups of observed variables linked by shared
//! latents: P(v) = prod_g Q_g(v), where Q_g integrates the product of the
//! group's mechanisms over the group's latents and depends only on the group
//! and its parents. Each factor is tabulated on its own small scope, so the
//! quadrature grid never spans latents of unrelated groups.

use super::model::{DiscreteScm, ScmError};
use crate::admg::NodeId;
use crate::par::{self, Execution};

pub const DEFAULT_QUADRATURE: usize = 32;
pub const MAX_ENUMERATED_NODES: usize = 24;
const MAX_FACTOR_WORK: u128 = 1 << 31;

/// Probability of every full binary assignment. Entry `mask` has bit `i`
/// set when node `i` (in sorted name order) equals 1.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    names: Vec<NodeId>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn names(&self) -> &[NodeId] {
        &self.names
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, mask: usize) -> f64 {
        self.probs[mask]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n.as_str() == name)
    }

    /// P(node = 1).
    pub fn marginal(&self, node: usize) -> f64 {
        self.sum_where(|m| m >> node & 1 == 1)
    }

    /// `[a][b]` holds P(A = a, B = b).
    pub fn pairwise(&self, a: usize, b: usize) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (m, &p) in self.probs.iter().enumerate() {
            out[m >> a & 1][m >> b & 1] += p;
        }
        out
    }

    pub fn sum_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|&(m, _)| pred(m))
            .map(|(_, p)| p)
            .sum()
    }

    /// `(name, value)` pairs of an entry.
    pub fn assignment(&self, mask: usize) -> Vec<(&NodeId, u8)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (n, (mask >> i & 1) as u8))
            .collect()
    }
}

struct Group {
    members: Vec<usize>,
    latents: Vec<usize>,
    /// Members and their parents, ascending.
    scope: Vec<usize>,
}

fn groups(model: &DiscreteScm) -> Vec<Group> {
    let g = model.graph();
    let n = g.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for l in model.latents() {
        for w in l.attached.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let r = find(&mut parent, v);
        by_root.entry(r).or_default().push(v);
    }
    by_root
        .into_values()
        .map(|members| {
            let mut latents: Vec<usize> = members
                .iter()
                .flat_map(|&v| model.node_latents(v).iter().copied())
                .collect();
            latents.sort_unstable();
            latents.dedup();
            let mut scope = members.clone();
            for &v in &members {
                scope.extend(g.parents_of(v).iter());
            }
            scope.sort_unstable();
            scope.dedup();
            Group {
                members,
                latents,
                scope,
            }
        })
        .collect()
}

/// Mechanism of one group member, tabulated over the member's own latents.
struct MemberTable {
    /// Scope positions of the member followed by its parents.
    bits: Vec<usize>,
    /// Group latent positions the member depends on.
    latents: Vec<usize>,
    /// `rows[local][grid]`: probability of the member's local value.
    rows: Vec<Vec<f64>>,
}

fn member_table(
    model: &DiscreteScm,
    group: &Group,
    v: usize,
    intervention: Option<(usize, u8)>,
    q: usize,
) -> MemberTable {
    let g = model.graph();
    let pos = |node: usize| group.scope.binary_search(&node).expect("in scope");
    let mut nodes = vec![v];
    nodes.extend(g.parents_of(v).iter());
    let bits: Vec<usize> = nodes.iter().map(|&u| pos(u)).collect();
    let latents: Vec<usize> = model
        .node_latents(v)
        .iter()
        .map(|l| group.latents.binary_search(l).expect("group latent"))
        .collect();
    let points = q.pow(latents.len() as u32);
    let mut values = vec![0u8; g.len()];
    let mut lat = vec![0.0; model.latents().len()];
    let rows = (0..1usize << nodes.len())
        .map(|local| {
            for (j, &u) in nodes.iter().enumerate() {
                values[u] = (local >> j & 1) as u8;
            }
            (0..points)
                .map(|gi| {
                    if let Some((x, val)) = intervention {
                        if x == v {
                            return (values[v] == val) as u8 as f64;
                        }
                    }
                    let mut rest = gi;
                    for &l in model.node_latents(v) {
                        let latent = &model.latents()[l];
                        let h = (latent.upper - latent.lower) / q as f64;
                        lat[l] = latent.lower + h * ((rest % q) as f64 + 0.5);
                        rest /= q;
                    }
                    let p1 = model.prob_one(v, &values, &lat);
                    if values[v] == 1 {
                        p1
                    } else {
                        1.0 - p1
                    }
                })
                .collect()
        })
        .collect();
    MemberTable {
        bits,
        latents,
        rows,
    }
}

fn factor(
    model: &DiscreteScm,
    group: &Group,
    intervention: Option<(usize, u8)>,
    q: usize,
    exec: Execution,
) -> Vec<f64> {
    let tables: Vec<MemberTable> = group
        .members
        .iter()
        .map(|&v| member_table(model, group, v, intervention, q))
        .collect();
    let k = group.latents.len();
    let points = q.pow(k as u32);
    let weight = 1.0 / points as f64;
    // stride of each group latent in a member's grid index
    let strides: Vec<Vec<usize>> = tables
        .iter()
        .map(|t| {
            let mut s = vec![0; k];
            for (j, &l) in t.latents.iter().enumerate() {
                s[l] = q.pow(j as u32);
            }
            s
        })
        .collect();
    par::map_indexed(exec, 1 << group.scope.len(), |local| {
        let rows: Vec<&[f64]> = tables
            .iter()
            .map(|t| {
                let r = t
                    .bits
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &b)| acc | (local >> b & 1) << j);
                t.rows[r].as_slice()
            })
            .collect();
        if rows.iter().any(|r| r.iter().all(|&p| p == 0.0)) {
            return 0.0;
        }
        let mut digits = vec![0usize; k];
        let mut idx = vec![0usize; rows.len()];
        let mut acc = 0.0;
        for _ in 0..points {
            let mut p = 1.0;
            for (r, &i) in rows.iter().zip(&idx) {
                p *= r[i];
            }
            acc += p;
            // odometer step over the group latents
            for l in 0..k {
                digits[l] += 1;
                for (m, s) in strides.iter().enumerate() {
                    idx[m] += s[l];
                }
                if digits[l] < q {
                    break;
                }
                for (m, s) in strides.iter().enumerate() {
                    idx[m] -= s[l] * q;
                }
                digits[l] = 0;
            }
        }
        acc * weight
    })
}

pub fn enumerate(
    model: &DiscreteScm,
    intervention: Option<(&str, u8)>,
    quadrature_points: usize,
) -> Result<JointTable, ScmError> {
    enumerate_with(model, intervention, quadrature_points, Execution::default())
}

pub fn enumerate_with(
    model: &DiscreteScm,
    intervention: Option<(&str, u8)>,
    quadrature_points: usize,
    exec: Execution,
) -> Result<JointTable, ScmError> {
    let g = model.graph();
    let n = g.len();
    if n > MAX_ENUMERATED_NODES {
        return Err(ScmError::TooLarge(format!(
            "model has {n} observed variables; enumeration supports at most {MAX_ENUMERATED_NODES}"
        )));
    }
    if quadrature_points < 2 {
        return Err(ScmError::Invalid(format!(
            "quadrature needs at least 2 points, got {quadrature_points}"
        )));
    }
    let iv = model.resolve_intervention(intervention)?;
    let groups = groups(model);
    for grp in &groups {
        let work = (1u128 << grp.scope.len())
            .saturating_mul((quadrature_points as u128).saturating_pow(grp.latents.len() as u32))
            .saturating_mul(grp.members.len() as u128);
        if work > MAX_FACTOR_WORK {
            return Err(ScmError::TooLarge(format!(
                "latent group of {} with {} latents is too large to integrate at {quadrature_points} points",
                g.name(grp.members[0]),
                grp.latents.len()
            )));
        }
    }
    let factors: Vec<Vec<f64>> = groups
        .iter()
        .map(|grp| factor(model, grp, iv, quadrature_points, exec))
        .collect();
    let probs = par::map_indexed(exec, 1 << n, |mask| {
        let mut p = 1.0;
        for (grp, f) in groups.iter().zip(&factors) {
            let mut local = 0;
            for (j, &v) in grp.scope.iter().enumerate() {
                local |= (mask >> v & 1) << j;
            }
            p *= f[local];
            if p == 0.0 {
                break;
            }
        }
        p
    });
    Ok(JointTable {
        names: g.names().to_vec(),
        probs,
    })
}

/// E[Y | do(X=1)] - E[Y | do(X=0)] at the default quadrature.
pub fn true_effect(model: &DiscreteScm) -> Result<f64, ScmError> {
    true_effect_with(model, DEFAULT_QUADRATURE, Execution::default())
}

pub fn true_effect_with(model: &DiscreteScm, quadrature_points: usize, exec: Execution) -> Result<f64, ScmError> {
    let g = model.graph();
    let (x, y) = (g.treatment_id().as_str(), g.response());
    let t1 = enumerate_with(model, Some((x, 1)), quadrature_points, exec)?;
    let t0 = enumerate_with(model, Some((x, 0)), quadrature_points, exec)?;
    Ok(t1.marginal(y) - t0.marginal(y))
}
