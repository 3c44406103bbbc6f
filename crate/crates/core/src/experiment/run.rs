use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use serde::Serialize;

use super::ExperimentError;
use crate::admg::NodeSet;
use crate::par::{self, Execution};
use crate::rng::{assignment_rng, unit_rng};
use crate::scm::{DiscreteScm, Stratum};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Design {
    Crd,
    Rbd(NodeSet),
}

impl Design {
    /// The empty blocking set is the completely randomized design.
    pub fn from_blocking(blocking: NodeSet) -> Design {
        if blocking.is_empty() {
            Design::Crd
        } else {
            Design::Rbd(blocking)
        }
    }

    pub fn blocking(&self) -> NodeSet {
        match self {
            Design::Crd => NodeSet::new(),
            Design::Rbd(z) => z.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Design::Crd => "CRD",
            Design::Rbd(_) => "RBD",
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Design::Crd => f.write_str("CRD"),
            Design::Rbd(z) => write!(f, "RBD{z}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unit {
    pub x: u8,
    pub y: u8,
    /// Values of the blocking covariates (empty under CRD).
    pub stratum: Stratum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentRun {
    pub design: Design,
    pub units: Vec<Unit>,
    pub seed: u64,
    pub n: usize,
}

/// Completely randomized design: a random permutation puts `ceil(n/2)`
/// units under treatment.
pub fn run_crd(model: &DiscreteScm, n: usize, seed: u64) -> Result<ExperimentRun, ExperimentError> {
    run_design(model, &Design::Crd, n, seed, Execution::default())
}

/// Randomized block design: units are stratified by the natural values of
/// the blocking covariates and treatment is randomized within each stratum.
pub fn run_rbd(
    model: &DiscreteScm,
    blocking: &NodeSet,
    n: usize,
    seed: u64,
) -> Result<ExperimentRun, ExperimentError> {
    run_design(model, &Design::Rbd(blocking.clone()), n, seed, Execution::default())
}

/// Every unit's noise depends only on `(seed, unit index)`, so runs of
/// different designs under one seed share their units; the empty blocking
/// set reproduces the completely randomized run exactly.
pub fn run_design(
    model: &DiscreteScm,
    design: &Design,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<ExperimentRun, ExperimentError> {
    if n < 2 {
        return Err(ExperimentError::TooFewUnits(n));
    }
    let g = model.graph();
    let covariates = g.covariates();
    let blocking = design.blocking();
    let mut cols = Vec::new();
    for id in &blocking {
        if !covariates.contains(id.as_str()) {
            return Err(ExperimentError::NotCovariate(id.to_string()));
        }
        cols.push(g.index_of(id.as_str()).expect("covariate"));
    }
    let (x, y) = (g.treatment(), g.response());

    let noise = par::map_indexed(exec, n, |i| model.draw_noise(&mut unit_rng(seed, i as u64)));
    let strata: Vec<Stratum> = if cols.is_empty() {
        vec![Vec::new(); n]
    } else {
        par::map_indexed(exec, n, |i| {
            let natural = model.evaluate(&noise[i], None);
            cols.iter().map(|&c| natural[c]).collect()
        })
    };

    let mut groups: BTreeMap<&Stratum, Vec<usize>> = BTreeMap::new();
    for (i, s) in strata.iter().enumerate() {
        groups.entry(s).or_default().push(i);
    }
    let mut arm = vec![0u8; n];
    let mut rng = assignment_rng(seed);
    for members in groups.values_mut() {
        members.shuffle(&mut rng);
        let treated = members.len().div_ceil(2);
        for &i in &members[..treated] {
            arm[i] = 1;
        }
    }

    let ys = par::map_indexed(exec, n, |i| model.evaluate(&noise[i], Some((x, arm[i])))[y]);
    let units = strata
        .into_iter()
        .enumerate()
        .map(|(i, stratum)| Unit {
            x: arm[i],
            y: ys[i],
            stratum,
        })
        .collect();
    Ok(ExperimentRun {
        design: design.clone(),
        units,
        seed,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSummary {
    pub stratum: Stratum,
    pub n1: usize,
    pub n0: usize,
    pub block_effect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub effect_estimate: f64,
    /// Sample variance of all responses (divisor n - 1).
    pub response_variance: f64,
    /// Average response over all units.
    pub mean_response: f64,
    pub per_block: Vec<BlockSummary>,
    pub dropped_blocks: Vec<Stratum>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn summarize(run: &ExperimentRun) -> Result<RunSummary, ExperimentError> {
    let ys: Vec<f64> = run.units.iter().map(|u| u.y as f64).collect();
    let n = ys.len();
    if n < 2 {
        return Err(ExperimentError::TooFewUnits(n));
    }
    let arm = |x: u8, units: &[&Unit]| -> Vec<f64> {
        units.iter().filter(|u| u.x == x).map(|u| u.y as f64).collect()
    };
    if !run.units.iter().any(|u| u.x == 1) || !run.units.iter().any(|u| u.x == 0) {
        return Err(ExperimentError::EmptyArm);
    }
    let mean_response = mean(&ys);
    let response_variance =
        ys.iter().map(|y| (y - mean_response).powi(2)).sum::<f64>() / (n - 1) as f64;

    // a completely randomized run is a single stratum
    let mut groups: BTreeMap<&Stratum, Vec<&Unit>> = BTreeMap::new();
    for u in &run.units {
        groups.entry(&u.stratum).or_default().push(u);
    }
    let mut per_block = Vec::new();
    let mut dropped_blocks = Vec::new();
    for (s, units) in groups {
        let (b1, b0) = (arm(1, &units), arm(0, &units));
        if b1.is_empty() || b0.is_empty() {
            dropped_blocks.push(s.clone());
        } else {
            per_block.push(BlockSummary {
                stratum: s.clone(),
                n1: b1.len(),
                n0: b0.len(),
                block_effect: mean(&b1) - mean(&b0),
            });
        }
    }
    let kept: usize = per_block.iter().map(|b| b.n1 + b.n0).sum();
    if kept == 0 {
        return Err(ExperimentError::NoCompleteBlock);
    }
    let effect_estimate = per_block
        .iter()
        .map(|b| (b.n1 + b.n0) as f64 / kept as f64 * b.block_effect)
        .sum();
    Ok(RunSummary {
        effect_estimate,
        response_variance,
        mean_response,
        per_block,
        dropped_blocks,
    })
}
