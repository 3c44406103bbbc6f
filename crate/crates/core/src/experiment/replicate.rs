use serde_json::{json, Value};

use super::run::{run_design, summarize, Design};
use super::stats::mean;
use super::ExperimentError;
use crate::par::{self, Execution};
use crate::rng::rep_seed;
use crate::scm::DiscreteScm;

#[derive(Debug, Clone, PartialEq)]
pub struct RepRow {
    pub rep: usize,
    pub design: Design,
    pub effect: f64,
    pub mean_response: f64,
    pub response_variance: f64,
    pub dropped_blocks: usize,
}

/// Per-design aggregate over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSummary {
    pub design: Design,
    pub reps: usize,
    pub mean_effect: f64,
    pub mean_response: f64,
    /// Per-rep response variances, averaged.
    pub mean_response_variance: f64,
    /// Variance of all responses of all reps taken together.
    pub pooled_response_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationTable {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// Grouped by design (in the order given), then ordered by rep.
    pub rows: Vec<RepRow>,
}

pub fn replicate(
    model: &DiscreteScm,
    design: &Design,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<ReplicationTable, ExperimentError> {
    replicate_with(model, std::slice::from_ref(design), n, reps, seed, Execution::default())
}

/// Rep `r` of every design runs on the same derived seed, so the designs
/// are compared on common units.
pub fn replicate_designs(
    model: &DiscreteScm,
    designs: &[Design],
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<ReplicationTable, ExperimentError> {
    replicate_with(model, designs, n, reps, seed, Execution::default())
}

pub fn replicate_with(
    model: &DiscreteScm,
    designs: &[Design],
    n: usize,
    reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<ReplicationTable, ExperimentError> {
    if reps < 1 {
        return Err(ExperimentError::TooFewReps(reps));
    }
    let jobs = designs.len() * reps;
    let results = par::map_indexed(exec, jobs, |j| {
        let (d, rep) = (j / reps, j % reps);
        let design = &designs[d];
        let run = run_design(model, design, n, rep_seed(seed, rep as u64), Execution::Sequential)?;
        let s = summarize(&run)?;
        Ok(RepRow {
            rep,
            design: design.clone(),
            effect: s.effect_estimate,
            mean_response: s.mean_response,
            response_variance: s.response_variance,
            dropped_blocks: s.dropped_blocks.len(),
        })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(ReplicationTable {
        n,
        reps,
        seed,
        rows,
    })
}

impl ReplicationTable {
    /// Designs in table order.
    pub fn designs(&self) -> Vec<&Design> {
        let mut out: Vec<&Design> = Vec::new();
        for r in &self.rows {
            if !out.contains(&&r.design) {
                out.push(&r.design);
            }
        }
        out
    }

    pub fn rows_for<'a>(&'a self, design: &'a Design) -> impl Iterator<Item = &'a RepRow> + 'a {
        self.rows.iter().filter(move |r| &r.design == design)
    }

    pub fn effects(&self, design: &Design) -> Vec<f64> {
        self.rows_for(design).map(|r| r.effect).collect()
    }

    pub fn mean_responses(&self, design: &Design) -> Vec<f64> {
        self.rows_for(design).map(|r| r.mean_response).collect()
    }

    pub fn summary(&self, design: &Design) -> DesignSummary {
        let rows: Vec<&RepRow> = self.rows_for(design).collect();
        let means: Vec<f64> = rows.iter().map(|r| r.mean_response).collect();
        let grand = mean(&means);
        let n = self.n as f64;
        let ss: f64 = rows
            .iter()
            .map(|r| (n - 1.0) * r.response_variance + n * (r.mean_response - grand).powi(2))
            .sum();
        DesignSummary {
            design: design.clone(),
            reps: rows.len(),
            mean_effect: mean(&rows.iter().map(|r| r.effect).collect::<Vec<_>>()),
            mean_response: grand,
            mean_response_variance: mean(
                &rows.iter().map(|r| r.response_variance).collect::<Vec<_>>(),
            ),
            pooled_response_variance: ss / (n * rows.len() as f64 - 1.0),
        }
    }

    pub fn summaries(&self) -> Vec<DesignSummary> {
        self.designs().into_iter().map(|d| self.summary(d)).collect()
    }

    /// One line per rep and design; blocking sets are `;`-separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "rep,design,blocking_set,effect,mean_response,response_variance,pooled_response_variance,dropped_blocks\n",
        );
        for s in self.summaries() {
            let blocking = s.design.blocking().names().join(";");
            for r in self.rows_for(&s.design) {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.rep,
                    r.design.kind(),
                    blocking,
                    r.effect,
                    r.mean_response,
                    r.response_variance,
                    s.pooled_response_variance,
                    r.dropped_blocks
                ));
            }
        }
        out
    }

    /// Per-design means in the layout of an effect/variability table.
    pub fn to_json(&self) -> Value {
        let designs: Vec<Value> = self
            .summaries()
            .iter()
            .map(|s| {
                json!({
                    "design": s.design.kind(),
                    "blocking_set": s.design.blocking(),
                    "reps": s.reps,
                    "mean_effect": s.mean_effect,
                    "mean_response": s.mean_response,
                    "mean_response_variance": s.mean_response_variance,
                    "pooled_response_variance": s.pooled_response_variance,
                })
            })
            .collect();
        json!({ "n": self.n, "reps": self.reps, "seed": self.seed, "designs": designs })
    }
}
