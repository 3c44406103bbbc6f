//! Exact variance terms of the unblocked and blocked effect estimators for
//! a fixed allocation of units to (treatment arm, stratum) cells.

use std::collections::BTreeMap;

use super::enumerate::{enumerate_with, DEFAULT_QUADRATURE};
use super::model::{DiscreteScm, ScmError};
use crate::admg::NodeSet;
use crate::par::Execution;

/// Values of the blocking covariates, in the blocking set's name order.
pub type Stratum = Vec<u8>;

/// Units per `(arm, stratum)` cell.
pub type Allocation = BTreeMap<(u8, Stratum), usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct StratumStats {
    pub stratum: Stratum,
    /// P(Z = z), averaged over the two interventional distributions.
    pub prob: f64,
    /// E[Y | do(X=1), Z = z] and E[Y | do(X=0), Z = z].
    pub mean1: f64,
    pub mean0: f64,
}

impl StratumStats {
    pub fn effect(&self) -> f64 {
        self.mean1 - self.mean0
    }
}

/// Per-stratum interventional response means for one blocking set.
#[derive(Debug, Clone, PartialEq)]
pub struct StrataProfile {
    pub blocking: NodeSet,
    pub strata: Vec<StratumStats>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceTerms {
    /// E_Z[Var(Y(1)|Z)/n_{1,z} + Var(Y(0)|Z)/n_{0,z}]
    pub within: f64,
    /// E_Z[(beta(Z) - beta)^2]
    pub between_crd: f64,
    /// Zero: the blocked estimator weights strata by their realized shares.
    pub between_rbd: f64,
}

impl VarianceTerms {
    pub fn crd_total(&self) -> f64 {
        self.within + self.between_crd
    }

    pub fn rbd_total(&self) -> f64 {
        self.within + self.between_rbd
    }
}

impl StrataProfile {
    pub fn compute(
        model: &DiscreteScm,
        blocking: &NodeSet,
        quadrature_points: usize,
        exec: Execution,
    ) -> Result<StrataProfile, ScmError> {
        let g = model.graph();
        let covariates = g.covariates();
        let mut cols = Vec::new();
        for id in blocking {
            if !covariates.contains(id.as_str()) {
                return Err(ScmError::Invalid(format!("{id} is not a covariate")));
            }
            cols.push(g.index_of(id.as_str()).expect("covariate"));
        }
        let x = g.treatment_id().as_str();
        let y = g.response();
        let tables = [
            enumerate_with(model, Some((x, 0)), quadrature_points, exec)?,
            enumerate_with(model, Some((x, 1)), quadrature_points, exec)?,
        ];
        let k = cols.len();
        // [arm][stratum code] -> (P(z), P(z, Y=1))
        let mut acc = vec![vec![(0.0f64, 0.0f64); 1 << k]; 2];
        for (arm, t) in tables.iter().enumerate() {
            for (mask, &p) in t.probs().iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let code = cols
                    .iter()
                    .enumerate()
                    .fold(0, |c, (j, &v)| c | (mask >> v & 1) << j);
                let cell = &mut acc[arm][code];
                cell.0 += p;
                if mask >> y & 1 == 1 {
                    cell.1 += p;
                }
            }
        }
        let mean = |(pz, py): (f64, f64)| if pz > 0.0 { py / pz } else { 0.0 };
        let strata = (0..1usize << k)
            .map(|code| StratumStats {
                stratum: (0..k).map(|j| (code >> j & 1) as u8).collect(),
                prob: 0.5 * (acc[0][code].0 + acc[1][code].0),
                mean1: mean(acc[1][code]),
                mean0: mean(acc[0][code]),
            })
            .collect();
        Ok(StrataProfile {
            blocking: blocking.clone(),
            strata,
        })
    }

    /// beta = sum_z P(z) beta(z).
    pub fn effect(&self) -> f64 {
        self.strata.iter().map(|s| s.prob * s.effect()).sum()
    }

    /// `n_{x,z} = max(1, floor(n P(z) / 2))` for every stratum of positive probability.
    pub fn balanced_allocation(&self, n: usize) -> Allocation {
        let mut out = Allocation::new();
        for s in self.strata.iter().filter(|s| s.prob > 0.0) {
            let cell = ((n as f64 * s.prob / 2.0).floor() as usize).max(1);
            for arm in [0, 1] {
                out.insert((arm, s.stratum.clone()), cell);
            }
        }
        out
    }

    pub fn decompose(&self, allocation: &Allocation) -> Result<VarianceTerms, ScmError> {
        let beta = self.effect();
        let mut within = 0.0;
        let mut between = 0.0;
        for s in self.strata.iter().filter(|s| s.prob > 0.0) {
            let count = |arm: u8| match allocation.get(&(arm, s.stratum.clone())) {
                Some(&c) if c >= 1 => Ok(c as f64),
                _ => Err(ScmError::Invalid(format!(
                    "no units allocated to arm {arm} of stratum {:?}",
                    s.stratum
                ))),
            };
            let (n1, n0) = (count(1)?, count(0)?);
            let v1 = s.mean1 * (1.0 - s.mean1);
            let v0 = s.mean0 * (1.0 - s.mean0);
            within += s.prob * (v1 / n1 + v0 / n0);
            between += s.prob * (s.effect() - beta).powi(2);
        }
        Ok(VarianceTerms {
            within,
            between_crd: between,
            between_rbd: 0.0,
        })
    }
}

/// Within and between terms for `blocking` under `allocation`, at the
/// default quadrature.
pub fn variance_decomposition(
    model: &DiscreteScm,
    blocking: &NodeSet,
    allocation: &Allocation,
) -> Result<VarianceTerms, ScmError> {
    StrataProfile::compute(model, blocking, DEFAULT_QUADRATURE, Execution::default())?
        .decompose(allocation)
}
