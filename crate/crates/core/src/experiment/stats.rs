use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use super::ExperimentError;
use crate::admg::NodeId;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with divisor `len - 1`.
pub fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

fn need_two(a: &[f64], b: &[f64]) -> Result<(), ExperimentError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(ExperimentError::Stats(
            "each sample needs at least two values".into(),
        ));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(ExperimentError::Stats("samples must be finite".into()));
    }
    Ok(())
}

/// Two-sided Welch t-test with Satterthwaite degrees of freedom.
pub fn t_test_effects(a: &[f64], b: &[f64]) -> Result<f64, ExperimentError> {
    need_two(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (qa, qb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| ExperimentError::Stats(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).clamp(0.0, 1.0))
}

/// Two-sided F-test for equal variances of two samples.
pub fn f_test_variances(a: &[f64], b: &[f64]) -> Result<f64, ExperimentError> {
    need_two(a, b)?;
    f_test_from_variances(sample_variance(a), a.len(), sample_variance(b), b.len())
}

/// Two-sided F-test from summary statistics: variance `va` estimated from
/// `na` observations and `vb` from `nb`. The larger variance goes in the
/// numerator.
pub fn f_test_from_variances(va: f64, na: usize, vb: f64, nb: usize) -> Result<f64, ExperimentError> {
    if na < 2 || nb < 2 {
        return Err(ExperimentError::Stats(
            "each sample needs at least two values".into(),
        ));
    }
    if !(va > 0.0 && vb > 0.0 && va.is_finite() && vb.is_finite()) {
        return Err(ExperimentError::Stats("variances must be positive".into()));
    }
    let ((v1, n1), (v2, n2)) = if va >= vb { ((va, na), (vb, nb)) } else { ((vb, nb), (va, na)) };
    let dist = FisherSnedecor::new((n1 - 1) as f64, (n2 - 1) as f64)
        .map_err(|e| ExperimentError::Stats(e.to_string()))?;
    Ok((2.0 * dist.sf(v1 / v2)).clamp(0.0, 1.0))
}

/// Number of blocks formed by crossing covariates with the given numbers of values.
pub fn count_blocks(values_per_covariate: &BTreeMap<NodeId, u64>) -> Result<u64, ExperimentError> {
    values_per_covariate.iter().try_fold(1u64, |acc, (id, &v)| {
        if v == 0 {
            return Err(ExperimentError::Stats(format!("{id} has no values")));
        }
        acc.checked_mul(v)
            .ok_or_else(|| ExperimentError::Stats("block count overflows".into()))
    })
}
