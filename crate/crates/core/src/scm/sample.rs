use rand::Rng;

use super::model::{DiscreteScm, ScmError};
use crate::par::{self, Execution};
use crate::rng::unit_rng;

/// All randomness consumed by one unit: one value per latent and one
/// uniform per observed variable (indexed by position in topological order).
/// The uniform of an intervened variable is drawn but unused, so a unit's
/// noise does not depend on the intervention.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitNoise {
    pub latents: Vec<f64>,
    pub uniforms: Vec<f64>,
}

impl DiscreteScm {
    pub fn draw_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitNoise {
        let latents = self
            .latents()
            .iter()
            .map(|l| l.lower + (l.upper - l.lower) * rng.gen::<f64>())
            .collect();
        let uniforms = (0..self.graph().len()).map(|_| rng.gen::<f64>()).collect();
        UnitNoise { latents, uniforms }
    }

    /// Values of every observed variable (by node index) for the given noise.
    pub fn evaluate(&self, noise: &UnitNoise, intervention: Option<(usize, u8)>) -> Vec<u8> {
        let mut values = vec![0u8; self.graph().len()];
        for (pos, &v) in self.topological_order().iter().enumerate() {
            values[v] = match intervention {
                Some((node, x)) if node == v => x,
                _ => (noise.uniforms[pos] < self.prob_one(v, &values, &noise.latents)) as u8,
            };
        }
        values
    }
}

/// `n` independent draws; unit `i` uses its own stream derived from
/// `seed` and `i`. Each assignment is indexed by node index.
pub fn sample(
    model: &DiscreteScm,
    intervention: Option<(&str, u8)>,
    seed: u64,
    n: usize,
) -> Result<Vec<Vec<u8>>, ScmError> {
    sample_with(model, intervention, seed, n, Execution::default())
}

pub fn sample_with(
    model: &DiscreteScm,
    intervention: Option<(&str, u8)>,
    seed: u64,
    n: usize,
    exec: Execution,
) -> Result<Vec<Vec<u8>>, ScmError> {
    let iv = model.resolve_intervention(intervention)?;
    Ok(par::map_indexed(exec, n, |i| {
        let noise = model.draw_noise(&mut unit_rng(seed, i as u64));
        model.evaluate(&noise, iv)
    }))
}
