use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::projectors::ProjectorSet;
use crate::entanglement::DensityMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Noise {
    Exact,
    Poisson { seed: u64 },
}

/// Coincidence count for one projector, as recorded before correction.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub label: String,
    pub count: f64,
    pub correction: f64,
}

impl CountRecord {
    pub fn corrected(&self) -> f64 {
        self.count * self.correction
    }
}

/// `n_ν = C⟨ψ_ν|ρ|ψ_ν⟩ / correction`, optionally Poisson-sampled.
pub fn simulate_counts(rho: &DensityMatrix, projs: &ProjectorSet, scale: f64, noise: Noise) -> Result<Vec<CountRecord>> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Domain(format!("count scale C must be positive, got {scale}")));
    }
    if rho.signal_dim() != projs.dim() || rho.idler_dim() != projs.dim() {
        return Err(Error::Contract(format!(
            "{}x{} state measured with a d = {} quorum",
            rho.signal_dim(),
            rho.idler_dim(),
            projs.dim()
        )));
    }
    let mut rng = match noise {
        Noise::Poisson { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Noise::Exact => None,
    };
    projs
        .projectors()
        .iter()
        .map(|p| {
            let mean = (scale * rho.matrix().expectation(&p.joint()).re / p.correction).max(0.0);
            let count = match rng.as_mut() {
                None => mean,
                Some(_) if mean == 0.0 => 0.0,
                Some(r) => Poisson::new(mean)
                    .map_err(|e| Error::Domain(format!("Poisson mean {mean}: {e}")))?
                    .sample(r),
            };
            Ok(CountRecord { label: p.label.clone(), count, correction: p.correction })
        })
        .collect()
}
