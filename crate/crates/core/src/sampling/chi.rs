//! Chi variates drawn as square roots of Gamma(ν/2, scale 2) variates.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{invalid_param, Result};

/// One draw of a chi variable with `dof` degrees of freedom.
pub fn sample_chi<R: Rng + ?Sized>(dof: f64, rng: &mut R) -> Result<f64> {
    Ok(ChiDistribution::new(dof)?.sample(rng))
}

/// Chi distribution with the underlying Gamma sampler set up once.
#[derive(Debug, Clone, Copy)]
pub struct ChiDistribution {
    dof: f64,
    squared: Gamma<f64>,
}

impl ChiDistribution {
    pub fn new(dof: f64) -> Result<Self> {
        if !(dof > 0.0 && dof.is_finite()) {
            return Err(invalid_param(format!("chi degrees of freedom must be positive, got {dof}")));
        }
        let squared = Gamma::new(0.5 * dof, 2.0)
            .map_err(|e| invalid_param(format!("gamma({}, 2): {e}", 0.5 * dof)))?;
        Ok(Self { dof, squared })
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    /// Draw of χ²_ν itself, skipping the square root.
    #[inline]
    pub fn sample_squared<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.squared.sample(rng)
    }
}

impl Distribution<f64> for ChiDistribution {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.squared.sample(rng).sqrt()
    }
}
