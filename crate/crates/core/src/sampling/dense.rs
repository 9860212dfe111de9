//! Reference sampler: Gram matrix of a dense complex Gaussian matrix.
//!
//! O(n²m) per draw. Used only to validate the tridiagonal path.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use super::Spectrum;
use crate::error::{invalid_param, Error, Result};

pub const DEFAULT_DENSE_CAP: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct DenseSampler {
    n: usize,
    m: usize,
}

impl DenseSampler {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Self::with_cap(n, m, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(n: usize, m: usize, cap: usize) -> Result<Self> {
        if n == 0 || m < n {
            return Err(invalid_param(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
        }
        if n > cap {
            return Err(Error::Resource(format!("dense sampler is capped at n = {cap}, got n = {n}")));
        }
        Ok(Self { n, m })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Spectrum {
        let (n, m) = (self.n, self.m);
        let a = DMatrix::<Complex<f64>>::from_fn(n, m, |_, _| {
            Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let gram = &a * a.adjoint();
        let eigs: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
        Spectrum::from_unnormalized(eigs)
    }
}

/// Entanglement spectrum via the ordinary method: eigenvalues of
/// `AA†/Tr(AA†)` for an `n × m` complex Gaussian `A`.
pub fn sample_spectrum_dense<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Spectrum> {
    Ok(DenseSampler::new(n, m)?.sample(rng))
}
