//! Entanglement spectra of Haar-random pure states in ℂⁿ ⊗ ℂᵐ.
//!
//! The fast path draws the `n × n` lower-bidiagonal chi matrix, forms the
//! tridiagonal Gram matrix and diagonalizes it in O(n²). The dense path
//! samples a full complex Gaussian matrix and exists for validation.

mod chi;
mod dense;
mod eigen;
mod tridiagonal;

pub use chi::{sample_chi, ChiDistribution};
pub use dense::{sample_spectrum_dense, DenseSampler, DEFAULT_DENSE_CAP};
pub use eigen::{eigvals_symtrid, ql_implicit, MAX_SWEEPS};
pub use tridiagonal::{
    sample_tridiagonal, BidiagonalDraw, BidiagonalModel, BidiagonalSampler, SymTridiagonal,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Result};

/// Tolerance on `Σ λ = 1` for a valid spectrum.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability vector stored in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Validates a probability vector and sorts it into decreasing order.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid_input("spectrum must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid_input("spectrum entries must be finite and nonnegative"));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL * values.len().max(1) as f64 {
            return Err(invalid_input(format!("spectrum sums to {total}, not 1")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    /// Normalizes nonnegative eigenvalues to unit sum and sorts decreasing.
    /// Round-off negatives are clamped to zero.
    pub fn from_unnormalized(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_by(f64::total_cmp);
        let total: f64 = values.iter().sum();
        values.reverse();
        for v in values.iter_mut() {
            *v /= total;
        }
        Self { values }
    }

    /// `(1/n, …, 1/n)`, the minimum of the majorization order.
    pub fn uniform(n: usize) -> Self {
        Self { values: vec![1.0 / n as f64; n] }
    }

    /// `(1, 0, …, 0)`, the maximum of the majorization order.
    pub fn pure(n: usize) -> Self {
        let mut values = vec![0.0; n];
        values[0] = 1.0;
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

/// Tridiagonal spectrum sampler with reusable work buffers.
#[derive(Debug, Clone)]
pub struct TridiagonalSampler {
    bidiagonal: BidiagonalSampler,
    d: Vec<f64>,
    e: Vec<f64>,
}

impl TridiagonalSampler {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        let bidiagonal = BidiagonalSampler::new(BidiagonalModel::new(n, m)?)?;
        Ok(Self { bidiagonal, d: Vec::with_capacity(n), e: Vec::with_capacity(n) })
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Spectrum> {
        self.bidiagonal.fill_gram(rng, &mut self.d, &mut self.e);
        ql_implicit(&mut self.d, &mut self.e)?;
        Ok(Spectrum::from_unnormalized(self.d.clone()))
    }
}

/// Which construction produces the spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Tridiagonal,
    Dense,
}

/// Either sampler behind one interface.
#[derive(Debug, Clone)]
pub enum SpectrumSampler {
    Tridiagonal(TridiagonalSampler),
    Dense(DenseSampler),
}

impl SpectrumSampler {
    pub fn new(method: Method, n: usize, m: usize) -> Result<Self> {
        Ok(match method {
            Method::Tridiagonal => Self::Tridiagonal(TridiagonalSampler::new(n, m)?),
            Method::Dense => Self::Dense(DenseSampler::new(n, m)?),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Spectrum> {
        match self {
            Self::Tridiagonal(s) => s.sample(rng),
            Self::Dense(s) => Ok(s.sample(rng)),
        }
    }
}

/// Entanglement spectrum of a Haar-random state in ℂⁿ ⊗ ℂᵐ, `1 <= n <= m`.
pub fn sample_spectrum<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Spectrum> {
    TridiagonalSampler::new(n, m)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_stream;

    fn assert_valid(s: &Spectrum) {
        let v = s.values();
        assert!(v.windows(2).all(|w| w[0] >= w[1]), "{v:?}");
        assert!(v.iter().all(|&x| x >= 0.0));
        let total: f64 = v.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12, "sum {total}");
    }

    #[test]
    fn n_one_is_trivial() {
        let mut rng = task_stream(1, 0);
        for m in [1, 2, 17] {
            assert_eq!(sample_spectrum(1, m, &mut rng).unwrap().values(), &[1.0]);
            assert_eq!(sample_spectrum_dense(1, m, &mut rng).unwrap().values(), &[1.0]);
        }
    }

    #[test]
    fn spectra_are_normalized_and_decreasing() {
        let mut rng = task_stream(2, 0);
        for &(n, m) in &[(2, 2), (3, 7), (16, 16), (64, 128), (300, 301)] {
            let mut sampler = TridiagonalSampler::new(n, m).unwrap();
            for _ in 0..20 {
                assert_valid(&sampler.sample(&mut rng).unwrap());
            }
        }
        for &(n, m) in &[(2, 2), (5, 9), (12, 12)] {
            for _ in 0..20 {
                assert_valid(&sample_spectrum_dense(n, m, &mut rng).unwrap());
            }
        }
    }

    #[test]
    fn dense_cap_and_shape_errors() {
        let mut rng = task_stream(3, 0);
        assert!(matches!(
            sample_spectrum_dense(65, 80, &mut rng),
            Err(crate::Error::Resource(_))
        ));
        assert!(DenseSampler::with_cap(100, 100, 128).is_ok());
        assert!(sample_spectrum(3, 2, &mut rng).is_err());
        assert!(sample_spectrum(0, 2, &mut rng).is_err());
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![0.2, 0.5, 0.3]).is_ok());
        assert_eq!(Spectrum::new(vec![0.2, 0.5, 0.3]).unwrap().values(), &[0.5, 0.3, 0.2]);
        assert!(Spectrum::new(vec![0.2, 0.5]).is_err());
        assert!(Spectrum::new(vec![1.2, -0.2]).is_err());
        assert!(Spectrum::new(vec![]).is_err());
        assert_eq!(Spectrum::uniform(4).values(), &[0.25; 4]);
        assert_eq!(Spectrum::pure(3).values(), &[1.0, 0.0, 0.0]);
    }
}
