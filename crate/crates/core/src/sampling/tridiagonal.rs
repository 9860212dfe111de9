use rand::Rng;

use super::chi::ChiDistribution;
use crate::error::{invalid_param, Result};

/// Degrees of freedom of the lower-bidiagonal chi matrix whose Gram matrix
/// has Laguerre unitary eigenvalues.
///
/// Diagonal entry `i` is χ with `2m - 2i` degrees of freedom, the entry
/// just below it is χ with `2(n - 1 - i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidiagonalModel {
    n: usize,
    m: usize,
    diag_dof: Vec<u64>,
    sub_dof: Vec<u64>,
}

impl BidiagonalModel {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid_param("n must be at least 1"));
        }
        if m < n {
            return Err(invalid_param(format!("need m >= n, got n = {n}, m = {m}")));
        }
        let diag_dof = (0..n).map(|i| 2 * (m - i) as u64).collect();
        let sub_dof = (0..n - 1).map(|i| 2 * (n - 1 - i) as u64).collect();
        Ok(Self { n, m, diag_dof, sub_dof })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn diag_dof(&self) -> &[u64] {
        &self.diag_dof
    }

    pub fn sub_dof(&self) -> &[u64] {
        &self.sub_dof
    }

    /// Expected trace of the Gram matrix, `2nm`.
    pub fn expected_trace(&self) -> f64 {
        (2 * self.n * self.m) as f64
    }
}

/// Symmetric tridiagonal matrix: diagonal `d` (length n) and off-diagonal `e`
/// (length n - 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Result<Self> {
        if d.is_empty() || e.len() + 1 != d.len() {
            return Err(invalid_param(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                d.len(),
                e.len()
            )));
        }
        if d.iter().chain(&e).any(|v| !v.is_finite()) {
            return Err(invalid_param("tridiagonal entries must be finite"));
        }
        Ok(Self { d, e })
    }

    /// `A Aᵀ` for the lower-bidiagonal `A` with diagonal `x` and subdiagonal `y`.
    pub fn from_bidiagonal(x: &[f64], y: &[f64]) -> Self {
        assert_eq!(x.len(), y.len() + 1, "bidiagonal shape mismatch");
        let n = x.len();
        let mut d = Vec::with_capacity(n);
        let mut e = Vec::with_capacity(n - 1);
        d.push(x[0] * x[0]);
        for i in 1..n {
            d.push(x[i] * x[i] + y[i - 1] * y[i - 1]);
        }
        for i in 0..n - 1 {
            e.push(x[i] * y[i]);
        }
        Self { d, e }
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn trace(&self) -> f64 {
        self.d.iter().sum()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.d[i];
        }
        for (i, &v) in self.e.iter().enumerate() {
            a[i * n + i + 1] = v;
            a[(i + 1) * n + i] = v;
        }
        a
    }

    /// Largest absolute row sum, a cheap bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.e[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.e[i].abs() } else { 0.0 };
                left + self.d[i].abs() + right
            })
            .fold(0.0, f64::max)
    }
}

/// Chi entries of one draw of the bidiagonal factor.
#[derive(Debug, Clone)]
pub struct BidiagonalDraw {
    pub diag: Vec<f64>,
    pub sub: Vec<f64>,
}

/// Pre-built chi samplers for a fixed model.
#[derive(Debug, Clone)]
pub struct BidiagonalSampler {
    model: BidiagonalModel,
    diag: Vec<ChiDistribution>,
    sub: Vec<ChiDistribution>,
}

impl BidiagonalSampler {
    pub fn new(model: BidiagonalModel) -> Result<Self> {
        let diag = model
            .diag_dof()
            .iter()
            .map(|&k| ChiDistribution::new(k as f64))
            .collect::<Result<_>>()?;
        let sub = model
            .sub_dof()
            .iter()
            .map(|&k| ChiDistribution::new(k as f64))
            .collect::<Result<_>>()?;
        Ok(Self { model, diag, sub })
    }

    pub fn model(&self) -> &BidiagonalModel {
        &self.model
    }

    /// Draws entries in the order x₀, y₀, x₁, y₁, …, x_{n-1}.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> BidiagonalDraw {
        let n = self.model.n();
        let mut diag = Vec::with_capacity(n);
        let mut sub = Vec::with_capacity(n - 1);
        for i in 0..n {
            diag.push(self.diag[i].sample_squared(rng).sqrt());
            if i + 1 < n {
                sub.push(self.sub[i].sample_squared(rng).sqrt());
            }
        }
        BidiagonalDraw { diag, sub }
    }

    /// Fills `d` and `e` with a fresh `A Aᵀ`, drawing in the same order as
    /// [`Self::draw`]. `e` gets one spare trailing slot for the eigensolver.
    pub fn fill_gram<R: Rng + ?Sized>(&self, rng: &mut R, d: &mut Vec<f64>, e: &mut Vec<f64>) {
        let n = self.model.n();
        d.clear();
        e.clear();
        let mut y_prev_sq = 0.0;
        for i in 0..n {
            let x = self.diag[i].sample_squared(rng).sqrt();
            d.push(x * x + y_prev_sq);
            if i + 1 < n {
                let y = self.sub[i].sample_squared(rng).sqrt();
                e.push(x * y);
                y_prev_sq = y * y;
            }
        }
        e.push(0.0);
    }
}

/// One draw of `A Aᵀ` for the bidiagonal chi model.
pub fn sample_tridiagonal<R: Rng + ?Sized>(model: &BidiagonalModel, rng: &mut R) -> Result<SymTridiagonal> {
    let sampler = BidiagonalSampler::new(model.clone())?;
    let draw = sampler.draw(rng);
    Ok(SymTridiagonal::from_bidiagonal(&draw.diag, &draw.sub))
}
