//! Mergeable accumulators and empirical distributions.

use serde::{Deserialize, Serialize};

/// Streaming central moments up to order four, mergeable in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.merge(&Moments { count: 1, mean: x, m2: 0.0, m3: 0.0, m4: 0.0 });
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let (m2a, m2b) = (self.m2, other.m2);
        let (m3a, m3b) = (self.m3, other.m3);

        let mean = self.mean + delta * nb / n;
        let m2 = m2a + m2b + d2 * na * nb / n;
        let m3 = m3a + m3b + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * m2b - nb * m2a) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * m2b + nb * nb * m2a) / (n * n)
            + 4.0 * delta * (na * m3b - nb * m3a) / n;

        *self = Moments { count: self.count + other.count, mean, m2, m3, m4 };
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn stderr_mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    /// Large-sample standard error of [`Self::variance`],
    /// `√((μ₄ - σ⁴) / M)`.
    pub fn stderr_variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let n = self.count as f64;
        let mu4 = self.m4 / n;
        let s2 = self.m2 / n;
        ((mu4 - s2 * s2).max(0.0) / n).sqrt()
    }

    /// `sd / mean`.
    pub fn relative_fluctuation(&self) -> f64 {
        self.std_dev() / self.mean
    }
}

/// Above this many samples only a fixed-bin histogram is kept.
pub const MAX_EXACT_SAMPLES: usize = 1_000_000;
pub const FALLBACK_BINS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Storage {
    /// Every sample, ascending.
    Sorted(Vec<f64>),
    /// Equal-width bins over `[lo, hi]`.
    Histogram { lo: f64, hi: f64, counts: Vec<u64> },
}

/// Empirical law of a scalar with an optional atom.
///
/// Samples exactly equal to the atom location are counted there as well as
/// in the storage, so `atom_mass + continuous_mass = 1` holds by counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    count: u64,
    atom_location: Option<f64>,
    atom_count: u64,
    sum: f64,
    sum_sq: f64,
    storage: Storage,
}

impl EmpiricalDistribution {
    /// Builds from samples in generation order. `atom` marks a value whose
    /// exact occurrences are tallied separately.
    pub fn from_samples(mut samples: Vec<f64>, atom: Option<f64>) -> Self {
        let count = samples.len() as u64;
        let atom_count = atom.map_or(0, |a| samples.iter().filter(|&&v| v == a).count() as u64);
        let sum = samples.iter().sum();
        let sum_sq = samples.iter().map(|v| v * v).sum();
        let storage = if samples.len() <= MAX_EXACT_SAMPLES {
            samples.sort_by(f64::total_cmp);
            Storage::Sorted(samples)
        } else {
            let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Storage::Histogram { lo, hi, counts: bin_counts(&samples, lo, hi, FALLBACK_BINS) }
        };
        Self { count, atom_location: atom, atom_count, sum, sum_sq, storage }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn atom_location(&self) -> Option<f64> {
        self.atom_location
    }

    pub fn atom_count(&self) -> u64 {
        self.atom_count
    }

    pub fn atom_mass(&self) -> f64 {
        self.atom_count as f64 / self.count as f64
    }

    pub fn continuous_mass(&self) -> f64 {
        (self.count - self.atom_count) as f64 / self.count as f64
    }

    /// Binomial standard error of the atom mass.
    pub fn atom_stderr(&self) -> f64 {
        let p = self.atom_mass();
        (p * (1.0 - p) / self.count as f64).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    pub fn stderr_mean(&self) -> f64 {
        let n = self.count as f64;
        if self.count < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    /// Sorted samples, when kept exactly.
    pub fn sorted_samples(&self) -> Option<&[f64]> {
        match &self.storage {
            Storage::Sorted(v) => Some(v),
            Storage::Histogram { .. } => None,
        }
    }

    /// Sorted samples other than those sitting on the atom.
    pub fn continuous_samples(&self) -> Option<Vec<f64>> {
        let v = self.sorted_samples()?;
        Some(match self.atom_location {
            Some(a) => v.iter().copied().filter(|&x| x != a).collect(),
            None => v.to_vec(),
        })
    }

    /// `P(X <= x)`. Exact for sorted storage; linear within a bin otherwise.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.storage {
            Storage::Sorted(v) => v.partition_point(|&s| s <= x) as f64 / self.count as f64,
            Storage::Histogram { lo, hi, counts } => {
                if x < *lo {
                    return 0.0;
                }
                if x >= *hi {
                    return 1.0;
                }
                let width = (hi - lo) / counts.len() as f64;
                let pos = (x - lo) / width;
                let bin = (pos as usize).min(counts.len() - 1);
                let below: u64 = counts[..bin].iter().sum();
                let frac = pos - bin as f64;
                (below as f64 + frac * counts[bin] as f64) / self.count as f64
            }
        }
    }

    /// Counts over `bins` equal-width bins on `[lo, hi]`; values outside
    /// are dropped and `hi` lands in the last bin.
    pub fn histogram(&self, lo: f64, hi: f64, bins: usize) -> Option<Vec<u64>> {
        self.sorted_samples().map(|v| bin_counts(v, lo, hi, bins))
    }
}

pub(crate) fn bin_counts(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins.max(1)];
    let width = (hi - lo) / bins as f64;
    for &v in values {
        if !(lo..=hi).contains(&v) {
            continue;
        }
        let b = if width > 0.0 { (((v - lo) / width) as usize).min(bins - 1) } else { 0 };
        counts[b] += 1;
    }
    counts
}
