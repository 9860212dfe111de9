//! Monte Carlo engines over independent pairs of random spectra.
//!
//! Work is cut into fixed-size chunks. Chunk `i` draws from the stream
//! `(seed, i)` and chunk results are merged in index order, so every output
//! is bit-identical whatever the worker count.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::analytic::scaling_factor;
use crate::error::{invalid_param, Result};
use crate::majorization::{pi_from_suffix_sums, suffix_sums_of, DEFAULT_TOL};
use crate::persistence::{build_bridge, occupation_count};
use crate::rng::{task_stream, StreamRng};
use crate::sampling::{Method, Spectrum, SpectrumSampler};
use crate::stats::{EmpiricalDistribution, Moments};

pub const DEFAULT_CHUNK: usize = 1024;

/// User-facing experiment parameters. Exactly one of `m` and `c` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: Option<usize>,
    pub c: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    /// 0 = all available threads, 1 = sequential.
    pub workers: usize,
    pub bins: usize,
    pub method: Method,
}

impl ExperimentConfig {
    pub fn with_m(n: usize, m: usize, samples: usize, seed: u64) -> Self {
        Self { n, m: Some(m), c: None, samples, seed, workers: 0, bins: 20, method: Method::Tridiagonal }
    }

    pub fn with_c(n: usize, c: f64, samples: usize, seed: u64) -> Self {
        Self { n, m: None, c: Some(c), samples, seed, workers: 0, bins: 20, method: Method::Tridiagonal }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn resolve(&self) -> Result<Resolved> {
        if self.n == 0 {
            return Err(invalid_param("n must be at least 1"));
        }
        if self.samples == 0 {
            return Err(invalid_param("samples must be at least 1"));
        }
        if self.bins < 2 {
            return Err(invalid_param("bins must be at least 2"));
        }
        let m = match (self.m, self.c) {
            (Some(m), None) => m,
            (None, Some(c)) => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(invalid_param(format!("c must be positive, got {c}")));
                }
                (c * self.n as f64).round() as usize
            }
            _ => return Err(invalid_param("exactly one of m and c must be given")),
        };
        if m == 0 {
            return Err(invalid_param("m must be at least 1"));
        }
        // Schmidt symmetry: the nonzero spectrum only depends on {n, m}.
        let (n, m) = if self.n <= m { (self.n, m) } else { (m, self.n) };
        Ok(Resolved {
            n,
            m,
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            method: self.method,
            chunk: DEFAULT_CHUNK,
        })
    }
}

/// Validated parameters with `n <= m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub method: Method,
    pub chunk: usize,
}

impl Resolved {
    pub fn c(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    fn chunks(&self) -> usize {
        self.samples.div_ceil(self.chunk)
    }

    fn chunk_len(&self, index: usize) -> usize {
        self.chunk.min(self.samples - index * self.chunk)
    }
}

/// Per-chunk state handed to the work closure.
pub struct Chunk {
    pub index: usize,
    pub len: usize,
    pub rng: StreamRng,
    pub sampler: SpectrumSampler,
}

impl Chunk {
    fn new(cfg: &Resolved, index: usize) -> Result<Self> {
        Ok(Self {
            index,
            len: cfg.chunk_len(index),
            rng: task_stream(cfg.seed, index as u64),
            sampler: SpectrumSampler::new(cfg.method, cfg.n, cfg.m)?,
        })
    }

    pub fn spectrum(&mut self) -> Result<Spectrum> {
        self.sampler.sample(&mut self.rng)
    }

    /// Draws `(x, y)` for one pair: `x` first, then `y`.
    pub fn pair(&mut self) -> Result<(Spectrum, Spectrum)> {
        let x = self.spectrum()?;
        let y = self.spectrum()?;
        Ok((x, y))
    }
}

/// Runs `work` on every chunk and returns the results in chunk order.
pub fn map_chunks<T, F>(cfg: &Resolved, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut Chunk) -> Result<T> + Sync + Send,
{
    let run = |i: usize| -> Result<T> {
        let mut chunk = Chunk::new(cfg, i)?;
        work(&mut chunk)
    };
    let chunks = cfg.chunks();

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if cfg.workers != 1 && chunks > 1 {
            let go = || (0..chunks).into_par_iter().map(run).collect::<Result<Vec<T>>>();
            return if cfg.workers == 0 {
                go()
            } else {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.workers)
                    .build()
                    .map_err(|e| crate::Error::Resource(format!("thread pool: {e}")))?
                    .install(go)
            };
        }
    }

    (0..chunks).map(run).collect()
}

fn pair_pi(x: &Spectrum, y: &Spectrum) -> f64 {
    pi_from_suffix_sums(&suffix_sums_of(x.values()), &suffix_sums_of(y.values()), DEFAULT_TOL)
}

/// Π for every pair, in generation order.
pub fn pi_samples(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let cfg = cfg.resolve()?;
    let parts = map_chunks(&cfg, |chunk| {
        (0..chunk.len)
            .map(|_| chunk.pair().map(|(x, y)| pair_pi(&x, &y)))
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(parts.concat())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionEstimate {
    pub successes: u64,
    pub samples: u64,
    pub p_hat: f64,
    pub stderr: f64,
}

impl ConversionEstimate {
    pub fn from_counts(successes: u64, samples: u64) -> Self {
        let p_hat = successes as f64 / samples as f64;
        let stderr = (p_hat * (1.0 - p_hat) / samples as f64).sqrt();
        Self { successes, samples, p_hat, stderr }
    }
}

/// Fraction of pairs with `Π = 1`, i.e. exactly convertible pairs.
pub fn estimate_conversion_probability(cfg: &ExperimentConfig) -> Result<ConversionEstimate> {
    let resolved = cfg.resolve()?;
    let counts = map_chunks(&resolved, |chunk| {
        let mut hits = 0u64;
        for _ in 0..chunk.len {
            let (x, y) = chunk.pair()?;
            hits += (pair_pi(&x, &y) == 1.0) as u64;
        }
        Ok(hits)
    })?;
    Ok(ConversionEstimate::from_counts(counts.iter().sum(), resolved.samples as u64))
}

/// Empirical law of Π with the atom at 1 tallied exactly.
pub fn pi_distribution(cfg: &ExperimentConfig) -> Result<EmpiricalDistribution> {
    Ok(EmpiricalDistribution::from_samples(pi_samples(cfg)?, Some(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Monte Carlo mean of Π.
pub fn mean_pi(cfg: &ExperimentConfig) -> Result<MeanEstimate> {
    let resolved = cfg.resolve()?;
    let parts = map_chunks(&resolved, |chunk| {
        let mut acc = Moments::new();
        for _ in 0..chunk.len {
            let (x, y) = chunk.pair()?;
            acc.push(pair_pi(&x, &y));
        }
        Ok(acc)
    })?;
    let mut total = Moments::new();
    parts.iter().for_each(|p| total.merge(p));
    Ok(MeanEstimate { mean: total.mean(), stderr: total.stderr_mean(), samples: total.count() })
}

/// Per-index moments of the ordered spectrum `λ↓_1 >= … >= λ↓_n`, from
/// `samples` independent spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigStats {
    pub n: usize,
    pub m: usize,
    pub moments: Vec<Moments>,
}

impl EigStats {
    pub fn mean(&self, k: usize) -> f64 {
        self.moments[k].mean()
    }

    pub fn variance(&self, k: usize) -> f64 {
        self.moments[k].variance()
    }

    pub fn relative_fluctuation(&self, k: usize) -> f64 {
        self.moments[k].relative_fluctuation()
    }

    /// Moments of the smallest component.
    pub fn smallest(&self) -> &Moments {
        &self.moments[self.n - 1]
    }
}

pub fn eigen_stats(cfg: &ExperimentConfig) -> Result<EigStats> {
    let resolved = cfg.resolve()?;
    let n = resolved.n;
    let parts = map_chunks(&resolved, |chunk| {
        let mut acc = vec![Moments::new(); n];
        for _ in 0..chunk.len {
            let s = chunk.spectrum()?;
            for (a, &v) in acc.iter_mut().zip(s.values()) {
                a.push(v);
            }
        }
        Ok(acc)
    })?;
    let mut moments = vec![Moments::new(); n];
    for part in &parts {
        for (a, b) in moments.iter_mut().zip(part) {
            a.merge(b);
        }
    }
    Ok(EigStats { n, m: resolved.m, moments })
}

/// Empirical law of `scaling_factor(n, c) · (1 - Π)`, atom at 0.
pub fn rescaled_pi_distribution(cfg: &ExperimentConfig) -> Result<EmpiricalDistribution> {
    let resolved = cfg.resolve()?;
    let factor = scaling_factor(resolved.n, resolved.c())?;
    let samples = pi_samples(cfg)?.into_iter().map(|p| factor * (1.0 - p)).collect();
    Ok(EmpiricalDistribution::from_samples(samples, Some(0.0)))
}

/// Histogram of the occupation time `N_n` over `{0, …, n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationHistogram {
    pub n: usize,
    pub ordered: bool,
    pub counts: Vec<u64>,
}

impl OccupationHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn pmf(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Occupation-time histogram of bridges built from sampled pairs.
///
/// Unordered bridges use each spectrum in a uniformly random order, drawn
/// from the chunk stream after both spectra of the pair.
pub fn persistence_histogram(cfg: &ExperimentConfig, ordered: bool) -> Result<OccupationHistogram> {
    let resolved = cfg.resolve()?;
    let n = resolved.n;
    let parts = map_chunks(&resolved, |chunk| {
        let mut counts = vec![0u64; n + 1];
        for _ in 0..chunk.len {
            let (x, y) = chunk.pair()?;
            let (mut xs, mut ys) = (x.into_vec(), y.into_vec());
            if !ordered {
                xs.shuffle(&mut chunk.rng);
                ys.shuffle(&mut chunk.rng);
            }
            let bridge = build_bridge(&xs, &ys, ordered)?;
            counts[occupation_count(&bridge, true).0] += 1;
        }
        Ok(counts)
    })?;
    let mut counts = vec![0u64; n + 1];
    for part in &parts {
        for (a, b) in counts.iter_mut().zip(part) {
            *a += b;
        }
    }
    Ok(OccupationHistogram { n, ordered, counts })
}

/// One row of a conversion-probability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub c: f64,
    pub samples: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub stderr: f64,
}

/// Conversion probability for every `n` in `ns` against every entry of
/// `partners`, each either an explicit `m` or a ratio `c`.
pub fn conversion_sweep(base: &ExperimentConfig, ns: &[usize], partners: &[Partner]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(ns.len() * partners.len());
    for &n in ns {
        for partner in partners {
            let mut cfg = base.clone();
            cfg.n = n;
            match *partner {
                Partner::M(m) => (cfg.m, cfg.c) = (Some(m), None),
                Partner::C(c) => (cfg.m, cfg.c) = (None, Some(c)),
            }
            let resolved = cfg.resolve()?;
            let est = estimate_conversion_probability(&cfg)?;
            rows.push(SweepRow {
                n: resolved.n,
                m: resolved.m,
                c: resolved.c(),
                samples: est.samples,
                successes: est.successes,
                p_hat: est.p_hat,
                stderr: est.stderr,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Partner {
    M(usize),
    C(f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_rules() {
        let r = ExperimentConfig::with_c(16, 2.0, 10, 1).resolve().unwrap();
        assert_eq!((r.n, r.m), (16, 32));
        let r = ExperimentConfig::with_m(8, 4, 10, 1).resolve().unwrap();
        assert_eq!((r.n, r.m), (4, 8));
        let r = ExperimentConfig::with_c(8, 0.5, 10, 1).resolve().unwrap();
        assert_eq!((r.n, r.m), (4, 8));

        let mut bad = ExperimentConfig::with_m(4, 4, 10, 1);
        bad.c = Some(2.0);
        assert!(bad.resolve().is_err());
        assert!(ExperimentConfig::with_m(4, 4, 0, 1).resolve().is_err());
        assert!(ExperimentConfig::with_m(0, 4, 10, 1).resolve().is_err());
        let mut bad = ExperimentConfig::with_m(4, 4, 10, 1);
        bad.bins = 1;
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn chunk_layout_covers_samples() {
        let r = ExperimentConfig::with_m(2, 2, 2500, 1).resolve().unwrap();
        assert_eq!(r.chunks(), 3);
        assert_eq!((0..3).map(|i| r.chunk_len(i)).sum::<usize>(), 2500);
        assert_eq!(r.chunk_len(2), 452);
    }

    #[test]
    fn n_one_always_converts() {
        let cfg = ExperimentConfig::with_m(1, 5, 3000, 3);
        let est = estimate_conversion_probability(&cfg).unwrap();
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(mean_pi(&cfg).unwrap().mean, 1.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let base = ExperimentConfig::with_c(6, 1.5, 5000, 99);
        let seq = pi_samples(&base.clone().workers(1)).unwrap();
        for w in [0, 2, 3] {
            assert_eq!(seq, pi_samples(&base.clone().workers(w)).unwrap());
        }
        let a = eigen_stats(&base.clone().workers(1)).unwrap();
        let b = eigen_stats(&base.clone().workers(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shared_samples_agree() {
        let cfg = ExperimentConfig::with_c(5, 1.0, 4000, 17);
        let est = estimate_conversion_probability(&cfg).unwrap();
        let dist = pi_distribution(&cfg).unwrap();
        assert_eq!(dist.atom_count(), est.successes);
        assert_eq!(dist.atom_count() + (dist.count() - dist.atom_count()), dist.count());
        let hist = persistence_histogram(&cfg, true).unwrap();
        assert_eq!(hist.counts[5], est.successes);
        assert_eq!(hist.total(), 4000);
        let rescaled = rescaled_pi_distribution(&cfg).unwrap();
        assert_eq!(rescaled.atom_count(), est.successes);
        let mean = mean_pi(&cfg).unwrap();
        assert!((mean.mean - dist.mean()).abs() < 1e-12);
    }

    #[test]
    fn unordered_bridges_never_hit_zero_count() {
        let cfg = ExperimentConfig::with_m(6, 6, 2000, 5);
        let hist = persistence_histogram(&cfg, false).unwrap();
        assert_eq!(hist.counts[0], 0);
        assert_eq!(hist.total(), 2000);
    }

    #[test]
    fn pi_values_in_unit_interval() {
        let cfg = ExperimentConfig::with_m(3, 4, 3000, 8);
        assert!(pi_samples(&cfg).unwrap().iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn sweep_rows() {
        let base = ExperimentConfig::with_m(2, 2, 500, 4);
        let rows = conversion_sweep(&base, &[2, 3], &[Partner::M(4), Partner::C(2.0)]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[1].n, rows[1].m), (2, 4));
        assert_eq!((rows[3].n, rows[3].m), (3, 6));
    }
}
