//! End-to-end statistical checks of the whole pipeline against closed-form
//! laws, shared by the `validate` subcommand and the acceptance tests.
//!
//! Every check takes a sample-size scale: 1.0 runs at full size, smaller
//! values give quick smoke runs whose thresholds are unchanged.

use std::fmt;
use std::time::Instant;

use crate::analytic::{fcont_n2_closed_form, fmin_balanced_moment, fmin_balanced_variance};
use crate::error::Result;
use crate::experiments::{
    eigen_stats, estimate_conversion_probability, persistence_histogram, pi_distribution, pi_samples,
    rescaled_pi_distribution, ConversionEstimate, ExperimentConfig,
};
use crate::fitstats::{chi_square_gof, fit_power_law, ks_two_sample, total_variation, FitPoint, Window};
use crate::persistence::{sparre_andersen_pmf, ReferenceKind};
use crate::quadrature::integrate;
use crate::sampling::Method;
use crate::stats::bin_counts;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

impl CheckReport {
    fn new(id: u32, name: &'static str) -> Self {
        Self { id, name, passed: true, lines: Vec::new() }
    }

    fn record(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] criterion {:>2}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name)?;
        for line in &self.lines {
            writeln!(f, "        {line}")?;
        }
        Ok(())
    }
}

fn scaled(samples: usize, scale: f64) -> usize {
    ((samples as f64 * scale).round() as usize).max(100)
}

fn sigmas(a: &ConversionEstimate, b: &ConversionEstimate) -> f64 {
    (b.p_hat - a.p_hat) / (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
}

/// P(Π = 1) = 1/2 for n = 2 at any m, in under 10 s.
pub fn exact_n2_law(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(1, "exact n = 2 law P(Π = 1) = 1/2");
    let samples = scaled(100_000, scale);
    let start = Instant::now();
    for m in [2, 4, 8] {
        let est = estimate_conversion_probability(&ExperimentConfig::with_m(2, m, samples, seed + m as u64))?;
        let z = (est.p_hat - 0.5) / est.stderr;
        r.record(z.abs() <= 4.0, format!("m = {m}: p̂ = {:.5} ± {:.5} ({z:+.2}σ, M = {samples})", est.p_hat, est.stderr));
    }
    let secs = start.elapsed().as_secs_f64();
    r.record(secs < 10.0, format!("runtime {secs:.2} s (< 10 s)"));
    Ok(r)
}

/// χ² fit of the continuous part of Π at n = 2 to the polynomial densities.
pub fn n2_continuous_density(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(2, "n = 2 continuous density of Π (χ², 20 bins, level 0.01)");
    let samples = scaled(100_000, scale);
    const BINS: usize = 20;
    for m in [2u32, 3, 4] {
        let dist = pi_distribution(&ExperimentConfig::with_m(2, m as usize, samples, seed + m as u64))?;
        let cont = dist.continuous_samples().expect("exact storage");
        let observed = bin_counts(&cont, 0.0, 1.0, BINS);
        let expected = (0..BINS)
            .map(|i| {
                let (a, b) = (i as f64 / BINS as f64, (i + 1) as f64 / BINS as f64);
                integrate(|p| fcont_n2_closed_form(p, m).expect("m <= 4"), a, b, 1e-13)
            })
            .collect::<Result<Vec<f64>>>()?;
        let chi = chi_square_gof(&observed, &expected)?;
        r.record(
            chi.p_value >= 0.01,
            format!("m = {m}: χ² = {:.2} on {} dof, p = {:.4} (continuous count {})", chi.statistic, chi.dof, chi.p_value, cont.len()),
        );
    }
    Ok(r)
}

/// Mean and variance of the smallest eigenvalue at m = n.
pub fn smallest_eigenvalue_law(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(3, "smallest-eigenvalue moments at m = n");
    let samples = scaled(100_000, scale);
    for n in [2u32, 4, 8] {
        let stats = eigen_stats(&ExperimentConfig::with_m(n as usize, n as usize, samples, seed + n as u64))?;
        let mom = stats.smallest();
        let (mean, var) = (fmin_balanced_moment(1, n)?, fmin_balanced_variance(n)?);
        let zm = (mom.mean() - mean) / mom.stderr_mean();
        let zv = (mom.variance() - var) / mom.stderr_variance();
        r.record(zm.abs() <= 4.0, format!("n = {n}: mean {:.6e} vs 1/n³ = {mean:.6e} ({zm:+.2}σ)", mom.mean()));
        r.record(zv.abs() <= 4.0, format!("n = {n}: var {:.6e} vs {var:.6e} ({zv:+.2}σ)", mom.variance()));
    }
    Ok(r)
}

/// Tridiagonal and dense samplers agree on every order statistic.
pub fn oracle_equivalence(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(4, "tridiagonal vs dense sampler, per order statistic KS");
    let samples = scaled(100_000, scale);
    let cases = [(2usize, 2usize), (4, 6), (8, 8)];
    let tests: usize = cases.iter().map(|c| c.0).sum();
    let threshold = 0.001 / tests as f64;
    for (n, m) in cases {
        let tri = eigen_samples(&ExperimentConfig::with_m(n, m, samples, seed))?;
        let dense = eigen_samples(&ExperimentConfig::with_m(n, m, samples, seed + 1).method(Method::Dense))?;
        let mut worst = (1.0f64, 0.0f64);
        for k in 0..n {
            let ks = ks_two_sample(&tri[k], &dense[k])?;
            if ks.p_value < worst.0 {
                worst = (ks.p_value, ks.statistic);
            }
        }
        r.record(
            worst.0 >= threshold,
            format!("(n, m) = ({n}, {m}): smallest p = {:.4} (D = {:.5}), Bonferroni threshold {threshold:.2e}", worst.0, worst.1),
        );
    }
    Ok(r)
}

/// Per-index sorted samples of `λ↓_k`.
fn eigen_samples(cfg: &ExperimentConfig) -> Result<Vec<Vec<f64>>> {
    let resolved = cfg.resolve()?;
    let n = resolved.n;
    let parts = crate::experiments::map_chunks(&resolved, |chunk| {
        let mut cols = vec![Vec::with_capacity(chunk.len); n];
        for _ in 0..chunk.len {
            let s = chunk.spectrum()?;
            for (col, &v) in cols.iter_mut().zip(s.values()) {
                col.push(v);
            }
        }
        Ok(cols)
    })?;
    let mut cols = vec![Vec::with_capacity(resolved.samples); n];
    for part in parts {
        for (col, p) in cols.iter_mut().zip(part) {
            col.extend(p);
        }
    }
    for col in cols.iter_mut() {
        col.sort_by(f64::total_cmp);
    }
    Ok(cols)
}

/// Exchangeable bridges are uniform; the walk law has the right tail.
pub fn sparre_andersen_references(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(5, "Sparre Andersen reference laws");
    let samples = scaled(100_000, scale);
    let n = 32;
    let hist = persistence_histogram(&ExperimentConfig::with_m(n, n, samples, seed), false)?;
    let uniform = sparre_andersen_pmf(n, ReferenceKind::Bridge)?;
    let tv = total_variation(&hist.pmf(), &uniform);
    r.record(tv < 0.02, format!("unordered bridges, n = {n}: TV to uniform{{1..n}} = {tv:.4} (< 0.02)"));

    let walk = sparre_andersen_pmf(100, ReferenceKind::Walk)?;
    let total: f64 = walk.iter().sum();
    r.record((total - 1.0).abs() < 1e-12, format!("walk pmf, n = 100: Σ = {total:.15}"));
    let rel = walk[100] * (std::f64::consts::PI * 100.0).sqrt() - 1.0;
    r.record(rel.abs() < 0.005, format!("walk P(N = n) / (1/√(πn)) - 1 = {rel:.5} (|·| < 0.005)"));
    Ok(r)
}

fn persistence_fit(c: f64, ns: &[usize], samples: usize, seed: u64) -> Result<(Vec<FitPoint>, crate::fitstats::PowerLawFit)> {
    let mut points = Vec::new();
    for &n in ns {
        let est = estimate_conversion_probability(&ExperimentConfig::with_c(n, c, samples, seed + n as u64))?;
        points.push(FitPoint::new(n as f64, est.p_hat, est.stderr));
    }
    let fit = fit_power_law(&points, Window::Last(4))?;
    Ok((points, fit))
}

/// Persistence exponents at c = 2 and c = 1 on a reduced grid.
pub fn persistence_exponents(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(6, "persistence exponents θ (fit over the last 4 points)");
    let samples = scaled(20_000, scale);
    let ns = [32, 64, 128, 256];
    for (c, target, tol) in [(2.0, 0.418, 0.10), (1.0, 0.795, 0.15)] {
        let (points, fit) = persistence_fit(c, &ns, samples, seed)?;
        let ps: Vec<String> = points.iter().map(|p| format!("{:.4}", p.p_hat)).collect();
        r.record(
            (fit.theta - target).abs() <= tol,
            format!(
                "c = {c}: θ = {:.3} ± {:.3}, b = {:.3} ± {:.3} (target {target} ± {tol}); p̂ = [{}]",
                fit.theta,
                fit.theta_err,
                fit.b,
                fit.b_err,
                ps.join(", ")
            ),
        );
    }
    Ok(r)
}

/// Conversion probability grows with m at fixed n and decays with n at fixed c.
pub fn nielsen_trends(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(7, "monotone trends of P(conversion), 4σ separations");
    let samples = scaled(100_000, scale);
    let by_m = [4usize, 8, 16, 64]
        .iter()
        .map(|&m| estimate_conversion_probability(&ExperimentConfig::with_m(4, m, samples, seed + m as u64)))
        .collect::<Result<Vec<_>>>()?;
    for (w, ms) in by_m.windows(2).zip([(4, 8), (8, 16), (16, 64)]) {
        let z = sigmas(&w[0], &w[1]);
        r.record(z > 4.0, format!("n = 4, m {} → {}: {:.5} → {:.5} ({z:+.1}σ)", ms.0, ms.1, w[0].p_hat, w[1].p_hat));
    }
    let by_n = [8usize, 16, 32, 64]
        .iter()
        .map(|&n| estimate_conversion_probability(&ExperimentConfig::with_c(n, 2.0, samples, seed + 1000 + n as u64)))
        .collect::<Result<Vec<_>>>()?;
    for (w, ns) in by_n.windows(2).zip([(8, 16), (16, 32), (32, 64)]) {
        let z = -sigmas(&w[0], &w[1]);
        r.record(z > 4.0, format!("c = 2, n {} → {}: {:.5} → {:.5} ({z:+.1}σ decrease)", ns.0, ns.1, w[0].p_hat, w[1].p_hat));
    }
    Ok(r)
}

/// F(p) concentrates at p = 1 for c > 1.
pub fn concentration(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(8, "concentration of Π near 1 at c = 2");
    let samples = scaled(20_000, scale);
    let mut below = Vec::new();
    let mut mean_256 = 0.0;
    for n in [16usize, 64, 256] {
        let dist = pi_distribution(&ExperimentConfig::with_c(n, 2.0, samples, seed + n as u64))?;
        // P(Π < 0.9)
        let mass = dist.sorted_samples().expect("exact storage").partition_point(|&p| p < 0.9) as f64 / dist.count() as f64;
        below.push(mass);
        if n == 256 {
            mean_256 = dist.mean();
        }
    }
    r.record(
        below[0] > below[1] && below[1] > below[2],
        format!("P(Π < 0.9) at n = 16, 64, 256: {:.5}, {:.5}, {:.5}", below[0], below[1], below[2]),
    );
    r.record(mean_256 > 0.97, format!("E[Π] at n = 256: {mean_256:.5} (> 0.97)"));
    Ok(r)
}

/// Rescaling 1 - Π by the soft-edge factor collapses n = 64 onto n = 128.
pub fn scaling_collapse(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(9, "scaling collapse of 1 - Π at c = 2");
    let samples = scaled(50_000, scale);
    let cfg = |n| ExperimentConfig::with_c(n, 2.0, samples, seed + n as u64);
    let raw = |n| -> Result<Vec<f64>> {
        let mut v: Vec<f64> = pi_samples(&cfg(n))?.into_iter().map(|p| 1.0 - p).collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    };
    let (raw64, raw128) = (raw(64)?, raw(128)?);
    let d_raw = ks_two_sample(&raw64, &raw128)?.statistic;
    let r64 = rescaled_pi_distribution(&cfg(64))?;
    let r128 = rescaled_pi_distribution(&cfg(128))?;
    let d_scaled = ks_two_sample(r64.sorted_samples().expect("exact"), r128.sorted_samples().expect("exact"))?.statistic;
    r.record(
        d_scaled <= 0.5 * d_raw,
        format!("KS rescaled = {d_scaled:.4}, unrescaled = {d_raw:.4} (need rescaled <= half)"),
    );
    Ok(r)
}

/// Result files do not depend on the worker count.
pub fn determinism(scale: f64, seed: u64) -> Result<CheckReport> {
    let mut r = CheckReport::new(10, "bit-identical result files across worker counts");
    let samples = scaled(20_000, scale).to_string();
    let seed = seed.to_string();
    let root = std::env::temp_dir().join(format!("locc-determinism-{}-{}", std::process::id(), seed));
    let runs: [&[&str]; 5] = [
        &["convert-prob", "--n", "4,8", "--c", "1,2"],
        &["distribution", "--n", "6", "--m", "9"],
        &["distribution", "--n", "16", "--c", "2", "--rescale"],
        &["persistence", "--n", "12", "--c", "1"],
        &["eigstats", "--n", "10", "--m", "20"],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for workers in ["1", "2", "4"] {
            let dir = root.join(format!("{}-w{workers}", args.join("_").replace(['-', ','], "")));
            std::fs::create_dir_all(&dir)?;
            let mut argv = vec!["locc-lab".to_string(), "--quiet".to_string()];
            argv.extend(args.iter().map(|s| s.to_string()));
            argv.extend(
                ["--samples", &samples, "--seed", &seed, "--workers", workers, "--out", dir.to_str().expect("utf-8 path")]
                    .iter()
                    .map(|s| s.to_string()),
            );
            crate::cli::run(argv)?;
            outputs.push(read_results(&dir)?);
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        let files: Vec<&String> = outputs[0].iter().map(|(name, _)| name).collect();
        r.record(same && !files.is_empty(), format!("{}: {files:?} identical for workers 1, 2, 4", args[0]));
    }
    let _ = std::fs::remove_dir_all(&root);
    Ok(r)
}

/// Result files (not run metadata) in `dir`, sorted by name.
fn read_results(dir: &std::path::Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        if name.ends_with(".meta.json") {
            continue;
        }
        out.push((name, std::fs::read(&path)?));
    }
    out.sort();
    Ok(out)
}

pub type CheckFn = fn(f64, u64) -> Result<CheckReport>;

/// Every check in order, with its default seed.
pub fn all_checks() -> Vec<(u32, CheckFn, u64)> {
    vec![
        (1, exact_n2_law as CheckFn, 1001),
        (2, n2_continuous_density, 2002),
        (3, smallest_eigenvalue_law, 3003),
        (4, oracle_equivalence, 4004),
        (5, sparre_andersen_references, 5005),
        (6, persistence_exponents, 6006),
        (7, nielsen_trends, 7007),
        (8, concentration, 8008),
        (9, scaling_collapse, 9009),
        (10, determinism, 10010),
    ]
}
