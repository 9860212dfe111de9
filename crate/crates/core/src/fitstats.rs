//! Power-law fits of persistence decay and the goodness-of-fit tests used
//! throughout validation.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid_input, Result};

/// One measured point `(n, p̂ ± stderr)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub n: f64,
    pub p_hat: f64,
    pub stderr: f64,
}

impl FitPoint {
    pub fn new(n: f64, p_hat: f64, stderr: f64) -> Self {
        Self { n, p_hat, stderr }
    }
}

/// Which points (sorted by `n`) enter the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    All,
    Last(usize),
}

impl Default for Window {
    fn default() -> Self {
        Window::Last(4)
    }
}

/// `p ≈ b / n^θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub theta: f64,
    pub b: f64,
    pub theta_err: f64,
    pub b_err: f64,
    pub fit_window: Vec<f64>,
    /// `√(Σ wᵢ rᵢ²)` of the log-space residuals.
    pub residual_norm: f64,
}

fn select(points: &[FitPoint], window: Window) -> Result<Vec<FitPoint>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.n.total_cmp(&b.n));
    if let Window::Last(k) = window {
        let start = pts.len().saturating_sub(k);
        pts.drain(..start);
    }
    if pts.len() < 2 {
        return Err(invalid_input("a power-law fit needs at least 2 points"));
    }
    for p in &pts {
        if !(p.p_hat > 0.0) {
            return Err(invalid_input(format!("p_hat must be positive for a log fit, got {} at n = {}", p.p_hat, p.n)));
        }
        if !(p.n > 0.0) {
            return Err(invalid_input(format!("n must be positive, got {}", p.n)));
        }
        if !(p.stderr > 0.0 && p.stderr.is_finite()) {
            return Err(invalid_input(format!("stderr must be positive, got {} at n = {}", p.stderr, p.n)));
        }
    }
    Ok(pts)
}

struct LineFit {
    intercept: f64,
    slope: f64,
    var_intercept: f64,
    var_slope: f64,
    residual_norm: f64,
}

fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> LineFit {
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(x, w)| w * x).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(y, w)| w * y).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - xm) * (x - xm)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((x, y), w)| w * (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residual_norm = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((x, y), w)| {
            let r = y - intercept - slope * x;
            w * r * r
        })
        .sum::<f64>()
        .sqrt();
    LineFit {
        intercept,
        slope,
        var_slope: 1.0 / sxx,
        var_intercept: 1.0 / sw + xm * xm / sxx,
        residual_norm,
    }
}

fn log_space(pts: &[FitPoint]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let x = pts.iter().map(|p| p.n.ln()).collect();
    let y = pts.iter().map(|p| p.p_hat.ln()).collect();
    // Var(log p̂) ≈ (stderr / p̂)²
    let w = pts.iter().map(|p| (p.p_hat / p.stderr).powi(2)).collect();
    (x, y, w)
}

/// Weighted least squares of `log p̂ = log b - θ log n` over `window`.
/// Errors come from the weighted normal equations, `b_err` by the delta
/// method.
pub fn fit_power_law(points: &[FitPoint], window: Window) -> Result<PowerLawFit> {
    let pts = select(points, window)?;
    let (x, y, w) = log_space(&pts);
    let line = weighted_line(&x, &y, &w);
    let b = line.intercept.exp();
    Ok(PowerLawFit {
        theta: -line.slope,
        b,
        theta_err: line.var_slope.sqrt(),
        b_err: b * line.var_intercept.sqrt(),
        fit_window: pts.iter().map(|p| p.n).collect(),
        residual_norm: line.residual_norm,
    })
}

/// Parametric bootstrap of the fit errors: each replicate perturbs
/// `log p̂ᵢ` by Gaussian noise of scale `stderrᵢ / p̂ᵢ` and refits.
/// Returns `(theta_err, b_err)`.
pub fn bootstrap_errors(points: &[FitPoint], window: Window, replicates: usize, seed: u64) -> Result<(f64, f64)> {
    if replicates < 2 {
        return Err(invalid_input("bootstrap needs at least 2 replicates"));
    }
    let pts = select(points, window)?;
    let (x, y, w) = log_space(&pts);
    let noise: Vec<Normal<f64>> = w
        .iter()
        .map(|w| Normal::new(0.0, 1.0 / w.sqrt()).expect("finite positive scale"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut thetas, mut bs) = (Vec::with_capacity(replicates), Vec::with_capacity(replicates));
    let mut yb = y.clone();
    for _ in 0..replicates {
        for (i, v) in yb.iter_mut().enumerate() {
            *v = y[i] + noise[i].sample(&mut rng);
        }
        let line = weighted_line(&x, &yb, &w);
        thetas.push(-line.slope);
        bs.push(line.intercept.exp());
    }
    Ok((std_dev(&thetas), std_dev(&bs)))
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (-1)^{j-1} e^{-2j²λ²}`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(statistic: f64, effective_n: f64) -> f64 {
    let root = effective_n.sqrt();
    kolmogorov_sf((root + 0.12 + 0.11 / root) * statistic)
}

fn check_sorted(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(invalid_input(format!("{what} is empty")));
    }
    if v.windows(2).any(|w| w[0] > w[1]) || v.iter().any(|x| x.is_nan()) {
        return Err(invalid_input(format!("{what} must be sorted ascending")));
    }
    Ok(())
}

/// One-sample Kolmogorov–Smirnov test of an ascending sample against `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<KsResult> {
    check_sorted(sorted, "sample")?;
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n) })
}

/// Two-sample Kolmogorov–Smirnov test on ascending samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    check_sorted(a, "first sample")?;
    check_sorted(b, "second sample")?;
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let (naf, nbf) = (na as f64, nb as f64);
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, naf * nbf / (naf + nbf)) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson χ² test of `observed` counts against cell probabilities
/// `expected` (which are renormalized). `dof = cells - 1`.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(invalid_input("need matching observed/expected cells, at least 2"));
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(invalid_input("expected cell probabilities must be positive"));
    }
    let total: u64 = observed.iter().sum();
    let norm: f64 = expected.iter().sum();
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let e = e / norm * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    Ok(ChiSquareResult { statistic, dof, p_value: dist.sf(statistic) })
}

/// `½ Σ |p - q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::{arcsine_cdf, sparre_andersen_pmf, ReferenceKind};
    use crate::rng::task_stream;
    use rand::Rng;

    fn exact(b: f64, theta: f64, ns: &[f64]) -> Vec<FitPoint> {
        ns.iter()
            .map(|&n| {
                let p = b * n.powf(-theta);
                FitPoint::new(n, p, 0.01 * p)
            })
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let pts = exact(0.5, 0.4, &[64.0, 128.0, 256.0, 512.0]);
        let fit = fit_power_law(&pts, Window::default()).unwrap();
        assert!((fit.theta - 0.4).abs() < 1e-12);
        assert!((fit.b - 0.5).abs() < 1e-12);
        assert!(fit.residual_norm < 1e-10);
        assert_eq!(fit.fit_window, vec![64.0, 128.0, 256.0, 512.0]);
    }

    #[test]
    fn bridge_persistence_law() {
        let pts: Vec<FitPoint> = [8.0, 16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&n: &f64| FitPoint::new(n, 1.0 / n, 0.05 / n))
            .collect();
        let fit = fit_power_law(&pts, Window::Last(4)).unwrap();
        assert!((fit.theta - 1.0).abs() < 1e-12);
        assert!((fit.b - 1.0).abs() < 1e-12);
        assert_eq!(fit.fit_window, vec![16.0, 32.0, 64.0, 128.0]);
    }

    #[test]
    fn walk_persistence_law() {
        let pts: Vec<FitPoint> = [256usize, 512, 1024, 2048]
            .iter()
            .map(|&n| {
                let p = sparre_andersen_pmf(n, ReferenceKind::Walk).unwrap()[n];
                FitPoint::new(n as f64, p, 0.01 * p)
            })
            .collect();
        let fit = fit_power_law(&pts, Window::All).unwrap();
        assert!((fit.theta - 0.5).abs() < 0.02);
        assert!((fit.b - 1.0 / std::f64::consts::PI.sqrt()).abs() < 0.02);
    }

    #[test]
    fn scale_equivariance_and_window_shift() {
        let pts = exact(0.3, 0.7, &[10.0, 20.0, 40.0, 80.0, 160.0, 320.0]);
        let fit = fit_power_law(&pts, Window::Last(4)).unwrap();
        let scaled: Vec<FitPoint> = pts.iter().map(|p| FitPoint::new(p.n, 5.0 * p.p_hat, 5.0 * p.stderr)).collect();
        let fit_s = fit_power_law(&scaled, Window::Last(4)).unwrap();
        assert!((fit_s.theta - fit.theta).abs() < 1e-12);
        assert!((fit_s.b - 5.0 * fit.b).abs() < 1e-12);
        let fit_all = fit_power_law(&pts, Window::All).unwrap();
        let fit_first = fit_power_law(&pts[..3], Window::All).unwrap();
        for f in [&fit_all, &fit_first] {
            assert!((f.theta - fit.theta).abs() < 1e-12 && (f.b - fit.b).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_errors() {
        let pts = exact(0.5, 0.4, &[64.0, 128.0]);
        assert!(fit_power_law(&pts[..1], Window::All).is_err());
        let mut bad = pts.clone();
        bad[1].p_hat = 0.0;
        assert!(matches!(fit_power_law(&bad, Window::All), Err(crate::Error::InvalidInput(_))));
    }

    #[test]
    fn error_bars_agree_with_bootstrap() {
        let mut rng = task_stream(61, 0);
        let pts: Vec<FitPoint> = [32.0, 64.0, 128.0, 256.0]
            .iter()
            .map(|&n: &f64| {
                let p = 0.35 * n.powf(-0.42);
                let se = 0.04 * p;
                FitPoint::new(n, p * (1.0 + 0.04 * (rng.random::<f64>() - 0.5)), se)
            })
            .collect();
        let fit = fit_power_law(&pts, Window::default()).unwrap();
        let (theta_err, b_err) = bootstrap_errors(&pts, Window::default(), 4000, 3).unwrap();
        assert!((theta_err / fit.theta_err - 1.0).abs() < 0.1, "{theta_err} vs {}", fit.theta_err);
        assert!((b_err / fit.b_err - 1.0).abs() < 0.15, "{b_err} vs {}", fit.b_err);
    }

    #[test]
    fn ks_identical_samples() {
        let v = vec![0.1, 0.4, 0.4, 0.9];
        assert_eq!(ks_two_sample(&v, &v).unwrap().statistic, 0.0);
        assert!(ks_two_sample(&[], &v).is_err());
        assert!(ks_one_sample(&[0.5, 0.1], |x| x).is_err());
    }

    #[test]
    fn ks_calibration_under_null() {
        let m = 100_000;
        let mut rejections = 0;
        for seed in 0..20 {
            let mut rng = task_stream(62, seed);
            let mut v: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            v.sort_by(f64::total_cmp);
            let ks = ks_one_sample(&v, |x| x.clamp(0.0, 1.0)).unwrap();
            if ks.statistic >= 1.95 / (m as f64).sqrt() {
                rejections += 1;
            }
        }
        assert_eq!(rejections, 0);
    }

    #[test]
    fn ks_detects_arcsine_vs_uniform() {
        let mut rng = task_stream(63, 0);
        let mut v: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        v.sort_by(f64::total_cmp);
        let ks = ks_one_sample(&v, |t| arcsine_cdf(t.clamp(0.0, 1.0)).unwrap()).unwrap();
        assert!(ks.statistic > 0.05);
        assert!(ks.p_value < 1e-6);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Q(1.3581) ≈ 0.05, Q(1.6276) ≈ 0.01
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn chi_square_basics() {
        let r = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let r = chi_square_gof(&[90, 10], &[0.5, 0.5]).unwrap();
        assert!((r.statistic - 64.0).abs() < 1e-12);
        assert!(r.p_value < 1e-10);
        assert!(chi_square_gof(&[1, 2], &[0.5]).is_err());
    }

    #[test]
    fn tv_distance() {
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!((total_variation(&[1.0, 0.0], &[0.25, 0.75]) - 0.75).abs() < 1e-15);
    }
}
