//! Closed-form laws for spectra of random pure states.
//!
//! These serve as oracles for the Monte Carlo engines and as direct outputs
//! of the `exact` subcommand. Gamma-function ratios are evaluated in the log
//! domain so that parameters in the thousands stay finite.

use std::f64::consts::{LN_2, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid_input, invalid_param, Error, Result};
use crate::quadrature::integrate;

/// Absolute accuracy requested from quadrature-backed densities.
pub const QUAD_TOL: f64 = 1e-10;

fn ln_q2m_prefactor(m: u32) -> f64 {
    let m = m as f64;
    ln_gamma(2.0 * m) - ln_gamma(m) - ln_gamma(m - 1.0)
}

fn check_m(m: u32) -> Result<()> {
    if m < 2 {
        return Err(invalid_param(format!("m must be at least 2, got {m}")));
    }
    Ok(())
}

#[inline]
fn q2m_unchecked(s: f64, m: u32, ln_prefactor: f64) -> f64 {
    if !(0.0..=0.5).contains(&s) {
        return 0.0;
    }
    let t = 1.0 - 2.0 * s;
    ln_prefactor.exp() * (s - s * s).powi(m as i32 - 2) * t * t
}

/// Density of the smaller Schmidt coefficient for `n = 2`, on `[0, 1/2]`.
pub fn q2m_density(s: f64, m: u32) -> Result<f64> {
    check_m(m)?;
    Ok(q2m_unchecked(s, m, ln_q2m_prefactor(m)))
}

/// Distribution function of [`q2m_density`].
pub fn q2m_cdf(s: f64, m: u32) -> Result<f64> {
    check_m(m)?;
    if s <= 0.0 {
        return Ok(0.0);
    }
    if s >= 0.5 {
        return Ok(1.0);
    }
    let lp = ln_q2m_prefactor(m);
    let v = integrate(|t| q2m_unchecked(t, m, lp), 0.0, s, QUAD_TOL)?;
    Ok(v.clamp(0.0, 1.0))
}

/// Continuous part of the density of Π for `n = 2`:
/// `∫_0^{1/2} x q(x) q(p x) dx`. Integrates to 1/2 over `[0, 1]`; the
/// other half sits as an atom at `p = 1`.
pub fn fcont_n2(p: f64, m: u32) -> Result<f64> {
    check_m(m)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid_input(format!("p must lie in [0, 1], got {p}")));
    }
    let lp = ln_q2m_prefactor(m);
    integrate(|x| x * q2m_unchecked(x, m, lp) * q2m_unchecked(p * x, m, lp), 0.0, 0.5, QUAD_TOL)
}

/// Known polynomial forms of [`fcont_n2`] for small `m`.
pub fn fcont_n2_closed_form(p: f64, m: u32) -> Option<f64> {
    match m {
        2 => Some(3.0 / 20.0 * (p * p - 4.0 * p + 5.0)),
        3 => Some(-5.0 / 224.0 * p * (13.0 * p.powi(3) - 80.0 * p * p + 165.0 * p - 120.0)),
        4 => Some(
            105.0 / 36608.0
                * p
                * p
                * (139.0 * p.powi(4) - 1148.0 * p.powi(3) + 3549.0 * p * p - 4888.0 * p + 2574.0),
        ),
        _ => None,
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(invalid_param(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

/// Density of the smallest eigenvalue for balanced bipartitions (`m = n`):
/// `n(n² - 1)(1 - n x)^{n² - 2}` on `[0, 1/n]`.
pub fn fmin_balanced_density(x: f64, n: u32) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    if !(0.0..=1.0 / nf).contains(&x) {
        return Ok(0.0);
    }
    let n2 = nf * nf;
    Ok(nf * (n2 - 1.0) * (1.0 - nf * x).powf(n2 - 2.0))
}

/// `P(λ_min <= x)` for `m = n`, i.e. `1 - (1 - n x)^{n² - 1}`.
pub fn fmin_balanced_cdf(x: f64, n: u32) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 / nf {
        return Ok(1.0);
    }
    Ok(1.0 - (1.0 - nf * x).powf(nf * nf - 1.0))
}

/// `E[λ_min^k] = Γ(n²) Γ(k+1) / (n^k Γ(n² + k))` for `m = n`.
pub fn fmin_balanced_moment(k: i64, n: u32) -> Result<f64> {
    check_n(n)?;
    if k < 0 {
        return Err(invalid_param(format!("moment order must be nonnegative, got {k}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let n2 = nf * nf;
    Ok((ln_gamma(n2) + ln_gamma(kf + 1.0) - kf * nf.ln() - ln_gamma(n2 + kf)).exp())
}

/// `Var[λ_min] = (n² - 1) / (n⁶ (n² + 1))` for `m = n`.
pub fn fmin_balanced_variance(n: u32) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    let n2 = nf * nf;
    Ok((n2 - 1.0) / (n2 + 1.0) / n2.powi(3))
}

/// Support `[a, b]` of the Marčenko–Pastur law with ratio `c = m/n`.
pub fn marchenko_pastur_edges(c: f64) -> Result<(f64, f64)> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid_param(format!("c must be >= 1, got {c}")));
    }
    let r = 1.0 / c.sqrt();
    Ok(((1.0 - r).powi(2), (1.0 + r).powi(2)))
}

/// Limiting density of `n λ`: `(c / 2πx) √((x - a)(b - x))` on `[a, b]`.
pub fn marchenko_pastur_density(x: f64, c: f64) -> Result<f64> {
    let (a, b) = marchenko_pastur_edges(c)?;
    if x == 0.0 && a == 0.0 {
        return Err(Error::Pole(0.0));
    }
    if x < a || x > b {
        return Ok(0.0);
    }
    Ok(c / (2.0 * PI * x) * ((x - a) * (b - x)).max(0.0).sqrt())
}

/// `E[λ_min] / sd[λ_min]` to leading order: 1 at the hard edge (`c = 1`),
/// `c^{1/6} |1 - √c|^{2/3} n^{2/3}` at the soft edge.
pub fn scaling_factor(n: usize, c: f64) -> Result<f64> {
    if n < 1 {
        return Err(invalid_param("n must be at least 1"));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid_param(format!("c must be >= 1 (map c to 1/c first), got {c}")));
    }
    if c == 1.0 {
        return Ok(1.0);
    }
    Ok(c.powf(1.0 / 6.0) * (1.0 - c.sqrt()).abs().powf(2.0 / 3.0) * (n as f64).powf(2.0 / 3.0))
}

/// Centering `n a` and scale `b n^{1/3}` of the soft-edge smallest Wishart
/// eigenvalue, with `a = (1 - √c)²` and `b = |1 - √c|^{4/3} / c^{1/6}`.
pub fn soft_edge_constants(n: usize, c: f64) -> Result<(f64, f64)> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(invalid_param(format!("soft edge needs c > 1, got {c}")));
    }
    let nf = n as f64;
    let a = (1.0 - c.sqrt()).powi(2);
    let b = (1.0 - c.sqrt()).abs().powf(4.0 / 3.0) / c.powf(1.0 / 6.0);
    Ok((nf * a, b * nf.cbrt()))
}

/// Log normalization constants of the fixed-trace (`c_{n,m}`) and the
/// unconstrained (`C_{n,m}`) Laguerre eigenvalue densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreConstants {
    pub log_fixed_trace: f64,
    pub log_wishart: f64,
}

pub fn laguerre_log_constants(n: usize, m: usize) -> Result<LaguerreConstants> {
    if n < 1 || m < n {
        return Err(invalid_param(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
    }
    let (nf, mf) = (n as f64, m as f64);
    let denom: f64 = (1..=n)
        .map(|j| {
            let j = j as f64;
            ln_gamma(j + 1.0) + ln_gamma(mf - nf + j)
        })
        .sum();
    Ok(LaguerreConstants {
        log_fixed_trace: ln_gamma(nf * mf) - denom,
        log_wishart: -nf * mf * LN_2 - denom,
    })
}

/// The closed-form densities, addressable by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensitySpec {
    Q2m { m: u32 },
    Fcont2m { m: u32 },
    FminBalanced { n: u32 },
    MarchenkoPastur { c: f64 },
}

impl DensitySpec {
    pub fn support(&self) -> Result<(f64, f64)> {
        Ok(match *self {
            Self::Q2m { .. } => (0.0, 0.5),
            Self::Fcont2m { .. } => (0.0, 1.0),
            Self::FminBalanced { n } => (0.0, 1.0 / n as f64),
            Self::MarchenkoPastur { c } => marchenko_pastur_edges(c)?,
        })
    }

    /// Total mass over the support.
    pub fn mass(&self) -> f64 {
        match self {
            Self::Fcont2m { .. } => 0.5,
            _ => 1.0,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Q2m { m } => q2m_density(x, m),
            Self::Fcont2m { m } => {
                if (0.0..=1.0).contains(&x) {
                    fcont_n2(x, m)
                } else {
                    check_m(m).map(|_| 0.0)
                }
            }
            Self::FminBalanced { n } => fmin_balanced_density(x, n),
            Self::MarchenkoPastur { c } => marchenko_pastur_density(x, c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q2m_values() {
        assert!((q2m_density(0.0, 2).unwrap() - 6.0).abs() < 1e-12);
        assert!((q2m_density(0.1, 2).unwrap() - 6.0 * 0.64).abs() < 1e-12);
        for m in 2..30 {
            assert_eq!(q2m_density(0.5, m).unwrap(), 0.0);
            assert_eq!(q2m_density(0.7, m).unwrap(), 0.0);
        }
        assert!(q2m_density(0.2, 1).is_err());
    }

    #[test]
    fn q2m_normalized() {
        for m in 2..=20 {
            let mass = integrate(|s| q2m_density(s, m).unwrap(), 0.0, 0.5, 1e-12).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "m = {m}: {mass}");
        }
    }

    #[test]
    fn q2m_cdf_matches_closed_form_at_m2() {
        for s in [0.05, 0.1, 0.25, 0.4] {
            let exact = 1.0 - (1.0f64 - 2.0 * s).powi(3);
            assert!((q2m_cdf(s, 2).unwrap() - exact).abs() < 1e-10);
        }
        assert!((q2m_cdf(0.25, 2).unwrap() - 7.0 / 8.0).abs() < 1e-10);
    }

    #[test]
    fn fcont_matches_polynomials() {
        assert!((fcont_n2(0.0, 2).unwrap() - 0.75).abs() < 1e-10);
        assert!((fcont_n2(1.0, 2).unwrap() - 0.3).abs() < 1e-10);
        assert!((fcont_n2(0.5, 2).unwrap() - 0.4875).abs() < 1e-10);
        for m in 2..=4 {
            for p in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
                let quad = fcont_n2(p, m).unwrap();
                let poly = fcont_n2_closed_form(p, m).unwrap();
                assert!((quad - poly).abs() < 1e-8, "m = {m}, p = {p}: {quad} vs {poly}");
            }
        }
        assert!(fcont_n2(1.2, 2).is_err());
        assert!(fcont_n2_closed_form(0.5, 5).is_none());
    }

    #[test]
    fn fcont_has_half_mass() {
        for m in 2..=10 {
            let mass = integrate(|p| fcont_n2(p, m).unwrap(), 0.0, 1.0, 1e-9).unwrap();
            assert!((mass - 0.5).abs() < 1e-8, "m = {m}: {mass}");
        }
    }

    #[test]
    fn fcont_concentrates_near_one() {
        let top = |m| integrate(|p| fcont_n2(p, m).unwrap(), 0.9, 1.0, 1e-9).unwrap();
        let masses: Vec<f64> = [8, 16, 32].into_iter().map(top).collect();
        assert!(masses[0] < masses[1] && masses[1] < masses[2], "{masses:?}");
    }

    #[test]
    fn fmin_moments() {
        assert!((fmin_balanced_moment(1, 2).unwrap() - 0.125).abs() < 1e-14);
        assert!((fmin_balanced_moment(0, 5).unwrap() - 1.0).abs() < 1e-13);
        assert!((fmin_balanced_variance(2).unwrap() - 3.0 / 320.0).abs() < 1e-16);
        for n in 2..=10u32 {
            let nf = n as f64;
            let m1 = fmin_balanced_moment(1, n).unwrap();
            let m2 = fmin_balanced_moment(2, n).unwrap();
            assert!((m1 * nf.powi(3) - 1.0).abs() < 1e-12);
            let var = fmin_balanced_variance(n).unwrap();
            assert!(((m2 - m1 * m1) / var - 1.0).abs() < 1e-9);
        }
        assert!(fmin_balanced_moment(-1, 3).is_err());
    }

    #[test]
    fn fmin_density_normalized_and_consistent() {
        for n in 2..=10u32 {
            let hi = 1.0 / n as f64;
            let mass = integrate(|x| fmin_balanced_density(x, n).unwrap(), 0.0, hi, 1e-12).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "n = {n}: {mass}");
            let mean = integrate(|x| x * fmin_balanced_density(x, n).unwrap(), 0.0, hi, 1e-14).unwrap();
            assert!((mean - fmin_balanced_moment(1, n).unwrap()).abs() < 1e-12);
            let part = integrate(|x| fmin_balanced_density(x, n).unwrap(), 0.0, 0.3 * hi, 1e-12).unwrap();
            assert!((part - fmin_balanced_cdf(0.3 * hi, n).unwrap()).abs() < 1e-10);
        }
        assert_eq!(fmin_balanced_density(0.6, 2).unwrap(), 0.0);
        assert_eq!(fmin_balanced_density(-0.1, 2).unwrap(), 0.0);
    }

    #[test]
    fn fmin_exponential_limit() {
        let n = 32u32;
        let n3 = (n as f64).powi(3);
        for x in [0.5, 1.0, 2.0] {
            let tail = 1.0 - fmin_balanced_cdf(x / n3, n).unwrap();
            assert!((tail - (-x).exp()).abs() < 0.01, "x = {x}: {tail}");
        }
    }

    #[test]
    fn marchenko_pastur_values() {
        assert_eq!(marchenko_pastur_edges(1.0).unwrap(), (0.0, 4.0));
        assert_eq!(marchenko_pastur_edges(4.0).unwrap(), (0.25, 2.25));
        assert!((marchenko_pastur_density(2.0, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(matches!(marchenko_pastur_density(0.0, 1.0), Err(Error::Pole(_))));
        assert_eq!(marchenko_pastur_density(0.0, 4.0).unwrap(), 0.0);
        assert_eq!(marchenko_pastur_density(3.0, 4.0).unwrap(), 0.0);
        assert!(marchenko_pastur_density(1.0, 0.5).is_err());
    }

    #[test]
    fn marchenko_pastur_normalized() {
        for c in [1.0, 1.5, 2.0, 5.0] {
            let (a, b) = marchenko_pastur_edges(c).unwrap();
            let mass = integrate(|x| marchenko_pastur_density(x, c).unwrap(), a, b, 1e-10).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "c = {c}: {mass}");
        }
    }

    #[test]
    fn scaling_factor_values() {
        assert_eq!(scaling_factor(1, 1.0).unwrap(), 1.0);
        assert_eq!(scaling_factor(500, 1.0).unwrap(), 1.0);
        assert!((scaling_factor(1, 4.0).unwrap() - 2f64.cbrt()).abs() < 1e-14);
        // 2^{1/6} (√2 - 1)^{2/3} · 16
        let expected = 2f64.powf(1.0 / 6.0) * (2f64.sqrt() - 1.0).powf(2.0 / 3.0) * 16.0;
        let got = scaling_factor(64, 2.0).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 9.979_478_764_832).abs() < 1e-9, "{got}");
        assert!(scaling_factor(10, 0.5).is_err());
        assert!(scaling_factor(0, 2.0).is_err());
    }

    #[test]
    fn laguerre_constants() {
        let k = laguerre_log_constants(1, 1).unwrap();
        assert!(k.log_fixed_trace.abs() < 1e-14);
        let k = laguerre_log_constants(2, 2).unwrap();
        assert!((k.log_fixed_trace.exp() - 3.0).abs() < 1e-12);
        for (n, m) in [(2, 2), (4, 8), (8, 8), (30, 400)] {
            let k = laguerre_log_constants(n, m).unwrap();
            let nm = (n * m) as f64;
            let rhs = k.log_wishart + nm * LN_2 + ln_gamma(nm);
            assert!((k.log_fixed_trace - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
        // 2 c_{2,m} is the prefactor of q_{2,m}.
        for m in 2..12u32 {
            let k = laguerre_log_constants(2, m as usize).unwrap();
            assert!((k.log_fixed_trace + LN_2 - ln_q2m_prefactor(m)).abs() < 1e-10);
        }
        assert!(laguerre_log_constants(3, 2).is_err());
    }

    #[test]
    fn soft_edge() {
        let (center, scale) = soft_edge_constants(64, 4.0).unwrap();
        assert!((center - 64.0).abs() < 1e-12);
        assert!((scale - 4.0 / 4f64.powf(1.0 / 6.0)).abs() < 1e-12);
        assert!(soft_edge_constants(64, 1.0).is_err());
    }

    #[test]
    fn density_specs() {
        let specs = [
            DensitySpec::Q2m { m: 3 },
            DensitySpec::Fcont2m { m: 3 },
            DensitySpec::FminBalanced { n: 4 },
            DensitySpec::MarchenkoPastur { c: 2.0 },
        ];
        for spec in specs {
            let (a, b) = spec.support().unwrap();
            let mass = integrate(|x| spec.eval(x).unwrap(), a, b, 1e-9).unwrap();
            assert!((mass - spec.mass()).abs() < 1e-8, "{spec:?}: {mass}");
            assert!(spec.eval(0.5 * (a + b)).unwrap() >= 0.0);
        }
    }
}
