//! The bridge process `S_k = Σ_{j<=k} (y_j - x_j)` built from two spectra,
//! its occupation time, and the Sparre Andersen reference laws.

use std::f64::consts::PI;

use crate::error::{invalid_input, Result};
use crate::majorization::{suffix_sums_of, DEFAULT_TOL};

/// How far from 1 the totals of the two inputs may be.
const BRIDGE_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeProcess {
    steps: Vec<f64>,
    partial_sums: Vec<f64>,
}

impl BridgeProcess {
    /// `δ_1, …, δ_n`.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// `S_1, …, S_n`; `S_n` is exactly zero.
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn stays_nonnegative(&self) -> bool {
        self.partial_sums.iter().all(|&s| s >= -DEFAULT_TOL)
    }
}

/// Number of `S_1, …, S_n` that are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationCount(pub usize);

/// Builds the bridge with steps `δ_k = y_k - x_k`.
///
/// With `ordered` the inputs are first rearranged decreasingly; otherwise the
/// components are taken in the order given. Both inputs must be probability
/// vectors of equal length.
pub fn build_bridge(x: &[f64], y: &[f64], ordered: bool) -> Result<BridgeProcess> {
    if x.len() != y.len() {
        return Err(invalid_input(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(invalid_input("bridge needs at least one step"));
    }
    for v in [x, y] {
        let total: f64 = v.iter().sum();
        if (total - 1.0).abs() > BRIDGE_SUM_TOL {
            return Err(invalid_input(format!("bridge inputs must sum to 1, got {total}")));
        }
    }
    let arrange = |v: &[f64]| {
        let mut v = v.to_vec();
        if ordered {
            v.sort_by(|a, b| b.total_cmp(a));
        }
        v
    };
    let (x, y) = (arrange(x), arrange(y));
    let n = x.len();
    let steps = y.iter().zip(&x).map(|(b, a)| b - a).collect();

    // S_k = E_{k+1}(x) - E_{k+1}(y) for equal totals. Summing tails pins
    // S_n = 0 and reproduces the majorization test bit for bit.
    let (ex, ey) = (suffix_sums_of(&x), suffix_sums_of(&y));
    let mut partial_sums = Vec::with_capacity(n);
    for k in 1..n {
        partial_sums.push(ex[k] - ey[k]);
    }
    partial_sums.push(0.0);
    Ok(BridgeProcess { steps, partial_sums })
}

/// Counts `k` with `S_k >= 0` (`at_zero_counts`) or `S_k > 0`, using the
/// majorization tolerance as the zero band.
pub fn occupation_count(bridge: &BridgeProcess, at_zero_counts: bool) -> OccupationCount {
    let count = if at_zero_counts {
        bridge.partial_sums.iter().filter(|&&s| s >= -DEFAULT_TOL).count()
    } else {
        bridge.partial_sums.iter().filter(|&&s| s > DEFAULT_TOL).count()
    };
    OccupationCount(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Symmetric walk with i.i.d. continuous steps.
    Walk,
    /// Bridge with exchangeable steps summing to zero.
    Bridge,
}

/// Law of `N_n` as `[P(N_n = 0), …, P(N_n = n)]`.
///
/// Walk: the discrete arcsine law `C(2k,k) C(2(n-k),n-k) / 4ⁿ`. Bridge:
/// uniform over `{1, …, n}`, with no mass at 0.
pub fn sparre_andersen_pmf(n: usize, kind: ReferenceKind) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(invalid_input("n must be at least 1"));
    }
    Ok(match kind {
        ReferenceKind::Walk => {
            // a_k = C(2k, k) / 4^k via a_k = a_{k-1} (2k - 1) / (2k)
            let mut a = Vec::with_capacity(n + 1);
            a.push(1.0);
            for k in 1..=n {
                let prev = a[k - 1];
                a.push(prev * (2 * k - 1) as f64 / (2 * k) as f64);
            }
            (0..=n).map(|k| a[k] * a[n - k]).collect()
        }
        ReferenceKind::Bridge => {
            let mut p = vec![1.0 / n as f64; n + 1];
            p[0] = 0.0;
            p
        }
    })
}

/// `(2/π) arcsin √t`, the limiting law of `N_n / n` for walks.
pub fn arcsine_cdf(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid_input(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(2.0 / PI * t.sqrt().asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::majorizes;
    use crate::rng::task_stream;
    use crate::sampling::sample_spectrum;
    use rand::Rng;

    #[test]
    fn bridge_of_equal_spectra_is_flat() {
        let x = [0.5, 0.3, 0.2];
        let b = build_bridge(&x, &x, true).unwrap();
        assert!(b.partial_sums().iter().all(|&s| s == 0.0));
        assert_eq!(occupation_count(&b, true), OccupationCount(3));
    }

    #[test]
    fn hand_evaluated_bridge() {
        let b = build_bridge(&[0.7, 0.3], &[0.5, 0.5], true).unwrap();
        assert!((b.partial_sums()[0] + 0.2).abs() < 1e-15);
        assert_eq!(b.partial_sums()[1], 0.0);
        assert!((b.steps()[0] + 0.2).abs() < 1e-15 && (b.steps()[1] - 0.2).abs() < 1e-15);
        assert_eq!(occupation_count(&b, true), OccupationCount(1));
        assert_eq!(occupation_count(&b, false), OccupationCount(0));
    }

    #[test]
    fn unordered_keeps_input_order() {
        let b = build_bridge(&[0.3, 0.7], &[0.5, 0.5], false).unwrap();
        assert!((b.partial_sums()[0] - 0.2).abs() < 1e-15);
        let b = build_bridge(&[0.3, 0.7], &[0.5, 0.5], true).unwrap();
        assert!((b.partial_sums()[0] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn bridge_input_errors() {
        assert!(build_bridge(&[1.0], &[0.5, 0.5], true).is_err());
        assert!(build_bridge(&[0.5, 0.6], &[0.5, 0.5], true).is_err());
        assert!(build_bridge(&[], &[], true).is_err());
    }

    #[test]
    fn partial_sums_follow_steps() {
        let mut rng = task_stream(51, 0);
        let x = sample_spectrum(20, 25, &mut rng).unwrap();
        let y = sample_spectrum(20, 25, &mut rng).unwrap();
        let b = build_bridge(x.values(), y.values(), true).unwrap();
        let mut s = 0.0;
        for (k, d) in b.steps().iter().enumerate() {
            s += d;
            assert!((s - b.partial_sums()[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn positivity_is_majorization() {
        let mut rng = task_stream(52, 0);
        for _ in 0..10_000 {
            let n = rng.random_range(2..=10);
            let m = rng.random_range(n..=3 * n);
            let x = sample_spectrum(n, m, &mut rng).unwrap();
            let y = sample_spectrum(n, m, &mut rng).unwrap();
            let b = build_bridge(x.values(), y.values(), true).unwrap();
            let maj = majorizes(&x, &y, DEFAULT_TOL).unwrap().x_majorized_by_y;
            assert_eq!(b.stays_nonnegative(), maj);
            assert_eq!(occupation_count(&b, true).0 == n, maj);
        }
    }

    #[test]
    fn walk_pmf_values() {
        assert_eq!(sparre_andersen_pmf(1, ReferenceKind::Walk).unwrap(), vec![0.5, 0.5]);
        assert_eq!(sparre_andersen_pmf(2, ReferenceKind::Walk).unwrap(), vec![0.375, 0.25, 0.375]);
        let p = sparre_andersen_pmf(100, ReferenceKind::Walk).unwrap();
        let approx = 1.0 / (PI * 100.0).sqrt();
        assert!((p[100] / approx - 1.0).abs() < 0.005);
        assert!(sparre_andersen_pmf(0, ReferenceKind::Walk).is_err());
    }

    #[test]
    fn pmfs_sum_to_one() {
        for n in [1, 2, 3, 10, 100, 1000, 10_000] {
            for kind in [ReferenceKind::Walk, ReferenceKind::Bridge] {
                let total: f64 = sparre_andersen_pmf(n, kind).unwrap().iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "n = {n}, {kind:?}: {total}");
            }
        }
    }

    #[test]
    fn bridge_pmf_is_uniform_on_one_to_n() {
        let p = sparre_andersen_pmf(8, ReferenceKind::Bridge).unwrap();
        assert_eq!(p[0], 0.0);
        assert_eq!(p[8], 1.0 / 8.0);
        assert!(p[1..].iter().all(|&v| v == 0.125));
    }

    #[test]
    fn arcsine_values() {
        assert_eq!(arcsine_cdf(0.0).unwrap(), 0.0);
        assert!((arcsine_cdf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((arcsine_cdf(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((arcsine_cdf(0.25).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(arcsine_cdf(1.1).is_err());
        assert!(arcsine_cdf(-0.1).is_err());
    }
}
