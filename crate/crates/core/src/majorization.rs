//! Majorization and Vidal's maximal conversion probability.
//!
//! Everything is phrased through suffix sums `E_k(x) = Σ_{j>=k} x↓_j`:
//! `x ≺ y` iff `E_k(x) >= E_k(y)` for every k, and the maximal probability
//! of converting `x` into `y` is `min_k E_k(x) / E_k(y)`.

use crate::error::{invalid_input, Result};
use crate::sampling::Spectrum;

/// Absolute slack allowed on partial sums.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComparisonResult {
    pub x_majorized_by_y: bool,
    pub y_majorized_by_x: bool,
    pub incomparable: bool,
}

impl ComparisonResult {
    fn new(x_majorized_by_y: bool, y_majorized_by_x: bool) -> Self {
        Self { x_majorized_by_y, y_majorized_by_x, incomparable: !x_majorized_by_y && !y_majorized_by_x }
    }
}

/// `(E_1, …, E_n)` with `E_1 = 1` exactly, accumulated from the tail.
pub fn suffix_sums(x: &Spectrum) -> Vec<f64> {
    suffix_sums_of(x.values())
}

pub(crate) fn suffix_sums_of(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut sums = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += values[k];
        sums[k] = acc;
    }
    if n > 0 {
        sums[0] = 1.0;
    }
    sums
}

fn check_lengths(x: &Spectrum, y: &Spectrum) -> Result<()> {
    if x.len() != y.len() {
        return Err(invalid_input(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    Ok(())
}

/// `x ≺ y` on precomputed suffix sums.
#[inline]
pub(crate) fn majorized_by(ex: &[f64], ey: &[f64], tol: f64) -> bool {
    ex.iter().zip(ey).all(|(a, b)| a - b >= -tol)
}

/// Both directions of the majorization order.
pub fn majorizes(x: &Spectrum, y: &Spectrum, tol: f64) -> Result<ComparisonResult> {
    check_lengths(x, y)?;
    let (ex, ey) = (suffix_sums(x), suffix_sums(y));
    Ok(ComparisonResult::new(majorized_by(&ex, &ey, tol), majorized_by(&ey, &ex, tol)))
}

/// Vidal's Π on precomputed suffix sums.
///
/// Returns exactly 1 when `x ≺ y` within `tol`; otherwise the minimum ratio
/// over the indices with `E_k(y) > 0`, which is then at most `1 - tol`.
#[inline]
pub(crate) fn pi_from_suffix_sums(ex: &[f64], ey: &[f64], tol: f64) -> f64 {
    if majorized_by(ex, ey, tol) {
        return 1.0;
    }
    ex.iter()
        .zip(ey)
        .filter(|(_, &b)| b > 0.0)
        .map(|(a, b)| a / b)
        .fold(1.0, f64::min)
}

/// Maximal probability of converting a state with spectrum `x` into one with
/// spectrum `y` by local operations and classical communication.
pub fn vidal_pi(x: &Spectrum, y: &Spectrum) -> Result<f64> {
    vidal_pi_with_tol(x, y, DEFAULT_TOL)
}

pub fn vidal_pi_with_tol(x: &Spectrum, y: &Spectrum, tol: f64) -> Result<f64> {
    check_lengths(x, y)?;
    Ok(pi_from_suffix_sums(&suffix_sums(x), &suffix_sums(y), tol))
}

/// Whether `x ≺ p·y + (1 - p)·e` with `e = (1, 0, …, 0)`.
pub fn convex_certificate(x: &Spectrum, y: &Spectrum, p: f64) -> Result<bool> {
    check_lengths(x, y)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid_input(format!("p must lie in [0, 1], got {p}")));
    }
    // Mixing with e only raises the first coordinate, so the target stays
    // sorted.
    let mut target: Vec<f64> = y.values().iter().map(|v| p * v).collect();
    target[0] += 1.0 - p;
    Ok(majorized_by(&suffix_sums(x), &suffix_sums_of(&target), DEFAULT_TOL))
}
