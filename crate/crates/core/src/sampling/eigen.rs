//! Eigenvalues of symmetric tridiagonal matrices by implicit-shift QL.

use super::tridiagonal::SymTridiagonal;
use crate::error::{Error, Result};

/// Sweep budget per eigenvalue before giving up.
pub const MAX_SWEEPS: usize = 50;

/// All eigenvalues of `t`, ascending.
pub fn eigvals_symtrid(t: &SymTridiagonal) -> Result<Vec<f64>> {
    let mut d = t.d.clone();
    let mut e = Vec::with_capacity(d.len());
    e.extend_from_slice(&t.e);
    e.push(0.0);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Overwrites `d` with the eigenvalues (unordered) of the tridiagonal matrix
/// with diagonal `d` and off-diagonal `e[..n-1]`. `e` must have length `n`;
/// it is used as scratch.
///
/// Wilkinson-shifted QL with Givens rotations, eigenvalues only. An
/// off-diagonal is treated as zero once `|e[i]| <= eps (|d[i]| + |d[i+1]|)`.
pub fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    debug_assert_eq!(e.len(), n);
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence { index: l, sweeps: MAX_SWEEPS });
            }

            // Shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));

            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated_early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Underflow: split the block and restart.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

// Entries stay far from the overflow range for any realistic (n, m), so the
// plain formula is safe and much cheaper than `f64::hypot`.
#[inline(always)]
fn pythag(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_stream;
    use nalgebra::DMatrix;
    use rand::Rng;

    fn dense_eigs(t: &SymTridiagonal) -> Vec<f64> {
        let n = t.n();
        let a = DMatrix::from_row_slice(n, n, &t.to_dense());
        let mut v: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn two_by_two() {
        let t = SymTridiagonal::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let ev = eigvals_symtrid(&t).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!((ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_matrix_returns_sorted_diagonal() {
        let t = SymTridiagonal::new(vec![3.0, -1.0, 7.5, 0.0], vec![0.0; 3]).unwrap();
        assert_eq!(eigvals_symtrid(&t).unwrap(), vec![-1.0, 0.0, 3.0, 7.5]);
    }

    #[test]
    fn single_entry() {
        let t = SymTridiagonal::new(vec![4.2], vec![]).unwrap();
        assert_eq!(eigvals_symtrid(&t).unwrap(), vec![4.2]);
    }

    #[test]
    fn random_sixteen_matches_dense() {
        let mut rng = task_stream(31, 0);
        for _ in 0..20 {
            let d: Vec<f64> = (0..16).map(|_| rng.random_range(-5.0..5.0)).collect();
            let e: Vec<f64> = (0..15).map(|_| rng.random_range(-5.0..5.0)).collect();
            let t = SymTridiagonal::new(d, e).unwrap();
            let ours = eigvals_symtrid(&t).unwrap();
            let oracle = dense_eigs(&t);
            let scale = t.norm_inf();
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn graded_and_clustered_inputs() {
        // Wilkinson W21+ has pairs of nearly equal eigenvalues.
        let n = 21;
        let d: Vec<f64> = (0..n).map(|i| (10.0 - i as f64).abs()).collect();
        let t = SymTridiagonal::new(d, vec![1.0; n - 1]).unwrap();
        let ours = eigvals_symtrid(&t).unwrap();
        let oracle = dense_eigs(&t);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12 * t.norm_inf());
        }

        let d: Vec<f64> = (0..12).map(|i| 10f64.powi(-i)).collect();
        let e: Vec<f64> = (0..11).map(|i| 10f64.powi(-i) * 0.3).collect();
        let t = SymTridiagonal::new(d, e).unwrap();
        let ours = eigvals_symtrid(&t).unwrap();
        let oracle = dense_eigs(&t);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12 * t.norm_inf());
        }
    }
}
