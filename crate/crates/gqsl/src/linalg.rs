//! Small dense-matrix helpers shared across modules.
//!
//! Everything operates on `nalgebra::DMatrix<f64>`; matrices here are
//! `2n x 2n` with `n` at most a few hundred, so dense algorithms are fine.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::{Error, Result};

/// `(m + m^T) / 2`, the symmetric part.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Frobenius distance from symmetry, `||m - m^T||_F`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).norm()
}

/// Cholesky factorization of a symmetric positive-definite matrix.
pub fn spd_cholesky(m: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    m.clone()
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure(format!("{what} is not positive-definite")))
}

/// `ln det` of an SPD matrix from its Cholesky factor.
pub fn ln_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// Smallest eigenvalue of the Hermitian matrix `Sigma + i hbar Omega`,
/// computed through its real symmetric embedding
/// `[[Sigma, -hbar Omega], [hbar Omega, Sigma]]`, whose spectrum is the
/// Hermitian spectrum doubled.
pub fn min_physicality_eigenvalue(sigma: &DMatrix<f64>, omega: &DMatrix<f64>, hbar: f64) -> f64 {
    min_hermitian_eigenvalue(sigma, &(hbar * omega))
}

/// Smallest eigenvalue of the Hermitian matrix `R + iC`, where `R` is real
/// symmetric and `C` real antisymmetric, computed through the doubled real
/// symmetric embedding `[[R, -C], [C, R]]` (each eigenvalue appears twice).
pub fn min_hermitian_eigenvalue(r: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let d = r.nrows();
    let mut embed = DMatrix::<f64>::zeros(2 * d, 2 * d);
    embed.view_mut((0, 0), (d, d)).copy_from(r);
    embed.view_mut((d, d), (d, d)).copy_from(r);
    embed.view_mut((0, d), (d, d)).copy_from(&(-c));
    embed.view_mut((d, 0), (d, d)).copy_from(c);
    embed.symmetric_eigen().eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Cumulative integral of uniformly sampled values, one entry per sample.
///
/// Each pair of intervals is integrated with the quadratic through its three
/// nodes, so full pairs reproduce composite Simpson; the half-pair formulas
/// `h(5f0 + 8f1 - f2)/12` and `h(-f0 + 8f1 + 5f2)/12` fill odd nodes and a
/// trailing odd interval.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut c = vec![0.0; n];
    if n < 2 {
        return c;
    }
    if n == 2 {
        c[1] = 0.5 * h * (f[0] + f[1]);
        return c;
    }
    let mut i = 0;
    while i + 2 < n {
        c[i + 1] = c[i] + h * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]) / 12.0;
        c[i + 2] = c[i + 1] + h * (-f[i] + 8.0 * f[i + 1] + 5.0 * f[i + 2]) / 12.0;
        i += 2;
    }
    if i + 2 == n {
        // One interval left: second half of the quadratic through the last
        // three nodes.
        c[i + 1] = c[i] + h * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]) / 12.0;
    }
    c
}

/// Smallest `s` in `[lo, hi]` with `pred(s)` true, to absolute tolerance
/// `tol`. `pred` must be monotone (false then true) over the bracket.
pub fn bisect_first_true(pred: impl Fn(f64) -> bool, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    if pred(lo) {
        return lo;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Quadratic form `x^T m^{-1} x` through an existing Cholesky factor.
pub fn inv_quadratic_form(chol: &Cholesky<f64, Dyn>, x: &DVector<f64>) -> f64 {
    x.dot(&chol.solve(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cumulative_simpson_is_exact_for_quadratics() {
        let h = 0.25;
        let f: Vec<f64> = (0..9)
            .map(|i| {
                let x = i as f64 * h;
                3.0 * x * x - 2.0 * x + 1.0
            })
            .collect();
        let c = cumulative_simpson(&f, h);
        for (i, ci) in c.iter().enumerate() {
            let x = i as f64 * h;
            assert_relative_eq!(*ci, x.powi(3) - x * x + x, epsilon = 1e-12);
        }
    }

    #[test]
    fn cumulative_simpson_handles_odd_interval_count() {
        let h = 0.02;
        let f: Vec<f64> = (0..6).map(|i| (i as f64 * h).exp()).collect();
        let c = cumulative_simpson(&f, h);
        let exact = (0.1f64).exp() - 1.0;
        assert_relative_eq!(c[5], exact, epsilon = 1e-8);
    }

    #[test]
    fn bisection_finds_left_edge() {
        let root = bisect_first_true(|s| s * s >= 2.0, 0.0, 2.0, 1e-12);
        assert_relative_eq!(root, 2.0f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn physicality_embedding_matches_direct_two_by_two() {
        // For Sigma = a I (one mode), Sigma + i hbar Omega has eigenvalues
        // a -+ hbar.
        let sigma = DMatrix::from_diagonal_element(2, 2, 0.5);
        let omega = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let min = min_physicality_eigenvalue(&sigma, &omega, 1.0);
        assert_relative_eq!(min, -0.5, epsilon = 1e-12);
    }
}
