//! Dense real linear algebra on the real representation.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

/// Relative threshold below which `sigma_min / sigma_max` counts as singular.
pub const INVERTIBILITY_TOL: f64 = 1e-10;

/// Smallest and largest singular values.
pub fn extreme_singular_values(m: &DMatrix<f64>) -> (f64, f64) {
    if m.is_empty() {
        return (0.0, 0.0);
    }
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, max)
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    extreme_singular_values(m).1
}

pub fn check_invertible(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    let (smin, smax) = extreme_singular_values(m);
    if !(smin > INVERTIBILITY_TOL * smax) || !smin.is_finite() {
        return Err(Error::NotInvertible { sigma_min: smin, sigma_max: smax });
    }
    Ok((smin, smax))
}

/// Solves `m x = b` column by column with LU and two rounds of iterative
/// refinement. Fails when `m` is singular to [`INVERTIBILITY_TOL`].
pub fn solve_refined(m: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (smin, smax) = check_invertible(m)?;
    let lu = m.clone().lu();
    let mut x = lu
        .solve(b)
        .ok_or(Error::NotInvertible { sigma_min: smin, sigma_max: smax })?;
    for _ in 0..2 {
        let r = b - m * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
    }
    Ok(x)
}

pub fn solve_vector(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let bm = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let x = solve_refined(m, &bm)?;
    Ok(DVector::from_column_slice(x.as_slice()))
}

/// LU inverse without the SVD check; `None` when LU breaks down.
pub fn lu_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    m.clone().lu().try_inverse()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Sums `count` terms in a fixed binary tree over the index range, so the
/// rounding pattern does not depend on how the work is scheduled.
pub fn pairwise_sum<T, F>(count: usize, term: &F) -> Option<T>
where
    T: Send + std::ops::Add<Output = T>,
    F: Fn(usize) -> T + Sync,
{
    fn go<T, F>(lo: usize, hi: usize, term: &F) -> T
    where
        T: Send + std::ops::Add<Output = T>,
        F: Fn(usize) -> T + Sync,
    {
        if hi - lo == 1 {
            return term(lo);
        }
        let mid = lo + (hi - lo) / 2;
        if hi - lo > 64 {
            let (a, b) = rayon::join(|| go(lo, mid, term), || go(mid, hi, term));
            a + b
        } else {
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    if count == 0 {
        None
    } else {
        Some(go(0, count, term))
    }
}

pub fn pairwise_sum_f64(values: &[f64]) -> f64 {
    pairwise_sum(values.len(), &|i| values[i]).unwrap_or(0.0)
}
