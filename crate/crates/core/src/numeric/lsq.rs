//! Dense least squares on small systems.

use super::C64;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Solution of min ‖A x − b‖₂ with its residual vector.
pub struct LsqSolution<T> {
    pub x: Vec<T>,
    pub residual: Vec<T>,
}

pub fn solve_complex(rows: &[Vec<C64>], rhs: &[C64]) -> Result<LsqSolution<C64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    if m < n || n == 0 {
        return Err(Error::InsufficientZeros(format!(
            "least-squares system has {m} equations for {n} unknowns"
        )));
    }
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DMatrix::from_fn(m, 1, |i, _| rhs[i]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd
        .solve(&b, smax * 1e-14)
        .map_err(|e| Error::IllConditionedFit(e.to_string()))?;
    let r = &a * &x - &b;
    Ok(LsqSolution {
        x: x.iter().copied().collect(),
        residual: r.iter().copied().collect(),
    })
}

pub fn solve_real(rows: &[Vec<f64>], rhs: &[f64]) -> Result<LsqSolution<f64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    if m < n || n == 0 {
        return Err(Error::InsufficientZeros(format!(
            "least-squares system has {m} equations for {n} unknowns"
        )));
    }
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DMatrix::from_fn(m, 1, |i, _| rhs[i]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd
        .solve(&b, smax * 1e-14)
        .map_err(|e| Error::IllConditionedFit(e.to_string()))?;
    let r = &a * &x - &b;
    Ok(LsqSolution {
        x: x.iter().copied().collect(),
        residual: r.iter().copied().collect(),
    })
}
