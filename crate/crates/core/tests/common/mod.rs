//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use csop::c64;
use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

/// Singular values, ascending, from faer's dense SVD.
pub fn svd_ascending(m: &Mat<c64>) -> Vec<f64> {
    let mut s = m.as_ref().singular_values().expect("svd converges");
    s.sort_by(f64::total_cmp);
    s
}

pub fn sigma_max(m: &Mat<c64>) -> f64 {
    *svd_ascending(m).last().unwrap()
}

pub fn sigma_min(m: &Mat<c64>) -> f64 {
    svd_ascending(m)[0]
}

/// `‖M^{-1}‖₂` through an explicit LU inverse.
pub fn inverse_norm(m: &Mat<c64>) -> f64 {
    let inv = m.as_ref().partial_piv_lu().inverse();
    sigma_max(&inv)
}

pub fn shifted(a: &Mat<c64>, z: c64) -> Mat<c64> {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= z;
    }
    m
}

pub fn real_to_complex(m: &Mat<f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0))
}

/// Real symmetric eigenvalues, ascending, from faer.
pub fn sym_eigenvalues(m: &Mat<f64>) -> Vec<f64> {
    let mut v = m.as_ref().self_adjoint_eigenvalues(faer::Side::Lower).expect("eig converges");
    v.sort_by(f64::total_cmp);
    v
}

pub fn fro(m: &Mat<c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn matvec(a: &Mat<c64>, x: &[c64]) -> Vec<c64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum()).collect()
}

pub fn max_rel_diff(a: &[f64], b: &[f64], scale: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / scale).fold(0.0, f64::max)
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
