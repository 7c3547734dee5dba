//! Smallest antilinear eigenpair of a large complex symmetric operator that is
//! only available through a matvec and a solve.
//!
//! Subspace iteration runs on `(A^H A)^{-1} x = A^{-1} conj(A^{-1} conj(x))`
//! (valid because `A^H = conj(A)` for symmetric `A`). The block `X` is then
//! compressed bilinearly, `B = X^T A X`, and the small antilinear problem of
//! `B` yields `λ` and `ψ = X y`. Degenerate minima are handled because the
//! whole block is compressed, not a single vector.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{bilinear, c64, orthonormalize_against, vec_norm};
use crate::antilinear::doubled_solve;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct MinPairOptions {
    pub block: usize,
    /// Stop when the antilinear residual is below `tol * scale`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for MinPairOptions {
    fn default() -> Self {
        MinPairOptions { block: 8, tol: 1e-12, max_iter: 5000, seed: 7 }
    }
}

#[derive(Debug, Clone)]
pub struct MinPair {
    pub lambda: f64,
    pub psi: Vec<c64>,
    /// `‖A ψ - λ conj(ψ)‖`.
    pub residual: f64,
    pub iterations: usize,
}

/// `scale` is any upper estimate of `‖A‖` (used for the stopping rule).
pub fn antilinear_min_pair(
    n: usize,
    scale: f64,
    apply: impl Fn(&[c64], &mut [c64]),
    solve: impl Fn(&mut [c64]),
    opts: &MinPairOptions,
) -> Result<MinPair> {
    let p = opts.block.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<c64>> = Vec::with_capacity(p);
    while x.len() < p {
        let mut v: Vec<c64> =
            (0..n).map(|_| c64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
        if orthonormalize_against(&mut v, &x) > 1e-8 {
            x.push(v);
        }
    }
    let mut best: Option<MinPair> = None;
    let mut stall = 0;
    let mut ax = vec![vec![c64::new(0.0, 0.0); n]; p];
    for it in 1..=opts.max_iter {
        for v in x.iter_mut() {
            v.iter_mut().for_each(|z| *z = z.conj());
            solve(v);
            v.iter_mut().for_each(|z| *z = z.conj());
            solve(v);
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::SingularShift { min_lambda: 0.0 });
            }
        }
        let mut q: Vec<Vec<c64>> = Vec::with_capacity(p);
        for v in x.drain(..) {
            let mut v = v;
            if orthonormalize_against(&mut v, &q) > 0.0 {
                q.push(v);
            }
        }
        while q.len() < p {
            let mut v: Vec<c64> =
                (0..n).map(|_| c64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
            if orthonormalize_against(&mut v, &q) > 1e-8 {
                q.push(v);
            }
        }
        x = q;

        for (v, out) in x.iter().zip(ax.iter_mut()) {
            apply(v, out);
        }
        let b = Mat::from_fn(p, p, |i, j| 0.5 * (bilinear(&x[i], &ax[j]) + bilinear(&x[j], &ax[i])));
        let small = doubled_solve(b.as_ref())?;
        let k = p - 1;
        let lambda = small.lambdas[k];
        let y = &small.vectors[k];
        let mut psi = vec![c64::new(0.0, 0.0); n];
        let mut apsi = vec![c64::new(0.0, 0.0); n];
        for j in 0..p {
            for i in 0..n {
                psi[i] += y[j] * x[j][i];
                apsi[i] += y[j] * ax[j][i];
            }
        }
        let nrm = vec_norm(&psi);
        psi.iter_mut().for_each(|z| *z /= nrm);
        apsi.iter_mut().for_each(|z| *z /= nrm);
        let residual = apsi.iter().zip(&psi).map(|(a, s)| (a - lambda * s.conj()).norm_sqr()).sum::<f64>().sqrt();
        let cand = MinPair { lambda, psi, residual, iterations: it };
        if residual <= opts.tol * scale {
            return Ok(cand);
        }
        match &best {
            Some(b) if residual >= 0.999 * b.residual => stall += 1,
            _ => {
                stall = 0;
                best = Some(cand);
            }
        }
        if stall >= 50 {
            let b = best.take().unwrap();
            if b.residual <= 1e-9 * scale {
                return Ok(b);
            }
            return Err(Error::Convergence(format!(
                "antilinear subspace iteration stalled at residual {:.3e} (scale {:.3e})",
                b.residual, scale
            )));
        }
    }
    let b = best.unwrap();
    if b.residual <= 1e-9 * scale {
        return Ok(b);
    }
    Err(Error::Convergence(format!(
        "antilinear subspace iteration: residual {:.3e} after {} iterations",
        b.residual, opts.max_iter
    )))
}
