//! Seeded generators for test matrices and randomized checks.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::antilinear::ComplexSymmetricMatrix;
use crate::linalg::c64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> c64 {
    c64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// General complex matrix with i.i.d. standard normal real and imaginary parts.
pub fn random_complex_matrix<R: Rng>(n: usize, rng: &mut R) -> Mat<c64> {
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Complex symmetric matrix: the upper triangle is drawn, the lower mirrored.
pub fn random_complex_symmetric<R: Rng>(n: usize, rng: &mut R) -> ComplexSymmetricMatrix {
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let z = complex_normal(rng);
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    ComplexSymmetricMatrix::new(m).expect("finite entries")
}

/// Unit vector drawn uniformly from the complex sphere.
pub fn random_unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<c64> {
    let mut v: Vec<c64> = (0..n).map(|_| complex_normal(rng)).collect();
    let nrm = crate::linalg::vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= nrm);
    v
}
