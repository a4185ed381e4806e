//! Seeded random streams and complex Gaussian draws.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rng = ChaCha8Rng;

/// Generator for `seed`, stream 0.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `seed`. Restarts and sample points each
/// draw from their own stream so results do not depend on evaluation order.
pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex normal: real and imaginary parts i.i.d. N(0, 1).
pub fn complex_normal(rng: &mut Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn complex_normal_vector(rng: &mut Rng, len: usize) -> DVector<Complex64> {
    DVector::from_fn(len, |_, _| complex_normal(rng))
}

pub fn complex_normal_matrix(rng: &mut Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    // column-major fill keeps the draw order independent of nalgebra internals
    let mut m = DMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            m[(r, c)] = complex_normal(rng);
        }
    }
    m
}

/// Uniformly distributed unit vector in C^len.
pub fn unit_sphere_vector(rng: &mut Rng, len: usize) -> DVector<Complex64> {
    loop {
        let v = complex_normal_vector(rng, len);
        let norm = v.norm();
        if norm > 1e-300 {
            return v.unscale(norm);
        }
    }
}
