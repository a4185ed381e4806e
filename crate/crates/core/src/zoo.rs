//! Closed-form and seeded example tensors.

use num_complex::Complex64;

use crate::rng;
use crate::tensor::{project_hermitian, project_to_ckl, CurvatureTensor};

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Constant holomorphic sectional curvature `c`:
/// `R_{i j̄ k l̄} = (c/2)(δ_ij δ_kl + δ_il δ_kj)`.
pub fn fubini_study(n: usize, c: f64) -> CurvatureTensor {
    let half = 0.5 * c;
    CurvatureTensor::from_fn(n, n, |i, j, k, l| {
        Complex64::new(half * (delta(i, j) * delta(k, l) + delta(i, l) * delta(k, j)), 0.0)
    })
    .with_ckl_unchecked(true)
}

pub fn flat(n: usize, r: usize) -> CurvatureTensor {
    CurvatureTensor::zeros(n, r)
}

/// Block-diagonal curvature of a product: `a` lives on the first base and
/// fiber indices, `b` on the rest, and mixed components vanish.
pub fn product(a: &CurvatureTensor, b: &CurvatureTensor) -> CurvatureTensor {
    let (na, ra) = (a.n(), a.r());
    let n = na + b.n();
    let r = ra + b.r();
    CurvatureTensor::from_fn(n, r, |i, j, al, be| {
        let base_a = i < na && j < na;
        let base_b = i >= na && j >= na;
        let fib_a = al < ra && be < ra;
        let fib_b = al >= ra && be >= ra;
        if base_a && fib_a {
            a.get(i, j, al, be)
        } else if base_b && fib_b {
            b.get(i - na, j - na, al - ra, be - ra)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .with_ckl_unchecked(a.ckl() && b.ckl() && a.is_tangent_shaped() && b.is_tangent_shaped())
}

/// CKL projection of a seeded standard complex normal draw.
pub fn random_ckl(n: usize, seed: u64) -> CurvatureTensor {
    let mut rng = rng::seeded(seed);
    let raw = CurvatureTensor::random_raw(n, n, &mut rng);
    project_to_ckl(n, &raw).expect("raw draw has the right shape")
}

/// Hermitian projection of a seeded standard complex normal draw.
pub fn random_hermitian(n: usize, r: usize, seed: u64) -> CurvatureTensor {
    let mut rng = rng::seeded(seed);
    let raw = CurvatureTensor::random_raw(n, r, &mut rng);
    project_hermitian(n, r, &raw).expect("raw draw has the right shape")
}

/// `random_ckl(n, seed) + s · fubini_study(n, 2)`.
pub fn shifted_positive(n: usize, seed: u64, s: f64) -> CurvatureTensor {
    random_ckl(n, seed)
        .add(&fubini_study(n, 2.0).scaled(s))
        .expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{evaluate, holo_sectional};
    use crate::linalg::CVector;
    use crate::tensor::{check_ckl, check_hermitian};

    #[test]
    fn fubini_study_entries() {
        let one = fubini_study(1, 2.0);
        assert_eq!(one.entries(), &[Complex64::new(2.0, 0.0)]);
        let two = fubini_study(2, 2.0);
        assert_eq!(two.get(0, 0, 1, 1), Complex64::new(1.0, 0.0));
        assert_eq!(two.get(0, 1, 1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(two.get(0, 1, 0, 1), Complex64::new(0.0, 0.0));
        assert_eq!(fubini_study(3, 0.0).max_abs(), 0.0);
    }

    #[test]
    fn fubini_study_has_constant_h() {
        let fs = fubini_study(4, 2.0);
        let mut rng = rng::seeded(0);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..1000 {
            let x = rng::unit_sphere_vector(&mut rng, 4);
            let h = holo_sectional(&fs, &x).unwrap();
            lo = lo.min(h);
            hi = hi.max(h);
        }
        assert!(hi - lo <= 1e-12, "spread {}", hi - lo);
        assert!((lo - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zoo_outputs_are_symmetric() {
        for t in [
            fubini_study(3, 1.5),
            flat(2, 3),
            product(&fubini_study(1, 2.0), &fubini_study(2, 1.0)),
            random_ckl(3, 7),
            random_hermitian(2, 3, 1),
            shifted_positive(3, 2, 4.0),
        ] {
            assert!(check_hermitian(&t, 1e-12).holds);
            if t.ckl() {
                assert!(check_ckl(&t, 1e-12).unwrap().holds);
            }
        }
        assert!(random_ckl(3, 7).ckl());
        assert!(product(&random_ckl(2, 1), &fubini_study(1, 2.0)).ckl());
        assert!(!product(&random_hermitian(1, 2, 1), &fubini_study(1, 2.0)).ckl());
    }

    #[test]
    fn product_cross_blocks_vanish() {
        let p = product(&random_ckl(2, 3), &random_ckl(1, 4));
        let e = |k: usize| {
            let mut v = CVector::zeros(3);
            v[k] = Complex64::new(1.0, 0.0);
            v
        };
        for (x, u) in [(0, 2), (2, 0), (1, 2)] {
            let val = evaluate(&p, &e(x), &e(x), &e(u), &e(u)).unwrap();
            assert_eq!(val, Complex64::new(0.0, 0.0));
        }
    }
}
