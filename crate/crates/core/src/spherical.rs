//! Integrals over the unit sphere of a subspace.
//!
//! For `Y = Σ Yⁱ E_i` ranging over the unit sphere of a k-dimensional
//! subspace (a real (2k−1)-sphere) with its surface measure `dθ`,
//!
//! ```text
//! ∮ Yⁱ conj(Yʲ) dθ                     = δ_ij V / k
//! ∮ Yⁱ conj(Yʲ) Yʳ conj(Yˢ) dθ         = (δ_ij δ_rs + δ_is δ_rj) V / (k(k+1))
//! ```
//!
//! with `V = 2πᵏ / (k−1)!`. The exact integrals of the curvature forms are
//! computed from these closed forms; Monte Carlo only validates them.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::evaluate;
use crate::linalg::{CMatrix, CVector};
use crate::rng;
use crate::subspace::Subspace;
use crate::tensor::CurvatureTensor;

/// Surface measure of the unit sphere of C^k, `2πᵏ / (k−1)!`.
pub fn sphere_volume(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "sphere dimension k",
            value: 0,
            lo: 1,
            hi: usize::MAX,
        });
    }
    let mut v = 2.0 * core::f64::consts::PI;
    for j in 1..k {
        v *= core::f64::consts::PI / j as f64;
    }
    Ok(v)
}

/// Monte Carlo estimate of a spherical integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalEstimate {
    pub value: Complex64,
    /// Combined standard error `sqrt(se_re² + se_im²)`.
    pub stderr: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: usize,
    pub seed: u64,
}

impl SphericalEstimate {
    /// True when the real and imaginary parts each lie within `bands`
    /// standard errors of `exact`. `floor` absorbs rounding when the
    /// integrand is (numerically) constant and the standard error vanishes.
    pub fn agrees_with(&self, exact: Complex64, bands: f64, floor: f64) -> bool {
        (self.value.re - exact.re).abs() <= bands * self.stderr_re + floor
            && (self.value.im - exact.im).abs() <= bands * self.stderr_im + floor
    }
}

/// `∮ f dθ` over the unit sphere of `sigma`, estimated as `V · mean(f)` from
/// `samples` uniform points (normalized complex Gaussians).
pub fn mc_sphere_average<F>(mut f: F, sigma: &Subspace, samples: usize, seed: u64) -> Result<SphericalEstimate>
where
    F: FnMut(&CVector) -> Complex64,
{
    if samples == 0 {
        return Err(Error::OutOfRange {
            what: "samples",
            value: 0,
            lo: 1,
            hi: usize::MAX,
        });
    }
    let k = sigma.dim();
    let vol = sphere_volume(k)?;
    let mut rng = rng::seeded(seed);
    // Welford on each component.
    let (mut mean_re, mut mean_im, mut m2_re, mut m2_im) = (0.0, 0.0, 0.0, 0.0);
    for s in 0..samples {
        let y = sigma.random_unit_vector(&mut rng);
        let v = f(&y);
        let cnt = (s + 1) as f64;
        let d_re = v.re - mean_re;
        mean_re += d_re / cnt;
        m2_re += d_re * (v.re - mean_re);
        let d_im = v.im - mean_im;
        mean_im += d_im / cnt;
        m2_im += d_im * (v.im - mean_im);
    }
    let var = |m2: f64| if samples > 1 { m2 / (samples - 1) as f64 } else { 0.0 };
    let root_n = libm::sqrt(samples as f64);
    let stderr_re = vol * libm::sqrt(var(m2_re)) / root_n;
    let stderr_im = vol * libm::sqrt(var(m2_im)) / root_n;
    Ok(SphericalEstimate {
        value: Complex64::new(mean_re, mean_im) * vol,
        stderr: libm::hypot(stderr_re, stderr_im),
        stderr_re,
        stderr_im,
        samples,
        seed,
    })
}

/// Exact `∮ f(Y, Y) dθ` for `f(Y, Y) = Σ F_ij Yⁱ conj(Yʲ)`: `(V/k) tr F`.
pub fn closed_form_average_quadratic(coeffs: &CMatrix) -> Result<Complex64> {
    if !coeffs.is_square() || coeffs.nrows() == 0 {
        return Err(Error::Shape(alloc::format!(
            "quadratic coefficients must be a nonempty square matrix, got {:?}",
            coeffs.shape()
        )));
    }
    let k = coeffs.nrows();
    Ok(coeffs.trace() * (sphere_volume(k)? / k as f64))
}

/// Coefficients `G_{ijrs}` of `g(Y,Y,Y,Y) = Σ G_ijrs Yⁱ conj(Yʲ) Yʳ conj(Yˢ)`,
/// stored with index `((i k + j) k + r) k + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticCoefficients {
    k: usize,
    data: Vec<Complex64>,
}

impl QuarticCoefficients {
    pub fn new(k: usize, data: Vec<Complex64>) -> Result<Self> {
        if k == 0 || data.len() != k * k * k * k {
            return Err(Error::Dimension {
                what: "quartic coefficients",
                expected: k * k * k * k,
                got: data.len(),
            });
        }
        Ok(Self { k, data })
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(k * k * k * k);
        for i in 0..k {
            for j in 0..k {
                for r in 0..k {
                    for s in 0..k {
                        data.push(f(i, j, r, s));
                    }
                }
            }
        }
        Self { k, data }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize, r: usize, s: usize) -> Complex64 {
        let k = self.k;
        self.data[((i * k + j) * k + r) * k + s]
    }

    /// `g(Y, Y, Y, Y)` at a coordinate vector.
    pub fn eval(&self, y: &CVector) -> Complex64 {
        let k = self.k;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                let ij = y[i] * y[j].conj();
                for r in 0..k {
                    for s in 0..k {
                        acc += self.get(i, j, r, s) * ij * y[r] * y[s].conj();
                    }
                }
            }
        }
        acc
    }
}

/// Exact `∮ g(Y,Y,Y,Y) dθ = V/(k(k+1)) Σ_ij [G_iijj + G_ijji]`.
pub fn closed_form_average_quartic(coeffs: &QuarticCoefficients) -> Result<Complex64> {
    let k = coeffs.k;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            acc += coeffs.get(i, i, j, j) + coeffs.get(i, j, j, i);
        }
    }
    Ok(acc * (sphere_volume(k)? / (k * (k + 1)) as f64))
}

fn quadratic_coeffs(k: usize, mut f: impl FnMut(usize, usize) -> Result<Complex64>) -> Result<CMatrix> {
    let mut m = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = f(i, j)?;
        }
    }
    Ok(m)
}

/// `(k/V) ∮ R(Y, Ȳ, u, ū) dθ(Y)` over the unit sphere of Σ.
pub fn integral_rc_form(t: &CurvatureTensor, sigma: &Subspace, u: &CVector) -> Result<f64> {
    let k = sigma.dim();
    let coeffs = quadratic_coeffs(k, |i, j| evaluate(t, &sigma.basis(i), &sigma.basis(j), u, u))?;
    Ok(closed_form_average_quadratic(&coeffs)?.re * k as f64 / sphere_volume(k)?)
}

/// `(k/V) ∮ R(X, X̄, Y, Ȳ) dθ(Y)` for `X ∈ Σ`.
pub fn integral_ricci_k(t: &CurvatureTensor, sigma: &Subspace, x: &CVector) -> Result<f64> {
    if !t.is_tangent_shaped() {
        return Err(Error::Shape("k-Ricci curvature needs r = n".into()));
    }
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    sigma.check_contains(x)?;
    let k = sigma.dim();
    let coeffs = quadratic_coeffs(k, |i, j| evaluate(t, x, x, &sigma.basis(i), &sigma.basis(j)))?;
    Ok(closed_form_average_quadratic(&coeffs)?.re * k as f64 / sphere_volume(k)?)
}

/// `k(k+1)/(2V) ∮ H(Y) dθ(Y)`; valid only for CKL tensors.
pub fn integral_scalar_k(t: &CurvatureTensor, sigma: &Subspace) -> Result<f64> {
    if !t.ckl() {
        return Err(Error::NotCkl);
    }
    if sigma.ambient_dim() != t.n() {
        return Err(Error::Dimension {
            what: "base subspace ambient dimension",
            expected: t.n(),
            got: sigma.ambient_dim(),
        });
    }
    let k = sigma.dim();
    let basis: Vec<CVector> = (0..k).map(|i| sigma.basis(i)).collect();
    let mut data = Vec::with_capacity(k * k * k * k);
    for i in 0..k {
        for j in 0..k {
            for r in 0..k {
                for s in 0..k {
                    data.push(evaluate(t, &basis[i], &basis[j], &basis[r], &basis[s])?);
                }
            }
        }
    }
    let coeffs = QuarticCoefficients::new(k, data)?;
    let kk = (k * (k + 1)) as f64;
    Ok(closed_form_average_quartic(&coeffs)?.re * kk / (2.0 * sphere_volume(k)?))
}

/// One moment of the uniform measure checked against its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck {
    pub k: usize,
    /// `[i, j]` for quadratic moments, `[i, j, r, s]` for quartic ones (0-based).
    pub indices: Vec<usize>,
    pub exact: f64,
    pub estimate: SphericalEstimate,
    pub passed: bool,
}

/// Rounding allowance, relative to V, for integrands with zero variance.
const MOMENT_FLOOR: f64 = 1e-12;

/// Checks every quadratic and quartic coordinate moment for `k = 1..=k_max`
/// at `bands` standard errors. Each moment uses its own seed derived from
/// `seed` so checks are independent.
pub fn moment_suite(k_max: usize, samples: usize, seed: u64, bands: f64) -> Result<Vec<MomentCheck>> {
    let mut out = Vec::new();
    let mut stream = 0u64;
    let mut next_seed = || {
        stream += 1;
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream)
    };
    for k in 1..=k_max {
        let sigma = Subspace::coordinate(k, k);
        let vol = sphere_volume(k)?;
        for i in 0..k {
            for j in 0..k {
                let exact = if i == j { vol / k as f64 } else { 0.0 };
                let est = mc_sphere_average(|y| y[i] * y[j].conj(), &sigma, samples, next_seed())?;
                out.push(MomentCheck {
                    k,
                    passed: est.agrees_with(Complex64::new(exact, 0.0), bands, MOMENT_FLOOR * vol),
                    indices: alloc::vec![i, j],
                    exact,
                    estimate: est,
                });
            }
        }
        for i in 0..k {
            for j in 0..k {
                for r in 0..k {
                    for s in 0..k {
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let exact = (d(i, j) * d(r, s) + d(i, s) * d(r, j)) * vol / (k * (k + 1)) as f64;
                        let est = mc_sphere_average(
                            |y| y[i] * y[j].conj() * y[r] * y[s].conj(),
                            &sigma,
                            samples,
                            next_seed(),
                        )?;
                        out.push(MomentCheck {
                            k,
                            passed: est.agrees_with(Complex64::new(exact, 0.0), bands, MOMENT_FLOOR * vol),
                            indices: alloc::vec![i, j, r, s],
                            exact,
                            estimate: est,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
