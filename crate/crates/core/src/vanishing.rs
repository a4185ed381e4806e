//! Constants and region of the vanishing theorem for tensor powers.
//!
//! For a bundle `E` that is uniformly RC k-positive with constant
//! `C = min_x max_Σ λ_min(A_Σ)`, holomorphic sections of
//! `E^⊗p ⊗ (E*)^⊗q ⊗ F^⊗m` vanish whenever `q > C₁ p + C₂ m`, where
//! `C₁ = k λ_max / C` and `C₂ = k μ_max / C` (or `1` when `μ_max ≤ 0`).
//! `λ_max` is the largest eigenvalue of any direction matrix of `E`, and
//! `μ_max` the same for the auxiliary bundle `F`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::contract_base;
use crate::grassmann::{self, Extreme, KyFanObjective, OptimizerOptions, PositivityCertificate, PositivityKind, Sense};
use crate::linalg::{self, CMatrix, HermitianEigen};
use crate::rng;
use crate::spherical::{closed_form_average_quadratic, sphere_volume};
use crate::subspace::Subspace;
use crate::tensor::CurvatureTensor;

/// Largest tensor power materialized by [`induced_action_spectrum`] and
/// [`verify_estimate_bound`].
pub const MAX_TENSOR_POWER_LEN: usize = 100_000;

/// Random unit directions that floor each optimized eigenvalue extremum.
pub const EXTREMUM_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingConstants {
    pub k: usize,
    /// Uniform RC k-positivity constant `C(h, ω)`.
    pub c: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// Present when an auxiliary bundle was supplied.
    pub mu_max: Option<f64>,
    pub mu_min: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    /// The uniform-RC(k, 1) certificate behind `c`, with witness subspaces.
    pub certificate: PositivityCertificate,
}

/// Extreme eigenvalues of direction matrices over all points and unit
/// directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionExtrema {
    pub max: f64,
    pub min: f64,
}

/// Optimizes the largest and smallest direction-matrix eigenvalue over the
/// unit sphere at every point, floored by [`EXTREMUM_SAMPLES`] random unit
/// directions and by the `extra` vectors.
pub fn direction_extrema(
    points: &[CurvatureTensor],
    extra: &[Vec<crate::linalg::CVector>],
    opts: &OptimizerOptions,
) -> Result<DirectionExtrema> {
    let mut out = DirectionExtrema {
        max: f64::NEG_INFINITY,
        min: f64::INFINITY,
    };
    for (p, t) in points.iter().enumerate() {
        let n = t.n();
        let point_opts = opts.clone().with_seed(opts.seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(p as u64 + 1)));
        if n > 1 {
            let hi = KyFanObjective { tensor: t, l: 1, extreme: Extreme::Largest };
            let lo = KyFanObjective { tensor: t, l: 1, extreme: Extreme::Smallest };
            out.max = out.max.max(grassmann::optimize_subspace(&hi, 1, Sense::Max, &point_opts)?.value);
            out.min = out.min.min(grassmann::optimize_subspace(&lo, 1, Sense::Min, &point_opts)?.value);
        }
        let mut sample = |x: &crate::linalg::CVector| {
            let eig = HermitianEigen::new(&linalg::hermitian_part(&contract_base(t, &linalg::outer(x))));
            out.max = out.max.max(eig.max());
            out.min = out.min.min(eig.min());
        };
        let mut r = rng::stream(point_opts.seed, u64::MAX);
        for _ in 0..EXTREMUM_SAMPLES {
            sample(&rng::unit_sphere_vector(&mut r, n));
        }
        if let Some(vs) = extra.get(p) {
            vs.iter().for_each(&mut sample);
        }
    }
    Ok(out)
}

/// Certifies uniform RC k-positivity of `E` and derives the vanishing
/// constants. `f_points`, when given, must be aligned with `e_points`.
pub fn compute_constants(
    e_points: &[CurvatureTensor],
    f_points: Option<&[CurvatureTensor]>,
    k: usize,
    opts: &OptimizerOptions,
) -> Result<VanishingConstants> {
    if let Some(f) = f_points {
        if f.len() != e_points.len() {
            return Err(Error::Dimension {
                what: "auxiliary point list",
                expected: e_points.len(),
                got: f.len(),
            });
        }
        if f.iter().zip(e_points).any(|(f, e)| f.n() != e.n()) {
            return Err(Error::Shape("auxiliary tensors must share the base dimension".into()));
        }
    }
    let certificate = grassmann::certify(e_points, PositivityKind::UniformRc, k, 1, opts)?;
    if !certificate.positive {
        return Err(Error::NotUniformlyPositive {
            k,
            value: certificate.value,
        });
    }
    let c = certificate.value;
    // The witness bases bound λ_max from below by C/k, so the invariant
    // λ_max ≥ C/k survives any optimizer shortfall.
    let witness_vectors: Vec<Vec<_>> = certificate
        .points
        .iter()
        .map(|w| (0..w.base.dim()).map(|i| w.base.basis(i)).collect())
        .collect();
    let lam = direction_extrema(e_points, &witness_vectors, opts)?;
    let mu = match f_points {
        Some(f) => Some(direction_extrema(f, &[], &opts.clone().with_seed(opts.seed.wrapping_add(1)))?),
        None => None,
    };
    let kf = k as f64;
    let c1 = kf * lam.max / c;
    let c2 = match mu {
        Some(m) if m.max > 0.0 => kf * m.max / c,
        _ => 1.0,
    };
    Ok(VanishingConstants {
        k,
        c,
        lambda_max: lam.max,
        lambda_min: lam.min,
        mu_max: mu.map(|m| m.max),
        mu_min: mu.map(|m| m.min),
        c1,
        c2,
        certificate,
    })
}

/// Relative margin by which `q` must clear `C₁ p + C₂ m`. The constants
/// are computed in floating point, so points on the boundary line are kept
/// out of the region.
pub const REGION_MARGIN: f64 = 1e-9;

/// `q > C₁ p + C₂ m`, with the boundary widened by [`REGION_MARGIN`].
pub fn vanishing_region(consts: &VanishingConstants, p: usize, q: usize, m: usize) -> bool {
    let rhs = consts.c1 * p as f64 + consts.c2 * m as f64;
    q as f64 > rhs + REGION_MARGIN * rhs.abs()
}

fn power_len(r1: usize, r2: usize, p: usize, q: usize, m: usize) -> Result<usize> {
    let mut len: usize = 1;
    for base in core::iter::repeat_n(r1, p + q).chain(core::iter::repeat_n(r2, m)) {
        len = len.saturating_mul(base);
        if len > MAX_TENSOR_POWER_LEN {
            return Err(Error::TooLarge {
                size: len,
                limit: MAX_TENSOR_POWER_LEN,
            });
        }
    }
    Ok(len)
}

/// All values `Σ λ_{αᵢ} − Σ λ_{βⱼ} + Σ μ_{γₗ}` over multi-indices
/// `(α₁..α_p, β₁..β_q, γ₁..γ_m)`, the last index varying fastest.
pub fn induced_action_spectrum(lambdas: &[f64], mus: &[f64], p: usize, q: usize, m: usize) -> Result<Vec<f64>> {
    if lambdas.is_empty() && p + q > 0 {
        return Err(Error::Shape("eigenvalue list of E is empty".into()));
    }
    if mus.is_empty() && m > 0 {
        return Err(Error::Shape("eigenvalue list of F is empty".into()));
    }
    power_len(lambdas.len(), mus.len(), p, q, m)?;
    let mut out = vec![0.0];
    let slots = core::iter::repeat_n((lambdas, 1.0), p)
        .chain(core::iter::repeat_n((lambdas, -1.0), q))
        .chain(core::iter::repeat_n((mus, 1.0), m));
    for (vals, sign) in slots {
        out = out
            .iter()
            .flat_map(|&acc| vals.iter().map(move |&v| acc + sign * v))
            .collect();
    }
    Ok(out)
}

/// Both sides of the integrated estimate
/// `∮ ⟨R_{XX̄} T, T⟩ dθ(X) ≤ [λ_max p − (C/k) q + μ_max m] · V · |T|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub p: usize,
    pub q: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Applies `op` to tensor slot `slot` of `t`, whose slots have the given
/// dimensions (row-major, last slot fastest): `(op·T)[.., a, ..] = Σ_b op_ab T[.., b, ..]`.
fn apply_to_slot(t: &[Complex64], dims: &[usize], slot: usize, op: &CMatrix) -> Vec<Complex64> {
    let d = dims[slot];
    let inner: usize = dims[slot + 1..].iter().product();
    let outer = t.len() / (d * inner);
    let mut out = vec![Complex64::new(0.0, 0.0); t.len()];
    for o in 0..outer {
        for a in 0..d {
            for b in 0..d {
                let w = op[(a, b)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let dst = (o * d + a) * inner;
                let src = (o * d + b) * inner;
                for i in 0..inner {
                    out[dst + i] += w * t[src + i];
                }
            }
        }
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Checks the integrated estimate on one coefficient array `T` of
/// `E^⊗p ⊗ (E*)^⊗q ⊗ F^⊗m`, stored row-major with the `E` slots first.
///
/// `R_{XX̄}` acts on `E` as `Lᵀ` where `L` is the direction matrix of `X`,
/// on `E*` as `−L`, and on `F` through the direction matrix of `r_f`. The
/// left side is evaluated exactly by integrating the coefficient matrix
/// `F_ij = ⟨D_{E_i Ē_j} T, T⟩` over the unit sphere of `sigma`.
#[allow(clippy::too_many_arguments)]
pub fn verify_estimate_bound(
    r_e: &CurvatureTensor,
    r_f: Option<&CurvatureTensor>,
    sigma: &Subspace,
    t: &[Complex64],
    p: usize,
    q: usize,
    m: usize,
    consts: &VanishingConstants,
) -> Result<EstimateReport> {
    let n = r_e.n();
    if sigma.ambient_dim() != n {
        return Err(Error::Dimension {
            what: "subspace ambient dimension",
            expected: n,
            got: sigma.ambient_dim(),
        });
    }
    if sigma.dim() != consts.k {
        return Err(Error::Dimension {
            what: "subspace dimension",
            expected: consts.k,
            got: sigma.dim(),
        });
    }
    let r2 = match (r_f, m) {
        (Some(f), _) => {
            if f.n() != n {
                return Err(Error::Dimension {
                    what: "auxiliary base dimension",
                    expected: n,
                    got: f.n(),
                });
            }
            f.r()
        }
        (None, 0) => 1,
        (None, _) => return Err(Error::Shape("m > 0 requires an auxiliary tensor".into())),
    };
    let mu_max = match (consts.mu_max, m) {
        (Some(mu), _) => mu,
        (None, 0) => 0.0,
        (None, _) => return Err(Error::Shape("m > 0 requires constants computed with an auxiliary bundle".into())),
    };
    let len = power_len(r_e.r(), r2, p, q, m)?;
    if t.len() != len {
        return Err(Error::Dimension {
            what: "coefficient array length",
            expected: len,
            got: t.len(),
        });
    }
    let dims: Vec<usize> = core::iter::repeat_n(r_e.r(), p + q)
        .chain(core::iter::repeat_n(r2, m))
        .collect();
    let k = sigma.dim();
    let mut coeffs = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let pij = sigma.basis(i) * sigma.basis(j).adjoint();
            let le = contract_base(r_e, &pij);
            let lf = r_f.map(|f| contract_base(f, &pij));
            let mut dt = vec![Complex64::new(0.0, 0.0); len];
            for (slot, _) in dims.iter().enumerate() {
                let op = if slot < p {
                    le.transpose()
                } else if slot < p + q {
                    -le.clone()
                } else {
                    lf.as_ref().expect("checked above").transpose()
                };
                for (acc, v) in dt.iter_mut().zip(apply_to_slot(t, &dims, slot, &op)) {
                    *acc += v;
                }
            }
            coeffs[(i, j)] = inner(&dt, t);
        }
    }
    let lhs = closed_form_average_quadratic(&coeffs)?.re;
    let norm2 = inner(t, t).re;
    let volume = sphere_volume(k)?;
    let rate = consts.lambda_max * p as f64 - consts.c / consts.k as f64 * q as f64 + mu_max * m as f64;
    let rhs = rate * volume * norm2;
    Ok(EstimateReport {
        p,
        q,
        m,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9 * rhs.abs(),
    })
}

/// Standard complex normal coefficients for a tensor power of the given
/// slot counts.
pub fn random_coefficients(r1: usize, r2: usize, p: usize, q: usize, m: usize, rng: &mut rng::Rng) -> Result<Vec<Complex64>> {
    let len = power_len(r1, r2, p, q, m)?;
    Ok((0..len).map(|_| rng::complex_normal(rng)).collect())
}
