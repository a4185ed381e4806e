//! S_k-extremal subspaces and the identities they satisfy.
//!
//! At a subspace Σ* minimizing `S_k` on a CKL tensor, first-order
//! criticality gives `∮ R(X, X̄, Y, Z̄) dθ(X) = 0` for `Y ∈ Σ*`, `Z ⊥ Σ*`,
//! and second-order minimality gives
//! `∮ R(X, X̄, Z, Z̄) dθ(X) ≥ V/(k(k+1)) · S_k(Σ*) · |Z|²`.
//! With `D = min Ric_k > 0` these combine into
//! `R(Σ*; X, X̄) ≥ kD/(k+1) · |X|²` for every `X`.
//!
//! All integrals are quadratic in `X`, so they are evaluated exactly as
//! `(V/k) Σ_i R(E_i, Ē_i, ·, ·̄)`.

use alloc::format;

use crate::error::{Error, Result};
use crate::functionals::{contract_base, contract_fiber, rc_form, ricci_k};
use crate::grassmann::{self, MinRicciKObjective, Optimum, OptimizerOptions, ScalarKObjective, Sense};
use crate::linalg::{CMatrix, CVector};
use crate::rng;
use crate::spherical::sphere_volume;
use crate::subspace::Subspace;
use crate::tensor::CurvatureTensor;

/// Random (Σ, X) pairs that floor the optimized value of `D`.
pub const D_SAMPLES: usize = 1000;

/// Tolerated violation of the final inequality.
pub const CHAIN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalReport {
    pub k: usize,
    pub mode: Sense,
    pub sigma_star: Subspace,
    pub s_k_value: f64,
    pub converged: bool,
    /// Finite-difference Riemannian gradient norm of S_k at Σ*.
    pub gradient_norm: f64,
    /// Max over test pairs of `|∮ R(X, X̄, Y, Z̄) dθ|` and of the swapped
    /// integral `|∮ R(Y, Z̄, X, X̄) dθ|`; `None` when `k = n`.
    pub nz1_residual: Option<f64>,
    /// Min over test `Z` of the second-order slack; `None` when `k = n`.
    pub nz2_margin: Option<f64>,
    /// Min over test `X` of `R(Σ*; X, X̄) − kD/(k+1) |X|²`.
    pub chain_margin: Option<f64>,
    /// Optimized and sampled surrogate for `min Ric_k`; an upper bound on
    /// the true minimum.
    pub d: Option<f64>,
}

fn require_ckl(t: &CurvatureTensor) -> Result<()> {
    if t.ckl() {
        Ok(())
    } else {
        Err(Error::NotCkl)
    }
}

/// Minimizes (or maximizes) `S_k` over Gr_k(C^n).
pub fn find_extremal_sk(t: &CurvatureTensor, k: usize, mode: Sense, opts: &OptimizerOptions) -> Result<Optimum> {
    require_ckl(t)?;
    grassmann::optimize_subspace(&ScalarKObjective { tensor: t }, k, mode, opts)
}

/// Critical-point residuals at `sigma_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NzCheck {
    pub nz1_residual: Option<f64>,
    pub nz2_margin: Option<f64>,
}

/// Evaluates both identities for `trials` random unit `Y ∈ Σ*` and
/// `Z ⊥ Σ*`. In `Sense::Max` mode the second inequality is reversed.
pub fn verify_nz_identities(
    t: &CurvatureTensor,
    sigma_star: &Subspace,
    mode: Sense,
    trials: usize,
    seed: u64,
) -> Result<NzCheck> {
    require_ckl(t)?;
    if sigma_star.ambient_dim() != t.n() {
        return Err(Error::Dimension {
            what: "subspace ambient dimension",
            expected: t.n(),
            got: sigma_star.ambient_dim(),
        });
    }
    let Some(perp) = sigma_star.complement() else {
        return Ok(NzCheck {
            nz1_residual: None,
            nz2_margin: None,
        });
    };
    let k = sigma_star.dim();
    let kf = k as f64;
    let v = sphere_volume(k)?;
    let proj = sigma_star.projector();
    // Σ_i R(E_i, Ē_i, a, b̄) and Σ_i R(a, b̄, E_i, Ē_i) as matrices in (a, b).
    let first = contract_base(t, &proj);
    let second = contract_fiber(t, &proj);
    let s_k = crate::linalg::pair(&first, &proj).re;
    let form = |m: &CMatrix, a: &CVector, b: &CVector| (a.transpose() * m * b.map(|z| z.conj()))[(0, 0)];
    let mut rng = rng::stream(seed, 0x4E5A);
    let mut residual: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for _ in 0..trials.max(1) {
        let y = sigma_star.random_unit_vector(&mut rng);
        let z = perp.random_unit_vector(&mut rng);
        residual = residual
            .max((form(&first, &y, &z) * (v / kf)).norm())
            .max((form(&second, &y, &z) * (v / kf)).norm());
        let lhs = v / kf * form(&first, &z, &z).re;
        let rhs = v / (kf * (kf + 1.0)) * s_k;
        let slack = match mode {
            Sense::Min => lhs - rhs,
            Sense::Max => rhs - lhs,
        };
        margin = margin.min(slack);
    }
    Ok(NzCheck {
        nz1_residual: Some(residual),
        nz2_margin: Some(margin),
    })
}

/// `min Ric_k(Σ)(X, X̄)` over Σ ∈ Gr_k and unit `X ∈ Σ`, from the
/// optimizer and [`D_SAMPLES`] random pairs, whichever is smaller.
pub fn min_ricci_k(t: &CurvatureTensor, k: usize, opts: &OptimizerOptions) -> Result<f64> {
    require_ckl(t)?;
    let opt = grassmann::optimize_subspace(&MinRicciKObjective { tensor: t }, k, Sense::Min, opts)?;
    let mut d = opt.value;
    let mut rng = rng::stream(opts.seed, 0xD5A3);
    for _ in 0..D_SAMPLES {
        let sigma = Subspace::random(t.n(), k, &mut rng);
        let x = sigma.random_unit_vector(&mut rng);
        d = d.min(ricci_k(t, &sigma, &x)?);
    }
    Ok(d)
}

/// Finds an S_k-extremal subspace and checks the critical-point identities.
pub fn analyze_extremal(
    t: &CurvatureTensor,
    k: usize,
    mode: Sense,
    opts: &OptimizerOptions,
    trials: usize,
) -> Result<ExtremalReport> {
    let opt = find_extremal_sk(t, k, mode, opts)?;
    let nz = verify_nz_identities(t, &opt.subspace, mode, trials, opts.seed)?;
    let gradient_norm = grassmann::fd_riemannian_gradient_norm(&ScalarKObjective { tensor: t }, opt.subspace.frame());
    Ok(ExtremalReport {
        k,
        mode,
        sigma_star: opt.subspace,
        s_k_value: opt.value,
        converged: opt.converged,
        gradient_norm,
        nz1_residual: nz.nz1_residual,
        nz2_margin: nz.nz2_margin,
        chain_margin: None,
        d: None,
    })
}

/// Checks `R(Σ*; X, X̄) ≥ kD/(k+1) |X|²` for `trials` random unit `X`.
///
/// `Sense::Min` is the positive case: `D = min Ric_k` must be positive and
/// Σ* minimizes S_k. `Sense::Max` is the negative case, run on `−R`: it
/// requires `max Ric_k < 0`, takes Σ* maximizing S_k, and reports `D`,
/// `s_k_value` and all margins for `−R`.
pub fn verify_uniform_from_rick(
    t: &CurvatureTensor,
    k: usize,
    mode: Sense,
    opts: &OptimizerOptions,
    trials: usize,
) -> Result<ExtremalReport> {
    require_ckl(t)?;
    let work = match mode {
        Sense::Min => t.clone(),
        Sense::Max => t.scaled(-1.0),
    };
    let d = min_ricci_k(&work, k, opts)?;
    if !(d > 0.0) {
        let (sign, extremum) = match mode {
            Sense::Min => ("positive", d),
            Sense::Max => ("negative", -d),
        };
        return Err(Error::HypothesisViolated(format!(
            "k-Ricci curvature is not {sign} (extremum found {extremum})"
        )));
    }
    let mut report = analyze_extremal(&work, k, Sense::Min, opts, trials)?;
    report.mode = mode;
    let bound = k as f64 * d / (k as f64 + 1.0);
    let mut rng = rng::stream(opts.seed, 0xC4A1);
    let mut margin = f64::INFINITY;
    for _ in 0..trials.max(1) {
        let x = rng::unit_sphere_vector(&mut rng, t.n());
        margin = margin.min(rc_form(&work, &report.sigma_star, &x)? - bound);
    }
    report.d = Some(d);
    report.chain_margin = Some(margin);
    Ok(report)
}

impl ExtremalReport {
    /// Whether the final inequality held within [`CHAIN_TOL`].
    pub fn chain_holds(&self) -> Option<bool> {
        self.chain_margin.map(|m| m >= -CHAIN_TOL)
    }
}
