//! Optimization over complex Grassmannians and positivity certificates.
//!
//! Every positivity notion for `R(Σ; σ) = Σ_ij R(E_i, Ē_i, e_j, ē_j)` is a
//! nested optimization over base subspaces `Σ ∈ Gr_k(C^n)` and fiber
//! subspaces `σ ∈ Gr_l(C^r)`. Whichever side is innermost is solved exactly:
//! the extremum of the trace of a Hermitian matrix compressed to an
//! l-dimensional subspace is the sum of its l extreme eigenvalues (Ky Fan).
//! The outer side is optimized by Riemannian gradient ascent with a QR
//! retraction from random starting frames.
//!
//! | kind        | quantity at a point          | outer variable |
//! |-------------|------------------------------|----------------|
//! | uniform-RC  | `max_Σ min_σ R(Σ; σ)`        | Σ              |
//! | RC          | `min_σ max_Σ R(Σ; σ)`        | σ              |
//! | BC          | `min_Σ max_σ R(Σ; σ)`        | Σ              |
//! | uniform-BC  | `max_σ min_Σ R(Σ; σ)`        | σ              |
//! | Griffiths   | `min_Σ min_σ R(Σ; σ)`        | Σ              |
//!
//! Ky Fan sums are not differentiable where the selected eigenvalues meet
//! the rest of the spectrum, and max-min optima typically sit exactly there.
//! The ascent therefore first follows a Fermi-Dirac smoothing of the Ky Fan
//! sum at decreasing temperatures, then polishes on the exact objective
//! with eigen-perturbation gradients, falling back to central finite
//! differences when the relevant eigenvalue gap is below `1e-8`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::{contract_base, contract_fiber};
use crate::linalg::{self, CMatrix, HermitianEigen};
use crate::rng::{self, Rng};
use crate::subspace::Subspace;
use crate::tensor::CurvatureTensor;

/// Eigenvalue gap below which eigen-perturbation gradients are not trusted.
pub const GAP_TOL: f64 = 1e-8;

/// Step of the central finite-difference gradient.
pub const FD_STEP: f64 = 1e-5;

/// Direction of an outer optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Max => 1.0,
            Sense::Min => -1.0,
        }
    }

    /// True when `a` is strictly better than `b`.
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Max => a > b,
            Sense::Min => a < b,
        }
    }
}

/// Which end of the spectrum a Ky Fan sum collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

/// Positivity notions certified by [`certify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PositivityKind {
    UniformRc,
    Rc,
    Bc,
    UniformBc,
    Griffiths,
}

impl PositivityKind {
    pub const ALL: [PositivityKind; 5] = [
        PositivityKind::UniformRc,
        PositivityKind::Rc,
        PositivityKind::Bc,
        PositivityKind::UniformBc,
        PositivityKind::Griffiths,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PositivityKind::UniformRc => "uniform-rc",
            PositivityKind::Rc => "rc",
            PositivityKind::Bc => "bc",
            PositivityKind::UniformBc => "uniform-bc",
            PositivityKind::Griffiths => "griffiths",
        }
    }

    /// Whether the outermost optimization (over the outer variable at a
    /// point) is a maximization.
    pub fn outer_sense(self) -> Sense {
        match self {
            PositivityKind::UniformRc | PositivityKind::UniformBc => Sense::Max,
            _ => Sense::Min,
        }
    }
}

impl fmt::Display for PositivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for PositivityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .map(|c| if c == '_' { '-' } else { c.to_ascii_lowercase() })
            .collect();
        PositivityKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Shape(format!("unknown positivity kind `{s}`")))
    }
}

/// Knobs of the outer optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    pub restarts: usize,
    /// Stop when one accepted step changes the objective by less than this.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Run the smoothed continuation before the exact polish.
    pub smoothing: bool,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            tol: 1e-10,
            max_iter: 500,
            seed: 0,
            smoothing: true,
        }
    }
}

impl OptimizerOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

/// A real function on Gr_k(C^n), given through orthonormal n×k frames.
///
/// Gradients are Euclidean gradients `G` in the real inner product
/// `Re tr(Gᴴ dY)`; the optimizer projects them onto the horizontal space.
pub trait SubspaceObjective {
    fn ambient_dim(&self) -> usize;

    fn value(&self, frame: &CMatrix) -> f64;

    /// `None` where the objective is not (reliably) differentiable; the
    /// optimizer then uses finite differences.
    fn gradient(&self, _frame: &CMatrix) -> Option<CMatrix> {
        None
    }

    /// Gradient of the active eigen-branch even where branches nearly
    /// cross, an element of the Clarke subdifferential in the limit. Used
    /// by the final nonsmooth polish.
    fn subgradient(&self, frame: &CMatrix) -> Option<CMatrix> {
        self.gradient(frame)
    }

    /// Smooth surrogate at temperature `tau`, with its gradient.
    fn smoothed(&self, _frame: &CMatrix, _tau: f64) -> Option<(f64, CMatrix)> {
        None
    }

    /// Magnitude used to scale the smoothing temperatures; zero disables
    /// smoothing.
    fn smoothing_scale(&self) -> f64 {
        0.0
    }
}

/// `Σ ↦` sum of the `l` smallest (or largest) eigenvalues of the Σ-summed
/// direction matrix `A_Σ`. This is `min_σ R(Σ; σ)` (or `max_σ`) over
/// `σ ∈ Gr_l(C^r)`.
#[derive(Debug, Clone, Copy)]
pub struct KyFanObjective<'a> {
    pub tensor: &'a CurvatureTensor,
    pub l: usize,
    pub extreme: Extreme,
}

impl KyFanObjective<'_> {
    fn matrix(&self, frame: &CMatrix) -> CMatrix {
        linalg::hermitian_part(&contract_base(self.tensor, &(frame * frame.adjoint())))
    }

    fn branch_gradient(&self, frame: &CMatrix, check_gap: bool) -> Option<CMatrix> {
        let eig = HermitianEigen::new(&self.matrix(frame));
        let r = eig.values.len();
        let mut weights = vec![0.0; r];
        if check_gap && self.l < r {
            let cut = match self.extreme {
                Extreme::Smallest => self.l,
                Extreme::Largest => r - self.l,
            };
            if eig.values[cut] - eig.values[cut - 1] <= GAP_TOL {
                return None;
            }
        }
        match self.extreme {
            Extreme::Smallest => weights[..self.l].fill(1.0),
            Extreme::Largest => weights[r - self.l..].fill(1.0),
        }
        Some(self.gradient_from_weights(frame, &eig, &weights))
    }

    fn select(&self, values: &[f64]) -> f64 {
        let r = values.len();
        match self.extreme {
            Extreme::Smallest => values[..self.l].iter().sum(),
            Extreme::Largest => values[r - self.l..].iter().sum(),
        }
    }

    /// `G = 2 conj(B) Y` with `B_ij = Σ_αβ R_{i j̄ α β̄} W_βα` for the
    /// eigen-weighted fiber matrix `W`.
    fn gradient_from_weights(&self, frame: &CMatrix, eig: &HermitianEigen, weights: &[f64]) -> CMatrix {
        let r = weights.len();
        let mut w = CMatrix::zeros(r, r);
        for (m, &wt) in weights.iter().enumerate() {
            if wt == 0.0 {
                continue;
            }
            let v = eig.vectors.column(m);
            w += (v * v.adjoint()).scale(wt);
        }
        let b = contract_fiber(self.tensor, &w.transpose());
        (b.map(|z| z.conj()) * frame).scale(2.0)
    }
}

impl SubspaceObjective for KyFanObjective<'_> {
    fn ambient_dim(&self) -> usize {
        self.tensor.n()
    }

    fn value(&self, frame: &CMatrix) -> f64 {
        self.select(&HermitianEigen::new(&self.matrix(frame)).values)
    }

    fn gradient(&self, frame: &CMatrix) -> Option<CMatrix> {
        self.branch_gradient(frame, true)
    }

    fn subgradient(&self, frame: &CMatrix) -> Option<CMatrix> {
        self.branch_gradient(frame, false)
    }

    fn smoothed(&self, frame: &CMatrix, tau: f64) -> Option<(f64, CMatrix)> {
        let eig = HermitianEigen::new(&self.matrix(frame));
        let (value, weights) = match self.extreme {
            Extreme::Smallest => fermi_dirac_sum(&eig.values, self.l, tau),
            Extreme::Largest => {
                let neg: Vec<f64> = eig.values.iter().map(|x| -x).collect();
                let (v, w) = fermi_dirac_sum(&neg, self.l, tau);
                (-v, w)
            }
        };
        Some((value, self.gradient_from_weights(frame, &eig, &weights)))
    }

    fn smoothing_scale(&self) -> f64 {
        self.tensor.max_abs() * self.tensor.n() as f64
    }
}

/// Fermi-Dirac smoothing of the sum of the `l` smallest entries of `values`:
///
/// ```text
/// f_τ(λ) = min { Σ w_i λ_i + τ Σ [w_i ln w_i + (1 − w_i) ln(1 − w_i)] : 0 ≤ w ≤ 1, Σ w = l }
/// ```
///
/// Returns the value and the optimal weights `w_i = 1 / (1 + e^{(λ_i − μ)/τ})`,
/// which are also `∂f_τ/∂λ_i`. `f_τ` lies within `τ r ln 2` below the exact sum.
pub fn fermi_dirac_sum(values: &[f64], l: usize, tau: f64) -> (f64, Vec<f64>) {
    let r = values.len();
    if l >= r {
        return (values.iter().sum(), vec![1.0; r]);
    }
    let occupation = |mu: f64| -> f64 { values.iter().map(|&x| logistic((mu - x) / tau)).sum() };
    let lo0 = values.iter().cloned().fold(f64::INFINITY, f64::min) - 60.0 * tau;
    let hi0 = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 60.0 * tau;
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if occupation(mid) < l as f64 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let weights: Vec<f64> = values.iter().map(|&x| logistic((mu - x) / tau)).collect();
    let entropy: f64 = weights.iter().map(|&w| xlogx(w) + xlogx(1.0 - w)).sum();
    let linear: f64 = weights.iter().zip(values).map(|(w, x)| w * x).sum();
    (linear + tau * entropy, weights)
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

/// `Σ ↦ S_k(Σ)` on a tangent-shaped tensor.
#[derive(Debug, Clone, Copy)]
pub struct ScalarKObjective<'a> {
    pub tensor: &'a CurvatureTensor,
}

impl SubspaceObjective for ScalarKObjective<'_> {
    fn ambient_dim(&self) -> usize {
        self.tensor.n()
    }

    fn value(&self, frame: &CMatrix) -> f64 {
        let p = frame * frame.adjoint();
        linalg::pair(&contract_base(self.tensor, &p), &p).re
    }

    fn gradient(&self, frame: &CMatrix) -> Option<CMatrix> {
        let p = frame * frame.adjoint();
        let b = contract_fiber(self.tensor, &p) + contract_base(self.tensor, &p);
        Some((b.map(|z| z.conj()) * frame).scale(2.0))
    }
}

/// `Σ ↦ min { Ric_k(Σ)(X, X̄) : X ∈ Σ, |X| = 1 }`, the smallest eigenvalue of
/// `K_ab = Σ_c R(E_a, Ē_b, E_c, Ē_c)`.
#[derive(Debug, Clone, Copy)]
pub struct MinRicciKObjective<'a> {
    pub tensor: &'a CurvatureTensor,
}

impl MinRicciKObjective<'_> {
    fn parts(&self, frame: &CMatrix) -> (CMatrix, HermitianEigen) {
        let p = frame * frame.adjoint();
        let n_mat = contract_fiber(self.tensor, &p);
        let k_mat = linalg::hermitian_part(&(frame.transpose() * &n_mat * frame.map(|z| z.conj())));
        (n_mat, HermitianEigen::new(&k_mat))
    }

    fn branch_gradient(&self, frame: &CMatrix, check_gap: bool) -> Option<CMatrix> {
        let (n_mat, eig) = self.parts(frame);
        if check_gap && eig.values.len() > 1 && eig.values[1] - eig.values[0] <= GAP_TOL {
            return None;
        }
        // λ = Σ N_ij X_i conj(X_j) with X = Y conj(w); both Y-dependences
        // contribute.
        let w = eig.vectors.column(0).into_owned();
        let x = frame * w.map(|z| z.conj());
        let g1 = (n_mat.map(|z| z.conj()) * &x) * w.transpose();
        let b = contract_base(self.tensor, &linalg::outer(&x));
        let g2 = b.map(|z| z.conj()) * frame;
        Some((g1 + g2).scale(2.0))
    }
}

impl SubspaceObjective for MinRicciKObjective<'_> {
    fn ambient_dim(&self) -> usize {
        self.tensor.n()
    }

    fn value(&self, frame: &CMatrix) -> f64 {
        self.parts(frame).1.min()
    }

    fn gradient(&self, frame: &CMatrix) -> Option<CMatrix> {
        self.branch_gradient(frame, true)
    }

    fn subgradient(&self, frame: &CMatrix) -> Option<CMatrix> {
        self.branch_gradient(frame, false)
    }
}

/// Closure-backed objective, mostly for tests and ad-hoc functions.
pub struct FnObjective<F: Fn(&CMatrix) -> f64> {
    pub ambient_dim: usize,
    pub f: F,
}

impl<F: Fn(&CMatrix) -> f64> SubspaceObjective for FnObjective<F> {
    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn value(&self, frame: &CMatrix) -> f64 {
        (self.f)(frame)
    }
}

/// Central finite-difference Euclidean gradient on the Stiefel chart:
/// `G_ic = ∂/∂Re Y_ic + i ∂/∂Im Y_ic` of `φ(qf(Y + h E))`.
pub fn fd_gradient(obj: &dyn SubspaceObjective, frame: &CMatrix, h: f64) -> CMatrix {
    let (n, k) = frame.shape();
    let mut g = CMatrix::zeros(n, k);
    for i in 0..n {
        for c in 0..k {
            let mut parts = [0.0; 2];
            for (slot, dir) in [Complex64::new(h, 0.0), Complex64::new(0.0, h)].into_iter().enumerate() {
                let mut plus = frame.clone();
                plus[(i, c)] += dir;
                let mut minus = frame.clone();
                minus[(i, c)] -= dir;
                let fp = obj.value(&linalg::orthonormalize(plus));
                let fm = obj.value(&linalg::orthonormalize(minus));
                parts[slot] = (fp - fm) / (2.0 * h);
            }
            g[(i, c)] = Complex64::new(parts[0], parts[1]);
        }
    }
    g
}

/// Horizontal projection `(I − YYᴴ) G`.
pub fn horizontal(frame: &CMatrix, g: &CMatrix) -> CMatrix {
    g - frame * (frame.adjoint() * g)
}

/// Norm of the Riemannian gradient at `frame`, analytic when available.
pub fn riemannian_gradient_norm(obj: &dyn SubspaceObjective, frame: &CMatrix) -> f64 {
    let g = obj.gradient(frame).unwrap_or_else(|| fd_gradient(obj, frame, FD_STEP));
    horizontal(frame, &g).norm()
}

/// Norm of the finite-difference Riemannian gradient, regardless of whether
/// an analytic gradient exists.
pub fn fd_riemannian_gradient_norm(obj: &dyn SubspaceObjective, frame: &CMatrix) -> f64 {
    horizontal(frame, &fd_gradient(obj, frame, FD_STEP)).norm()
}

/// Result of [`optimize_subspace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub subspace: Subspace,
    pub value: f64,
    /// Whether the winning restart stopped on the tolerance rather than the
    /// iteration cap.
    pub converged: bool,
    /// Final value of each restart, in restart order.
    pub restart_values: Vec<f64>,
    pub best_restart: usize,
}

struct AscentOutcome {
    frame: CMatrix,
    value: f64,
    converged: bool,
}

/// Local chart `Z ↦ span(Y₀ + Y₀⊥ Z)` of the Grassmannian around `Y₀`,
/// with `Z` flattened to real coordinates (real parts, then imaginary).
struct Chart {
    base: CMatrix,
    perp: CMatrix,
}

struct ChartPoint {
    x: DVector<f64>,
    frame: CMatrix,
    /// Minimized quantity `−sign · φ`.
    cost: f64,
    grad: DVector<f64>,
}

impl Chart {
    fn at(frame: &CMatrix) -> Self {
        let perp = Subspace::from_frame_unchecked(frame.clone())
            .complement()
            .expect("proper subspace")
            .into_frame();
        Self { base: frame.clone(), perp }
    }

    fn dim(&self) -> usize {
        2 * self.perp.ncols() * self.base.ncols()
    }

    fn eval(&self, x: DVector<f64>, sign: f64, eval: &dyn Fn(&CMatrix) -> (f64, CMatrix)) -> ChartPoint {
        let (m, k) = (self.perp.ncols(), self.base.ncols());
        let half = m * k;
        let z = CMatrix::from_fn(m, k, |i, j| Complex64::new(x[i + m * j], x[half + i + m * j]));
        let spanning = &self.base + &self.perp * z;
        let frame = linalg::orthonormalize(spanning.clone());
        let (value, g) = eval(&frame);
        // spanning = frame · R, and φ only sees the span, so
        // ∇_Z = Y₀⊥ᴴ (I − YYᴴ) G R⁻ᴴ.
        let r = frame.adjoint() * &spanning;
        let r_inv_adj = r.try_inverse().map(|ri| ri.adjoint()).unwrap_or_else(|| CMatrix::identity(k, k));
        let gz = self.perp.adjoint() * horizontal(&frame, &g) * r_inv_adj;
        let mut grad = DVector::zeros(2 * half);
        for j in 0..k {
            for i in 0..m {
                grad[i + m * j] = -sign * gz[(i, j)].re;
                grad[half + i + m * j] = -sign * gz[(i, j)].im;
            }
        }
        ChartPoint {
            x,
            frame,
            cost: -sign * value,
            grad,
        }
    }
}

/// Weak Wolfe line search by bracketing and bisection. Falls back to the
/// best sufficient-decrease point when curvature cannot be certified.
fn line_search(
    chart: &Chart,
    from: &ChartPoint,
    dir: &DVector<f64>,
    sign: f64,
    eval: &dyn Fn(&CMatrix) -> (f64, CMatrix),
) -> Option<ChartPoint> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let slope = from.grad.dot(dir);
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut t = 1.0;
    let mut fallback: Option<ChartPoint> = None;
    for _ in 0..60 {
        let cand = chart.eval(&from.x + dir * t, sign, eval);
        if !(cand.cost <= from.cost + C1 * t * slope) {
            hi = t;
        } else if cand.grad.dot(dir) < C2 * slope {
            lo = t;
            if fallback.as_ref().is_none_or(|f| cand.cost < f.cost) {
                fallback = Some(cand);
            }
        } else {
            return Some(cand);
        }
        t = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * t };
        if hi.is_finite() && hi - lo <= 1e-14 * hi {
            break;
        }
    }
    fallback.filter(|f| f.cost < from.cost)
}

/// BFGS on successive charts, minimizing `−sign · φ`. Plain BFGS with a
/// weak Wolfe search also makes steady progress on nonsmooth eigenvalue
/// objectives, which is what the final polish relies on.
fn bfgs(start: CMatrix, sign: f64, eval: &dyn Fn(&CMatrix) -> (f64, CMatrix), tol: f64, max_iter: usize) -> AscentOutcome {
    let mut chart = Chart::at(&start);
    let dim = chart.dim();
    let mut cur = chart.eval(DVector::zeros(dim), sign, eval);
    let mut inv_hess: Option<DMatrix<f64>> = None;
    let mut small_steps = 0;
    let done = |p: ChartPoint, converged| AscentOutcome {
        frame: p.frame,
        value: -sign * p.cost,
        converged,
    };
    for _ in 0..max_iter {
        let gn = cur.grad.norm();
        if !(gn > 0.0) {
            return done(cur, true);
        }
        let mut dir = match &inv_hess {
            Some(h) => -(h * &cur.grad),
            None => &cur.grad * (-0.1 / gn),
        };
        if !(cur.grad.dot(&dir) < 0.0) {
            inv_hess = None;
            dir = &cur.grad * (-0.1 / gn);
        }
        let Some(next) = line_search(&chart, &cur, &dir, sign, eval) else {
            // No decrease at working precision: stationary.
            return done(cur, true);
        };
        let s = &next.x - &cur.x;
        let y = &next.grad - &cur.grad;
        let sy = s.dot(&y);
        if sy > 0.0 {
            let h = inv_hess.get_or_insert_with(|| DMatrix::identity(dim, dim) * (sy / y.dot(&y)));
            let rho = 1.0 / sy;
            let hy = &*h * &y;
            let yhy = y.dot(&hy);
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            *h += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        let decrease = cur.cost - next.cost;
        cur = next;
        if decrease < tol {
            small_steps += 1;
            if small_steps >= 3 {
                return done(cur, true);
            }
        } else {
            small_steps = 0;
        }
        if cur.x.norm() > 1.0 {
            chart = Chart::at(&cur.frame);
            cur = chart.eval(DVector::zeros(dim), sign, eval);
            inv_hess = None;
        }
    }
    done(cur, false)
}

/// Smoothing temperatures relative to the objective's scale.
const SMOOTHING_SCHEDULE: [f64; 2] = [1e-2, 1e-4];

fn run_restart(obj: &dyn SubspaceObjective, k: usize, sense: Sense, opts: &OptimizerOptions, rng: &mut Rng) -> AscentOutcome {
    let n = obj.ambient_dim();
    let sign = sense.sign();
    let mut frame = Subspace::random(n, k, rng).into_frame();
    let scale = obj.smoothing_scale();
    if opts.smoothing && scale > 0.0 {
        for rel in SMOOTHING_SCHEDULE {
            let tau = rel * scale;
            let eval = |y: &CMatrix| {
                obj.smoothed(y, tau)
                    .unwrap_or_else(|| (obj.value(y), fd_gradient(obj, y, FD_STEP)))
            };
            frame = bfgs(frame, sign, &eval, opts.tol, opts.max_iter).frame;
        }
    }
    let eval = |y: &CMatrix| {
        let g = obj.subgradient(y).unwrap_or_else(|| fd_gradient(obj, y, FD_STEP));
        (obj.value(y), g)
    };
    bfgs(frame, sign, &eval, opts.tol * 1e-6, opts.max_iter)
}

/// Optimizes `obj` over Gr_k(C^n) from `opts.restarts` random starts and
/// returns the best restart (first one wins ties). Restart `s` draws from
/// stream `s` of `opts.seed`.
pub fn optimize_subspace(obj: &dyn SubspaceObjective, k: usize, sense: Sense, opts: &OptimizerOptions) -> Result<Optimum> {
    optimize_subspace_streams(obj, k, sense, opts, 0)
}

fn optimize_subspace_streams(
    obj: &dyn SubspaceObjective,
    k: usize,
    sense: Sense,
    opts: &OptimizerOptions,
    stream_base: u64,
) -> Result<Optimum> {
    let n = obj.ambient_dim();
    if k == 0 || k > n {
        return Err(Error::OutOfRange {
            what: "subspace dimension k",
            value: k,
            lo: 1,
            hi: n,
        });
    }
    if k == n {
        // Gr_n(C^n) is a point.
        let full = Subspace::full(n);
        let value = obj.value(full.frame());
        return Ok(Optimum {
            subspace: full,
            value,
            converged: true,
            restart_values: vec![value],
            best_restart: 0,
        });
    }
    let restarts = opts.restarts.max(1);
    let mut best: Option<(usize, AscentOutcome)> = None;
    let mut restart_values = Vec::with_capacity(restarts);
    for s in 0..restarts {
        let mut rng = rng::stream(opts.seed, stream_base + s as u64);
        let out = run_restart(obj, k, sense, opts, &mut rng);
        restart_values.push(out.value);
        let replace = match &best {
            None => true,
            Some((_, b)) => sense.better(out.value, b.value),
        };
        if replace {
            best = Some((s, out));
        }
    }
    let (best_restart, out) = best.expect("at least one restart");
    Ok(Optimum {
        subspace: Subspace::from_frame_unchecked(out.frame),
        value: out.value,
        converged: out.converged,
        restart_values,
        best_restart,
    })
}

/// `min_σ Σ_j e_jᴴ A e_j` over l-dimensional fiber subspaces (in the form
/// convention of [`crate::DirectionMatrix`]): the sum of the `l` smallest
/// eigenvalues, with the spanning eigenvectors as witness.
pub fn inner_min_over_fibers(a: &crate::DirectionMatrix, l: usize) -> Result<(f64, Subspace)> {
    inner_extreme(a.matrix(), l, Extreme::Smallest)
}

/// Counterpart of [`inner_min_over_fibers`] for the maximum.
pub fn inner_max_over_fibers(a: &crate::DirectionMatrix, l: usize) -> Result<(f64, Subspace)> {
    inner_extreme(a.matrix(), l, Extreme::Largest)
}

fn inner_extreme(m: &CMatrix, l: usize, extreme: Extreme) -> Result<(f64, Subspace)> {
    let r = m.nrows();
    if l == 0 || l > r {
        return Err(Error::OutOfRange {
            what: "fiber subspace dimension l",
            value: l,
            lo: 1,
            hi: r,
        });
    }
    let eig = HermitianEigen::new(m);
    let (value, start) = match extreme {
        Extreme::Smallest => (eig.sum_smallest(l), 0),
        Extreme::Largest => (eig.sum_largest(l), r - l),
    };
    // eigenvectors of the matrix are conjugates of the extremal fiber vectors
    let frame = eig.vectors.columns(start, l).map(|z| z.conj());
    Ok((value, Subspace::from_frame_unchecked(frame)))
}

/// Optimal subspaces at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointWitness {
    pub value: f64,
    /// Base subspace Σ (dimension k).
    pub base: Subspace,
    /// Fiber subspace σ (dimension l).
    pub fiber: Subspace,
    pub converged: bool,
    pub restart_values: Vec<f64>,
}

/// Outcome of [`certify`].
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCertificate {
    pub kind: PositivityKind,
    pub k: usize,
    pub l: usize,
    /// Minimum over points of the per-point optimum.
    pub value: f64,
    pub positive: bool,
    pub points: Vec<PointWitness>,
    pub restarts: usize,
    pub converged: bool,
    pub seed: u64,
}

fn check_kl(t: &CurvatureTensor, k: usize, l: usize) -> Result<()> {
    if k == 0 || k > t.n() {
        return Err(Error::OutOfRange {
            what: "base subspace dimension k",
            value: k,
            lo: 1,
            hi: t.n(),
        });
    }
    if l == 0 || l > t.r() {
        return Err(Error::OutOfRange {
            what: "fiber subspace dimension l",
            value: l,
            lo: 1,
            hi: t.r(),
        });
    }
    Ok(())
}

fn check_points(points: &[CurvatureTensor]) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::Shape("at least one point is required".into()));
    };
    if points.iter().any(|p| p.n() != first.n() || p.r() != first.r()) {
        return Err(Error::Shape("all points must share n and r".into()));
    }
    Ok(())
}

/// Certifies `kind` (k, l)-positivity over a finite list of points: the
/// per-point min-max quantity is optimized at each point and the minimum
/// across points is reported. Point `p`, restart `s` uses random stream
/// `p · 2³² + s` of `opts.seed`.
pub fn certify(
    points: &[CurvatureTensor],
    kind: PositivityKind,
    k: usize,
    l: usize,
    opts: &OptimizerOptions,
) -> Result<PositivityCertificate> {
    check_points(points)?;
    check_kl(&points[0], k, l)?;
    let mut witnesses = Vec::with_capacity(points.len());
    for (p, t) in points.iter().enumerate() {
        witnesses.push(certify_point(t, kind, k, l, opts, (p as u64) << 32)?);
    }
    let value = witnesses.iter().map(|w| w.value).fold(f64::INFINITY, f64::min);
    Ok(PositivityCertificate {
        kind,
        k,
        l,
        value,
        positive: value > 0.0,
        converged: witnesses.iter().all(|w| w.converged),
        points: witnesses,
        restarts: opts.restarts.max(1),
        seed: opts.seed,
    })
}

fn certify_point(
    t: &CurvatureTensor,
    kind: PositivityKind,
    k: usize,
    l: usize,
    opts: &OptimizerOptions,
    stream_base: u64,
) -> Result<PointWitness> {
    use PositivityKind::*;
    let sense = kind.outer_sense();
    let (outer_base, extreme) = match kind {
        UniformRc | Griffiths => (true, Extreme::Smallest),
        Bc => (true, Extreme::Largest),
        Rc => (false, Extreme::Largest),
        UniformBc => (false, Extreme::Smallest),
    };
    if outer_base {
        let obj = KyFanObjective { tensor: t, l, extreme };
        let opt = optimize_subspace_streams(&obj, k, sense, opts, stream_base)?;
        let a = contract_base(t, &opt.subspace.projector());
        let (inner, fiber) = inner_extreme(&linalg::hermitian_part(&a), l, extreme)?;
        debug_assert!((inner - opt.value).abs() <= 1e-9 * (1.0 + inner.abs()));
        Ok(PointWitness {
            value: opt.value,
            base: opt.subspace,
            fiber,
            converged: opt.converged,
            restart_values: opt.restart_values,
        })
    } else {
        let swapped = t.swapped();
        let obj = KyFanObjective { tensor: &swapped, l: k, extreme };
        let opt = optimize_subspace_streams(&obj, l, sense, opts, stream_base)?;
        let b = contract_base(&swapped, &opt.subspace.projector());
        let (_, base) = inner_extreme(&linalg::hermitian_part(&b), k, extreme)?;
        Ok(PointWitness {
            value: opt.value,
            base,
            fiber: opt.subspace,
            converged: opt.converged,
            restart_values: opt.restart_values,
        })
    }
}

/// Sampling oracle for [`certify`]. Every outer Grassmannian optimization
/// is replaced by `resolution` random samples: the first half Haar-uniform,
/// the rest Gaussian perturbations of the incumbent with a radius shrinking
/// geometrically from 0.3 to 1e-4. The inner optimization stays spectral,
/// with the summed matrix assembled by a plain loop over components. Every
/// value is attained at a sampled subspace, so for max-outer kinds the
/// result is a lower bound of the true per-point optimum and for min-outer
/// kinds an upper bound.
pub fn brute_force_certify(
    points: &[CurvatureTensor],
    kind: PositivityKind,
    k: usize,
    l: usize,
    resolution: usize,
    seed: u64,
) -> Result<f64> {
    use PositivityKind::*;
    check_points(points)?;
    check_kl(&points[0], k, l)?;
    let sense = kind.outer_sense();
    let resolution = resolution.max(1);
    let global = resolution.div_ceil(2);
    let mut overall = f64::INFINITY;
    for (p, t) in points.iter().enumerate() {
        let mut rng = rng::stream(seed ^ 0xB5AD_4ECE_DA1C_E2A9, p as u64);
        let (n, r) = (t.n(), t.r());
        let (dim, sub) = match kind {
            UniformRc | Griffiths | Bc => (n, k),
            Rc | UniformBc => (r, l),
        };
        let value = |frame: &CMatrix| -> f64 {
            let proj = frame * frame.adjoint();
            match kind {
                UniformRc | Griffiths | Bc => {
                    let m = summed_matrix(r, |a, b| {
                        let mut s = Complex64::new(0.0, 0.0);
                        for i in 0..n {
                            for j in 0..n {
                                s += t.get(i, j, a, b) * proj[(i, j)];
                            }
                        }
                        s
                    });
                    let eig = HermitianEigen::new(&m);
                    if kind == Bc { eig.sum_largest(l) } else { eig.sum_smallest(l) }
                }
                Rc | UniformBc => {
                    let m = summed_matrix(n, |i, j| {
                        let mut s = Complex64::new(0.0, 0.0);
                        for a in 0..r {
                            for b in 0..r {
                                s += t.get(i, j, a, b) * proj[(a, b)];
                            }
                        }
                        s
                    });
                    let eig = HermitianEigen::new(&m);
                    if kind == Rc { eig.sum_largest(k) } else { eig.sum_smallest(k) }
                }
            }
        };
        let mut best_frame = Subspace::random(dim, sub, &mut rng).into_frame();
        let mut best = value(&best_frame);
        for _ in 1..global {
            let frame = Subspace::random(dim, sub, &mut rng).into_frame();
            let v = value(&frame);
            if sense.better(v, best) {
                best = v;
                best_frame = frame;
            }
        }
        let local = resolution - global;
        for s in 0..local {
            let radius = 0.3 * libm::pow(1e-4 / 0.3, s as f64 / local.max(2) as f64);
            let step = rng::complex_normal_matrix(&mut rng, dim, sub) * Complex64::new(radius, 0.0);
            let frame = linalg::orthonormalize(&best_frame + step);
            let v = value(&frame);
            if sense.better(v, best) {
                best = v;
                best_frame = frame;
            }
        }
        overall = overall.min(best);
    }
    Ok(overall)
}

fn summed_matrix(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            m[(a, b)] = f(a, b);
        }
    }
    linalg::hermitian_part(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{averaged_form, direction_matrix_sum, holo_sectional, scalar_k};
    use crate::linalg::CVector;
    use crate::tensor::dual_tensor;
    use crate::zoo;

    fn quick() -> OptimizerOptions {
        OptimizerOptions::default().with_restarts(6)
    }

    #[test]
    fn ky_fan_diagonal_example() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let (v, sigma) = inner_extreme(&m, 2, Extreme::Smallest).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
        // σ = span(e₂, e₃): no weight on e₁
        let p = sigma.projector();
        assert!(p[(0, 0)].norm() < 1e-14);
        assert!((p[(1, 1)].re - 1.0).abs() < 1e-14 && (p[(2, 2)].re - 1.0).abs() < 1e-14);
        for l in 1..=3 {
            let (v, _) = inner_extreme(&CMatrix::identity(3, 3), l, Extreme::Smallest).unwrap();
            assert!((v - l as f64).abs() < 1e-14);
        }
        assert!(inner_extreme(&m, 0, Extreme::Smallest).is_err());
        assert!(inner_extreme(&m, 4, Extreme::Smallest).is_err());
    }

    #[test]
    fn ky_fan_witness_attains_value() {
        let t = zoo::random_hermitian(3, 4, 2);
        let mut r = rng::seeded(3);
        let sigma = Subspace::random(3, 2, &mut r);
        let a = direction_matrix_sum(&t, &sigma).unwrap();
        for l in 1..=4 {
            let (lo, wlo) = inner_min_over_fibers(&a, l).unwrap();
            let (hi, whi) = inner_max_over_fibers(&a, l).unwrap();
            assert!((averaged_form(&t, &sigma, &wlo).unwrap() - lo).abs() < 1e-12);
            assert!((averaged_form(&t, &sigma, &whi).unwrap() - hi).abs() < 1e-12);
            for _ in 0..200 {
                let f = Subspace::random(4, l, &mut r);
                let v = a.compressed_trace(&f).unwrap();
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn fermi_dirac_bounds() {
        let vals = [-1.0, 0.5, 0.5, 2.0];
        for l in 1..4 {
            let exact: f64 = vals[..l].iter().sum();
            for tau in [1e-1, 1e-3, 1e-6] {
                let (v, w) = fermi_dirac_sum(&vals, l, tau);
                assert!(v <= exact + 1e-12);
                assert!(v >= exact - tau * 4.0 * core::f64::consts::LN_2 - 1e-12);
                assert!((w.iter().sum::<f64>() - l as f64).abs() < 1e-9);
            }
        }
    }

    fn check_gradient(obj: &dyn SubspaceObjective, frame: &CMatrix) {
        let g = horizontal(frame, &obj.gradient(frame).expect("differentiable here"));
        let fd = horizontal(frame, &fd_gradient(obj, frame, 1e-6));
        let err = (&g - &fd).norm();
        assert!(err <= 1e-6 * (1.0 + g.norm()), "analytic {g} vs fd {fd}");
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let t = zoo::random_ckl(4, 13);
        let bundle = zoo::random_hermitian(4, 3, 14);
        let mut r = rng::seeded(15);
        for k in 1..4 {
            let y = Subspace::random(4, k, &mut r).into_frame();
            check_gradient(&ScalarKObjective { tensor: &t }, &y);
            check_gradient(&MinRicciKObjective { tensor: &t }, &y);
            for l in 1..=3 {
                for extreme in [Extreme::Smallest, Extreme::Largest] {
                    check_gradient(&KyFanObjective { tensor: &bundle, l, extreme }, &y);
                }
            }
        }
    }

    #[test]
    fn smoothed_gradient_matches_finite_differences() {
        let bundle = zoo::random_hermitian(3, 3, 16);
        let mut r = rng::seeded(17);
        let y = Subspace::random(3, 2, &mut r).into_frame();
        for extreme in [Extreme::Smallest, Extreme::Largest] {
            let obj = KyFanObjective { tensor: &bundle, l: 2, extreme };
            let tau = 0.05;
            let smooth = FnObjective {
                ambient_dim: 3,
                f: |f: &CMatrix| obj.smoothed(f, tau).unwrap().0,
            };
            let g = horizontal(&y, &obj.smoothed(&y, tau).unwrap().1);
            let fd = horizontal(&y, &fd_gradient(&smooth, &y, 1e-6));
            assert!((&g - &fd).norm() < 1e-6 * (1.0 + g.norm()));
        }
    }

    #[test]
    fn fubini_study_scalar_k_is_constant() {
        let fs = zoo::fubini_study(4, 2.0);
        for k in 1..=4 {
            let opt = optimize_subspace(&ScalarKObjective { tensor: &fs }, k, Sense::Min, &quick()).unwrap();
            assert!((opt.value - (k * (k + 1)) as f64).abs() < 1e-9);
            assert!((scalar_k(&fs, &opt.subspace).unwrap() - opt.value).abs() < 1e-9);
        }
    }

    #[test]
    fn product_minimum_of_h() {
        let p = zoo::product(&zoo::fubini_study(1, 2.0), &zoo::fubini_study(1, 2.0));
        let opt = optimize_subspace(&ScalarKObjective { tensor: &p }, 1, Sense::Min, &quick()).unwrap();
        assert!((opt.value - 1.0).abs() < 1e-8, "{}", opt.value);
        let x = opt.subspace.basis(0);
        assert!((holo_sectional(&p, &x).unwrap() - 1.0).abs() < 1e-8);
        assert!(opt.converged);
    }

    #[test]
    fn full_grassmannian_is_a_point() {
        let t = zoo::random_ckl(3, 1);
        let opt = optimize_subspace(&ScalarKObjective { tensor: &t }, 3, Sense::Max, &quick()).unwrap();
        assert_eq!(opt.subspace, Subspace::full(3));
        assert!((opt.value - crate::functionals::chern_scalar(&t).unwrap()).abs() < 1e-12);
        assert!(optimize_subspace(&ScalarKObjective { tensor: &t }, 4, Sense::Max, &quick()).is_err());
    }

    #[test]
    fn fubini_study_uniform_rc_value() {
        for n in 2..=4 {
            let fs = zoo::fubini_study(n, 2.0);
            for k in 1..n {
                let cert = certify(std::slice::from_ref(&fs), PositivityKind::UniformRc, k, 1, &quick()).unwrap();
                assert!((cert.value - k as f64).abs() < 1e-9, "n={n} k={k}: {}", cert.value);
                assert!(cert.positive);
            }
        }
    }

    #[test]
    fn zero_tensor_certificates() {
        let z = zoo::flat(2, 2);
        for kind in PositivityKind::ALL {
            let cert = certify(std::slice::from_ref(&z), kind, 1, 1, &quick()).unwrap();
            assert_eq!(cert.value, 0.0);
            assert!(!cert.positive);
            assert_eq!(brute_force_certify(std::slice::from_ref(&z), kind, 1, 1, 50, 0).unwrap(), 0.0);
        }
    }

    #[test]
    fn witnesses_attain_reported_values() {
        let t = zoo::random_hermitian(3, 3, 40);
        for kind in PositivityKind::ALL {
            let cert = certify(std::slice::from_ref(&t), kind, 2, 2, &quick()).unwrap();
            let w = &cert.points[0];
            assert_eq!((w.base.dim(), w.fiber.dim()), (2, 2));
            let v = averaged_form(&t, &w.base, &w.fiber).unwrap();
            assert!((v - cert.value).abs() < 1e-9, "{kind}: {v} vs {}", cert.value);
        }
    }

    #[test]
    fn weak_duality_holds() {
        let t = zoo::random_hermitian(3, 3, 41);
        let get = |kind| certify(std::slice::from_ref(&t), kind, 2, 1, &quick()).unwrap().value;
        let (urc, rc) = (get(PositivityKind::UniformRc), get(PositivityKind::Rc));
        let (ubc, bc) = (get(PositivityKind::UniformBc), get(PositivityKind::Bc));
        let gr = get(PositivityKind::Griffiths);
        assert!(urc <= rc + 1e-9, "{urc} {rc}");
        assert!(ubc <= bc + 1e-9, "{ubc} {bc}");
        assert!(gr <= urc + 1e-9 && gr <= ubc + 1e-9);
    }

    #[test]
    fn dual_certificate_negates() {
        let t = zoo::random_hermitian(3, 2, 42);
        let a = certify(std::slice::from_ref(&t), PositivityKind::UniformRc, 2, 1, &quick()).unwrap();
        let b = certify(&[dual_tensor(&t)], PositivityKind::Bc, 2, 1, &quick()).unwrap();
        assert!((a.value + b.value).abs() < 1e-10, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn multi_point_takes_minimum() {
        let fs = zoo::fubini_study(3, 2.0);
        let weak = zoo::fubini_study(3, 1.0);
        let cert = certify(&[fs.clone(), weak], PositivityKind::UniformRc, 1, 1, &quick()).unwrap();
        assert!((cert.value - 0.5).abs() < 1e-9);
        assert_eq!(cert.points.len(), 2);
        let twice = certify(&[fs.clone(), fs.clone()], PositivityKind::UniformRc, 1, 1, &quick()).unwrap();
        let once = certify(&[fs], PositivityKind::UniformRc, 1, 1, &quick()).unwrap();
        assert!((twice.value - once.value).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let t = zoo::random_hermitian(2, 3, 1);
        assert!(certify(std::slice::from_ref(&t), PositivityKind::Rc, 3, 1, &quick()).is_err());
        assert!(certify(std::slice::from_ref(&t), PositivityKind::Rc, 1, 4, &quick()).is_err());
        assert!(certify(&[], PositivityKind::Rc, 1, 1, &quick()).is_err());
        assert!(certify(&[t, zoo::flat(2, 2)], PositivityKind::Rc, 1, 1, &quick()).is_err());
        assert!("bogus".parse::<PositivityKind>().is_err());
        assert_eq!("Uniform_RC".parse::<PositivityKind>().unwrap(), PositivityKind::UniformRc);
    }

    #[test]
    fn brute_force_fubini_study() {
        let fs = zoo::fubini_study(3, 2.0);
        for k in 1..=2 {
            let v = brute_force_certify(std::slice::from_ref(&fs), PositivityKind::UniformRc, k, 1, 2000, 1).unwrap();
            assert!(v <= k as f64 + 1e-12 && v >= k as f64 - 5e-3, "{v}");
        }
    }
}
