//! Pointwise Chern curvature tensors in unitary frames.
//!
//! A [`CurvatureTensor`] stores the components `R_{i j̄ α β̄}` of the Chern
//! curvature of a Hermitian holomorphic bundle `(E, h)` over a Hermitian
//! manifold `(M, ω)` at one point. Indices `i, j` run over a unitary frame
//! of the base (`n` of them) and `α, β` over a unitary frame of the fiber
//! (`r` of them). Storage is dense; symmetries are checked or projected, not
//! exploited.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rng::{self, Rng};

/// Relative tolerance applied to the largest entry when no explicit
/// tolerance is given.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-9;

/// Chern curvature components at a point, in unitary frames.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    r: usize,
    entries: Vec<Complex64>,
    ckl: bool,
}

/// Outcome of a symmetry check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCheck {
    pub holds: bool,
    pub max_violation: f64,
}

/// Gram matrices and raw components in an arbitrary (non-unitary) frame.
#[derive(Debug, Clone)]
pub struct FrameData {
    /// `ω(∂_i, ∂_j)`, n×n Hermitian positive definite.
    pub gram_base: CMatrix,
    /// `h(s_α, s_β)`, r×r Hermitian positive definite.
    pub gram_fiber: CMatrix,
    /// `R_{i j̄ α β̄}` in the given frames, laid out like [`CurvatureTensor`].
    pub raw_entries: Vec<Complex64>,
}

impl CurvatureTensor {
    pub fn zeros(n: usize, r: usize) -> Self {
        Self {
            n,
            r,
            entries: vec![Complex64::new(0.0, 0.0); n * n * r * r],
            ckl: r == n,
        }
    }

    /// Builds a tensor from components, validating finiteness, Hermitian
    /// symmetry and (when flagged) the CKL symmetry at the default tolerance.
    pub fn new(n: usize, r: usize, entries: Vec<Complex64>, ckl: bool) -> Result<Self> {
        let t = Self::from_raw(n, r, entries)?;
        let t = Self { ckl, ..t };
        t.validate()?;
        Ok(t)
    }

    /// Wraps components without symmetry validation. Only the length and
    /// finiteness are checked; the CKL flag is cleared.
    pub fn from_raw(n: usize, r: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 || r == 0 {
            return Err(Error::Shape(format!("dimensions must be positive, got n={n}, r={r}")));
        }
        let expected = n * n * r * r;
        if entries.len() != expected {
            return Err(Error::Dimension {
                what: "tensor entries",
                expected,
                got: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n,
            r,
            entries,
            ckl: false,
        })
    }

    pub fn from_fn(n: usize, r: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(n * n * r * r);
        for i in 0..n {
            for j in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        entries.push(f(i, j, a, b));
                    }
                }
            }
        }
        Self {
            n,
            r,
            entries,
            ckl: false,
        }
    }

    fn validate(&self) -> Result<()> {
        let tol = self.default_tolerance();
        let herm = check_hermitian(self, tol);
        if !herm.holds {
            return Err(Error::NotHermitian {
                violation: herm.max_violation,
            });
        }
        if self.ckl && !check_ckl(self, tol)?.holds {
            return Err(Error::NotCkl);
        }
        Ok(())
    }

    /// Base dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Fiber rank `r`.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ckl(&self) -> bool {
        self.ckl
    }

    /// Tangent-bundle shape (`r == n`).
    pub fn is_tangent_shaped(&self) -> bool {
        self.r == self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        ((i * self.n + j) * self.r + a) * self.r + b
    }

    /// `R_{i j̄ α β̄}` (0-based).
    #[inline]
    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> Complex64 {
        self.entries[self.index(i, j, a, b)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    /// `1e-9 · max |R|`.
    pub fn default_tolerance(&self) -> f64 {
        DEFAULT_RELATIVE_TOL * self.max_abs()
    }

    /// Sets the CKL flag after verifying the symmetry at the default tolerance.
    pub fn mark_ckl(mut self) -> Result<Self> {
        if !check_ckl(&self, self.default_tolerance())?.holds {
            return Err(Error::NotCkl);
        }
        self.ckl = true;
        Ok(self)
    }

    pub(crate) fn with_ckl_unchecked(mut self, ckl: bool) -> Self {
        self.ckl = ckl;
        self
    }

    /// `t · R`. Symmetry flags are preserved.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * t).collect(),
            ..self.clone()
        }
    }

    /// Entrywise sum; the CKL flag survives only if both summands carry it.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.r != other.r {
            return Err(Error::Shape(format!(
                "cannot add ({}, {}) and ({}, {}) tensors",
                self.n, self.r, other.n, other.r
            )));
        }
        Ok(Self {
            n: self.n,
            r: self.r,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
            ckl: self.ckl && other.ckl,
        })
    }

    /// Exchanges the roles of base and fiber: `S_{α β̄ i j̄} = R_{i j̄ α β̄}`.
    /// Optimizing over fiber subspaces of `R` is optimizing over base
    /// subspaces of the swapped tensor.
    pub fn swapped(&self) -> Self {
        let mut out = Self::zeros(self.r, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                for a in 0..self.r {
                    for b in 0..self.r {
                        let dst = out.index(a, b, i, j);
                        out.entries[dst] = self.get(i, j, a, b);
                    }
                }
            }
        }
        out.ckl = self.ckl;
        out
    }

    /// Components in the frames `E'_a = Σ_i P_ia E_i` and `e'_α = Σ_γ S_γα e_γ`:
    /// `R'_{a b̄ α β̄} = Σ R_{i j̄ γ δ̄} P_ia conj(P_jb) S_γα conj(S_δβ)`.
    pub fn change_frame(&self, base: &CMatrix, fiber: &CMatrix) -> Result<Self> {
        let (n, r) = (self.n, self.r);
        if base.shape() != (n, n) || fiber.shape() != (r, r) {
            return Err(Error::Shape(format!(
                "frame change needs {n}x{n} and {r}x{r} matrices, got {:?} and {:?}",
                base.shape(),
                fiber.shape()
            )));
        }
        // Contract one slot at a time: O(n^2 r^2 (n + r)).
        let mut cur = self.entries.clone();
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
        let idx = |i: usize, j: usize, a: usize, b: usize| ((i * n + j) * r + a) * r + b;
        // slot i
        for a2 in 0..n {
            for j in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let mut s = Complex64::new(0.0, 0.0);
                        for i in 0..n {
                            s += cur[idx(i, j, a, b)] * base[(i, a2)];
                        }
                        next[idx(a2, j, a, b)] = s;
                    }
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
        // slot j (conjugated)
        for i in 0..n {
            for b2 in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let mut s = Complex64::new(0.0, 0.0);
                        for j in 0..n {
                            s += cur[idx(i, j, a, b)] * base[(j, b2)].conj();
                        }
                        next[idx(i, b2, a, b)] = s;
                    }
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
        // slot α
        for i in 0..n {
            for j in 0..n {
                for a2 in 0..r {
                    for b in 0..r {
                        let mut s = Complex64::new(0.0, 0.0);
                        for a in 0..r {
                            s += cur[idx(i, j, a, b)] * fiber[(a, a2)];
                        }
                        next[idx(i, j, a2, b)] = s;
                    }
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
        // slot β (conjugated)
        for i in 0..n {
            for j in 0..n {
                for a in 0..r {
                    for b2 in 0..r {
                        let mut s = Complex64::new(0.0, 0.0);
                        for b in 0..r {
                            s += cur[idx(i, j, a, b)] * fiber[(b, b2)].conj();
                        }
                        next[idx(i, j, a, b2)] = s;
                    }
                }
            }
        }
        Ok(Self {
            n,
            r,
            entries: next,
            ckl: self.ckl,
        })
    }

    /// Re-expresses the tensor in another pair of unitary frames. With
    /// `base == fiber` on a tangent-shaped tensor this is the induced change
    /// of unitary frame of `TM`, which preserves the CKL symmetry.
    pub fn unitary_regauge(&self, base: &CMatrix, fiber: &CMatrix) -> Result<Self> {
        let mut out = self.change_frame(base, fiber)?;
        out.symmetrize_hermitian_exact();
        Ok(out)
    }

    /// Overwrites the non-canonical half of each Hermitian pair with the
    /// conjugate of its partner so that the symmetry holds bit-exactly.
    pub(crate) fn symmetrize_hermitian_exact(&mut self) {
        for i in 0..self.n {
            for j in 0..self.n {
                for a in 0..self.r {
                    for b in 0..self.r {
                        let here = self.index(i, j, a, b);
                        let partner = self.index(j, i, b, a);
                        if here == partner {
                            self.entries[here].im = 0.0;
                        } else if here > partner {
                            self.entries[here] = self.entries[partner].conj();
                        }
                    }
                }
            }
        }
    }

    /// Standard-normal complex entries, no symmetry.
    pub fn random_raw(n: usize, r: usize, rng: &mut Rng) -> Vec<Complex64> {
        (0..n * n * r * r).map(|_| rng::complex_normal(rng)).collect()
    }
}

/// `max |R_{i j̄ α β̄} − conj(R_{j ī β ᾱ})| ≤ tol`.
pub fn check_hermitian(t: &CurvatureTensor, tol: f64) -> SymmetryCheck {
    let mut worst = 0.0f64;
    for i in 0..t.n {
        for j in 0..t.n {
            for a in 0..t.r {
                for b in 0..t.r {
                    let d = (t.get(i, j, a, b) - t.get(j, i, b, a).conj()).norm();
                    worst = worst.max(d);
                }
            }
        }
    }
    SymmetryCheck {
        holds: worst <= tol,
        max_violation: worst,
    }
}

/// Kähler-like symmetry `R_{i j̄ k l̄} = R_{k j̄ i l̄}`, together with its
/// consequence `R_{i j̄ k l̄} = R_{i l̄ k j̄}`. Both violations must be within
/// `tol`; the reported violation is the larger of the two.
pub fn check_ckl(t: &CurvatureTensor, tol: f64) -> Result<SymmetryCheck> {
    if t.n != t.r {
        return Err(Error::Shape(format!(
            "CKL symmetry needs r = n, got n={}, r={}",
            t.n, t.r
        )));
    }
    let n = t.n;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = t.get(i, j, k, l);
                    worst = worst.max((v - t.get(k, j, i, l)).norm());
                    worst = worst.max((v - t.get(i, l, k, j)).norm());
                }
            }
        }
    }
    Ok(SymmetryCheck {
        holds: worst <= tol,
        max_violation: worst,
    })
}

/// Orthogonal projection onto Hermitian-symmetric tensors:
/// `(T + T^†) / 2` with `T^†_{i j̄ α β̄} = conj(T_{j ī β ᾱ})`.
pub fn project_hermitian(n: usize, r: usize, raw: &[Complex64]) -> Result<CurvatureTensor> {
    let t = CurvatureTensor::from_raw(n, r, raw.to_vec())?;
    let mut out = CurvatureTensor::from_fn(n, r, |i, j, a, b| {
        (t.get(i, j, a, b) + t.get(j, i, b, a).conj()) * 0.5
    });
    out.symmetrize_hermitian_exact();
    Ok(out)
}

/// Orthogonal projection onto CKL tensors: the average over the order-8
/// group generated by the swaps `(i,j,k,l) → (k,j,i,l)`, `(i,j,k,l) → (i,l,k,j)`
/// and the Hermitian conjugation `T → T^†`.
pub fn project_to_ckl(n: usize, raw: &[Complex64]) -> Result<CurvatureTensor> {
    let t = CurvatureTensor::from_raw(n, n, raw.to_vec())?;
    let mut out = CurvatureTensor::from_fn(n, n, |i, j, k, l| {
        let linear = t.get(i, j, k, l) + t.get(k, j, i, l) + t.get(i, l, k, j) + t.get(k, l, i, j);
        // The conjugation swaps positions (1,2) and (3,4) of each linear image.
        let anti = t.get(j, i, l, k) + t.get(j, k, l, i) + t.get(l, i, j, k) + t.get(l, k, j, i);
        (linear + anti.conj()) * 0.125
    });
    out.symmetrize_hermitian_exact();
    Ok(out.with_ckl_unchecked(true))
}

/// Curvature of the dual bundle: `R*_{i j̄ α β̄} = −R_{i j̄ β ᾱ}`.
pub fn dual_tensor(t: &CurvatureTensor) -> CurvatureTensor {
    let mut out = CurvatureTensor::from_fn(t.n, t.r, |i, j, a, b| -t.get(i, j, b, a));
    out.symmetrize_hermitian_exact();
    out
}

/// Converts frame data to unitary frames via the Hermitian inverse square
/// roots of the two Gram matrices.
pub fn normalize_to_unitary(data: &FrameData) -> Result<CurvatureTensor> {
    let n = data.gram_base.nrows();
    let r = data.gram_fiber.nrows();
    let raw = CurvatureTensor::from_raw(n, r, data.raw_entries.clone())?;
    let base = unitary_change(&data.gram_base)?;
    let fiber = unitary_change(&data.gram_fiber)?;
    match (base, fiber) {
        (None, None) => Ok(raw),
        (base, fiber) => {
            let base = base.unwrap_or_else(|| CMatrix::identity(n, n));
            let fiber = fiber.unwrap_or_else(|| CMatrix::identity(r, r));
            raw.change_frame(&base, &fiber)
        }
    }
}

/// Frame change `P` with `Pᵀ G P̄ = I`, i.e. `P = conj(G^{-1/2})`. `None` when
/// `G` is exactly the identity.
fn unitary_change(gram: &CMatrix) -> Result<Option<CMatrix>> {
    let dim = gram.nrows();
    if gram.ncols() != dim {
        return Err(Error::Shape(format!("Gram matrix must be square, got {:?}", gram.shape())));
    }
    if *gram == CMatrix::identity(dim, dim) {
        return Ok(None);
    }
    Ok(Some(linalg::inv_sqrt_hpd(gram)?.map(|z| z.conj())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_tensor_is_symmetric() {
        let z = CurvatureTensor::zeros(2, 2);
        assert_eq!(check_hermitian(&z, 0.0), SymmetryCheck { holds: true, max_violation: 0.0 });
        assert!(check_ckl(&z, 0.0).unwrap().holds);
    }

    #[test]
    fn imaginary_diagonal_breaks_hermitian() {
        let t = CurvatureTensor::from_raw(1, 1, vec![c(0.0, 1.0)]).unwrap();
        let chk = check_hermitian(&t, 1e-12);
        assert!(!chk.holds);
        assert!((chk.max_violation - 2.0).abs() < 1e-15);
        assert!(matches!(
            CurvatureTensor::new(1, 1, vec![c(0.0, 1.0)], false),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn constructed_ckl_violation() {
        // R_{1 1̄ 2 2̄} = 1, R_{2 1̄ 1 2̄} = 0; Hermitian partner R_{1 1̄ 2 2̄} is itself.
        let mut t = CurvatureTensor::zeros(2, 2);
        let k = t.index(0, 0, 1, 1);
        t.entries[k] = c(1.0, 0.0);
        assert!(check_hermitian(&t, 1e-12).holds);
        let chk = check_ckl(&t, 1e-12).unwrap();
        assert!(!chk.holds);
        assert_eq!(chk.max_violation, 1.0);
    }

    #[test]
    fn ckl_check_rejects_bundle_shape() {
        let t = CurvatureTensor::zeros(2, 3);
        assert!(matches!(check_ckl(&t, 1e-9), Err(Error::Shape(_))));
    }

    #[test]
    fn fubini_study_symmetries() {
        let fs = zoo::fubini_study(3, 2.0);
        assert_eq!(check_hermitian(&fs, 0.0).max_violation, 0.0);
        assert!(check_ckl(&fs, 0.0).unwrap().holds);
    }

    #[test]
    fn ckl_projection_properties() {
        let mut rng = rng::seeded(42);
        let raw = CurvatureTensor::random_raw(3, 3, &mut rng);
        let p = project_to_ckl(3, &raw).unwrap();
        assert!(check_hermitian(&p, 1e-12).holds);
        assert!(check_ckl(&p, 1e-12).unwrap().holds);
        let pp = project_to_ckl(3, p.entries()).unwrap();
        let diff = p
            .entries()
            .iter()
            .zip(pp.entries())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
        assert!(diff <= 1e-12, "idempotence defect {diff}");
        let z = project_to_ckl(2, &vec![c(0.0, 0.0); 16]).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn ckl_projection_fixes_fubini_study() {
        let fs = zoo::fubini_study(3, 2.0);
        let p = project_to_ckl(3, fs.entries()).unwrap();
        assert_eq!(p.entries(), fs.entries());
    }

    #[test]
    fn ckl_projection_is_orthogonal() {
        // <T - P(T), S> = 0 for every CKL S (real inner product Re Σ conj(a) b).
        let mut rng = rng::seeded(3);
        let raw = CurvatureTensor::random_raw(2, 2, &mut rng);
        let p = project_to_ckl(2, &raw).unwrap();
        let s = zoo::random_ckl(2, 11);
        let inner: f64 = raw
            .iter()
            .zip(p.entries())
            .zip(s.entries())
            .map(|((t, pt), s)| ((t - pt).conj() * s).re)
            .sum();
        assert!(inner.abs() < 1e-12, "{inner}");
    }

    #[test]
    fn dual_is_involution() {
        let t = zoo::random_hermitian(2, 3, 5);
        let dd = dual_tensor(&dual_tensor(&t));
        assert_eq!(dd.entries(), t.entries());
        assert!(check_hermitian(&dual_tensor(&t), 0.0).holds);
        assert_eq!(dual_tensor(&CurvatureTensor::zeros(2, 2)).max_abs(), 0.0);
    }

    #[test]
    fn swapped_roundtrip() {
        let t = zoo::random_hermitian(2, 3, 8);
        let s = t.swapped();
        assert_eq!((s.n(), s.r()), (3, 2));
        assert_eq!(s.swapped().entries(), t.entries());
    }

    #[test]
    fn identity_grams_leave_entries_unchanged() {
        let t = zoo::random_hermitian(2, 2, 1);
        let data = FrameData {
            gram_base: CMatrix::identity(2, 2),
            gram_fiber: CMatrix::identity(2, 2),
            raw_entries: t.entries().to_vec(),
        };
        let u = normalize_to_unitary(&data).unwrap();
        assert_eq!(u.entries(), t.entries());
        let again = normalize_to_unitary(&FrameData {
            raw_entries: u.entries().to_vec(),
            ..data
        })
        .unwrap();
        assert_eq!(again.entries(), u.entries());
    }

    #[test]
    fn one_dimensional_frame_change() {
        // Brute force: |∂|² = 4, so the unit frame is E = ∂/2 and
        // R(E, Ē, s, s̄) = 8 · (1/2) · (1/2) = 2.
        let data = FrameData {
            gram_base: CMatrix::from_element(1, 1, c(4.0, 0.0)),
            gram_fiber: CMatrix::from_element(1, 1, c(1.0, 0.0)),
            raw_entries: vec![c(8.0, 0.0)],
        };
        let u = normalize_to_unitary(&data).unwrap();
        assert!((u.get(0, 0, 0, 0) - c(2.0, 0.0)).norm() < 1e-15);
        // and with a fiber metric of 9: e = s/3 scales by a further 1/9
        let data = FrameData {
            gram_fiber: CMatrix::from_element(1, 1, c(9.0, 0.0)),
            ..data
        };
        let u = normalize_to_unitary(&data).unwrap();
        assert!((u.get(0, 0, 0, 0) - c(2.0 / 9.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn non_positive_metric_rejected() {
        let data = FrameData {
            gram_base: CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)])),
            gram_fiber: CMatrix::identity(1, 1),
            raw_entries: vec![c(0.0, 0.0); 4],
        };
        assert!(matches!(
            normalize_to_unitary(&data),
            Err(Error::MetricNotPositive { .. })
        ));
    }
}
