//! Pointwise curvature functionals.
//!
//! Everything here is a contraction of the tensor against rank-one or
//! projector matrices. With `P = Σ_c Y_c Y_cᴴ` for a frame `Y` of a base
//! subspace Σ,
//!
//! ```text
//! A_Σ[α][β] = Σ_ij R_{i j̄ α β̄} P_ij = Σ_c R(Y_c, Ȳ_c, e_α, ē_β)
//! ```
//!
//! is the Σ-summed direction matrix, and every averaged form is a further
//! contraction of `A_Σ` with a fiber projector. Projector contractions make
//! invariance under re-framing of Σ automatic.

use alloc::format;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen};
use crate::subspace::Subspace;
use crate::tensor::CurvatureTensor;

/// `R(X, Ȳ, u, v̄) = Σ R_{i j̄ α β̄} Xⁱ conj(Yʲ) u^α conj(v^β)`.
pub fn evaluate(
    t: &CurvatureTensor,
    x: &CVector,
    y: &CVector,
    u: &CVector,
    v: &CVector,
) -> Result<Complex64> {
    check_len("base vector", t.n(), x)?;
    check_len("base vector", t.n(), y)?;
    check_len("fiber vector", t.r(), u)?;
    check_len("fiber vector", t.r(), v)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..t.n() {
        for j in 0..t.n() {
            let xy = x[i] * y[j].conj();
            if xy == Complex64::new(0.0, 0.0) {
                continue;
            }
            for a in 0..t.r() {
                for b in 0..t.r() {
                    acc += t.get(i, j, a, b) * xy * u[a] * v[b].conj();
                }
            }
        }
    }
    Ok(acc)
}

fn check_len(what: &'static str, expected: usize, v: &CVector) -> Result<()> {
    if v.len() != expected {
        return Err(Error::Dimension {
            what,
            expected,
            got: v.len(),
        });
    }
    Ok(())
}

fn require_tangent(t: &CurvatureTensor) -> Result<()> {
    if !t.is_tangent_shaped() {
        return Err(Error::Shape(format!(
            "functional needs a tangent-bundle tensor (r = n), got n={}, r={}",
            t.n(),
            t.r()
        )));
    }
    Ok(())
}

fn require_base(t: &CurvatureTensor, sigma: &Subspace) -> Result<()> {
    if sigma.ambient_dim() != t.n() {
        return Err(Error::Dimension {
            what: "base subspace ambient dimension",
            expected: t.n(),
            got: sigma.ambient_dim(),
        });
    }
    Ok(())
}

fn require_fiber(t: &CurvatureTensor, sigma: &Subspace) -> Result<()> {
    if sigma.ambient_dim() != t.r() {
        return Err(Error::Dimension {
            what: "fiber subspace ambient dimension",
            expected: t.r(),
            got: sigma.ambient_dim(),
        });
    }
    Ok(())
}

/// `M_αβ = Σ_ij R_{i j̄ α β̄} P_ij` for an n×n matrix `P`.
pub fn contract_base(t: &CurvatureTensor, p: &CMatrix) -> CMatrix {
    let (n, r) = (t.n(), t.r());
    let mut m = CMatrix::zeros(r, r);
    let e = t.entries();
    for i in 0..n {
        for j in 0..n {
            let w = p[(i, j)];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let base = (i * n + j) * r * r;
            for a in 0..r {
                for b in 0..r {
                    m[(a, b)] += e[base + a * r + b] * w;
                }
            }
        }
    }
    m
}

/// `N_ij = Σ_αβ R_{i j̄ α β̄} Q_αβ` for an r×r matrix `Q`.
pub fn contract_fiber(t: &CurvatureTensor, q: &CMatrix) -> CMatrix {
    let (n, r) = (t.n(), t.r());
    let mut m = CMatrix::zeros(n, n);
    let e = t.entries();
    for i in 0..n {
        for j in 0..n {
            let base = (i * n + j) * r * r;
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..r {
                for b in 0..r {
                    s += e[base + a * r + b] * q[(a, b)];
                }
            }
            m[(i, j)] = s;
        }
    }
    m
}

/// What a [`DirectionMatrix`] was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionSource {
    Vector(CVector),
    Subspace(Subspace),
}

/// The Hermitian matrix `[R(X, X̄, e_α, ē_β)]_{αβ}` for a direction `X`, or
/// its sum over a unitary basis of a base subspace.
///
/// The quadratic form on a fiber vector is `R(X, X̄, u, ū) = Σ M_αβ u^α conj(u^β)`,
/// which is `wᴴ M w` for `w = conj(u)`. Eigenvalues of `M` are the eigenvalues
/// of the endomorphism `R_{XX̄}` of the fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMatrix {
    matrix: CMatrix,
    source: DirectionSource,
}

/// Spectrum of a direction matrix with eigenvectors expressed as fiber
/// vectors (`form(v_i) = λ_i`).
#[derive(Debug, Clone)]
pub struct FiberSpectrum {
    pub values: alloc::vec::Vec<f64>,
    /// Unit fiber vectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

impl DirectionMatrix {
    pub(crate) fn from_parts(matrix: CMatrix, source: DirectionSource) -> Self {
        Self {
            matrix: linalg::hermitian_part(&matrix),
            source,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &DirectionSource {
        &self.source
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> alloc::vec::Vec<f64> {
        HermitianEigen::new(&self.matrix).values
    }

    pub fn spectrum(&self) -> FiberSpectrum {
        let eig = HermitianEigen::new(&self.matrix);
        FiberSpectrum {
            values: eig.values,
            vectors: eig.vectors.map(|z| z.conj()),
        }
    }

    /// `R(·, ·̄, u, ū)` summed as this matrix was.
    pub fn form(&self, u: &CVector) -> Result<f64> {
        check_len("fiber vector", self.rank(), u)?;
        Ok(linalg::pair(&self.matrix, &linalg::outer(u)).re)
    }

    /// `Σ_j form(e_j)` over a unitary basis of the fiber subspace σ: the
    /// trace of the compression of the form to σ.
    pub fn compressed_trace(&self, sigma: &Subspace) -> Result<f64> {
        if sigma.ambient_dim() != self.rank() {
            return Err(Error::Dimension {
                what: "fiber subspace ambient dimension",
                expected: self.rank(),
                got: sigma.ambient_dim(),
            });
        }
        Ok(linalg::pair(&self.matrix, &sigma.projector()).re)
    }
}

/// Direction matrix of a single nonzero base vector `X` (not normalized).
pub fn direction_matrix(t: &CurvatureTensor, x: &CVector) -> Result<DirectionMatrix> {
    check_len("base vector", t.n(), x)?;
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let m = contract_base(t, &linalg::outer(x));
    Ok(DirectionMatrix::from_parts(m, DirectionSource::Vector(x.clone())))
}

/// `Σ_i R(E_i, Ē_i, ·, ·̄)` over a unitary basis of Σ.
pub fn direction_matrix_sum(t: &CurvatureTensor, sigma: &Subspace) -> Result<DirectionMatrix> {
    require_base(t, sigma)?;
    let m = contract_base(t, &sigma.projector());
    Ok(DirectionMatrix::from_parts(m, DirectionSource::Subspace(sigma.clone())))
}

/// Holomorphic sectional curvature `R(X, X̄, X, X̄) / |X|⁴`.
pub fn holo_sectional(t: &CurvatureTensor, x: &CVector) -> Result<f64> {
    require_tangent(t)?;
    check_len("base vector", t.n(), x)?;
    let norm2 = x.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(evaluate(t, x, x, x, x)?.re / (norm2 * norm2))
}

/// Chern-Ricci curvature `Σ_i R(X, X̄, E_i, Ē_i)` over a unitary basis of C^n.
pub fn chern_ricci(t: &CurvatureTensor, x: &CVector) -> Result<f64> {
    require_tangent(t)?;
    check_len("base vector", t.n(), x)?;
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let m = contract_base(t, &linalg::outer(x));
    Ok(m.trace().re)
}

/// Chern scalar curvature `Σ_ij R(E_i, Ē_i, E_j, Ē_j)`.
pub fn chern_scalar(t: &CurvatureTensor) -> Result<f64> {
    require_tangent(t)?;
    let n = t.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += t.get(i, i, j, j).re;
        }
    }
    Ok(s)
}

/// k-Ricci curvature `Ric_k(Σ)(X, X̄) = Σ_i R(X, X̄, E_i, Ē_i)` for `X ∈ Σ`.
pub fn ricci_k(t: &CurvatureTensor, sigma: &Subspace, x: &CVector) -> Result<f64> {
    require_tangent(t)?;
    require_base(t, sigma)?;
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    sigma.check_contains(x)?;
    let m = contract_base(t, &linalg::outer(x));
    Ok(linalg::pair(&m, &sigma.projector()).re)
}

/// k-scalar curvature `S_k(Σ) = Σ_ij R(E_i, Ē_i, E_j, Ē_j)`.
pub fn scalar_k(t: &CurvatureTensor, sigma: &Subspace) -> Result<f64> {
    require_tangent(t)?;
    require_base(t, sigma)?;
    let p = sigma.projector();
    Ok(linalg::pair(&contract_base(t, &p), &p).re)
}

/// `R(Σ; u, ū) = Σ_i R(E_i, Ē_i, u, ū)`.
pub fn rc_form(t: &CurvatureTensor, sigma: &Subspace, u: &CVector) -> Result<f64> {
    direction_matrix_sum(t, sigma)?.form(u)
}

/// `R(Σ; σ) = Σ_ij R(E_i, Ē_i, e_j, ē_j)` for base Σ and fiber σ.
pub fn averaged_form(t: &CurvatureTensor, sigma: &Subspace, fiber: &Subspace) -> Result<f64> {
    require_fiber(t, fiber)?;
    direction_matrix_sum(t, sigma)?.compressed_trace(fiber)
}
