//! Points of the complex Grassmannian, represented by orthonormal frames.

use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::rng::{self, Rng};

/// Allowed deviation of `FᴴF` from the identity.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Relative residual accepted by [`Subspace::check_contains`].
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// A k-dimensional subspace of C^n with a unitary basis as the columns of
/// `frame`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: CMatrix,
}

impl Subspace {
    /// Wraps an n×k frame whose columns must be orthonormal.
    pub fn new(frame: CMatrix) -> Result<Self> {
        if frame.ncols() == 0 || frame.ncols() > frame.nrows() {
            return Err(Error::Shape(format!(
                "subspace frame must be n x k with 1 <= k <= n, got {:?}",
                frame.shape()
            )));
        }
        let deviation = linalg::orthonormality_defect(&frame);
        if !(deviation <= ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { frame })
    }

    /// Orthonormalizes the columns of `spanning`.
    pub fn from_spanning(spanning: CMatrix) -> Result<Self> {
        if spanning.ncols() == 0 || spanning.ncols() > spanning.nrows() {
            return Err(Error::Shape(format!(
                "spanning set must be n x k with 1 <= k <= n, got {:?}",
                spanning.shape()
            )));
        }
        if linalg::column_rank_margin(&spanning) < 1e-12 {
            return Err(Error::Shape("spanning vectors are linearly dependent".into()));
        }
        Ok(Self {
            frame: linalg::orthonormalize(spanning),
        })
    }

    pub(crate) fn from_frame_unchecked(frame: CMatrix) -> Self {
        Self { frame }
    }

    /// `span(e_1, …, e_k)` in C^n.
    pub fn coordinate(n: usize, k: usize) -> Self {
        Self {
            frame: CMatrix::identity(n, k),
        }
    }

    pub fn full(n: usize) -> Self {
        Self::coordinate(n, n)
    }

    /// The complex line through a nonzero vector.
    pub fn line(x: &CVector) -> Result<Self> {
        let norm = x.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            frame: CMatrix::from_column_slice(x.len(), 1, x.unscale(norm).as_slice()),
        })
    }

    /// Haar-random point of Gr_k(C^n).
    pub fn random(n: usize, k: usize, rng: &mut Rng) -> Self {
        let g = rng::complex_normal_matrix(rng, n, k);
        Self {
            frame: linalg::orthonormalize(g),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn into_frame(self) -> CMatrix {
        self.frame
    }

    /// `i`-th basis vector `E_i`.
    pub fn basis(&self, i: usize) -> CVector {
        self.frame.column(i).into_owned()
    }

    /// Orthogonal projector `F Fᴴ`.
    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &CVector) -> CVector {
        &self.frame * (self.frame.adjoint() * x)
    }

    /// Coordinates of `x` in the frame: `Fᴴ x`.
    pub fn coordinates(&self, x: &CVector) -> CVector {
        self.frame.adjoint() * x
    }

    /// Errors unless `‖x − Px‖ ≤ 1e-8 ‖x‖`.
    pub fn check_contains(&self, x: &CVector) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::Dimension {
                what: "vector",
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        let norm = x.norm();
        let residual = (x - self.project(x)).norm();
        if residual <= MEMBERSHIP_TOL * norm {
            Ok(())
        } else {
            Err(Error::NotInSubspace {
                residual: residual / norm,
            })
        }
    }

    /// Orthogonal complement, `None` when the subspace is everything.
    pub fn complement(&self) -> Option<Self> {
        let (n, k) = self.frame.shape();
        if k == n {
            return None;
        }
        let mut aug = CMatrix::zeros(n, k + n);
        aug.view_mut((0, 0), (n, k)).copy_from(&self.frame);
        aug.view_mut((0, k), (n, n)).copy_from(&CMatrix::identity(n, n));
        let q = aug.qr().q();
        // The QR's Q is n×n here; its trailing columns span the complement.
        let q_full = if q.ncols() == n { q } else { q.columns(0, n).into_owned() };
        Some(Self {
            frame: q_full.columns(k, n - k).into_owned(),
        })
    }

    /// Same subspace with basis `F U` for a k×k unitary `U`.
    pub fn rotated(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.shape() != (self.dim(), self.dim()) {
            return Err(Error::Shape(format!(
                "rotation must be {0}x{0}, got {1:?}",
                self.dim(),
                unitary.shape()
            )));
        }
        Self::new(&self.frame * unitary)
    }

    /// Uniform unit vector of the subspace.
    pub fn random_unit_vector(&self, rng: &mut Rng) -> CVector {
        let y = rng::unit_sphere_vector(rng, self.dim());
        &self.frame * y
    }

    /// Image under a unitary map of the ambient space.
    pub fn transformed(&self, ambient: &CMatrix) -> Self {
        Self {
            frame: ambient * &self.frame,
        }
    }
}
