//! Small dense complex linear algebra helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigendecomposition of a Hermitian matrix with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        let sym = hermitian_part(m);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Sum of the `l` smallest eigenvalues.
    pub fn sum_smallest(&self, l: usize) -> f64 {
        self.values[..l].iter().sum()
    }

    /// Sum of the `l` largest eigenvalues.
    pub fn sum_largest(&self, l: usize) -> f64 {
        self.values[self.values.len() - l..].iter().sum()
    }
}

/// `(m + mᴴ) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn inv_sqrt_hpd(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(alloc::format!(
            "Gram matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let defect = hermitian_defect(m);
    if defect > 1e-12 * scale.max(1.0) {
        return Err(Error::MetricNotHermitian { violation: defect });
    }
    let eig = HermitianEigen::new(m);
    if !(eig.min() > 0.0) {
        return Err(Error::MetricNotPositive {
            min_eigenvalue: eig.min(),
        });
    }
    let v = &eig.vectors;
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&x| Complex64::new(1.0 / libm::sqrt(x), 0.0)),
    ));
    Ok(v * d * v.adjoint())
}

/// Orthonormal basis of the column span (thin QR). Callers must pass a full
/// column rank matrix.
pub fn orthonormalize(m: CMatrix) -> CMatrix {
    m.qr().q()
}

/// Smallest singular value proxy: min |R_ii| of the QR factor, relative to
/// the largest column norm.
pub fn column_rank_margin(m: &CMatrix) -> f64 {
    let colmax = m
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    if colmax == 0.0 {
        return 0.0;
    }
    let r = m.clone().qr().r();
    let mut worst = f64::INFINITY;
    for i in 0..r.nrows().min(r.ncols()) {
        worst = worst.min(r[(i, i)].norm());
    }
    worst / colmax
}

/// `‖Fᴴ F − I‖_max`.
pub fn orthonormality_defect(frame: &CMatrix) -> f64 {
    let g = frame.adjoint() * frame;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Haar-distributed unitary matrix (QR of a Ginibre draw with phase fix).
pub fn random_unitary(rng: &mut Rng, n: usize) -> CMatrix {
    let g = rng::complex_normal_matrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `Σ_ab A_ab B_ab` (no conjugation).
pub fn pair(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Rank-one matrix `x xᴴ`.
pub fn outer(x: &CVector) -> CMatrix {
    x * x.adjoint()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}
