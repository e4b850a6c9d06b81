//! Labeled tensor-product matrices.

mod field;
mod labeled;
mod layout;
pub mod mats;

pub use field::Field;
pub use labeled::LabeledMatrix;
pub use layout::SpaceLayout;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;

/// Complex floating-point operator on a labeled space.
pub type Operator = LabeledMatrix<Complex64>;

/// Default absolute tolerance for hermiticity / positivity queries.
pub const DEFAULT_TOL: f64 = 1e-9;

fn to_faer(m: &DMatrix<Complex64>) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix;
/// only the lower triangle is read.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let e = to_faer(m).self_adjoint_eigen(faer::Side::Lower).expect("eigendecomposition of a Hermitian matrix");
    let n = m.nrows();
    let vals = (0..n).map(|i| e.S()[i].re).collect();
    let u = e.U();
    (vals, DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
}

impl LabeledMatrix<Complex64> {
    /// `|v⟩⟨v|` on the given layout.
    pub fn from_ket(layout: SpaceLayout, v: &DVector<Complex64>) -> Result<Self> {
        Operator::new(layout, v * v.adjoint())
    }

    pub fn from_real(layout: SpaceLayout, m: &DMatrix<f64>) -> Result<Self> {
        Operator::new(layout, m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance after aligning `other` to this layout's order.
    pub fn distance(&self, other: &Operator) -> Result<f64> {
        let o = other.aligned_to(self.layout())?;
        Ok((self.data() - o.data()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn hermitian_part(&self) -> Operator {
        let d = (self.data() + self.data().adjoint()) * Complex64::new(0.5, 0.0);
        Operator::new(self.layout().clone(), d).expect("same shape")
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.data() - self.data().adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part().into_data();
        to_faer(&h).self_adjoint_eigenvalues(faer::Side::Lower).expect("eigenvalues of a Hermitian matrix")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().cloned().unwrap_or(0.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    pub fn trace_re(&self) -> f64 {
        self.trace().re
    }

    pub fn scale_re(&self, s: f64) -> Operator {
        self.scale(&Complex64::new(s, 0.0))
    }
}
