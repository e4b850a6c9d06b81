//! Small named matrices used throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Operator, SpaceLayout};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> DMatrix<Complex64> {
    DMatrix::identity(d, d)
}

/// Pauli matrices indexed 0..4 as 𝟙, X, Y, Z.
pub fn pauli(i: usize) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let v = match i {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => [o, z, z, -o],
        _ => panic!("pauli index {i} out of range"),
    };
    DMatrix::from_row_slice(2, 2, &v)
}

pub fn ket(d: usize, i: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(d);
    v[i] = c(1.0, 0.0);
    v
}

pub fn plus() -> DVector<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])
}

pub fn minus() -> DVector<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_vec(vec![c(s, 0.0), c(-s, 0.0)])
}

pub fn hadamard() -> DMatrix<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[h, h, h, -h]).map(|x| Complex64::new(x, 0.0))
}

pub fn projector(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    v * v.adjoint()
}

pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// `|𝟙⟩⟩ = Σ_i |i⟩|i⟩` on d ⊗ d.
pub fn max_entangled(d: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = c(1.0, 0.0);
    }
    v
}

/// Choi of the identity channel, `|𝟙⟩⟩⟨⟨𝟙|`, on (input, output).
pub fn identity_choi(input: &str, output: &str, d: usize) -> Operator {
    let layout = SpaceLayout::new(&[(input, d), (output, d)]).expect("distinct labels");
    Operator::from_ket(layout, &max_entangled(d)).expect("shape")
}

/// Operator on a single labeled system.
pub fn on(label: &str, m: DMatrix<Complex64>) -> Operator {
    let d = m.nrows();
    Operator::new(SpaceLayout::single(label, d), m).expect("square matrix")
}
