use std::ops::{Div, Neg};

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Scalars the tensor engine can work over: complex floats for numerics and
/// Gaussian rationals for certification.
pub trait Field:
    nalgebra::Scalar
    + Zero
    + One
    + ClosedAddAssign
    + ClosedMulAssign
    + ClosedSubAssign
    + Neg<Output = Self>
    + Div<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn conj(&self) -> Self;
}

impl Field for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

impl Field for Complex<BigRational> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}
