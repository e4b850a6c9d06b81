//! Gaussian rationals and exact matrix routines.

use nalgebra::DMatrix;
use num_bigint::{BigInt, Sign};
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::tensor::{LabeledMatrix, Operator};

pub type Q = BigRational;
/// Complex number with rational real and imaginary parts.
pub type GaussQ = Complex<BigRational>;
pub type RationalMatrix = LabeledMatrix<GaussQ>;

pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn gq(re: Q, im: Q) -> GaussQ {
    Complex::new(re, im)
}

pub fn gq_real(re: Q) -> GaussQ {
    Complex::new(re, Q::zero())
}

pub fn gq_int(n: i64) -> GaussQ {
    gq_real(Q::from_integer(BigInt::from(n)))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn gq_to_c64(x: &GaussQ) -> Complex64 {
    Complex64::new(q_to_f64(&x.re), q_to_f64(&x.im))
}

/// Exact value of a finite double.
pub fn q_from_f64(x: f64) -> Q {
    BigRational::from_float(x).unwrap_or_else(Q::zero)
}

/// Truncates `x` toward zero to `digits` decimal places.
pub fn truncate_decimal(x: f64, digits: u32) -> Q {
    let exact = q_from_f64(x);
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = exact * Q::from_integer(scale.clone());
    Q::new(scaled.trunc().to_integer(), scale)
}

pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(parse_int(n)?, d))
        }
        None => Ok(Q::from_integer(parse_int(s)?)),
    }
}

pub fn to_float_matrix(m: &RationalMatrix) -> Operator {
    m.map(gq_to_c64)
}

/// `(M + M†)/2`.
pub fn symmetrize(m: &RationalMatrix) -> RationalMatrix {
    let half = gq_real(q(1, 2));
    m.add(&m.dagger()).expect("same layout").scale(&half)
}

/// Exact rank of a set of rational row vectors.
pub fn rank_rational(rows: &[Vec<Q>]) -> usize {
    let mut basis: Vec<(usize, Vec<Q>)> = vec![];
    for row in rows {
        if reduce_rational(&mut basis, row.clone()) {
            continue;
        }
    }
    basis.len()
}

/// Reduces `v` against an echelon set and inserts it if independent.
/// Returns true when `v` was dependent.
fn reduce_rational(basis: &mut Vec<(usize, Vec<Q>)>, mut v: Vec<Q>) -> bool {
    for (piv, b) in basis.iter() {
        if !v[*piv].is_zero() {
            let f = v[*piv].clone();
            for (x, y) in v.iter_mut().zip(b.iter()) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    match v.iter().position(|x| !x.is_zero()) {
        None => true,
        Some(p) => {
            let inv = v[p].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let f = b[p].clone();
                    for (x, y) in b.iter_mut().zip(v.iter()) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            basis.push((p, v));
            false
        }
    }
}

/// Incremental exact elimination over rationals.
#[derive(Default)]
pub struct RationalEliminator {
    basis: Vec<(usize, Vec<Q>)>,
}

impl RationalEliminator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` if it is independent of the rows seen so far.
    pub fn try_insert(&mut self, v: Vec<Q>) -> bool {
        !reduce_rational(&mut self.basis, v)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// The Mersenne prime 2^61 − 1.
pub const PRIME: u64 = (1u64 << 61) - 1;

pub fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

pub fn invmod(a: u64) -> u64 {
    powmod(a, PRIME - 2)
}

/// Image of a rational in Z/PRIME. Fails if the denominator vanishes mod p.
pub fn q_mod_p(x: &Q) -> Result<u64> {
    let p = BigInt::from(PRIME);
    let n = x.numer().mod_floor(&p).to_u64().unwrap();
    let d = x.denom().mod_floor(&p).to_u64().unwrap();
    if d == 0 {
        return Err(Error::Invalid("denominator divisible by the modulus".into()));
    }
    Ok(mulmod(n, invmod(d)))
}

/// Incremental row reduction over Z/PRIME. A set independent modulo the
/// prime is independent over the rationals.
#[derive(Default)]
pub struct ModpEliminator {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModpEliminator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn try_insert(&mut self, mut v: Vec<u64>) -> bool {
        for (piv, b) in &self.rows {
            let f = v[*piv];
            if f != 0 {
                let nf = PRIME - f;
                for (x, &y) in v.iter_mut().zip(b.iter()) {
                    if y != 0 {
                        *x = (*x + mulmod(nf, y)) % PRIME;
                    }
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => false,
            Some(p) => {
                let inv = invmod(v[p]);
                for x in v.iter_mut() {
                    *x = mulmod(*x, inv);
                }
                self.rows.push((p, v));
                true
            }
        }
    }
}

type GaussInt = (BigInt, BigInt);

fn gi_mul(a: &GaussInt, b: &GaussInt) -> GaussInt {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gi_is_zero(a: &GaussInt) -> bool {
    a.0.is_zero() && a.1.is_zero()
}

/// Exact positive-semidefiniteness test for a Hermitian Gaussian-rational
/// matrix: fraction-free symmetric elimination with diagonal pivoting. Non-
/// Hermitian input is rejected.
pub fn psd_check_exact(m: &RationalMatrix) -> bool {
    if !m.is_exactly_hermitian() {
        return false;
    }
    let n = m.dim();
    if n == 0 {
        return true;
    }
    // scale to Gaussian integers
    let mut l = BigInt::one();
    for z in m.data().iter() {
        l = l.lcm(z.re.denom());
        l = l.lcm(z.im.denom());
    }
    let lq = Q::from_integer(l);
    let mut a: Vec<Vec<GaussInt>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let z = &m.data()[(r, c)];
                    ((&z.re * &lq).to_integer(), (&z.im * &lq).to_integer())
                })
                .collect()
        })
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    loop {
        // drop zero rows, reject negative diagonals and zero diagonals with nonzero rows
        let mut next_active = Vec::with_capacity(active.len());
        for &i in &active {
            match a[i][i].0.sign() {
                Sign::Minus => return false,
                Sign::Plus => next_active.push(i),
                Sign::NoSign => {
                    if active.iter().any(|&j| !gi_is_zero(&a[i][j])) {
                        return false;
                    }
                }
            }
        }
        active = next_active;
        if active.is_empty() {
            return true;
        }
        // cheapest positive pivot keeps the integers small
        let p = *active.iter().min_by_key(|&&i| a[i][i].0.bits()).unwrap();
        let app = a[p][p].0.clone();
        let rest: Vec<usize> = active.iter().cloned().filter(|&i| i != p).collect();
        for (ii, &i) in rest.iter().enumerate() {
            let aip = a[i][p].clone();
            for &j in &rest[ii..] {
                let apj = &a[p][j];
                let t = gi_mul(&aip, apj);
                let v = (&app * &a[i][j].0 - t.0, &app * &a[i][j].1 - t.1);
                let v = (v.0 / &prev, v.1 / &prev);
                a[j][i] = (v.0.clone(), -v.1.clone());
                a[i][j] = v;
            }
        }
        prev = app;
        active = rest;
    }
}

/// Builds a rational matrix from a float matrix by exact conversion of each entry.
pub fn exact_from_float(m: &DMatrix<Complex64>) -> DMatrix<GaussQ> {
    m.map(|z| gq(q_from_f64(z.re), q_from_f64(z.im)))
}

pub fn gq_abs_bound(z: &GaussQ) -> Q {
    z.re.abs() + z.im.abs()
}
