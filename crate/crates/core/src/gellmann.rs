//! Product bases of generalized Gell-Mann matrices.
//!
//! Every trace-and-replace map acts diagonally on products of local Gell-Mann
//! matrices: `_X g = g` when g is the identity on all systems in X and
//! `_X g = 0` otherwise. Linear combinations of such maps (comb projectors,
//! QC-CC conditions) therefore reduce to conditions on individual string
//! coordinates, which is how the SDP builder states them.

use num_complex::{Complex, Complex64};

use crate::exact::{gq, q, GaussQ};
use crate::tensor::SpaceLayout;

/// Hermitian, pairwise orthogonal, unnormalized local element with small
/// integer entries.
#[derive(Clone, Debug)]
pub struct LocalElement {
    pub entries: Vec<(usize, usize, Complex<i64>)>,
    /// Purely imaginary (antisymmetric) element.
    pub imaginary: bool,
    pub norm_sq: i64,
}

/// Local basis of size d²: identity first, then diagonal, symmetric and
/// antisymmetric off-diagonal elements.
pub fn local_basis(d: usize) -> Vec<LocalElement> {
    let one = Complex::new(1i64, 0);
    let mut out = vec![LocalElement {
        entries: (0..d).map(|i| (i, i, one)).collect(),
        imaginary: false,
        norm_sq: d as i64,
    }];
    for l in 1..d {
        let mut entries: Vec<_> = (0..l).map(|i| (i, i, one)).collect();
        entries.push((l, l, Complex::new(-(l as i64), 0)));
        out.push(LocalElement { entries, imaginary: false, norm_sq: (l * (l + 1)) as i64 });
    }
    for j in 0..d {
        for k in j + 1..d {
            out.push(LocalElement { entries: vec![(j, k, one), (k, j, one)], imaginary: false, norm_sq: 2 });
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            out.push(LocalElement {
                entries: vec![(j, k, Complex::new(0, -1)), (k, j, Complex::new(0, 1))],
                imaginary: true,
                norm_sq: 2,
            });
        }
    }
    out
}

/// Cached local bases for a layout, used to expand strings.
#[derive(Clone, Debug)]
pub struct StringBasis {
    dims: Vec<usize>,
    locals: Vec<Vec<LocalElement>>,
}

impl StringBasis {
    pub fn new(layout: &SpaceLayout) -> Self {
        let dims = layout.dims().to_vec();
        let locals = dims.iter().map(|&d| local_basis(d)).collect();
        StringBasis { dims, locals }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of strings, `D²`.
    pub fn len(&self) -> usize {
        self.dims.iter().map(|d| d * d).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decodes a string number into per-system local indices.
    pub fn decode(&self, mut n: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            let b = self.dims[k] * self.dims[k];
            idx[k] = n % b;
            n /= b;
        }
        idx
    }

    pub fn is_real(&self, idx: &[usize]) -> bool {
        idx.iter().enumerate().filter(|(k, &i)| self.locals[*k][i].imaginary).count() % 2 == 0
    }

    pub fn norm_sq(&self, idx: &[usize]) -> i64 {
        idx.iter().enumerate().map(|(k, &i)| self.locals[k][i].norm_sq).product()
    }

    /// True when the string is the identity on every system with `mask[k]`.
    pub fn trivial_on(idx: &[usize], mask: &[bool]) -> bool {
        idx.iter().zip(mask).all(|(&i, &m)| !m || i == 0)
    }

    /// Sparse entries `(row, col, value)` of the string matrix.
    pub fn entries(&self, idx: &[usize]) -> Vec<(usize, usize, Complex<i64>)> {
        let mut acc: Vec<(usize, usize, Complex<i64>)> = vec![(0, 0, Complex::new(1, 0))];
        for (k, &i) in idx.iter().enumerate() {
            let d = self.dims[k];
            let el = &self.locals[k][i];
            let mut next = Vec::with_capacity(acc.len() * el.entries.len());
            for &(r, c, v) in &acc {
                for &(lr, lc, lv) in &el.entries {
                    next.push((r * d + lr, c * d + lc, v * lv));
                }
            }
            acc = next;
        }
        acc
    }

    pub fn entries_f64(&self, idx: &[usize]) -> Vec<(usize, usize, Complex64)> {
        self.entries(idx)
            .into_iter()
            .map(|(r, c, v)| (r, c, Complex64::new(v.re as f64, v.im as f64)))
            .collect()
    }

    pub fn entries_exact(&self, idx: &[usize]) -> Vec<(usize, usize, GaussQ)> {
        self.entries(idx)
            .into_iter()
            .map(|(r, c, v)| (r, c, gq(q(v.re, 1), q(v.im, 1))))
            .collect()
    }
}
