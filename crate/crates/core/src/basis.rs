//! Spanning sets for the linear span of k identical copies of qubit channels.
//!
//! A qubit TP map has Choi `J = x₀·𝟙⊗𝟙/2 + Σ βᵢ 𝟙⊗σᵢ + Σ γⱼₖ σⱼ⊗σₖ` with
//! x₀ = 1, so it is described by 13 homogeneous coordinates x. Grouping the
//! terms of `J^{⊗k}` by multiset shows that `{J_l^{⊗k}}` is linearly
//! independent exactly when the degree-k monomial vectors of the `x_l` are,
//! which keeps exact rank computations at size `binom(12+k, k)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::haar_unitary;
use crate::error::{Error, Result};
use crate::exact::{gq, gq_real, q, q_mod_p, to_float_matrix, GaussQ, ModpEliminator, RationalMatrix, Q};
use crate::tensor::{mats, LabeledMatrix, Operator, SpaceLayout};

/// Number of homogeneous coordinates of a qubit TP map.
pub const QUBIT_TP_COORDS: usize = 13;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// The printed families built from Pauli operators (k = 1, 2, 3).
    Pauli,
    /// Random rational coordinates.
    Random { seed: u64 },
    /// Haar-random unitary channels (spans only unitary inputs).
    Unitary { seed: u64 },
}

impl BasisKind {
    pub fn name(&self) -> &'static str {
        match self {
            BasisKind::Pauli => "pauli",
            BasisKind::Random { .. } => "random",
            BasisKind::Unitary { .. } => "unitary",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            BasisKind::Pauli => None,
            BasisKind::Random { seed } | BasisKind::Unitary { seed } => Some(*seed),
        }
    }
}

/// Single-copy Chois `J_l` on ("in", "out") whose k-th tensor powers form a
/// basis of the k-copy span.
#[derive(Clone, Debug)]
pub struct ChannelBasis {
    pub kind: BasisKind,
    pub copies: usize,
    pub elements: Vec<Operator>,
    /// Exact entries, present for rational bases.
    pub exact: Option<Vec<RationalMatrix>>,
}

impl ChannelBasis {
    pub fn span_dim(&self) -> usize {
        self.elements.len()
    }

    pub fn id(&self) -> String {
        match self.kind.seed() {
            Some(s) => format!("{}-k{}-seed{}", self.kind.name(), self.copies, s),
            None => format!("{}-k{}", self.kind.name(), self.copies),
        }
    }

    /// First `n` elements; a reduced constraint set still gives valid upper bounds.
    pub fn truncated(&self, n: usize) -> ChannelBasis {
        let n = n.min(self.elements.len());
        ChannelBasis {
            kind: self.kind.clone(),
            copies: self.copies,
            elements: self.elements[..n].to_vec(),
            exact: self.exact.as_ref().map(|e| e[..n].to_vec()),
        }
    }
}

/// `binom(d_V − 1 + k, k)`.
pub fn span_dimension(d_v: usize, k: usize) -> usize {
    let n = (d_v + k - 1) as u128;
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n - i) / (i + 1);
    }
    r as usize
}

fn choi_layout() -> SpaceLayout {
    SpaceLayout::new(&[("in", 2), ("out", 2)]).expect("fixed labels")
}

/// Exact 2×2 matrix from integer entries `(re, im)` row-major, divided by `den`.
fn exact2(entries: [(i64, i64); 4], den: i64) -> DMatrix<GaussQ> {
    DMatrix::from_row_slice(2, 2, &entries.map(|(re, im)| gq(q(re, den), q(im, den))))
}

/// Exact Paulis 𝟙, X, Y, Z.
pub fn pauli_exact(i: usize) -> DMatrix<GaussQ> {
    match i {
        0 => exact2([(1, 0), (0, 0), (0, 0), (1, 0)], 1),
        1 => exact2([(0, 0), (1, 0), (1, 0), (0, 0)], 1),
        2 => exact2([(0, 0), (0, -1), (0, 1), (0, 0)], 1),
        3 => exact2([(1, 0), (0, 0), (0, 0), (-1, 0)], 1),
        _ => panic!("pauli index {i}"),
    }
}

fn kron_exact(a: &DMatrix<GaussQ>, b: &DMatrix<GaussQ>) -> DMatrix<GaussQ> {
    let (na, nb) = (a.nrows(), b.nrows());
    DMatrix::from_fn(na * nb, na * nb, |r, c| a[(r / nb, c / nb)].clone() * b[(r % nb, c % nb)].clone())
}

fn half_identity() -> DMatrix<GaussQ> {
    // 𝟙 ⊗ 𝟙/2
    DMatrix::from_fn(4, 4, |r, c| if r == c { gq_real(q(1, 2)) } else { GaussQ::zero() })
}

fn rational_op(m: DMatrix<GaussQ>) -> RationalMatrix {
    RationalMatrix::new(choi_layout(), m).expect("4x4")
}

/// Pauli coefficients `Tr((σ_a⊗σ_b) J)/4` of a 4×4 matrix.
fn pauli_coefficients(j: &DMatrix<GaussQ>) -> [[Q; 4]; 4] {
    let mut out: [[Q; 4]; 4] = Default::default();
    for a in 0..4 {
        for b in 0..4 {
            let p = kron_exact(&pauli_exact(a), &pauli_exact(b));
            let mut acc = GaussQ::zero();
            for r in 0..4 {
                for c in 0..4 {
                    acc += p[(r, c)].clone() * j[(c, r)].clone();
                }
            }
            out[a][b] = acc.re / Q::from_integer(4.into());
        }
    }
    out
}

/// The 13 homogeneous coordinates `(x₀, β, γ)` of an exact TP Choi.
pub fn tp_coordinates(j: &RationalMatrix) -> Result<Vec<Q>> {
    let c = pauli_coefficients(j.data());
    if (1..4).any(|a| !c[a][0].is_zero()) {
        return Err(Error::Invalid("operator is not trace preserving".into()));
    }
    let mut x = vec![&c[0][0] * Q::from_integer(2.into())];
    for b in 1..4 {
        x.push(c[0][b].clone());
    }
    for a in 1..4 {
        for b in 1..4 {
            x.push(c[a][b].clone());
        }
    }
    Ok(x)
}

/// Degree-k monomials of `x` over nondecreasing index tuples.
pub fn monomials(x: &[Q], k: usize) -> Vec<Q> {
    fn rec(x: &[Q], k: usize, start: usize, acc: Q, out: &mut Vec<Q>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..x.len() {
            rec(x, k - 1, i, &acc * &x[i], out);
        }
    }
    let mut out = vec![];
    rec(x, k, 0, Q::from_integer(1.into()), &mut out);
    out
}

fn monomial_row_mod_p(j: &RationalMatrix, k: usize) -> Result<Vec<u64>> {
    monomials(&tp_coordinates(j)?, k).iter().map(q_mod_p).collect()
}

/// `𝟙⊗𝟙/2`, `𝟙⊗𝟙/2 + 𝟙⊗σᵢ`, `𝟙⊗𝟙/2 + σⱼ⊗σₖ`.
pub fn single_copy_basis() -> ChannelBasis {
    let mut ex = vec![half_identity()];
    for i in 1..4 {
        ex.push(half_identity() + kron_exact(&pauli_exact(0), &pauli_exact(i)));
    }
    for j in 1..4 {
        for k in 1..4 {
            ex.push(half_identity() + kron_exact(&pauli_exact(j), &pauli_exact(k)));
        }
    }
    from_exact(BasisKind::Pauli, 1, ex.into_iter().map(rational_op).collect())
}

fn from_exact(kind: BasisKind, copies: usize, exact: Vec<RationalMatrix>) -> ChannelBasis {
    let elements = exact.iter().map(to_float_matrix).collect();
    ChannelBasis { kind, copies, elements, exact: Some(exact) }
}

fn ket_exact(v: [(i64, i64); 2], den: i64) -> Vec<GaussQ> {
    v.iter().map(|&(re, im)| gq(q(re, den), q(im, den))).collect()
}

fn proj_exact(v: &[GaussQ]) -> DMatrix<GaussQ> {
    let n = v.len();
    DMatrix::from_fn(n, n, |r, c| v[r].clone() * v[c].conj())
}

/// `2|ψ⟩⟨ψ|` for a Bell vector `(|ab⟩ ± |cd⟩)/√2`, written without roots.
fn bell2(a: usize, b: usize, sign: i64) -> DMatrix<GaussQ> {
    let mut v = vec![GaussQ::zero(); 4];
    v[a] = gq_real(q(1, 1));
    v[b] = gq_real(q(sign, 1));
    proj_exact(&v)
}

/// `𝟙 ⊗ |ψ⟩⟨ψ|` for a qubit vector with entries scaled so that the
/// projector is rational: entries (re, im) / den with norm 1 after squaring.
fn replace_with(v: [(i64, i64); 2], norm_sq_den: i64) -> DMatrix<GaussQ> {
    let p = proj_exact(&ket_exact(v, 1)).map(|z| z * gq_real(q(1, norm_sq_den)));
    kron_exact(&pauli_exact(0), &p)
}

fn rho_list_two() -> Vec<DMatrix<GaussQ>> {
    vec![
        half_identity(),
        bell2(0, 3, 1),
        replace_with([(1, 0), (0, 0)], 1),
        replace_with([(1, 0), (1, 0)], 2),
        replace_with([(1, 0), (0, 1)], 2),
    ]
}

fn rho_list_three() -> Vec<DMatrix<GaussQ>> {
    vec![
        half_identity(),
        bell2(0, 3, 1),
        bell2(0, 3, -1),
        bell2(1, 2, 1),
        bell2(1, 2, -1),
        replace_with([(1, 0), (0, 0)], 1),
        replace_with([(0, 0), (1, 0)], 1),
        replace_with([(1, 0), (1, 0)], 2),
        replace_with([(1, 0), (-1, 0)], 2),
        replace_with([(1, 0), (0, 1)], 2),
        replace_with([(1, 0), (0, -1)], 2),
    ]
}

fn sigma_in_two() -> Vec<DMatrix<GaussQ>> {
    (0..4).map(pauli_exact).collect()
}

fn sigma_out_two() -> Vec<DMatrix<GaussQ>> {
    (1..4).map(pauli_exact).collect()
}

fn sigma_in_three() -> Vec<DMatrix<GaussQ>> {
    let mut v = sigma_in_two();
    v.push(pauli_exact(1) + pauli_exact(3));
    v.push(pauli_exact(1) + pauli_exact(2));
    v
}

fn sigma_out_three() -> Vec<DMatrix<GaussQ>> {
    let mut v = sigma_out_two();
    v.push(pauli_exact(1) + pauli_exact(3));
    v.push(pauli_exact(1) + pauli_exact(2));
    v
}

/// Keeps candidates whose k-th powers are independent of those kept so far,
/// until `target` are found. Independence is decided modulo a large prime,
/// which certifies independence over the rationals.
fn greedy_select(
    candidates: impl Iterator<Item = DMatrix<GaussQ>>,
    k: usize,
    target: usize,
) -> Result<Vec<RationalMatrix>> {
    let mut elim = ModpEliminator::new();
    let mut kept = vec![];
    for cand in candidates {
        let j = rational_op(cand);
        if elim.try_insert(monomial_row_mod_p(&j, k)?) {
            kept.push(j);
            if kept.len() == target {
                return Ok(kept);
            }
        }
    }
    Err(Error::RankDeficient { rank: kept.len(), expected: target })
}

/// Basis of the two-copy span selected from the overcomplete printed family.
pub fn two_copy_basis() -> Result<ChannelBasis> {
    let rho = rho_list_two();
    let si = sigma_in_two();
    let so = sigma_out_two();
    let mut cands: Vec<DMatrix<GaussQ>> = vec![half_identity()];
    for r in &rho {
        for sign in [1i64, -1] {
            for a in &si {
                for b in &so {
                    cands.push(r + kron_exact(a, b).map(|z| z * gq_real(q(sign, 1))));
                }
            }
        }
    }
    for r in &rho {
        for a in &si {
            for b in &so {
                for c in &si {
                    for d in &so {
                        cands.push(r + kron_exact(a, b) + kron_exact(c, d));
                    }
                }
            }
        }
    }
    let kept = greedy_select(cands.into_iter(), 2, span_dimension(QUBIT_TP_COORDS, 2))?;
    Ok(from_exact(BasisKind::Pauli, 2, kept))
}

/// Basis of the three-copy span selected from the overcomplete printed family.
pub fn three_copy_basis() -> Result<ChannelBasis> {
    let rho = rho_list_three();
    let si = sigma_in_three();
    let so = sigma_out_three();
    let cands = rho.iter().flat_map(move |r| {
        let (si, so) = (si.clone(), so.clone());
        [1i64, -1].into_iter().flat_map(move |sign| {
            let (si, so) = (si.clone(), so.clone());
            let r = r.clone();
            iproduct4(si.len(), so.len()).map(move |(j, k, l, m)| {
                &r + kron_exact(&si[j], &so[k]).map(|z| z * gq_real(q(sign, 1)))
                    + kron_exact(&si[l], &so[m])
            })
        })
    });
    let kept = greedy_select(cands, 3, span_dimension(QUBIT_TP_COORDS, 3))?;
    Ok(from_exact(BasisKind::Pauli, 3, kept))
}

fn iproduct4(ni: usize, no: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..ni).flat_map(move |j| {
        (0..no).flat_map(move |k| (0..ni).flat_map(move |l| (0..no).map(move |m| (j, k, l, m))))
    })
}

/// The printed Pauli family for k ∈ {1, 2, 3}.
pub fn pauli_basis(k: usize) -> Result<ChannelBasis> {
    match k {
        1 => Ok(single_copy_basis()),
        2 => two_copy_basis(),
        3 => three_copy_basis(),
        _ => Err(Error::UnsupportedK(k)),
    }
}

/// Exact TP Choi from coordinates `(1, α, γ)`.
pub fn choi_from_coordinates(x: &[Q]) -> RationalMatrix {
    let mut m = half_identity().map(|z| z * gq_real(x[0].clone()));
    for b in 1..4 {
        m += kron_exact(&pauli_exact(0), &pauli_exact(b)).map(|z| z * gq_real(x[b].clone()));
    }
    for a in 1..4 {
        for b in 1..4 {
            m += kron_exact(&pauli_exact(a), &pauli_exact(b))
                .map(|z| z * gq_real(x[3 + 3 * (a - 1) + b].clone()));
        }
    }
    rational_op(m)
}

/// Random small fractions as coordinates; keeps independent k-th powers.
pub fn random_k_copy_basis(k: usize, seed: u64) -> Result<ChannelBasis> {
    if k == 0 {
        return Err(Error::UnsupportedK(k));
    }
    let target = span_dimension(QUBIT_TP_COORDS, k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elim = ModpEliminator::new();
    let mut kept = vec![];
    for _ in 0..20 * target {
        let mut x = vec![Q::from_integer(1.into())];
        for _ in 1..QUBIT_TP_COORDS {
            x.push(q(rng.gen_range(-6..=6), rng.gen_range(1..=6)));
        }
        if elim.try_insert(monomials(&x, k).iter().map(q_mod_p).collect::<Result<_>>()?) {
            kept.push(choi_from_coordinates(&x));
            if kept.len() == target {
                return Ok(from_exact(BasisKind::Random { seed }, k, kept));
            }
        }
    }
    Err(Error::RankDeficient { rank: kept.len(), expected: target })
}

/// Dimension of the span of k copies of qubit unitary channels.
pub fn unitary_span_dimension(k: usize) -> usize {
    span_dimension(4, 2 * k)
}

fn vec_of(m: &DMatrix<Complex64>) -> DVector<Complex64> {
    DVector::from_iterator(m.len(), m.transpose().iter().cloned())
}

fn kron_vec(a: &DVector<Complex64>, b: &DVector<Complex64>) -> DVector<Complex64> {
    DVector::from_fn(a.len() * b.len(), |i, _| a[i / b.len()] * b[i % b.len()])
}

/// Haar-random unitary Chois whose k-th powers are independent (floating
/// Gram-Schmidt with relative threshold 1e-8).
pub fn unitary_k_copy_basis(k: usize, seed: u64) -> Result<ChannelBasis> {
    if k == 0 {
        return Err(Error::UnsupportedK(k));
    }
    let target = unitary_span_dimension(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ortho: Vec<DVector<Complex64>> = vec![];
    let mut kept = vec![];
    for _ in 0..20 * target {
        let u = haar_unitary(2, &mut rng);
        let v = DVector::from_fn(4, |r, _| u[(r % 2, r / 2)]);
        let j = Operator::from_ket(choi_layout(), &v)?;
        let single = vec_of(j.data());
        let mut w = single.clone();
        for _ in 1..k {
            w = kron_vec(&w, &single);
        }
        let norm0 = w.norm();
        for _ in 0..2 {
            for b in &ortho {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if n > 1e-8 * norm0 {
            ortho.push(w / Complex64::new(n, 0.0));
            kept.push(j);
            if kept.len() == target {
                return Ok(ChannelBasis { kind: BasisKind::Unitary { seed }, copies: k, elements: kept, exact: None });
            }
        }
    }
    Err(Error::RankDeficient { rank: kept.len(), expected: target })
}

/// Relabels a single-copy Choi onto the given (input, output) labels.
pub fn placed(j: &LabeledMatrix<Complex64>, input: &str, output: &str) -> Operator {
    j.relabel(&[("in", input), ("out", output)]).expect("basis elements use in/out labels")
}

/// Least-squares residual of `target` against the span of `vectors`
/// (relative to ‖target‖).
pub fn span_residual(vectors: &[DVector<Complex64>], target: &DVector<Complex64>) -> f64 {
    let a = DMatrix::from_columns(vectors);
    let qr = a.clone().qr();
    let q = qr.q();
    let proj = &q * (q.adjoint() * target);
    (target - proj).norm() / target.norm().max(1e-300)
}

/// Flattened `J^{⊗k}` (row-major entries).
pub fn power_vector(j: &Operator, k: usize) -> DVector<Complex64> {
    let single = vec_of(j.data());
    let mut w = single.clone();
    for _ in 1..k {
        w = kron_vec(&w, &single);
    }
    w
}

/// Identity-channel Choi on ("in", "out").
pub fn identity_element() -> Operator {
    mats::identity_choi("in", "out", 2)
}
