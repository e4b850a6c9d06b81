//! The quantum switch: Kraus-level action and Choi operator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::tensor::{mats, Operator, SpaceLayout};

/// System order of the switch Choi operator.
pub const SWITCH_LABELS: [&str; 8] = ["cI", "tI", "AI", "AO", "BI", "BO", "tO", "cO"];

/// Systems left after fixing the control to |+⟩ and the target to |0⟩.
pub const FIXED_INPUT_LABELS: [&str; 6] = ["AI", "AO", "BI", "BO", "tO", "cO"];

/// Relative threshold below which operator-Schmidt coefficients are dropped.
pub const SCHMIDT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SwitchChoi {
    pub s_vector: DVector<Complex64>,
    pub operator: Operator,
    pub target_dim: usize,
}

fn switch_layout(d: usize) -> SpaceLayout {
    let dims = [2, d, d, d, d, d, d, 2];
    let pairs: Vec<(&str, usize)> = SWITCH_LABELS.iter().cloned().zip(dims).collect();
    SpaceLayout::new(&pairs).expect("fixed labels")
}

/// `|s⟩ = |0⟩|𝟙⟩^{tI AI}|𝟙⟩^{AO BI}|𝟙⟩^{BO tO}|0⟩ + |1⟩|𝟙⟩^{tI BI}|𝟙⟩^{BO AI}|𝟙⟩^{AO tO}|1⟩`
/// on (cI, tI, AI, AO, BI, BO, tO, cO).
pub fn switch_choi(d: usize) -> Result<SwitchChoi> {
    if d < 2 {
        return Err(Error::Invalid("target dimension must be at least 2".into()));
    }
    let layout = switch_layout(d);
    let strides = {
        let dims = layout.dims();
        let mut s = vec![1usize; 8];
        for i in (0..7).rev() {
            s[i] = s[i + 1] * dims[i + 1];
        }
        s
    };
    let idx = |digits: [usize; 8]| digits.iter().zip(&strides).map(|(a, b)| a * b).sum::<usize>();
    let mut v = DVector::<Complex64>::zeros(layout.total_dim());
    let one = Complex64::new(1.0, 0.0);
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                // control 0: tI=AI=x, AO=BI=y, BO=tO=z
                v[idx([0, x, x, y, y, z, z, 0])] += one;
                // control 1: tI=BI=x, BO=AI=y, AO=tO=z
                v[idx([1, x, y, z, x, y, z, 1])] += one;
            }
        }
    }
    let operator = Operator::from_ket(layout, &v)?;
    Ok(SwitchChoi { s_vector: v, operator, target_dim: d })
}

/// `(|+⟩⟨+| ⊗ |0⟩⟨0|) * S` on (AI, AO, BI, BO, tO, cO).
pub fn switch_fixed_inputs(d: usize) -> Result<Operator> {
    let s = switch_choi(d)?;
    let rho = mats::on("cI", mats::projector(&mats::plus())).kron(&mats::on("tI", mats::projector(&mats::ket(d, 0))))?;
    rho.link(&s.operator)?.permute_systems(&FIXED_INPUT_LABELS)
}

/// `Tr_{tO}(S_{+0})` on (AI, AO, BI, BO, cO).
pub fn switch_restricted(d: usize) -> Result<Operator> {
    switch_fixed_inputs(d)?.partial_trace(&["tO"])
}

/// One term `A(a) ⊗ A'(a)` of an operator-Schmidt decomposition; the
/// coefficient is folded into the first factor.
#[derive(Clone, Debug)]
pub struct SchmidtTerm {
    pub local: DMatrix<Complex64>,
    pub primed: DMatrix<Complex64>,
}

/// Decomposes `k : (t_in ⊗ p_in) → (t_out ⊗ p_out)` as `Σ_a A(a) ⊗ A'(a)`.
pub fn operator_schmidt(
    k: &DMatrix<Complex64>,
    t_dims: (usize, usize),
    p_dims: (usize, usize),
) -> Result<Vec<SchmidtTerm>> {
    let (t_in, t_out) = t_dims;
    let (p_in, p_out) = p_dims;
    if k.nrows() != t_out * p_out || k.ncols() != t_in * p_in {
        return Err(Error::DimensionMismatch("operator does not match the bipartite split".into()));
    }
    // realignment R[(to,ti),(po,pi)] = K[(to,po),(ti,pi)]
    let r = DMatrix::from_fn(t_out * t_in, p_out * p_in, |row, col| {
        let (to, ti) = (row / t_in, row % t_in);
        let (po, pi) = (col / p_in, col % p_in);
        k[(to * p_out + po, ti * p_in + pi)]
    });
    let svd = r.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut terms = vec![];
    for (a, &s) in svd.singular_values.iter().enumerate() {
        if s <= SCHMIDT_TOL * smax.max(1.0) {
            continue;
        }
        let local = DMatrix::from_fn(t_out, t_in, |to, ti| u[(to * t_in + ti, a)] * s);
        let primed = DMatrix::from_fn(p_out, p_in, |po, pi| vt[(a, po * p_in + pi)]);
        terms.push(SchmidtTerm { local, primed });
    }
    Ok(terms)
}

fn control_proj(c: usize) -> DMatrix<Complex64> {
    mats::projector(&mats::ket(2, c))
}

/// Channel `S(A, B)` acting on control ⊗ target, or on control ⊗ target ⊗
/// A' ⊗ B' when the inputs are bipartite (two-system layouts whose first
/// system is the switched one).
pub fn apply_switch(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    match (a.in_layout().len(), b.in_layout().len()) {
        (1, 1) => apply_switch_local(a, b),
        (2, 2) => apply_switch_bipartite(a, b),
        _ => Err(Error::DimensionMismatch("channels must be both local or both bipartite".into())),
    }
}

fn apply_switch_local(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    let d = a.in_dim();
    if a.out_dim() != d || b.in_dim() != d || b.out_dim() != d {
        return Err(Error::DimensionMismatch("switch needs d → d channels of equal d".into()));
    }
    let p0 = control_proj(0);
    let p1 = control_proj(1);
    let mut kraus = vec![];
    for ai in a.kraus() {
        for bj in b.kraus() {
            kraus.push(p0.kronecker(&(bj * ai)) + p1.kronecker(&(ai * bj)));
        }
    }
    KrausChannel::new(
        kraus,
        SpaceLayout::new(&[("cI", 2), ("tI", d)])?,
        SpaceLayout::new(&[("cO", 2), ("tO", d)])?,
    )
}

fn bipartite_dims(ch: &KrausChannel) -> ((usize, usize), (usize, usize)) {
    let i = ch.in_layout().dims();
    let o = ch.out_layout().dims();
    ((i[0], o[0]), (i[1], o[1]))
}

/// Schmidt terms of every Kraus operator of a bipartite channel.
pub fn bipartite_terms(ch: &KrausChannel) -> Result<Vec<Vec<SchmidtTerm>>> {
    let (t, p) = bipartite_dims(ch);
    ch.kraus().iter().map(|k| operator_schmidt(k, t, p)).collect()
}

fn apply_switch_bipartite(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    let ((ta_in, ta_out), (pa_in, pa_out)) = bipartite_dims(a);
    let ((tb_in, tb_out), (pb_in, pb_out)) = bipartite_dims(b);
    let d = ta_in;
    if ta_out != d || tb_in != d || tb_out != d {
        return Err(Error::DimensionMismatch("switched systems must all have dimension d".into()));
    }
    let at = bipartite_terms(a)?;
    let bt = bipartite_terms(b)?;
    let p0 = control_proj(0);
    let p1 = control_proj(1);
    let mut kraus = vec![];
    for ai in &at {
        for bj in &bt {
            let mut s = DMatrix::<Complex64>::zeros(2 * d * pa_out * pb_out, 2 * d * pa_in * pb_in);
            for ta in ai {
                for tb in bj {
                    let primed = ta.primed.kronecker(&tb.primed);
                    s += p0.kronecker(&(&tb.local * &ta.local)).kronecker(&primed);
                    s += p1.kronecker(&(&ta.local * &tb.local)).kronecker(&primed);
                }
            }
            kraus.push(s);
        }
    }
    KrausChannel::new(
        kraus,
        SpaceLayout::new(&[("cI", 2), ("tI", d), ("A'I", pa_in), ("B'I", pb_in)])?,
        SpaceLayout::new(&[("cO", 2), ("tO", d), ("A'O", pa_out), ("B'O", pb_out)])?,
    )
}

/// `F = Tr(m n) / (d_AO d_BO)²`. The normalization is read off the common
/// trace `Tr m = Tr n = d_AO d_BO`; exact for a rank-one reference `m`.
pub fn choi_fidelity(m: &Operator, n: &Operator) -> Result<f64> {
    let n = n.aligned_to(m.layout()).map_err(|_| {
        Error::DimensionMismatch(format!("layouts differ: {} vs {}", m.layout(), n.layout()))
    })?;
    let (tm, tn) = (m.trace_re(), n.trace_re());
    if (tm - tn).abs() > 1e-8 * tm.abs().max(1.0) {
        return Err(Error::Invalid(format!("traces differ: {tm} vs {tn}")));
    }
    Ok(m.trace_product(&n)?.re / (tm * tn))
}
