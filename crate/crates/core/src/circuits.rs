//! Fixed-order circuits that try to reproduce the switch, written directly as
//! Kraus families, and the comparisons against the switch itself.
//!
//! Every circuit prepares its auxiliary wires in |0⟩, so the returned channel
//! maps the switch inputs to the switch outputs plus the auxiliary outputs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{kraus_to_choi, KrausChannel};
use crate::error::{Error, Result};
use crate::switch::{bipartite_terms, choi_fidelity, SchmidtTerm};
use crate::tensor::{mats, Operator, SpaceLayout};

/// Kraus family of a circuit together with the bookkeeping needed to compare
/// it with the switch.
#[derive(Clone, Debug)]
pub struct CircuitKrausFamily {
    pub name: String,
    /// Input-channel Kraus indices of each operator, e.g. `[i, j, i', j']`.
    pub indices: Vec<Vec<usize>>,
    pub channel: KrausChannel,
    /// Output labels to discard.
    pub aux: Vec<String>,
}

impl CircuitKrausFamily {
    /// The channel with the auxiliary outputs traced out, as a Choi operator.
    pub fn reduced_choi(&self) -> Result<Operator> {
        kraus_to_choi(&self.channel)?.partial_trace(&self.aux)
    }
}

fn control(c: usize) -> DMatrix<Complex64> {
    mats::projector(&mats::ket(2, c))
}

fn kron_all(factors: &[&DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(*f);
    }
    out
}

/// Keeps the columns of `k` whose indices on the `prepared` wires are 0,
/// i.e. composes `k` with |0⟩ on those wires.
fn prepare(k: &DMatrix<Complex64>, in_dims: &[usize], prepared: &[bool]) -> DMatrix<Complex64> {
    let mut cols = vec![];
    let total: usize = in_dims.iter().product();
    'outer: for col in 0..total {
        let mut rem = col;
        for w in (0..in_dims.len()).rev() {
            if prepared[w] && rem % in_dims[w] != 0 {
                continue 'outer;
            }
            rem /= in_dims[w];
        }
        cols.push(col);
    }
    DMatrix::from_fn(k.nrows(), cols.len(), |r, c| k[(r, cols[c])])
}

fn local_dim(ch: &KrausChannel, what: &str) -> Result<usize> {
    if ch.in_layout().len() != 1 || ch.in_dim() != ch.out_dim() {
        return Err(Error::DimensionMismatch(format!("{what} must be a single-system d → d channel")));
    }
    Ok(ch.in_dim())
}

/// Wires (control, aux, target); the aux carries the second calls.
/// `K = |0⟩⟨0| ⊗ A_{i'}B_{j'} ⊗ B_j A_i + |1⟩⟨1| ⊗ B_j A_i ⊗ A_{i'}B_{j'}`.
pub fn naive_circuit(a: &KrausChannel, b: &KrausChannel) -> Result<CircuitKrausFamily> {
    let d = local_dim(a, "A")?;
    if local_dim(b, "B")? != d {
        return Err(Error::DimensionMismatch("A and B act on different dimensions".into()));
    }
    let (p0, p1) = (control(0), control(1));
    let mut kraus = vec![];
    let mut indices = vec![];
    for (i, ai) in a.kraus().iter().enumerate() {
        for (j, bj) in b.kraus().iter().enumerate() {
            for (i2, ai2) in a.kraus().iter().enumerate() {
                for (j2, bj2) in b.kraus().iter().enumerate() {
                    let ba = bj * ai;
                    let ab = ai2 * bj2;
                    let k = kron_all(&[&p0, &ab, &ba]) + kron_all(&[&p1, &ba, &ab]);
                    kraus.push(prepare(&k, &[2, d, d], &[false, true, false]));
                    indices.push(vec![i, j, i2, j2]);
                }
            }
        }
    }
    let channel = KrausChannel::new(
        kraus,
        SpaceLayout::new(&[("cI", 2), ("tI", d)])?,
        SpaceLayout::new(&[("cO", 2), ("auxO", d), ("tO", d)])?,
    )?;
    Ok(CircuitKrausFamily { name: "naive".into(), indices, channel, aux: vec!["auxO".into()] })
}

/// Order ABA with an extra call of A on the aux:
/// `K = |0⟩⟨0| ⊗ A_{i'} ⊗ B_j A_i + |1⟩⟨1| ⊗ A_i ⊗ A_{i'} B_j`.
pub fn chiribella_circuit(a: &KrausChannel, b: &KrausChannel) -> Result<CircuitKrausFamily> {
    let d = local_dim(a, "A")?;
    if local_dim(b, "B")? != d {
        return Err(Error::DimensionMismatch("A and B act on different dimensions".into()));
    }
    let (p0, p1) = (control(0), control(1));
    let mut kraus = vec![];
    let mut indices = vec![];
    for (i, ai) in a.kraus().iter().enumerate() {
        for (j, bj) in b.kraus().iter().enumerate() {
            for (i2, ai2) in a.kraus().iter().enumerate() {
                let k = kron_all(&[&p0, ai2, &(bj * ai)]) + kron_all(&[&p1, ai, &(ai2 * bj)]);
                kraus.push(prepare(&k, &[2, d, d], &[false, true, false]));
                indices.push(vec![i, j, i2]);
            }
        }
    }
    let channel = KrausChannel::new(
        kraus,
        SpaceLayout::new(&[("cI", 2), ("tI", d)])?,
        SpaceLayout::new(&[("cO", 2), ("auxO", d), ("tO", d)])?,
    )?;
    Ok(CircuitKrausFamily { name: "aba".into(), indices, channel, aux: vec!["auxO".into()] })
}

/// `(local, primed)` dimensions of a bipartite channel whose two systems keep
/// their dimensions.
fn bipartite_dims(ch: &KrausChannel, what: &str) -> Result<(usize, usize)> {
    let (i, o) = (ch.in_layout().dims(), ch.out_layout().dims());
    if i.len() != 2 || o.len() != 2 || i != o {
        return Err(Error::DimensionMismatch(format!("{what} must be bipartite with equal input and output dimensions")));
    }
    Ok((i[0], i[1]))
}

/// `Σ_a A'(a) ⊗ X(a) ⊗ B'(b)`-style sums over Schmidt terms of one Kraus
/// operator of A and one of B, with the target factor given by `middle`.
fn schmidt_sum(
    ta: &[SchmidtTerm],
    tb: &[SchmidtTerm],
    middle: impl Fn(&SchmidtTerm, &SchmidtTerm) -> DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let mut out: Option<DMatrix<Complex64>> = None;
    for x in ta {
        for y in tb {
            let t = kron_all(&[&x.primed, &middle(x, y), &y.primed]);
            out = Some(match out {
                Some(o) => o + t,
                None => t,
            });
        }
    }
    out.expect("nonempty Schmidt decompositions")
}

/// Six wires (control, aux₁, aux₂, A', target, B'). A acts on (A', target)
/// and, in the second branch, on (aux₁, aux₂):
/// `C_ijk = |0⟩⟨0| ⊗ A_k ⊗ Σ α_{a|i}β_{b|j} A'(a) ⊗ B(b)A(a) ⊗ B'(b)
///        + |1⟩⟨1| ⊗ A_i ⊗ Σ α_{a|k}β_{b|j} A'(a) ⊗ A(a)B(b) ⊗ B'(b)`.
/// Inputs are bipartite channels whose first system is the switched one.
pub fn bipartite_aba_circuit(a: &KrausChannel, b: &KrausChannel) -> Result<CircuitKrausFamily> {
    let (d, pa) = bipartite_dims(a, "A")?;
    let (db, pb) = bipartite_dims(b, "B")?;
    if d != db {
        return Err(Error::DimensionMismatch("A and B switch systems of different dimensions".into()));
    }
    let at = bipartite_terms(a)?;
    let bt = bipartite_terms(b)?;
    // A_k on (aux₁, aux₂) with the primed factor first
    let on_aux: Vec<DMatrix<Complex64>> = at
        .iter()
        .map(|terms| terms.iter().map(|t| t.primed.kronecker(&t.local)).fold(DMatrix::zeros(pa * d, pa * d), |acc, m| acc + m))
        .collect();
    let (p0, p1) = (control(0), control(1));
    let dims = [2, pa, d, pa, d, pb];
    let mut kraus = vec![];
    let mut indices = vec![];
    for i in 0..at.len() {
        for j in 0..bt.len() {
            for k in 0..at.len() {
                let first = schmidt_sum(&at[i], &bt[j], |x, y| &y.local * &x.local);
                let second = schmidt_sum(&at[k], &bt[j], |x, y| &x.local * &y.local);
                let op = kron_all(&[&p0, &on_aux[k], &first]) + kron_all(&[&p1, &on_aux[i], &second]);
                kraus.push(prepare(&op, &dims, &[false, true, true, false, false, false]));
                indices.push(vec![i, j, k]);
            }
        }
    }
    let channel = KrausChannel::new(
        kraus,
        SpaceLayout::new(&[("cI", 2), ("A'I", pa), ("tI", d), ("B'I", pb)])?,
        SpaceLayout::new(&[("cO", 2), ("aux1O", pa), ("aux2O", d), ("A'O", pa), ("tO", d), ("B'O", pb)])?,
    )?;
    Ok(CircuitKrausFamily {
        name: "bipartite-aba".into(),
        indices,
        channel,
        aux: vec!["aux1O".into(), "aux2O".into()],
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SimulationReport {
    /// Frobenius distance between the two Choi operators.
    pub choi_distance: f64,
    /// `Tr(M N) / (Tr M Tr N)` with the reference as `M`; the fidelity when
    /// the reference has rank one.
    pub fidelity: f64,
    /// `|Tr ρ_M² − Tr ρ_N²|` for the trace-normalized Choi operators.
    pub purity_gap: f64,
}

/// Normalized purity `Tr(M²)/Tr(M)²`.
pub fn choi_purity(m: &Operator) -> f64 {
    let t = m.trace_re();
    let sq: f64 = m.data().iter().map(|z| z.norm_sqr()).sum();
    sq / (t * t)
}

/// Compares a circuit channel with a reference after tracing out `discard`
/// from the circuit's outputs. Systems are matched by label.
pub fn check_simulation<S: AsRef<str>>(
    circuit_output: &KrausChannel,
    reference: &KrausChannel,
    discard: &[S],
) -> Result<SimulationReport> {
    let c = kraus_to_choi(circuit_output)?.partial_trace(discard)?;
    let r = kraus_to_choi(reference)?;
    let c = c.aligned_to(r.layout())?;
    Ok(SimulationReport {
        choi_distance: r.distance(&c)?,
        fidelity: choi_fidelity(&r, &c)?.max(0.0),
        purity_gap: (choi_purity(&r) - choi_purity(&c)).abs(),
    })
}

/// Output state on the non-discarded systems for a pure input.
pub fn reduced_output(ch: &KrausChannel, discard: &[&str], psi: &DVector<Complex64>) -> Result<Operator> {
    Operator::new(ch.out_layout().clone(), ch.apply_ket(psi))?.partial_trace(discard)
}

pub fn purity(rho: &Operator) -> f64 {
    choi_purity(rho)
}

/// Bipartite channel from a single-system one: acts as `ch ⊗ 𝟙_{d'}`.
pub fn extend_trivially(ch: &KrausChannel, primed: usize, labels: (&str, &str)) -> Result<KrausChannel> {
    let id = mats::identity(primed);
    let kraus = ch.kraus().iter().map(|k| k.kronecker(&id)).collect();
    KrausChannel::new(
        kraus,
        SpaceLayout::new(&[(format!("{}I", labels.0).as_str(), ch.in_dim()), (format!("{}I", labels.1).as_str(), primed)])?,
        SpaceLayout::new(&[(format!("{}O", labels.0).as_str(), ch.out_dim()), (format!("{}O", labels.1).as_str(), primed)])?,
    )
}
