//! Quantum channels in Kraus form and their Choi operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigen, mats, Operator, SpaceLayout, DEFAULT_TOL};

/// Kraus operators `K_i : in → out`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    kraus: Vec<DMatrix<Complex64>>,
    in_layout: SpaceLayout,
    out_layout: SpaceLayout,
}

impl KrausChannel {
    pub fn new(
        kraus: Vec<DMatrix<Complex64>>,
        in_layout: SpaceLayout,
        out_layout: SpaceLayout,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Invalid("channel needs at least one Kraus operator".into()));
        }
        let (din, dout) = (in_layout.total_dim(), out_layout.total_dim());
        for k in &kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    dout,
                    din
                )));
            }
        }
        Ok(KrausChannel { kraus, in_layout, out_layout })
    }

    /// Channel on a single system with default labels `in` / `out`.
    pub fn simple(kraus: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let (dout, din) = kraus
            .first()
            .map(|k| (k.nrows(), k.ncols()))
            .ok_or_else(|| Error::Invalid("empty Kraus list".into()))?;
        Self::new(kraus, SpaceLayout::single("in", din), SpaceLayout::single("out", dout))
    }

    pub fn unitary(u: DMatrix<Complex64>) -> Result<Self> {
        Self::simple(vec![u])
    }

    pub fn identity(d: usize) -> Self {
        Self::simple(vec![mats::identity(d)]).expect("square")
    }

    pub fn kraus(&self) -> &[DMatrix<Complex64>] {
        &self.kraus
    }

    pub fn in_layout(&self) -> &SpaceLayout {
        &self.in_layout
    }

    pub fn out_layout(&self) -> &SpaceLayout {
        &self.out_layout
    }

    pub fn in_dim(&self) -> usize {
        self.in_layout.total_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.out_layout.total_dim()
    }

    pub fn with_layouts(&self, in_layout: SpaceLayout, out_layout: SpaceLayout) -> Result<Self> {
        Self::new(self.kraus.clone(), in_layout, out_layout)
    }

    /// Renames the single input and output systems.
    pub fn with_labels(&self, input: &str, output: &str) -> Result<Self> {
        if self.in_layout.len() != 1 || self.out_layout.len() != 1 {
            return Err(Error::Invalid("with_labels needs single-system layouts".into()));
        }
        self.with_layouts(
            SpaceLayout::single(input, self.in_dim()),
            SpaceLayout::single(output, self.out_dim()),
        )
    }

    /// Deviation `‖Σ K†K − 𝟙‖_max`.
    pub fn tp_deviation(&self) -> f64 {
        let mut s = DMatrix::<Complex64>::zeros(self.in_dim(), self.in_dim());
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        s -= mats::identity(self.in_dim());
        s.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_deviation() <= tol
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// Pure-state output `Σ K|ψ⟩⟨ψ|K†`.
    pub fn apply_ket(&self, psi: &DVector<Complex64>) -> DMatrix<Complex64> {
        self.apply(&mats::projector(psi))
    }
}

/// `M = Σ_ij |i⟩⟨j| ⊗ 𝓜(|i⟩⟨j|)` on the input systems followed by the output systems.
pub fn kraus_to_choi(ch: &KrausChannel) -> Result<Operator> {
    let layout = ch.in_layout.concat(&ch.out_layout)?;
    let (din, dout) = (ch.in_dim(), ch.out_dim());
    let mut m = DMatrix::<Complex64>::zeros(din * dout, din * dout);
    for k in &ch.kraus {
        // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
        let v = DVector::from_fn(din * dout, |r, _| k[(r % dout, r / dout)]);
        m += &v * v.adjoint();
    }
    Operator::new(layout, m)
}

/// Kraus decomposition of a Choi operator whose input systems are `input`.
pub fn choi_to_kraus<S: AsRef<str>>(m: &Operator, input: &[S], tol: f64) -> Result<KrausChannel> {
    let in_mask = m.layout().mask(input)?;
    let out_mask: Vec<bool> = in_mask.iter().map(|b| !b).collect();
    let in_layout = m.layout().select(&in_mask);
    let out_layout = m.layout().select(&out_mask);
    let order: Vec<String> =
        in_layout.labels().iter().chain(out_layout.labels().iter()).cloned().collect();
    let m = m.permute_systems(&order)?;
    let dev = tp_deviation(&m, out_layout.labels())?;
    if dev > tol {
        return Err(Error::NotTp(dev));
    }
    let (din, dout) = (in_layout.total_dim(), out_layout.total_dim());
    let (vals, vecs) = hermitian_eigen(&m.hermitian_part().into_data());
    let scale: f64 = vals.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let mut kraus = vec![];
    for (i, &lam) in vals.iter().enumerate() {
        if lam < -tol {
            return Err(Error::NotCp(lam));
        }
        if lam <= 1e-13 * scale {
            continue;
        }
        let v = vecs.column(i);
        let s = lam.sqrt();
        kraus.push(DMatrix::from_fn(dout, din, |o, inp| v[inp * dout + o] * s));
    }
    KrausChannel::new(kraus, in_layout, out_layout)
}

pub fn is_cp(m: &Operator, tol: f64) -> bool {
    m.is_psd(tol)
}

fn tp_deviation<S: AsRef<str>>(m: &Operator, output: &[S]) -> Result<f64> {
    let red = m.partial_trace(output)?;
    let n = red.dim();
    let d = red.data() - mats::identity(n);
    Ok(d.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `Tr_O(M) = 𝟙_I` within `tol` (max-entry norm).
pub fn is_tp<S: AsRef<str>>(m: &Operator, output: &[S], tol: f64) -> bool {
    tp_deviation(m, output).map(|d| d <= tol).unwrap_or(false)
}

pub fn is_channel_choi<S: AsRef<str>>(m: &Operator, output: &[S]) -> bool {
    is_cp(m, DEFAULT_TOL) && is_tp(m, output, DEFAULT_TOL)
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let qr = gaussian_matrix(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary_channel<R: Rng + ?Sized>(d: usize, rng: &mut R) -> KrausChannel {
    KrausChannel::unitary(haar_unitary(d, rng)).expect("square")
}

/// Channel with `kraus_rank` Kraus operators cut from a Haar isometry
/// `in → out ⊗ env`.
pub fn random_channel<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    kraus_rank: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if dim_in == 0 || dim_out == 0 || kraus_rank == 0 {
        return Err(Error::Invalid("dimensions and Kraus rank must be positive".into()));
    }
    let n = dim_out * kraus_rank;
    if n < dim_in {
        return Err(Error::Invalid(format!(
            "no isometry from dimension {dim_in} into {dim_out}x{kraus_rank}"
        )));
    }
    let u = haar_unitary(n, rng);
    let kraus = (0..kraus_rank)
        .map(|k| DMatrix::from_fn(dim_out, dim_in, |o, i| u[(o * kraus_rank + k, i)]))
        .collect();
    KrausChannel::simple(kraus)
}

/// Fully depolarizing qubit-or-qudit channel written with generalized Paulis
/// for d = 2 (Kraus {𝟙, X, Y, Z}/2).
pub fn fully_depolarizing_qubit() -> KrausChannel {
    KrausChannel::simple((0..4).map(|i| mats::pauli(i) * Complex64::new(0.5, 0.0)).collect())
        .expect("qubit Paulis")
}

/// Amplitude damping with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> KrausChannel {
    let c = |x: f64| Complex64::new(x, 0.0);
    let k0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())]);
    let k1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
    KrausChannel::simple(vec![k0, k1]).expect("qubit")
}
