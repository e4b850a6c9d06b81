//! Exact dual certificates for upper bounds on the simulation probability.
//!
//! A floating dual point (Γ, R_ij) is turned into an exact one by truncating
//! to n decimal digits, symmetrizing, renormalizing the R_ij, projecting Γ
//! onto the dual affine subspace and shifting it by η𝟙 until both PSD
//! conditions hold exactly. The verifier rebuilds every derived quantity
//! from the bases and the certificate entries alone.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::basis::ChannelBasis;
use crate::comb::CombSpec;
use crate::error::{Error, Result};
use crate::exact::{
    exact_from_float, gq_real, q, q_from_f64, q_parse, q_to_f64, q_to_string, to_float_matrix, truncate_decimal,
    GaussQ, RationalMatrix, Q,
};
use crate::io::{BasisJson, RationalMatrixJson};
use crate::sdp::build::{check_bases, constraint_pairs, power_on, target_for, DualIndex};
use crate::sdp::{build_dual, solve, SdpSolution, SolverOptions};
use crate::sdp::scenario::{CausalClass, SimulationScenario};
use crate::tensor::{LabeledMatrix, Operator, SpaceLayout};

pub use crate::exact::{psd_check_exact, symmetrize};

/// Entrywise truncation toward zero to `digits` decimal places.
pub fn rationalize(m: &Operator, digits: u32) -> RationalMatrix {
    m.map(|z| GaussQ::new(truncate_decimal(z.re, digits), truncate_decimal(z.im, digits)))
}

fn trace_re(m: &RationalMatrix) -> Q {
    m.trace().re
}

/// Rescales the R_ij so that `Σ Tr(R_ij T_ij) = 1` exactly; returns the
/// rescaled list and the original value `t^sym`.
pub fn normalize_dual(rs: &[RationalMatrix], targets: &[RationalMatrix]) -> Result<(Vec<RationalMatrix>, Q)> {
    if rs.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!("{} dual matrices for {} targets", rs.len(), targets.len())));
    }
    let mut t = GaussQ::zero();
    for (r, tt) in rs.iter().zip(targets) {
        t += r.trace_product(tt)?;
    }
    if t.re.is_zero() {
        return Err(Error::Certification("degenerate dual point: Σ Tr(R T) = 0".into()));
    }
    if !t.im.is_zero() {
        return Err(Error::Certification("Σ Tr(R T) is not real; R must be Hermitian".into()));
    }
    let inv = gq_real(Q::one() / &t.re);
    Ok((rs.iter().map(|r| r.scale(&inv)).collect(), t.re))
}

/// Exact 𝐏̄ of the scenario's comb structure.
pub fn project_dual_affine(g: &RationalMatrix, spec: &CombSpec) -> Result<RationalMatrix> {
    spec.project_dual(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdMethod {
    ExactLdl,
    ShiftedFloat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FloatVerdict {
    Accept,
    Unknown,
}

const UNIT_ROUNDOFF: f64 = 1.0 / 9007199254740992.0; // 2^-53

/// Conservative floating-point PSD test. The matrix is rounded to doubles
/// (the rounding error is measured exactly), embedded as a real symmetric
/// matrix of size N = 2n, shifted down by the rounding error and by a
/// Cholesky error allowance, and factored; success proves `m ⪰ 0`.
///
/// Allowance: `c = 2·(γ_{N+1}/(1−2γ_{N+1})·tr + 4N(2(N+1)+max a_ii)·2^-1074)`
/// plus the diagonal rounding of the shift, with `γ_k = k u/(1 − k u)`.
pub fn psd_check_shifted_float(m: &RationalMatrix) -> FloatVerdict {
    if !m.is_exactly_hermitian() {
        return FloatVerdict::Unknown;
    }
    let n = m.dim();
    let nn = 2 * n;
    let mut a = faer::Mat::<f64>::zeros(nn, nn);
    let mut delta = Q::zero();
    for r in 0..n {
        for c in 0..n {
            let z = &m.data()[(r, c)];
            let (re, im) = (q_to_f64(&z.re), q_to_f64(&z.im));
            if !re.is_finite() || !im.is_finite() {
                return FloatVerdict::Unknown;
            }
            for (f, x) in [(re, &z.re), (im, &z.im)] {
                let e = (q_from_f64(f) - x).abs();
                if e > delta {
                    delta = e;
                }
            }
            a[(r, c)] = re;
            a[(r + n, c + n)] = re;
            a[(r, c + n)] = -im;
            a[(r + n, c)] = im;
        }
    }
    // ‖A − A'‖₂ ≤ ‖A − A'‖_F ≤ N δ
    let shift_round = nn as f64 * q_to_f64(&delta) * (1.0 + 1e-6);
    let u = UNIT_ROUNDOFF;
    let k = (nn + 1) as f64;
    if k * u >= 0.1 {
        return FloatVerdict::Unknown;
    }
    let gamma = k * u / (1.0 - k * u);
    let tr: f64 = (0..nn).map(|i| a[(i, i)].abs()).sum();
    let max_diag = (0..nn).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    let tiny = 4.0 * nn as f64 * (2.0 * k + max_diag) * f64::from_bits(1);
    let c = 2.0 * (gamma / (1.0 - 2.0 * gamma) * tr + tiny);
    let mut s = shift_round + c;
    s += 4.0 * u * (max_diag + s);
    for i in 0..nn {
        a[(i, i)] -= s;
    }
    match a.llt(faer::Side::Lower) {
        Ok(_) => FloatVerdict::Accept,
        Err(_) => FloatVerdict::Unknown,
    }
}

/// Prefilter first, exact elimination when the prefilter is inconclusive.
pub fn psd_check(m: &RationalMatrix) -> (bool, PsdMethod) {
    match psd_check_shifted_float(m) {
        FloatVerdict::Accept => (true, PsdMethod::ShiftedFloat),
        FloatVerdict::Unknown => (psd_check_exact(m), PsdMethod::ExactLdl),
    }
}

fn plus_identity(m: &RationalMatrix, eta: &Q) -> RationalMatrix {
    let mut out = m.clone();
    let e = gq_real(eta.clone());
    for i in 0..out.dim() {
        out.data_mut()[(i, i)] += e.clone();
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EtaOptions {
    /// Grid step 10^-exponent.
    pub exponent: u32,
    /// Largest η tried.
    pub cap: f64,
}

impl Default for EtaOptions {
    fn default() -> Self {
        EtaOptions { exponent: 7, cap: 1e-2 }
    }
}

#[derive(Clone, Debug)]
pub struct EtaSearch {
    pub eta: Q,
    pub checks: usize,
    /// Floating estimate of the smallest eigenvalue over both matrices at η = 0.
    pub min_eig_estimate: f64,
}

/// Smallest grid point η with `g + η𝟙 ⪰ 0` and `slack + η𝟙 ⪰ 0`, both
/// certified. Uses that the two conditions are monotone in η.
pub fn find_eta(g: &RationalMatrix, slack: &RationalMatrix, opts: &EtaOptions) -> Result<EtaSearch> {
    let step = Q::new(BigInt::one(), BigInt::from(10u32).pow(opts.exponent));
    let est = to_float_matrix(g).min_eigenvalue().min(to_float_matrix(slack).min_eigenvalue());
    let h = q_to_f64(&step);
    let kmax = (opts.cap / h).floor() as u64;
    let mut checks = 0;
    let mut passes = |k: u64| {
        checks += 1;
        let eta = &step * Q::from_integer(BigInt::from(k));
        psd_check(&plus_identity(g, &eta)).0 && psd_check(&plus_identity(slack, &eta)).0
    };
    let k0 = if est >= 0.0 { 0 } else { ((-est / h).ceil() as u64).min(kmax) };
    let (mut lo, mut hi);
    if passes(k0) {
        if k0 == 0 || passes(0) {
            return Ok(EtaSearch { eta: Q::zero(), checks, min_eig_estimate: est });
        }
        lo = 0;
        hi = k0;
    } else {
        lo = k0;
        let mut inc = (k0 / 64).max(1);
        loop {
            let k = lo.saturating_add(inc).min(kmax);
            if passes(k) {
                hi = k;
                break;
            }
            if k == kmax {
                return Err(Error::Certification(format!(
                    "no η ≤ {} makes the dual point feasible (min eigenvalue estimate {est:.3e})",
                    opts.cap
                )));
            }
            lo = k;
            inc *= 2;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EtaSearch { eta: step * Q::from_integer(BigInt::from(hi)), checks, min_eig_estimate: est })
}

/// Exact ingredients of a comb scenario: inserted operators K and targets T.
pub struct ExactScenario {
    pub spec: CombSpec,
    pub var_layout: SpaceLayout,
    pub output_layout: SpaceLayout,
    pub inserted: Vec<RationalMatrix>,
    pub targets: Vec<RationalMatrix>,
    /// `d_P ∏ d_{O_i}`.
    pub normalization: usize,
}

impl ExactScenario {
    pub fn new(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<Self> {
        if scn.causal_class != CausalClass::Comb {
            return Err(Error::Certification("certificates are defined for combs only".into()));
        }
        check_bases(scn, a, b)?;
        let exact_of = |basis: &ChannelBasis| -> Result<Vec<RationalMatrix>> {
            basis.exact.clone().ok_or_else(|| Error::Certification(format!("basis {} has no exact entries", basis.id())))
        };
        let ea = exact_of(a)?;
        let s = scn.effective_switch()?;
        let s_exact = RationalMatrix::new(s.layout().clone(), exact_from_float(s.data()))?;
        let calls_a = scn.calls('A');
        let calls_b = scn.calls('B');
        let mut inserted = vec![];
        let mut targets = vec![];
        if scn.identical_channels {
            for j in &ea {
                inserted.push(power_on(j, &calls_a)?);
                targets.push(target_for(scn, &s_exact, j, j)?);
            }
        } else {
            let eb = exact_of(b.expect("checked"))?;
            let pa: Vec<_> = ea.iter().map(|j| power_on(j, &calls_a)).collect::<Result<_>>()?;
            let pb: Vec<_> = eb.iter().map(|j| power_on(j, &calls_b)).collect::<Result<_>>()?;
            for (i, ja) in ea.iter().enumerate() {
                for (j, jb) in eb.iter().enumerate() {
                    inserted.push(pa[i].kron(&pb[j])?);
                    targets.push(target_for(scn, &s_exact, ja, jb)?);
                }
            }
        }
        Ok(ExactScenario {
            spec: scn.comb_spec(),
            var_layout: scn.variable_layout()?,
            output_layout: scn.output_layout(),
            inserted,
            targets,
            normalization: scn.normalization(),
        })
    }

    /// `Γ − Σ R_ij ⊗ K_ijᵀ` on the comb layout.
    pub fn slack(&self, gamma: &RationalMatrix, rs: &[RationalMatrix]) -> Result<RationalMatrix> {
        if rs.len() != self.inserted.len() {
            return Err(Error::DimensionMismatch(format!("{} R matrices for {} pairs", rs.len(), self.inserted.len())));
        }
        let mut acc: RationalMatrix = LabeledMatrix::zeros(gamma.layout().clone());
        for (r, k) in rs.iter().zip(&self.inserted) {
            acc = acc.add(&r.kron(&k.transpose())?.aligned_to(gamma.layout())?)?;
        }
        gamma.sub(&acc)
    }

    /// `N · Tr(Γ) / D`.
    pub fn bound(&self, gamma: &RationalMatrix) -> Q {
        let d = self.var_layout.total_dim() as i64;
        trace_re(gamma) * q(self.normalization as i64, d)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PsdEvidence {
    pub matrix: String,
    pub method: PsdMethod,
    pub accepted: bool,
}

/// Self-contained certificate of `p ≤ bound` for one scenario and basis.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProofCertificate {
    pub scenario: SimulationScenario,
    pub basis_a: BasisJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_b: Option<BasisJson>,
    pub digits: u32,
    pub eta: String,
    pub t_sym: String,
    pub gamma_ok: RationalMatrixJson,
    pub r_ok: Vec<RationalMatrixJson>,
    pub bound: String,
    /// Decimal rendering of `bound`, informational only.
    pub bound_decimal: f64,
    pub psd_evidence: Vec<PsdEvidence>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub digits: u32,
    pub eta: EtaOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { digits: 6, eta: EtaOptions::default() }
    }
}

/// Runs the rationalize → symmetrize → normalize → project → η pipeline on a
/// floating dual point and packages the result.
pub fn emit_bound(
    scn: &SimulationScenario,
    a: &ChannelBasis,
    b: Option<&ChannelBasis>,
    gamma: &Operator,
    rs: &[Operator],
    opts: &CertifyOptions,
) -> Result<ProofCertificate> {
    let ctx = ExactScenario::new(scn, a, b)?;
    let g_sym = symmetrize(&rationalize(gamma, opts.digits));
    let r_sym: Vec<RationalMatrix> = rs.iter().map(|r| symmetrize(&rationalize(r, opts.digits))).collect();
    let (r_ok, t_sym) = normalize_dual(&r_sym, &ctx.targets)?;
    let g_proj = project_dual_affine(&g_sym, &ctx.spec)?;
    let slack = ctx.slack(&g_proj, &r_ok)?;
    let search = find_eta(&g_proj, &slack, &opts.eta)?;
    let gamma_ok = plus_identity(&g_proj, &search.eta);
    let slack_ok = plus_identity(&slack, &search.eta);
    let mut psd_evidence = vec![];
    for (name, m) in [("gamma", &gamma_ok), ("slack", &slack_ok)] {
        let accepted = psd_check_exact(m);
        if !accepted {
            return Err(Error::Certification(format!("exact check rejected {name} at the selected η")));
        }
        psd_evidence.push(PsdEvidence { matrix: name.into(), method: PsdMethod::ExactLdl, accepted });
        let float = psd_check_shifted_float(m) == FloatVerdict::Accept;
        psd_evidence.push(PsdEvidence { matrix: name.into(), method: PsdMethod::ShiftedFloat, accepted: float });
    }
    let bound = ctx.bound(&gamma_ok);
    Ok(ProofCertificate {
        scenario: scn.clone(),
        basis_a: BasisJson::from_basis(a),
        basis_b: if scn.identical_channels { None } else { b.map(BasisJson::from_basis) },
        digits: opts.digits,
        eta: q_to_string(&search.eta),
        t_sym: q_to_string(&t_sym),
        gamma_ok: RationalMatrixJson::from_matrix(&gamma_ok),
        r_ok: r_ok.iter().map(RationalMatrixJson::from_matrix).collect(),
        bound_decimal: q_to_f64(&bound),
        bound: q_to_string(&bound),
        psd_evidence,
    })
}

impl ProofCertificate {
    pub fn bound_exact(&self) -> Result<Q> {
        q_parse(&self.bound)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifyReport {
    pub accepted: bool,
    pub bound: String,
    pub failures: Vec<String>,
}

/// Recomputes every condition of the certificate in exact arithmetic.
pub fn verify_certificate(c: &ProofCertificate) -> VerifyReport {
    let mut failures = vec![];
    if let Err(e) = verify_inner(c, &mut failures) {
        failures.push(e.to_string());
    }
    VerifyReport { accepted: failures.is_empty(), bound: c.bound.clone(), failures }
}

fn verify_inner(c: &ProofCertificate, failures: &mut Vec<String>) -> Result<()> {
    let a = c.basis_a.to_basis()?;
    let b = c.basis_b.as_ref().map(|b| b.to_basis()).transpose()?;
    let ctx = ExactScenario::new(&c.scenario, &a, b.as_ref())?;
    let gamma = c.gamma_ok.to_matrix()?;
    if gamma.layout() != &ctx.var_layout {
        failures.push(format!("gamma layout {} differs from {}", gamma.layout(), ctx.var_layout));
        return Ok(());
    }
    let rs: Vec<RationalMatrix> = c.r_ok.iter().map(|r| r.to_matrix()).collect::<Result<_>>()?;
    if rs.len() != ctx.targets.len() {
        failures.push(format!("{} R matrices for {} constraint pairs", rs.len(), ctx.targets.len()));
        return Ok(());
    }
    for (k, r) in rs.iter().enumerate() {
        if r.layout() != &ctx.output_layout {
            failures.push(format!("R[{k}] has layout {}", r.layout()));
            return Ok(());
        }
        if !r.is_exactly_hermitian() {
            failures.push(format!("R[{k}] is not Hermitian"));
        }
    }
    let mut t = GaussQ::zero();
    for (r, tt) in rs.iter().zip(&ctx.targets) {
        t += r.trace_product(tt)?;
    }
    if t != gq_real(Q::one()) {
        failures.push(format!("normalization Σ Tr(R T) = {} + {}i, expected 1", q_to_string(&t.re), q_to_string(&t.im)));
    }
    if !gamma.is_exactly_hermitian() {
        failures.push("gamma is not Hermitian".into());
    }
    if project_dual_affine(&gamma, &ctx.spec)? != gamma {
        failures.push("gamma is not in the dual affine subspace".into());
    }
    if !psd_check_exact(&gamma) {
        failures.push("gamma is not positive semidefinite".into());
    }
    if !psd_check_exact(&ctx.slack(&gamma, &rs)?) {
        failures.push("gamma − Σ R ⊗ Kᵀ is not positive semidefinite".into());
    }
    let bound = ctx.bound(&gamma);
    match q_parse(&c.bound) {
        Ok(claimed) if claimed == bound => {}
        Ok(claimed) => failures.push(format!("claimed bound {} but N·Tr(Γ)/D = {}", q_to_string(&claimed), q_to_string(&bound))),
        Err(e) => failures.push(e.to_string()),
    }
    Ok(())
}

/// Solves the dual SDP and returns the solution with its (Γ, R_ij) point.
pub fn solve_dual_point(
    scn: &SimulationScenario,
    a: &ChannelBasis,
    b: Option<&ChannelBasis>,
    opts: &SolverOptions,
) -> Result<(SdpSolution, Operator, Vec<Operator>)> {
    let problem = build_dual(scn, a, b)?;
    let sol = solve(&problem, opts)?;
    let pairs = constraint_pairs(scn, a, b)?;
    let index = DualIndex::new(scn, pairs.len())?;
    let (gamma, rs) = index.point(&sol.variables)?;
    Ok((sol, gamma, rs))
}

/// Dual solve followed by [`emit_bound`].
pub fn certify_scenario(
    scn: &SimulationScenario,
    a: &ChannelBasis,
    b: Option<&ChannelBasis>,
    solver: &SolverOptions,
    opts: &CertifyOptions,
) -> Result<ProofCertificate> {
    let (sol, gamma, rs) = solve_dual_point(scn, a, b, solver)?;
    if !sol.is_solved() {
        return Err(Error::Certification(format!("dual solve ended with status {:?}", sol.status)));
    }
    emit_bound(scn, a, b, &gamma, &rs, opts)
}
