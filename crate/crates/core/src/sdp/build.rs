//! Assembly of the simulation SDPs.
//!
//! Causal-structure constraints are stated coordinate-wise in the product
//! Gell-Mann basis of the variable's layout, where every trace-and-replace
//! combination is diagonal. Simulation constraints are stated against a
//! Hermitian basis E of the output systems:
//! `Tr(E · (C_s * K)) = Tr(C_s · (E ⊗ Kᵀ))`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::problem::{
    BlockVar, Coef, Equality, Lmi, LmiForm, ProblemKind, ProblemMeta, RealifyMode, SdpProblem, StandardForm, Term,
};
use super::scenario::{embed, CausalClass, Restriction, SimulationScenario};
use crate::basis::{placed, ChannelBasis};
use crate::comb::TraceReplaceMap;
use crate::error::{Error, Result};
use crate::gellmann::StringBasis;
use crate::tensor::{Field, LabeledMatrix, Operator, SpaceLayout};

/// One simulation constraint: the inserted channels and the target.
#[derive(Clone, Debug)]
pub struct ConstraintPair {
    pub i: usize,
    /// `None` for identical-channel scenarios.
    pub j: Option<usize>,
    /// `J_i^{⊗k_A} ⊗ J_j^{⊗k_B}` on the slot labels.
    pub inserted: Operator,
    /// `S_eff * (J_i ⊗ J_j)` on the scenario's output layout.
    pub target: Operator,
}

pub(crate) fn check_bases(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<()> {
    scn.validate()?;
    if scn.identical_channels {
        if a.copies != scn.k_a() {
            return Err(Error::BasisMismatch(format!("basis A has {} copies, scenario needs {}", a.copies, scn.k_a())));
        }
    } else {
        let b = b.ok_or_else(|| Error::BasisMismatch("scenario needs a basis for B".into()))?;
        if a.copies != scn.k_a() || b.copies != scn.k_b() {
            return Err(Error::BasisMismatch(format!(
                "bases have {}/{} copies, scenario needs {}/{}",
                a.copies,
                b.copies,
                scn.k_a(),
                scn.k_b()
            )));
        }
    }
    let d = scn.target_dim;
    let all = a.elements.iter().chain(b.iter().flat_map(|b| b.elements.iter()));
    for e in all {
        if e.layout().dims() != [d, d] {
            return Err(Error::BasisMismatch("basis elements must act on the target dimension".into()));
        }
    }
    Ok(())
}

/// `J` placed on every (input, output) pair of `calls`, tensored together.
pub fn power_on<T: Field>(j: &LabeledMatrix<T>, calls: &[(String, String)]) -> Result<LabeledMatrix<T>> {
    let mut out = LabeledMatrix::identity(SpaceLayout::empty());
    for (i, o) in calls {
        out = out.kron(&j.relabel(&[("in", i), ("out", o)])?)?;
    }
    Ok(out)
}

/// Target `S_eff * (J_a ⊗ J_b)` embedded in the output layout.
pub fn target_for<T: Field>(
    scn: &SimulationScenario,
    s_eff: &LabeledMatrix<T>,
    ja: &LabeledMatrix<T>,
    jb: &LabeledMatrix<T>,
) -> Result<LabeledMatrix<T>> {
    let g = ja.relabel(&[("in", "AI"), ("out", "AO")])?.kron(&jb.relabel(&[("in", "BI"), ("out", "BO")])?)?;
    embed(&s_eff.link(&g)?, &scn.output_layout())
}

/// All simulation constraints, in basis order (i outer, j inner).
pub fn constraint_pairs(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<Vec<ConstraintPair>> {
    check_bases(scn, a, b)?;
    let s_eff = scn.effective_switch()?;
    let calls_a = scn.calls('A');
    let calls_b = scn.calls('B');
    let mut out = vec![];
    if scn.identical_channels {
        for (i, ja) in a.elements.iter().enumerate() {
            out.push(ConstraintPair {
                i,
                j: None,
                inserted: power_on(ja, &calls_a)?,
                target: target_for(scn, &s_eff, ja, ja)?,
            });
        }
    } else {
        let b = b.expect("checked");
        let pa: Vec<Operator> = a.elements.iter().map(|j| power_on(j, &calls_a)).collect::<Result<_>>()?;
        let pb: Vec<Operator> = b.elements.iter().map(|j| power_on(j, &calls_b)).collect::<Result<_>>()?;
        for (i, ja) in a.elements.iter().enumerate() {
            for (j, jb) in b.elements.iter().enumerate() {
                out.push(ConstraintPair {
                    i,
                    j: Some(j),
                    inserted: pa[i].kron(&pb[j])?,
                    target: target_for(scn, &s_eff, ja, jb)?,
                });
            }
        }
    }
    Ok(out)
}

/// Dense Hermitian Gell-Mann strings spanning Herm(layout).
pub fn hermitian_basis(layout: &SpaceLayout) -> Vec<Operator> {
    let sb = StringBasis::new(layout);
    let n = layout.total_dim();
    (0..sb.len())
        .map(|s| {
            let idx = sb.decode(s);
            let mut m = DMatrix::zeros(n, n);
            for (r, c, v) in sb.entries_f64(&idx) {
                m[(r, c)] += v;
            }
            Operator::new(layout.clone(), m).expect("string size")
        })
        .collect()
}

/// `E ⊗ Kᵀ` on `var_layout`.
pub(crate) fn link_coef(e: &Operator, inserted: &Operator, var_layout: &SpaceLayout) -> Result<Coef> {
    Ok(Coef::Dense(e.kron(&inserted.transpose())?.aligned_to(var_layout)?.into_data()))
}

/// Eigenvalue of a trace-and-replace combination on each string, with the
/// label masks resolved once.
struct StringEigen {
    terms: Vec<(i64, Vec<bool>)>,
}

impl StringEigen {
    fn new(map: &TraceReplaceMap, layout: &SpaceLayout) -> Result<Self> {
        let terms = map
            .terms()
            .iter()
            .map(|(c, labels)| {
                let l: Vec<&String> = labels.iter().collect();
                Ok((*c, layout.mask(&l)?))
            })
            .collect::<Result<_>>()?;
        Ok(StringEigen { terms })
    }

    fn at(&self, idx: &[usize]) -> i64 {
        self.terms.iter().filter(|(_, m)| StringBasis::trivial_on(idx, m)).map(|(c, _)| c).sum()
    }
}

fn string_coef(sb: &StringBasis, idx: &[usize]) -> Coef {
    Coef::Sparse(sb.entries_f64(idx))
}

/// Strings on which `map` is nonzero.
fn support_strings(map: &TraceReplaceMap, layout: &SpaceLayout) -> Result<Vec<Vec<usize>>> {
    let sb = StringBasis::new(layout);
    let ev = StringEigen::new(map, layout)?;
    Ok((0..sb.len()).map(|s| sb.decode(s)).filter(|idx| ev.at(idx) != 0).collect())
}

fn meta(kind: ProblemKind, scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> ProblemMeta {
    ProblemMeta {
        kind,
        scenario: Some(scn.clone()),
        basis_a: Some(a.id()),
        basis_b: if scn.identical_channels { None } else { b.map(|b| b.id()) },
    }
}

/// Comb conditions `(id − 𝐏)(C_s + C_f) = 0` and `Tr(C_s + C_f) = N` on blocks 0 and 1.
fn comb_rows(scn: &SimulationScenario, var_layout: &SpaceLayout) -> Result<Vec<Equality>> {
    let spec = scn.comb_spec();
    let kernel = TraceReplaceMap::identity().minus(&spec.projector_map()?);
    let sb = StringBasis::new(var_layout);
    let mut rows = vec![];
    for idx in support_strings(&kernel, var_layout)? {
        let c = string_coef(&sb, &idx);
        rows.push(Equality { terms: vec![Term { block: 0, coef: c.clone() }, Term { block: 1, coef: c }], rhs: 0.0 });
    }
    let n = var_layout.total_dim();
    rows.push(Equality {
        terms: vec![Term { block: 0, coef: Coef::identity(n) }, Term { block: 1, coef: Coef::identity(n) }],
        rhs: spec.normalization() as f64,
    });
    Ok(rows)
}

/// Simulation rows `Σ_b ⟨E ⊗ Kᵀ, X_b⟩ − p·Tr(E T) = 0` for the success blocks.
fn simulation_rows(
    pairs: &[ConstraintPair],
    out_basis: &[Operator],
    var_layout: &SpaceLayout,
    success_blocks: &[usize],
    p_block: usize,
) -> Result<Vec<Equality>> {
    let mut rows = vec![];
    for pair in pairs {
        for e in out_basis {
            let coef = link_coef(e, &pair.inserted, var_layout)?;
            let t = e.trace_product(&pair.target)?.re;
            let mut terms: Vec<Term> = success_blocks.iter().map(|&b| Term { block: b, coef: coef.clone() }).collect();
            if t != 0.0 {
                terms.push(Term { block: p_block, coef: Coef::scalar(-t) });
            }
            rows.push(Equality { terms, rhs: 0.0 });
        }
    }
    Ok(rows)
}

fn maximize_p(p_block: usize) -> Vec<Term> {
    vec![Term { block: p_block, coef: Coef::scalar(1.0) }]
}

/// Maximum success probability of a heralded simulation.
///
/// Comb class: blocks `C_s, C_f, p`. QC-CC class: blocks `Ws_σ, Wf_σ` for
/// every order σ, then `p`.
pub fn build_primal(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<SdpProblem> {
    if scn.epsilon > 0.0 {
        return build_epsilon_primal(scn, a, b);
    }
    match scn.causal_class {
        CausalClass::Comb => build_comb_primal(scn, a, b),
        CausalClass::Qccc => build_qccc_primal(scn, a, b),
    }
}

fn build_comb_primal(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<SdpProblem> {
    let pairs = constraint_pairs(scn, a, b)?;
    let var_layout = scn.variable_layout()?;
    let out_basis = hermitian_basis(&scn.output_layout());
    let blocks = vec![
        BlockVar::new("C_s", var_layout.clone()),
        BlockVar::new("C_f", var_layout.clone()),
        BlockVar::scalar("p"),
    ];
    let mut equalities = comb_rows(scn, &var_layout)?;
    equalities.extend(simulation_rows(&pairs, &out_basis, &var_layout, &[0], 2)?);
    let form = StandardForm { blocks, equalities, objective: maximize_p(2), maximize: true };
    Ok(SdpProblem::standard(meta(ProblemKind::Primal, scn, a, b), form, RealifyMode::DropImaginary))
}

fn build_qccc_primal(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<SdpProblem> {
    let pairs = constraint_pairs(scn, a, b)?;
    let var_layout = scn.variable_layout()?;
    let out_basis = hermitian_basis(&scn.output_layout());
    let cons = scn.qccc_spec().constraints()?;
    let nc = cons.orders.len();
    let mut blocks = vec![];
    for c in 0..nc {
        blocks.push(BlockVar::new(&format!("Ws_{}", cons.component_name(c)), var_layout.clone()));
        blocks.push(BlockVar::new(&format!("Wf_{}", cons.component_name(c)), var_layout.clone()));
    }
    let p_block = blocks.len();
    blocks.push(BlockVar::scalar("p"));
    let sb = StringBasis::new(&var_layout);
    let mut equalities = vec![];
    for eq in &cons.equalities {
        let evs: Vec<(usize, StringEigen)> =
            eq.terms.iter().map(|(c, m)| Ok((*c, StringEigen::new(m, &var_layout)?))).collect::<Result<_>>()?;
        for s in 0..sb.len() {
            let idx = sb.decode(s);
            let mut terms = vec![];
            for (c, ev) in &evs {
                let v = ev.at(&idx);
                if v != 0 {
                    let entries: Vec<_> =
                        sb.entries_f64(&idx).into_iter().map(|(r, cc, z)| (r, cc, z * v as f64)).collect();
                    terms.push(Term { block: 2 * c, coef: Coef::Sparse(entries.clone()) });
                    terms.push(Term { block: 2 * c + 1, coef: Coef::Sparse(entries) });
                }
            }
            if !terms.is_empty() {
                equalities.push(Equality { terms, rhs: 0.0 });
            }
        }
    }
    let n = var_layout.total_dim();
    equalities.push(Equality {
        terms: (0..2 * nc).map(|bk| Term { block: bk, coef: Coef::identity(n) }).collect(),
        rhs: cons.trace as f64,
    });
    let success: Vec<usize> = (0..nc).map(|c| 2 * c).collect();
    equalities.extend(simulation_rows(&pairs, &out_basis, &var_layout, &success, p_block)?);
    let form = StandardForm { blocks, equalities, objective: maximize_p(p_block), maximize: true };
    Ok(SdpProblem::standard(meta(ProblemKind::QcccPrimal, scn, a, b), form, RealifyMode::DropImaginary))
}

/// Variable bookkeeping of the dual: Γ strings first, then R coordinates.
#[derive(Clone, Debug)]
pub struct DualIndex {
    pub var_layout: SpaceLayout,
    pub output_layout: SpaceLayout,
    /// Strings spanning the image of 𝐏̄.
    pub gamma_strings: Vec<Vec<usize>>,
    pub n_pairs: usize,
    pub out_basis_len: usize,
}

impl DualIndex {
    pub fn new(scn: &SimulationScenario, n_pairs: usize) -> Result<Self> {
        let var_layout = scn.variable_layout()?;
        let output_layout = scn.output_layout();
        let pbar = scn.comb_spec().dual_affine_map()?;
        let gamma_strings = support_strings(&pbar, &var_layout)?;
        let out_basis_len = output_layout.total_dim().pow(2);
        Ok(DualIndex { var_layout, output_layout, gamma_strings, n_pairs, out_basis_len })
    }

    pub fn n_vars(&self) -> usize {
        self.gamma_strings.len() + self.n_pairs * self.out_basis_len
    }

    pub fn r_var(&self, pair: usize, e: usize) -> usize {
        self.gamma_strings.len() + pair * self.out_basis_len + e
    }

    /// Γ and the `R_ij` from a variable vector.
    pub fn point(&self, v: &[f64]) -> Result<(Operator, Vec<Operator>)> {
        let sb = StringBasis::new(&self.var_layout);
        let n = self.var_layout.total_dim();
        let mut g = DMatrix::<Complex64>::zeros(n, n);
        for (k, idx) in self.gamma_strings.iter().enumerate() {
            for (r, c, z) in sb.entries_f64(idx) {
                g[(r, c)] += z * v[k];
            }
        }
        let gamma = Operator::new(self.var_layout.clone(), g)?;
        let basis = hermitian_basis(&self.output_layout);
        let mut rs = vec![];
        for p in 0..self.n_pairs {
            let mut r = Operator::zeros(self.output_layout.clone());
            for (e, el) in basis.iter().enumerate() {
                r = r.add(&el.scale_re(v[self.r_var(p, e)]))?;
            }
            rs.push(r);
        }
        Ok((gamma, rs))
    }
}

/// Upper bound `min (N/D) Tr Γ` over `Γ ⪰ 0`, `𝐏̄(Γ) = Γ`,
/// `Γ − Σ R_ij ⊗ K_ijᵀ ⪰ 0` and `Σ Tr(R_ij T_ij) ≥ 1` (tight at the optimum).
///
/// Variables follow [`DualIndex`]; the LMIs are named `gamma`, `slack` and
/// `normalization`.
pub fn build_dual(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<SdpProblem> {
    if scn.causal_class != CausalClass::Comb {
        return Err(Error::Invalid("the dual is built for combs only".into()));
    }
    let pairs = constraint_pairs(scn, a, b)?;
    let ix = DualIndex::new(scn, pairs.len())?;
    let sb = StringBasis::new(&ix.var_layout);
    let out_basis = hermitian_basis(&ix.output_layout);
    let mut gamma_terms = vec![];
    for (k, idx) in ix.gamma_strings.iter().enumerate() {
        gamma_terms.push((k, string_coef(&sb, idx)));
    }
    let mut slack_terms = gamma_terms.clone();
    let mut norm_terms = vec![];
    for (p, pair) in pairs.iter().enumerate() {
        for (e, el) in out_basis.iter().enumerate() {
            let var = ix.r_var(p, e);
            let coef = match link_coef(el, &pair.inserted, &ix.var_layout)? {
                Coef::Dense(m) => Coef::Dense(-m),
                c => c,
            };
            slack_terms.push((var, coef));
            let t = el.trace_product(&pair.target)?.re;
            if t != 0.0 {
                norm_terms.push((var, Coef::scalar(t)));
            }
        }
    }
    let lmis = vec![
        Lmi { name: "gamma".into(), layout: ix.var_layout.clone(), doubled: false, constant: None, terms: gamma_terms },
        Lmi { name: "slack".into(), layout: ix.var_layout.clone(), doubled: false, constant: None, terms: slack_terms },
        Lmi {
            name: "normalization".into(),
            layout: SpaceLayout::empty(),
            doubled: false,
            constant: Some(Coef::scalar(-1.0)),
            terms: norm_terms,
        },
    ];
    let mut objective = vec![0.0; ix.n_vars()];
    // only the identity string has a trace: (N/D)·Tr(v₀𝟙) = N·v₀
    let id_pos = ix.gamma_strings.iter().position(|s| s.iter().all(|&i| i == 0)).expect("identity in image");
    objective[id_pos] = scn.normalization() as f64;
    let mut var_names: Vec<String> = ix.gamma_strings.iter().map(|s| format!("gamma{s:?}")).collect();
    for p in 0..pairs.len() {
        for e in 0..ix.out_basis_len {
            var_names.push(format!("R[{p}][{e}]"));
        }
    }
    let form = LmiForm { var_names, lmis, objective, maximize: false };
    Ok(SdpProblem::lmi(meta(ProblemKind::Dual, scn, a, b), form, RealifyMode::Double))
}

/// `L_V`: projector onto the span of valid bipartite processes on
/// (AI, AO, BI, BO).
fn process_projector() -> TraceReplaceMap {
    let t = |c: i64, l: &[&str]| TraceReplaceMap::term(c, l);
    t(1, &["AO"])
        .plus(&t(1, &["BO"]))
        .plus(&t(-1, &["AO", "BO"]))
        .plus(&t(-1, &["BI", "BO"]))
        .plus(&t(1, &["AO", "BI", "BO"]))
        .plus(&t(-1, &["AI", "AO"]))
        .plus(&t(1, &["AI", "AO", "BO"]))
}

/// Approximate simulation of the partly restricted switch.
///
/// `S̃_{+0}` enters through `T := p·S̃_{+0}` (real PSD, `Tr T = p d²`, valid
/// process after `Tr_F`); the fidelity condition
/// `Tr(S_{+0} S̃_{+0}) / (d² · d²) ≥ 1 − ε` becomes
/// `Tr(S_{+0} T) − (1−ε) d⁴ p − s = 0` with slack `s ≥ 0`, and the simulation
/// rows read `C_s * K_ij = T * (J_i ⊗ J_j)`. Blocks: `C_s, C_f, T, p, s`.
pub fn build_epsilon_primal(scn: &SimulationScenario, a: &ChannelBasis, b: Option<&ChannelBasis>) -> Result<SdpProblem> {
    if scn.restriction != Restriction::PartlyRestricted || scn.causal_class != CausalClass::Comb {
        return Err(Error::Invalid("the epsilon problem is defined for partly restricted combs".into()));
    }
    if !(0.0..=1.0).contains(&scn.epsilon) {
        return Err(Error::Invalid(format!("epsilon {} outside [0, 1]", scn.epsilon)));
    }
    let pairs = constraint_pairs(scn, a, b)?;
    let d = scn.target_dim as f64;
    let var_layout = scn.variable_layout()?;
    let s_fixed = scn.effective_switch()?;
    let t_layout = s_fixed.layout().clone();
    let blocks = vec![
        BlockVar::new("C_s", var_layout.clone()),
        BlockVar::new("C_f", var_layout.clone()),
        BlockVar::new("T", t_layout.clone()),
        BlockVar::scalar("p"),
        BlockVar::scalar("s"),
    ];
    let (bt, bp, bs) = (2, 3, 4);
    let mut equalities = comb_rows(scn, &var_layout)?;
    let nt = t_layout.total_dim();
    equalities.push(Equality {
        terms: vec![Term { block: bt, coef: Coef::identity(nt) }, Term { block: bp, coef: Coef::scalar(-d * d) }],
        rhs: 0.0,
    });
    let f = ["tO", "cO"];
    let validity = TraceReplaceMap::term(1, &f).minus(&{
        let lv = process_projector();
        let mut m = TraceReplaceMap::zero();
        for (c, x) in lv.terms() {
            let mut l: Vec<String> = x.iter().cloned().collect();
            l.extend(f.iter().map(|s| s.to_string()));
            m = m.plus(&TraceReplaceMap::term(*c, &l));
        }
        m
    });
    let sb = StringBasis::new(&t_layout);
    for idx in support_strings(&validity, &t_layout)? {
        equalities.push(Equality { terms: vec![Term { block: bt, coef: string_coef(&sb, &idx) }], rhs: 0.0 });
    }
    equalities.push(Equality {
        terms: vec![
            Term { block: bt, coef: Coef::Dense(s_fixed.data().clone()) },
            Term { block: bp, coef: Coef::scalar(-(1.0 - scn.epsilon) * d.powi(4)) },
            Term { block: bs, coef: Coef::scalar(-1.0) },
        ],
        rhs: 0.0,
    });
    // C_s * K_ij − T * (J_i ⊗ J_j) = 0 against a Hermitian basis of (tO, cO)
    let out_small = SpaceLayout::new(&[("tO", scn.target_dim), ("cO", 2)])?;
    let out_layout = scn.output_layout();
    for pair in &pairs {
        let ja = &a.elements[pair.i];
        let jb = match pair.j {
            Some(j) => &b.expect("checked").elements[j],
            None => ja,
        };
        let g = placed(ja, "AI", "AO").kron(&placed(jb, "BI", "BO"))?;
        for e in hermitian_basis(&out_small) {
            let c_coef = link_coef(&embed(&e, &out_layout)?, &pair.inserted, &var_layout)?;
            let t_coef = match link_coef(&e, &g, &t_layout)? {
                Coef::Dense(m) => Coef::Dense(-m),
                c => c,
            };
            equalities.push(Equality { terms: vec![Term { block: 0, coef: c_coef }, Term { block: bt, coef: t_coef }], rhs: 0.0 });
        }
    }
    let form = StandardForm { blocks, equalities, objective: maximize_p(bp), maximize: true };
    Ok(SdpProblem::standard(meta(ProblemKind::Epsilon, scn, a, b), form, RealifyMode::DropImaginary))
}
