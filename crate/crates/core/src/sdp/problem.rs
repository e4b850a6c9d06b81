//! Solver-agnostic semidefinite programs over Hermitian blocks.
//!
//! Two shapes are supported. [`StandardForm`] has PSD matrix variables tied
//! together by affine equalities; [`LmiForm`] has free scalar variables
//! entering linear matrix inequalities. Both are lowered to the real conic
//! program of [`super::solver`], after [`realify`] removes complex entries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scenario::SimulationScenario;
use super::solver::{ConicProblem, ConicSolution, SolveStatus, SolverOptions, SymMat};
use crate::error::{Error, Result};
use crate::tensor::{Operator, SpaceLayout};

/// Hermitian coefficient matrix.
#[derive(Clone, Debug)]
pub enum Coef {
    /// Entries of both triangles.
    Sparse(Vec<(usize, usize, Complex64)>),
    Dense(DMatrix<Complex64>),
}

impl Coef {
    pub fn identity(n: usize) -> Coef {
        Coef::Sparse((0..n).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect())
    }

    pub fn scalar(v: f64) -> Coef {
        Coef::Sparse(vec![(0, 0, Complex64::new(v, 0.0))])
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<Complex64> {
        match self {
            Coef::Dense(m) => m.clone(),
            Coef::Sparse(e) => {
                let mut m = DMatrix::zeros(n, n);
                for &(r, c, v) in e {
                    m[(r, c)] += v;
                }
                m
            }
        }
    }

    /// `Re Tr(A X)`.
    pub fn trace_with(&self, x: &DMatrix<Complex64>) -> f64 {
        match self {
            Coef::Sparse(e) => e.iter().map(|&(r, c, v)| (v * x[(c, r)]).re).sum(),
            Coef::Dense(a) => {
                let n = a.nrows();
                let mut s = 0.0;
                for r in 0..n {
                    for c in 0..n {
                        s += (a[(r, c)] * x[(c, r)]).re;
                    }
                }
                s
            }
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Coef::Sparse(e) => e.iter().all(|t| t.2.im == 0.0),
            Coef::Dense(m) => m.iter().all(|z| z.im == 0.0),
        }
    }

    fn real_part(&self) -> Coef {
        match self {
            Coef::Sparse(e) => Coef::Sparse(
                e.iter().filter(|t| t.2.re != 0.0).map(|&(r, c, v)| (r, c, Complex64::new(v.re, 0.0))).collect(),
            ),
            Coef::Dense(m) => Coef::Dense(m.map(|z| Complex64::new(z.re, 0.0))),
        }
    }

    /// `s·[[Re A, −Im A], [Im A, Re A]]` on dimension 2n.
    fn doubled(&self, n: usize, s: f64) -> Coef {
        match self {
            Coef::Sparse(e) => {
                let mut out = Vec::with_capacity(4 * e.len());
                for &(r, c, v) in e {
                    if v.re != 0.0 {
                        out.push((r, c, Complex64::new(s * v.re, 0.0)));
                        out.push((r + n, c + n, Complex64::new(s * v.re, 0.0)));
                    }
                    if v.im != 0.0 {
                        out.push((r, c + n, Complex64::new(-s * v.im, 0.0)));
                        out.push((r + n, c, Complex64::new(s * v.im, 0.0)));
                    }
                }
                Coef::Sparse(out)
            }
            Coef::Dense(m) => Coef::Dense(DMatrix::from_fn(2 * n, 2 * n, |r, c| {
                let z = m[(r % n, c % n)];
                let v = match (r < n, c < n) {
                    (true, true) | (false, false) => z.re,
                    (true, false) => -z.im,
                    (false, true) => z.im,
                };
                Complex64::new(s * v, 0.0)
            })),
        }
    }

    fn to_sym(&self, n: usize) -> SymMat {
        match self {
            Coef::Sparse(e) => SymMat::from_upper(e.iter().filter(|t| t.0 <= t.1).map(|&(r, c, v)| (r, c, v.re)).collect()),
            Coef::Dense(m) => SymMat::Dense(faer::Mat::from_fn(n, n, |r, c| m[(r, c)].re)),
        }
    }
}

/// Hermitian PSD matrix variable.
#[derive(Clone, Debug)]
pub struct BlockVar {
    pub name: String,
    pub layout: SpaceLayout,
    /// Stored as the real `2n × 2n` embedding of an n-dimensional complex block.
    pub doubled: bool,
}

impl BlockVar {
    pub fn new(name: &str, layout: SpaceLayout) -> Self {
        BlockVar { name: name.to_string(), layout, doubled: false }
    }

    pub fn scalar(name: &str) -> Self {
        BlockVar::new(name, SpaceLayout::empty())
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim() * if self.doubled { 2 } else { 1 }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub block: usize,
    pub coef: Coef,
}

#[derive(Clone, Debug)]
pub struct Equality {
    pub terms: Vec<Term>,
    pub rhs: f64,
}

/// Optimize `Σ ⟨c_b, X_b⟩` over PSD `X_b` subject to affine equalities.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub blocks: Vec<BlockVar>,
    pub equalities: Vec<Equality>,
    pub objective: Vec<Term>,
    pub maximize: bool,
}

/// `F₀ + Σ_k v_k F_k ⪰ 0`.
#[derive(Clone, Debug)]
pub struct Lmi {
    pub name: String,
    pub layout: SpaceLayout,
    pub doubled: bool,
    pub constant: Option<Coef>,
    pub terms: Vec<(usize, Coef)>,
}

impl Lmi {
    pub fn dim(&self) -> usize {
        self.layout.total_dim() * if self.doubled { 2 } else { 1 }
    }
}

/// Optimize `f·v` over free scalars v subject to LMIs.
#[derive(Clone, Debug)]
pub struct LmiForm {
    pub var_names: Vec<String>,
    pub lmis: Vec<Lmi>,
    pub objective: Vec<f64>,
    pub maximize: bool,
}

#[derive(Clone, Debug)]
pub enum SdpBody {
    Standard(StandardForm),
    Lmi(LmiForm),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Primal,
    Dual,
    Epsilon,
    QcccPrimal,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealifyMode {
    /// Keep real parts of every coefficient; valid when an optimal point can
    /// be taken real.
    DropImaginary,
    /// Replace each n-dimensional Hermitian block by its real 2n embedding.
    Double,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub kind: ProblemKind,
    pub scenario: Option<SimulationScenario>,
    pub basis_a: Option<String>,
    pub basis_b: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub meta: ProblemMeta,
    /// False once every coefficient is real.
    pub complex: bool,
    /// Lowering used by [`solve`] while `complex` is set.
    pub preferred_realify: RealifyMode,
    pub body: SdpBody,
}

impl SdpProblem {
    pub fn standard(meta: ProblemMeta, form: StandardForm, preferred_realify: RealifyMode) -> Self {
        SdpProblem { meta, complex: true, preferred_realify, body: SdpBody::Standard(form) }
    }

    pub fn lmi(meta: ProblemMeta, form: LmiForm, preferred_realify: RealifyMode) -> Self {
        SdpProblem { meta, complex: true, preferred_realify, body: SdpBody::Lmi(form) }
    }

    pub fn num_constraints(&self) -> usize {
        match &self.body {
            SdpBody::Standard(f) => f.equalities.len(),
            SdpBody::Lmi(f) => f.var_names.len(),
        }
    }

    /// Block names and dimensions.
    pub fn block_summary(&self) -> Vec<(String, usize)> {
        match &self.body {
            SdpBody::Standard(f) => f.blocks.iter().map(|b| (b.name.clone(), b.dim())).collect(),
            SdpBody::Lmi(f) => f.lmis.iter().map(|l| (l.name.clone(), l.dim())).collect(),
        }
    }

    /// Largest `|Σ ⟨A, X⟩ − b|` at a candidate point of a standard-form problem.
    pub fn max_violation(&self, point: &[Operator]) -> Result<f64> {
        let SdpBody::Standard(f) = &self.body else {
            return Err(Error::Invalid("equality residuals need a standard-form problem".into()));
        };
        if point.len() != f.blocks.len() {
            return Err(Error::DimensionMismatch("one operator per block expected".into()));
        }
        let mut worst: f64 = 0.0;
        for eq in &f.equalities {
            let v: f64 = eq.terms.iter().map(|t| t.coef.trace_with(point[t.block].data())).sum();
            worst = worst.max((v - eq.rhs).abs());
        }
        Ok(worst)
    }

    /// Objective of a standard-form problem at a candidate point.
    pub fn objective_at(&self, point: &[Operator]) -> Result<f64> {
        let SdpBody::Standard(f) = &self.body else {
            return Err(Error::Invalid("objective_at needs a standard-form problem".into()));
        };
        Ok(f.objective.iter().map(|t| t.coef.trace_with(point[t.block].data())).sum())
    }
}

/// Real-symmetric version of `p`. Standard-form blocks are doubled with the
/// coefficients halved so that `⟨Â/2, X̂⟩ = Tr(AX)`; LMIs are doubled as is.
pub fn realify(p: &SdpProblem, mode: RealifyMode) -> SdpProblem {
    if !p.complex {
        return p.clone();
    }
    let body = match &p.body {
        SdpBody::Standard(f) => {
            let conv = |terms: &[Term]| -> Vec<Term> {
                terms
                    .iter()
                    .map(|t| {
                        let n = f.blocks[t.block].layout.total_dim();
                        let coef = match mode {
                            RealifyMode::Double if n > 1 => t.coef.doubled(n, 0.5),
                            _ => t.coef.real_part(),
                        };
                        Term { block: t.block, coef }
                    })
                    .collect()
            };
            SdpBody::Standard(StandardForm {
                blocks: f
                    .blocks
                    .iter()
                    .map(|b| BlockVar { doubled: mode == RealifyMode::Double && b.layout.total_dim() > 1, ..b.clone() })
                    .collect(),
                equalities: f.equalities.iter().map(|e| Equality { terms: conv(&e.terms), rhs: e.rhs }).collect(),
                objective: conv(&f.objective),
                maximize: f.maximize,
            })
        }
        SdpBody::Lmi(f) => SdpBody::Lmi(LmiForm {
            var_names: f.var_names.clone(),
            lmis: f
                .lmis
                .iter()
                .map(|l| {
                    let n = l.layout.total_dim();
                    let conv = |c: &Coef| match mode {
                        RealifyMode::DropImaginary => c.real_part(),
                        RealifyMode::Double => c.doubled(n, 1.0),
                    };
                    let all_real = l.constant.iter().all(|c| c.is_real()) && l.terms.iter().all(|t| t.1.is_real());
                    if all_real && mode == RealifyMode::Double {
                        return l.clone();
                    }
                    Lmi {
                        name: l.name.clone(),
                        layout: l.layout.clone(),
                        doubled: mode == RealifyMode::Double,
                        constant: l.constant.as_ref().map(conv),
                        terms: l.terms.iter().map(|(k, c)| (*k, conv(c))).collect(),
                    }
                })
                .collect(),
            objective: f.objective.clone(),
            maximize: f.maximize,
        }),
    };
    SdpProblem { meta: p.meta.clone(), complex: false, preferred_realify: p.preferred_realify, body }
}

/// Floating-point solution of an [`SdpProblem`].
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Objective of the problem as posed (maximized or minimized).
    pub objective: f64,
    /// Objective of the conic dual, a bound on `objective` up to solver tolerance.
    pub bound: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    /// PSD blocks for standard-form problems, LMI values for LMI problems.
    pub blocks: Vec<(String, Operator)>,
    /// Equality multipliers (standard form) or variable values (LMI form).
    pub variables: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Residuals {
    pub max_equality_violation: f64,
    pub min_eigenvalues: Vec<(String, f64)>,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

impl SdpSolution {
    pub fn block(&self, name: &str) -> Option<&Operator> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    pub fn is_solved(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }
}

fn lower(p: &SdpProblem) -> ConicProblem {
    match &p.body {
        SdpBody::Standard(f) => {
            let block_dims: Vec<usize> = f.blocks.iter().map(|b| b.dim()).collect();
            let sign = if f.maximize { -1.0 } else { 1.0 };
            let mut c: Vec<Option<DMatrix<Complex64>>> = vec![None; f.blocks.len()];
            for t in &f.objective {
                let n = block_dims[t.block];
                let m = c[t.block].get_or_insert_with(|| DMatrix::zeros(n, n));
                *m += t.coef.to_dense(n) * Complex64::new(sign, 0.0);
            }
            let c = c
                .into_iter()
                .enumerate()
                .map(|(k, m)| m.map(|m| Coef::Dense(m).to_sym(block_dims[k])))
                .collect();
            let rows = f
                .equalities
                .iter()
                .map(|e| e.terms.iter().map(|t| (t.block, t.coef.to_sym(block_dims[t.block]))).collect())
                .collect();
            let b = f.equalities.iter().map(|e| e.rhs).collect();
            ConicProblem { block_dims, c, rows, b }
        }
        SdpBody::Lmi(f) => {
            // LMIs are the dual side: C − Σ y_k A_k ⪰ 0 with C = F₀, A_k = −F_k.
            let block_dims: Vec<usize> = f.lmis.iter().map(|l| l.dim()).collect();
            let c = f.lmis.iter().map(|l| l.constant.as_ref().map(|k| k.to_sym(l.dim()))).collect();
            let mut rows: Vec<Vec<(usize, SymMat)>> = vec![vec![]; f.var_names.len()];
            for (bk, l) in f.lmis.iter().enumerate() {
                for (k, coef) in &l.terms {
                    let neg = match coef {
                        Coef::Sparse(e) => Coef::Sparse(e.iter().map(|&(r, c, v)| (r, c, -v)).collect()),
                        Coef::Dense(m) => Coef::Dense(-m),
                    };
                    rows[*k].push((bk, neg.to_sym(l.dim())));
                }
            }
            let sign = if f.maximize { 1.0 } else { -1.0 };
            let b = f.objective.iter().map(|v| sign * v).collect();
            ConicProblem { block_dims, c, rows, b }
        }
    }
}

fn to_complex(x: &faer::Mat<f64>, layout: &SpaceLayout, doubled: bool) -> Result<Operator> {
    let n = layout.total_dim();
    let data = if doubled {
        DMatrix::from_fn(n, n, |r, c| {
            Complex64::new(0.5 * (x[(r, c)] + x[(r + n, c + n)]), 0.5 * (x[(r + n, c)] - x[(r, c + n)]))
        })
    } else {
        DMatrix::from_fn(n, n, |r, c| Complex64::new(x[(r, c)], 0.0))
    };
    Operator::new(layout.clone(), data)
}

/// Realifies (if needed), solves with the native backend and maps the result
/// back onto the problem's variables.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    let real;
    let p = if p.complex {
        real = realify(p, p.preferred_realify);
        &real
    } else {
        p
    };
    let conic = lower(p);
    let sol: ConicSolution = conic.solve(opts);
    drop(conic);
    let residuals_base = |max_eq: f64, mins: Vec<(String, f64)>| Residuals {
        max_equality_violation: max_eq,
        min_eigenvalues: mins,
        relative_gap: sol.relative_gap,
        primal_infeasibility: sol.primal_infeasibility,
        dual_infeasibility: sol.dual_infeasibility,
    };
    match &p.body {
        SdpBody::Standard(f) => {
            let blocks: Vec<(String, Operator)> = f
                .blocks
                .iter()
                .zip(&sol.x)
                .map(|(b, x)| Ok((b.name.clone(), to_complex(x, &b.layout, b.doubled)?)))
                .collect::<Result<_>>()?;
            let point: Vec<Operator> = blocks.iter().map(|(_, o)| o.clone()).collect();
            // evaluate on the realified problem: doubled blocks use the embedding
            let mut max_eq: f64 = 0.0;
            for e in &f.equalities {
                let v: f64 = e.terms.iter().map(|t| dot_real(&t.coef, &sol.x[t.block])).sum();
                max_eq = max_eq.max((v - e.rhs).abs());
            }
            let objective: f64 = f.objective.iter().map(|t| dot_real(&t.coef, &sol.x[t.block])).sum();
            let mins = blocks.iter().map(|(n, o)| (n.clone(), o.min_eigenvalue())).collect();
            let sign = if f.maximize { -1.0 } else { 1.0 };
            let _ = point;
            Ok(SdpSolution {
                status: sol.status,
                objective,
                bound: sign * sol.dual_objective,
                residuals: residuals_base(max_eq, mins),
                iterations: sol.iterations,
                blocks,
                variables: sol.y,
            })
        }
        SdpBody::Lmi(f) => {
            let v = sol.y.clone();
            let mut blocks = vec![];
            let mut mins = vec![];
            for l in &f.lmis {
                let n = l.dim();
                let mut m = l.constant.as_ref().map(|c| c.to_dense(n)).unwrap_or_else(|| DMatrix::zeros(n, n));
                for (k, c) in &l.terms {
                    m += c.to_dense(n) * Complex64::new(v[*k], 0.0);
                }
                let re = faer::Mat::from_fn(n, n, |r, c| m[(r, c)].re);
                let op = to_complex(&re, &l.layout, l.doubled)?;
                let min = {
                    let s = faer::Mat::from_fn(n, n, |r, c| 0.5 * (re[(r, c)] + re[(c, r)]));
                    s.self_adjoint_eigenvalues(faer::Side::Lower)
                        .map(|e| e.iter().cloned().fold(f64::INFINITY, f64::min))
                        .unwrap_or(f64::NAN)
                };
                mins.push((l.name.clone(), min));
                blocks.push((l.name.clone(), op));
            }
            let objective: f64 = f.objective.iter().zip(&v).map(|(a, b)| a * b).sum();
            let sign = if f.maximize { 1.0 } else { -1.0 };
            Ok(SdpSolution {
                status: sol.status,
                objective,
                bound: sign * sol.primal_objective,
                residuals: residuals_base(0.0, mins),
                iterations: sol.iterations,
                blocks,
                variables: v,
            })
        }
    }
}

fn dot_real(c: &Coef, x: &faer::Mat<f64>) -> f64 {
    match c {
        Coef::Sparse(e) => e.iter().map(|&(r, cc, v)| v.re * x[(cc, r)]).sum(),
        Coef::Dense(m) => {
            let mut s = 0.0;
            for r in 0..m.nrows() {
                for cc in 0..m.ncols() {
                    s += m[(r, cc)].re * x[(cc, r)];
                }
            }
            s
        }
    }
}
