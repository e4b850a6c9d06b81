//! Primal-dual interior-point method for real semidefinite programs
//!
//! ```text
//!   (P)  min Σ_b ⟨C_b, X_b⟩   s.t.  Σ_b ⟨A_ib, X_b⟩ = b_i,  X_b ⪰ 0
//!   (D)  max bᵀy              s.t.  Σ_i y_i A_ib + Z_b = C_b,  Z_b ⪰ 0
//! ```
//!
//! Infeasible-start HKM search direction with Mehrotra predictor-corrector.
//! Constraint rows are normalized and linearly dependent rows are removed
//! before the iteration starts; a dependent row with an inconsistent
//! right-hand side makes the problem infeasible outright.

use std::collections::HashMap;

use faer::linalg::solvers::DenseSolveCore;
use faer::{Accum, Mat, Par, Side};
use serde::{Deserialize, Serialize};

/// Real symmetric coefficient matrix.
#[derive(Clone, Debug)]
pub enum SymMat {
    /// Upper-triangle entries `(r, c, v)` with `r ≤ c`; the lower triangle is implied.
    Sparse(Vec<(usize, usize, f64)>),
    Dense(Mat<f64>),
}

impl SymMat {
    /// Sparse symmetric matrix from upper-triangle entries; duplicates are summed.
    pub fn from_upper(mut entries: Vec<(usize, usize, f64)>) -> SymMat {
        for e in entries.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0, e.2);
            }
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        out.retain(|e| e.2 != 0.0);
        SymMat::Sparse(out)
    }

    /// Entries of both triangles.
    fn full_entries(&self) -> Vec<(usize, usize, f64)> {
        match self {
            SymMat::Sparse(e) => {
                let mut out = Vec::with_capacity(2 * e.len());
                for &(r, c, v) in e {
                    out.push((r, c, v));
                    if r != c {
                        out.push((c, r, v));
                    }
                }
                out
            }
            SymMat::Dense(m) => {
                let mut out = vec![];
                for c in 0..m.ncols() {
                    for r in 0..m.nrows() {
                        if m[(r, c)] != 0.0 {
                            out.push((r, c, m[(r, c)]));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> Mat<f64> {
        match self {
            SymMat::Dense(m) => m.clone(),
            SymMat::Sparse(_) => {
                let mut m = Mat::zeros(n, n);
                for (r, c, v) in self.full_entries() {
                    m[(r, c)] += v;
                }
                m
            }
        }
    }

    fn nnz(&self) -> usize {
        match self {
            SymMat::Sparse(e) => e.len() * 2,
            SymMat::Dense(m) => m.nrows() * m.ncols(),
        }
    }
}

/// Conic program in the standard form above.
#[derive(Clone, Debug, Default)]
pub struct ConicProblem {
    pub block_dims: Vec<usize>,
    /// One cost matrix per block; `None` is zero.
    pub c: Vec<Option<SymMat>>,
    /// Constraint rows as (block, coefficient) lists.
    pub rows: Vec<Vec<(usize, SymMat)>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Unknown,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverOptions {
    pub feasibility_tol: f64,
    pub gap_tol: f64,
    pub max_iterations: usize,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { feasibility_tol: 1e-9, gap_tol: 1e-8, max_iterations: 120, verbose: false }
    }
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub status: SolveStatus,
    pub x: Vec<Mat<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<Mat<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub relative_gap: f64,
    pub iterations: usize,
    /// Rows removed as linearly dependent.
    pub dropped_rows: usize,
}

/// Parallelism for dense kernels, capped by `SWITCHCERT_THREADS`.
pub fn parallelism() -> Par {
    match std::env::var("SWITCHCERT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(n) if n > 1 => Par::rayon(n),
        _ => Par::Seq,
    }
}

enum Part {
    Sparse(Vec<(usize, usize, f64)>),
    /// Row index into the block's dense store.
    Dense,
}

struct Block {
    n: usize,
    /// Dense rows, one per row, column-major vec of the coefficient matrix.
    dense: Mat<f64>,
    dense_owner: Vec<usize>,
    /// (row, entries of both triangles) for sparse parts.
    sparse: Vec<(usize, Vec<(usize, usize, f64)>)>,
    c: Mat<f64>,
}

struct Data {
    blocks: Vec<Block>,
    b: Vec<f64>,
    m: usize,
}

impl Data {
    fn new(blocks_dims: &[usize], c: &[Option<SymMat>], rows: &[Vec<(usize, SymMat)>], scale: &[f64], keep: &[usize], b: Vec<f64>) -> Data {
        let mut blocks: Vec<Block> = blocks_dims
            .iter()
            .enumerate()
            .map(|(k, &n)| Block {
                n,
                dense: Mat::zeros(0, 0),
                dense_owner: vec![],
                sparse: vec![],
                c: c[k].as_ref().map(|m| m.to_dense(n)).unwrap_or_else(|| Mat::zeros(n, n)),
            })
            .collect();
        let mut dense_parts: Vec<Vec<(usize, Mat<f64>)>> = vec![vec![]; blocks.len()];
        for (new_i, &orig) in keep.iter().enumerate() {
            let s = scale[orig];
            for (bk, coef) in &rows[orig] {
                let n = blocks[*bk].n;
                match row_part(coef, n) {
                    Part::Sparse(e) => {
                        let e = e.into_iter().map(|(r, c, v)| (r, c, v / s)).collect();
                        blocks[*bk].sparse.push((new_i, e));
                    }
                    Part::Dense => {
                        let mut m = coef.to_dense(n);
                        for v in m.col_iter_mut().flat_map(|c| c.iter_mut()) {
                            *v /= s;
                        }
                        dense_parts[*bk].push((new_i, m));
                    }
                }
            }
        }
        for (bk, parts) in dense_parts.into_iter().enumerate() {
            let n = blocks[bk].n;
            let mut dense = Mat::zeros(parts.len(), n * n);
            let mut owner = vec![];
            for (k, (row, m)) in parts.into_iter().enumerate() {
                for c in 0..n {
                    for r in 0..n {
                        dense[(k, c * n + r)] = m[(r, c)];
                    }
                }
                owner.push(row);
            }
            blocks[bk].dense = dense;
            blocks[bk].dense_owner = owner;
        }
        Data { blocks, m: keep.len(), b }
    }

    /// `A(K)` for per-block matrices K.
    fn apply(&self, k: &[Mat<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (bk, blk) in self.blocks.iter().enumerate() {
            let km = &k[bk];
            for (row, e) in &blk.sparse {
                let mut s = 0.0;
                for &(r, c, v) in e {
                    s += v * km[(c, r)];
                }
                out[*row] += s;
            }
            if !blk.dense_owner.is_empty() {
                let n = blk.n;
                let vk = Mat::from_fn(n * n, 1, |i, _| km[(i % n, i / n)]);
                let mut res = Mat::zeros(blk.dense_owner.len(), 1);
                faer::linalg::matmul::matmul(res.as_mut(), Accum::Replace, blk.dense.as_ref(), vk.as_ref(), 1.0, parallelism());
                for (k, &row) in blk.dense_owner.iter().enumerate() {
                    out[row] += res[(k, 0)];
                }
            }
        }
        out
    }

    /// `Aᵀ y` per block.
    fn adjoint(&self, y: &[f64]) -> Vec<Mat<f64>> {
        self.blocks
            .iter()
            .map(|blk| {
                let n = blk.n;
                let mut out = Mat::zeros(n, n);
                for (row, e) in &blk.sparse {
                    let yr = y[*row];
                    if yr != 0.0 {
                        for &(r, c, v) in e {
                            out[(r, c)] += yr * v;
                        }
                    }
                }
                if !blk.dense_owner.is_empty() {
                    let yv = Mat::from_fn(1, blk.dense_owner.len(), |_, k| y[blk.dense_owner[k]]);
                    let mut res = Mat::zeros(1, n * n);
                    faer::linalg::matmul::matmul(res.as_mut(), Accum::Replace, yv.as_ref(), blk.dense.as_ref(), 1.0, parallelism());
                    for i in 0..n * n {
                        out[(i % n, i / n)] += res[(0, i)];
                    }
                }
                out
            })
            .collect()
    }

    /// Schur complement `M_ij = Σ_b Tr(A_ib X_b A_jb W_b)`.
    fn schur(&self, x: &[Mat<f64>], w: &[Mat<f64>]) -> Mat<f64> {
        let m = self.m;
        let mut out = Mat::<f64>::zeros(m, m);
        let par = parallelism();
        for (bk, blk) in self.blocks.iter().enumerate() {
            let n = blk.n;
            let (xb, wb) = (&x[bk], &w[bk]);
            let rows: Vec<(usize, Option<&Vec<(usize, usize, f64)>>, Option<usize>)> = blk
                .sparse
                .iter()
                .map(|(r, e)| (*r, Some(e), None))
                .chain(blk.dense_owner.iter().enumerate().map(|(k, r)| (*r, None, Some(k))))
                .collect();
            if rows.is_empty() {
                continue;
            }
            let chunk = (1usize << 21).div_ceil(n * n).clamp(1, 256);
            let mut gbuf = Mat::<f64>::zeros(n * n, chunk);
            let mut xa = Mat::<f64>::zeros(n, n);
            let mut g = Mat::<f64>::zeros(n, n);
            let mut dense_a = Mat::<f64>::zeros(n, n);
            for start in (0..rows.len()).step_by(chunk) {
                let end = (start + chunk).min(rows.len());
                for (slot, &(_, sp, dn)) in rows[start..end].iter().enumerate() {
                    // xa = X A_i
                    match (sp, dn) {
                        (Some(e), _) => {
                            xa.fill(0.0);
                            for &(r, c, v) in e {
                                for t in 0..n {
                                    xa[(t, c)] += xb[(t, r)] * v;
                                }
                            }
                        }
                        (None, Some(k)) => {
                            for c in 0..n {
                                for r in 0..n {
                                    dense_a[(r, c)] = blk.dense[(k, c * n + r)];
                                }
                            }
                            faer::linalg::matmul::matmul(xa.as_mut(), Accum::Replace, xb.as_ref(), dense_a.as_ref(), 1.0, par);
                        }
                        _ => unreachable!(),
                    }
                    faer::linalg::matmul::matmul(g.as_mut(), Accum::Replace, xa.as_ref(), wb.as_ref(), 1.0, par);
                    let col = gbuf.col_mut(slot);
                    let col = col.try_as_col_major_mut().unwrap().as_slice_mut();
                    for c in 0..n {
                        for r in 0..n {
                            col[c * n + r] = g[(r, c)];
                        }
                    }
                }
                let width = end - start;
                // sparse rows j: Σ v G[c, r] for entries (r, c, v) → Tr(A_j G)
                for (row_j, e) in &blk.sparse {
                    for slot in 0..width {
                        let col = gbuf.col(slot);
                        let col = col.try_as_col_major().unwrap().as_slice();
                        let mut s = 0.0;
                        for &(r, c, v) in e {
                            s += v * col[r * n + c];
                        }
                        out[(*row_j, rows[start + slot].0)] += s;
                    }
                }
                if !blk.dense_owner.is_empty() {
                    let mut res = Mat::<f64>::zeros(blk.dense_owner.len(), width);
                    // dense rows store vec(A) column-major; Tr(A G) = Σ A[r,c] G[c,r]
                    // and A symmetric, so pair A's column-major vec with G's row-major vec.
                    let gt = transpose_blocks(&gbuf, n, width);
                    faer::linalg::matmul::matmul(res.as_mut(), Accum::Replace, blk.dense.as_ref(), gt.as_ref(), 1.0, par);
                    for (k, &row_j) in blk.dense_owner.iter().enumerate() {
                        for slot in 0..width {
                            out[(row_j, rows[start + slot].0)] += res[(k, slot)];
                        }
                    }
                }
            }
        }
        // symmetrize
        for i in 0..m {
            for j in 0..i {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

/// Each column holds vec(G) column-major; returns columns holding vec(Gᵀ).
fn transpose_blocks(buf: &Mat<f64>, n: usize, width: usize) -> Mat<f64> {
    Mat::from_fn(n * n, width, |i, s| {
        let (c, r) = (i / n, i % n);
        buf[(r * n + c, s)]
    })
}

fn row_part(coef: &SymMat, n: usize) -> Part {
    match coef {
        SymMat::Sparse(_) if coef.nnz() * 8 < n * n || n <= 2 => Part::Sparse(coef.full_entries()),
        SymMat::Sparse(_) => Part::Dense,
        SymMat::Dense(_) => Part::Dense,
    }
}

fn frob(m: &Mat<f64>) -> f64 {
    m.norm_l2()
}

fn dot(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            s += a[(r, c)] * b[(r, c)];
        }
    }
    s
}

fn sym(m: &Mat<f64>) -> Mat<f64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |r, c| 0.5 * (m[(r, c)] + m[(c, r)]))
}

fn matmul(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    faer::linalg::matmul::matmul(out.as_mut(), Accum::Replace, a.as_ref(), b.as_ref(), 1.0, parallelism());
    out
}

fn inverse_spd(m: &Mat<f64>) -> Option<Mat<f64>> {
    let llt = sym(m).llt(Side::Lower).ok()?;
    Some(sym(&llt.inverse()))
}

/// Largest α ≤ 1 with `X + α dX ⪰ 0`, scaled by `tau`.
fn step_length(x: &Mat<f64>, dx: &Mat<f64>, tau: f64) -> f64 {
    let n = x.nrows();
    let Ok(llt) = sym(x).llt(Side::Lower) else { return 0.0 };
    let l = llt.L().to_owned();
    let mut t = sym(dx);
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(l.as_ref(), t.as_mut(), Par::Seq);
    let mut t = t.transpose().to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(l.as_ref(), t.as_mut(), Par::Seq);
    let t = sym(&t);
    let lam = match t.self_adjoint_eigenvalues(Side::Lower) {
        Ok(ev) => ev.iter().cloned().fold(f64::INFINITY, f64::min),
        Err(_) => return 0.0,
    };
    let _ = n;
    if lam >= 0.0 {
        1.0
    } else {
        (tau * (-1.0 / lam)).min(1.0)
    }
}

struct Presolved {
    keep: Vec<usize>,
    scale: Vec<f64>,
    inconsistent: bool,
}

/// Row normalization and removal of dependent rows via pivoted Cholesky of
/// the Gram matrix `A Aᵀ`.
fn presolve(p: &ConicProblem) -> Presolved {
    let m = p.rows.len();
    // vec representation: global position → value, both triangles
    let offsets: Vec<usize> = p
        .block_dims
        .iter()
        .scan(0usize, |acc, &n| {
            let o = *acc;
            *acc += n * n;
            Some(o)
        })
        .collect();
    let total: usize = p.block_dims.iter().map(|n| n * n).sum();
    let mut vecs: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
    for row in &p.rows {
        let mut v: Vec<(usize, f64)> = vec![];
        for (bk, coef) in row {
            let n = p.block_dims[*bk];
            for (r, c, val) in coef.full_entries() {
                v.push((offsets[*bk] + r * n + c, val));
            }
        }
        v.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(v.len());
        for (i, val) in v {
            match merged.last_mut() {
                Some(l) if l.0 == i => l.1 += val,
                _ => merged.push((i, val)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        vecs.push(merged);
    }
    let scale: Vec<f64> = vecs
        .iter()
        .map(|v| v.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt())
        .collect();
    let mut inconsistent = false;
    let mut nonzero = vec![];
    for i in 0..m {
        if scale[i] == 0.0 {
            if p.b[i].abs() > 1e-12 {
                inconsistent = true;
            }
        } else {
            nonzero.push(i);
        }
    }
    // Gram matrix of normalized rows
    let mz = nonzero.len();
    let dense_threshold = total / 16 + 1;
    let dense_ids: Vec<usize> = (0..mz).filter(|&k| vecs[nonzero[k]].len() > dense_threshold).collect();
    let sparse_ids: Vec<usize> = (0..mz).filter(|&k| vecs[nonzero[k]].len() <= dense_threshold).collect();
    let mut gram = Mat::<f64>::zeros(mz, mz);
    let norm = |k: usize| scale[nonzero[k]];
    if !dense_ids.is_empty() {
        let d = Mat::from_fn(dense_ids.len(), total, |_, _| 0.0);
        let mut d = d;
        for (a, &k) in dense_ids.iter().enumerate() {
            for &(i, v) in &vecs[nonzero[k]] {
                d[(a, i)] = v / norm(k);
            }
        }
        let mut g = Mat::zeros(dense_ids.len(), dense_ids.len());
        faer::linalg::matmul::matmul(g.as_mut(), Accum::Replace, d.as_ref(), d.transpose(), 1.0, parallelism());
        for (a, &ka) in dense_ids.iter().enumerate() {
            for (bb, &kb) in dense_ids.iter().enumerate() {
                gram[(ka, kb)] = g[(a, bb)];
            }
        }
        for &ks in &sparse_ids {
            for (a, &kd) in dense_ids.iter().enumerate() {
                let mut s = 0.0;
                for &(i, v) in &vecs[nonzero[ks]] {
                    s += v * d[(a, i)];
                }
                s /= norm(ks);
                gram[(ks, kd)] = s;
                gram[(kd, ks)] = s;
            }
        }
    }
    let mut by_pos: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for &k in &sparse_ids {
        for &(i, v) in &vecs[nonzero[k]] {
            by_pos.entry(i).or_default().push((k, v / norm(k)));
        }
    }
    for list in by_pos.values() {
        for &(ka, va) in list {
            for &(kb, vb) in list {
                gram[(ka, kb)] += va * vb;
            }
        }
    }
    let bn: Vec<f64> = nonzero.iter().map(|&i| p.b[i] / scale[i]).collect();
    let (sel, residuals) = pivoted_cholesky_select(&gram, &bn, 1e-12);
    for (k, r) in residuals {
        if r.abs() > 1e-8 * (1.0 + bn[k].abs()) {
            inconsistent = true;
        }
    }
    let mut keep: Vec<usize> = sel.iter().map(|&k| nonzero[k]).collect();
    keep.sort();
    Presolved { keep, scale, inconsistent }
}

/// In-order greedy Cholesky of the Gram matrix; returns the selected rows
/// and, for every rejected row, the residual of its right-hand side against
/// the rows selected before it.
fn pivoted_cholesky_select(gram: &Mat<f64>, b: &[f64], tol: f64) -> (Vec<usize>, Vec<(usize, f64)>) {
    let m = gram.nrows();
    // row-major lower triangle, updated in place
    let mut g: Vec<f64> = vec![0.0; m * m];
    for r in 0..m {
        for c in 0..=r {
            g[r * m + c] = gram[(r, c)];
        }
    }
    let mut bb: Vec<f64> = b.to_vec();
    let dmax = (0..m).map(|i| g[i * m + i]).fold(0.0, f64::max).max(1e-300);
    let mut selected = vec![];
    let mut rejected = vec![];
    let mut lcol = vec![0.0; m];
    for k in 0..m {
        let dk = g[k * m + k];
        if dk <= tol * dmax {
            rejected.push((k, bb[k]));
            continue;
        }
        selected.push(k);
        let lkk = dk.sqrt();
        for i in k + 1..m {
            lcol[i] = g[i * m + k] / lkk;
        }
        bb[k] /= lkk;
        let bk = bb[k];
        for i in k + 1..m {
            bb[i] -= lcol[i] * bk;
        }
        for i in k + 1..m {
            let lik = lcol[i];
            if lik == 0.0 {
                continue;
            }
            let row = &mut g[i * m..i * m + i + 1];
            for j in k + 1..=i {
                row[j] -= lik * lcol[j];
            }
        }
    }
    (selected, rejected)
}

impl ConicProblem {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self, opts: &SolverOptions) -> ConicSolution {
        let pre = presolve(self);
        let nb = self.block_dims.len();
        if pre.inconsistent {
            return ConicSolution {
                status: SolveStatus::Infeasible,
                x: self.block_dims.iter().map(|&n| Mat::zeros(n, n)).collect(),
                y: vec![0.0; self.rows.len()],
                z: self.block_dims.iter().map(|&n| Mat::zeros(n, n)).collect(),
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
                primal_infeasibility: f64::INFINITY,
                dual_infeasibility: f64::NAN,
                relative_gap: f64::NAN,
                iterations: 0,
                dropped_rows: self.rows.len() - pre.keep.len(),
            };
        }
        let b: Vec<f64> = pre.keep.iter().map(|&i| self.b[i] / pre.scale[i]).collect();
        let data = Data::new(&self.block_dims, &self.c, &self.rows, &pre.scale, &pre.keep, b);
        let (status, x, yk, z, stats) = ipm(&data, opts);
        let mut y = vec![0.0; self.rows.len()];
        for (k, &i) in pre.keep.iter().enumerate() {
            y[i] = yk[k] / pre.scale[i];
        }
        let _ = nb;
        ConicSolution {
            status,
            x,
            y,
            z,
            primal_objective: stats.pobj,
            dual_objective: stats.dobj,
            primal_infeasibility: stats.pinf,
            dual_infeasibility: stats.dinf,
            relative_gap: stats.gap,
            iterations: stats.iter,
            dropped_rows: self.rows.len() - pre.keep.len(),
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Stats {
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    gap: f64,
    iter: usize,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

type IpmResult = (SolveStatus, Vec<Mat<f64>>, Vec<f64>, Vec<Mat<f64>>, Stats);

/// Iterations without a 10% merit improvement before giving up.
const STALL_ITERATIONS: usize = 15;
/// Residual level reported as [`SolveStatus::NearOptimal`].
const NEAR_TOL: f64 = 1e-5;
/// Centering is kept up while `mu` is below this multiple of the residuals;
/// letting `mu` run ahead of feasibility stalls on problems without an interior.
const MU_FLOOR_RATIO: f64 = 1e4;

fn ipm(data: &Data, opts: &SolverOptions) -> IpmResult {
    let nb = data.blocks.len();
    let m = data.m;
    let ntot: usize = data.blocks.iter().map(|b| b.n).sum();
    let b = &data.b;
    let bnorm = norm2(b);
    let cnorm = data.blocks.iter().map(|blk| frob(&blk.c).powi(2)).sum::<f64>().sqrt();
    // initial point
    let mut x: Vec<Mat<f64>> = vec![];
    let mut z: Vec<Mat<f64>> = vec![];
    {
        let amax_b: Vec<f64> = data
            .blocks
            .iter()
            .map(|blk| {
                let mut norms = vec![0.0f64; m];
                for (row, e) in &blk.sparse {
                    norms[*row] += e.iter().map(|t| t.2 * t.2).sum::<f64>();
                }
                for (k, &row) in blk.dense_owner.iter().enumerate() {
                    norms[row] += (0..blk.n * blk.n).map(|i| blk.dense[(k, i)].powi(2)).sum::<f64>();
                }
                let ratio = (0..m)
                    .filter(|&i| norms[i] > 0.0)
                    .map(|i| (1.0 + b[i].abs()) / (1.0 + norms[i].sqrt()))
                    .fold(1.0, f64::max);
                ratio
            })
            .collect();
        for (bk, blk) in data.blocks.iter().enumerate() {
            let n = blk.n as f64;
            let xi = 10f64.max(n.sqrt()).max(n * amax_b[bk]);
            let zeta = 10f64.max(n.sqrt()).max(frob(&blk.c)).max(1.0);
            x.push(Mat::from_fn(blk.n, blk.n, |r, c| if r == c { xi } else { 0.0 }));
            z.push(Mat::from_fn(blk.n, blk.n, |r, c| if r == c { zeta } else { 0.0 }));
        }
    }
    let mut y = vec![0.0; m];
    let mut stats = Stats::default();
    let mut status = SolveStatus::Unknown;
    let mut best: Option<(f64, Vec<Mat<f64>>, Vec<f64>, Vec<Mat<f64>>, Stats)> = None;
    let mut small_steps = 0;
    let mut stalled = 0;
    for iter in 0..opts.max_iterations {
        let ax = data.apply(&x);
        let rp: Vec<f64> = (0..m).map(|i| b[i] - ax[i]).collect();
        let aty = data.adjoint(&y);
        let rd: Vec<Mat<f64>> = (0..nb).map(|k| &data.blocks[k].c - &aty[k] - &z[k]).collect();
        let pobj: f64 = (0..nb).map(|k| dot(&data.blocks[k].c, &x[k])).sum();
        let dobj: f64 = (0..m).map(|i| b[i] * y[i]).sum();
        let mu_sum: f64 = (0..nb).map(|k| dot(&x[k], &z[k])).sum();
        let mu = mu_sum / ntot as f64;
        stats = Stats {
            pobj,
            dobj,
            pinf: norm2(&rp) / (1.0 + bnorm),
            dinf: rd.iter().map(|r| frob(r).powi(2)).sum::<f64>().sqrt() / (1.0 + cnorm),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            iter,
        };
        if opts.verbose {
            eprintln!(
                "it {iter:3}  pobj {pobj:+.10e}  dobj {dobj:+.10e}  pinf {:.2e}  dinf {:.2e}  gap {:.2e}  mu {mu:.2e}",
                stats.pinf, stats.dinf, stats.gap
            );
        }
        let merit = stats.pinf.max(stats.dinf).max(stats.gap);
        if best.as_ref().map(|b| merit < 0.9 * b.0).unwrap_or(true) {
            stalled = 0;
        } else {
            stalled += 1;
        }
        if best.as_ref().map(|b| merit < b.0).unwrap_or(true) {
            best = Some((merit, x.clone(), y.clone(), z.clone(), stats));
        }
        if stalled >= STALL_ITERATIONS && merit < 1e-3 {
            break;
        }
        if stats.pinf <= opts.feasibility_tol && stats.dinf <= opts.feasibility_tol && stats.gap <= opts.gap_tol {
            status = SolveStatus::Optimal;
            break;
        }
        // divergence of the dual objective certifies primal infeasibility and vice versa
        if dobj > 1e10 * (1.0 + cnorm) && stats.dinf < 1e-6 * dobj.abs() {
            status = SolveStatus::Infeasible;
            break;
        }
        if -pobj > 1e10 * (1.0 + bnorm) && stats.pinf < 1e-6 * pobj.abs() {
            status = SolveStatus::Infeasible;
            break;
        }
        let zinv: Vec<Mat<f64>> = match z.iter().map(inverse_spd).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => break,
        };
        let schur = data.schur(&x, &zinv);
        let Some(chol) = factor_schur(&schur) else { break };
        // a few refinement sweeps against the unregularized matrix
        let solve = |rhs: &[f64]| -> Vec<f64> {
            let rhs = Mat::from_fn(m, 1, |i, _| rhs[i]);
            let mut sol = rhs.clone();
            faer::linalg::solvers::Solve::solve_in_place(&chol, sol.as_mut());
            let rnorm = frob(&rhs);
            for _ in 0..3 {
                let mut res = &rhs - &schur * &sol;
                if frob(&res) <= 1e-14 * rnorm {
                    break;
                }
                faer::linalg::solvers::Solve::solve_in_place(&chol, res.as_mut());
                sol += res;
            }
            (0..m).map(|i| sol[(i, 0)]).collect()
        };
        let xrdz: Vec<Mat<f64>> = (0..nb).map(|k| matmul(&matmul(&x[k], &rd[k]), &zinv[k])).collect();
        let a_xrdz = data.apply(&xrdz);
        let a_zinv = data.apply(&zinv);
        let direction = |sigma_mu: f64, corr: Option<(&[Mat<f64>], &[Mat<f64>])>| {
            let mut rhs: Vec<f64> = (0..m).map(|i| b[i] - sigma_mu * a_zinv[i] + a_xrdz[i]).collect();
            let corr_mats: Option<Vec<Mat<f64>>> =
                corr.map(|(dxp, dzp)| (0..nb).map(|k| matmul(&matmul(&dxp[k], &dzp[k]), &zinv[k])).collect());
            if let Some(cm) = &corr_mats {
                let ac = data.apply(cm);
                for i in 0..m {
                    rhs[i] += ac[i];
                }
            }
            let dy = solve(&rhs);
            let atdy = data.adjoint(&dy);
            let dz: Vec<Mat<f64>> = (0..nb).map(|k| &rd[k] - &atdy[k]).collect();
            let dx: Vec<Mat<f64>> = (0..nb)
                .map(|k| {
                    let mut t = &zinv[k] * faer::Scale(sigma_mu) - &x[k] - matmul(&matmul(&x[k], &dz[k]), &zinv[k]);
                    if let Some(cm) = &corr_mats {
                        t = t - &cm[k];
                    }
                    sym(&t)
                })
                .collect();
            (dx, dy, dz)
        };
        let (dx_p, _dy_p, dz_p) = direction(0.0, None);
        let ap = (0..nb).map(|k| step_length(&x[k], &dx_p[k], 1.0)).fold(1.0, f64::min);
        let ad = (0..nb).map(|k| step_length(&z[k], &dz_p[k], 1.0)).fold(1.0, f64::min);
        let mu_aff: f64 = (0..nb)
            .map(|k| dot(&(&x[k] + &dx_p[k] * faer::Scale(ap)), &(&z[k] + &dz_p[k] * faer::Scale(ad))))
            .sum::<f64>()
            / ntot as f64;
        let mut sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3).max(if iter < 2 { 0.1 } else { 0.0 });
        let infeas = stats.pinf.max(stats.dinf);
        if mu < MU_FLOOR_RATIO * infeas {
            sigma = sigma.max(0.5);
        }
        let tau = 0.98f64.max(1.0 - 10.0 * mu.min(1e-3));
        let tau = tau.min(0.995);
        let steps = |dx: &[Mat<f64>], dz: &[Mat<f64>]| {
            let ap = (0..nb).map(|k| step_length(&x[k], &dx[k], tau)).fold(1.0, f64::min);
            let ad = (0..nb).map(|k| step_length(&z[k], &dz[k], tau)).fold(1.0, f64::min);
            (ap, ad)
        };
        let (mut dx, mut dy, mut dz) = direction(sigma * mu, Some((&dx_p, &dz_p)));
        let (mut ap, mut ad) = steps(&dx, &dz);
        if ap.min(ad) < 0.2 {
            // the corrector can wreck the step near a degenerate face; fall back to a centered step
            let (cx, cy, cz) = direction(sigma.max(0.5) * mu, None);
            let (cp, cd) = steps(&cx, &cz);
            if cp.min(cd) > ap.min(ad) {
                (dx, dy, dz, ap, ad) = (cx, cy, cz, cp, cd);
            }
        }
        if ap < 1e-9 && ad < 1e-9 {
            small_steps += 1;
            if small_steps >= 3 {
                break;
            }
        } else {
            small_steps = 0;
        }
        for k in 0..nb {
            x[k] = sym(&(&x[k] + &dx[k] * faer::Scale(ap)));
            z[k] = sym(&(&z[k] + &dz[k] * faer::Scale(ad)));
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }
    if status == SolveStatus::Unknown {
        if let Some((_, bx, by, bz, bs)) = best {
            x = bx;
            y = by;
            z = bz;
            stats = bs;
            if stats.pinf <= opts.feasibility_tol && stats.dinf <= opts.feasibility_tol && stats.gap <= opts.gap_tol {
                status = SolveStatus::Optimal;
            } else if stats.pinf <= NEAR_TOL && stats.dinf <= NEAR_TOL && stats.gap <= 10.0 * NEAR_TOL {
                status = SolveStatus::NearOptimal;
            }
        }
    }
    (status, x, y, z, stats)
}

fn factor_schur(m: &Mat<f64>) -> Option<faer::linalg::solvers::Llt<f64>> {
    if let Ok(c) = m.llt(Side::Lower) {
        return Some(c);
    }
    let n = m.nrows();
    let dmax = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
    for eps in [1e-14, 1e-12, 1e-10] {
        let mut r = m.clone();
        for i in 0..n {
            r[(i, i)] += eps * dmax.max(1.0);
        }
        if let Ok(c) = r.llt(Side::Lower) {
            return Some(c);
        }
    }
    None
}
