use nalgebra::DMatrix;

use super::{Field, SpaceLayout};
use crate::error::{Error, Result};

/// Square matrix acting on the tensor product described by its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix<T: Field> {
    layout: SpaceLayout,
    data: DMatrix<T>,
}

impl<T: Field> LabeledMatrix<T> {
    pub fn new(layout: SpaceLayout, data: DMatrix<T>) -> Result<Self> {
        let n = layout.total_dim();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but layout {} has dimension {}",
                data.nrows(),
                data.ncols(),
                layout,
                n
            )));
        }
        Ok(LabeledMatrix { layout, data })
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        LabeledMatrix { layout, data: DMatrix::zeros(n, n) }
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        LabeledMatrix { layout, data: DMatrix::identity(n, n) }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn data(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DMatrix<T> {
        &mut self.data
    }

    pub fn into_data(self) -> DMatrix<T> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.dim() {
            t += self.data[(i, i)].clone();
        }
        t
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim();
        let data = DMatrix::from_fn(n, n, |r, c| self.data[(c, r)].conj());
        LabeledMatrix { layout: self.layout.clone(), data }
    }

    pub fn scale(&self, s: &T) -> Self {
        let data = self.data.map(|x| x * s.clone());
        LabeledMatrix { layout: self.layout.clone(), data }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(LabeledMatrix { layout: self.layout.clone(), data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(LabeledMatrix { layout: self.layout.clone(), data: &self.data - &other.data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(LabeledMatrix { layout: self.layout.clone(), data: &self.data * &other.data })
    }

    fn check_same_layout(&self, other: &Self) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch(format!(
                "layouts differ: {} vs {}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }

    /// Hilbert-Schmidt inner product Tr(self† other).
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_same_layout(other)?;
        let mut acc = T::zero();
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            acc += a.conj() * b.clone();
        }
        Ok(acc)
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        self.check_same_layout(other)?;
        let n = self.dim();
        let mut acc = T::zero();
        for r in 0..n {
            for c in 0..n {
                acc += self.data[(r, c)].clone() * other.data[(c, r)].clone();
            }
        }
        Ok(acc)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let (na, nb) = (self.dim(), other.dim());
        let mut data = DMatrix::zeros(na * nb, na * nb);
        for ar in 0..na {
            for ac in 0..na {
                let a = &self.data[(ar, ac)];
                if a.is_zero() {
                    continue;
                }
                for br in 0..nb {
                    for bc in 0..nb {
                        data[(ar * nb + br, ac * nb + bc)] = a.clone() * other.data[(br, bc)].clone();
                    }
                }
            }
        }
        Ok(LabeledMatrix { layout, data })
    }

    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<Self> {
        Ok(LabeledMatrix { layout: self.layout.relabel(map)?, data: self.data.clone() })
    }

    pub fn partial_trace<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let mask = self.layout.mask(labels)?;
        let keep: Vec<bool> = mask.iter().map(|m| !m).collect();
        let out_layout = self.layout.select(&keep);
        let groups = self.groups_by_masked(&mask);
        let m = out_layout.total_dim();
        let mut data = DMatrix::zeros(m, m);
        for group in &groups {
            for (k1, &i) in group.iter().enumerate() {
                for (k2, &j) in group.iter().enumerate() {
                    data[(k1, k2)] += self.data[(i, j)].clone();
                }
            }
        }
        Ok(LabeledMatrix { layout: out_layout, data })
    }

    /// For each value of the masked digits, the full indices sharing it,
    /// ordered by their index in the unmasked sub-layout.
    fn groups_by_masked(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let keep: Vec<bool> = mask.iter().map(|m| !m).collect();
        let masked_idx = self.layout.sub_index(mask);
        let kept_idx = self.layout.sub_index(&keep);
        let n_masked = self.layout.select(mask).total_dim();
        let n_kept = self.layout.select(&keep).total_dim();
        let mut groups = vec![vec![0usize; n_kept]; n_masked];
        for i in 0..self.dim() {
            groups[masked_idx[i]][kept_idx[i]] = i;
        }
        groups
    }

    pub fn partial_transpose<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let mask = self.layout.mask(labels)?;
        let (on, off) = self.layout.split_offsets(&mask);
        let n = self.dim();
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                data[(off[i] + on[j], off[j] + on[i])] = self.data[(i, j)].clone();
            }
        }
        Ok(LabeledMatrix { layout: self.layout.clone(), data })
    }

    pub fn transpose(&self) -> Self {
        LabeledMatrix { layout: self.layout.clone(), data: self.data.transpose() }
    }

    /// `Tr_X(M) ⊗ 𝟙_X / d_X`, re-embedded at the original positions of X.
    pub fn trace_and_replace<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let mask = self.layout.mask(labels)?;
        let d_x: usize = (0..mask.len()).filter(|&k| mask[k]).map(|k| self.layout.dims()[k]).product();
        let groups = self.groups_by_masked(&mask);
        let n_kept = groups[0].len();
        let inv = T::from_ratio(1, d_x as i64);
        let mut reduced = DMatrix::<T>::zeros(n_kept, n_kept);
        for group in &groups {
            for (k1, &i) in group.iter().enumerate() {
                for (k2, &j) in group.iter().enumerate() {
                    reduced[(k1, k2)] += self.data[(i, j)].clone();
                }
            }
        }
        reduced = reduced.map(|x| x * inv.clone());
        let n = self.dim();
        let mut data = DMatrix::zeros(n, n);
        for group in &groups {
            for (k1, &i) in group.iter().enumerate() {
                for (k2, &j) in group.iter().enumerate() {
                    data[(i, j)] = reduced[(k1, k2)].clone();
                }
            }
        }
        Ok(LabeledMatrix { layout: self.layout.clone(), data })
    }

    /// Reorders subsystems so the layout follows `order`.
    pub fn permute_systems<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let names: Vec<&str> = order.iter().map(|s| s.as_ref()).collect();
        if names.len() != self.layout.len() {
            return Err(Error::NotPermutation(names.join(",")));
        }
        let mut perm = Vec::with_capacity(names.len());
        for name in &names {
            match self.layout.position(name) {
                Some(p) if !perm.contains(&p) => perm.push(p),
                _ => return Err(Error::NotPermutation(names.join(","))),
            }
        }
        let new_layout = SpaceLayout::from_parts(
            perm.iter().map(|&p| self.layout.labels()[p].clone()).collect(),
            perm.iter().map(|&p| self.layout.dims()[p]).collect(),
        )?;
        let old_strides = self.layout.strides();
        let new_strides = new_layout.strides();
        let n = self.dim();
        // map[new index] = old index
        let mut map = vec![0usize; n];
        for (new_idx, slot) in map.iter_mut().enumerate() {
            let mut rest = new_idx;
            let mut old = 0;
            for (k, &st) in new_strides.iter().enumerate() {
                let digit = rest / st;
                rest %= st;
                old += digit * old_strides[perm[k]];
            }
            *slot = old;
        }
        let data = DMatrix::from_fn(n, n, |r, c| self.data[(map[r], map[c])].clone());
        Ok(LabeledMatrix { layout: new_layout, data })
    }

    /// Permutes to the order of `target` (same label set) so two operators can
    /// be compared entrywise.
    pub fn aligned_to(&self, target: &SpaceLayout) -> Result<Self> {
        let out = self.permute_systems(target.labels())?;
        if out.layout != *target {
            return Err(Error::DimensionMismatch(format!("{} vs {}", out.layout, target)));
        }
        Ok(out)
    }

    /// Link product `F * G = Tr_S[(F ⊗ 𝟙)(𝟙 ⊗ G^{T_S})]` over the shared
    /// labels S. The result lists F's remaining systems, then G's.
    pub fn link(&self, other: &Self) -> Result<Self> {
        let la = &self.layout;
        let lb = &other.layout;
        let shared: Vec<String> = la.labels().iter().filter(|l| lb.contains(l)).cloned().collect();
        for s in &shared {
            if la.dim_of(s)? != lb.dim_of(s)? {
                return Err(Error::DimensionMismatch(format!("shared system `{s}` has different dims")));
            }
        }
        let x: Vec<String> = la.labels().iter().filter(|l| !shared.contains(l)).cloned().collect();
        let y: Vec<String> = lb.labels().iter().filter(|l| !shared.contains(l)).cloned().collect();
        let f_order: Vec<String> = x.iter().chain(shared.iter()).cloned().collect();
        let g_order: Vec<String> = shared.iter().chain(y.iter()).cloned().collect();
        let f = self.permute_systems(&f_order)?;
        let g = other.permute_systems(&g_order)?;
        let dx = la.dim_of_set(&x)?;
        let ds = la.dim_of_set(&shared)?;
        let dy = lb.dim_of_set(&y)?;
        // F~[(x,x'),(s,s1)] = F[(x,s),(x',s1)],  G~[(s,s1),(y,y')] = G[(s,y),(s1,y')]
        let ft = DMatrix::from_fn(dx * dx, ds * ds, |r, c| {
            let (xa, xb) = (r / dx, r % dx);
            let (sa, sb) = (c / ds, c % ds);
            f.data[(xa * ds + sa, xb * ds + sb)].clone()
        });
        let gt = DMatrix::from_fn(ds * ds, dy * dy, |r, c| {
            let (sa, sb) = (r / ds, r % ds);
            let (ya, yb) = (c / dy, c % dy);
            g.data[(sa * dy + ya, sb * dy + yb)].clone()
        });
        let rt = &ft * &gt;
        let mut out_labels = x.clone();
        out_labels.extend(y.iter().cloned());
        let mut out_dims: Vec<usize> = x.iter().map(|l| la.dim_of(l).unwrap()).collect();
        out_dims.extend(y.iter().map(|l| lb.dim_of(l).unwrap()));
        let layout = SpaceLayout::from_parts(out_labels, out_dims)?;
        let data = DMatrix::from_fn(dx * dy, dx * dy, |r, c| {
            let (xa, ya) = (r / dy, r % dy);
            let (xb, yb) = (c / dy, c % dy);
            rt[(xa * dx + xb, ya * dy + yb)].clone()
        });
        Ok(LabeledMatrix { layout, data })
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> LabeledMatrix<U> {
        LabeledMatrix { layout: self.layout.clone(), data: self.data.map(|x| f(&x)) }
    }

    pub fn is_exactly_hermitian(&self) -> bool {
        let n = self.dim();
        (0..n).all(|r| (r..n).all(|c| self.data[(r, c)] == self.data[(c, r)].conj()))
    }
}
