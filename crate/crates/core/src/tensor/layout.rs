use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of labeled subsystems. Composite indices are row-major: the
/// first system is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceLayout {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl SpaceLayout {
    pub fn new<S: AsRef<str>>(systems: &[(S, usize)]) -> Result<Self> {
        let labels = systems.iter().map(|(l, _)| l.as_ref().to_string()).collect();
        let dims = systems.iter().map(|(_, d)| *d).collect();
        Self::from_parts(labels, dims)
    }

    pub fn from_parts(labels: Vec<String>, dims: Vec<usize>) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels but {} dims",
                labels.len(),
                dims.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Invalid(format!("system `{}` has dimension 0", labels[pos])));
        }
        Ok(SpaceLayout { labels, dims })
    }

    /// Single system layout.
    pub fn single(label: &str, dim: usize) -> Self {
        SpaceLayout { labels: vec![label.to_string()], dims: vec![dim] }
    }

    pub fn empty() -> Self {
        SpaceLayout { labels: vec![], dims: vec![] }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.dims[p])
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Product of the dimensions of the given labels.
    pub fn dim_of_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        labels.iter().map(|l| self.dim_of(l.as_ref())).product()
    }

    pub fn concat(&self, other: &SpaceLayout) -> Result<SpaceLayout> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut dims = self.dims.clone();
        dims.extend(other.dims.iter().cloned());
        SpaceLayout::from_parts(labels, dims)
    }

    /// Positions of `labels`, erroring on unknown ones.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| self.position(l.as_ref()).ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string())))
            .collect()
    }

    /// Boolean mask over systems, true for the listed labels.
    pub fn mask<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.len()];
        for p in self.positions(labels)? {
            mask[p] = true;
        }
        Ok(mask)
    }

    /// Layout restricted to systems where `keep[i]` holds, original order.
    pub fn select(&self, keep: &[bool]) -> SpaceLayout {
        let mut labels = vec![];
        let mut dims = vec![];
        for i in 0..self.len() {
            if keep[i] {
                labels.push(self.labels[i].clone());
                dims.push(self.dims[i]);
            }
        }
        SpaceLayout { labels, dims }
    }

    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<SpaceLayout> {
        let mut labels = self.labels.clone();
        for (from, to) in map {
            let p = self.position(from).ok_or_else(|| Error::UnknownLabel(from.to_string()))?;
            labels[p] = to.to_string();
        }
        SpaceLayout::from_parts(labels, self.dims.clone())
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.len()];
        for i in (0..self.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Splits every composite index into the part carried by masked systems
    /// and the part carried by the rest, both as offsets into the full index.
    pub(crate) fn split_offsets(&self, mask: &[bool]) -> (Vec<usize>, Vec<usize>) {
        let n = self.total_dim();
        let strides = self.strides();
        let mut on = vec![0; n];
        let mut off = vec![0; n];
        for idx in 0..n {
            let mut rest = idx;
            for (k, &st) in strides.iter().enumerate() {
                let digit = rest / st;
                rest %= st;
                if mask[k] {
                    on[idx] += digit * st;
                } else {
                    off[idx] += digit * st;
                }
            }
        }
        (on, off)
    }

    /// Index of each composite index within the sub-layout selected by `mask`.
    pub(crate) fn sub_index(&self, mask: &[bool]) -> Vec<usize> {
        let n = self.total_dim();
        let strides = self.strides();
        let sub = self.select(mask);
        let sub_strides = sub.strides();
        let mut out = vec![0; n];
        for idx in 0..n {
            let mut rest = idx;
            let mut j = 0;
            let mut acc = 0;
            for (k, &st) in strides.iter().enumerate() {
                let digit = rest / st;
                rest %= st;
                if mask[k] {
                    acc += digit * sub_strides[j];
                    j += 1;
                }
            }
            out[idx] = acc;
        }
        out
    }
}

impl std::fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.labels.iter().zip(&self.dims).map(|(l, d)| format!("{l}:{d}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
