//! JSON representations shared by the CLI and library users.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisKind, ChannelBasis};
use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::exact::{gq, q_parse, q_to_string, GaussQ, RationalMatrix};
use crate::tensor::{Operator, SpaceLayout};

/// Dense complex matrix as separate real and imaginary row-major arrays.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let rows = |f: &dyn Fn(&Complex64) -> f64| {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
        };
        MatrixJson { re: rows(&|z| z.re), im: rows(&|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        let nr = self.re.len();
        let nc = self.re.first().map(|r| r.len()).unwrap_or(0);
        if self.im.len() != nr
            || self.re.iter().chain(self.im.iter()).any(|row| row.len() != nc)
        {
            return Err(Error::Parse("ragged or mismatched re/im arrays".into()));
        }
        Ok(DMatrix::from_fn(nr, nc, |r, c| Complex64::new(self.re[r][c], self.im[r][c])))
    }
}

/// `{labels, dims, re, im}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_operator(m: &Operator) -> Self {
        let mj = MatrixJson::from_matrix(m.data());
        OperatorJson {
            labels: m.layout().labels().to_vec(),
            dims: m.layout().dims().to_vec(),
            re: mj.re,
            im: mj.im,
        }
    }

    pub fn to_operator(&self) -> Result<Operator> {
        let layout = SpaceLayout::from_parts(self.labels.clone(), self.dims.clone())?;
        let m = MatrixJson { re: self.re.clone(), im: self.im.clone() }.to_matrix()?;
        Operator::new(layout, m)
    }
}

/// `{kraus: [{re, im}], in_dims, out_dims}` with optional labels.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelJson {
    pub kraus: Vec<MatrixJson>,
    pub in_dims: Vec<usize>,
    pub out_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_labels: Option<Vec<String>>,
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        ChannelJson {
            kraus: ch.kraus().iter().map(MatrixJson::from_matrix).collect(),
            in_dims: ch.in_layout().dims().to_vec(),
            out_dims: ch.out_layout().dims().to_vec(),
            in_labels: Some(ch.in_layout().labels().to_vec()),
            out_labels: Some(ch.out_layout().labels().to_vec()),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let il = self.in_labels.clone().unwrap_or_else(|| default_labels("in", self.in_dims.len()));
        let ol = self.out_labels.clone().unwrap_or_else(|| default_labels("out", self.out_dims.len()));
        let kraus = self.kraus.iter().map(|k| k.to_matrix()).collect::<Result<Vec<_>>>()?;
        KrausChannel::new(
            kraus,
            SpaceLayout::from_parts(il, self.in_dims.clone())?,
            SpaceLayout::from_parts(ol, self.out_dims.clone())?,
        )
    }
}

/// Exact matrix with entries written as `"num/den"` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RationalMatrixJson {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub re: Vec<Vec<String>>,
    pub im: Vec<Vec<String>>,
}

impl RationalMatrixJson {
    pub fn from_matrix(m: &RationalMatrix) -> Self {
        let n = m.dim();
        let rows = |f: &dyn Fn(&GaussQ) -> String| {
            (0..n).map(|r| (0..n).map(|c| f(&m.data()[(r, c)])).collect()).collect()
        };
        RationalMatrixJson {
            labels: m.layout().labels().to_vec(),
            dims: m.layout().dims().to_vec(),
            re: rows(&|z| q_to_string(&z.re)),
            im: rows(&|z| q_to_string(&z.im)),
        }
    }

    pub fn to_matrix(&self) -> Result<RationalMatrix> {
        let layout = SpaceLayout::from_parts(self.labels.clone(), self.dims.clone())?;
        let n = layout.total_dim();
        if self.re.len() != n
            || self.im.len() != n
            || self.re.iter().chain(self.im.iter()).any(|row| row.len() != n)
        {
            return Err(Error::Parse("exact matrix does not match its layout".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(gq(q_parse(&self.re[r][c])?, q_parse(&self.im[r][c])?));
            }
        }
        RationalMatrix::new(layout, DMatrix::from_row_slice(n, n, &entries))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BasisJson {
    pub id: String,
    pub kind: String,
    pub copies: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    pub span_dim: usize,
    pub elements: Vec<OperatorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<RationalMatrixJson>>,
}

impl BasisJson {
    pub fn from_basis(b: &ChannelBasis) -> Self {
        BasisJson {
            id: b.id(),
            kind: b.kind.name().to_string(),
            copies: b.copies,
            seed: b.kind.seed(),
            span_dim: b.span_dim(),
            elements: b.elements.iter().map(OperatorJson::from_operator).collect(),
            exact: b.exact.as_ref().map(|e| e.iter().map(RationalMatrixJson::from_matrix).collect()),
        }
    }

    pub fn to_basis(&self) -> Result<ChannelBasis> {
        let kind = match (self.kind.as_str(), self.seed) {
            ("pauli", _) => BasisKind::Pauli,
            ("random", Some(seed)) => BasisKind::Random { seed },
            ("unitary", Some(seed)) => BasisKind::Unitary { seed },
            (k, _) => return Err(Error::Parse(format!("unknown basis kind `{k}` or missing seed"))),
        };
        let exact = match &self.exact {
            Some(e) => Some(e.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        let elements = match &exact {
            // exact entries are authoritative when present
            Some(e) => e.iter().map(crate::exact::to_float_matrix).collect(),
            None => self.elements.iter().map(|e| e.to_operator()).collect::<Result<Vec<_>>>()?,
        };
        if elements.len() != self.span_dim {
            return Err(Error::Parse("span_dim does not match the element count".into()));
        }
        Ok(ChannelBasis { kind, copies: self.copies, elements, exact })
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
