//! Comb projectors, the dual-affine projector and QC-CC constraints, all
//! written as signed sums of trace-and-replace maps.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gellmann::StringBasis;
use crate::tensor::{Field, LabeledMatrix, Operator, SpaceLayout};

/// `Σ_t c_t ·_{X_t}` with integer coefficients. An empty label set is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceReplaceMap {
    terms: Vec<(i64, BTreeSet<String>)>,
}

impl TraceReplaceMap {
    pub fn zero() -> Self {
        TraceReplaceMap { terms: vec![] }
    }

    pub fn identity() -> Self {
        Self::term(1, &[] as &[&str])
    }

    pub fn term<S: AsRef<str>>(coef: i64, labels: &[S]) -> Self {
        let set = labels.iter().map(|s| s.as_ref().to_string()).collect();
        TraceReplaceMap { terms: vec![(coef, set)] }.simplified()
    }

    pub fn terms(&self) -> &[(i64, BTreeSet<String>)] {
        &self.terms
    }

    fn simplified(mut self) -> Self {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(i64, BTreeSet<String>)> = vec![];
        for (c, s) in self.terms {
            match out.last_mut() {
                Some((c0, s0)) if *s0 == s => *c0 += c,
                _ => out.push((c, s)),
            }
        }
        out.retain(|(c, _)| *c != 0);
        TraceReplaceMap { terms: out }
    }

    pub fn plus(&self, other: &TraceReplaceMap) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TraceReplaceMap { terms }.simplified()
    }

    pub fn scaled(&self, s: i64) -> Self {
        TraceReplaceMap { terms: self.terms.iter().map(|(c, x)| (c * s, x.clone())).collect() }
            .simplified()
    }

    pub fn minus(&self, other: &TraceReplaceMap) -> Self {
        self.plus(&other.scaled(-1))
    }

    /// `_Y ∘ self`, using `_Y ∘ _X = _{X ∪ Y}`.
    pub fn then_trace_replace<S: AsRef<str>>(&self, labels: &[S]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, x)| {
                let mut x = x.clone();
                x.extend(labels.iter().map(|s| s.as_ref().to_string()));
                (*c, x)
            })
            .collect();
        TraceReplaceMap { terms }.simplified()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply<T: Field>(&self, m: &LabeledMatrix<T>) -> Result<LabeledMatrix<T>> {
        let mut out = LabeledMatrix::zeros(m.layout().clone());
        for (c, labels) in &self.terms {
            let labels: Vec<&String> = labels.iter().collect();
            let t = m.trace_and_replace(&labels)?;
            out = out.add(&t.scale(&T::from_ratio(*c, 1)))?;
        }
        Ok(out)
    }

    /// Eigenvalue of the map on the Gell-Mann string `idx` of `layout`.
    pub fn eigenvalue(&self, layout: &SpaceLayout, idx: &[usize]) -> Result<i64> {
        let mut v = 0;
        for (c, labels) in &self.terms {
            let labels: Vec<&String> = labels.iter().collect();
            if StringBasis::trivial_on(idx, &layout.mask(&labels)?) {
                v += c;
            }
        }
        Ok(v)
    }
}

/// One slot of a comb: its input and output systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub inputs: Vec<(String, usize)>,
    pub outputs: Vec<(String, usize)>,
}

impl Slot {
    pub fn new(input: (&str, usize), output: (&str, usize)) -> Self {
        Slot { inputs: vec![(input.0.into(), input.1)], outputs: vec![(output.0.into(), output.1)] }
    }
}

fn labels_of(s: &[(String, usize)]) -> Vec<String> {
    s.iter().map(|(l, _)| l.clone()).collect()
}

fn dims_of(s: &[(String, usize)]) -> usize {
    s.iter().map(|(_, d)| d).product()
}

/// Comb on `P, I₁, O₁, …, I_k, O_k, F`. P and F may be empty or have dim 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombSpec {
    pub past: Vec<(String, usize)>,
    pub slots: Vec<Slot>,
    pub future: Vec<(String, usize)>,
}

impl CombSpec {
    pub fn new(past: Vec<(String, usize)>, slots: Vec<Slot>, future: Vec<(String, usize)>) -> Self {
        CombSpec { past, slots, future }
    }

    pub fn k(&self) -> usize {
        self.slots.len()
    }

    /// Layout in the canonical order P, I₁, O₁, …, F.
    pub fn layout(&self) -> Result<SpaceLayout> {
        let mut all = self.past.clone();
        for s in &self.slots {
            all.extend(s.inputs.iter().cloned());
            all.extend(s.outputs.iter().cloned());
        }
        all.extend(self.future.iter().cloned());
        SpaceLayout::new(&all)
    }

    /// `Tr(C) = d_P ∏ d_{O_i}` for a comb.
    pub fn normalization(&self) -> usize {
        dims_of(&self.past) * self.slots.iter().map(|s| dims_of(&s.outputs)).product::<usize>()
    }

    pub fn all_labels(&self) -> Vec<String> {
        let mut v = labels_of(&self.past);
        for s in &self.slots {
            v.extend(labels_of(&s.inputs));
            v.extend(labels_of(&s.outputs));
        }
        v.extend(labels_of(&self.future));
        v
    }

    fn check_k(&self) -> Result<()> {
        match self.k() {
            2..=4 => Ok(()),
            k => Err(Error::UnsupportedK(k)),
        }
    }

    /// `𝐏_k = id − _F + _{O_k F} − _{I_k O_k F} + … + _{P I₁ O₁ … F}`.
    pub fn projector_map(&self) -> Result<TraceReplaceMap> {
        self.check_k()?;
        Ok(sequential_projector(&self.past, &self.slots, &self.future))
    }

    /// `𝐏̄_k(Γ) = Γ − 𝐏_k(Γ) + _{all}Γ`.
    pub fn dual_affine_map(&self) -> Result<TraceReplaceMap> {
        let p = self.projector_map()?;
        Ok(TraceReplaceMap::identity().minus(&p).plus(&TraceReplaceMap::term(1, &self.all_labels())))
    }

    pub fn project<T: Field>(&self, m: &LabeledMatrix<T>) -> Result<LabeledMatrix<T>> {
        self.projector_map()?.apply(m)
    }

    pub fn project_dual<T: Field>(&self, m: &LabeledMatrix<T>) -> Result<LabeledMatrix<T>> {
        self.dual_affine_map()?.apply(m)
    }

    /// Positive, inside the comb subspace, and correctly normalized.
    pub fn is_comb(&self, m: &Operator, tol: f64) -> Result<bool> {
        let p = self.project(m)?;
        let dev = m.distance(&p)?;
        let tr = m.trace();
        let norm = self.normalization() as f64;
        Ok(dev <= tol * (1.0 + m.frobenius_norm())
            && (tr - Complex64::new(norm, 0.0)).norm() <= tol * norm
            && m.is_psd(tol))
    }
}

/// Alternating sum over growing suffixes of (P, I₁, O₁, …, I_k, O_k, F).
fn sequential_projector(
    past: &[(String, usize)],
    slots: &[Slot],
    future: &[(String, usize)],
) -> TraceReplaceMap {
    let mut blocks: Vec<Vec<String>> = vec![];
    for s in slots {
        blocks.push(labels_of(&s.inputs));
        blocks.push(labels_of(&s.outputs));
    }
    let mut acc: Vec<String> = labels_of(future);
    let mut map = TraceReplaceMap::identity().plus(&TraceReplaceMap::term(-1, &acc));
    let mut sign = 1;
    for b in blocks.iter().rev() {
        acc.extend(b.iter().cloned());
        map = map.plus(&TraceReplaceMap::term(sign, &acc));
        sign = -sign;
    }
    // the last added term was I₁…F with sign −; P closes the chain with +
    let mut all = labels_of(past);
    all.extend(acc);
    map.plus(&TraceReplaceMap::term(1, &all))
}

/// Slots and future of a QC-CC with fixed inputs (no P).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcccSpec {
    pub slots: Vec<Slot>,
    pub future: Vec<(String, usize)>,
}

/// Homogeneous condition `Σ_c map_c(W^c) = 0` over order components.
#[derive(Clone, Debug)]
pub struct MapEquality {
    pub terms: Vec<(usize, TraceReplaceMap)>,
}

/// QC-CC constraint set: every component `W^σ = W_s^σ + W_f^σ` has PSD
/// success and failure parts; the equalities act on the `W^σ`.
#[derive(Clone, Debug)]
pub struct QcccConstraints {
    /// Slot orders, 0-based, e.g. `[0, 1]` for the component `W^{12F}`.
    pub orders: Vec<Vec<usize>>,
    pub equalities: Vec<MapEquality>,
    /// `Tr(Σ_σ W^σ)`.
    pub trace: usize,
}

impl QcccConstraints {
    pub fn component_name(&self, c: usize) -> String {
        let s: String = self.orders[c].iter().map(|i| char::from(b'1' + *i as u8)).collect();
        format!("{s}F")
    }

    /// Largest violation over equalities (Frobenius) and the trace condition.
    pub fn violation(&self, components: &[Operator]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for eq in &self.equalities {
            let mut acc = Operator::zeros(components[0].layout().clone());
            for (c, map) in &eq.terms {
                acc = acc.add(&map.apply(&components[*c])?)?;
            }
            worst = worst.max(acc.frobenius_norm());
        }
        let tr: f64 = components.iter().map(|c| c.trace_re()).sum();
        Ok(worst.max((tr - self.trace as f64).abs()))
    }
}

impl QcccSpec {
    pub fn k(&self) -> usize {
        self.slots.len()
    }

    pub fn layout(&self) -> Result<SpaceLayout> {
        let mut all = vec![];
        for s in &self.slots {
            all.extend(s.inputs.iter().cloned());
            all.extend(s.outputs.iter().cloned());
        }
        all.extend(self.future.iter().cloned());
        SpaceLayout::new(&all)
    }

    fn ins(&self, x: usize) -> Vec<String> {
        labels_of(&self.slots[x].inputs)
    }

    fn outs(&self, x: usize) -> Vec<String> {
        labels_of(&self.slots[x].outputs)
    }

    fn fut(&self) -> Vec<String> {
        labels_of(&self.future)
    }

    fn cat(parts: &[Vec<String>]) -> Vec<String> {
        parts.iter().flatten().cloned().collect()
    }

    /// `_X − _Y` as a map.
    fn diff(x: &[String], y: &[String]) -> TraceReplaceMap {
        TraceReplaceMap::term(1, x).minus(&TraceReplaceMap::term(1, y))
    }

    pub fn constraints(&self) -> Result<QcccConstraints> {
        let trace = self.slots.iter().map(|s| dims_of(&s.outputs)).product();
        match self.k() {
            2 => {
                let orders = vec![vec![0, 1], vec![1, 0]];
                let mut equalities = vec![];
                for (c, ord) in orders.iter().enumerate() {
                    let slots = ord.iter().map(|&i| self.slots[i].clone()).collect::<Vec<_>>();
                    let p = sequential_projector(&[], &slots, &self.future);
                    equalities.push(MapEquality { terms: vec![(c, TraceReplaceMap::identity().minus(&p))] });
                }
                Ok(QcccConstraints { orders, equalities, trace })
            }
            3 => {
                let mut orders = vec![];
                let mut equalities = vec![];
                let f = self.fut();
                for x in 0..3 {
                    let rest: Vec<usize> = (0..3).filter(|&i| i != x).collect();
                    let (y, z) = (rest[0], rest[1]);
                    let cxyz = orders.len();
                    orders.push(vec![x, y, z]);
                    let cxzy = orders.len();
                    orders.push(vec![x, z, y]);
                    // last-slot conditions of each order
                    for (c, second, last) in [(cxyz, y, z), (cxzy, z, y)] {
                        let a = f.clone();
                        let b = Self::cat(&[self.outs(last), f.clone()]);
                        equalities.push(MapEquality { terms: vec![(c, Self::diff(&a, &b))] });
                        let a = Self::cat(&[self.ins(last), self.outs(last), f.clone()]);
                        let b = Self::cat(&[self.outs(second), a.clone()]);
                        equalities.push(MapEquality { terms: vec![(c, Self::diff(&a, &b))] });
                    }
                    // coupling through the first slot's output
                    let tail = Self::cat(&[self.ins(y), self.outs(y), self.ins(z), self.outs(z), f.clone()]);
                    let with_ox = Self::cat(&[tail.clone(), self.outs(x)]);
                    let m = Self::diff(&tail, &with_ox);
                    equalities.push(MapEquality { terms: vec![(cxyz, m.clone()), (cxzy, m)] });
                }
                Ok(QcccConstraints { orders, equalities, trace })
            }
            k => Err(Error::UnsupportedK(k)),
        }
    }
}
