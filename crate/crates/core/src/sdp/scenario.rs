//! Declarative description of one simulation SDP instance.

use serde::{Deserialize, Serialize};

use crate::comb::{CombSpec, QcccSpec, Slot};
use crate::error::{Error, Result};
use crate::switch::{switch_choi, switch_fixed_inputs, switch_restricted};
use crate::tensor::{Field, LabeledMatrix, Operator, SpaceLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalClass {
    Comb,
    Qccc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Restriction {
    /// Simulation on arbitrary control and target inputs.
    Full,
    /// Inputs fixed to |+⟩|0⟩, output target discarded.
    Restricted,
    /// Inputs fixed to |+⟩|0⟩, output target kept.
    PartlyRestricted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationScenario {
    /// Calls in causal order, e.g. "ABA".
    pub order: String,
    pub causal_class: CausalClass,
    pub restriction: Restriction,
    #[serde(default)]
    pub identical_channels: bool,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_dim")]
    pub target_dim: usize,
}

fn default_dim() -> usize {
    2
}

impl SimulationScenario {
    pub fn new(order: &str, causal_class: CausalClass, restriction: Restriction) -> Self {
        SimulationScenario {
            order: order.to_string(),
            causal_class,
            restriction,
            identical_channels: false,
            epsilon: 0.0,
            target_dim: 2,
        }
    }

    pub fn comb(order: &str, restriction: Restriction) -> Self {
        Self::new(order, CausalClass::Comb, restriction)
    }

    pub fn identical(order: &str, restriction: Restriction) -> Self {
        SimulationScenario { identical_channels: true, ..Self::comb(order, restriction) }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn k_a(&self) -> usize {
        self.order.chars().filter(|&c| c == 'A').count()
    }

    pub fn k_b(&self) -> usize {
        self.order.chars().filter(|&c| c == 'B').count()
    }

    pub fn slots(&self) -> usize {
        self.order.len()
    }

    pub fn name(&self) -> String {
        let class = match self.causal_class {
            CausalClass::Comb => "comb",
            CausalClass::Qccc => "qccc",
        };
        let r = match self.restriction {
            Restriction::Full => "full",
            Restriction::Restricted => "restricted",
            Restriction::PartlyRestricted => "partly-restricted",
        };
        let mut s = format!("{}-{class}-{r}", self.order);
        if self.identical_channels {
            s.push_str("-identical");
        }
        if self.epsilon > 0.0 {
            s.push_str(&format!("-eps{}", self.epsilon));
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.order.is_empty() || !self.order.chars().all(|c| c == 'A' || c == 'B') {
            return Err(Error::Invalid(format!("order `{}` must be a nonempty string over A, B", self.order)));
        }
        if self.k_a() == 0 {
            return Err(Error::Invalid("order must contain at least one A".into()));
        }
        if self.identical_channels && self.k_b() > 0 {
            return Err(Error::Invalid("identical-channel scenarios use A only".into()));
        }
        if !self.identical_channels && self.k_b() == 0 {
            return Err(Error::Invalid("order must contain B unless channels are identical".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Invalid(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.target_dim < 2 {
            return Err(Error::Invalid("target dimension must be at least 2".into()));
        }
        if self.causal_class == CausalClass::Qccc && self.restriction == Restriction::Full {
            return Err(Error::Invalid("QC-CC scenarios need fixed inputs".into()));
        }
        Ok(())
    }

    fn dims(&self) -> (usize, usize, usize) {
        let d = self.target_dim;
        match self.restriction {
            Restriction::Full => (2, d, d),
            Restriction::Restricted => (1, 1, 1),
            Restriction::PartlyRestricted => (1, 1, d),
        }
    }

    /// Labels `(input, output)` of each slot in causal order, e.g.
    /// `[("AI1","AO1"), ("BI1","BO1"), ("AI2","AO2")]` for "ABA".
    pub fn slot_labels(&self) -> Vec<(String, String)> {
        let (mut na, mut nb) = (0, 0);
        self.order
            .chars()
            .map(|c| {
                let n = if c == 'A' {
                    na += 1;
                    na
                } else {
                    nb += 1;
                    nb
                };
                (format!("{c}I{n}"), format!("{c}O{n}"))
            })
            .collect()
    }

    /// Slot labels of the A calls, then of the B calls.
    pub fn calls(&self, party: char) -> Vec<(String, String)> {
        let k = if party == 'A' { self.k_a() } else { self.k_b() };
        (1..=k).map(|n| (format!("{party}I{n}"), format!("{party}O{n}"))).collect()
    }

    fn past(&self) -> Vec<(String, usize)> {
        let (dc, dt, _) = self.dims();
        vec![("cI".into(), dc), ("tI".into(), dt)]
    }

    fn future(&self) -> Vec<(String, usize)> {
        let (_, _, dto) = self.dims();
        vec![("tO".into(), dto), ("cO".into(), 2)]
    }

    fn slot_specs(&self) -> Vec<Slot> {
        let d = self.target_dim;
        self.slot_labels().iter().map(|(i, o)| Slot::new((i, d), (o, d))).collect()
    }

    pub fn comb_spec(&self) -> CombSpec {
        CombSpec::new(self.past(), self.slot_specs(), self.future())
    }

    /// QC-CC over the same slots; slot x of the spec is the x-th letter of `order`.
    pub fn qccc_spec(&self) -> QcccSpec {
        QcccSpec { slots: self.slot_specs(), future: self.future() }
    }

    /// `(cI, tI, tO, cO)` with dimension 1 on discarded or fixed systems.
    pub fn output_layout(&self) -> SpaceLayout {
        let mut all = self.past();
        all.extend(self.future());
        SpaceLayout::new(&all).expect("fixed labels")
    }

    /// Layout of the comb or QC-CC component variables.
    pub fn variable_layout(&self) -> Result<SpaceLayout> {
        match self.causal_class {
            CausalClass::Comb => self.comb_spec().layout(),
            CausalClass::Qccc => {
                let mut l = self.past();
                let q = self.qccc_spec();
                for s in &q.slots {
                    l.extend(s.inputs.iter().cloned());
                    l.extend(s.outputs.iter().cloned());
                }
                l.extend(q.future.iter().cloned());
                SpaceLayout::new(&l)
            }
        }
    }

    /// Switch Choi operator the targets are built from: S, S_{+0} or Tr_tO(S_{+0}).
    pub fn effective_switch(&self) -> Result<Operator> {
        let d = self.target_dim;
        match self.restriction {
            Restriction::Full => Ok(switch_choi(d)?.operator),
            Restriction::Restricted => switch_restricted(d),
            Restriction::PartlyRestricted => switch_fixed_inputs(d),
        }
    }

    /// Tr(C) for a comb on this scenario's layout.
    pub fn normalization(&self) -> usize {
        self.comb_spec().normalization()
    }
}

/// Re-expresses `m` on `target`, whose extra labels must all have dimension 1.
pub fn embed<T: Field>(m: &LabeledMatrix<T>, target: &SpaceLayout) -> Result<LabeledMatrix<T>> {
    let mut out = m.clone();
    for (l, &d) in target.labels().iter().zip(target.dims()) {
        if !out.layout().contains(l) {
            if d != 1 {
                return Err(Error::DimensionMismatch(format!("cannot embed into `{l}` of dimension {d}")));
            }
            let one = LabeledMatrix::identity(SpaceLayout::new(&[(l.as_str(), 1)])?);
            out = out.kron(&one)?;
        }
    }
    out.aligned_to(target)
}
