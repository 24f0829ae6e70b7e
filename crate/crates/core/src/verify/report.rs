use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{render_profile, Decision, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "IC")]
    Ic,
    #[serde(rename = "IR")]
    Ir,
    #[serde(rename = "NB")]
    Nb,
    PaymentChar,
    Consistency,
    Semilattice,
    Monotonicity,
    #[serde(rename = "OSP")]
    Osp,
    OrderOblivious,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::Ic => "IC",
            Property::Ir => "IR",
            Property::Nb => "NB",
            Property::PaymentChar => "PaymentChar",
            Property::Consistency => "Consistency",
            Property::Semilattice => "Semilattice",
            Property::Monotonicity => "Monotonicity",
            Property::Osp => "OSP",
            Property::OrderOblivious => "OrderOblivious",
        };
        f.write_str(s)
    }
}

/// A counterexample: the profiles involved and what the mechanism did there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub agent: Option<usize>,
    pub profiles: Vec<Vec<Valuation>>,
    pub decisions: Vec<Decision>,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.agent {
            write!(f, "agent {a}: ")?;
        }
        write!(f, "{}", self.detail)?;
        for (k, p) in self.profiles.iter().enumerate() {
            write!(f, "\n    v = {}", render_profile(p))?;
            if let Some(d) = self.decisions.get(k) {
                write!(f, " -> {d}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    /// Lexicographically first counterexample, if any.
    pub witnesses: Vec<Witness>,
    pub grid: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_reports: Vec<PropertyReport>,
}

impl PropertyReport {
    pub fn new(property: Property, grid: String, witness: Option<Witness>) -> Self {
        PropertyReport {
            property,
            holds: witness.is_none(),
            witnesses: witness.into_iter().collect(),
            grid,
            sub_reports: Vec::new(),
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.holds { "holds" } else { "FAILS" };
        write!(f, "{:<14} {mark}", self.property.to_string())?;
        for w in &self.witnesses {
            write!(f, "\n  witness {w}")?;
        }
        for s in &self.sub_reports {
            let mark = if s.holds { "holds" } else { "FAILS" };
            write!(f, "\n  {:<12} {mark}", s.property.to_string())?;
            for w in &s.witnesses {
                write!(f, "\n    witness {w}")?;
            }
        }
        Ok(())
    }
}
