//! Reduction files: a graph together with the Hybrid instance (and λ) it was
//! built from, so tours and assignments can be converted later without the
//! caller keeping track of which reduction produced the graph.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::atsp::{build_ga, ga_extract_assignment, ga_local_audit, ga_tour_from_assignment, GaReduction};
use crate::credit::{ConstructedTour, CreditReport, Extraction};
use crate::error::{Error, Result};
use crate::graph::{ReductionGraph, TourMultiset};
use crate::hybrid::{extend_consistent, round_consistent, HybridAssignment, HybridInstance};
use crate::tsp::{build_gs, gs_extract_assignment, gs_local_audit, gs_tour_from_assignment, GsReduction};
use crate::weight::{self, Weight};

#[derive(Clone, Debug)]
pub enum Reduction {
    Tsp(GsReduction),
    Atsp(GaReduction),
}

impl Reduction {
    pub fn build(h: &HybridInstance, lambda: Option<Weight>) -> Result<Self> {
        match lambda {
            None => Ok(Reduction::Tsp(build_gs(h)?)),
            Some(l) => Ok(Reduction::Atsp(build_ga(h, l)?)),
        }
    }

    /// Picks the reduction matching the instance's right-hand side.
    pub fn for_hybrid(h: &HybridInstance, lambda: Weight) -> Result<Self> {
        Reduction::build(h, h.b().then_some(lambda))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Reduction::Tsp(_) => "tsp",
            Reduction::Atsp(_) => "atsp",
        }
    }

    pub fn graph(&self) -> &ReductionGraph {
        match self {
            Reduction::Tsp(r) => &r.graph,
            Reduction::Atsp(r) => &r.graph,
        }
    }

    pub fn hybrid(&self) -> &HybridInstance {
        match self {
            Reduction::Tsp(r) => &r.hybrid,
            Reduction::Atsp(r) => &r.hybrid,
        }
    }

    pub fn lambda(&self) -> Option<Weight> {
        match self {
            Reduction::Tsp(_) => None,
            Reduction::Atsp(r) => Some(r.lambda()),
        }
    }

    pub fn tour_from_assignment(&self, a: &[bool]) -> Result<ConstructedTour> {
        match self {
            Reduction::Tsp(r) => gs_tour_from_assignment(r, a),
            Reduction::Atsp(r) => ga_tour_from_assignment(r, a),
        }
    }

    pub fn extract(&self, t: &TourMultiset) -> Result<Extraction> {
        match self {
            Reduction::Tsp(r) => gs_extract_assignment(r, t),
            Reduction::Atsp(r) => ga_extract_assignment(r, t),
        }
    }

    pub fn audit(&self, t: &TourMultiset) -> Result<CreditReport> {
        match self {
            Reduction::Tsp(r) => gs_local_audit(r, t),
            Reduction::Atsp(r) => ga_local_audit(r, t),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "kind": self.kind(),
            "hybrid": self.hybrid().to_json(),
            "graph": self.graph().to_json(),
        });
        if let Some(l) = self.lambda() {
            v["lambda"] = json!(weight::format_weight(&l));
        }
        v
    }

    /// Rebuilds the reduction from the embedded Hybrid instance and checks
    /// that it reproduces the stored graph.
    pub fn from_json(value: &Value) -> Result<Self> {
        let kind = value.get("kind").and_then(Value::as_str).ok_or_else(|| Error::input("reduction file has no \"kind\""))?;
        let h = HybridInstance::from_json(value.get("hybrid").ok_or_else(|| Error::input("reduction file has no \"hybrid\""))?)?;
        let lambda = match (kind, value.get("lambda").and_then(Value::as_str)) {
            ("tsp", _) => None,
            ("atsp", Some(l)) => Some(weight::parse_weight(l)?),
            ("atsp", None) => return Err(Error::input("atsp reduction file has no \"lambda\"")),
            (k, _) => return Err(Error::input(format!("unknown reduction kind {k:?}"))),
        };
        let red = Reduction::build(&h, lambda)?;
        if let Some(g) = value.get("graph") {
            if &ReductionGraph::from_json(g)? != red.graph() {
                return Err(Error::input("stored graph differs from the one rebuilt from the Hybrid instance"));
            }
        }
        Ok(red)
    }
}

/// Assignment file: values of the original variables, of all Hybrid
/// variables (in instance order), or both.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentFile {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "bits")]
    pub original: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "bits")]
    pub hybrid: Option<Vec<bool>>,
}

mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Vec<bool>>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<u8> = x.as_deref().unwrap_or_default().iter().map(|&b| u8::from(b)).collect();
        s.serialize_some(&v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<bool>>, D::Error> {
        let raw: Option<Vec<u8>> = Option::deserialize(d)?;
        raw.map(|v| {
            v.into_iter()
                .map(|x| match x {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(serde::de::Error::custom(format!("assignment value {other} is not 0 or 1"))),
                })
                .collect()
        })
        .transpose()
    }
}

impl AssignmentFile {
    /// The consistent Hybrid assignment this file describes: the extension
    /// of the original values, or the rounded Hybrid values.
    pub fn resolve(&self, h: &HybridInstance) -> Result<HybridAssignment> {
        match (&self.hybrid, &self.original) {
            (Some(a), _) => {
                if a.len() != h.num_vars() {
                    return Err(Error::input(format!("hybrid assignment has {} values, instance has {}", a.len(), h.num_vars())));
                }
                if h.is_consistent(a) {
                    Ok(a.clone())
                } else {
                    round_consistent(h, a)
                }
            }
            (None, Some(phi)) => extend_consistent(h, phi),
            (None, None) => Err(Error::input("assignment file has neither \"original\" nor \"hybrid\" values")),
        }
    }
}
