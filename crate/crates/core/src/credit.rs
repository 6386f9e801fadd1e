//! Local-cost bookkeeping shared by the two graph reductions, and the local
//! search that fixes values of dishonestly traversed variables.

use num_traits::Zero;
use serde::Serialize;

use crate::graph::TourMultiset;
use crate::hybrid::{HybridAssignment, HybridInstance};
use crate::weight::{self, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetKind {
    /// Two checkers joined by a matching equation.
    Pair,
    /// The vertex set of one size-3 equation gadget.
    Triple,
    Hub,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetCredit {
    pub kind: GadgetKind,
    pub index: usize,
    #[serde(with = "weight::serde_str")]
    pub local_cost: Weight,
    /// Local cost plus 2 per tour component lying entirely inside the set
    /// (undirected reports only; equals `local_cost` for directed ones).
    #[serde(with = "weight::serde_str")]
    pub full_local_cost: Weight,
    #[serde(with = "weight::serde_str")]
    pub baseline: Weight,
    #[serde(with = "weight::serde_str")]
    pub credit: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CreditReport {
    pub directed: bool,
    pub gadgets: Vec<GadgetCredit>,
    #[serde(with = "weight::serde_str")]
    pub total_local: Weight,
    #[serde(with = "weight::serde_str")]
    pub total_full: Weight,
    #[serde(with = "weight::serde_str")]
    pub total_credit: Weight,
    #[serde(with = "weight::serde_str")]
    pub edge_cost: Weight,
    #[serde(with = "weight::serde_str")]
    pub tour_cost: Weight,
}

impl CreditReport {
    pub(crate) fn new(directed: bool, gadgets: Vec<GadgetCredit>, edge_cost: Weight, tour_cost: Weight) -> Self {
        let total_local = gadgets.iter().map(|g| g.local_cost).sum();
        let total_full = gadgets.iter().map(|g| g.full_local_cost).sum();
        let total_credit = gadgets.iter().map(|g| g.credit).sum();
        CreditReport { directed, gadgets, total_local, total_full, total_credit, edge_cost, tour_cost }
    }

    pub fn of_kind(&self, kind: GadgetKind) -> impl Iterator<Item = &GadgetCredit> {
        self.gadgets.iter().filter(move |g| g.kind == kind)
    }

    pub fn min_credit(&self) -> Weight {
        self.gadgets.iter().map(|g| g.credit).min().unwrap_or_else(Weight::zero)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructedTour {
    #[serde(skip)]
    pub quasi_tour: TourMultiset,
    #[serde(skip)]
    pub tour: TourMultiset,
    /// Edges added twice to join components, in the order used.
    pub bridges: Vec<usize>,
    pub unsat: usize,
    pub components_before_bridging: usize,
    #[serde(with = "weight::serde_str")]
    pub edge_cost_before_bridging: Weight,
    #[serde(with = "weight::serde_str")]
    pub cost: Weight,
    #[serde(with = "weight::serde_str")]
    pub bound: Weight,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    #[serde(skip)]
    pub assignment: HybridAssignment,
    #[serde(skip)]
    pub normalized: TourMultiset,
    pub dishonest_vars: usize,
    pub unsat: usize,
    #[serde(with = "weight::serde_str")]
    pub tour_cost: Weight,
    /// Largest unsatisfied count the soundness inequality allows.
    #[serde(with = "weight::serde_str")]
    pub allowance: Weight,
    pub report: CreditReport,
}

/// Chooses values for the variables in each group (one group per gadget,
/// visited in order, each at most a few variables) by exhaustive search,
/// minimising unsatisfied equations incident to the group with everything
/// else fixed; ties go to the assignment with fewer ones. Passes repeat
/// until no group improves, so the unsatisfied count never rises.
pub(crate) fn resolve_dishonest(h: &HybridInstance, a: &mut [bool], groups: &[Vec<usize>]) {
    let incident: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| {
            let mut eqs: Vec<usize> = g.iter().flat_map(|&v| h.incidence(v).iter().copied()).collect();
            eqs.sort_unstable();
            eqs.dedup();
            eqs
        })
        .collect();
    for pass in 0..16 {
        let mut improved = false;
        for (group, eqs) in groups.iter().zip(&incident) {
            if group.is_empty() {
                continue;
            }
            let current: usize = group.iter().enumerate().map(|(i, &v)| usize::from(a[v]) << i).sum();
            let mut best = (usize::MAX, u32::MAX, usize::MAX);
            for mask in 0..1usize << group.len() {
                for (i, &v) in group.iter().enumerate() {
                    a[v] = mask >> i & 1 == 1;
                }
                let key = (h.unsat_among(a, eqs.iter().copied()), mask.count_ones(), mask);
                if key < best {
                    best = key;
                }
            }
            for (i, &v) in group.iter().enumerate() {
                a[v] = best.2 >> i & 1 == 1;
            }
            if pass > 0 && best.2 != current {
                improved = true;
            }
        }
        if pass > 0 && !improved {
            break;
        }
    }
}
