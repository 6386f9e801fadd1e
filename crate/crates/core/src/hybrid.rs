//! Hybrid-problem instances built from negation-balanced E3-LIN2 instances.
//!
//! Each original variable `x_i` with `d(i)` appearances becomes a bi-wheel
//! with `d(i)/2` contacts per ring (`7 d(i)` wheel variables). Ring edges
//! become equality ("cycle") equations, matching edges become inequality
//! ("matching") equations, and the `j`-th unnegated / negated appearance of
//! `x_i` is replaced by the u-ring / n-ring contact at position `7j`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::biwheel::{build_biwheel, is_contact_pos, BiWheel, Side};
use crate::e3lin2::E3Lin2Instance;
use crate::error::{Error, Result};

/// Values indexed by hybrid variable id.
pub type HybridAssignment = Vec<bool>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridVariable {
    pub source_var: u32,
    pub side: Side,
    pub ring_pos: usize,
    pub is_contact: bool,
}

impl HybridVariable {
    /// External id `x.<i>.<u|n>.<pos>`.
    pub fn id(&self) -> String {
        format!("x.{}.{}.{}", self.source_var, self.side.as_str(), self.ring_pos)
    }
}

pub fn parse_var_id(id: &str) -> Option<(u32, Side, usize)> {
    let mut parts = id.split('.');
    if parts.next()? != "x" {
        return None;
    }
    let var = parts.next()?.parse().ok()?;
    let side = match parts.next()? {
        "u" => Side::U,
        "n" => Side::N,
        _ => return None,
    };
    let pos = parts.next()?.parse().ok()?;
    parts.next().is_none().then_some((var, side, pos))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationKind {
    Cycle,
    Matching,
    Size3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridEquation {
    pub kind: EquationKind,
    pub vars: Vec<usize>,
    pub rhs: bool,
}

impl HybridEquation {
    pub fn is_satisfied(&self, a: &[bool]) -> bool {
        self.vars.iter().fold(false, |acc, &v| acc ^ a[v]) == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WheelEntry {
    pub var: u32,
    pub wheel: BiWheel,
    /// Id of the u-ring position-1 variable; the wheel's variables occupy
    /// `offset .. offset + 14n` (u-ring first).
    pub offset: usize,
}

impl WheelEntry {
    pub fn var_id(&self, side: Side, pos: usize) -> usize {
        self.offset + self.wheel.vertex(side, pos)
    }

    pub fn var_range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.wheel.num_vertices()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridInstance {
    b: bool,
    wheels: Vec<WheelEntry>,
    variables: Vec<HybridVariable>,
    equations: Vec<HybridEquation>,
    incidence: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridCounts {
    pub total: usize,
    pub cycle: usize,
    pub matching: usize,
    pub size3: usize,
}

fn wheel_seed(seed: u64, var: u32) -> u64 {
    seed ^ (u64::from(var)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Builds the Hybrid instance for a balanced instance whose right-hand sides
/// all equal `b`. Variables that never appear get no wheel.
pub fn build_hybrid(inst: &E3Lin2Instance, b: bool, seed: u64) -> Result<HybridInstance> {
    if !inst.is_balanced() {
        return Err(Error::input("instance is not negation-balanced; run balance_negations first"));
    }
    for (j, eq) in inst.equations().iter().enumerate() {
        if eq.has_repeated_var() {
            return Err(Error::input(format!("equation {} repeats a variable: {eq}", j + 1)));
        }
        if eq.rhs != b {
            return Err(Error::input(format!("equation {} has right-hand side {}, expected {}", j + 1, u8::from(eq.rhs), u8::from(b))));
        }
    }
    let d = inst.occurrences();
    let mut wheels = Vec::new();
    for (i, &di) in d.iter().enumerate() {
        if di > 0 {
            let var = i as u32 + 1;
            wheels.push((var, build_biwheel(di / 2, wheel_seed(seed, var))?));
        }
    }
    let mut h = HybridInstance::skeleton(b, wheels);
    let mut seen_pos = vec![0usize; inst.num_vars()];
    let mut seen_neg = vec![0usize; inst.num_vars()];
    for eq in inst.equations() {
        let vars = eq
            .lits
            .iter()
            .map(|l| {
                let counter = if l.negated { &mut seen_neg } else { &mut seen_pos };
                counter[l.var as usize - 1] += 1;
                let side = if l.negated { Side::N } else { Side::U };
                h.var_id(l.var, side, 7 * counter[l.var as usize - 1]).expect("contact exists")
            })
            .collect();
        h.push_equation(HybridEquation { kind: EquationKind::Size3, vars, rhs: b });
    }
    h.validate()?;
    Ok(h)
}

impl HybridInstance {
    /// Wheel variables plus cycle and matching equations, no size-3 yet.
    fn skeleton(b: bool, wheels: Vec<(u32, BiWheel)>) -> Self {
        let mut h = HybridInstance { b, wheels: Vec::new(), variables: Vec::new(), equations: Vec::new(), incidence: Vec::new() };
        for (var, wheel) in wheels {
            let offset = h.variables.len();
            for side in [Side::U, Side::N] {
                for pos in 1..=wheel.ring_len() {
                    h.variables.push(HybridVariable { source_var: var, side, ring_pos: pos, is_contact: is_contact_pos(pos) });
                }
            }
            h.incidence.resize(h.variables.len(), Vec::new());
            let entry = WheelEntry { var, wheel, offset };
            for side in [Side::U, Side::N] {
                for pos in 1..=entry.wheel.ring_len() {
                    let vars = vec![entry.var_id(side, pos), entry.var_id(side, entry.wheel.next_pos(pos))];
                    h.push_equation(HybridEquation { kind: EquationKind::Cycle, vars, rhs: false });
                }
            }
            for &(a, c) in entry.wheel.matching() {
                let vars = vec![entry.var_id(Side::U, a), entry.var_id(Side::N, c)];
                h.push_equation(HybridEquation { kind: EquationKind::Matching, vars, rhs: true });
            }
            h.wheels.push(entry);
        }
        h
    }

    fn push_equation(&mut self, eq: HybridEquation) {
        let id = self.equations.len();
        for &v in &eq.vars {
            self.incidence[v].push(id);
        }
        self.equations.push(eq);
    }

    /// Structural invariants: every variable in exactly three equations,
    /// contacts in two cycle + one size-3, checkers in two cycle + one
    /// matching, size-3 equations on contacts of three distinct wheels, and
    /// the 31m / 21m / 9m / m split.
    pub fn validate(&self) -> Result<()> {
        for (v, eqs) in self.incidence.iter().enumerate() {
            let kinds: Vec<EquationKind> = eqs.iter().map(|&e| self.equations[e].kind).collect();
            let cycles = kinds.iter().filter(|&&k| k == EquationKind::Cycle).count();
            let other = if self.variables[v].is_contact { EquationKind::Size3 } else { EquationKind::Matching };
            let others = kinds.iter().filter(|&&k| k == other).count();
            if eqs.len() != 3 || cycles != 2 || others != 1 {
                return Err(Error::invariant(format!("variable {} occurs in {kinds:?}", self.variables[v].id())));
            }
        }
        for eq in &self.equations {
            if eq.kind == EquationKind::Size3 {
                let wheels: Vec<u32> = eq.vars.iter().map(|&v| self.variables[v].source_var).collect();
                if wheels[0] == wheels[1] || wheels[0] == wheels[2] || wheels[1] == wheels[2] {
                    return Err(Error::invariant("size-3 equation uses one wheel twice"));
                }
            }
        }
        let c = self.counts();
        if c.total != 31 * c.size3 || c.cycle != 21 * c.size3 || c.matching != 9 * c.size3 {
            return Err(Error::invariant(format!("equation counts {c:?} are not (31m, 21m, 9m, m)")));
        }
        Ok(())
    }

    pub fn b(&self) -> bool {
        self.b
    }

    /// Number of size-3 equations.
    pub fn m(&self) -> usize {
        self.equations.iter().filter(|e| e.kind == EquationKind::Size3).count()
    }

    pub fn wheels(&self) -> &[WheelEntry] {
        &self.wheels
    }

    pub fn variables(&self) -> &[HybridVariable] {
        &self.variables
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn equations(&self) -> &[HybridEquation] {
        &self.equations
    }

    /// Equation ids containing variable `v`.
    pub fn incidence(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn wheel(&self, var: u32) -> Option<&WheelEntry> {
        self.wheels.binary_search_by_key(&var, |w| w.var).ok().map(|i| &self.wheels[i])
    }

    pub fn wheel_index_of(&self, v: usize) -> usize {
        self.wheels.partition_point(|w| w.offset <= v) - 1
    }

    pub fn var_id(&self, var: u32, side: Side, pos: usize) -> Option<usize> {
        let w = self.wheel(var)?;
        (1..=w.wheel.ring_len()).contains(&pos).then(|| w.var_id(side, pos))
    }

    pub fn var_by_name(&self, id: &str) -> Option<usize> {
        let (var, side, pos) = parse_var_id(id)?;
        self.var_id(var, side, pos)
    }

    pub fn size3_equations(&self) -> impl Iterator<Item = (usize, &HybridEquation)> {
        self.equations.iter().enumerate().filter(|(_, e)| e.kind == EquationKind::Size3)
    }

    pub fn counts(&self) -> HybridCounts {
        hybrid_counts(self)
    }

    /// Each wheel's u-ring value if `a` is consistent on every wheel.
    pub fn consistent_values(&self, a: &[bool]) -> Option<Vec<bool>> {
        self.wheels
            .iter()
            .map(|w| {
                let beta = a[w.var_id(Side::U, 1)];
                let ok = (1..=w.wheel.ring_len())
                    .all(|p| a[w.var_id(Side::U, p)] == beta && a[w.var_id(Side::N, p)] != beta);
                ok.then_some(beta)
            })
            .collect()
    }

    pub fn is_consistent(&self, a: &[bool]) -> bool {
        a.len() == self.num_vars() && self.consistent_values(a).is_some()
    }

    /// Number of unsatisfied equations among the given ids.
    pub fn unsat_among(&self, a: &[bool], eqs: impl IntoIterator<Item = usize>) -> usize {
        eqs.into_iter().filter(|&e| !self.equations[e].is_satisfied(a)).count()
    }
}

pub fn hybrid_counts(h: &HybridInstance) -> HybridCounts {
    let mut c = HybridCounts { total: h.equations.len(), cycle: 0, matching: 0, size3: 0 };
    for e in &h.equations {
        match e.kind {
            EquationKind::Cycle => c.cycle += 1,
            EquationKind::Matching => c.matching += 1,
            EquationKind::Size3 => c.size3 += 1,
        }
    }
    c
}

pub fn eval_hybrid(h: &HybridInstance, a: &[bool]) -> Result<usize> {
    if a.len() != h.num_vars() {
        return Err(Error::input(format!("assignment has {} entries, instance has {} variables", a.len(), h.num_vars())));
    }
    Ok(h.equations.iter().filter(|e| !e.is_satisfied(a)).count())
}

/// `x^{u,i}_j = phi(i)` and `x^{n,i}_j = 1 - phi(i)` on every wheel.
pub fn extend_consistent(h: &HybridInstance, phi: &[bool]) -> Result<HybridAssignment> {
    let mut a = vec![false; h.num_vars()];
    for w in &h.wheels {
        let value = *phi
            .get(w.var as usize - 1)
            .ok_or_else(|| Error::input(format!("assignment has no value for x{}", w.var)))?;
        for pos in 1..=w.wheel.ring_len() {
            a[w.var_id(Side::U, pos)] = value;
            a[w.var_id(Side::N, pos)] = !value;
        }
    }
    Ok(a)
}

/// Original-variable values read off a consistent assignment.
pub fn project_consistent(h: &HybridInstance, a: &[bool], num_vars: usize) -> Result<Vec<bool>> {
    let values = h.consistent_values(a).ok_or_else(|| Error::input("assignment is not consistent"))?;
    let mut phi = vec![false; num_vars];
    for (w, v) in h.wheels.iter().zip(values) {
        phi[w.var as usize - 1] = v;
    }
    Ok(phi)
}

/// Makes every wheel consistent. Wheels are visited once in variable order;
/// each takes whichever consistent completion leaves fewer unsatisfied
/// equations given the current values elsewhere (ties: agree with the
/// majority of the wheel's current values, then u-ring = 1). Fails with an
/// invariant error if the result is worse than the input, which can only
/// happen when some wheel is not an amplifier.
pub fn round_consistent(h: &HybridInstance, a: &[bool]) -> Result<HybridAssignment> {
    let before = eval_hybrid(h, a)?;
    let mut out = a.to_vec();
    for w in &h.wheels {
        let range = w.var_range();
        let touched: Vec<usize> = {
            let mut t: Vec<usize> = range.clone().flat_map(|v| h.incidence[v].iter().copied()).collect();
            t.sort_unstable();
            t.dedup();
            t
        };
        let agree_with = |beta: bool, out: &[bool]| {
            (1..=w.wheel.ring_len())
                .map(|p| usize::from(out[w.var_id(Side::U, p)] == beta) + usize::from(out[w.var_id(Side::N, p)] != beta))
                .sum::<usize>()
        };
        let score = |beta: bool, out: &mut Vec<bool>| {
            let agree = agree_with(beta, out);
            let saved: Vec<bool> = out[range.clone()].to_vec();
            for p in 1..=w.wheel.ring_len() {
                out[w.var_id(Side::U, p)] = beta;
                out[w.var_id(Side::N, p)] = !beta;
            }
            let unsat = h.unsat_among(out, touched.iter().copied());
            out[range.clone()].copy_from_slice(&saved);
            (unsat, std::cmp::Reverse(agree), std::cmp::Reverse(beta))
        };
        let s1 = score(true, &mut out);
        let s0 = score(false, &mut out);
        let beta = s1 <= s0;
        for p in 1..=w.wheel.ring_len() {
            out[w.var_id(Side::U, p)] = beta;
            out[w.var_id(Side::N, p)] = !beta;
        }
    }
    let after = eval_hybrid(h, &out)?;
    if after > before {
        return Err(Error::invariant(format!("rounding to a consistent assignment raised unsat from {before} to {after}")));
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct HybridJson {
    b: u8,
    m: usize,
    wheels: BTreeMap<String, BiWheel>,
    equations: Vec<EquationJson>,
}

#[derive(Serialize, Deserialize, PartialEq)]
struct EquationJson {
    kind: EquationKind,
    vars: Vec<String>,
    rhs: u8,
}

impl HybridInstance {
    pub fn to_json(&self) -> serde_json::Value {
        let mut wheels: Vec<(u32, &BiWheel)> = self.wheels.iter().map(|w| (w.var, &w.wheel)).collect();
        wheels.sort_by_key(|(v, _)| *v);
        let raw = HybridJson {
            b: u8::from(self.b),
            m: self.m(),
            wheels: wheels.into_iter().map(|(v, w)| (v.to_string(), w.clone())).collect(),
            equations: self
                .equations
                .iter()
                .map(|e| EquationJson {
                    kind: e.kind,
                    vars: e.vars.iter().map(|&v| self.variables[v].id()).collect(),
                    rhs: u8::from(e.rhs),
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("hybrid json")
    }

    /// Rebuilds from JSON; the wheel-derived equations are regenerated and
    /// must match the listed ones exactly.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: HybridJson = serde_json::from_value(value.clone())?;
        let b = match raw.b {
            0 => false,
            1 => true,
            x => return Err(Error::input(format!("b must be 0 or 1, got {x}"))),
        };
        let mut wheels = Vec::new();
        for (k, w) in raw.wheels {
            let var: u32 = k.parse().map_err(|_| Error::input(format!("bad wheel key {k:?}")))?;
            wheels.push((var, w));
        }
        wheels.sort_by_key(|(v, _)| *v);
        let mut h = HybridInstance::skeleton(b, wheels);
        let fixed = h.equations.len();
        if raw.equations.len() < fixed {
            return Err(Error::input("equation list shorter than the wheels require"));
        }
        for (i, e) in raw.equations.iter().enumerate() {
            let vars = e
                .vars
                .iter()
                .map(|id| h.var_by_name(id).ok_or_else(|| Error::input(format!("unknown variable {id:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let eq = HybridEquation { kind: e.kind, vars, rhs: e.rhs == 1 };
            if i < fixed {
                if h.equations[i] != eq {
                    return Err(Error::input(format!("equation {i} does not match the wheel structure")));
                }
            } else {
                if eq.kind != EquationKind::Size3 || eq.vars.len() != 3 || eq.rhs != b {
                    return Err(Error::input(format!("equation {i} must be a size-3 equation with rhs {}", u8::from(b))));
                }
                h.push_equation(eq);
            }
        }
        h.validate()?;
        if h.m() != raw.m {
            return Err(Error::input(format!("m is {} but {} size-3 equations are listed", raw.m, h.m())));
        }
        Ok(h)
    }
}
