//! MAX-E3-LIN2 instances: parsing, planted generation, negation balancing,
//! repetition padding, evaluation and an exhaustive optimum oracle.

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

/// Truth values indexed by `var - 1`.
pub type Assignment = Vec<bool>;

/// Largest instance `brute_opt` will enumerate.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var, negated: true }
    }

    pub fn flipped(self) -> Self {
        Literal { negated: !self.negated, ..self }
    }

    pub fn value(&self, a: &[bool]) -> bool {
        a[self.var as usize - 1] ^ self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct E3Equation {
    pub lits: [Literal; 3],
    pub rhs: bool,
}

impl E3Equation {
    pub fn new(lits: [Literal; 3], rhs: bool) -> Self {
        E3Equation { lits, rhs }
    }

    pub fn is_satisfied(&self, a: &[bool]) -> bool {
        let lhs = self.lits.iter().fold(false, |acc, l| acc ^ l.value(a));
        lhs == self.rhs
    }

    pub fn has_repeated_var(&self) -> bool {
        let [a, b, c] = self.lits.map(|l| l.var);
        a == b || a == c || b == c
    }
}

impl fmt::Display for E3Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.lits;
        write!(f, "{a} {b} {c} = {}", u8::from(self.rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E3Lin2Instance {
    num_vars: usize,
    equations: Vec<E3Equation>,
}

impl E3Lin2Instance {
    pub fn new(num_vars: usize, equations: Vec<E3Equation>) -> Result<Self> {
        for (i, eq) in equations.iter().enumerate() {
            for l in &eq.lits {
                if l.var == 0 || l.var as usize > num_vars {
                    return Err(Error::input(format!(
                        "equation {}: variable x{} outside 1..={num_vars}",
                        i + 1,
                        l.var
                    )));
                }
            }
        }
        Ok(E3Lin2Instance { num_vars, equations })
    }

    pub fn empty() -> Self {
        E3Lin2Instance { num_vars: 0, equations: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[E3Equation] {
        &self.equations
    }

    /// `d(i)`: appearances of each variable, counted with multiplicity.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_vars];
        for l in self.equations.iter().flat_map(|e| e.lits.iter()) {
            d[l.var as usize - 1] += 1;
        }
        d
    }

    pub fn negated_occurrences(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_vars];
        for l in self.equations.iter().flat_map(|e| e.lits.iter()) {
            if l.negated {
                d[l.var as usize - 1] += 1;
            }
        }
        d
    }

    /// Every variable appears negated exactly as often as unnegated.
    pub fn is_balanced(&self) -> bool {
        self.occurrences()
            .iter()
            .zip(self.negated_occurrences())
            .all(|(&d, neg)| d == 2 * neg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for eq in &self.equations {
            out.push_str(&eq.to_string());
            out.push('\n');
        }
        out
    }
}

/// Parses the line format `[-]x<k> [-]x<k> [-]x<k> = <0|1>`.
pub fn parse_e3lin2(text: &str) -> Result<E3Lin2Instance> {
    let mut equations = Vec::new();
    let mut num_vars = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| err("missing '='".into()))?;
        let rhs = match rhs.trim() {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("right-hand side must be 0 or 1, got {other:?}"))),
        };
        let lits = lhs
            .split_whitespace()
            .map(|tok| parse_literal(tok).ok_or_else(|| err(format!("bad literal {tok:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let lits: [Literal; 3] = lits
            .try_into()
            .map_err(|v: Vec<Literal>| err(format!("expected 3 literals, found {}", v.len())))?;
        for l in &lits {
            num_vars = num_vars.max(l.var as usize);
        }
        equations.push(E3Equation { lits, rhs });
    }
    E3Lin2Instance::new(num_vars, equations)
}

fn parse_literal(tok: &str) -> Option<Literal> {
    let (negated, rest) = match tok.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, tok),
    };
    let var: u32 = rest.strip_prefix('x')?.parse().ok()?;
    (var >= 1).then_some(Literal { var, negated })
}

/// Random instance with a planted assignment that violates exactly `flips`
/// equations. Each equation uses three distinct variables.
pub fn generate_planted(
    num_vars: usize,
    num_eqs: usize,
    flips: usize,
    seed: u64,
) -> Result<(E3Lin2Instance, Assignment)> {
    if num_vars < 3 {
        return Err(Error::input("generate_planted needs at least 3 variables"));
    }
    if flips > num_eqs {
        return Err(Error::input(format!("flips {flips} exceeds equation count {num_eqs}")));
    }
    let mut rng = seeded(seed, 0);
    let planted: Assignment = (0..num_vars).map(|_| rng.gen()).collect();
    let mut equations = Vec::with_capacity(num_eqs);
    for _ in 0..num_eqs {
        let vars = sample(&mut rng, num_vars, 3);
        let mut lits = [Literal::pos(1); 3];
        for (slot, v) in lits.iter_mut().zip(vars.iter()) {
            *slot = Literal { var: v as u32 + 1, negated: rng.gen() };
        }
        let lhs = lits.iter().fold(false, |acc, l| acc ^ l.value(&planted));
        equations.push(E3Equation { lits, rhs: lhs });
    }
    for i in sample(&mut rng, num_eqs, flips).iter() {
        equations[i].rhs = !equations[i].rhs;
    }
    Ok((E3Lin2Instance { num_vars, equations }, planted))
}

/// Rewrites every equation to right-hand side `b` (negating its first
/// literal when needed) and replaces it by four copies: itself plus the three
/// variants with one pair of literals additionally negated.
pub fn balance_negations(inst: &E3Lin2Instance, b: bool) -> E3Lin2Instance {
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let mut equations = Vec::with_capacity(4 * inst.equations.len());
    for eq in &inst.equations {
        let mut base = *eq;
        if base.rhs != b {
            base.lits[0] = base.lits[0].flipped();
            base.rhs = b;
        }
        equations.push(base);
        for (i, j) in PAIRS {
            let mut copy = base;
            copy.lits[i] = copy.lits[i].flipped();
            copy.lits[j] = copy.lits[j].flipped();
            equations.push(copy);
        }
    }
    E3Lin2Instance { num_vars: inst.num_vars, equations }
}

/// Each equation repeated `reps` times in place.
pub fn pad_repeat(inst: &E3Lin2Instance, reps: usize) -> Result<E3Lin2Instance> {
    if reps == 0 {
        return Err(Error::input("pad_repeat needs reps >= 1"));
    }
    let equations = inst
        .equations
        .iter()
        .flat_map(|e| std::iter::repeat_n(*e, reps))
        .collect();
    Ok(E3Lin2Instance { num_vars: inst.num_vars, equations })
}

/// Number of equations the assignment leaves unsatisfied.
pub fn eval_e3lin2(inst: &E3Lin2Instance, a: &[bool]) -> Result<usize> {
    if a.len() != inst.num_vars {
        return Err(Error::input(format!(
            "assignment has {} values, instance has {} variables",
            a.len(),
            inst.num_vars
        )));
    }
    Ok(inst.equations.iter().filter(|e| !e.is_satisfied(a)).count())
}

/// Exhaustive optimum. Ties go to the lexicographically smallest
/// assignment `(x1, x2, ...)` with `false < true`.
pub fn brute_opt_e3lin2(inst: &E3Lin2Instance) -> Result<(Assignment, usize)> {
    let nv = inst.num_vars;
    if nv > BRUTE_FORCE_MAX_VARS {
        return Err(Error::SizeGuard { what: "variable count", size: nv, limit: BRUTE_FORCE_MAX_VARS });
    }
    // x1 is the most significant bit so numeric order is lexicographic order.
    let bit = |var: u32| 1u32 << (nv - var as usize);
    let rows: Vec<(u32, u32)> = inst
        .equations
        .iter()
        .map(|e| {
            let mask = e.lits.iter().fold(0u32, |m, l| m ^ bit(l.var));
            let parity = e.lits.iter().fold(e.rhs, |p, l| p ^ l.negated);
            (mask, u32::from(parity))
        })
        .collect();
    let total: u64 = 1u64 << nv;
    const CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(CHUNK);
    let (k, mask) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut best = (usize::MAX, u64::MAX);
            for a in lo..hi {
                let a32 = a as u32;
                let unsat = rows
                    .iter()
                    .filter(|(m, p)| ((m & a32).count_ones() & 1) != *p)
                    .count();
                if unsat < best.0 {
                    best = (unsat, a);
                }
            }
            best
        })
        .reduce(|| (usize::MAX, u64::MAX), |x, y| x.min(y));
    let assignment = (1..=nv as u32).map(|v| (mask as u32) & bit(v) != 0).collect();
    Ok((assignment, k))
}
