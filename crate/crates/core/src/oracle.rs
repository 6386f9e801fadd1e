//! Exact Hamiltonian-cycle solvers for small complete matrices, used as
//! independent ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;
use crate::weight::{self, Weight};

pub const HELD_KARP_MAX: usize = 18;
pub const BRUTE_FORCE_MAX: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    HeldKarp,
    BrutePermutation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactTourResult {
    #[serde(with = "weight::serde_str")]
    pub cost: Weight,
    /// Visiting order starting at city 0; the return edge is implicit.
    pub ordering: Vec<usize>,
    pub method: OracleMethod,
}

fn trivial(m: &DistanceMatrix, method: OracleMethod) -> Option<ExactTourResult> {
    match m.n() {
        0 => Some(ExactTourResult { cost: Weight::from_integer(0), ordering: vec![], method }),
        1 => Some(ExactTourResult { cost: Weight::from_integer(0), ordering: vec![0], method }),
        _ => None,
    }
}

/// Subset dynamic program over integer-scaled distances.
pub fn held_karp(m: &DistanceMatrix) -> Result<ExactTourResult> {
    let n = m.n();
    if n > HELD_KARP_MAX {
        return Err(Error::SizeGuard { what: "Held-Karp instance", size: n, limit: HELD_KARP_MAX });
    }
    if let Some(r) = trivial(m, OracleMethod::HeldKarp) {
        return Ok(r);
    }
    let (scale, d) = m.scaled();
    let k = n - 1;
    let full = 1usize << k;
    // best[mask * k + j]: shortest path from 0 through `mask` (cities 1..n
    // as bits 0..k) ending at city j+1.
    let mut best = vec![i64::MAX; full * k];
    let mut prev = vec![u8::MAX; full * k];
    for j in 0..k {
        best[(1 << j) * k + j] = d[j + 1];
    }
    for mask in 1..full {
        for j in 0..k {
            let cur = best[mask * k + j];
            if mask >> j & 1 == 0 || cur == i64::MAX {
                continue;
            }
            let mut rest = !mask & (full - 1);
            while rest != 0 {
                let nxt = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let cand = cur + d[(j + 1) * n + nxt + 1];
                let slot = (mask | 1 << nxt) * k + nxt;
                if cand < best[slot] {
                    best[slot] = cand;
                    prev[slot] = j as u8;
                }
            }
        }
    }
    let last_mask = full - 1;
    let (mut end, mut total) = (0, i64::MAX);
    for j in 0..k {
        let c = best[last_mask * k + j] + d[(j + 1) * n];
        if c < total {
            total = c;
            end = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut j) = (last_mask, end);
    loop {
        order.push(j + 1);
        let p = prev[mask * k + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    Ok(ExactTourResult { cost: Weight::new(total, scale), ordering: order, method: OracleMethod::HeldKarp })
}

/// Exhaustive search over orderings with city 0 fixed; symmetric matrices
/// skip each ordering's reversal.
pub fn brute_permutation(m: &DistanceMatrix) -> Result<ExactTourResult> {
    let n = m.n();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::SizeGuard { what: "brute-force instance", size: n, limit: BRUTE_FORCE_MAX });
    }
    if let Some(r) = trivial(m, OracleMethod::BrutePermutation) {
        return Ok(r);
    }
    let (scale, d) = m.scaled();
    let symmetric = m.is_symmetric();
    let mut perm: Vec<usize> = (1..n).collect();
    let mut best = (i64::MAX, perm.clone());
    loop {
        if !symmetric || perm.first() < perm.last() || perm.len() == 1 {
            let mut c = d[perm[0]] + d[perm[perm.len() - 1] * n];
            for s in perm.windows(2) {
                c += d[s[0] * n + s[1]];
            }
            if c < best.0 {
                best = (c, perm.clone());
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut ordering = vec![0];
    ordering.extend(best.1);
    Ok(ExactTourResult { cost: Weight::new(best.0, scale), ordering, method: OracleMethod::BrutePermutation })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Keeps the first visit of every vertex of a closed walk (shortcutting).
pub fn shortcut(walk: &[usize], n: usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    walk.iter().copied().filter(|&v| !std::mem::replace(&mut seen[v], true)).collect()
}
