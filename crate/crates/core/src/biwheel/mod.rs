//! Bi-wheel amplifiers: two `7n`-cycles whose positions divisible by 7 are
//! contacts, plus a random perfect matching between the checkers of the two
//! cycles.
//!
//! Vertex numbering used throughout: u-ring position `p` (1-based) is vertex
//! `p - 1`, n-ring position `p` is vertex `7n + p - 1`.

pub mod prob;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

/// Largest vertex count decided by full subset enumeration.
pub const EXHAUSTIVE_MAX_VERTICES: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "u")]
    U,
    #[serde(rename = "n")]
    N,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::U => Side::N,
            Side::N => Side::U,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::U => "u",
            Side::N => "n",
        }
    }
}

pub fn is_contact_pos(pos: usize) -> bool {
    pos.is_multiple_of(7)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WheelJson", into = "WheelJson")]
pub struct BiWheel {
    n: usize,
    seed: u64,
    /// `(u_pos, n_pos)` sorted by `u_pos`.
    matching: Vec<(usize, usize)>,
    n_partner: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct WheelJson {
    n: usize,
    seed: u64,
    matching: Vec<[usize; 2]>,
}

impl TryFrom<WheelJson> for BiWheel {
    type Error = Error;

    fn try_from(raw: WheelJson) -> Result<Self> {
        BiWheel::from_matching(raw.n, raw.seed, raw.matching.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<BiWheel> for WheelJson {
    fn from(w: BiWheel) -> Self {
        WheelJson { n: w.n, seed: w.seed, matching: w.matching.iter().map(|&(a, b)| [a, b]).collect() }
    }
}

pub fn build_biwheel(n: usize, seed: u64) -> Result<BiWheel> {
    if n < 1 {
        return Err(Error::input("bi-wheel needs n >= 1"));
    }
    let checkers: Vec<usize> = (1..=7 * n).filter(|&p| !is_contact_pos(p)).collect();
    let mut partners = checkers.clone();
    partners.shuffle(&mut seeded(seed, 0));
    BiWheel::from_matching(n, seed, checkers.into_iter().zip(partners).collect())
}

impl BiWheel {
    /// Validates that `matching` is a bijection between the checker
    /// positions of the two rings.
    pub fn from_matching(n: usize, seed: u64, mut matching: Vec<(usize, usize)>) -> Result<Self> {
        if n < 1 {
            return Err(Error::input("bi-wheel needs n >= 1"));
        }
        let len = 7 * n;
        matching.sort_unstable();
        if matching.len() != 6 * n {
            return Err(Error::input(format!("matching has {} pairs, expected {}", matching.len(), 6 * n)));
        }
        let mut n_partner = vec![0; len + 1];
        let mut u_seen = vec![false; len + 1];
        for &(a, b) in &matching {
            let ok = |p: usize| (1..=len).contains(&p) && !is_contact_pos(p);
            if !ok(a) || !ok(b) {
                return Err(Error::input(format!("matching pair ({a}, {b}) is not checker-to-checker")));
            }
            if u_seen[a] || n_partner[b] != 0 {
                return Err(Error::input(format!("matching pair ({a}, {b}) reuses a checker")));
            }
            u_seen[a] = true;
            n_partner[b] = a;
        }
        Ok(BiWheel { n, seed, matching, n_partner })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ring_len(&self) -> usize {
        7 * self.n
    }

    pub fn num_vertices(&self) -> usize {
        14 * self.n
    }

    pub fn matching(&self) -> &[(usize, usize)] {
        &self.matching
    }

    /// n-ring partner of u-ring checker `pos`.
    pub fn partner_of_u(&self, pos: usize) -> usize {
        let i = self.matching.binary_search_by_key(&pos, |&(a, _)| a).expect("u checker");
        self.matching[i].1
    }

    /// u-ring partner of n-ring checker `pos`.
    pub fn partner_of_n(&self, pos: usize) -> usize {
        let a = self.n_partner[pos];
        assert!(a != 0, "n-ring position {pos} is not a checker");
        a
    }

    pub fn partner(&self, side: Side, pos: usize) -> usize {
        match side {
            Side::U => self.partner_of_u(pos),
            Side::N => self.partner_of_n(pos),
        }
    }

    /// Successor position on a ring (wraps `7n -> 1`).
    pub fn next_pos(&self, pos: usize) -> usize {
        if pos == self.ring_len() { 1 } else { pos + 1 }
    }

    pub fn prev_pos(&self, pos: usize) -> usize {
        if pos == 1 { self.ring_len() } else { pos - 1 }
    }

    pub fn vertex(&self, side: Side, pos: usize) -> usize {
        match side {
            Side::U => pos - 1,
            Side::N => self.ring_len() + pos - 1,
        }
    }

    pub fn side_pos(&self, v: usize) -> (Side, usize) {
        let len = self.ring_len();
        if v < len { (Side::U, v + 1) } else { (Side::N, v - len + 1) }
    }

    pub fn is_contact_vertex(&self, v: usize) -> bool {
        is_contact_pos(self.side_pos(v).1)
    }

    /// Ring edges (u-ring, then n-ring), then matching edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(20 * self.n);
        for side in [Side::U, Side::N] {
            for p in 1..=self.ring_len() {
                out.push((self.vertex(side, p), self.vertex(side, self.next_pos(p))));
            }
        }
        for &(a, b) in &self.matching {
            out.push((self.vertex(Side::U, a), self.vertex(Side::N, b)));
        }
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices()];
        for (a, b) in self.edges() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.num_vertices();
        let mut adj = vec![Vec::new(); nv];
        for (a, b) in self.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &x in &adj[v] {
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `(|E(U, V\U)|, min(|U∩X|, |(V\U)∩X|))` for the vertex subset `subset`.
    pub fn cut_and_bound(&self, subset: &[usize]) -> (usize, usize) {
        let nv = self.num_vertices();
        let mut inside = vec![false; nv];
        for &v in subset {
            inside[v] = true;
        }
        let cut = self.edges().iter().filter(|&&(a, b)| inside[a] != inside[b]).count();
        let contacts_in = (0..nv).filter(|&v| inside[v] && self.is_contact_vertex(v)).count();
        (cut, contacts_in.min(2 * self.n - contacts_in))
    }

    pub fn violates(&self, subset: &[usize]) -> bool {
        let (cut, bound) = self.cut_and_bound(subset);
        cut < bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmplifierCertificate {
    /// Set only by an exhaustive scan that found no violation.
    pub verified: bool,
    pub violating_set: Option<Vec<usize>>,
    pub subsets_checked: u64,
    pub exhaustive: bool,
}

/// Decides the cut condition `|E(U, V\U)| >= min(|U∩X|, |(V\U)∩X|)`.
///
/// Wheels with at most 30 vertices are scanned exhaustively (one subset per
/// complementary pair, by leaving the last vertex out of `U`). Larger wheels
/// need `sample_budget` random subsets and can only ever report a violation.
pub fn check_amplifier(w: &BiWheel, sample_budget: Option<u64>) -> Result<AmplifierCertificate> {
    let nv = w.num_vertices();
    if nv <= EXHAUSTIVE_MAX_VERTICES {
        return Ok(exhaustive_scan(w));
    }
    match sample_budget {
        Some(budget) => Ok(sample_scan(w, budget)),
        None => Err(Error::SizeGuard { what: "exhaustive amplifier scan (vertices)", size: nv, limit: EXHAUSTIVE_MAX_VERTICES }),
    }
}

fn exhaustive_scan(w: &BiWheel) -> AmplifierCertificate {
    let nv = w.num_vertices();
    let total_contacts = 2 * w.n() as u32;
    let mut nbr = vec![0u64; nv];
    let mut deg = vec![0i64; nv];
    for (a, b) in w.edges() {
        nbr[a] |= 1 << b;
        nbr[b] |= 1 << a;
        deg[a] += 1;
        deg[b] += 1;
    }
    let contact_mask: u64 = (0..nv).filter(|&v| w.is_contact_vertex(v)).map(|v| 1u64 << v).sum();

    let free = nv - 1;
    let low = free.min(16);
    let high = free - low;

    let cut_of = |set: u64| -> i64 {
        (0..nv)
            .filter(|&v| set >> v & 1 == 1)
            .map(|v| (nbr[v] & !set).count_ones() as i64)
            .sum()
    };

    let first_violation = (0..1u64 << high)
        .into_par_iter()
        .map(|hi| {
            let mut set = hi << low;
            let mut cut = cut_of(set);
            let mut best: Option<u64> = None;
            let mut test = |set: u64, cut: i64| {
                if set == 0 {
                    return;
                }
                let cin = (set & contact_mask).count_ones();
                let bound = cin.min(total_contacts - cin) as i64;
                if cut < bound && best.is_none_or(|b| set < b) {
                    best = Some(set);
                }
            };
            test(set, cut);
            for step in 1u64..1 << low {
                let v = step.trailing_zeros() as usize;
                let bit = 1u64 << v;
                if set & bit == 0 {
                    cut += deg[v] - 2 * (nbr[v] & set).count_ones() as i64;
                    set |= bit;
                } else {
                    set &= !bit;
                    cut -= deg[v] - 2 * (nbr[v] & set).count_ones() as i64;
                }
                test(set, cut);
            }
            best
        })
        .reduce(|| None, |a, b| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        });

    AmplifierCertificate {
        verified: first_violation.is_none(),
        violating_set: first_violation.map(|set| (0..nv).filter(|&v| set >> v & 1 == 1).collect()),
        subsets_checked: (1u64 << free) - 1,
        exhaustive: true,
    }
}

fn sample_scan(w: &BiWheel, budget: u64) -> AmplifierCertificate {
    let mut rng = seeded(w.seed(), 0xA11);
    let nv = w.num_vertices();
    for _ in 0..budget {
        let subset: Vec<usize> = (0..nv).filter(|_| rng.gen::<bool>()).collect();
        if !subset.is_empty() && w.violates(&subset) {
            return AmplifierCertificate {
                verified: false,
                violating_set: Some(subset),
                subsets_checked: budget,
                exhaustive: false,
            };
        }
    }
    AmplifierCertificate { verified: false, violating_set: None, subsets_checked: budget, exhaustive: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_n1() {
        let w = build_biwheel(1, 5).unwrap();
        assert_eq!(w.num_vertices(), 14);
        let contacts = (0..14).filter(|&v| w.is_contact_vertex(v)).count();
        assert_eq!(contacts, 2);
        assert_eq!(w.matching().len(), 6);
        assert_eq!(w.edges().len(), 14 + 6);
        for (v, d) in w.degrees().into_iter().enumerate() {
            assert_eq!(d, if w.is_contact_vertex(v) { 2 } else { 3 });
        }
    }

    #[test]
    fn structure_for_larger_n() {
        for n in 1..=6 {
            for seed in 0..5 {
                let w = build_biwheel(n, seed).unwrap();
                assert_eq!(w.num_vertices(), 14 * n);
                assert_eq!(w.edges().len(), 20 * n);
                assert!(w.is_connected());
                for &(a, b) in w.matching() {
                    assert_eq!(w.partner_of_u(a), b);
                    assert_eq!(w.partner_of_n(b), a);
                }
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(build_biwheel(3, 11).unwrap(), build_biwheel(3, 11).unwrap());
        assert!(build_biwheel(0, 1).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let w = build_biwheel(2, 4).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.starts_with("{\"n\":2,\"seed\":4,\"matching\":[["));
        let back: BiWheel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<BiWheel>(r#"{"n":1,"seed":0,"matching":[[7,1]]}"#).is_err());
    }

    #[test]
    fn singletons_never_violate() {
        let w = build_biwheel(1, 0).unwrap();
        for v in 0..14 {
            let (cut, bound) = w.cut_and_bound(&[v]);
            if w.is_contact_vertex(v) {
                assert_eq!((cut, bound), (2, 1));
            } else {
                assert_eq!((cut, bound), (3, 0));
            }
        }
    }

    #[test]
    fn exhaustive_matches_direct_recount() {
        // Brute force over all subsets with the slow direct recount.
        for seed in 0..6 {
            let w = build_biwheel(1, seed).unwrap();
            let cert = check_amplifier(&w, None).unwrap();
            let mut first = None;
            for mask in 1u32..1 << 13 {
                let subset: Vec<usize> = (0..14).filter(|&v| mask >> v & 1 == 1).collect();
                if w.violates(&subset) {
                    first = Some(subset);
                    break;
                }
            }
            assert_eq!(cert.violating_set, first);
            assert_eq!(cert.verified, first.is_none());
            assert_eq!(cert.subsets_checked, (1 << 13) - 1);
        }
    }

    #[test]
    fn large_wheel_needs_budget() {
        let w = build_biwheel(3, 0).unwrap();
        assert!(matches!(check_amplifier(&w, None), Err(Error::SizeGuard { .. })));
        let cert = check_amplifier(&w, Some(200)).unwrap();
        assert!(!cert.verified);
        assert!(!cert.exhaustive);
        if let Some(u) = &cert.violating_set {
            assert!(w.violates(u));
        }
    }
}
