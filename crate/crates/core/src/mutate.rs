//! Random legal perturbations of tours, used to probe the extraction
//! inequalities on tours the constructions would never produce.
//!
//! Undirected moves: toggle the parity of every edge on a random closed
//! walk, add two copies of an edge, or remove two copies. Directed moves:
//! add a random directed cycle, or remove a cycle of used arcs. All moves
//! keep every vertex balanced; candidates that uncover a vertex or drop a
//! forced edge are discarded.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{components, is_quasi_tour, Allowed, ReductionGraph, TourMultiset};

const WALK_LIMIT: usize = 64;

/// Arcs leaving `v` as `(edge, forward, to)`.
fn out_arcs(g: &ReductionGraph, v: usize) -> Vec<(usize, bool, usize)> {
    let mut out = Vec::new();
    for &e in g.incident(v) {
        let edge = g.edge(e);
        let fwd_ok = !g.directed() || edge.allowed != Allowed::Backward;
        let bwd_ok = !g.directed() || edge.allowed != Allowed::Forward;
        if edge.u == v && fwd_ok {
            out.push((e, true, edge.v));
        }
        if edge.v == v && bwd_ok {
            out.push((e, false, edge.u));
        }
    }
    out
}

/// Random walk until a vertex repeats; returns the closed part as arcs.
fn random_cycle<R: Rng>(
    g: &ReductionGraph,
    rng: &mut R,
    mut step: impl FnMut(usize, &mut R) -> Option<(usize, bool, usize)>,
) -> Option<Vec<(usize, bool)>> {
    let start = rng.gen_range(0..g.num_vertices());
    let mut path_vertices = vec![start];
    let mut path_arcs: Vec<(usize, bool)> = Vec::new();
    for _ in 0..WALK_LIMIT {
        let v = *path_vertices.last()?;
        let (e, fwd, to) = step(v, rng)?;
        path_arcs.push((e, fwd));
        if let Some(pos) = path_vertices.iter().position(|&x| x == to) {
            return Some(path_arcs[pos..].to_vec());
        }
        path_vertices.push(to);
    }
    None
}

fn one_move<R: Rng>(g: &ReductionGraph, t: &mut TourMultiset, rng: &mut R) -> bool {
    if g.directed() {
        if rng.gen_bool(0.5) {
            let Some(cycle) = random_cycle(g, rng, |v, r| out_arcs(g, v).choose(r).copied()) else { return false };
            for (e, fwd) in cycle {
                t.add_dir(e, fwd, 1);
            }
            true
        } else {
            let snapshot = t.clone();
            let used = |v: usize| -> Vec<(usize, bool, usize)> {
                out_arcs(g, v)
                    .into_iter()
                    .filter(|&(e, fwd, _)| if fwd { snapshot.fwd(e) > 0 } else { snapshot.bwd(e) > 0 })
                    .collect()
            };
            let Some(cycle) = random_cycle(g, rng, |v, r| used(v).choose(r).copied()) else { return false };
            // A walk may reuse one arc instance; require enough copies.
            let mut need = std::collections::HashMap::new();
            for &(e, fwd) in &cycle {
                *need.entry((e, fwd)).or_insert(0u32) += 1;
            }
            if need.iter().any(|(&(e, fwd), &k)| (if fwd { t.fwd(e) } else { t.bwd(e) }) < k) {
                return false;
            }
            for (e, fwd) in cycle {
                t.remove_dir(e, fwd, 1);
            }
            true
        }
    } else {
        match rng.gen_range(0..3) {
            0 => {
                let Some(cycle) = random_cycle(g, rng, |v, r| out_arcs(g, v).choose(r).copied()) else { return false };
                let mut flips = std::collections::HashMap::new();
                for (e, _) in cycle {
                    *flips.entry(e).or_insert(0u32) += 1;
                }
                for (e, k) in flips {
                    if k % 2 == 1 {
                        if t.mult(e) > 0 {
                            t.remove_dir(e, true, 1);
                        } else {
                            t.add(e, 1);
                        }
                    }
                }
                true
            }
            1 => {
                let e = rng.gen_range(0..g.num_edges());
                t.add(e, 2);
                true
            }
            _ => {
                let heavy: Vec<usize> = (0..g.num_edges()).filter(|&e| t.mult(e) >= 2).collect();
                match heavy.choose(rng) {
                    Some(&e) => t.remove_dir(e, true, 2),
                    None => false,
                }
            }
        }
    }
}

/// Applies `moves` random moves to `base` and returns the result if it is a
/// quasi-tour using every forced edge (and, if asked, connected).
pub fn mutate_tour<R: Rng>(g: &ReductionGraph, base: &TourMultiset, rng: &mut R, moves: usize, require_connected: bool) -> Option<TourMultiset> {
    let mut t = base.clone();
    for _ in 0..moves {
        if !one_move(g, &mut t, rng) {
            return None;
        }
    }
    if g.forced_edges().any(|e| t.mult(e) == 0) {
        return None;
    }
    if !is_quasi_tour(g, &t).ok()?.ok {
        return None;
    }
    if require_connected && components(g, &t).1 != 1 {
        return None;
    }
    Some(t)
}

/// Draws up to `attempts` candidates of 1..=`max_moves` moves each and
/// keeps the legal ones.
pub fn legal_mutations<R: Rng>(
    g: &ReductionGraph,
    base: &TourMultiset,
    rng: &mut R,
    wanted: usize,
    max_moves: usize,
    require_connected: bool,
) -> Vec<TourMultiset> {
    let mut out = Vec::with_capacity(wanted);
    let mut attempts = 0;
    while out.len() < wanted && attempts < 50 * wanted {
        attempts += 1;
        let moves = rng.gen_range(1..=max_moves);
        if let Some(t) = mutate_tour(g, base, rng, moves, require_connected) {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::balance_of;
    use crate::rng::seeded;
    use crate::weight::w;

    fn k4(directed: bool) -> (ReductionGraph, TourMultiset) {
        let mut g = ReductionGraph::new(directed);
        for i in 0..4 {
            g.add_vertex(format!("{i}")).unwrap();
        }
        for i in 0..4 {
            for j in 0..4 {
                if i < j || (directed && i != j) {
                    let allowed = if directed { Allowed::Forward } else { Allowed::Both };
                    g.add_edge(i, j, w(1), false, allowed, "").unwrap();
                }
            }
        }
        let mut t = g.empty_tour();
        for i in 0..4usize {
            let j = (i + 1) % 4;
            let e = (0..g.num_edges()).find(|&e| {
                let ed = g.edge(e);
                (ed.u, ed.v) == (i, j) || (!directed && (ed.u, ed.v) == (j, i))
            });
            t.add(e.unwrap(), 1);
        }
        (g, t)
    }

    #[test]
    fn mutations_stay_balanced() {
        for directed in [false, true] {
            let (g, t) = k4(directed);
            let mut rng = seeded(1, 9);
            let muts = legal_mutations(&g, &t, &mut rng, 200, 6, false);
            assert!(muts.len() > 50);
            for m in &muts {
                for v in 0..4 {
                    assert_eq!(balance_of(&g, m, v).unwrap(), 0);
                }
            }
            assert!(muts.iter().any(|m| m != &t));
        }
    }
}
