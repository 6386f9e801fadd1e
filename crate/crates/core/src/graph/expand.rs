use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{ReductionGraph, TourMultiset};
use crate::error::{Error, Result};
use crate::weight::Weight;

/// A graph whose forced edges were replaced by `L`-edge paths, with the map
/// from each original edge to its replacement edges (one id for unforced
/// edges, `L` ids in path order for forced ones).
#[derive(Clone, Debug)]
pub struct Expansion {
    pub graph: ReductionGraph,
    pub edge_map: Vec<Vec<usize>>,
    pub l: usize,
}

/// Replaces every forced edge of weight `w` by a path of `L` edges of weight
/// `w / L` through `L - 1` new vertices named `pe<edge>.<k>`. Direction
/// restrictions carry over to every path edge.
pub fn expand_forced(g: &ReductionGraph, l: usize) -> Result<Expansion> {
    if l < 2 {
        return Err(Error::input(format!("path length L must be >= 2, got {l}")));
    }
    let mut out = ReductionGraph::new(g.directed());
    for name in g.names() {
        out.add_vertex(name.clone())?;
    }
    let mut edge_map = Vec::with_capacity(g.num_edges());
    for (e, edge) in g.edges().iter().enumerate() {
        if !edge.forced {
            let id = out.add_edge(edge.u, edge.v, edge.weight, false, edge.allowed, edge.tag.clone())?;
            edge_map.push(vec![id]);
            continue;
        }
        let piece = edge.weight / Weight::from_integer(l as i64);
        let mut prev = edge.u;
        let mut ids = Vec::with_capacity(l);
        for k in 1..=l {
            let next = if k == l { edge.v } else { out.add_vertex(format!("pe{e}.{k}"))? };
            ids.push(out.add_edge(prev, next, piece, false, edge.allowed, edge.tag.clone())?);
            prev = next;
        }
        edge_map.push(ids);
    }
    Ok(Expansion { graph: out, edge_map, l })
}

/// Copies each original multiplicity onto every edge of its path; the cost
/// is unchanged exactly.
pub fn expand_tour(exp: &Expansion, t: &TourMultiset) -> Result<TourMultiset> {
    if t.len() != exp.edge_map.len() {
        return Err(Error::input("tour does not match the expanded graph's source"));
    }
    let mut out = exp.graph.empty_tour();
    for (e, ids) in exp.edge_map.iter().enumerate() {
        for &id in ids {
            out.set(id, t.fwd(e), t.bwd(e));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollapseMode {
    /// Every path must be traversed uniformly.
    Strict,
    /// Non-uniform paths are padded up to their maximum multiplicity, which
    /// adds two copies of each under-used path edge.
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapseReport {
    pub repaired_paths: Vec<usize>,
    #[serde(with = "crate::weight::serde_str")]
    pub added_cost: Weight,
}

/// Maps a tour on the expanded graph back to the original graph.
pub fn collapse_tour(exp: &Expansion, t: &TourMultiset, mode: CollapseMode) -> Result<(TourMultiset, CollapseReport)> {
    if t.len() != exp.graph.num_edges() {
        return Err(Error::input("tour does not match the expanded graph"));
    }
    let mut out = TourMultiset::empty(exp.graph.directed(), exp.edge_map.len());
    let mut report = CollapseReport { repaired_paths: Vec::new(), added_cost: Weight::zero() };
    for (e, ids) in exp.edge_map.iter().enumerate() {
        let max_f = ids.iter().map(|&i| t.fwd(i)).max().unwrap_or(0);
        let max_b = ids.iter().map(|&i| t.bwd(i)).max().unwrap_or(0);
        let uniform = ids.iter().all(|&i| t.fwd(i) == max_f && t.bwd(i) == max_b);
        if !uniform {
            if mode == CollapseMode::Strict {
                return Err(Error::input(format!("forced path of edge {e} is not traversed uniformly (strict mode)")));
            }
            report.repaired_paths.push(e);
            for &i in ids {
                let missing = (max_f - t.fwd(i)) + (max_b - t.bwd(i));
                report.added_cost += exp.graph.edge(i).weight * Weight::from_integer(i64::from(missing));
            }
        }
        out.set(e, max_f, max_b);
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{edge_cost, is_quasi_tour, tour_cost, Allowed};
    use crate::weight::{frac, w};

    fn forced_square() -> ReductionGraph {
        let mut g = ReductionGraph::new(false);
        for i in 0..4 {
            g.add_vertex(format!("v{i}")).unwrap();
        }
        g.add_edge(0, 1, w(2), true, Allowed::Both, "f").unwrap();
        g.add_edge(1, 2, w(1), false, Allowed::Both, "s").unwrap();
        g.add_edge(2, 3, frac(3, 2), true, Allowed::Both, "f").unwrap();
        g.add_edge(3, 0, w(1), false, Allowed::Both, "s").unwrap();
        g
    }

    #[test]
    fn weight_two_edge_with_l4() {
        let mut g = ReductionGraph::new(false);
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge(0, 1, w(2), true, Allowed::Both, "f").unwrap();
        let exp = expand_forced(&g, 4).unwrap();
        assert_eq!(exp.graph.num_vertices(), 5);
        assert_eq!(exp.graph.num_edges(), 4);
        assert!(exp.graph.edges().iter().all(|e| e.weight == frac(1, 2) && !e.forced));
    }

    #[test]
    fn no_forced_edges_is_identity() {
        let mut g = ReductionGraph::new(false);
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge(0, 1, w(1), false, Allowed::Both, "s").unwrap();
        let exp = expand_forced(&g, 10).unwrap();
        assert_eq!(exp.graph, g);
        assert!(expand_forced(&g, 1).is_err());
    }

    #[test]
    fn total_weight_preserved_and_tours_map_exactly() {
        let g = forced_square();
        let exp = expand_forced(&g, 10).unwrap();
        assert_eq!(exp.graph.total_weight(), g.total_weight());
        let mut t = g.empty_tour();
        (0..4).for_each(|e| t.add(e, 1));
        let te = expand_tour(&exp, &t).unwrap();
        assert!(is_quasi_tour(&exp.graph, &te).unwrap().ok);
        assert_eq!(tour_cost(&exp.graph, &te).unwrap(), tour_cost(&g, &t).unwrap());
        let (back, rep) = collapse_tour(&exp, &te, CollapseMode::Strict).unwrap();
        assert_eq!(back, t);
        assert!(rep.repaired_paths.is_empty());
    }

    #[test]
    fn lenient_repairs_a_skipped_path_edge() {
        let g = forced_square();
        let exp = expand_forced(&g, 4).unwrap();
        let mut t = g.empty_tour();
        t.add(0, 2);
        t.add(1, 1);
        t.add(2, 1);
        t.add(3, 1);
        let mut te = expand_tour(&exp, &t).unwrap();
        // Walk the first path in from both ends, skipping its middle edge.
        let mid = exp.edge_map[0][1];
        te.remove_dir(mid, true, 2);
        assert!(collapse_tour(&exp, &te, CollapseMode::Strict).is_err());
        let (back, rep) = collapse_tour(&exp, &te, CollapseMode::Lenient).unwrap();
        assert_eq!(back, t);
        assert_eq!(rep.repaired_paths, vec![0]);
        assert_eq!(rep.added_cost, w(1));
        assert_eq!(edge_cost(&exp.graph, &te) + rep.added_cost, edge_cost(&g, &back));
    }

    #[test]
    fn directed_restriction_carries_over() {
        let mut g = ReductionGraph::new(true);
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge(0, 1, frac(1, 8), true, Allowed::Forward, "lam").unwrap();
        let exp = expand_forced(&g, 3).unwrap();
        assert!(exp.graph.edges().iter().all(|e| e.allowed == Allowed::Forward));
        assert_eq!(exp.graph.edges()[0].weight, frac(1, 24));
    }
}
