use super::{components, is_quasi_tour, ReductionGraph, TourMultiset};
use crate::error::{Error, Result};

/// Closed walk using every multiset edge exactly its multiplicity
/// (Hierholzer). The first and last entries are the same vertex.
pub fn eulerian_order(g: &ReductionGraph, t: &TourMultiset) -> Result<Vec<usize>> {
    let check = is_quasi_tour(g, t)?;
    if !check.ok {
        return Err(Error::input(format!("not a quasi-tour: {:?}", check.violations.first())));
    }
    if components(g, t).1 != 1 {
        return Err(Error::input("tour is disconnected"));
    }
    // Each traversal instance becomes an arc (from, to, instance id); for
    // undirected tours an instance can be used from either end.
    let n = g.num_vertices();
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut count = 0usize;
    for (e, edge) in g.edges().iter().enumerate() {
        for _ in 0..t.fwd(e) {
            out[edge.u].push((edge.v, count));
            if !g.directed() {
                out[edge.v].push((edge.u, count));
            }
            count += 1;
        }
        for _ in 0..t.bwd(e) {
            out[edge.v].push((edge.u, count));
            count += 1;
        }
    }
    if count == 0 {
        return Ok(vec![0]);
    }
    let start = (0..n).find(|&v| !out[v].is_empty()).expect("non-empty tour");
    let mut used = vec![false; count];
    let mut next = vec![0usize; n];
    let mut stack = vec![start];
    let mut walk = Vec::with_capacity(count + 1);
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while next[v] < out[v].len() {
            let (to, id) = out[v][next[v]];
            next[v] += 1;
            if !used[id] {
                used[id] = true;
                stack.push(to);
                advanced = true;
                break;
            }
        }
        if !advanced {
            walk.push(stack.pop().expect("non-empty stack"));
        }
    }
    walk.reverse();
    if walk.len() != count + 1 {
        return Err(Error::invariant(format!("Euler walk has {} steps, tour has {count} traversals", walk.len() - 1)));
    }
    Ok(walk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Allowed;
    use crate::weight::w;
    use std::collections::HashMap;

    /// Counts each unordered (or ordered, if directed) step of the walk.
    fn step_counts(walk: &[usize], directed: bool) -> HashMap<(usize, usize), u32> {
        let mut m = HashMap::new();
        for s in walk.windows(2) {
            let key = if directed || s[0] < s[1] { (s[0], s[1]) } else { (s[1], s[0]) };
            *m.entry(key).or_default() += 1;
        }
        m
    }

    #[test]
    fn triangle_walk() {
        let mut g = ReductionGraph::new(false);
        for i in 0..3 {
            g.add_vertex(format!("{i}")).unwrap();
        }
        for i in 0..3 {
            g.add_edge(i, (i + 1) % 3, w(1), false, Allowed::Both, "").unwrap();
        }
        let mut t = g.empty_tour();
        (0..3).for_each(|e| t.add(e, 1));
        let walk = eulerian_order(&g, &t).unwrap();
        assert_eq!(walk.len(), 4);
        assert_eq!(walk[0], walk[3]);
    }

    #[test]
    fn figure_eight_uses_all_six_edges() {
        let mut g = ReductionGraph::new(false);
        for i in 0..5 {
            g.add_vertex(format!("{i}")).unwrap();
        }
        for (a, b) in [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)] {
            g.add_edge(a, b, w(1), false, Allowed::Both, "").unwrap();
        }
        let mut t = g.empty_tour();
        (0..6).for_each(|e| t.add(e, 1));
        let walk = eulerian_order(&g, &t).unwrap();
        assert_eq!(walk.len(), 7);
        assert_eq!(walk.first(), walk.last());
        let counts = step_counts(&walk, false);
        assert_eq!(counts.len(), 6);
        assert!(counts.values().all(|&c| c == 1));
    }

    #[test]
    fn directed_walk_with_both_directions() {
        let mut g = ReductionGraph::new(true);
        for i in 0..3 {
            g.add_vertex(format!("{i}")).unwrap();
        }
        let e0 = g.add_edge(0, 1, w(2), true, Allowed::Both, "").unwrap();
        let e1 = g.add_edge(1, 2, w(1), false, Allowed::Forward, "").unwrap();
        let e2 = g.add_edge(2, 0, w(1), false, Allowed::Forward, "").unwrap();
        let mut t = g.empty_tour();
        t.add_dir(e0, true, 1);
        t.add_dir(e0, false, 1);
        t.add_dir(e0, true, 1);
        t.add_dir(e1, true, 1);
        t.add_dir(e2, true, 1);
        let walk = eulerian_order(&g, &t).unwrap();
        assert_eq!(walk.len(), 6);
        let counts = step_counts(&walk, true);
        assert_eq!(counts[&(0, 1)], 2);
        assert_eq!(counts[&(1, 0)], 1);
        assert_eq!(counts[&(1, 2)], 1);
    }

    #[test]
    fn rejects_disconnected() {
        let mut g = ReductionGraph::new(false);
        for i in 0..4 {
            g.add_vertex(format!("{i}")).unwrap();
        }
        g.add_edge(0, 1, w(1), false, Allowed::Both, "").unwrap();
        g.add_edge(2, 3, w(1), false, Allowed::Both, "").unwrap();
        let mut t = g.empty_tour();
        t.add(0, 2);
        t.add(1, 2);
        assert!(eulerian_order(&g, &t).is_err());
    }
}
