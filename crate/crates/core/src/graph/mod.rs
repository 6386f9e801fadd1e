//! Weighted (di)graphs with forced edges, and the quasi-tour machinery the
//! reductions are stated in.
//!
//! A quasi-tour is an edge multiset under which every vertex is balanced
//! (even degree, or in-degree = out-degree) and every vertex is covered. Its
//! cost is the weighted edge sum plus 2 per extra connected component.

mod euler;
mod expand;
mod metric;
mod tsplib;

pub use euler::eulerian_order;
pub use expand::{collapse_tour, expand_forced, expand_tour, CollapseMode, CollapseReport, Expansion};
pub use metric::{metric_closure, DistanceMatrix};
pub use tsplib::{export_tsplib, parse_tsplib, TsplibInstance, TSPLIB_MAX_NODES};

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::{self, Weight};

/// Directions an edge may be traversed in. Undirected graphs use `Both` for
/// every edge and count traversals in the forward slot only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Allowed {
    #[serde(rename = "both")]
    Both,
    #[serde(rename = "uv")]
    Forward,
    #[serde(rename = "vu")]
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    #[serde(with = "weight::serde_str")]
    pub weight: Weight,
    pub forced: bool,
    pub allowed: Allowed,
    pub tag: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionGraph {
    directed: bool,
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl ReductionGraph {
    pub fn new(directed: bool) -> Self {
        ReductionGraph { directed, ..Default::default() }
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::input(format!("duplicate vertex {name:?}")));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.adj.push(Vec::new());
        Ok(id)
    }

    /// Adds an edge; weights must be non-negative and self-loops are refused.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: Weight, forced: bool, allowed: Allowed, tag: impl Into<String>) -> Result<usize> {
        if u >= self.names.len() || v >= self.names.len() {
            return Err(Error::input(format!("edge endpoint out of range: ({u}, {v})")));
        }
        if u == v {
            return Err(Error::input(format!("self-loop at {}", self.names[u])));
        }
        if weight < Weight::zero() {
            return Err(Error::input(format!("negative weight on edge {}-{}", self.names[u], self.names[v])));
        }
        if !self.directed && allowed != Allowed::Both {
            return Err(Error::input("undirected edges cannot be direction-restricted"));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, weight, forced, allowed, tag: tag.into() });
        self.adj[u].push(id);
        self.adj[v].push(id);
        Ok(id)
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Edge ids incident to `v` (each parallel edge listed once).
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn forced_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].forced)
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn max_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).max().unwrap_or_else(Weight::zero)
    }

    /// Connectivity of the whole graph: strong for digraphs (respecting the
    /// allowed directions), plain for undirected graphs.
    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(x) = stack.pop() {
                for &e in &self.adj[x] {
                    let edge = &self.edges[e];
                    for (a, b) in self.arcs_of(edge) {
                        let (from, to) = if forward { (a, b) } else { (b, a) };
                        if from == x && !seen[to] {
                            seen[to] = true;
                            stack.push(to);
                        }
                    }
                }
            }
            seen.iter().all(|&s| s)
        };
        reach(true) && (!self.directed || reach(false))
    }

    /// Traversable `(from, to)` pairs of an edge.
    fn arcs_of(&self, e: &Edge) -> Vec<(usize, usize)> {
        match (self.directed, e.allowed) {
            (false, _) | (true, Allowed::Both) => vec![(e.u, e.v), (e.v, e.u)],
            (true, Allowed::Forward) => vec![(e.u, e.v)],
            (true, Allowed::Backward) => vec![(e.v, e.u)],
        }
    }

    pub fn empty_tour(&self) -> TourMultiset {
        TourMultiset::empty(self.directed, self.edges.len())
    }
}

/// Edge multiplicities. `fwd[e]` counts traversals `u -> v`, `bwd[e]`
/// traversals `v -> u`; undirected tours only use `fwd`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TourMultiset {
    directed: bool,
    fwd: Vec<u32>,
    bwd: Vec<u32>,
}

impl TourMultiset {
    pub fn empty(directed: bool, num_edges: usize) -> Self {
        TourMultiset { directed, fwd: vec![0; num_edges], bwd: vec![0; num_edges] }
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.iter().chain(&self.bwd).all(|&m| m == 0)
    }

    /// Total multiplicity of edge `e` over both directions.
    pub fn mult(&self, e: usize) -> u32 {
        self.fwd[e] + self.bwd[e]
    }

    pub fn fwd(&self, e: usize) -> u32 {
        self.fwd[e]
    }

    pub fn bwd(&self, e: usize) -> u32 {
        self.bwd[e]
    }

    pub fn add(&mut self, e: usize, times: u32) {
        self.fwd[e] += times;
    }

    pub fn add_dir(&mut self, e: usize, forward: bool, times: u32) {
        if forward || !self.directed {
            self.fwd[e] += times;
        } else {
            self.bwd[e] += times;
        }
    }

    pub fn set(&mut self, e: usize, fwd: u32, bwd: u32) {
        self.fwd[e] = fwd;
        self.bwd[e] = if self.directed { bwd } else { 0 };
    }

    /// Removes `times` traversals; fails if fewer are present.
    pub fn remove_dir(&mut self, e: usize, forward: bool, times: u32) -> bool {
        let slot = if forward || !self.directed { &mut self.fwd[e] } else { &mut self.bwd[e] };
        if *slot < times {
            return false;
        }
        *slot -= times;
        true
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.fwd.iter().chain(&self.bwd).map(|&m| u64::from(m)).sum()
    }

    /// Ids of edges with nonzero multiplicity.
    pub fn used(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.fwd.len()).filter(|&e| self.mult(e) > 0)
    }
}

fn check_sizes(g: &ReductionGraph, t: &TourMultiset) -> Result<()> {
    if t.len() != g.num_edges() || t.directed != g.directed {
        return Err(Error::input(format!(
            "tour ({} edges, directed={}) does not fit graph ({} edges, directed={})",
            t.len(),
            t.directed,
            g.num_edges(),
            g.directed
        )));
    }
    Ok(())
}

/// Undirected: degree parity (0 or 1). Directed: in-degree minus out-degree.
pub fn balance_of(g: &ReductionGraph, t: &TourMultiset, v: usize) -> Result<i64> {
    check_sizes(g, t)?;
    if v >= g.num_vertices() {
        return Err(Error::input(format!("unknown vertex {v}")));
    }
    Ok(balance_unchecked(g, t, v))
}

fn balance_unchecked(g: &ReductionGraph, t: &TourMultiset, v: usize) -> i64 {
    if g.directed {
        let mut bal = 0i64;
        for &e in &g.adj[v] {
            let edge = &g.edges[e];
            let (f, b) = (i64::from(t.fwd[e]), i64::from(t.bwd[e]));
            if edge.v == v {
                bal += f - b;
            }
            if edge.u == v {
                bal += b - f;
            }
        }
        bal
    } else {
        let deg: u64 = g.adj[v].iter().map(|&e| u64::from(t.fwd[e])).sum();
        (deg % 2) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    Unbalanced { vertex: String, balance: i64 },
    Uncovered { vertex: String },
    IllegalDirection { edge: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiTourCheck {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Quasi-tour predicate with every violation listed.
pub fn is_quasi_tour(g: &ReductionGraph, t: &TourMultiset) -> Result<QuasiTourCheck> {
    check_sizes(g, t)?;
    let mut violations = Vec::new();
    for (e, edge) in g.edges.iter().enumerate() {
        let bad = g.directed
            && match edge.allowed {
                Allowed::Both => false,
                Allowed::Forward => t.bwd[e] > 0,
                Allowed::Backward => t.fwd[e] > 0,
            };
        if bad {
            violations.push(Violation::IllegalDirection { edge: e });
        }
    }
    for v in 0..g.num_vertices() {
        let bal = balance_unchecked(g, t, v);
        if bal != 0 {
            violations.push(Violation::Unbalanced { vertex: g.names[v].clone(), balance: bal });
        }
        if g.adj[v].iter().all(|&e| t.mult(e) == 0) {
            violations.push(Violation::Uncovered { vertex: g.names[v].clone() });
        }
    }
    Ok(QuasiTourCheck { ok: violations.is_empty(), violations })
}

/// Component label per vertex, over edges with multiplicity >= 1 (weak
/// connectivity for digraphs). Returns `(labels, count)`; uncovered vertices
/// get their own labels but should be rejected before this matters.
pub fn components(g: &ReductionGraph, t: &TourMultiset) -> (Vec<usize>, usize) {
    let n = g.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in t.used() {
        let (a, b) = (find(&mut parent, g.edges[e].u), find(&mut parent, g.edges[e].v));
        if a != b {
            parent[a] = b;
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut roots = HashMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        let next = roots.len();
        label[v] = *roots.entry(r).or_insert(next);
    }
    let count = roots.len();
    (label, count)
}

pub fn edge_cost(g: &ReductionGraph, t: &TourMultiset) -> Weight {
    g.edges
        .iter()
        .enumerate()
        .map(|(e, edge)| edge.weight * Weight::from_integer(i64::from(t.mult(e))))
        .sum()
}

/// `sum w(e) * mult(e) + 2 (con - 1)` for a quasi-tour.
pub fn tour_cost(g: &ReductionGraph, t: &TourMultiset) -> Result<Weight> {
    let check = is_quasi_tour(g, t)?;
    if !check.ok {
        return Err(Error::input(format!("not a quasi-tour: {:?}", check.violations.first())));
    }
    let (_, con) = components(g, t);
    Ok(edge_cost(g, t) + Weight::from_integer(2 * (con as i64 - 1)))
}

/// Quasi-tour, single component, every forced edge used at least once.
pub fn is_valid_tour(g: &ReductionGraph, t: &TourMultiset) -> Result<bool> {
    let check = is_quasi_tour(g, t)?;
    Ok(check.ok && components(g, t).1 == 1 && g.forced_edges().all(|e| t.mult(e) >= 1))
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    directed: bool,
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    u: String,
    v: String,
    #[serde(with = "weight::serde_str")]
    w: Weight,
    forced: bool,
    dir: Allowed,
    tag: String,
}

#[derive(Serialize, Deserialize)]
struct TourJson {
    edges: Vec<TourEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct TourEdgeJson {
    id: usize,
    mult: u32,
    dir: Allowed,
}

impl ReductionGraph {
    pub fn to_json(&self) -> serde_json::Value {
        let raw = GraphJson {
            directed: self.directed,
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    u: self.names[e.u].clone(),
                    v: self.names[e.v].clone(),
                    w: e.weight,
                    forced: e.forced,
                    dir: e.allowed,
                    tag: e.tag.clone(),
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("graph json")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: GraphJson = serde_json::from_value(value.clone())?;
        let mut g = ReductionGraph::new(raw.directed);
        for name in raw.vertices {
            g.add_vertex(name)?;
        }
        for e in raw.edges {
            let u = g.vertex(&e.u).ok_or_else(|| Error::input(format!("unknown vertex {:?}", e.u)))?;
            let v = g.vertex(&e.v).ok_or_else(|| Error::input(format!("unknown vertex {:?}", e.v)))?;
            g.add_edge(u, v, e.w, e.forced, e.dir, e.tag)?;
        }
        Ok(g)
    }
}

impl TourMultiset {
    /// `{edges: [{id, mult, dir}]}`; undirected traversals are written with
    /// `dir: "both"`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut edges = Vec::new();
        for e in 0..self.fwd.len() {
            if self.fwd[e] > 0 {
                let dir = if self.directed { Allowed::Forward } else { Allowed::Both };
                edges.push(TourEdgeJson { id: e, mult: self.fwd[e], dir });
            }
            if self.bwd[e] > 0 {
                edges.push(TourEdgeJson { id: e, mult: self.bwd[e], dir: Allowed::Backward });
            }
        }
        serde_json::to_value(TourJson { edges }).expect("tour json")
    }

    pub fn from_json(g: &ReductionGraph, value: &serde_json::Value) -> Result<Self> {
        let raw: TourJson = serde_json::from_value(value.clone())?;
        let mut t = g.empty_tour();
        for e in raw.edges {
            if e.id >= g.num_edges() {
                return Err(Error::input(format!("tour references edge {} of {}", e.id, g.num_edges())));
            }
            match (g.directed, e.dir) {
                (false, Allowed::Both) | (true, Allowed::Forward) => t.fwd[e.id] += e.mult,
                (true, Allowed::Backward) => t.bwd[e.id] += e.mult,
                _ => return Err(Error::input(format!("edge {} has direction {:?} in a {} graph", e.id, e.dir, if g.directed { "directed" } else { "undirected" }))),
            }
        }
        Ok(t)
    }
}
