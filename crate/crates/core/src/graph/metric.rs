use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ReductionGraph;
use crate::error::{Error, Result};
use crate::weight::{self, common_scale, to_scaled, Weight};

/// Square matrix of exact distances, row-major, with one label per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    data: Vec<Weight>,
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<Weight>>) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::input(format!("{} labels for {n} rows", labels.len())));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::input(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        let data: Vec<Weight> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| *x < Weight::zero()) {
            return Err(Error::input("negative distance"));
        }
        Ok(DistanceMatrix { labels, data })
    }

    /// Rows labelled `0 .. n-1`.
    pub fn unlabeled(rows: Vec<Vec<Weight>>) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        DistanceMatrix::new(labels, rows)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.data[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[Weight] {
        let n = self.n();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// LCM of the denominators and the matrix multiplied by it.
    pub fn scaled(&self) -> (i64, Vec<i64>) {
        let scale = common_scale(self.data.iter());
        (scale, self.data.iter().map(|x| to_scaled(x, scale)).collect())
    }

    /// Cost of the closed tour visiting `order` then returning to its start.
    pub fn cycle_cost(&self, order: &[usize]) -> Weight {
        if order.len() < 2 {
            return Weight::zero();
        }
        order.iter().zip(order.iter().cycle().skip(1)).map(|(&a, &b)| self.get(a, b)).sum()
    }

    /// Submatrix on the given rows/columns, in that order.
    pub fn restrict(&self, keep: &[usize]) -> DistanceMatrix {
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let data = keep.iter().flat_map(|&i| keep.iter().map(move |&j| (i, j))).map(|(i, j)| self.get(i, j)).collect();
        DistanceMatrix { labels, data }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.n();
        let raw = MatrixJson {
            labels: self.labels.clone(),
            entries: (0..n).map(|i| self.row(i).iter().map(weight::format_weight).collect()).collect(),
        };
        serde_json::to_value(raw).expect("matrix json")
    }

    /// `{labels?, entries: [[w, ...], ...]}` with entries as integers or
    /// `"p/q"` strings.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let entries = value
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or_else(|| Error::input("matrix JSON needs an `entries` array"))?;
        let mut rows = Vec::with_capacity(entries.len());
        for row in entries {
            let row = row.as_array().ok_or_else(|| Error::input("matrix rows must be arrays"))?;
            let parsed = row
                .iter()
                .map(|x| match x {
                    serde_json::Value::Number(n) => n
                        .as_i64()
                        .map(Weight::from_integer)
                        .map_or_else(|| weight::parse_weight(&n.to_string()), Ok),
                    serde_json::Value::String(s) => weight::parse_weight(s),
                    _ => Err(Error::input("matrix entries must be numbers or strings")),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(parsed);
        }
        match value.get("labels") {
            Some(l) => DistanceMatrix::new(serde_json::from_value(l.clone())?, rows),
            None => DistanceMatrix::unlabeled(rows),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    labels: Vec<String>,
    entries: Vec<Vec<String>>,
}

/// All-pairs shortest paths by Dijkstra from every source (in parallel) on
/// weights scaled to integers. Undirected graphs must be connected, directed
/// ones strongly connected.
pub fn metric_closure(g: &ReductionGraph) -> Result<DistanceMatrix> {
    let n = g.num_vertices();
    let scale = common_scale(g.edges().iter().map(|e| &e.weight));
    let mut out: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for e in g.edges() {
        let c = to_scaled(&e.weight, scale);
        for (a, b) in g.arcs_of(e) {
            out[a].push((b, c));
        }
    }
    let rows: Vec<Vec<Option<i64>>> = (0..n).into_par_iter().map(|s| dijkstra(&out, s)).collect();
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, d) in row.into_iter().enumerate() {
            let d = d.ok_or_else(|| {
                let kind = if g.directed() { "not strongly connected" } else { "disconnected" };
                Error::input(format!("graph is {kind}: no path {} -> {}", g.name(i), g.name(j)))
            })?;
            data.push(Weight::new(d, scale));
        }
    }
    Ok(DistanceMatrix { labels: g.names().to_vec(), data })
}

fn dijkstra(out: &[Vec<(usize, i64)>], s: usize) -> Vec<Option<i64>> {
    let mut dist = vec![None; out.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(0);
    heap.push(Reverse((0i64, s)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].is_some_and(|best| d > best) {
            continue;
        }
        for &(to, c) in &out[v] {
            let nd = d + c;
            if dist[to].is_none_or(|best| nd < best) {
                dist[to] = Some(nd);
                heap.push(Reverse((nd, to)));
            }
        }
    }
    dist
}
