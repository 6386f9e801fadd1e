//! Undirected reduction: Hybrid instance (right-hand side 0) to a graph
//! whose short tours encode good assignments.
//!
//! Wheel variables become vertices. A cycle equation is a unit simple edge,
//! a matching equation two parallel forced edges of weight 2. Each size-3
//! equation on contacts `x, y, z` gets vertices `γ^l, γ^r` per contact and
//! `e^l, e^r`, forced edges `{γ^l, γ}`, `{γ^r, γ}` (3/2) and `{e^l, s}`,
//! `{e^r, s}` (1/2) to a shared hub `s`, and simple unit edges
//! `{γ^l, γ^r}`, `{e^l, γ^l}`, `{e^r, γ^r}`.

use num_traits::Zero;

use crate::credit::{resolve_dishonest, ConstructedTour, CreditReport, Extraction, GadgetCredit, GadgetKind};
use crate::error::{Error, Result};
use crate::graph::{components, edge_cost, is_quasi_tour, is_valid_tour, tour_cost, Allowed, ReductionGraph, TourMultiset};
use crate::hybrid::{eval_hybrid, EquationKind, HybridInstance};
use crate::weight::{frac, w, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGadget {
    /// Matching equation id in the Hybrid instance.
    pub equation: usize,
    pub u_var: usize,
    pub n_var: usize,
    pub forced: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleGadget {
    /// Size-3 equation id in the Hybrid instance.
    pub equation: usize,
    /// Contact variables (= graph vertices) in equation order.
    pub contacts: [usize; 3],
    pub left: [usize; 3],
    pub right: [usize; 3],
    pub e_left: usize,
    pub e_right: usize,
    /// `[{γ^l, γ}, {γ^r, γ}]` per contact.
    pub contact_forced: [[usize; 2]; 3],
    /// `[{e^l, s}, {e^r, s}]`.
    pub hub_forced: [usize; 2],
    /// `{γ^l, γ^r}` per contact.
    pub across: [usize; 3],
    /// `[{e^l, γ^l}, {e^r, γ^r}]` per contact.
    pub to_e: [[usize; 2]; 3],
}

impl TripleGadget {
    pub fn vertices(&self) -> Vec<usize> {
        let mut v = self.contacts.to_vec();
        v.extend(self.left);
        v.extend(self.right);
        v.extend([self.e_left, self.e_right]);
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsIndex {
    pub hub: usize,
    pub pairs: Vec<PairGadget>,
    pub triples: Vec<TripleGadget>,
    /// Graph edge for each cycle equation (`None` for other kinds).
    pub cycle_edge: Vec<Option<usize>>,
    /// Gadget owning each vertex: pairs first, then triples, then the hub.
    pub owner: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct GsReduction {
    pub graph: ReductionGraph,
    pub index: GsIndex,
    pub hybrid: HybridInstance,
}

const PAIR_BASELINE: (i64, i64) = (5, 1);
const TRIPLE_BASELINE: (i64, i64) = (31, 2);

pub fn build_gs(h: &HybridInstance) -> Result<GsReduction> {
    if h.b() {
        return Err(Error::input("the undirected reduction needs a Hybrid instance with right-hand side 0"));
    }
    let mut g = ReductionGraph::new(false);
    for v in h.variables() {
        g.add_vertex(v.id())?;
    }
    let hub = g.add_vertex("s")?;
    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    let mut cycle_edge = vec![None; h.equations().len()];
    for (id, eq) in h.equations().iter().enumerate() {
        match eq.kind {
            EquationKind::Cycle => {
                let tag = format!("cycle.{}", h.variables()[eq.vars[0]].source_var);
                cycle_edge[id] = Some(g.add_edge(eq.vars[0], eq.vars[1], w(1), false, Allowed::Both, tag)?);
            }
            EquationKind::Matching => {
                let tag = format!("pair.{}", pairs.len());
                let f0 = g.add_edge(eq.vars[0], eq.vars[1], w(2), true, Allowed::Both, tag.clone())?;
                let f1 = g.add_edge(eq.vars[0], eq.vars[1], w(2), true, Allowed::Both, tag)?;
                pairs.push(PairGadget { equation: id, u_var: eq.vars[0], n_var: eq.vars[1], forced: [f0, f1] });
            }
            EquationKind::Size3 => {
                let j = triples.len();
                let tag = format!("eq3.{j}");
                let names = ["x", "y", "z"];
                let mut left = [0; 3];
                let mut right = [0; 3];
                for p in 0..3 {
                    left[p] = g.add_vertex(format!("q{j}.{}.l", names[p]))?;
                    right[p] = g.add_vertex(format!("q{j}.{}.r", names[p]))?;
                }
                let e_left = g.add_vertex(format!("q{j}.e.l"))?;
                let e_right = g.add_vertex(format!("q{j}.e.r"))?;
                let contacts = [eq.vars[0], eq.vars[1], eq.vars[2]];
                let mut contact_forced = [[0; 2]; 3];
                for p in 0..3 {
                    contact_forced[p] = [
                        g.add_edge(left[p], contacts[p], frac(3, 2), true, Allowed::Both, tag.clone())?,
                        g.add_edge(right[p], contacts[p], frac(3, 2), true, Allowed::Both, tag.clone())?,
                    ];
                }
                let hub_forced = [
                    g.add_edge(e_left, hub, frac(1, 2), true, Allowed::Both, tag.clone())?,
                    g.add_edge(e_right, hub, frac(1, 2), true, Allowed::Both, tag.clone())?,
                ];
                let mut across = [0; 3];
                let mut to_e = [[0; 2]; 3];
                for p in 0..3 {
                    across[p] = g.add_edge(left[p], right[p], w(1), false, Allowed::Both, tag.clone())?;
                }
                for p in 0..3 {
                    to_e[p] = [
                        g.add_edge(e_left, left[p], w(1), false, Allowed::Both, tag.clone())?,
                        g.add_edge(e_right, right[p], w(1), false, Allowed::Both, tag.clone())?,
                    ];
                }
                triples.push(TripleGadget { equation: id, contacts, left, right, e_left, e_right, contact_forced, hub_forced, across, to_e });
            }
        }
    }
    let mut owner = vec![usize::MAX; g.num_vertices()];
    for (k, p) in pairs.iter().enumerate() {
        owner[p.u_var] = k;
        owner[p.n_var] = k;
    }
    for (k, t) in triples.iter().enumerate() {
        for v in t.vertices() {
            owner[v] = pairs.len() + k;
        }
    }
    owner[hub] = pairs.len() + triples.len();
    if owner.contains(&usize::MAX) {
        return Err(Error::invariant("gadget sets do not cover every vertex"));
    }
    let index = GsIndex { hub, pairs, triples, cycle_edge, owner };
    Ok(GsReduction { graph: g, index, hybrid: h.clone() })
}

/// Closed-form `(vertices, forced edges)`: one vertex per Hybrid variable
/// (`7 Σ d(i)`), eight per size-3 equation, the hub; `2 · 9m + 8m` forced.
pub fn expected_gs_counts(h: &HybridInstance) -> (usize, usize) {
    let m = h.m();
    (h.num_vars() + 8 * m + 1, 26 * m)
}

impl GsReduction {
    pub fn m(&self) -> usize {
        self.index.triples.len()
    }

    /// Number of wheels (original variables that occur).
    pub fn nu(&self) -> usize {
        self.hybrid.wheels().len()
    }

    /// `61m + 2ν + k + 2`.
    pub fn completeness_bound(&self, k: usize) -> Weight {
        w((61 * self.m() + 2 * self.nu() + k + 2) as i64)
    }

    /// Largest unsatisfied count the soundness inequality allows for a
    /// quasi-tour of the given cost: `cost - 61m + 2`.
    pub fn soundness_allowance(&self, cost: Weight) -> Weight {
        cost - w(61 * self.m() as i64) + w(2)
    }
}

/// Which contacts of a size-3 gadget are routed through `e^l, e^r` (the rest
/// use their `{γ^l, γ^r}` edge), given the contact values.
fn triple_route(vals: [bool; 3]) -> [bool; 3] {
    match vals.iter().filter(|&&x| x).count() {
        0 | 1 => [true; 3],
        2 => vals.map(|x| !x),
        _ => [true, false, false],
    }
}

/// One size-3 gadget on its own: contacts `x, y, z`, their side vertices,
/// `e^l, e^r` and the hub, with each contact joined to the hub by a
/// zero-weight edge standing in for its wheel ring. Returns the graph and
/// the case traversal for `vals`, where a contact of value 1 uses its
/// return edge twice. Vertex order: x, y, z, s, then the gadget vertices.
pub fn standalone_triple(vals: [bool; 3]) -> Result<(ReductionGraph, TourMultiset)> {
    let mut g = ReductionGraph::new(false);
    let contacts = [g.add_vertex("x")?, g.add_vertex("y")?, g.add_vertex("z")?];
    let hub = g.add_vertex("s")?;
    let mut sides = [[0; 2]; 3];
    for (p, name) in ["x", "y", "z"].iter().enumerate() {
        sides[p] = [g.add_vertex(format!("{name}.l"))?, g.add_vertex(format!("{name}.r"))?];
    }
    let e = [g.add_vertex("e.l")?, g.add_vertex("e.r")?];
    let mut t_edges = Vec::new();
    for p in 0..3 {
        for side in 0..2 {
            t_edges.push((g.add_edge(sides[p][side], contacts[p], frac(3, 2), true, Allowed::Both, "gadget")?, 1));
        }
    }
    for side in 0..2 {
        t_edges.push((g.add_edge(e[side], hub, frac(1, 2), true, Allowed::Both, "gadget")?, 1));
    }
    let route = triple_route(vals);
    for p in 0..3 {
        let across = g.add_edge(sides[p][0], sides[p][1], w(1), false, Allowed::Both, "gadget")?;
        let to_e = [
            g.add_edge(e[0], sides[p][0], w(1), false, Allowed::Both, "gadget")?,
            g.add_edge(e[1], sides[p][1], w(1), false, Allowed::Both, "gadget")?,
        ];
        if route[p] {
            t_edges.extend([(to_e[0], 1), (to_e[1], 1)]);
        } else {
            t_edges.push((across, 1));
        }
    }
    for p in 0..3 {
        let ret = g.add_edge(contacts[p], hub, w(0), false, Allowed::Both, "return")?;
        if vals[p] {
            t_edges.push((ret, 2));
        }
    }
    let mut t = g.empty_tour();
    for (edge, k) in t_edges {
        t.add(edge, k);
    }
    Ok((g, t))
}

/// Builds a tour from a consistent assignment: the 1-side ring of every
/// wheel, every forced edge once, the per-case gadget traversal, and then
/// doubled simple edges (scanned in id order) joining components.
pub fn gs_tour_from_assignment(red: &GsReduction, a: &[bool]) -> Result<ConstructedTour> {
    let h = &red.hybrid;
    if !h.is_consistent(a) {
        return Err(Error::input("assignment is not consistent; round it first"));
    }
    let g = &red.graph;
    let mut t = g.empty_tour();
    for (id, e) in red.index.cycle_edge.iter().enumerate() {
        if let Some(e) = *e {
            if a[h.equations()[id].vars[0]] {
                t.add(e, 1);
            }
        }
    }
    for e in g.forced_edges().collect::<Vec<_>>() {
        t.add(e, 1);
    }
    for tri in &red.index.triples {
        let via_e = triple_route(tri.contacts.map(|v| a[v]));
        for p in 0..3 {
            if via_e[p] {
                t.add(tri.to_e[p][0], 1);
                t.add(tri.to_e[p][1], 1);
            } else {
                t.add(tri.across[p], 1);
            }
        }
    }
    let quasi = t.clone();
    let check = is_quasi_tour(g, &quasi)?;
    if !check.ok {
        return Err(Error::invariant(format!("constructed edge set is not a quasi-tour: {:?}", check.violations.first())));
    }
    let unsat = eval_hybrid(h, a)?;
    let before = edge_cost(g, &quasi);
    let m = red.m() as i64;
    if before != w(61 * m + unsat as i64) {
        return Err(Error::invariant(format!("constructed edge cost {before} differs from 61m + k = {}", 61 * m + unsat as i64)));
    }
    let (labels, con) = components(g, &quasi);
    let mut parent: Vec<usize> = (0..con).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut bridges = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        if edge.forced {
            continue;
        }
        let (a, b) = (find(&mut parent, labels[edge.u]), find(&mut parent, labels[edge.v]));
        if a != b {
            parent[a] = b;
            t.add(e, 2);
            bridges.push(e);
        }
    }
    if !is_valid_tour(g, &t)? {
        return Err(Error::invariant("bridged edge set is not a connected tour"));
    }
    let cost = tour_cost(g, &t)?;
    let bound = red.completeness_bound(unsat);
    if cost > bound {
        return Err(Error::invariant(format!("constructed tour costs {cost}, above the bound {bound}")));
    }
    Ok(ConstructedTour {
        quasi_tour: quasi,
        tour: t,
        bridges,
        unsat,
        components_before_bridging: con,
        edge_cost_before_bridging: before,
        cost,
        bound,
    })
}

/// Per-gadget local costs: half the weight of each used edge goes to the
/// gadget of each endpoint; the full local cost adds 2 per tour component
/// inside the gadget. Baselines are 5 (pairs), 31/2 (triples), m/2 (hub).
pub fn gs_local_audit(red: &GsReduction, t: &TourMultiset) -> Result<CreditReport> {
    let g = &red.graph;
    if t.len() != g.num_edges() || t.directed() {
        return Err(Error::input("tour does not fit the graph"));
    }
    let idx = &red.index;
    let n_sets = idx.pairs.len() + idx.triples.len() + 1;
    let mut local = vec![Weight::zero(); n_sets];
    for e in t.used() {
        let edge = g.edge(e);
        let half = edge.weight * Weight::from_integer(i64::from(t.mult(e))) / Weight::from_integer(2);
        local[idx.owner[edge.u]] += half;
        local[idx.owner[edge.v]] += half;
    }
    let mut inside = vec![0i64; n_sets];
    let (labels, con) = components(g, t);
    let mut comp_owner: Vec<Option<usize>> = vec![None; con];
    let mut mixed = vec![false; con];
    for v in 0..g.num_vertices() {
        let c = labels[v];
        match comp_owner[c] {
            None => comp_owner[c] = Some(idx.owner[v]),
            Some(o) if o != idx.owner[v] => mixed[c] = true,
            _ => {}
        }
    }
    for c in 0..con {
        if !mixed[c] {
            inside[comp_owner[c].expect("non-empty component")] += 1;
        }
    }
    let m = red.m() as i64;
    let gadgets = (0..n_sets)
        .map(|k| {
            let (kind, index, baseline) = if k < idx.pairs.len() {
                (GadgetKind::Pair, k, frac(PAIR_BASELINE.0, PAIR_BASELINE.1))
            } else if k < n_sets - 1 {
                (GadgetKind::Triple, k - idx.pairs.len(), frac(TRIPLE_BASELINE.0, TRIPLE_BASELINE.1))
            } else {
                (GadgetKind::Hub, 0, frac(m, 2))
            };
            let full = local[k] + Weight::from_integer(2 * inside[k]);
            GadgetCredit { kind, index, local_cost: local[k], full_local_cost: full, baseline, credit: full - baseline }
        })
        .collect();
    let ec = edge_cost(g, t);
    let tc = ec + Weight::from_integer(2 * (con as i64 - 1));
    Ok(CreditReport::new(false, gadgets, ec, tc))
}

/// Removes pairs of copies: simple edges end with multiplicity 0 or 1,
/// forced edges with 1 or 2. Never increases the cost.
pub fn normalize_undirected(g: &ReductionGraph, t: &TourMultiset) -> TourMultiset {
    let mut out = t.clone();
    for (e, edge) in g.edges().iter().enumerate() {
        let m = t.mult(e);
        let keep = if edge.forced && m > 0 { 2 - m % 2 } else { m % 2 };
        out.set(e, keep.min(m), 0);
    }
    out
}

/// Reads an assignment off a quasi-tour. Variables whose forced edges are
/// each used once are honest and take value 1 iff both incident ring edges
/// are used; the rest are chosen per gadget by local exhaustive search.
/// Fails with an invariant error if the result leaves more than
/// `cost - 61m + 2` equations unsatisfied.
pub fn gs_extract_assignment(red: &GsReduction, t: &TourMultiset) -> Result<Extraction> {
    let g = &red.graph;
    let h = &red.hybrid;
    let cost = tour_cost(g, t)?;
    if let Some(e) = g.forced_edges().find(|&e| t.mult(e) == 0) {
        return Err(Error::input(format!("forced edge {e} ({}) is unused", g.edge(e).tag)));
    }
    let norm = normalize_undirected(g, t);
    let ring_used = |v: usize| {
        g.incident(v).iter().filter(|&&e| !g.edge(e).forced && norm.mult(e) > 0 && g.edge(e).tag.starts_with("cycle.")).count() == 2
    };
    let mut a = vec![false; h.num_vars()];
    let mut groups = Vec::new();
    for p in &red.index.pairs {
        let honest = p.forced.iter().all(|&e| norm.mult(e) == 1);
        if honest {
            a[p.u_var] = ring_used(p.u_var);
            a[p.n_var] = ring_used(p.n_var);
        } else {
            groups.push(vec![p.u_var, p.n_var]);
        }
    }
    for tri in &red.index.triples {
        let mut group = Vec::new();
        for p in 0..3 {
            let v = tri.contacts[p];
            if tri.contact_forced[p].iter().all(|&e| norm.mult(e) == 1) {
                a[v] = ring_used(v);
            } else {
                group.push(v);
            }
        }
        groups.push(group);
    }
    let dishonest_vars = groups.iter().map(Vec::len).sum();
    resolve_dishonest(h, &mut a, &groups);
    let unsat = eval_hybrid(h, &a)?;
    let allowance = red.soundness_allowance(cost);
    if w(unsat as i64) > allowance {
        return Err(Error::invariant(format!(
            "extracted assignment leaves {unsat} equations unsatisfied, above cost - 61m + 2 = {allowance}"
        )));
    }
    let report = gs_local_audit(red, t)?;
    if report.total_full > report.tour_cost + w(2) {
        return Err(Error::invariant("sum of full local costs exceeds tour cost + 2"));
    }
    Ok(Extraction { assignment: a, normalized: norm, dishonest_vars, unsat, tour_cost: cost, allowance, report })
}
