//! Directed reduction: Hybrid instance (right-hand side 1) to a digraph.
//!
//! Each checker is a vertex; each contact splits into `r` (entry) and `l`
//! (exit) joined by a forced edge of weight 1 usable both ways (`r -> l`
//! encodes value 1). Matching equations become forced weight-2 edges usable
//! both ways. The u-ring cycle runs `x^n_{u(i)} -> x^u_{i+1}` (through a
//! contact's `r`/`l` where the ring has one), the n-ring cycle
//! `x^u_{n(i)} -> x^n_{i+1}`. A size-3 equation on contacts `x, y, z` gets
//! `s_j, t_j, e1, e2, e3`, one-way forced edges `s -> s_j` and `t_j -> s` of
//! weight λ, and unit arcs `s_j -> e_i`, `e_i -> t_j`, `e2 -> e1 -> e3 -> e2`
//! and hooks `e_p -> γ_p^l`, `γ_p^r -> e_{p+1}` (contact `p` of `x, y, z`).

use num_traits::Zero;

use crate::credit::{resolve_dishonest, ConstructedTour, CreditReport, Extraction, GadgetCredit, GadgetKind};
use crate::error::{Error, Result};
use crate::graph::{components, edge_cost, is_quasi_tour, is_valid_tour, tour_cost, Allowed, ReductionGraph, TourMultiset};
use crate::hybrid::{eval_hybrid, EquationKind, HybridInstance};
use crate::weight::{frac, w, Weight};

pub fn default_lambda() -> Weight {
    frac(1, 8)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedPair {
    pub equation: usize,
    pub u_var: usize,
    pub n_var: usize,
    /// Forced edge with `u` = the u-ring checker.
    pub forced: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedTriple {
    pub equation: usize,
    pub contacts: [usize; 3],
    pub s: usize,
    pub t: usize,
    pub e: [usize; 3],
    /// `s -> s_j`, `t_j -> s`.
    pub lambda_edges: [usize; 2],
    pub s_to_e: [usize; 3],
    pub e_to_t: [usize; 3],
    /// `e_q -> e_{q-1}` for `q = 0, 1, 2`.
    pub inner: [usize; 3],
    /// `e_p -> γ_p^l`.
    pub hook_in: [usize; 3],
    /// `γ_p^r -> e_{p+1}`.
    pub hook_out: [usize; 3],
}

impl DirectedTriple {
    pub fn own_vertices(&self) -> Vec<usize> {
        let mut v = vec![self.s, self.t];
        v.extend(self.e);
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaIndex {
    pub hub: usize,
    pub lambda: Weight,
    /// Entry vertex per Hybrid variable (`r` for contacts).
    pub entry: Vec<usize>,
    /// Exit vertex per Hybrid variable (`l` for contacts).
    pub exit: Vec<usize>,
    /// Forced `r`/`l` edge per contact variable.
    pub contact_forced: Vec<Option<usize>>,
    /// Ring arc for cycle equation `(v, next v)` keyed by `v`.
    pub arc_from: Vec<usize>,
    /// Ring arc for cycle equation `(prev v, v)` keyed by `v`.
    pub arc_into: Vec<usize>,
    pub pairs: Vec<DirectedPair>,
    pub triples: Vec<DirectedTriple>,
    pub owner: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct GaReduction {
    pub graph: ReductionGraph,
    pub index: GaIndex,
    pub hybrid: HybridInstance,
}

impl GaReduction {
    pub fn m(&self) -> usize {
        self.index.triples.len()
    }

    pub fn nu(&self) -> usize {
        self.hybrid.wheels().len()
    }

    pub fn lambda(&self) -> Weight {
        self.index.lambda
    }

    /// `37m + 5ν + 2mλ + 2νλ + k`.
    pub fn completeness_bound(&self, k: usize) -> Weight {
        let (m, nu, l) = (self.m() as i64, self.nu() as i64, self.lambda());
        w(37 * m + 5 * nu + k as i64) + l * w(2 * m + 2 * nu)
    }

    /// `cost - 37m - 2λm`.
    pub fn soundness_allowance(&self, cost: Weight) -> Weight {
        let m = self.m() as i64;
        cost - w(37 * m) - self.lambda() * w(2 * m)
    }
}

pub fn build_ga(h: &HybridInstance, lambda: Weight) -> Result<GaReduction> {
    if !h.b() {
        return Err(Error::input("the directed reduction needs a Hybrid instance with right-hand side 1"));
    }
    if lambda <= Weight::zero() {
        return Err(Error::input(format!("lambda must be positive, got {lambda}")));
    }
    let mut g = ReductionGraph::new(true);
    let nv = h.num_vars();
    let mut entry = vec![0; nv];
    let mut exit = vec![0; nv];
    for (v, var) in h.variables().iter().enumerate() {
        if var.is_contact {
            entry[v] = g.add_vertex(format!("{}.r", var.id()))?;
            exit[v] = g.add_vertex(format!("{}.l", var.id()))?;
        } else {
            entry[v] = g.add_vertex(var.id())?;
            exit[v] = entry[v];
        }
    }
    let hub = g.add_vertex("s")?;
    let mut arc_from = vec![usize::MAX; nv];
    let mut arc_into = vec![usize::MAX; nv];
    let mut pairs = Vec::new();
    let mut size3 = Vec::new();
    for (id, eq) in h.equations().iter().enumerate() {
        match eq.kind {
            EquationKind::Cycle => {
                let (a, b) = (eq.vars[0], eq.vars[1]);
                let var = &h.variables()[a];
                let source = if var.is_contact {
                    exit[a]
                } else {
                    let wheel = &h.wheel(var.source_var).expect("wheel").wheel;
                    let partner = wheel.partner(var.side, var.ring_pos);
                    entry[h.var_id(var.source_var, var.side.opposite(), partner).expect("partner")]
                };
                let tag = format!("c{}.{}", var.side.as_str(), var.source_var);
                let arc = g.add_edge(source, entry[b], w(1), false, Allowed::Forward, tag)?;
                arc_from[a] = arc;
                arc_into[b] = arc;
            }
            EquationKind::Matching => {
                let tag = format!("pair.{}", pairs.len());
                let f = g.add_edge(entry[eq.vars[0]], entry[eq.vars[1]], w(2), true, Allowed::Both, tag)?;
                pairs.push(DirectedPair { equation: id, u_var: eq.vars[0], n_var: eq.vars[1], forced: f });
            }
            EquationKind::Size3 => size3.push(id),
        }
    }
    let mut contact_forced = vec![None; nv];
    for (v, var) in h.variables().iter().enumerate() {
        if var.is_contact {
            contact_forced[v] = Some(g.add_edge(entry[v], exit[v], w(1), true, Allowed::Both, format!("contact.{}", var.id()))?);
        }
    }
    let mut triples = Vec::new();
    for (j, &id) in size3.iter().enumerate() {
        let eq = &h.equations()[id];
        let tag = format!("eq3.{j}");
        let s = g.add_vertex(format!("q{j}.s"))?;
        let t = g.add_vertex(format!("q{j}.t"))?;
        let mut e = [0; 3];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = g.add_vertex(format!("q{j}.e{}", i + 1))?;
        }
        let contacts = [eq.vars[0], eq.vars[1], eq.vars[2]];
        let lambda_edges = [
            g.add_edge(hub, s, lambda, true, Allowed::Forward, tag.clone())?,
            g.add_edge(t, hub, lambda, true, Allowed::Forward, tag.clone())?,
        ];
        let mut s_to_e = [0; 3];
        let mut e_to_t = [0; 3];
        let mut inner = [0; 3];
        let mut hook_in = [0; 3];
        let mut hook_out = [0; 3];
        for i in 0..3 {
            s_to_e[i] = g.add_edge(s, e[i], w(1), false, Allowed::Forward, tag.clone())?;
            e_to_t[i] = g.add_edge(e[i], t, w(1), false, Allowed::Forward, tag.clone())?;
        }
        for q in 0..3 {
            inner[q] = g.add_edge(e[q], e[(q + 2) % 3], w(1), false, Allowed::Forward, tag.clone())?;
        }
        for p in 0..3 {
            hook_in[p] = g.add_edge(e[p], exit[contacts[p]], w(1), false, Allowed::Forward, tag.clone())?;
            hook_out[p] = g.add_edge(entry[contacts[p]], e[(p + 1) % 3], w(1), false, Allowed::Forward, tag.clone())?;
        }
        triples.push(DirectedTriple { equation: id, contacts, s, t, e, lambda_edges, s_to_e, e_to_t, inner, hook_in, hook_out });
    }
    let mut owner = vec![usize::MAX; g.num_vertices()];
    for (k, p) in pairs.iter().enumerate() {
        owner[entry[p.u_var]] = k;
        owner[entry[p.n_var]] = k;
    }
    for (k, tri) in triples.iter().enumerate() {
        for v in tri.own_vertices() {
            owner[v] = pairs.len() + k;
        }
        for &c in &tri.contacts {
            owner[entry[c]] = pairs.len() + k;
            owner[exit[c]] = pairs.len() + k;
        }
    }
    owner[hub] = pairs.len() + triples.len();
    if owner.contains(&usize::MAX) || arc_from.contains(&usize::MAX) || arc_into.contains(&usize::MAX) {
        return Err(Error::invariant("directed gadget index is incomplete"));
    }
    let index = GaIndex { hub, lambda, entry, exit, contact_forced, arc_from, arc_into, pairs, triples, owner };
    Ok(GaReduction { graph: g, index, hybrid: h.clone() })
}

/// Adds the gadget path for one pattern of contact values; value-0 contacts
/// are passed through via their hooks, `l -> r`.
fn traverse_triple(t: &mut TourMultiset, tri: &DirectedTriple, vals: [bool; 3], contact_forced: &[Option<usize>]) {
    let through = |t: &mut TourMultiset, p: usize| {
        t.add_dir(tri.hook_in[p], true, 1);
        t.add_dir(contact_forced[tri.contacts[p]].expect("contact"), false, 1);
        t.add_dir(tri.hook_out[p], true, 1);
    };
    let ones = vals.iter().filter(|&&x| x).count();
    match ones {
        3 => {
            t.add_dir(tri.s_to_e[1], true, 1);
            t.add_dir(tri.inner[1], true, 1);
            t.add_dir(tri.inner[0], true, 1);
            t.add_dir(tri.e_to_t[2], true, 1);
        }
        1 => {
            let p = vals.iter().position(|&x| x).expect("one");
            let (p1, p2) = ((p + 1) % 3, (p + 2) % 3);
            t.add_dir(tri.s_to_e[p1], true, 1);
            through(t, p1);
            through(t, p2);
            t.add_dir(tri.e_to_t[p], true, 1);
        }
        2 => {
            let p = vals.iter().position(|&x| !x).expect("zero");
            t.add_dir(tri.s_to_e[p], true, 1);
            through(t, p);
            t.add_dir(tri.inner[(p + 1) % 3], true, 1);
            t.add_dir(tri.inner[p], true, 1);
            t.add_dir(tri.e_to_t[(p + 2) % 3], true, 1);
        }
        _ => {
            t.add_dir(tri.s_to_e[1], true, 1);
            through(t, 1);
            through(t, 2);
            through(t, 0);
            t.add_dir(tri.e_to_t[1], true, 1);
        }
    }
}

/// Builds a tour from a consistent assignment: the u-ring cycle of each
/// wheel whose u side is 1, otherwise the n-ring cycle; the case traversal
/// of each size-3 gadget; then one detour `s -> s_j -> e_p -> γ^l -> γ^r ->
/// e_{p+1} -> t_j -> s` per wheel through one of its value-1 contacts.
pub fn ga_tour_from_assignment(red: &GaReduction, a: &[bool]) -> Result<ConstructedTour> {
    let h = &red.hybrid;
    if !h.is_consistent(a) {
        return Err(Error::input("assignment is not consistent; round it first"));
    }
    let g = &red.graph;
    let idx = &red.index;
    let mut t = g.empty_tour();
    for (v, var) in h.variables().iter().enumerate() {
        if !a[v] {
            continue;
        }
        t.add_dir(idx.arc_from[v], true, 1);
        if var.is_contact {
            t.add_dir(idx.contact_forced[v].expect("contact"), true, 1);
        }
    }
    for p in &red.index.pairs {
        t.add_dir(p.forced, a[p.u_var], 1);
    }
    for tri in &idx.triples {
        t.add_dir(tri.lambda_edges[0], true, 1);
        t.add_dir(tri.lambda_edges[1], true, 1);
        traverse_triple(&mut t, tri, tri.contacts.map(|v| a[v]), &idx.contact_forced);
    }
    let quasi = t.clone();
    let check = is_quasi_tour(g, &quasi)?;
    if !check.ok {
        return Err(Error::invariant(format!("constructed arc set is not a quasi-tour: {:?}", check.violations.first())));
    }
    let unsat = eval_hybrid(h, a)?;
    let before = edge_cost(g, &quasi);
    let m = red.m() as i64;
    let expected = w(37 * m + unsat as i64) + red.lambda() * w(2 * m);
    if before != expected {
        return Err(Error::invariant(format!("constructed arc cost {before} differs from 37m + 2λm + k = {expected}")));
    }
    let (_, con) = components(g, &quasi);
    let mut bridges = Vec::new();
    for wheel in h.wheels() {
        let found = idx.triples.iter().find_map(|tri| {
            (0..3).find(|&p| a[tri.contacts[p]] && h.variables()[tri.contacts[p]].source_var == wheel.var).map(|p| (tri, p))
        });
        let (tri, p) = found.ok_or_else(|| Error::invariant(format!("wheel x{} has no contact of value 1", wheel.var)))?;
        let q = (p + 1) % 3;
        for (e, fwd) in [
            (tri.lambda_edges[0], true),
            (tri.s_to_e[p], true),
            (tri.hook_in[p], true),
            (idx.contact_forced[tri.contacts[p]].expect("contact"), false),
            (tri.hook_out[p], true),
            (tri.e_to_t[q], true),
            (tri.lambda_edges[1], true),
        ] {
            t.add_dir(e, fwd, 1);
        }
        bridges.push(tri.contacts[p]);
    }
    if !is_valid_tour(g, &t)? {
        return Err(Error::invariant("bridged arc set is not a connected tour"));
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

/// Outgoing-weight local costs: every traversal is charged to the gadget
/// owning its source vertex, so the costs partition the total arc cost.
/// Baselines are 3 (pairs), 10 + λ (triples), mλ (hub).
pub fn ga_local_audit(red: &GaReduction, t: &TourMultiset) -> Result<CreditReport> {
    let g = &red.graph;
    if t.len() != g.num_edges() || !t.directed() {
        return Err(Error::input("tour does not fit the graph"));
    }
    let idx = &red.index;
    let n_sets = idx.pairs.len() + idx.triples.len() + 1;
    let mut local = vec![Weight::zero(); n_sets];
    for e in t.used() {
        let edge = g.edge(e);
        local[idx.owner[edge.u]] += edge.weight * w(i64::from(t.fwd(e)));
        local[idx.owner[edge.v]] += edge.weight * w(i64::from(t.bwd(e)));
    }
    let m = red.m() as i64;
    let gadgets = (0..n_sets)
        .map(|k| {
            let (kind, index, baseline) = if k < idx.pairs.len() {
                (GadgetKind::Pair, k, w(3))
            } else if k < n_sets - 1 {
                (GadgetKind::Triple, k - idx.pairs.len(), w(10) + red.lambda())
            } else {
                (GadgetKind::Hub, 0, red.lambda() * w(m))
            };
            GadgetCredit { kind, index, local_cost: local[k], full_local_cost: local[k], baseline, credit: local[k] - baseline }
        })
        .collect();
    let ec = edge_cost(g, t);
    let (_, con) = components(g, t);
    let report = CreditReport::new(true, gadgets, ec, ec + w(2 * (con as i64 - 1)));
    if report.total_local != ec {
        return Err(Error::invariant("outgoing local costs do not partition the arc cost"));
    }
    Ok(report)
}

/// Reads an assignment off a tour. A checker is honest when its ring's
/// arc into it and the same ring's arc out of its matching partner are both
/// used or both unused (value: used); a contact is honest when its forced
/// edge is used in one direction only (value: `r -> l`). Others are chosen
/// per gadget by local exhaustive search. Fails with an invariant error if
/// more than `cost - 37m - 2λm` equations stay unsatisfied.
pub fn ga_extract_assignment(red: &GaReduction, t: &TourMultiset) -> Result<Extraction> {
    let g = &red.graph;
    let h = &red.hybrid;
    let idx = &red.index;
    if !is_valid_tour(g, t)? {
        return Err(Error::input("not a valid tour (balanced, connected, every forced edge used)"));
    }
    let cost = tour_cost(g, t)?;
    let used = |e: usize| t.fwd(e) > 0;
    let mut a = vec![false; h.num_vars()];
    let mut groups = Vec::new();
    for p in &idx.pairs {
        let mut group = Vec::new();
        for v in [p.u_var, p.n_var] {
            let (into, from) = (used(idx.arc_into[v]), used(idx.arc_from[v]));
            if into == from {
                a[v] = into;
            } else {
                group.push(v);
            }
        }
        groups.push(group);
    }
    for tri in &idx.triples {
        let mut group = Vec::new();
        for &v in &tri.contacts {
            let f = idx.contact_forced[v].expect("contact");
            if (t.fwd(f) > 0) != (t.bwd(f) > 0) {
                a[v] = t.fwd(f) > 0;
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
            "extracted assignment leaves {unsat} equations unsatisfied, above cost - 37m - 2λm = {allowance}"
        )));
    }
    let report = ga_local_audit(red, t)?;
    Ok(Extraction { assignment: a, normalized: t.clone(), dishonest_vars, unsat, tour_cost: cost, allowance, report })
}

/// Closed-form `(vertices, forced edges, simple arcs)`: checkers once,
/// contacts twice, five per gadget plus the hub; `9m + 3m + 2m` forced;
/// `21m` ring arcs plus 15 per gadget.
pub fn expected_ga_counts(h: &HybridInstance) -> (usize, usize, usize) {
    let m = h.m();
    let contacts = 3 * m;
    (h.num_vars() + contacts + 5 * m + 1, 14 * m, 36 * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::e3lin2::{balance_negations, generate_planted, parse_e3lin2};
    use crate::graph::eulerian_order;
    use crate::hybrid::{build_hybrid, extend_consistent};
    use crate::biwheel::Side;
    use crate::mutate::legal_mutations;
    use crate::rng::seeded;

    fn one_eq(lambda: Weight) -> GaReduction {
        let inst = balance_negations(&parse_e3lin2("x1 x2 x3 = 1").unwrap(), true);
        let h = build_hybrid(&inst, true, 5).unwrap();
        build_ga(&h, lambda).unwrap()
    }

    #[test]
    fn counts_and_guards() {
        let red = one_eq(default_lambda());
        let (nv, nf, ns) = expected_ga_counts(&red.hybrid);
        assert_eq!(red.graph.num_vertices(), nv);
        assert_eq!(nv, 117);
        assert_eq!(red.graph.forced_edges().count(), nf);
        assert_eq!(red.graph.num_edges() - nf, ns);
        let inst0 = balance_negations(&parse_e3lin2("x1 x2 x3 = 0").unwrap(), false);
        let h0 = build_hybrid(&inst0, false, 5).unwrap();
        assert!(build_ga(&h0, default_lambda()).is_err());
        assert!(build_ga(&red.hybrid, Weight::zero()).is_err());
    }

    #[test]
    fn u_cycle_covers_checkers_and_u_contacts() {
        let red = one_eq(default_lambda());
        let h = &red.hybrid;
        let wheel = &h.wheels()[0];
        let mut t = red.graph.empty_tour();
        for v in wheel.var_range() {
            if h.variables()[v].side == Side::U {
                t.add_dir(red.index.arc_from[v], true, 1);
                if let Some(f) = red.index.contact_forced[v] {
                    t.add_dir(f, true, 1);
                }
            }
        }
        for p in red.index.pairs.iter().filter(|p| wheel.var_range().contains(&p.u_var)) {
            t.add_dir(p.forced, true, 1);
        }
        let g = &red.graph;
        for v in wheel.var_range() {
            let var = &h.variables()[v];
            let covered = |x: usize| g.incident(x).iter().any(|&e| t.mult(e) > 0);
            let expect = !var.is_contact || var.side == Side::U;
            assert_eq!(covered(red.index.entry[v]), expect, "{}", var.id());
        }
        for x in 0..g.num_vertices() {
            assert_eq!(crate::graph::balance_of(g, &t, x).unwrap(), 0);
        }
    }

    #[test]
    fn satisfiable_tour_costs_164_75() {
        let red = one_eq(default_lambda());
        let a = extend_consistent(&red.hybrid, &[true, true, true]).unwrap();
        let c = ga_tour_from_assignment(&red, &a).unwrap();
        assert_eq!(c.unsat, 0);
        assert_eq!(c.components_before_bridging, 4);
        assert_eq!(c.cost, frac(659, 4));
        assert_eq!(c.cost, c.bound);
        let walk = eulerian_order(&red.graph, &c.tour).unwrap();
        assert_eq!(walk.len() as u64, c.tour.total_multiplicity() + 1);
    }

    #[test]
    fn every_case_has_its_table_cost() {
        for lambda in [frac(1, 8), frac(1, 4)] {
            let red = one_eq(lambda);
            for bits in 0..8u32 {
                let phi: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
                let a = extend_consistent(&red.hybrid, &phi).unwrap();
                let c = ga_tour_from_assignment(&red, &a).unwrap();
                assert_eq!(c.cost, c.bound);
                let rep = ga_local_audit(&red, &c.quasi_tour).unwrap();
                assert!(rep.of_kind(GadgetKind::Pair).all(|g| g.local_cost == w(3)));
                for (gc, (_, eq)) in rep.of_kind(GadgetKind::Triple).zip(red.hybrid.size3_equations()) {
                    let extra = if eq.is_satisfied(&a) { w(10) } else { w(11) };
                    assert_eq!(gc.local_cost, extra + lambda);
                }
                let bridged = ga_local_audit(&red, &c.tour).unwrap();
                assert_eq!(bridged.edge_cost - rep.edge_cost, (w(5) + lambda * w(2)) * w(3));
                let ex = ga_extract_assignment(&red, &c.tour).unwrap();
                assert!(ex.unsat <= c.unsat);
            }
        }
    }

    #[test]
    fn reversed_matching_edge_costs_credit_two() {
        let red = one_eq(default_lambda());
        let a = extend_consistent(&red.hybrid, &[true, false, true]).unwrap();
        let c = ga_tour_from_assignment(&red, &a).unwrap();
        let mut t = c.tour.clone();
        let f = red.index.pairs[0].forced;
        t.add_dir(f, true, 1);
        t.add_dir(f, false, 1);
        let rep = ga_local_audit(&red, &t).unwrap();
        assert!(rep.gadgets[0].credit >= w(2));
        let ex = ga_extract_assignment(&red, &t).unwrap();
        assert!(w(ex.unsat as i64) <= ex.allowance);
    }

    #[test]
    fn mutated_tours_respect_the_allowance() {
        for seed in 0..3 {
            let (inst, phi) = generate_planted(6, 2, (seed % 2) as usize, seed).unwrap();
            let h = build_hybrid(&balance_negations(&inst, true), true, seed).unwrap();
            let red = build_ga(&h, default_lambda()).unwrap();
            let a = extend_consistent(&h, &phi).unwrap();
            let c = ga_tour_from_assignment(&red, &a).unwrap();
            let mut rng = seeded(seed, 78);
            let muts = legal_mutations(&red.graph, &c.tour, &mut rng, 300, 8, true);
            assert!(muts.len() >= 250, "only {} legal mutations", muts.len());
            for t in muts {
                ga_extract_assignment(&red, &t).unwrap();
            }
        }
    }
}
