//! Event-based formulations: EB with per-event times, LAEB with per-location
//! times, and ALAEB with binary location legs linked to relaxed arc flows.

use std::collections::BTreeMap;

use super::{big_m, big_m_event, Domain, FormulationKind, MilpModel, Sense, Site, VarRef};
use crate::event_graph::{ArcId, EventGraph, NodeId};
use crate::instance::{DarpInstance, Loc};

/// Activation constants of the EB window rows for request `i`:
/// `(TW_pick, TW_drop)`.
///
/// `TW_pick` is the stated window length, capped at the pickup window width
/// so an unused pickup event can still take `B = ℓ_{i+}`. `TW_drop` is
/// chosen so that a used delivery event is bounded by exactly `ℓ_{i-}`; on
/// the benchmark layout both equal the common `TW`.
pub fn eb_activation(inst: &DarpInstance, i: usize) -> (f64, f64) {
    let r = inst.request(i);
    let pick = r.tight_width().min(r.pickup.width());
    let drop = r.delivery.latest - r.pickup.earliest - r.service - r.max_ride;
    (pick, drop)
}

fn add_arc_vars(m: &mut MilpModel, g: &EventGraph, domain: Domain, priced: bool) -> Vec<(ArcId, usize)> {
    let q = g.capacity();
    g.arc_ids()
        .map(|a| {
            let arc = g.arc(a);
            let name = format!("x__{}__{}", g.node(arc.from).code(q), g.node(arc.to).code(q));
            let cost = if priced { arc.cost } else { 0.0 };
            (a, m.add_var(VarRef::Arc(a), name, 0.0, 1.0, domain, cost))
        })
        .collect()
}

fn in_terms(m: &MilpModel, g: &EventGraph, v: NodeId, coef: f64) -> Vec<(usize, f64)> {
    g.in_arcs(v)
        .map(|a| (m.var(VarRef::Arc(a)).expect("arc variable"), coef))
        .collect()
}

/// Flow conservation, pickup cover and the fleet bound.
fn add_flow_rows(m: &mut MilpModel, inst: &DarpInstance, g: &EventGraph) {
    let q = g.capacity();
    for v in g.node_ids() {
        let mut terms = in_terms(m, g, v, 1.0);
        terms.extend(g.out_arcs(v).map(|a| (m.var(VarRef::Arc(a)).expect("arc variable"), -1.0)));
        m.add_row(format!("flow__{}", g.node(v).code(q)), terms, Sense::Eq, 0.0);
    }
    for i in 1..=inst.n() {
        let terms: Vec<_> = g.events_at(Loc::Pickup(i)).flat_map(|v| in_terms(m, g, v, 1.0)).collect();
        m.add_row(format!("pick__{i}"), terms, Sense::Eq, 1.0);
    }
    let fleet = g
        .out_arcs(g.depot())
        .map(|a| (m.var(VarRef::Arc(a)).expect("arc variable"), 1.0))
        .collect();
    m.add_row("fleet__o".into(), fleet, Sense::Le, inst.vehicles as f64);
}

pub fn build_eb(inst: &DarpInstance, g: &EventGraph) -> MilpModel {
    let mut m = MilpModel::new(format!("{}-eb", inst.name), FormulationKind::Eb);
    let q = g.capacity();
    let arcs = add_arc_vars(&mut m, g, Domain::Binary, true);
    let depot = g.depot();
    for v in g.node_ids() {
        let node = g.node(v);
        let (lo, hi) = match node.loc {
            Loc::Depot => (0.0, inst.horizon),
            Loc::Pickup(i) => (inst.request(i).pickup.earliest, inst.request(i).pickup.latest),
            Loc::Delivery(i) => {
                let r = inst.request(i);
                let unused = r.pickup.earliest + r.service + r.max_ride;
                (r.delivery.earliest, unused.max(r.delivery.latest))
            }
        };
        m.add_var(VarRef::EventTime(v), format!("b__{}", node.code(q)), lo, hi, Domain::Continuous, 0.0);
    }
    add_flow_rows(&mut m, inst, g);

    let b = |m: &MilpModel, v: NodeId| m.var(VarRef::EventTime(v)).expect("event time");
    for &(a, xa) in &arcs {
        let arc = g.arc(a);
        let (from, to) = (g.node(arc.from), g.node(arc.to));
        let name = format!("{}__{}", from.code(q), to.code(q));
        let bw = b(&m, arc.to);
        if arc.from == depot {
            // B_w ≥ e_0 + t·x
            m.add_row(format!("dep__{name}"), vec![(bw, 1.0), (xa, -arc.time)], Sense::Ge, 0.0);
        } else {
            let big = big_m_event(inst, g, a);
            let st = inst.service(from.loc) + arc.time;
            let bv = b(&m, arc.from);
            m.add_row(
                format!("time__{name}"),
                vec![(bw, 1.0), (bv, -1.0), (xa, -big)],
                Sense::Ge,
                st - big,
            );
        }
    }
    for v in g.node_ids() {
        let node = g.node(v);
        let bv = b(&m, v);
        match node.loc {
            Loc::Depot => {}
            Loc::Pickup(i) => {
                let (tw, _) = eb_activation(inst, i);
                // e + TW(1 − Σx) ≤ B
                let mut terms = in_terms(&m, g, v, tw);
                terms.push((bv, 1.0));
                let e = inst.request(i).pickup.earliest;
                m.add_row(format!("twp__{}", node.code(q)), terms, Sense::Ge, e + tw);
            }
            Loc::Delivery(i) => {
                let (_, tw) = eb_activation(inst, i);
                let r = inst.request(i);
                // B ≤ e_{i+} + s + L + TW·Σx
                let mut terms = in_terms(&m, g, v, -tw);
                terms.push((bv, 1.0));
                m.add_row(
                    format!("twd__{}", node.code(q)),
                    terms,
                    Sense::Le,
                    r.pickup.earliest + r.service + r.max_ride,
                );
            }
        }
    }
    for i in 1..=inst.n() {
        let r = inst.request(i);
        let picks: Vec<NodeId> = g.events_at(Loc::Pickup(i)).collect();
        let drops: Vec<NodeId> = g.events_at(Loc::Delivery(i)).collect();
        for &v in &picks {
            for &w in &drops {
                let (bv, bw) = (b(&m, v), b(&m, w));
                m.add_row(
                    format!("ride__{}__{}", g.node(v).code(q), g.node(w).code(q)),
                    vec![(bw, 1.0), (bv, -1.0)],
                    Sense::Le,
                    r.service + r.max_ride,
                );
            }
        }
    }
    m
}

/// Arc variables grouped by the location pair they connect; the depot is
/// `Start` as a tail and `End` as a head.
fn legs_of(g: &EventGraph, m: &MilpModel) -> BTreeMap<(Site, Site), Vec<usize>> {
    let mut out: BTreeMap<(Site, Site), Vec<usize>> = BTreeMap::new();
    for a in g.arc_ids() {
        let arc = g.arc(a);
        let from = match g.node(arc.from).loc {
            Loc::Depot => Site::Start,
            l => Site::At(l),
        };
        let to = match g.node(arc.to).loc {
            Loc::Depot => Site::End,
            l => Site::At(l),
        };
        out.entry((from, to)).or_default().push(m.var(VarRef::Arc(a)).expect("arc variable"));
    }
    out
}

fn add_location_times(m: &mut MilpModel, inst: &DarpInstance) {
    for l in inst.locations().filter(|&l| l != Loc::Depot) {
        let w = inst.window(l);
        m.add_var(VarRef::Time(Site::At(l)), format!("t__{}", l.code()), w.earliest, w.latest, Domain::Continuous, 0.0);
    }
}

/// Time rows per connected location pair. `flow` is the expression playing
/// the role of `x̄_ij`: the arc sum (LAEB) or the leg variable (ALAEB).
fn add_location_time_rows(
    m: &mut MilpModel,
    inst: &DarpInstance,
    legs: &BTreeMap<(Site, Site), Vec<(usize, f64)>>,
) {
    let horizon = inst.horizon;
    for (&(a, b), flow) in legs {
        let name = format!("time__{}__{}", a.code(), b.code());
        let (la, lb) = (a.loc(), b.loc());
        let t = inst.time(la, lb);
        match (a, b) {
            (Site::Start, Site::At(_)) => {
                // B̄_j ≥ e_0 + t_0j·x̄_0j
                let tb = m.var(VarRef::Time(b)).expect("time variable");
                let mut terms: Vec<_> = flow.iter().map(|&(j, c)| (j, -t * c)).collect();
                terms.push((tb, 1.0));
                m.add_row(name, terms, Sense::Ge, 0.0);
            }
            (Site::At(_), Site::End) => {
                // B̄_i + s_i + t_i0 − M(1 − x̄_i0) ≤ ℓ_0
                let ta = m.var(VarRef::Time(a)).expect("time variable");
                let st = inst.service(la) + t;
                let big = (inst.latest(la) + st - horizon).max(0.0);
                let mut terms: Vec<_> = flow.iter().map(|&(j, c)| (j, big * c)).collect();
                terms.push((ta, 1.0));
                m.add_row(name, terms, Sense::Le, horizon - st + big);
            }
            (Site::At(_), Site::At(_)) => {
                // B̄_j − B̄_i − M·x̄_ij ≥ s_i + t_ij − M
                let ta = m.var(VarRef::Time(a)).expect("time variable");
                let tb = m.var(VarRef::Time(b)).expect("time variable");
                let big = big_m(inst, la, lb);
                let st = inst.service(la) + t;
                let mut terms: Vec<_> = flow.iter().map(|&(j, c)| (j, -big * c)).collect();
                terms.push((tb, 1.0));
                terms.push((ta, -1.0));
                m.add_row(name, terms, Sense::Ge, st - big);
            }
            _ => unreachable!("the event graph has no depot-to-depot arc"),
        }
    }
    for i in 1..=inst.n() {
        let r = inst.request(i);
        let tp = m.var(VarRef::Time(Site::At(Loc::Pickup(i)))).expect("time variable");
        let td = m.var(VarRef::Time(Site::At(Loc::Delivery(i)))).expect("time variable");
        m.add_row(format!("ride__{i}"), vec![(td, 1.0), (tp, -1.0)], Sense::Le, r.service + r.max_ride);
    }
}

pub fn build_laeb(inst: &DarpInstance, g: &EventGraph) -> MilpModel {
    let mut m = MilpModel::new(format!("{}-laeb", inst.name), FormulationKind::Laeb);
    add_arc_vars(&mut m, g, Domain::Binary, true);
    add_location_times(&mut m, inst);
    add_flow_rows(&mut m, inst, g);
    let legs = legs_of(g, &m)
        .into_iter()
        .map(|(k, xs)| (k, xs.into_iter().map(|j| (j, 1.0)).collect()))
        .collect();
    add_location_time_rows(&mut m, inst, &legs);
    m
}

pub fn build_alaeb(inst: &DarpInstance, g: &EventGraph) -> MilpModel {
    let mut m = MilpModel::new(format!("{}-alaeb", inst.name), FormulationKind::Alaeb);
    add_arc_vars(&mut m, g, Domain::Continuous, false);
    let arcs_by_leg = legs_of(g, &m);
    let mut legs = BTreeMap::new();
    for &(a, b) in arcs_by_leg.keys() {
        let cost = inst.arc_cost(a.loc(), b.loc());
        let y = m.add_var(
            VarRef::Leg(a, b),
            format!("y__{}__{}", a.code(), b.code()),
            0.0,
            1.0,
            Domain::Binary,
            cost,
        );
        legs.insert((a, b), vec![(y, 1.0)]);
    }
    add_location_times(&mut m, inst);
    add_flow_rows(&mut m, inst, g);
    for (&(a, b), xs) in &arcs_by_leg {
        let y = legs[&(a, b)][0].0;
        let mut terms: Vec<_> = xs.iter().map(|&j| (j, -1.0)).collect();
        terms.push((y, 1.0));
        m.add_row(format!("link__{}__{}", a.code(), b.code()), terms, Sense::Eq, 0.0);
    }
    add_location_time_rows(&mut m, inst, &legs);
    m
}
