use darp_core::event_graph::{tour_events, EventGraph, GraphConfig};
use darp_core::gen::{random_instance, GenParams};
use darp_core::instance::compat_flags;
use darp_core::preprocessing::{compute_bounds, fixed_arc_update, fixpoint_reduce, reduce};
use darp_core::solver::oracle::for_each_tour;
use darp_core::solver::{latest_schedule, schedule_route};
use darp_core::DarpInstance;
use proptest::prelude::*;

const EPS: f64 = 1e-6;

fn instance(n: usize, k: usize, q: u32, tw: f64, seed: u64) -> DarpInstance {
    random_instance(
        &GenParams {
            n,
            vehicles: k,
            capacity: q,
            tw,
            ..GenParams::default()
        },
        seed,
    )
}

fn build(inst: &DarpInstance) -> EventGraph {
    EventGraph::build(inst, &compat_flags(inst), GraphConfig::default())
}

/// Every event and arc of every feasible tour survives the reduction, and
/// the earliest and latest schedules of the tour lie within the bounds.
fn assert_sound(inst: &DarpInstance, g: &EventGraph, lb: impl Fn(usize) -> f64, ub: impl Fn(usize) -> f64) {
    for_each_tour(inst, |tour| {
        let seq = tour.with_depots();
        let early = schedule_route(inst, &seq).unwrap();
        let late = latest_schedule(inst, &seq).unwrap();
        let events = tour_events(&seq);
        let ids: Vec<usize> = events
            .iter()
            .map(|e| g.find(e).unwrap_or_else(|| panic!("{} lost event {}", inst.name, e.tuple(inst.capacity))))
            .collect();
        for w in ids.windows(2) {
            assert!(g.find_arc(w[0], w[1]).is_some(), "{}: lost arc in {:?}", inst.name, tour.stops);
        }
        for k in 1..ids.len() - 1 {
            let v = ids[k];
            assert!(early[k] >= lb(v) - EPS, "{}: B={} < LB={}", inst.name, early[k], lb(v));
            assert!(late[k] <= ub(v) + EPS, "{}: B={} > UB={}", inst.name, late[k], ub(v));
        }
    })
    .unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_keeps_every_feasible_tour(n in 2usize..=5, q in 2u32..=3, tw in 5.0f64..60.0, seed in 0u64..10_000) {
        let inst = instance(n, 1, q, tw, seed);
        let mut g = build(&inst);
        let (b, _) = reduce(&mut g, &inst).unwrap();
        assert_sound(&inst, &g, |v| b.lb(v), |v| b.ub(v));
    }

    #[test]
    fn reduction_only_tightens(n in 2usize..=5, q in 2u32..=3, seed in 0u64..10_000) {
        let inst = instance(n, 1, q, 15.0, seed);
        let mut g = build(&inst);
        let before = g.clone();
        let mut b = compute_bounds(&g, &inst);
        let initial = b.clone();
        let report = fixpoint_reduce(&mut g, &mut b, &inst).unwrap();
        for v in g.node_ids() {
            prop_assert!(b.lb(v) >= initial.lb(v) - 1e-12);
            prop_assert!(b.ub(v) <= initial.ub(v) + 1e-12);
            prop_assert!(b.lb(v) <= b.ub(v) + 1e-9);
        }
        prop_assert!(g.node_ids().all(|v| before.is_node_alive(v)));
        prop_assert!(g.arc_ids().all(|a| before.is_arc_alive(a)));
        prop_assert_eq!(report.nodes_after, g.num_nodes());
        prop_assert!(report.nodes_after <= report.nodes_before);
    }

    #[test]
    fn fixing_keeps_tours_through_the_arc(n in 2usize..=4, seed in 0u64..10_000, pick in 0usize..1000) {
        let inst = instance(n, 1, 2, 20.0, seed);
        let mut g = build(&inst);
        let (mut b, _) = reduce(&mut g, &inst).unwrap();
        let arcs: Vec<usize> = g.arc_ids().collect();
        let a = arcs[pick % arcs.len()];
        let (from, to) = (g.node(g.arc(a).from).clone(), g.node(g.arc(a).to).clone());
        let mut uses = Vec::new();
        for_each_tour(&inst, |t| {
            let ev = tour_events(&t.with_depots());
            if ev.windows(2).any(|w| w[0] == from && w[1] == to) {
                uses.push(t.clone());
            }
        }).unwrap();
        match fixed_arc_update(&mut g, &mut b, &inst, a) {
            Err(_) => prop_assert!(uses.is_empty(), "fixing rejected but {} tours use the arc", uses.len()),
            Ok(_) => {
                let (v, w) = (g.find(&from).unwrap(), g.find(&to).unwrap());
                for t in &uses {
                    let seq = t.with_depots();
                    let ev = tour_events(&seq);
                    let early = schedule_route(&inst, &seq).unwrap();
                    let late = latest_schedule(&inst, &seq).unwrap();
                    for (k, e) in ev.iter().enumerate().take(ev.len() - 1).skip(1) {
                        let id = g.find(e).expect("event of a tour through the fixed arc survives");
                        if id == v || id == w {
                            prop_assert!(early[k] >= b.lb(id) - EPS);
                            prop_assert!(late[k] <= b.ub(id) + EPS);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn reduction_removes_something_on_tight_instances() {
    let mut removed = 0;
    for seed in 0..10 {
        let inst = instance(6, 2, 3, 15.0, seed);
        let mut g = build(&inst);
        let (_, report) = reduce(&mut g, &inst).unwrap();
        removed += report.nodes_before - report.nodes_after;
    }
    assert!(removed > 0);
}

