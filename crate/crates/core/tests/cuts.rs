use std::collections::BTreeMap;

use darp_core::cuts::{generate_cuts, CutConfig, CutFamily};
use darp_core::event_graph::{EventGraph, GraphConfig};
use darp_core::gen::{random_instance, two_request_fixture, GenParams};
use darp_core::instance::{compat_flags, Loc};
use darp_core::models::{assignment_from_tours, build, FormulationKind};
use darp_core::preprocessing::{compute_bounds, reduce};
use darp_core::solver::oracle::for_each_solution;
use darp_core::DarpInstance;
use proptest::prelude::*;

/// Appends every family to the three event-based models and maps each
/// oracle-feasible solution onto them. Returns the cut counts seen.
fn check_cuts_keep_oracle_solutions(inst: &DarpInstance, reduced: bool) -> BTreeMap<CutFamily, usize> {
    let flags = compat_flags(inst);
    let mut g = EventGraph::build(inst, &flags, GraphConfig::default());
    let bounds = if reduced {
        reduce(&mut g, inst).unwrap().0
    } else {
        compute_bounds(&g, inst)
    };
    let mut counts = BTreeMap::new();
    let models: Vec<_> = [FormulationKind::Eb, FormulationKind::Laeb, FormulationKind::Alaeb]
        .into_iter()
        .map(|k| {
            let mut m = build(k, inst, Some(&g)).unwrap();
            let pool = generate_cuts(k, inst, &g, Some(&bounds), &flags, &CutConfig::all());
            for (f, c) in pool.counts() {
                *counts.entry(f).or_insert(0) += c;
            }
            m.add_cuts(&pool.cuts).unwrap();
            m
        })
        .collect();
    for_each_solution(inst, 400, |tours| {
        let stops: Vec<_> = tours.iter().map(|t| t.stops.clone()).collect();
        for m in &models {
            let x = assignment_from_tours(m, inst, Some(&g), &stops).unwrap();
            if let Some(v) = m.violation(&x, 1e-6) {
                panic!("{} ({}, reduced {reduced}) rejects {:?}: {v}", inst.name, m.kind, stops);
            }
        }
    })
    .unwrap();
    counts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cuts_keep_every_feasible_solution(n in 2usize..=5, k in 1usize..=2, q in 2u32..=3, tw in 5.0f64..40.0, seed in 0u64..10_000, reduced: bool) {
        let inst = random_instance(&GenParams { n, vehicles: k, capacity: q, tw, ..GenParams::default() }, seed);
        check_cuts_keep_oracle_solutions(&inst, reduced);
    }
}

#[test]
fn every_family_is_exercised_by_the_sweep() {
    let mut total: BTreeMap<CutFamily, usize> = BTreeMap::new();
    for seed in 0..30 {
        let n = 3 + (seed as usize % 3);
        let tw = [8.0, 15.0, 30.0][seed as usize % 3];
        let inst = random_instance(&GenParams { n, vehicles: 2, capacity: 3, tw, ..GenParams::default() }, seed);
        for reduced in [false, true] {
            for (f, c) in check_cuts_keep_oracle_solutions(&inst, reduced) {
                *total.entry(f).or_default() += c;
            }
        }
    }
    for q in [5, 6] {
        check_cuts_keep_oracle_solutions(&two_request_fixture(q), false);
    }
    for f in CutFamily::ALL {
        assert!(total.get(&f).copied().unwrap_or(0) > 0, "{f} never generated: {total:?}");
    }
}

/// Counts of VS1–VS4 recomputed by scanning every arc for every pair.
#[test]
fn sharing_counts_match_direct_enumeration() {
    for seed in 0..5 {
        let inst = random_instance(&GenParams { n: 4, capacity: 3, tw: 30.0, ..GenParams::default() }, seed);
        let flags = compat_flags(&inst);
        let g = EventGraph::build(&inst, &flags, GraphConfig::default());
        let arcs: Vec<_> = g.arc_ids().map(|a| (g.node(g.arc(a).from).clone(), g.node(g.arc(a).to).clone())).collect();
        let count = |pred: &dyn Fn(&darp_core::event_graph::EventNode, &darp_core::event_graph::EventNode) -> bool| {
            arcs.iter().filter(|(v, w)| pred(v, w)).count()
        };
        let mut expected = [0usize; 4];
        for i in 1..=4 {
            for j in i + 1..=4 {
                let hand = |v: &darp_core::event_graph::EventNode, w: &darp_core::event_graph::EventNode| {
                    (v.loc == Loc::Delivery(i) && w.loc == Loc::Pickup(j)) || (v.loc == Loc::Delivery(j) && w.loc == Loc::Pickup(i))
                };
                let s1 = count(&|v, w| {
                    (w.loc == Loc::Pickup(j) && w.onboard.contains(&i)) || (w.loc == Loc::Pickup(i) && w.onboard.contains(&j)) || hand(v, w)
                });
                let s2 = count(&|v, w| {
                    (w.loc == Loc::Delivery(i) && w.onboard.contains(&j)) || (w.loc == Loc::Delivery(j) && w.onboard.contains(&i)) || hand(v, w)
                });
                let s3 = count(&|v, w| {
                    (v.loc == Loc::Delivery(i) && w.loc == Loc::Delivery(j)) || (v.loc == Loc::Delivery(j) && w.loc == Loc::Delivery(i)) || hand(v, w)
                });
                expected[0] += usize::from(s1 > 0);
                expected[1] += usize::from(s2 > 0);
                expected[2] += usize::from(s3 > 0);
                if flags.can_share(i, j) {
                    for k in inst.locations().filter(|&l| l != Loc::Depot) {
                        let s4 = count(&|v, w| hand(v, w) || (w.loc == k && w.onboard.contains(&i) && w.onboard.contains(&j)));
                        expected[3] += usize::from(s4 > 0);
                    }
                }
            }
        }
        let pool = generate_cuts(
            FormulationKind::Eb,
            &inst,
            &g,
            None,
            &flags,
            &CutConfig::only(&[CutFamily::Vs1, CutFamily::Vs2, CutFamily::Vs3, CutFamily::Vs4]),
        );
        let c = pool.counts();
        let got = [CutFamily::Vs1, CutFamily::Vs2, CutFamily::Vs3, CutFamily::Vs4].map(|f| c.get(&f).copied().unwrap_or(0));
        assert_eq!(got, expected, "seed {seed}");
    }
}

#[test]
fn generation_is_deterministic() {
    let inst = random_instance(&GenParams { n: 5, capacity: 3, tw: 15.0, ..GenParams::default() }, 11);
    let flags = compat_flags(&inst);
    let mut g = EventGraph::build(&inst, &flags, GraphConfig::default());
    let (b, _) = reduce(&mut g, &inst).unwrap();
    let dump = || {
        let pool = generate_cuts(FormulationKind::Laeb, &inst, &g, Some(&b), &flags, &CutConfig::all());
        let mut buf = Vec::new();
        pool.write_csv(&mut buf).unwrap();
        (buf, pool.cuts)
    };
    assert_eq!(dump(), dump());
}
