use darp_core::event_graph::{EventGraph, GraphConfig};
use darp_core::gen::{random_instance, two_request_fixture, GenParams};
use darp_core::instance::compat_flags;
use darp_core::models::{assignment_from_tours, build, FormulationKind};
use darp_core::preprocessing::reduce;
use darp_core::solver::oracle::for_each_solution;
use darp_core::DarpInstance;
use proptest::prelude::*;

/// Every oracle-feasible solution, mapped onto each model, satisfies all
/// rows and has the tour cost as objective.
fn check_models_admit_oracle_solutions(inst: &DarpInstance, reduced: bool) {
    let mut g = EventGraph::build(inst, &compat_flags(inst), GraphConfig::default());
    if reduced {
        reduce(&mut g, inst).unwrap();
    }
    let models: Vec<_> = FormulationKind::ALL
        .iter()
        .map(|&k| build(k, inst, Some(&g)).unwrap())
        .collect();
    for_each_solution(inst, 400, |tours| {
        let stops: Vec<_> = tours.iter().map(|t| t.stops.clone()).collect();
        let cost: f64 = tours.iter().map(|t| t.cost).sum();
        for m in &models {
            let x = assignment_from_tours(m, inst, Some(&g), &stops).unwrap();
            if let Some(v) = m.violation(&x, 1e-6) {
                panic!("{} ({}) rejects {:?}: {v}", inst.name, m.kind, stops);
            }
            assert!((m.objective_value(&x) - cost).abs() < 1e-6);
        }
    })
    .unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn models_admit_every_feasible_solution(n in 2usize..=4, k in 1usize..=2, q in 2u32..=3, tw in 5.0f64..40.0, seed in 0u64..10_000, reduced: bool) {
        let inst = random_instance(&GenParams { n, vehicles: k, capacity: q, tw, ..GenParams::default() }, seed);
        check_models_admit_oracle_solutions(&inst, reduced);
    }
}

#[test]
fn fixture_solutions_fit_all_models() {
    for q in [5, 6] {
        check_models_admit_oracle_solutions(&two_request_fixture(q), false);
    }
}
