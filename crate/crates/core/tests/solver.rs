use darp_core::event_graph::{EventGraph, GraphConfig};
use darp_core::gen::{random_instance, random_suite, GenParams};
use darp_core::harness::{solve_instance, Flags, RunConfig};
use darp_core::instance::{compat_flags, Loc};
use darp_core::models::{assignment_from_tours, build, Domain, FormulationKind, MilpModel, Sense, Site, VarRef};
use darp_core::solver::{
    brute_force, export_model, solve_external, Backend, BackendConfig, ExportFormat, SolveStatus,
};
use darp_core::DarpInstance;

fn backend() -> BackendConfig {
    BackendConfig::from_env().expect("no backend available").with_time_limit(120.0)
}

fn toy_infeasible() -> MilpModel {
    let mut m = MilpModel::new("toy", FormulationKind::Lb);
    let x = m.add_var(VarRef::Time(Site::Start), "x".into(), 0.0, 1.0, Domain::Continuous, 1.0);
    m.add_row("atleast".into(), vec![(x, 1.0)], Sense::Ge, 2.0);
    m
}

#[test]
fn infeasible_toy_on_every_backend() {
    let mut backends = vec![Backend::highs()];
    backends.extend(Backend::cbc());
    for b in backends {
        let label = b.label();
        let res = solve_external(&toy_infeasible(), &BackendConfig::new(b)).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible, "{label}");
        assert!(res.values.is_empty());
    }
}

#[test]
fn single_request_laeb_has_the_forced_chain() {
    let inst = random_instance(&GenParams { n: 1, ..GenParams::default() }, 3);
    let g = EventGraph::build(&inst, &compat_flags(&inst), GraphConfig::default());
    let m = build(FormulationKind::Laeb, &inst, Some(&g)).unwrap();
    let text = export_model(&m, ExportFormat::Lp).unwrap();
    let arcs = m.vars().iter().filter(|v| matches!(v.meta, VarRef::Arc(_))).count();
    let times: Vec<_> = m.vars().iter().filter(|v| matches!(v.meta, VarRef::Time(_))).collect();
    assert_eq!(arcs, 3);
    // 1+ and 1-, plus the depot copies
    assert_eq!(times.iter().filter(|v| matches!(v.meta, VarRef::Time(Site::At(_)))).count(), 2);
    for v in m.vars() {
        assert!(text.contains(&v.name), "{} missing from export", v.name);
    }

    let cfg = RunConfig::new(FormulationKind::Laeb, Flags::none(), backend());
    let out = solve_instance(&inst, &cfg, None).unwrap();
    assert_eq!(out.routes.len(), 1);
    assert_eq!(out.routes[0].stops, vec![Loc::Depot, Loc::Pickup(1), Loc::Delivery(1), Loc::Depot]);
    let direct = inst.arc_cost(Loc::Depot, Loc::Pickup(1))
        + inst.arc_cost(Loc::Pickup(1), Loc::Delivery(1))
        + inst.arc_cost(Loc::Delivery(1), Loc::Depot);
    assert!((out.record.objective.unwrap() - direct).abs() < 1e-6);
}

fn assert_matches_oracle(inst: &DarpInstance, kind: FormulationKind, flags: Flags) {
    let oracle = brute_force(inst).unwrap().expect("suite instances are feasible");
    let cfg = RunConfig::new(kind, flags, backend());
    let out = solve_instance(inst, &cfg, None).unwrap();
    let rec = &out.record;
    assert_eq!(rec.status, "optimal", "{} {kind} {flags}", inst.name);
    let z = rec.objective.unwrap();
    assert!((z - oracle.objective).abs() <= 1e-6, "{} {kind} {flags}: {z} vs oracle {}", inst.name, oracle.objective);
    assert_eq!(rec.violations, 0, "{} {kind}: {:?}", inst.name, out.validation);
    assert!(rec.error.is_none(), "{:?}", rec.error);
    assert!(out.routes.len() <= inst.vehicles);
}

#[test]
fn every_formulation_matches_the_oracle() {
    for inst in random_suite(8, 11) {
        for kind in FormulationKind::ALL {
            assert_matches_oracle(&inst, kind, Flags::none());
        }
        for kind in [FormulationKind::Eb, FormulationKind::Laeb, FormulationKind::Alaeb] {
            assert_matches_oracle(&inst, kind, Flags::all());
        }
    }
}

#[test]
fn both_backends_agree() {
    let Some(cbc) = Backend::cbc() else {
        eprintln!("CBC not found; cross-backend check skipped");
        return;
    };
    for inst in random_suite(3, 5) {
        let mut z = Vec::new();
        for b in [Backend::highs(), cbc.clone()] {
            let cfg = RunConfig::new(FormulationKind::Laeb, Flags::all(), BackendConfig::new(b));
            z.push(solve_instance(&inst, &cfg, None).unwrap().record.objective.unwrap());
        }
        assert!((z[0] - z[1]).abs() <= 1e-6, "{}: {z:?}", inst.name);
    }
}

#[test]
fn relaxations_sit_below_the_optimum_and_cuts_tighten_them() {
    for inst in random_suite(6, 23) {
        let z = brute_force(&inst).unwrap().unwrap().objective;
        let lp = |flags: Flags| {
            let mut cfg = RunConfig::new(FormulationKind::Laeb, flags, backend());
            cfg.relax = true;
            solve_instance(&inst, &cfg, None).unwrap().record.objective.unwrap()
        };
        let plain = lp(Flags::none());
        let tight = lp(Flags::all());
        assert!(plain <= z + 1e-6 && tight <= z + 1e-6, "{}: {plain} {tight} {z}", inst.name);
        assert!(tight >= plain - 1e-6, "{}: cuts lowered the LP from {plain} to {tight}", inst.name);
    }
}

/// The ALAEB solution routes map back onto a 0/1 arc flow satisfying every
/// row, made of at most K depot-to-depot paths.
#[test]
fn alaeb_solutions_lift_to_unit_flows() {
    for inst in random_suite(6, 31) {
        let cfg = RunConfig::new(FormulationKind::Alaeb, Flags::none(), backend());
        let out = solve_instance(&inst, &cfg, None).unwrap();
        let g = out.prepared.graph.as_ref().unwrap();
        let m = &out.prepared.model;
        let stops: Vec<Vec<Loc>> = out.routes.iter().map(|r| r.inner().to_vec()).collect();
        assert!(stops.len() <= inst.vehicles);
        let x = assignment_from_tours(m, &inst, Some(g), &stops).unwrap();
        assert_eq!(m.violation(&x, 1e-6), None, "{}", inst.name);
        let depot_out: f64 = g
            .out_arcs(g.depot())
            .filter_map(|a| m.var(VarRef::Arc(a)))
            .map(|j| x[j])
            .sum();
        assert_eq!(depot_out.round() as usize, stops.len());
    }
}

#[test]
fn missing_command_backend_is_reported() {
    let cfg = BackendConfig::new(Backend::Command { template: "definitely-not-a-solver {model_path}".into() });
    let err = solve_external(&toy_infeasible(), &cfg).unwrap_err();
    assert!(matches!(err, darp_core::DarpError::BackendMissing { .. }), "{err}");
}
