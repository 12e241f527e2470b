//! Window conditions under which the LAEB relaxation is integral, and the
//! accompanying arc deletion.

use crate::error::{DarpError, Result};
use crate::event_graph::{ArcId, EventGraph};
use crate::instance::{DarpInstance, Loc, TIME_EPS};

/// Checks that every request's window pair respects its ride limit and that
/// the windows order every pair of stops, i.e. either `ℓ_i + s_i + t̄_ij ≤ e_j`
/// or `e_i + s_i + t̄_ij > ℓ_j`. The depot is treated as `[0, T]` at both
/// ends, which only requires every stop to allow a return by `T`.
pub fn check_theorem2_conditions(inst: &DarpInstance) -> Result<()> {
    for r in &inst.requests {
        if r.delivery.latest - r.pickup.earliest - r.service > r.max_ride + TIME_EPS {
            return Err(DarpError::Precondition(format!(
                "request {}: ℓ_{{i-}} − e_{{i+}} − s exceeds the ride limit",
                r.id
            )));
        }
    }
    let stops: Vec<Loc> = inst.locations().filter(|&l| l != Loc::Depot).collect();
    for &i in &stops {
        let back = inst.latest(i) + inst.service(i) + inst.time(i, Loc::Depot);
        if back > inst.horizon + TIME_EPS {
            return Err(DarpError::Precondition(format!(
                "pair ({i}, 0): return from {i} can end after the horizon"
            )));
        }
        for &j in &stops {
            if i == j {
                continue;
            }
            let st = inst.service(i) + inst.time(i, j);
            let ordered = inst.latest(i) + st <= inst.earliest(j) + TIME_EPS;
            let impossible = inst.earliest(i) + st > inst.latest(j) + TIME_EPS;
            if !(ordered || impossible) {
                return Err(DarpError::Precondition(format!(
                    "pair ({i}, {j}) is neither ordered nor separated by its windows"
                )));
            }
        }
    }
    Ok(())
}

/// Verifies the conditions and deletes every arc `(v, w)` with
/// `ℓ_{w1} < e_{v1} + s_{v1} + t̄_{v1 w1}`. Returns the deleted arcs.
pub fn apply_theorem2_arc_deletion(g: &mut EventGraph, inst: &DarpInstance) -> Result<Vec<ArcId>> {
    check_theorem2_conditions(inst)?;
    let doomed: Vec<ArcId> = g
        .arc_ids()
        .filter(|&a| {
            let arc = g.arc(a);
            let (from, to) = (g.node(arc.from).loc, g.node(arc.to).loc);
            inst.latest(to) + TIME_EPS < inst.earliest(from) + inst.service(from) + arc.time
        })
        .collect();
    for &a in &doomed {
        g.delete_arc(a);
    }
    Ok(doomed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_graph::GraphConfig;
    use crate::gen::{point_window_instance, random_instance, GenParams};
    use crate::instance::CompatFlags;

    #[test]
    fn point_windows_satisfy_conditions_and_leave_acyclic_graph() {
        for seed in 0..5 {
            let inst = point_window_instance(4, 2, 3, seed);
            let mut g = EventGraph::build(&inst, &CompatFlags::all_true(4), GraphConfig::default());
            apply_theorem2_arc_deletion(&mut g, &inst).unwrap();
            // every surviving non-depot arc goes forward in time
            for a in g.arc_ids() {
                let arc = g.arc(a);
                let (v, w) = (g.node(arc.from), g.node(arc.to));
                if !v.is_depot() && !w.is_depot() {
                    assert!(inst.earliest(v.loc) < inst.earliest(w.loc) + TIME_EPS || inst.service(v.loc) + arc.time == 0.0);
                }
            }
        }
    }

    #[test]
    fn wide_windows_are_rejected_with_the_pair() {
        let inst = random_instance(&GenParams { n: 3, tw: 60.0, ..GenParams::default() }, 1);
        let mut g = EventGraph::build(&inst, &CompatFlags::all_true(3), GraphConfig::default());
        let err = apply_theorem2_arc_deletion(&mut g, &inst).unwrap_err();
        assert!(err.to_string().contains("request") || err.to_string().contains("pair"), "{err}");
    }
}
