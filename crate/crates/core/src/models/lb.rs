//! Location-based model over `J̄ = P ∪ D ∪ {0+, 0-}`. The pairing and
//! precedence family is not enumerated; it is separated on integer
//! solutions by the solver.

use super::{Domain, MilpModel, Sense, Site, VarRef};
use crate::instance::{DarpInstance, Loc};

fn site_window(inst: &DarpInstance, s: Site) -> (f64, f64) {
    let w = inst.window(s.loc());
    (w.earliest, w.latest)
}

/// `𝕀_{j ∈ P} · q_j`: the signed load change at a site.
fn signed_load(inst: &DarpInstance, s: Site) -> f64 {
    match s {
        Site::At(l) => inst.load_delta(l) as f64,
        _ => 0.0,
    }
}

/// Arcs of the complete location graph that can occur in a tour at all:
/// `0+` only to pickups, only deliveries to `0-`, and never `i- → i+`.
pub(crate) fn lb_legs(inst: &DarpInstance) -> Vec<(Site, Site)> {
    let n = inst.n();
    let stops: Vec<Loc> = inst.locations().filter(|&l| l != Loc::Depot).collect();
    let mut legs = Vec::new();
    for i in 1..=n {
        legs.push((Site::Start, Site::At(Loc::Pickup(i))));
    }
    for &a in &stops {
        for &b in &stops {
            let back = matches!((a, b), (Loc::Delivery(i), Loc::Pickup(j)) if i == j);
            if a != b && !back {
                legs.push((Site::At(a), Site::At(b)));
            }
        }
    }
    for i in 1..=n {
        legs.push((Site::At(Loc::Delivery(i)), Site::End));
    }
    legs
}

pub fn build_lb(inst: &DarpInstance) -> MilpModel {
    let mut m = MilpModel::new(format!("{}-lb", inst.name), super::FormulationKind::Lb);
    let n = inst.n();
    let q_cap = inst.capacity as f64;
    let sites: Vec<Site> = std::iter::once(Site::Start)
        .chain(inst.locations().filter(|&l| l != Loc::Depot).map(Site::At))
        .chain(std::iter::once(Site::End))
        .collect();

    let legs = lb_legs(inst);
    let mut y = Vec::with_capacity(legs.len());
    for &(a, b) in &legs {
        let cost = inst.arc_cost(a.loc(), b.loc());
        let name = format!("y__{}__{}", a.code(), b.code());
        y.push(m.add_var(VarRef::Leg(a, b), name, 0.0, 1.0, Domain::Binary, cost));
    }
    for &s in &sites {
        let (e, l) = site_window(inst, s);
        m.add_var(VarRef::Time(s), format!("t__{}", s.code()), e, l, Domain::Continuous, 0.0);
    }
    for &s in &sites {
        let iq = signed_load(inst, s);
        m.add_var(
            VarRef::Load(s),
            format!("q__{}", s.code()),
            iq.max(0.0),
            q_cap.min(q_cap + iq),
            Domain::Continuous,
            0.0,
        );
    }

    for &s in &sites[1..sites.len() - 1] {
        let ins = legs.iter().zip(&y).filter(|((_, b), _)| *b == s).map(|(_, &j)| (j, 1.0)).collect();
        m.add_row(format!("degin__{}", s.code()), ins, Sense::Eq, 1.0);
        let outs = legs.iter().zip(&y).filter(|((a, _), _)| *a == s).map(|(_, &j)| (j, 1.0)).collect();
        m.add_row(format!("degout__{}", s.code()), outs, Sense::Eq, 1.0);
    }
    let fleet = legs
        .iter()
        .zip(&y)
        .filter(|((a, _), _)| *a == Site::Start)
        .map(|(_, &j)| (j, 1.0))
        .collect();
    m.add_row("fleet__o".into(), fleet, Sense::Le, inst.vehicles as f64);

    for (&(a, b), &yj) in legs.iter().zip(&y) {
        let (la, lb) = (a.loc(), b.loc());
        let (_, late_a) = site_window(inst, a);
        let (early_b, _) = site_window(inst, b);
        let st = inst.service(la) + inst.time(la, lb);
        let big = (late_a + st - early_b).max(0.0);
        let ta = m.var(VarRef::Time(a)).expect("time variable");
        let tb = m.var(VarRef::Time(b)).expect("time variable");
        // B_b − B_a − M·y ≥ s + t − M
        m.add_row(
            format!("time__{}__{}", a.code(), b.code()),
            vec![(tb, 1.0), (ta, -1.0), (yj, -big)],
            Sense::Ge,
            st - big,
        );
        let qa = m.var(VarRef::Load(a)).expect("load variable");
        let qb = m.var(VarRef::Load(b)).expect("load variable");
        // Q_b − Q_a − Q·y ≥ 𝕀 q_b − Q
        m.add_row(
            format!("cap__{}__{}", a.code(), b.code()),
            vec![(qb, 1.0), (qa, -1.0), (yj, -q_cap)],
            Sense::Ge,
            signed_load(inst, b) - q_cap,
        );
    }
    for i in 1..=n {
        let r = inst.request(i);
        let tp = m.var(VarRef::Time(Site::At(Loc::Pickup(i)))).expect("time variable");
        let td = m.var(VarRef::Time(Site::At(Loc::Delivery(i)))).expect("time variable");
        m.add_row(
            format!("ride__{i}"),
            vec![(td, 1.0), (tp, -1.0)],
            Sense::Le,
            r.service + r.max_ride,
        );
    }
    m
}
