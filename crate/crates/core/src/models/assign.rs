//! Maps a set of tours onto the variables of a model, completing the values
//! of events that are not visited.

use std::collections::HashMap;

use super::{MilpModel, Site, VarRef};
use crate::error::{DarpError, Result};
use crate::event_graph::{tour_events, EventGraph};
use crate::instance::{DarpInstance, Loc};
use crate::solver::schedule_route;

/// Variable values realizing `tours` (stop sequences without depots) in
/// `model`, using the earliest schedule of each tour. Unvisited pickup
/// events start at `ℓ_{i+}`, unvisited delivery events at `e_{i-}`.
pub fn assignment_from_tours(
    model: &MilpModel,
    inst: &DarpInstance,
    graph: Option<&EventGraph>,
    tours: &[Vec<Loc>],
) -> Result<Vec<f64>> {
    let mut legs: HashMap<(Site, Site), f64> = HashMap::new();
    let mut times: HashMap<Site, f64> = HashMap::new();
    let mut loads: HashMap<Site, f64> = HashMap::new();
    let mut arcs: HashMap<usize, f64> = HashMap::new();
    let mut event_times: HashMap<usize, f64> = HashMap::new();
    let mut last_return: f64 = 0.0;
    times.insert(Site::Start, 0.0);
    loads.insert(Site::Start, 0.0);
    loads.insert(Site::End, 0.0);

    for stops in tours {
        let mut seq = vec![Loc::Depot];
        seq.extend_from_slice(stops);
        seq.push(Loc::Depot);
        let sched = schedule_route(inst, &seq)
            .ok_or_else(|| DarpError::Extraction(format!("tour {stops:?} has no feasible schedule")))?;
        last_return = last_return.max(sched[seq.len() - 1]);
        let site = |k: usize| match seq[k] {
            Loc::Depot if k == 0 => Site::Start,
            Loc::Depot => Site::End,
            l => Site::At(l),
        };
        let mut load = 0.0;
        for k in 0..seq.len() {
            if k > 0 {
                *legs.entry((site(k - 1), site(k))).or_default() += 1.0;
            }
            if let Loc::Depot = seq[k] {
                continue;
            }
            load += inst.load_delta(seq[k]) as f64;
            times.insert(site(k), sched[k]);
            loads.insert(site(k), load);
        }
        if let Some(g) = graph {
            let events = tour_events(&seq);
            let ids: Vec<usize> = events
                .iter()
                .map(|e| {
                    g.find(e).ok_or_else(|| {
                        DarpError::Extraction(format!("event {} is not in the graph", e.tuple(g.capacity())))
                    })
                })
                .collect::<Result<_>>()?;
            for k in 1..ids.len() {
                let a = g.find_arc(ids[k - 1], ids[k]).ok_or_else(|| {
                    DarpError::Extraction(format!(
                        "arc {} -> {} is not in the graph",
                        events[k - 1].tuple(g.capacity()),
                        events[k].tuple(g.capacity())
                    ))
                })?;
                *arcs.entry(a).or_default() += 1.0;
                if k < ids.len() - 1 {
                    event_times.insert(ids[k], sched[k]);
                }
            }
        }
    }
    times.insert(Site::End, last_return);

    let mut x = vec![0.0; model.num_vars()];
    for (j, v) in model.vars().iter().enumerate() {
        x[j] = match v.meta {
            VarRef::Arc(a) => arcs.get(&a).copied().unwrap_or(0.0),
            VarRef::Leg(a, b) => legs.get(&(a, b)).copied().unwrap_or(0.0),
            VarRef::Time(s) => *times.get(&s).ok_or_else(|| {
                DarpError::Extraction(format!("location {} is not visited", s.code()))
            })?,
            VarRef::Load(s) => loads.get(&s).copied().unwrap_or(0.0),
            VarRef::EventTime(v) => match event_times.get(&v) {
                Some(&t) => t,
                None => {
                    let g = graph.expect("event times need the graph");
                    match g.node(v).loc {
                        Loc::Depot => last_return,
                        l @ Loc::Pickup(_) => inst.latest(l),
                        l => inst.earliest(l),
                    }
                }
            },
        };
    }
    Ok(x)
}
