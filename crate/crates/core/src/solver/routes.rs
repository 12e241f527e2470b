//! Route extraction from solved models and independent route validation.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{DarpError, Result};
use crate::event_graph::EventGraph;
use crate::instance::{DarpInstance, Loc};
use crate::models::{FormulationKind, MilpModel, Site, VarRef};

use super::sec::{selected_legs, tours_from_legs};

/// One vehicle tour with its schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Route {
    /// Starts and ends with the depot.
    pub stops: Vec<Loc>,
    /// Service start per stop; the depot entries are departure and return.
    pub times: Vec<f64>,
    /// Load after each stop.
    pub loads: Vec<i64>,
}

impl Route {
    /// Builds a route from inner stops and their service starts, deriving
    /// depot departure and return times.
    pub fn from_stops(inst: &DarpInstance, inner: &[Loc], inner_times: &[f64]) -> Route {
        let mut stops = vec![Loc::Depot];
        stops.extend_from_slice(inner);
        stops.push(Loc::Depot);
        let mut times = Vec::with_capacity(stops.len());
        let first = inner.first().copied();
        times.push(match first {
            Some(l) => (inner_times[0] - inst.time(Loc::Depot, l)).max(inst.earliest(Loc::Depot)),
            None => inst.earliest(Loc::Depot),
        });
        times.extend_from_slice(inner_times);
        times.push(match inner.last() {
            Some(&l) => inner_times[inner.len() - 1] + inst.service(l) + inst.time(l, Loc::Depot),
            None => times[0],
        });
        let mut load = 0;
        let loads = stops
            .iter()
            .map(|&l| {
                load += inst.load_delta(l);
                load
            })
            .collect();
        Route { stops, times, loads }
    }

    pub fn cost(&self, inst: &DarpInstance) -> f64 {
        self.stops.windows(2).map(|w| inst.arc_cost(w[0], w[1])).sum()
    }

    pub fn inner(&self) -> &[Loc] {
        &self.stops[1..self.stops.len() - 1]
    }
}

fn value_of(model: &MilpModel, values: &[f64], meta: VarRef) -> Result<f64> {
    model
        .var(meta)
        .map(|j| values[j])
        .ok_or_else(|| DarpError::Extraction(format!("model has no variable for {meta:?}")))
}

/// Reads the vehicle tours from a solved model. Event-arc models follow the
/// arcs with value one out of the depot event; the location-based and
/// aggregated models follow the location legs. Times come from the model's
/// time variables.
pub fn extract_routes(model: &MilpModel, inst: &DarpInstance, graph: Option<&EventGraph>, values: &[f64]) -> Result<Vec<Route>> {
    if values.len() != model.num_vars() {
        return Err(DarpError::Extraction("solution does not match the model".into()));
    }
    let tours: Vec<(Vec<Loc>, Vec<f64>)> = match model.kind {
        FormulationKind::Eb | FormulationKind::Laeb => {
            let g = graph.ok_or_else(|| DarpError::Extraction(format!("{} extraction needs the event graph", model.kind)))?;
            let mut succ: HashMap<usize, usize> = HashMap::new();
            let mut starts = Vec::new();
            let mut chosen = 0;
            for (v, &x) in model.vars().iter().zip(values) {
                let VarRef::Arc(a) = v.meta else { continue };
                if x <= 0.5 {
                    continue;
                }
                chosen += 1;
                let arc = g.arc(a);
                if arc.from == g.depot() {
                    starts.push(arc.to);
                } else if succ.insert(arc.from, arc.to).is_some() {
                    return Err(DarpError::Extraction(format!("event {} has two outgoing arcs", g.node(arc.from).tuple(g.capacity()))));
                }
            }
            starts.sort();
            let mut used = 0;
            let mut out = Vec::new();
            for s in starts {
                let mut events = Vec::new();
                let mut cur = s;
                used += 1;
                while cur != g.depot() {
                    events.push(cur);
                    if events.len() > 2 * inst.n() {
                        return Err(DarpError::Extraction("arc flow does not return to the depot".into()));
                    }
                    cur = *succ
                        .get(&cur)
                        .ok_or_else(|| DarpError::Extraction(format!("flow stops at {}", g.node(cur).tuple(g.capacity()))))?;
                    used += 1;
                }
                let locs: Vec<Loc> = events.iter().map(|&v| g.node(v).loc).collect();
                let times = events
                    .iter()
                    .map(|&v| match model.kind {
                        FormulationKind::Eb => value_of(model, values, VarRef::EventTime(v)),
                        _ => value_of(model, values, VarRef::Time(Site::At(g.node(v).loc))),
                    })
                    .collect::<Result<Vec<f64>>>()?;
                out.push((locs, times));
            }
            if used != chosen {
                return Err(DarpError::Extraction(format!("{} selected arcs lie on cycles away from the depot", chosen - used)));
            }
            out
        }
        FormulationKind::Lb | FormulationKind::Alaeb => {
            let legs = selected_legs(model, values);
            let tours = tours_from_legs(inst, &legs).map_err(|e| DarpError::Extraction(e.to_string()))?;
            tours
                .into_iter()
                .map(|t| {
                    let times = t
                        .iter()
                        .map(|&l| value_of(model, values, VarRef::Time(Site::At(l))))
                        .collect::<Result<Vec<f64>>>()?;
                    Ok((t, times))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(tours.iter().map(|(l, t)| Route::from_stops(inst, l, t)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Cover,
    Pairing,
    Precedence,
    Capacity,
    Window,
    RideTime,
    Travel,
    Fleet,
    Depot,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Cover => "cover",
            ViolationKind::Pairing => "pairing",
            ViolationKind::Precedence => "precedence",
            ViolationKind::Capacity => "capacity",
            ViolationKind::Window => "window",
            ViolationKind::RideTime => "ride_time",
            ViolationKind::Travel => "travel",
            ViolationKind::Fleet => "fleet",
            ViolationKind::Depot => "depot",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Route index and stop, e.g. `route 1, 3-`.
    pub location: String,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Recomputed routing cost.
    pub objective: f64,
    pub routes: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Slack allowed on times read back from a backend, in minutes.
pub const TIME_TOL: f64 = 1e-3;

/// Checks cover, pairing, precedence, capacity, windows, ride times, travel
/// times between consecutive stops, depot times and fleet size, and
/// recomputes the cost.
pub fn validate_solution(inst: &DarpInstance, routes: &[Route]) -> ValidationReport {
    let mut rep = ValidationReport {
        routes: routes.len(),
        ..ValidationReport::default()
    };
    let mut push = |kind, location: String, magnitude: f64| rep.violations.push(Violation { kind, location, magnitude });

    if routes.len() > inst.vehicles {
        push(ViolationKind::Fleet, "fleet".into(), (routes.len() - inst.vehicles) as f64);
    }
    // (route, position) of each visit
    let mut seen: HashMap<Loc, Vec<(usize, usize)>> = HashMap::new();
    for (r, route) in routes.iter().enumerate() {
        let k = route.stops.len();
        if k < 2 || route.stops[0] != Loc::Depot || route.stops[k - 1] != Loc::Depot || route.times.len() != k {
            push(ViolationKind::Depot, format!("route {r}"), 1.0);
            continue;
        }
        let depot = inst.window(Loc::Depot);
        if route.times[0] < depot.earliest - TIME_TOL {
            push(ViolationKind::Depot, format!("route {r}, departure"), depot.earliest - route.times[0]);
        }
        if route.times[k - 1] > depot.latest + TIME_TOL {
            push(ViolationKind::Depot, format!("route {r}, return"), route.times[k - 1] - depot.latest);
        }
        let mut load = 0i64;
        for p in 0..k {
            let loc = route.stops[p];
            let here = format!("route {r}, {loc}");
            if p > 0 {
                let prev = route.stops[p - 1];
                let ready = route.times[p - 1] + inst.service(prev) + inst.time(prev, loc);
                if route.times[p] < ready - TIME_TOL {
                    push(ViolationKind::Travel, here.clone(), ready - route.times[p]);
                }
            }
            if loc == Loc::Depot {
                if p != 0 && p != k - 1 {
                    push(ViolationKind::Depot, here, 1.0);
                }
                continue;
            }
            seen.entry(loc).or_default().push((r, p));
            let w = inst.window(loc);
            let t = route.times[p];
            if t < w.earliest - TIME_TOL {
                push(ViolationKind::Window, here.clone(), w.earliest - t);
            } else if t > w.latest + TIME_TOL {
                push(ViolationKind::Window, here.clone(), t - w.latest);
            }
            load += inst.load_delta(loc);
            if load > inst.capacity as i64 {
                push(ViolationKind::Capacity, here.clone(), (load - inst.capacity as i64) as f64);
            }
            if load < 0 {
                push(ViolationKind::Capacity, here, (-load) as f64);
            }
        }
    }
    for r in &inst.requests {
        let (p, d) = (Loc::Pickup(r.id), Loc::Delivery(r.id));
        let (ps, ds) = (seen.get(&p).cloned().unwrap_or_default(), seen.get(&d).cloned().unwrap_or_default());
        for (loc, visits) in [(p, &ps), (d, &ds)] {
            if visits.len() != 1 {
                push(ViolationKind::Cover, format!("{loc}"), (visits.len() as f64 - 1.0).abs());
            }
        }
        let (Some(&(rp, kp)), Some(&(rd, kd))) = (ps.first(), ds.first()) else { continue };
        if rp != rd {
            push(ViolationKind::Pairing, format!("request {} (routes {rp}, {rd})", r.id), 1.0);
            continue;
        }
        if kd < kp {
            push(ViolationKind::Precedence, format!("route {rp}, request {}", r.id), (kp - kd) as f64);
            continue;
        }
        let ride = routes[rp].times[kd] - routes[rp].times[kp] - r.service;
        if ride > r.max_ride + TIME_TOL {
            push(ViolationKind::RideTime, format!("route {rp}, request {}", r.id), ride - r.max_ride);
        }
    }
    rep.objective = routes.iter().map(|r| r.cost(inst)).sum();
    rep
}
