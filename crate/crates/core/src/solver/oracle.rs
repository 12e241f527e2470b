//! Exhaustive enumeration of tours and solutions for tiny instances. Used as
//! an independent reference for the MILP models and the preprocessing.

use crate::error::{DarpError, Result};
use crate::instance::{DarpInstance, Loc, Minutes};

use super::schedule::schedule_route;

/// Largest request count the enumeration accepts.
pub const ORACLE_MAX_REQUESTS: usize = 7;

/// One feasible vehicle tour. `stops` excludes the depot at both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Tour {
    pub stops: Vec<Loc>,
    pub cost: f64,
    /// Bit `i - 1` is set when request `i` is served.
    pub requests: u32,
}

impl Tour {
    /// Stops with the depot prepended and appended.
    pub fn with_depots(&self) -> Vec<Loc> {
        let mut seq = Vec::with_capacity(self.stops.len() + 2);
        seq.push(Loc::Depot);
        seq.extend_from_slice(&self.stops);
        seq.push(Loc::Depot);
        seq
    }

    /// Earliest schedule including both depot visits.
    pub fn schedule(&self, inst: &DarpInstance) -> Vec<Minutes> {
        schedule_route(inst, &self.with_depots()).expect("enumerated tours are feasible")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub objective: f64,
    pub routes: Vec<Tour>,
}

fn check_size(inst: &DarpInstance) -> Result<()> {
    if inst.n() > ORACLE_MAX_REQUESTS {
        return Err(DarpError::TooLarge {
            n: inst.n(),
            cap: ORACLE_MAX_REQUESTS,
        });
    }
    Ok(())
}

fn route_cost(inst: &DarpInstance, seq: &[Loc]) -> f64 {
    seq.windows(2).map(|w| inst.arc_cost(w[0], w[1])).sum()
}

struct Dfs<'a, F> {
    inst: &'a DarpInstance,
    seq: Vec<Loc>,
    load: u32,
    picked: u32,
    onboard: u32,
    emit: F,
}

impl<F: FnMut(&Tour)> Dfs<'_, F> {
    fn go(&mut self) {
        let n = self.inst.n();
        for i in 1..=n {
            let bit = 1u32 << (i - 1);
            let next = if self.onboard & bit != 0 {
                Loc::Delivery(i)
            } else if self.picked & bit == 0 && self.load + self.inst.request(i).load <= self.inst.capacity {
                Loc::Pickup(i)
            } else {
                continue;
            };
            self.seq.push(next);
            if schedule_route(self.inst, &self.seq).is_some() {
                let q = self.inst.request(i).load;
                let (load, picked, onboard) = (self.load, self.picked, self.onboard);
                if next.is_pickup() {
                    self.load += q;
                    self.picked |= bit;
                    self.onboard |= bit;
                } else {
                    self.load -= q;
                    self.onboard &= !bit;
                }
                if self.onboard == 0 {
                    self.seq.push(Loc::Depot);
                    if schedule_route(self.inst, &self.seq).is_some() {
                        let tour = Tour {
                            stops: self.seq[1..self.seq.len() - 1].to_vec(),
                            cost: route_cost(self.inst, &self.seq),
                            requests: self.picked,
                        };
                        (self.emit)(&tour);
                    }
                    self.seq.pop();
                }
                self.go();
                self.load = load;
                self.picked = picked;
                self.onboard = onboard;
            }
            self.seq.pop();
        }
    }
}

/// Calls `f` for every feasible tour serving at least one request.
pub fn for_each_tour(inst: &DarpInstance, f: impl FnMut(&Tour)) -> Result<()> {
    check_size(inst)?;
    let mut dfs = Dfs {
        inst,
        seq: vec![Loc::Depot],
        load: 0,
        picked: 0,
        onboard: 0,
        emit: f,
    };
    dfs.go();
    Ok(())
}

/// All feasible tours, grouped by the set of requests served.
pub fn tours_by_mask(inst: &DarpInstance) -> Result<Vec<Vec<Tour>>> {
    let mut out = vec![Vec::new(); 1 << inst.n()];
    for_each_tour(inst, |t| out[t.requests as usize].push(t.clone()))?;
    Ok(out)
}

/// Optimal solution by enumeration, or `None` if the fleet cannot serve
/// all requests.
pub fn brute_force(inst: &DarpInstance) -> Result<Option<OracleSolution>> {
    check_size(inst)?;
    let n = inst.n();
    let full = (1usize << n) - 1;
    let mut best: Vec<Option<Tour>> = vec![None; full + 1];
    for_each_tour(inst, |t| {
        let slot = &mut best[t.requests as usize];
        if slot.as_ref().is_none_or(|b| t.cost < b.cost) {
            *slot = Some(t.clone());
        }
    })?;
    // cover[k][mask]: cheapest cost of serving exactly `mask` with k tours,
    // with the chosen first tour for reconstruction
    let k_max = inst.vehicles.min(n);
    let mut cover: Vec<Vec<Option<(f64, usize)>>> = vec![vec![None; full + 1]; k_max + 1];
    cover[0][0] = Some((0.0, 0));
    for k in 1..=k_max {
        for mask in 1..=full {
            let low = mask & mask.wrapping_neg();
            let mut sub = mask;
            let mut here: Option<(f64, usize)> = None;
            while sub > 0 {
                if sub & low != 0 {
                    if let (Some(t), Some((rest, _))) = (&best[sub], cover[k - 1][mask ^ sub]) {
                        let c = t.cost + rest;
                        if here.is_none_or(|(h, _)| c < h) {
                            here = Some((c, sub));
                        }
                    }
                }
                sub = (sub - 1) & mask;
            }
            cover[k][mask] = here;
        }
    }
    let Some((k, (objective, _))) = (1..=k_max)
        .filter_map(|k| cover[k][full].map(|c| (k, c)))
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
    else {
        return Ok(None);
    };
    let mut routes = Vec::with_capacity(k);
    let (mut mask, mut k) = (full, k);
    while mask != 0 {
        let (_, sub) = cover[k][mask].expect("reconstruction follows stored choices");
        routes.push(best[sub].clone().expect("chosen tour exists"));
        mask ^= sub;
        k -= 1;
    }
    Ok(Some(OracleSolution { objective, routes }))
}

/// Calls `f` for every feasible solution (a partition of all requests into
/// at most `K` feasible tours) until `limit` solutions have been visited.
/// Returns the number visited.
pub fn for_each_solution(
    inst: &DarpInstance,
    limit: usize,
    mut f: impl FnMut(&[&Tour]),
) -> Result<usize> {
    let by_mask = tours_by_mask(inst)?;
    let full = (1u32 << inst.n()) - 1;
    let mut count = 0;
    let mut chosen: Vec<&Tour> = Vec::new();
    fn rec<'t>(
        by_mask: &'t [Vec<Tour>],
        covered: u32,
        full: u32,
        vehicles: usize,
        chosen: &mut Vec<&'t Tour>,
        count: &mut usize,
        limit: usize,
        f: &mut dyn FnMut(&[&Tour]),
    ) {
        if *count >= limit {
            return;
        }
        if covered == full {
            *count += 1;
            f(chosen);
            return;
        }
        if chosen.len() == vehicles {
            return;
        }
        let free = full & !covered;
        let low = free & free.wrapping_neg();
        let mut sub = free;
        while sub > 0 {
            if sub & low != 0 {
                for t in &by_mask[sub as usize] {
                    chosen.push(t);
                    rec(by_mask, covered | sub, full, vehicles, chosen, count, limit, f);
                    chosen.pop();
                }
            }
            sub = (sub - 1) & free;
        }
    }
    rec(&by_mask, 0, full, inst.vehicles, &mut chosen, &mut count, limit, &mut f);
    Ok(count)
}
