//! Separation of the pairing/precedence family of the location-based model
//! on integer solutions, and the cut loop built on it.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::backend::{solve_external, BackendConfig, SolveResult};
use crate::error::{DarpError, Result};
use crate::instance::{DarpInstance, Loc};
use crate::models::{MilpModel, Sense, Site, VarRef};

/// Legs `(a, b)` whose variable is at least one half.
pub fn selected_legs(model: &MilpModel, values: &[f64]) -> Vec<(Site, Site)> {
    model
        .vars()
        .iter()
        .zip(values)
        .filter_map(|(v, &x)| match v.meta {
            VarRef::Leg(a, b) if x > 0.5 => Some((a, b)),
            _ => None,
        })
        .collect()
}

/// Follows the legs out of `0+` into tours of stops (depots excluded).
/// Every stop must have exactly one incoming and one outgoing leg, and
/// every tour must end in `0-`.
pub fn tours_from_legs(inst: &DarpInstance, legs: &[(Site, Site)]) -> Result<Vec<Vec<Loc>>> {
    let malformed = |m: String| DarpError::MalformedSolution(m);
    let mut succ: HashMap<Site, Site> = HashMap::new();
    let mut indeg: HashMap<Site, usize> = HashMap::new();
    let mut starts = Vec::new();
    for &(a, b) in legs {
        if a == Site::Start {
            starts.push(b);
        } else if succ.insert(a, b).is_some() {
            return Err(malformed(format!("{} has two outgoing legs", a.code())));
        }
        *indeg.entry(b).or_default() += 1;
    }
    for loc in inst.locations().filter(|&l| l != Loc::Depot) {
        let s = Site::At(loc);
        let (i, o) = (indeg.get(&s).copied().unwrap_or(0), usize::from(succ.contains_key(&s)));
        if i != 1 || o != 1 {
            return Err(malformed(format!("{} has in-degree {i} and out-degree {o}", s.code())));
        }
    }
    starts.sort();
    let mut tours = Vec::new();
    let mut seen = 0;
    for first in starts {
        let mut tour = Vec::new();
        let mut cur = first;
        while let Site::At(loc) = cur {
            tour.push(loc);
            seen += 1;
            if tour.len() > 2 * inst.n() {
                return Err(malformed("tour does not return to the depot".into()));
            }
            cur = succ[&cur];
        }
        if cur != Site::End {
            return Err(malformed(format!("tour ends in {}", cur.code())));
        }
        tours.push(tour);
    }
    if seen != 2 * inst.n() {
        return Err(malformed("some stops lie on cycles away from the depot".into()));
    }
    Ok(tours)
}

/// Violated sets `S = {0+} ∪ prefix` where the prefix of a tour ends in a
/// delivery `i-` whose pickup is not earlier on the same tour. Each set
/// comes sorted.
pub fn separate_sec(inst: &DarpInstance, legs: &[(Site, Site)]) -> Result<Vec<Vec<Site>>> {
    let tours = tours_from_legs(inst, legs)?;
    let mut out: Vec<Vec<Site>> = Vec::new();
    let mut dedup = HashSet::new();
    for tour in &tours {
        let mut picked = HashSet::new();
        for (k, &loc) in tour.iter().enumerate() {
            match loc {
                Loc::Pickup(i) => {
                    picked.insert(i);
                }
                Loc::Delivery(i) if !picked.contains(&i) => {
                    let set: BTreeSet<Site> = std::iter::once(Site::Start).chain(tour[..=k].iter().map(|&l| Site::At(l))).collect();
                    let set: Vec<Site> = set.into_iter().collect();
                    if dedup.insert(set.clone()) {
                        out.push(set);
                    }
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Adds `Σ_{a,b ∈ S} x̄_ab ≤ |S| − 2` for each set as rows `sec__k`.
pub fn add_sec_rows(model: &mut MilpModel, sets: &[Vec<Site>]) -> usize {
    let first = model.rows_in_family("sec").count();
    for (k, s) in (first..).zip(sets) {
        let mut terms = Vec::new();
        for &a in s {
            for &b in s {
                if let Some(j) = model.var(VarRef::Leg(a, b)) {
                    terms.push((j, 1.0));
                }
            }
        }
        model.add_row(format!("sec__{k}"), terms, Sense::Le, s.len() as f64 - 2.0);
    }
    sets.len()
}

#[derive(Clone, Debug)]
pub struct SecLoopOutcome {
    pub result: SolveResult,
    pub iterations: usize,
    pub rows_added: usize,
    /// Summed backend time over all iterations.
    pub total_time: f64,
}

/// Solve, separate, add, re-solve until no set is violated. Each round adds
/// at least one set not seen before; a repeated set means the backend
/// returned a point violating a row it was given, which is an error.
pub fn solve_with_sec_loop(model: &mut MilpModel, inst: &DarpInstance, cfg: &BackendConfig, max_iterations: usize) -> Result<SecLoopOutcome> {
    let mut added: HashSet<Vec<Site>> = HashSet::new();
    let mut total_time = 0.0;
    for iteration in 1..=max_iterations {
        let result = solve_external(model, cfg)?;
        total_time += result.wall_time;
        if !result.status.has_solution() {
            return Ok(SecLoopOutcome { result, iterations: iteration, rows_added: added.len(), total_time });
        }
        let sets = separate_sec(inst, &selected_legs(model, &result.values))?;
        if sets.is_empty() {
            return Ok(SecLoopOutcome { result, iterations: iteration, rows_added: added.len(), total_time });
        }
        let fresh: Vec<Vec<Site>> = sets.into_iter().filter(|s| !added.contains(s)).collect();
        if fresh.is_empty() {
            return Err(DarpError::MalformedSolution("backend solution violates a set already added".into()));
        }
        log::debug!("{}: round {iteration} adds {} sets", model.name, fresh.len());
        add_sec_rows(model, &fresh);
        added.extend(fresh);
    }
    Err(DarpError::Precondition(format!("cut loop did not converge in {max_iterations} rounds")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_instance, GenParams};
    use crate::models::build_lb;

    fn legs_of(tours: &[Vec<Loc>]) -> Vec<(Site, Site)> {
        let mut out = Vec::new();
        for t in tours {
            let mut prev = Site::Start;
            for &l in t {
                out.push((prev, Site::At(l)));
                prev = Site::At(l);
            }
            out.push((prev, Site::End));
        }
        out
    }

    #[test]
    fn paired_tours_pass() {
        let inst = random_instance(&GenParams { n: 2, ..GenParams::default() }, 1);
        let tours = vec![vec![Loc::Pickup(1), Loc::Delivery(1)], vec![Loc::Pickup(2), Loc::Delivery(2)]];
        assert!(separate_sec(&inst, &legs_of(&tours)).unwrap().is_empty());
    }

    #[test]
    fn request_split_over_two_tours_yields_one_set() {
        let inst = random_instance(&GenParams { n: 2, ..GenParams::default() }, 1);
        let tours = vec![vec![Loc::Pickup(1), Loc::Pickup(2), Loc::Delivery(2)], vec![Loc::Delivery(1)]];
        let sets = separate_sec(&inst, &legs_of(&tours)).unwrap();
        assert_eq!(sets, vec![vec![Site::Start, Site::At(Loc::Delivery(1))]]);
    }

    #[test]
    fn crossed_requests_yield_a_set_per_tour() {
        let inst = random_instance(&GenParams { n: 2, ..GenParams::default() }, 1);
        let tours = vec![vec![Loc::Pickup(1), Loc::Delivery(2)], vec![Loc::Pickup(2), Loc::Delivery(1)]];
        let sets = separate_sec(&inst, &legs_of(&tours)).unwrap();
        // tour 1 delivers 2 without picking it up; tour 2 likewise for 1
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0], vec![Site::Start, Site::At(Loc::Pickup(1)), Site::At(Loc::Delivery(2))]);

        let mut m = build_lb(&inst);
        add_sec_rows(&mut m, &sets);
        let row = m.rows_in_family("sec").next().unwrap();
        // x̄(0+,1+), x̄(1+,2-), x̄(2-,1+); x̄(0+,2-) is not a model variable
        assert_eq!(row.terms.len(), 3);
        assert_eq!(row.rhs, 1.0);
    }

    #[test]
    fn reversed_pair_in_one_tour() {
        let inst = random_instance(&GenParams { n: 1, ..GenParams::default() }, 1);
        let legs = legs_of(&[vec![Loc::Delivery(1), Loc::Pickup(1)]]);
        let sets = separate_sec(&inst, &legs).unwrap();
        assert_eq!(sets, vec![vec![Site::Start, Site::At(Loc::Delivery(1))]]);
    }

    #[test]
    fn degree_errors_are_malformed() {
        let inst = random_instance(&GenParams { n: 2, ..GenParams::default() }, 1);
        let legs = legs_of(&[vec![Loc::Pickup(1), Loc::Delivery(1)]]);
        assert!(matches!(separate_sec(&inst, &legs), Err(DarpError::MalformedSolution(_))));
        let mut legs = legs_of(&[vec![Loc::Pickup(1), Loc::Delivery(1)]]);
        let cyc = [Site::At(Loc::Pickup(2)), Site::At(Loc::Delivery(2))];
        legs.push((cyc[0], cyc[1]));
        legs.push((cyc[1], cyc[0]));
        assert!(matches!(separate_sec(&inst, &legs), Err(DarpError::MalformedSolution(_))));
    }
}
