//! Exact timing feasibility of a fixed visiting sequence.
//!
//! All constraints along a chain are difference constraints
//! (`B_b ≥ B_a + w`) plus window boxes, so the earliest schedule is the least
//! fixpoint of those lower-bound rules. It is found by Bellman-Ford style
//! passes; a pass that still changes something after `m + 1` rounds means a
//! positive cycle, i.e. ride times and travel times contradict each other.

use crate::instance::{DarpInstance, Loc, Minutes, TIME_EPS};

/// Earliest feasible service-start times along `seq`, or `None` if no
/// schedule satisfies windows, travel times and ride times.
///
/// The depot may appear (typically first and last) with window `[0, T]` and
/// zero service time. Ride-time rows are added for every request whose
/// pickup precedes its delivery in `seq`.
pub fn schedule_route(inst: &DarpInstance, seq: &[Loc]) -> Option<Vec<Minutes>> {
    let m = seq.len();
    let windows: Vec<_> = seq.iter().map(|&l| inst.window(l)).collect();
    let mut b: Vec<Minutes> = windows.iter().map(|w| w.earliest).collect();
    if windows.iter().any(|w| w.is_empty()) {
        return None;
    }
    // (pickup position, delivery position, s + L)
    let rides: Vec<(usize, usize, f64)> = seq
        .iter()
        .enumerate()
        .filter_map(|(p, &loc)| match loc {
            Loc::Pickup(i) => seq[p + 1..]
                .iter()
                .position(|&l| l == Loc::Delivery(i))
                .map(|off| {
                    let r = inst.request(i);
                    (p, p + 1 + off, r.service + r.max_ride)
                }),
            _ => None,
        })
        .collect();
    let legs: Vec<f64> = seq
        .windows(2)
        .map(|w| inst.service(w[0]) + inst.time(w[0], w[1]))
        .collect();

    for _ in 0..=m + 1 {
        let mut changed = false;
        for k in 1..m {
            let need = b[k - 1] + legs[k - 1];
            if need > b[k] + TIME_EPS {
                b[k] = need;
                changed = true;
            }
        }
        for &(p, d, span) in &rides {
            let need = b[d] - span;
            if need > b[p] + TIME_EPS {
                b[p] = need;
                changed = true;
            }
        }
        if b.iter().zip(&windows).any(|(t, w)| *t > w.latest + TIME_EPS) {
            return None;
        }
        if !changed {
            return Some(b);
        }
    }
    None
}

/// Latest feasible service-start times along `seq`: the mirror image of
/// [`schedule_route`], relaxing upper bounds backwards from the window ends.
pub fn latest_schedule(inst: &DarpInstance, seq: &[Loc]) -> Option<Vec<Minutes>> {
    let m = seq.len();
    let windows: Vec<_> = seq.iter().map(|&l| inst.window(l)).collect();
    if windows.iter().any(|w| w.is_empty()) {
        return None;
    }
    let mut b: Vec<Minutes> = windows.iter().map(|w| w.latest).collect();
    let rides: Vec<(usize, usize, f64)> = seq
        .iter()
        .enumerate()
        .filter_map(|(p, &loc)| match loc {
            Loc::Pickup(i) => seq[p + 1..]
                .iter()
                .position(|&l| l == Loc::Delivery(i))
                .map(|off| {
                    let r = inst.request(i);
                    (p, p + 1 + off, r.service + r.max_ride)
                }),
            _ => None,
        })
        .collect();
    let legs: Vec<f64> = seq
        .windows(2)
        .map(|w| inst.service(w[0]) + inst.time(w[0], w[1]))
        .collect();

    for _ in 0..=m + 1 {
        let mut changed = false;
        for k in (0..m.saturating_sub(1)).rev() {
            let cap = b[k + 1] - legs[k];
            if cap < b[k] - TIME_EPS {
                b[k] = cap;
                changed = true;
            }
        }
        for &(p, d, span) in &rides {
            let cap = b[p] + span;
            if cap < b[d] - TIME_EPS {
                b[d] = cap;
                changed = true;
            }
        }
        if b.iter().zip(&windows).any(|(t, w)| *t < w.earliest - TIME_EPS) {
            return None;
        }
        if !changed {
            return Some(b);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Matrix, RequestKind, RequestSpec, Window};

    /// Two requests on a line; positions given for 0, 1+, 2+, 1-, 2-.
    fn line(pos: [f64; 5], specs: Vec<RequestSpec>) -> DarpInstance {
        let m = Matrix::from_fn(5, |i, j| (pos[i] - pos[j]).abs());
        DarpInstance::from_matrices("line", 1, 3, 200.0, specs, m.clone(), m).unwrap()
    }

    fn spec(s: f64, l: f64, p: (f64, f64), d: (f64, f64)) -> RequestSpec {
        RequestSpec {
            load: 1,
            service: s,
            max_ride: l,
            pickup: Window::new(p.0, p.1),
            delivery: Window::new(d.0, d.1),
            kind: RequestKind::Explicit,
        }
    }

    #[test]
    fn single_request_starts_at_earliest() {
        let inst = line(
            [0.0, 0.0, 0.0, 10.0, 10.0],
            vec![spec(1.0, 30.0, (5.0, 50.0), (0.0, 100.0)), spec(1.0, 30.0, (0.0, 100.0), (0.0, 100.0))],
        );
        let b = schedule_route(&inst, &[Loc::Pickup(1), Loc::Delivery(1)]).unwrap();
        assert_eq!(b, vec![5.0, 16.0]);
    }

    #[test]
    fn ride_time_forces_waiting_before_pickup() {
        // delivery opens at 60; a ride of at most 15 forces the pickup to 45+
        let inst = line(
            [0.0, 0.0, 0.0, 10.0, 10.0],
            vec![spec(0.0, 15.0, (0.0, 100.0), (60.0, 70.0)), spec(1.0, 30.0, (0.0, 100.0), (0.0, 100.0))],
        );
        let b = schedule_route(&inst, &[Loc::Pickup(1), Loc::Delivery(1)]).unwrap();
        assert_eq!(b, vec![45.0, 60.0]);
        let greedy_pickup = inst.earliest(Loc::Pickup(1));
        assert!(b[0] > greedy_pickup);
    }

    #[test]
    fn window_impossible_chain() {
        // 2- closes before the detour via 1+ and 1- can reach it
        let inst = line(
            [0.0, 0.0, 20.0, 30.0, 5.0],
            vec![spec(1.0, 60.0, (0.0, 100.0), (0.0, 100.0)), spec(1.0, 60.0, (0.0, 100.0), (0.0, 20.0))],
        );
        let seq = [Loc::Pickup(2), Loc::Pickup(1), Loc::Delivery(1), Loc::Delivery(2)];
        assert!(schedule_route(&inst, &seq).is_none());
    }

    #[test]
    fn ride_time_cycle_is_infeasible() {
        // waiting at 1+ cannot help: travel alone exceeds L for request 2
        let inst = line(
            [0.0, 0.0, 0.0, 30.0, 2.0],
            vec![spec(1.0, 40.0, (0.0, 100.0), (0.0, 150.0)), spec(1.0, 10.0, (0.0, 100.0), (0.0, 150.0))],
        );
        let seq = [Loc::Pickup(2), Loc::Pickup(1), Loc::Delivery(1), Loc::Delivery(2)];
        assert!(schedule_route(&inst, &seq).is_none());
    }

    #[test]
    fn depot_endpoints_are_allowed() {
        let inst = line(
            [0.0, 3.0, 0.0, 10.0, 10.0],
            vec![spec(1.0, 30.0, (5.0, 50.0), (0.0, 100.0)), spec(1.0, 30.0, (0.0, 100.0), (0.0, 100.0))],
        );
        let b = schedule_route(&inst, &[Loc::Depot, Loc::Pickup(1), Loc::Delivery(1), Loc::Depot]).unwrap();
        assert_eq!(b, vec![0.0, 5.0, 13.0, 24.0]);
    }

    #[test]
    fn latest_schedule_mirrors_earliest() {
        let inst = line(
            [0.0, 0.0, 0.0, 10.0, 10.0],
            vec![spec(1.0, 30.0, (5.0, 50.0), (0.0, 100.0)), spec(1.0, 30.0, (0.0, 100.0), (0.0, 100.0))],
        );
        let seq = [Loc::Pickup(1), Loc::Delivery(1)];
        assert_eq!(latest_schedule(&inst, &seq).unwrap(), vec![50.0, 81.0]);
        let bad = line(
            [0.0, 0.0, 20.0, 30.0, 5.0],
            vec![spec(1.0, 60.0, (0.0, 100.0), (0.0, 100.0)), spec(1.0, 60.0, (0.0, 100.0), (0.0, 20.0))],
        );
        let seq = [Loc::Pickup(2), Loc::Pickup(1), Loc::Delivery(1), Loc::Delivery(2)];
        assert!(latest_schedule(&bad, &seq).is_none());
    }
}
