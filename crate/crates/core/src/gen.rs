//! Seeded instance generators and fixed test fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{DarpInstance, Matrix, RequestKind, RequestSpec, Window};
use crate::solver::brute_force;

/// Parameters of the benchmark-like random generator.
#[derive(Clone, Debug)]
pub struct GenParams {
    pub n: usize,
    pub vehicles: usize,
    pub capacity: u32,
    pub horizon: f64,
    pub max_ride: f64,
    /// Width of the stated window.
    pub tw: f64,
    pub service: f64,
    /// Loads are drawn from `1..=max_load` (clamped to the capacity).
    pub max_load: u32,
    /// Half-width of the square the coordinates are drawn from.
    pub extent: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 4,
            vehicles: 1,
            capacity: 3,
            horizon: 240.0,
            max_ride: 30.0,
            tw: 15.0,
            service: 3.0,
            max_load: 1,
            extent: 10.0,
        }
    }
}

/// Random instance in the style of the a/b benchmark sets: coordinates in a
/// square around the depot, first half outbound, second half inbound, stated
/// windows of width `tw`. Windows are already derived.
pub fn random_instance(p: &GenParams, seed: u64) -> DarpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.n;
    let mut coords = vec![(0.0, 0.0); 2 * n + 1];
    let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
    for i in 1..=n {
        loop {
            let a = (rng.gen_range(-p.extent..p.extent), rng.gen_range(-p.extent..p.extent));
            let b = (rng.gen_range(-p.extent..p.extent), rng.gen_range(-p.extent..p.extent));
            let t = dist(a, b);
            if t + p.service > 0.0 && t + p.service < p.max_ride {
                coords[i] = a;
                coords[n + i] = b;
                break;
            }
        }
    }
    let reach_max = 2.0 * std::f64::consts::SQRT_2 * p.extent;
    let mut specs = Vec::with_capacity(n);
    for i in 1..=n {
        let load = rng.gen_range(1..=p.max_load.min(p.capacity).max(1));
        let outbound = i <= n / 2;
        let lo = reach_max.ceil() + if outbound { p.max_ride + p.service } else { 0.0 };
        let hi = (p.horizon - p.tw - 2.0 * reach_max - p.max_ride - 2.0 * p.service).max(lo + 1.0);
        let start = rng.gen_range(lo..hi).round();
        let stated = Window::new(start, start + p.tw);
        let open = Window::new(0.0, p.horizon);
        let (pickup, delivery, kind) = if outbound {
            (open, stated, RequestKind::Outbound)
        } else {
            (stated, open, RequestKind::Inbound)
        };
        specs.push(RequestSpec {
            load,
            service: p.service,
            max_ride: p.max_ride,
            pickup,
            delivery,
            kind,
        });
    }
    let m = Matrix::from_fn(2 * n + 1, |a, b| dist(coords[a], coords[b]));
    let mut inst = DarpInstance::from_matrices(
        format!("rand-{n}-{seed}"),
        p.vehicles,
        p.capacity,
        p.horizon,
        specs,
        m.clone(),
        m,
    )
    .expect("generator produced invalid data");
    inst.coords = Some(coords);
    inst.derive_windows().expect("generator produced an empty window")
}

/// `count` feasible random instances with `n` in 2..=5, `K` in 1..=2 and
/// `Q` in 2..=3, window widths in {8, 15, 30} and loads up to 2. Seeds whose
/// instance the oracle proves infeasible are skipped, so the result only
/// depends on `seed`.
pub fn random_suite(count: usize, seed: u64) -> Vec<DarpInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = GenParams {
            n: rng.gen_range(2..=5),
            vehicles: rng.gen_range(1..=2),
            capacity: rng.gen_range(2..=3),
            tw: [8.0, 15.0, 30.0][rng.gen_range(0..3)],
            max_load: rng.gen_range(1..=2),
            ..GenParams::default()
        };
        let inst = random_instance(&p, rng.gen());
        if matches!(brute_force(&inst), Ok(Some(_))) {
            out.push(inst);
        }
    }
    out
}

/// Instance with single-point windows at every pickup and delivery.
///
/// Each delivery time lies between the direct arrival and the latest time
/// allowed by the ride limit, so the ride condition of the integrality
/// theorem holds; every location can be left in time to return to the depot.
pub fn point_window_instance(n: usize, vehicles: usize, capacity: u32, seed: u64) -> DarpInstance {
    let p = GenParams {
        n,
        vehicles,
        capacity,
        horizon: 200.0,
        service: 1.0,
        ..GenParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_7e57);
    let base = random_instance(&p, seed);
    let specs = base
        .requests
        .iter()
        .map(|r| {
            let reach = base.travel.get(0, r.id);
            let back = base.travel.get(n + r.id, 0);
            let slack = r.max_ride - r.direct_time - r.service;
            let latest_pick = p.horizon - back - 2.0 * r.service - r.direct_time - slack;
            let bp = rng.gen_range(reach..latest_pick.max(reach + 1.0)).floor().max(reach.ceil());
            let bd = bp + r.service + r.direct_time + rng.gen_range(0.0..slack);
            RequestSpec {
                load: r.load,
                service: r.service,
                max_ride: r.max_ride,
                pickup: Window::new(bp, bp),
                delivery: Window::new(bd, bd),
                kind: RequestKind::Explicit,
            }
        })
        .collect();
    let mut inst = DarpInstance::from_matrices(
        format!("point-{n}-{seed}"),
        vehicles,
        capacity,
        p.horizon,
        specs,
        base.travel.clone(),
        base.cost.clone(),
    )
    .expect("generator produced invalid data");
    inst.coords = base.coords.clone();
    inst.derive_windows().expect("point windows are consistent")
}

/// `count` feasible point-window instances with `n` in 2..=5, two vehicles
/// and capacity 3, skipping seeds the oracle proves infeasible.
pub fn point_window_suite(count: usize, seed: u64) -> Vec<DarpInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let inst = point_window_instance(rng.gen_range(2..=5), 2, 3, rng.gen());
        if matches!(brute_force(&inst), Ok(Some(_))) {
            out.push(inst);
        }
    }
    out
}

/// Two requests of three persons each, one vehicle, non-binding windows and
/// the cost table used to separate the LP bounds of the location-based and
/// event-based models. Locations are ordered `0, 1+, 2+, 1-, 2-`.
pub fn two_request_fixture(capacity: u32) -> DarpInstance {
    #[rustfmt::skip]
    let c = [
        0.0, 1.0, 1.0, 10.0, 10.0,
        1.0, 0.0, 2.0, 9.0, 9.0,
        1.0, 2.0, 0.0, 9.0, 9.0,
        10.0, 9.0, 9.0, 0.0, 1.0,
        10.0, 9.0, 9.0, 1.0, 0.0,
    ];
    let m = Matrix::new(5, c.to_vec());
    let wide = |lo: f64| RequestSpec {
        load: 3,
        service: 0.0,
        max_ride: 500.0,
        pickup: Window::new(lo, 1000.0),
        delivery: Window::new(lo, 1000.0),
        kind: RequestKind::Explicit,
    };
    DarpInstance::from_matrices("two-request", 1, capacity, 1000.0, vec![wide(0.0), wide(0.0)], m.clone(), m)
        .expect("fixture is valid")
        .derive_windows()
        .expect("fixture windows are consistent")
}
