//! Problem data: requests, fleet, travel-time/cost matrices and time windows.
//!
//! Locations are indexed the way benchmark files number them: `0` is the
//! depot, `1..=n` are pickups and `n+1..=2n` are deliveries. Request ids are
//! 1-based so that `0` can mark an empty seat in event tuples.

mod compat;
mod cordeau;
mod manifest;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DarpError, Result};
use crate::solver::schedule::schedule_route;

pub use compat::{compat_flags, CompatFlags};
pub use cordeau::{load_instance, parse_cordeau, write_cordeau, WindowRule};
pub use manifest::{load_manifest, ManifestEntry};

/// Minutes on the planning horizon.
pub type Minutes = f64;

/// Slack used when comparing times.
pub const TIME_EPS: f64 = 1e-9;

/// A physical stop: the depot, or the pickup/delivery point of a request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Loc {
    Depot,
    Pickup(usize),
    Delivery(usize),
}

impl Loc {
    /// Request owning this location, `None` for the depot.
    pub fn request(self) -> Option<usize> {
        match self {
            Loc::Depot => None,
            Loc::Pickup(i) | Loc::Delivery(i) => Some(i),
        }
    }

    pub fn is_pickup(self) -> bool {
        matches!(self, Loc::Pickup(_))
    }

    pub fn is_delivery(self) -> bool {
        matches!(self, Loc::Delivery(_))
    }

    /// Matrix index for an instance with `n` requests.
    pub fn index(self, n: usize) -> usize {
        match self {
            Loc::Depot => 0,
            Loc::Pickup(i) => i,
            Loc::Delivery(i) => n + i,
        }
    }

    pub fn from_index(idx: usize, n: usize) -> Loc {
        match idx {
            0 => Loc::Depot,
            i if i <= n => Loc::Pickup(i),
            i => Loc::Delivery(i - n),
        }
    }

    /// Identifier-safe code used in model variable names (`o`, `p3`, `d3`).
    pub fn code(self) -> String {
        match self {
            Loc::Depot => "o".to_string(),
            Loc::Pickup(i) => format!("p{i}"),
            Loc::Delivery(i) => format!("d{i}"),
        }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Loc::Depot => write!(f, "0"),
            Loc::Pickup(i) => write!(f, "{i}+"),
            Loc::Delivery(i) => write!(f, "{i}-"),
        }
    }
}

/// Closed time interval `[earliest, latest]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub earliest: Minutes,
    pub latest: Minutes,
}

impl Window {
    pub fn new(earliest: Minutes, latest: Minutes) -> Self {
        Window { earliest, latest }
    }

    pub fn width(&self) -> Minutes {
        self.latest - self.earliest
    }

    pub fn is_empty(&self) -> bool {
        self.earliest > self.latest + TIME_EPS
    }

    pub fn contains(&self, t: Minutes, tol: f64) -> bool {
        t >= self.earliest - tol && t <= self.latest + tol
    }
}

/// Which of a request's two windows was stated by the customer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RequestKind {
    /// Pickup window is the stated one; the delivery window is derived.
    Inbound,
    /// Delivery window is the stated one; the pickup window is derived.
    Outbound,
    /// Both windows are given and used as-is.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    /// 1-based id.
    pub id: usize,
    pub load: u32,
    pub service: Minutes,
    pub max_ride: Minutes,
    pub pickup: Window,
    pub delivery: Window,
    /// Windows as read from the source, before derivation.
    pub raw_pickup: Window,
    pub raw_delivery: Window,
    pub direct_time: Minutes,
    pub kind: RequestKind,
}

impl Request {
    /// Length of the stated window, used as the `TW` activation constant.
    pub fn tight_width(&self) -> Minutes {
        match self.kind {
            RequestKind::Inbound => self.pickup.width(),
            RequestKind::Outbound => self.delivery.width(),
            RequestKind::Explicit => self.pickup.width().min(self.delivery.width()),
        }
    }
}

/// Dense square matrix over locations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data does not match dimension");
        Matrix { dim, data }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// First `(i, j, k)` with `m[i][k] > m[i][j] + m[j][k]` beyond tolerance.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let scale = self.data.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let tol = 1e-9 * scale;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let ij = self.get(i, j);
                for k in 0..self.dim {
                    if self.get(i, k) > ij + self.get(j, k) + tol {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

/// A dial-a-ride instance. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarpInstance {
    pub name: String,
    /// Fleet size `K`.
    pub vehicles: usize,
    /// Seats per vehicle `Q`.
    pub capacity: u32,
    /// Service duration `T`; the depot window is `[0, T]`.
    pub horizon: Minutes,
    pub requests: Vec<Request>,
    pub travel: Matrix,
    pub cost: Matrix,
    /// Coordinates when the matrices are Euclidean distances.
    pub coords: Option<Vec<(f64, f64)>>,
    /// Whether `derive_windows` has been applied.
    pub derived: bool,
}

/// Raw request data used to assemble an instance from explicit matrices.
#[derive(Clone, Debug)]
pub struct RequestSpec {
    pub load: u32,
    pub service: Minutes,
    pub max_ride: Minutes,
    pub pickup: Window,
    pub delivery: Window,
    pub kind: RequestKind,
}

impl DarpInstance {
    /// Builds and validates an instance from explicit matrices over
    /// `J = {0} ∪ P ∪ D`.
    pub fn from_matrices(
        name: impl Into<String>,
        vehicles: usize,
        capacity: u32,
        horizon: Minutes,
        requests: Vec<RequestSpec>,
        travel: Matrix,
        cost: Matrix,
    ) -> Result<Self> {
        let n = requests.len();
        if travel.dim() != 2 * n + 1 || cost.dim() != 2 * n + 1 {
            return Err(DarpError::Parse {
                line: 0,
                message: format!("matrices must be {0}x{0} for {n} requests", 2 * n + 1),
            });
        }
        let requests = requests
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                let id = k + 1;
                Request {
                    id,
                    load: r.load,
                    service: r.service,
                    max_ride: r.max_ride,
                    pickup: r.pickup,
                    delivery: r.delivery,
                    raw_pickup: r.pickup,
                    raw_delivery: r.delivery,
                    direct_time: travel.get(id, n + id),
                    kind: r.kind,
                }
            })
            .collect();
        let inst = DarpInstance {
            name: name.into(),
            vehicles,
            capacity,
            horizon,
            requests,
            travel,
            cost,
            coords: None,
            derived: false,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks the standing assumptions on the data. Line numbers in errors are
    /// those of a benchmark file (request `i` pickup on line `i + 2`).
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        for (name, m) in [("travel time", &self.travel), ("cost", &self.cost)] {
            if let Some(bad) = (0..m.dim())
                .flat_map(|i| (0..m.dim()).map(move |j| (i, j)))
                .find(|&(i, j)| m.get(i, j) < 0.0 || !m.get(i, j).is_finite())
            {
                return Err(DarpError::Parse {
                    line: bad.0 + 2,
                    message: format!("negative or non-finite {name} entry at {bad:?}"),
                });
            }
            if let Some((i, j, k)) = m.triangle_violation() {
                return Err(DarpError::Parse {
                    line: i + 2,
                    message: format!(
                        "{name} matrix violates the triangle inequality: {} > {} + {} via {}",
                        Loc::from_index(i, n),
                        Loc::from_index(j, n),
                        Loc::from_index(k, n),
                        Loc::from_index(j, n),
                    ),
                });
            }
        }
        for r in &self.requests {
            let line = r.id + 2;
            if r.load == 0 || r.load > self.capacity {
                return Err(DarpError::Parse {
                    line,
                    message: format!(
                        "request {} has load {} but capacity is {}",
                        r.id, r.load, self.capacity
                    ),
                });
            }
            let lead = r.direct_time + r.service;
            if !(lead > 0.0 && lead < r.max_ride) {
                return Err(DarpError::Parse {
                    line,
                    message: format!(
                        "request {} violates 0 < t_i + s_i < L_i (t_i = {}, s_i = {}, L_i = {})",
                        r.id, r.direct_time, r.service, r.max_ride
                    ),
                });
            }
            for w in [r.raw_pickup, r.raw_delivery, r.pickup, r.delivery] {
                if w.earliest < 0.0 || w.is_empty() {
                    return Err(DarpError::Parse {
                        line,
                        message: format!("request {} has an invalid window {w:?}", r.id),
                    });
                }
            }
        }
        Ok(())
    }

    /// Number of requests `n`.
    pub fn n(&self) -> usize {
        self.requests.len()
    }

    pub fn request(&self, id: usize) -> &Request {
        &self.requests[id - 1]
    }

    pub fn locations(&self) -> impl Iterator<Item = Loc> + '_ {
        (0..=2 * self.n()).map(move |k| Loc::from_index(k, self.n()))
    }

    pub fn window(&self, loc: Loc) -> Window {
        match loc {
            Loc::Depot => Window::new(0.0, self.horizon),
            Loc::Pickup(i) => self.request(i).pickup,
            Loc::Delivery(i) => self.request(i).delivery,
        }
    }

    #[inline]
    pub fn earliest(&self, loc: Loc) -> Minutes {
        self.window(loc).earliest
    }

    #[inline]
    pub fn latest(&self, loc: Loc) -> Minutes {
        self.window(loc).latest
    }

    #[inline]
    pub fn service(&self, loc: Loc) -> Minutes {
        loc.request().map_or(0.0, |i| self.request(i).service)
    }

    /// Load change when service at `loc` completes.
    pub fn load_delta(&self, loc: Loc) -> i64 {
        match loc {
            Loc::Depot => 0,
            Loc::Pickup(i) => self.request(i).load as i64,
            Loc::Delivery(i) => -(self.request(i).load as i64),
        }
    }

    #[inline]
    pub fn time(&self, a: Loc, b: Loc) -> Minutes {
        let n = self.n();
        self.travel.get(a.index(n), b.index(n))
    }

    #[inline]
    pub fn arc_cost(&self, a: Loc, b: Loc) -> f64 {
        let n = self.n();
        self.cost.get(a.index(n), b.index(n))
    }

    /// Derives the non-stated window of every request from the stated one.
    ///
    /// Outbound requests get `[max(0, e⁻ − L − s), min(ℓ⁻ − t − s, T)]` as
    /// pickup window, inbound requests `[e⁺ + s + t, ℓ⁺ + s + L]` as delivery
    /// window. Pickup windows never open before the location can be reached
    /// from the depot. Derivation always starts from the raw windows, so the
    /// operation is idempotent.
    pub fn derive_windows(&self) -> Result<DarpInstance> {
        let mut out = self.clone();
        for r in &mut out.requests {
            let (s, l, t) = (r.service, r.max_ride, r.direct_time);
            let reach = self.travel.get(0, r.id);
            match r.kind {
                RequestKind::Outbound => {
                    r.delivery = r.raw_delivery;
                    r.pickup = Window::new(
                        (r.delivery.earliest - l - s).max(0.0).max(reach),
                        (r.delivery.latest - t - s).min(self.horizon),
                    );
                }
                RequestKind::Inbound => {
                    r.pickup = Window::new(r.raw_pickup.earliest.max(reach), r.raw_pickup.latest);
                    r.delivery = Window::new(r.pickup.earliest + s + t, r.raw_pickup.latest + s + l);
                }
                RequestKind::Explicit => {
                    r.pickup = Window::new(r.raw_pickup.earliest.max(reach), r.raw_pickup.latest);
                    r.delivery = r.raw_delivery;
                }
            }
            // Consistency between the two windows through t ≤ ride ≤ L.
            // A no-op on derived windows unless the depot-reach raise or the
            // horizon clamp kicked in.
            r.pickup.earliest = r.pickup.earliest.max(r.delivery.earliest - s - l);
            r.pickup.latest = r.pickup.latest.min(r.delivery.latest - s - t);
            r.delivery.earliest = r.delivery.earliest.max(r.pickup.earliest + s + t);
            r.delivery.latest = r.delivery.latest.min(r.pickup.latest + s + l);
            for (what, w) in [("pickup", r.pickup), ("delivery", r.delivery)] {
                if w.is_empty() {
                    return Err(DarpError::InfeasibleRequest {
                        request: r.id,
                        reason: format!(
                            "derived {what} window [{}, {}] is empty",
                            w.earliest, w.latest
                        ),
                    });
                }
            }
        }
        out.derived = true;
        Ok(out)
    }

    /// Postpones the upper bound of every stated window by `delta` minutes
    /// and re-derives the other window ("-X" benchmark variants).
    pub fn extend_windows_x(&self, delta: Minutes) -> Result<DarpInstance> {
        if delta == 0.0 {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        for r in &mut out.requests {
            match r.kind {
                RequestKind::Inbound => r.raw_pickup.latest += delta,
                RequestKind::Outbound => r.raw_delivery.latest += delta,
                RequestKind::Explicit => {
                    if r.raw_pickup.width() <= r.raw_delivery.width() {
                        r.raw_pickup.latest += delta;
                    } else {
                        r.raw_delivery.latest += delta;
                    }
                }
            }
        }
        if !self.name.is_empty() && !self.name.ends_with("-X") {
            out.name = format!("{}-X", self.name);
        }
        if self.derived {
            out.derive_windows()
        } else {
            Ok(out)
        }
    }

    /// Whether some service-start times satisfy windows, travel times and
    /// ride times along `seq`. Decided exactly (waiting may be required to
    /// respect ride times).
    pub fn path_feasible(&self, seq: &[Loc]) -> Result<bool> {
        check_precedence(seq)?;
        Ok(schedule_route(self, seq).is_some())
    }
}

/// Rejects sequences that deliver a request before picking it up.
pub fn check_precedence(seq: &[Loc]) -> Result<()> {
    for (k, loc) in seq.iter().enumerate() {
        if let Loc::Delivery(i) = *loc {
            if seq[k + 1..].contains(&Loc::Pickup(i)) {
                return Err(DarpError::Precedence { request: i });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_instance(kind: RequestKind, pickup: Window, delivery: Window) -> DarpInstance {
        // depot at 0, pickup at 0 (distance 0 from depot), delivery at 10
        let pos = [0.0, 0.0, 10.0];
        let m = Matrix::from_fn(3, |i, j| f64::abs(pos[i] - pos[j]));
        DarpInstance::from_matrices(
            "line",
            1,
            3,
            480.0,
            vec![RequestSpec {
                load: 1,
                service: 3.0,
                max_ride: 30.0,
                pickup,
                delivery,
                kind,
            }],
            m.clone(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn derive_inbound_delivery_window() {
        let inst = line_instance(
            RequestKind::Inbound,
            Window::new(100.0, 115.0),
            Window::new(0.0, 1440.0),
        );
        let d = inst.derive_windows().unwrap();
        assert_eq!(d.requests[0].delivery, Window::new(113.0, 148.0));
        assert_eq!(d.requests[0].pickup, Window::new(100.0, 115.0));
    }

    #[test]
    fn derive_outbound_pickup_window() {
        let inst = line_instance(
            RequestKind::Outbound,
            Window::new(0.0, 1440.0),
            Window::new(200.0, 215.0),
        );
        let d = inst.derive_windows().unwrap();
        assert_eq!(d.requests[0].pickup, Window::new(167.0, 202.0));
        assert_eq!(d.requests[0].delivery, Window::new(200.0, 215.0));
    }

    #[test]
    fn derive_is_idempotent() {
        let inst = line_instance(
            RequestKind::Outbound,
            Window::new(0.0, 1440.0),
            Window::new(200.0, 215.0),
        );
        let once = inst.derive_windows().unwrap();
        assert_eq!(once.derive_windows().unwrap(), once);
    }

    #[test]
    fn derive_rejects_empty_window() {
        // the delivery window closes before the direct ride can arrive
        let inst = line_instance(
            RequestKind::Outbound,
            Window::new(0.0, 1440.0),
            Window::new(5.0, 8.0),
        );
        assert!(matches!(
            inst.derive_windows(),
            Err(DarpError::InfeasibleRequest { request: 1, .. })
        ));
    }

    #[test]
    fn extend_zero_is_identity() {
        let inst = line_instance(
            RequestKind::Inbound,
            Window::new(100.0, 115.0),
            Window::new(0.0, 1440.0),
        )
        .derive_windows()
        .unwrap();
        assert_eq!(inst.extend_windows_x(0.0).unwrap(), inst);
    }

    #[test]
    fn extend_moves_stated_upper_bound() {
        let inst = line_instance(
            RequestKind::Inbound,
            Window::new(100.0, 115.0),
            Window::new(0.0, 1440.0),
        )
        .derive_windows()
        .unwrap();
        let x = inst.extend_windows_x(15.0).unwrap();
        assert_eq!(x.requests[0].pickup, Window::new(100.0, 130.0));
        assert_eq!(x.requests[0].delivery, Window::new(113.0, 163.0));
        assert_eq!(x.name, "line-X");
    }

    #[test]
    fn rejects_triangle_violation() {
        let m = Matrix::new(3, vec![0.0, 1.0, 10.0, 1.0, 0.0, 1.0, 10.0, 1.0, 0.0]);
        let err = DarpInstance::from_matrices(
            "bad",
            1,
            1,
            100.0,
            vec![RequestSpec {
                load: 1,
                service: 1.0,
                max_ride: 30.0,
                pickup: Window::new(1.0, 50.0),
                delivery: Window::new(1.0, 80.0),
                kind: RequestKind::Explicit,
            }],
            m.clone(),
            m,
        )
        .unwrap_err();
        assert!(err.to_string().contains("triangle"), "{err}");
    }

    #[test]
    fn single_request_path_is_feasible() {
        let inst = line_instance(
            RequestKind::Inbound,
            Window::new(100.0, 115.0),
            Window::new(0.0, 1440.0),
        )
        .derive_windows()
        .unwrap();
        assert!(inst
            .path_feasible(&[Loc::Pickup(1), Loc::Delivery(1)])
            .unwrap());
        assert!(matches!(
            inst.path_feasible(&[Loc::Delivery(1), Loc::Pickup(1)]),
            Err(DarpError::Precedence { request: 1 })
        ));
    }

    #[test]
    fn loc_index_roundtrip() {
        for k in 0..=10 {
            assert_eq!(Loc::from_index(k, 5).index(5), k);
        }
        assert_eq!(Loc::Delivery(3).to_string(), "3-");
        assert_eq!(Loc::Pickup(3).code(), "p3");
    }
}
