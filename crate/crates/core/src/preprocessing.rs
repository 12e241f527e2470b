//! Earliest/latest service-start bounds per event and the elimination of
//! events and arcs that cannot be part of any feasible tour.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{DarpError, Result};
use crate::event_graph::{ArcId, EventGraph, NodeId};
use crate::instance::{DarpInstance, Loc, TIME_EPS};

/// Per-event time bounds plus the per-request latest pickup `B̄^UB_i`.
#[derive(Clone, Debug)]
pub struct BoundState {
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// Whether the current `ub` is set by a ride-time term.
    ub_by_ride: Vec<bool>,
    /// Indexed by request id; slot 0 unused.
    req_ub: Vec<f64>,
    fixed_succ: Vec<Option<NodeId>>,
    fixed_pred: Vec<Option<NodeId>>,
    /// Events found infeasible by `compute_bounds`, not yet removed.
    pending: Vec<(NodeId, Cause)>,
    /// Number of strict bound tightenings performed so far.
    pub changes: usize,
}

impl BoundState {
    #[inline]
    pub fn lb(&self, v: NodeId) -> f64 {
        self.lb[v]
    }

    #[inline]
    pub fn ub(&self, v: NodeId) -> f64 {
        self.ub[v]
    }

    /// `B̄^UB_i`: latest pickup time of request `i` over its live events.
    pub fn request_ub(&self, i: usize) -> f64 {
        self.req_ub[i]
    }

    /// `B^LB_{vw} = B^LB(v) + s_{v1} + t_{(v,w)}`.
    pub fn arc_lb(&self, g: &EventGraph, inst: &DarpInstance, a: ArcId) -> f64 {
        let arc = g.arc(a);
        self.lb[arc.from] + inst.service(g.node(arc.from).loc) + arc.time
    }

    /// `B^UB_{vw} = B^UB(w) − s_{v1} − t_{(v,w)}`.
    pub fn arc_ub(&self, g: &EventGraph, inst: &DarpInstance, a: ArcId) -> f64 {
        let arc = g.arc(a);
        self.ub[arc.to] - inst.service(g.node(arc.from).loc) - arc.time
    }

    pub fn fixed_successor(&self, v: NodeId) -> Option<NodeId> {
        self.fixed_succ[v]
    }

    pub fn fixed_predecessor(&self, v: NodeId) -> Option<NodeId> {
        self.fixed_pred[v]
    }

    /// Re-indexes after `EventGraph::compact`.
    pub fn remap(&mut self, map: &[Option<NodeId>]) {
        let live = map.iter().flatten().count();
        let mut lb = vec![0.0; live];
        let mut ub = vec![0.0; live];
        let mut by_ride = vec![false; live];
        let mut fs = vec![None; live];
        let mut fp = vec![None; live];
        for (old, new) in map.iter().enumerate() {
            if let Some(new) = *new {
                lb[new] = self.lb[old];
                ub[new] = self.ub[old];
                by_ride[new] = self.ub_by_ride[old];
                fs[new] = self.fixed_succ[old].and_then(|w| map[w]);
                fp[new] = self.fixed_pred[old].and_then(|w| map[w]);
            }
        }
        self.pending = self
            .pending
            .iter()
            .filter_map(|&(v, c)| map[v].map(|v| (v, c)))
            .collect();
        self.lb = lb;
        self.ub = ub;
        self.ub_by_ride = by_ride;
        self.fixed_succ = fs;
        self.fixed_pred = fp;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    WindowEmpty,
    RideTime,
    Disconnected,
    Fixing,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NodeDeletions {
    pub window_empty: usize,
    pub ride_time: usize,
    pub disconnected: usize,
    pub fixing: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ArcDeletions {
    pub arc_slack: usize,
    /// Arcs removed together with an end node.
    pub incident: usize,
}

/// Counts of what a reduction removed, by cause.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub nodes_before: usize,
    pub arcs_before: usize,
    pub nodes_after: usize,
    pub arcs_after: usize,
    pub deleted_nodes: NodeDeletions,
    pub deleted_arcs: ArcDeletions,
}

impl ReductionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// Relative reduction of `|V| + |A|`.
    pub fn variable_reduction(&self) -> f64 {
        let before = (self.nodes_before + self.arcs_before) as f64;
        if before == 0.0 {
            return 0.0;
        }
        1.0 - (self.nodes_after + self.arcs_after) as f64 / before
    }

    fn count_node(&mut self, cause: Cause) {
        match cause {
            Cause::WindowEmpty => self.deleted_nodes.window_empty += 1,
            Cause::RideTime => self.deleted_nodes.ride_time += 1,
            Cause::Disconnected => self.deleted_nodes.disconnected += 1,
            Cause::Fixing => self.deleted_nodes.fixing += 1,
        }
    }
}

/// Bound recurrences evaluated against the current graph and bounds.
struct Rules<'a> {
    g: &'a EventGraph,
    inst: &'a DarpInstance,
}

impl Rules<'_> {
    /// `max(e, min over pickup (or depot) predecessors of LB + s + t)`.
    fn lb(&self, b: &BoundState, dead: &[bool], v: NodeId) -> f64 {
        let node = self.g.node(v);
        if node.is_depot() {
            return 0.0;
        }
        let e = self.inst.earliest(node.loc);
        let via = |u: NodeId, t: f64| b.lb[u] + self.inst.service(self.g.node(u).loc) + t;
        if let Some(u) = b.fixed_pred[v].filter(|&u| self.g.is_node_alive(u) && !dead[u]) {
            let t = self.inst.time(self.g.node(u).loc, node.loc);
            return e.max(via(u, t));
        }
        let best = self
            .g
            .in_arcs(v)
            .map(|a| self.g.arc(a))
            .filter(|arc| !dead[arc.from])
            .filter(|arc| {
                let from = self.g.node(arc.from).loc;
                from.is_pickup() || from == Loc::Depot
            })
            .map(|arc| via(arc.from, arc.time))
            .fold(f64::INFINITY, f64::min);
        e.max(best)
    }

    /// Latest start, and whether a ride-time term is the binding one.
    fn ub(&self, b: &BoundState, dead: &[bool], v: NodeId) -> (f64, bool) {
        let node = self.g.node(v);
        if node.is_depot() {
            return (self.inst.horizon, false);
        }
        let inst = self.inst;
        let s_v = inst.service(node.loc);
        let mut window = inst.latest(node.loc);
        let mut ride = f64::INFINITY;
        if let Loc::Delivery(j) = node.loc {
            let r = inst.request(j);
            ride = ride.min(b.req_ub[j] + r.service + r.max_ride);
        }
        for &i in &node.onboard {
            let r = inst.request(i);
            ride = ride.min(b.req_ub[i] + r.service + r.max_ride - s_v - inst.time(node.loc, Loc::Delivery(i)));
        }
        let succ = if let Some(w) = b.fixed_succ[v].filter(|&w| self.g.is_node_alive(w) && !dead[w]) {
            b.ub[w] - s_v - inst.time(node.loc, self.g.node(w).loc)
        } else {
            self.g
                .out_arcs(v)
                .map(|a| self.g.arc(a))
                .filter(|arc| !dead[arc.to])
                .filter(|arc| {
                    let to = self.g.node(arc.to).loc;
                    to.is_delivery() || to == Loc::Depot
                })
                .map(|arc| b.ub[arc.to] - s_v - arc.time)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        window = window.min(succ);
        if ride < window {
            (ride, true)
        } else {
            (window, false)
        }
    }
}

/// Evaluation order of the lower-bound sweep: pickups by number of
/// companions, then deliveries. The upper-bound sweep mirrors it.
fn sweep_order(g: &EventGraph, first_pickups: bool) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = g.node_ids().filter(|&v| !g.node(v).is_depot()).collect();
    order.sort_by_key(|&v| {
        let node = g.node(v);
        let phase = node.loc.is_pickup() != first_pickups;
        (phase, node.onboard.len(), v)
    });
    order
}

/// Computes `B^LB`, `B^UB` and `B̄^UB` by the sweep sequence: lower bounds,
/// upper bounds without ride times, `B̄^UB`, upper bounds with ride times.
/// Events that become empty during the upper-bound sweeps are excluded from
/// later maxima and recorded for removal by `fixpoint_reduce`.
pub fn compute_bounds(g: &EventGraph, inst: &DarpInstance) -> BoundState {
    let len = g.node_bound();
    let n = inst.n();
    let mut b = BoundState {
        lb: vec![f64::NEG_INFINITY; len],
        ub: vec![f64::INFINITY; len],
        ub_by_ride: vec![false; len],
        req_ub: vec![f64::INFINITY; n + 1],
        fixed_succ: vec![None; len],
        fixed_pred: vec![None; len],
        pending: Vec::new(),
        changes: 0,
    };
    let rules = Rules { g, inst };
    let mut dead = vec![false; len];
    let depot = g.depot();
    b.lb[depot] = 0.0;
    b.ub[depot] = inst.horizon;

    for v in sweep_order(g, true) {
        b.lb[v] = rules.lb(&b, &dead, v);
    }
    let ub_order = sweep_order(g, false);
    for with_ride in [false, true] {
        if with_ride {
            for i in 1..=n {
                b.req_ub[i] = g
                    .events_at(Loc::Pickup(i))
                    .filter(|&v| !dead[v])
                    .map(|v| b.ub[v])
                    .fold(f64::NEG_INFINITY, f64::max);
            }
        }
        for &v in &ub_order {
            if dead[v] {
                continue;
            }
            let (u, by_ride) = rules.ub(&b, &dead, v);
            if u < b.ub[v] {
                b.ub[v] = u;
                b.ub_by_ride[v] = by_ride;
            }
            if b.ub[v] < b.lb[v] - TIME_EPS {
                dead[v] = true;
                b.pending.push((v, infeasibility_cause(&b, v)));
            }
        }
    }
    b
}

fn infeasibility_cause(b: &BoundState, v: NodeId) -> Cause {
    if b.lb[v].is_infinite() || b.ub[v].is_infinite() {
        Cause::Disconnected
    } else if b.ub_by_ride[v] {
        Cause::RideTime
    } else {
        Cause::WindowEmpty
    }
}

#[derive(Default)]
struct DedupQueue {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl DedupQueue {
    fn new(len: usize) -> Self {
        DedupQueue {
            queue: VecDeque::new(),
            queued: vec![false; len],
        }
    }

    fn push(&mut self, x: usize) {
        if !self.queued[x] {
            self.queued[x] = true;
            self.queue.push_back(x);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let x = self.queue.pop_front()?;
        self.queued[x] = false;
        Some(x)
    }

    fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}

/// Worklist propagation shared by the reduction and the fixing updates.
struct Propagator<'a> {
    g: &'a mut EventGraph,
    b: &'a mut BoundState,
    inst: &'a DarpInstance,
    report: ReductionReport,
    /// events whose lower bound may change
    succ_q: DedupQueue,
    /// events whose upper bound may change
    pred_q: DedupQueue,
    /// requests whose `B̄^UB` may change
    req_q: DedupQueue,
    /// live events mentioning each request
    by_request: Vec<Vec<NodeId>>,
    no_dead: Vec<bool>,
}

impl<'a> Propagator<'a> {
    fn new(g: &'a mut EventGraph, b: &'a mut BoundState, inst: &'a DarpInstance) -> Self {
        let len = g.node_bound();
        let n = inst.n();
        let mut by_request = vec![Vec::new(); n + 1];
        for v in g.node_ids() {
            for i in 1..=n {
                if g.node(v).mentions(i) {
                    by_request[i].push(v);
                }
            }
        }
        let report = ReductionReport {
            nodes_before: g.num_nodes(),
            arcs_before: g.num_arcs(),
            ..Default::default()
        };
        Propagator {
            g,
            b,
            inst,
            report,
            succ_q: DedupQueue::new(len),
            pred_q: DedupQueue::new(len),
            req_q: DedupQueue::new(n + 1),
            by_request,
            no_dead: vec![false; len],
        }
    }

    fn rules(&self) -> Rules<'_> {
        Rules { g: self.g, inst: self.inst }
    }

    fn delete_node(&mut self, v: NodeId, cause: Cause) {
        if v == self.g.depot() || !self.g.is_node_alive(v) {
            return;
        }
        self.report.count_node(cause);
        let removed = self.g.delete_node(v);
        self.report.deleted_arcs.incident += removed.len();
        for a in removed {
            let arc = self.g.arc(a);
            if arc.to == v {
                self.pred_q.push(arc.from);
            } else {
                self.succ_q.push(arc.to);
            }
        }
        if let Loc::Pickup(i) = self.g.node(v).loc {
            self.req_q.push(i);
        }
    }

    fn delete_arc(&mut self, a: ArcId) {
        if self.g.delete_arc(a) {
            self.report.deleted_arcs.arc_slack += 1;
            let (from, to) = (self.g.arc(a).from, self.g.arc(a).to);
            self.pred_q.push(from);
            self.succ_q.push(to);
        }
    }

    fn arc_infeasible(&self, a: ArcId) -> bool {
        let arc = self.g.arc(a);
        let s = self.inst.service(self.g.node(arc.from).loc);
        self.b.lb[arc.from] + s + arc.time > self.b.ub[arc.to] + TIME_EPS
    }

    fn disconnected(&self, v: NodeId) -> bool {
        v != self.g.depot() && (self.g.in_degree(v) == 0 || self.g.out_degree(v) == 0)
    }

    fn check_node(&mut self, v: NodeId) -> bool {
        if self.disconnected(v) {
            self.delete_node(v, Cause::Disconnected);
            return false;
        }
        if self.b.ub[v] < self.b.lb[v] - TIME_EPS {
            let cause = infeasibility_cause(self.b, v);
            self.delete_node(v, cause);
            return false;
        }
        true
    }

    fn update_lb(&mut self, v: NodeId) {
        if !self.g.is_node_alive(v) {
            return;
        }
        let new = self.rules().lb(self.b, &self.no_dead, v);
        if new > self.b.lb[v] + TIME_EPS {
            self.b.lb[v] = new;
            self.b.changes += 1;
            let outs: Vec<ArcId> = self.g.out_arcs(v).collect();
            for &a in &outs {
                self.succ_q.push(self.g.arc(a).to);
            }
            if !self.check_node(v) {
                return;
            }
            for a in outs {
                if self.arc_infeasible(a) {
                    self.delete_arc(a);
                }
            }
        }
        self.check_node(v);
    }

    fn update_ub(&mut self, v: NodeId) {
        if !self.g.is_node_alive(v) {
            return;
        }
        let (new, by_ride) = self.rules().ub(self.b, &self.no_dead, v);
        if new < self.b.ub[v] - TIME_EPS {
            self.b.ub[v] = new;
            self.b.ub_by_ride[v] = by_ride;
            self.b.changes += 1;
            let ins: Vec<ArcId> = self.g.in_arcs(v).collect();
            for &a in &ins {
                self.pred_q.push(self.g.arc(a).from);
            }
            if let Loc::Pickup(i) = self.g.node(v).loc {
                self.req_q.push(i);
            }
            if !self.check_node(v) {
                return;
            }
            for a in ins {
                if self.arc_infeasible(a) {
                    self.delete_arc(a);
                }
            }
        }
        self.check_node(v);
    }

    fn update_request(&mut self, i: usize) -> Result<()> {
        let new = self
            .g
            .events_at(Loc::Pickup(i))
            .map(|v| self.b.ub[v])
            .fold(f64::NEG_INFINITY, f64::max);
        if new == f64::NEG_INFINITY {
            return Err(DarpError::InfeasibleInstance { request: i });
        }
        if new < self.b.req_ub[i] - TIME_EPS {
            self.b.req_ub[i] = new;
            self.b.changes += 1;
            for k in 0..self.by_request[i].len() {
                let v = self.by_request[i][k];
                if self.g.is_node_alive(v) {
                    self.pred_q.push(v);
                }
            }
        }
        Ok(())
    }

    /// Processes the successor list, the predecessor list and the request
    /// list in turn until all three are empty.
    fn run(&mut self) -> Result<()> {
        while !(self.succ_q.is_empty() && self.pred_q.is_empty() && self.req_q.is_empty()) {
            while let Some(v) = self.succ_q.pop() {
                self.update_lb(v);
            }
            while let Some(v) = self.pred_q.pop() {
                self.update_ub(v);
            }
            while let Some(i) = self.req_q.pop() {
                self.update_request(i)?;
            }
        }
        Ok(())
    }

    fn seed_all(&mut self) {
        let nodes: Vec<NodeId> = self.g.node_ids().collect();
        for &v in &nodes {
            self.succ_q.push(v);
            self.pred_q.push(v);
        }
        for i in 1..=self.inst.n() {
            self.req_q.push(i);
        }
        let arcs: Vec<ArcId> = self.g.arc_ids().collect();
        for a in arcs {
            if self.arc_infeasible(a) {
                self.delete_arc(a);
            }
        }
    }

    fn finish(mut self) -> ReductionReport {
        self.report.nodes_after = self.g.num_nodes();
        self.report.arcs_after = self.g.num_arcs();
        self.report
    }
}

/// Removes infeasible events and arcs until no bound changes any more.
///
/// Fails with `InfeasibleInstance` when some request loses all its pickup
/// events.
pub fn fixpoint_reduce(
    g: &mut EventGraph,
    b: &mut BoundState,
    inst: &DarpInstance,
) -> Result<ReductionReport> {
    let pending = std::mem::take(&mut b.pending);
    let mut p = Propagator::new(g, b, inst);
    for (v, cause) in pending {
        p.delete_node(v, cause);
    }
    p.seed_all();
    p.run()?;
    for i in 1..=inst.n() {
        p.update_request(i)?;
    }
    Ok(p.finish())
}

/// `compute_bounds` followed by `fixpoint_reduce`.
pub fn reduce(g: &mut EventGraph, inst: &DarpInstance) -> Result<(BoundState, ReductionReport)> {
    let mut b = compute_bounds(g, inst);
    let report = fixpoint_reduce(g, &mut b, inst)?;
    Ok((b, report))
}

/// Tightens bounds for an arc whose variable is fixed to one: `v` and `w`
/// behave as a merged event, so `w` only has `v` as predecessor and `v`
/// only `w` as successor. Propagates through the usual worklists.
///
/// Callers working in a search tree should clone graph and bounds first.
pub fn fixed_arc_update(
    g: &mut EventGraph,
    b: &mut BoundState,
    inst: &DarpInstance,
    a: ArcId,
) -> Result<ReductionReport> {
    if !g.is_arc_alive(a) {
        return Err(DarpError::Precondition(format!("arc {a} is not live")));
    }
    let (v, w) = (g.arc(a).from, g.arc(a).to);
    let time = g.arc(a).time;
    let depot = g.depot();
    if v != depot {
        b.fixed_succ[v] = Some(w);
    }
    if w != depot {
        b.fixed_pred[w] = Some(v);
    }
    // (6') and (7') with the old bound kept when it is tighter
    let s_v = inst.service(g.node(v).loc);
    if w != depot {
        let e_w = inst.earliest(g.node(w).loc);
        b.lb[w] = b.lb[w].max(e_w.max(b.lb[v] + s_v + time));
    }
    if v != depot {
        b.ub[v] = b.ub[v].min(b.ub[w] - time - s_v);
    }
    let mut p = Propagator::new(g, b, inst);
    p.succ_q.push(w);
    p.pred_q.push(v);
    for x in [v, w] {
        p.succ_q.push(x);
        p.pred_q.push(x);
        let outs: Vec<ArcId> = p.g.out_arcs(x).collect();
        let ins: Vec<ArcId> = p.g.in_arcs(x).collect();
        for arc in outs.into_iter().chain(ins) {
            if p.arc_infeasible(arc) {
                p.delete_arc(arc);
            }
        }
    }
    let infeasible_at = |p: &Propagator, x: NodeId| {
        !p.g.is_node_alive(x) || p.b.ub[x] < p.b.lb[x] - TIME_EPS
    };
    for x in [v, w] {
        if infeasible_at(&p, x) {
            let event = p.g.node(x).tuple(p.g.capacity());
            return Err(DarpError::InfeasibleFixing { arc: a, event });
        }
    }
    let run = p.run();
    for x in [v, w] {
        if infeasible_at(&p, x) || (x == w && !p.g.is_arc_alive(a)) {
            let event = p.g.node(x).tuple(p.g.capacity());
            return Err(DarpError::InfeasibleFixing { arc: a, event });
        }
    }
    run?;
    Ok(p.finish())
}

/// Deletes events that would seat together two requests from different
/// depot-anchored fixed paths.
///
/// Paths are event chains; a path is start-anchored if it begins at the
/// depot event and end-anchored if it ends there. Two start-anchored (or two
/// end-anchored) paths run on different vehicles, so any event mentioning a
/// request of one path and a request of the other is impossible.
pub fn fixed_path_filter(g: &mut EventGraph, paths: &[Vec<NodeId>]) -> Vec<NodeId> {
    let depot = g.depot();
    let requests_of = |g: &EventGraph, path: &[NodeId]| {
        let mut r: Vec<usize> = path
            .iter()
            .flat_map(|&v| {
                let node = g.node(v);
                node.loc.request().into_iter().chain(node.onboard.iter().copied())
            })
            .collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let mut conflicts: Vec<(usize, usize)> = Vec::new();
    for anchored in [
        |p: &Vec<NodeId>, d: NodeId| p.first() == Some(&d),
        |p: &Vec<NodeId>, d: NodeId| p.last() == Some(&d),
    ] {
        let group: Vec<Vec<usize>> = paths
            .iter()
            .filter(|p| anchored(p, depot))
            .map(|p| requests_of(g, p))
            .collect();
        for x in 0..group.len() {
            for y in x + 1..group.len() {
                for &i in &group[x] {
                    for &j in &group[y] {
                        if i != j {
                            conflicts.push((i.min(j), i.max(j)));
                        }
                    }
                }
            }
        }
    }
    conflicts.sort_unstable();
    conflicts.dedup();
    let victims: Vec<NodeId> = g
        .node_ids()
        .filter(|&v| {
            let node = g.node(v);
            conflicts.iter().any(|&(i, j)| node.mentions(i) && node.mentions(j))
        })
        .collect();
    for &v in &victims {
        g.delete_node(v);
    }
    victims
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_graph::{EventNode, GraphConfig};
    use crate::gen::{random_instance, GenParams};
    use crate::instance::{compat_flags, CompatFlags, Matrix, RequestKind, RequestSpec, Window};

    fn one_request() -> DarpInstance {
        let pos = [0.0, 2.0, 12.0];
        let m = Matrix::from_fn(3, |i, j| f64::abs(pos[i] - pos[j]));
        DarpInstance::from_matrices(
            "one",
            1,
            2,
            300.0,
            vec![RequestSpec {
                load: 1,
                service: 3.0,
                max_ride: 30.0,
                pickup: Window::new(100.0, 115.0),
                delivery: Window::new(0.0, 300.0),
                kind: RequestKind::Inbound,
            }],
            m.clone(),
            m,
        )
        .unwrap()
        .derive_windows()
        .unwrap()
    }

    fn graph(inst: &DarpInstance) -> EventGraph {
        EventGraph::build(inst, &compat_flags(inst), GraphConfig::default())
    }

    #[test]
    fn single_chain_bounds() {
        let inst = one_request();
        let g = graph(&inst);
        let b = compute_bounds(&g, &inst);
        let p = g.find(&EventNode::new(Loc::Pickup(1), vec![])).unwrap();
        let d = g.find(&EventNode::new(Loc::Delivery(1), vec![])).unwrap();
        let r = inst.request(1);
        assert_eq!(b.lb(p), r.pickup.earliest);
        assert_eq!(b.lb(d), r.delivery.earliest.max(r.pickup.earliest + r.service + r.direct_time));
        // delivery: window [113, 148], return leg allows up to 300 - 3 - 12
        assert_eq!(b.ub(d), 148.0);
        assert_eq!(b.ub(p), r.pickup.latest.min(b.ub(d) - r.direct_time - r.service));
        assert_eq!(b.request_ub(1), 115.0);
    }

    #[test]
    fn nothing_binds_means_no_deletions() {
        let mut inst = random_instance(&GenParams { n: 4, ..GenParams::default() }, 11);
        for r in &mut inst.requests {
            r.pickup = Window::new(40.0, 10_000.0);
            r.delivery = Window::new(40.0, 10_000.0);
            r.max_ride = 10_000.0;
        }
        inst.horizon = 100_000.0;
        let mut g = graph(&inst);
        let before = g.stats();
        let (_, report) = reduce(&mut g, &inst).unwrap();
        assert_eq!(g.stats(), before);
        assert_eq!(report.nodes_before, report.nodes_after);
        assert_eq!(report.arcs_before, report.arcs_after);
    }

    #[test]
    fn reduction_is_idempotent() {
        for seed in 0..10 {
            let inst = random_instance(&GenParams { n: 5, capacity: 3, ..GenParams::default() }, seed);
            let mut g = graph(&inst);
            reduce(&mut g, &inst).unwrap();
            let snapshot = g.dump();
            let (_, second) = reduce(&mut g, &inst).unwrap();
            assert_eq!(g.dump(), snapshot, "seed {seed}");
            assert_eq!(second.nodes_before, second.nodes_after);
        }
    }

    #[test]
    fn fixing_only_arc_of_chain_keeps_bounds() {
        let inst = one_request();
        let mut g = graph(&inst);
        let (mut b, _) = reduce(&mut g, &inst).unwrap();
        let p = g.find(&EventNode::new(Loc::Pickup(1), vec![])).unwrap();
        let d = g.find(&EventNode::new(Loc::Delivery(1), vec![])).unwrap();
        let (lb, ub) = ((b.lb(p), b.ub(p)), (b.lb(d), b.ub(d)));
        let a = g.find_arc(p, d).unwrap();
        fixed_arc_update(&mut g, &mut b, &inst, a).unwrap();
        assert_eq!((b.lb(p), b.ub(p)), lb);
        assert_eq!((b.lb(d), b.ub(d)), ub);
    }

    #[test]
    fn fixing_raises_lower_bound_of_head() {
        // 2+ is next to the depot, but the fixed arc comes from 1-
        let pos = [0.0, 1.0, 2.0, 30.0, 31.0];
        let m = Matrix::from_fn(5, |i, j| f64::abs(pos[i] - pos[j]));
        let spec = RequestSpec {
            load: 1,
            service: 1.0,
            max_ride: 100.0,
            pickup: Window::new(0.0, 500.0),
            delivery: Window::new(0.0, 500.0),
            kind: RequestKind::Explicit,
        };
        let inst = DarpInstance::from_matrices("fx", 1, 3, 1000.0, vec![spec.clone(), spec], m.clone(), m)
            .unwrap()
            .derive_windows()
            .unwrap();
        let mut g = EventGraph::build(&inst, &CompatFlags::all_true(2), GraphConfig::default());
        let (mut b, _) = reduce(&mut g, &inst).unwrap();
        let d1 = g.find(&EventNode::new(Loc::Delivery(1), vec![])).unwrap();
        let p2 = g.find(&EventNode::new(Loc::Pickup(2), vec![])).unwrap();
        assert_eq!(b.lb(p2), 2.0);
        assert_eq!(b.lb(d1), 31.0);
        let a = g.find_arc(d1, p2).unwrap();
        fixed_arc_update(&mut g, &mut b, &inst, a).unwrap();
        assert_eq!(b.lb(p2), 31.0 + 1.0 + 28.0);
    }

    #[test]
    fn fixed_path_filter_needs_two_paths() {
        let inst = random_instance(&GenParams { n: 4, ..GenParams::default() }, 2);
        let mut g = EventGraph::build(&inst, &CompatFlags::all_true(4), GraphConfig::default());
        let depot = g.depot();
        let p = |g: &EventGraph, i| g.find(&EventNode::new(Loc::Pickup(i), vec![])).unwrap();
        let one = vec![depot, p(&g, 1)];
        assert!(fixed_path_filter(&mut g, std::slice::from_ref(&one)).is_empty());
        let two = vec![depot, p(&g, 2)];
        let victims = fixed_path_filter(&mut g, &[one, two]);
        assert!(!victims.is_empty());
        for v in g.node_ids() {
            let node = g.node(v);
            assert!(!(node.mentions(1) && node.mentions(2)));
        }
    }

    #[test]
    fn report_serializes() {
        let inst = random_instance(&GenParams::default(), 5);
        let mut g = graph(&inst);
        let (_, report) = reduce(&mut g, &inst).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert!(json["deleted_nodes"]["ride_time"].is_u64());
        assert!(json["deleted_arcs"]["arc_slack"].is_u64());
    }
}
