//! Event-based graph: nodes are vehicle states `(location, onboard set)`,
//! arcs are the feasible transitions of families A1–A6.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::instance::{CompatFlags, DarpInstance, Loc};

pub type NodeId = usize;
pub type ArcId = usize;

/// A vehicle state: service at `loc` with `onboard` other requests seated.
///
/// For a pickup event the onboard set excludes the request being picked up,
/// for a delivery event it excludes the request being dropped. `onboard`
/// is sorted in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EventNode {
    pub loc: Loc,
    pub onboard: Vec<usize>,
}

impl EventNode {
    pub fn new(loc: Loc, mut onboard: Vec<usize>) -> Self {
        onboard.sort_unstable_by(|a, b| b.cmp(a));
        EventNode { loc, onboard }
    }

    pub fn depot() -> Self {
        EventNode {
            loc: Loc::Depot,
            onboard: Vec::new(),
        }
    }

    pub fn is_depot(&self) -> bool {
        self.loc == Loc::Depot
    }

    /// Requests seated while the vehicle drives towards this event.
    pub fn onboard_before(&self) -> Vec<usize> {
        match self.loc {
            Loc::Delivery(i) => with(&self.onboard, i),
            _ => self.onboard.clone(),
        }
    }

    /// Requests seated when the vehicle leaves this event.
    pub fn onboard_after(&self) -> Vec<usize> {
        match self.loc {
            Loc::Pickup(i) => with(&self.onboard, i),
            _ => self.onboard.clone(),
        }
    }

    /// Whether request `i` appears anywhere in the tuple.
    pub fn mentions(&self, i: usize) -> bool {
        self.loc.request() == Some(i) || self.onboard.contains(&i)
    }

    /// Tuple notation with `q - 1` onboard slots, e.g. `(3+,2,1)`.
    pub fn tuple(&self, q: u32) -> String {
        let mut s = format!("({}", self.loc);
        for k in 0..(q as usize).saturating_sub(1) {
            let _ = write!(s, ",{}", self.onboard.get(k).copied().unwrap_or(0));
        }
        s.push(')');
        s
    }

    /// Identifier-safe code, e.g. `p3_2_1` or `o_0_0`.
    pub fn code(&self, q: u32) -> String {
        let mut s = self.loc.code();
        for k in 0..(q as usize).saturating_sub(1) {
            let _ = write!(s, "_{}", self.onboard.get(k).copied().unwrap_or(0));
        }
        s
    }
}

/// Events visited by a tour given as its stop sequence without depots.
pub fn tour_events(seq: &[Loc]) -> Vec<EventNode> {
    let mut onboard: Vec<usize> = Vec::new();
    seq.iter()
        .map(|&loc| match loc {
            Loc::Pickup(i) => {
                let ev = EventNode::new(loc, onboard.clone());
                onboard.push(i);
                ev
            }
            Loc::Delivery(i) => {
                onboard.retain(|&k| k != i);
                EventNode::new(loc, onboard.clone())
            }
            Loc::Depot => EventNode::depot(),
        })
        .collect()
}

/// Sorted-descending union of `set` and `{i}`.
fn with(set: &[usize], i: usize) -> Vec<usize> {
    let mut v = set.to_vec();
    let pos = v.iter().position(|&x| x < i).unwrap_or(v.len());
    v.insert(pos, i);
    v
}

fn without(set: &[usize], i: usize) -> Vec<usize> {
    set.iter().copied().filter(|&x| x != i).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ArcFamily {
    /// pickup → delivery
    A1,
    /// pickup → pickup
    A2,
    /// delivery → pickup
    A3,
    /// delivery → delivery
    A4,
    /// delivery → depot
    A5,
    /// depot → pickup
    A6,
}

impl fmt::Display for ArcFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
    pub family: ArcFamily,
    pub time: f64,
    pub cost: f64,
}

/// Which condition filters the onboard companions of a delivery event.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum DeliveryFilter {
    /// `f1(v, i) + f2(i, v) ≥ 1`: `v` can be seated while `i` is dropped.
    #[default]
    Literal,
    /// `f1(i, v) + f2(i, v) ≥ 1`, same form as the pickup filter.
    Symmetric,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GraphConfig {
    pub delivery_filter: DeliveryFilter,
    /// Additionally require every two onboard companions to be able to
    /// share the vehicle. Valid, but not part of the plain node definition.
    pub pairwise_onboard: bool,
}

/// Event-based graph with tombstoned deletion.
#[derive(Clone, Debug)]
pub struct EventGraph {
    capacity: u32,
    n: usize,
    nodes: Vec<EventNode>,
    node_alive: Vec<bool>,
    index: HashMap<EventNode, NodeId>,
    arcs: Vec<Arc>,
    arc_alive: Vec<bool>,
    out_adj: Vec<Vec<ArcId>>,
    in_adj: Vec<Vec<ArcId>>,
    live_nodes: usize,
    live_arcs: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub arcs: usize,
    pub arcs_by_family: [usize; 6],
}

impl EventGraph {
    /// Builds nodes and arcs in one go.
    pub fn build(inst: &DarpInstance, flags: &CompatFlags, cfg: GraphConfig) -> Self {
        let mut g = build_nodes(inst, flags, cfg);
        build_arcs(&mut g, inst);
        g
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of node slots, including deleted ones.
    pub fn node_bound(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_bound(&self) -> usize {
        self.arcs.len()
    }

    pub fn depot(&self) -> NodeId {
        0
    }

    pub fn node(&self, v: NodeId) -> &EventNode {
        &self.nodes[v]
    }

    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[a]
    }

    pub fn is_node_alive(&self, v: NodeId) -> bool {
        self.node_alive[v]
    }

    pub fn is_arc_alive(&self, a: ArcId) -> bool {
        self.arc_alive[a]
    }

    pub fn find(&self, node: &EventNode) -> Option<NodeId> {
        self.index.get(node).copied().filter(|&v| self.node_alive[v])
    }

    pub fn find_arc(&self, from: NodeId, to: NodeId) -> Option<ArcId> {
        self.out_arcs(from).find(|&a| self.arcs[a].to == to)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&v| self.node_alive[v])
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> + '_ {
        (0..self.arcs.len()).filter(move |&a| self.arc_alive[a])
    }

    pub fn out_arcs(&self, v: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.out_adj[v].iter().copied().filter(move |&a| self.arc_alive[a])
    }

    pub fn in_arcs(&self, v: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.in_adj[v].iter().copied().filter(move |&a| self.arc_alive[a])
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_arcs(v).count()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_arcs(v).count()
    }

    /// Live events at location `loc`.
    pub fn events_at(&self, loc: Loc) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(move |&v| self.nodes[v].loc == loc)
    }

    pub fn num_nodes(&self) -> usize {
        self.live_nodes
    }

    pub fn num_arcs(&self) -> usize {
        self.live_arcs
    }

    pub fn stats(&self) -> GraphStats {
        let mut by = [0; 6];
        for a in self.arc_ids() {
            by[self.arcs[a].family as usize] += 1;
        }
        GraphStats {
            nodes: self.live_nodes,
            arcs: self.live_arcs,
            arcs_by_family: by,
        }
    }

    pub fn delete_arc(&mut self, a: ArcId) -> bool {
        if !self.arc_alive[a] {
            return false;
        }
        self.arc_alive[a] = false;
        self.live_arcs -= 1;
        true
    }

    /// Deletes `v` together with its incident arcs. The depot is never
    /// deleted. Returns the deleted arcs.
    pub fn delete_node(&mut self, v: NodeId) -> Vec<ArcId> {
        if v == self.depot() || !self.node_alive[v] {
            return Vec::new();
        }
        self.node_alive[v] = false;
        self.live_nodes -= 1;
        let incident: Vec<ArcId> = self.in_adj[v]
            .iter()
            .chain(&self.out_adj[v])
            .copied()
            .filter(|&a| self.arc_alive[a])
            .collect();
        for &a in &incident {
            self.delete_arc(a);
        }
        incident
    }

    /// Drops tombstones. Returns the old-to-new node id map.
    pub fn compact(&mut self) -> Vec<Option<NodeId>> {
        let mut map = vec![None; self.nodes.len()];
        let mut nodes = Vec::with_capacity(self.live_nodes);
        for v in 0..self.nodes.len() {
            if self.node_alive[v] {
                map[v] = Some(nodes.len());
                nodes.push(self.nodes[v].clone());
            }
        }
        let arcs: Vec<Arc> = (0..self.arcs.len())
            .filter(|&a| self.arc_alive[a])
            .map(|a| {
                let mut arc = self.arcs[a].clone();
                arc.from = map[arc.from].expect("live arc at deleted node");
                arc.to = map[arc.to].expect("live arc at deleted node");
                arc
            })
            .collect();
        *self = EventGraph::from_parts(self.capacity, self.n, nodes, arcs);
        map
    }

    fn from_parts(capacity: u32, n: usize, nodes: Vec<EventNode>, arcs: Vec<Arc>) -> Self {
        let index = nodes.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
        let mut out_adj = vec![Vec::new(); nodes.len()];
        let mut in_adj = vec![Vec::new(); nodes.len()];
        for (k, a) in arcs.iter().enumerate() {
            out_adj[a.from].push(k);
            in_adj[a.to].push(k);
        }
        EventGraph {
            capacity,
            n,
            node_alive: vec![true; nodes.len()],
            live_nodes: nodes.len(),
            arc_alive: vec![true; arcs.len()],
            live_arcs: arcs.len(),
            nodes,
            index,
            arcs,
            out_adj,
            in_adj,
        }
    }

    fn push_arc(&mut self, arc: Arc) {
        let id = self.arcs.len();
        self.out_adj[arc.from].push(id);
        self.in_adj[arc.to].push(id);
        self.arcs.push(arc);
        self.arc_alive.push(true);
        self.live_arcs += 1;
    }

    /// Text dump: `NODE <tuple>` lines, then `ARC <family> <from> <to> <t> <c>`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in self.node_ids() {
            let _ = writeln!(s, "NODE {}", self.nodes[v].tuple(self.capacity));
        }
        for a in self.arc_ids() {
            let arc = &self.arcs[a];
            let _ = writeln!(
                s,
                "ARC {} {} {} {} {}",
                arc.family,
                self.nodes[arc.from].tuple(self.capacity),
                self.nodes[arc.to].tuple(self.capacity),
                arc.time,
                arc.cost
            );
        }
        s
    }
}

/// Enumerates `V_0`, `V_{i+}` and `V_{i-}` for all requests.
pub fn build_nodes(inst: &DarpInstance, flags: &CompatFlags, cfg: GraphConfig) -> EventGraph {
    let n = inst.n();
    let cap = inst.capacity;
    let mut nodes = vec![EventNode::depot()];
    for i in 1..=n {
        let qi = inst.request(i).load;
        let pick_ok = |v: usize| flags.f1(i, v) || flags.f2(i, v);
        let drop_ok = |v: usize| match cfg.delivery_filter {
            DeliveryFilter::Literal => flags.f1(v, i) || flags.f2(i, v),
            DeliveryFilter::Symmetric => flags.f1(i, v) || flags.f2(i, v),
        };
        for (is_pickup, ok) in [(true, &pick_ok as &dyn Fn(usize) -> bool), (false, &drop_ok)] {
            // candidates in decreasing id order so subsets come out sorted
            let cand: Vec<usize> = (1..=n).rev().filter(|&v| v != i && ok(v)).collect();
            let mut sets = Vec::new();
            enumerate_sets(inst, flags, cfg, &cand, 0, cap - qi, (cap - 1) as usize, &mut Vec::new(), &mut sets);
            sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            let loc = if is_pickup { Loc::Pickup(i) } else { Loc::Delivery(i) };
            nodes.extend(sets.into_iter().map(|s| EventNode { loc, onboard: s }));
        }
    }
    let mut g = EventGraph::from_parts(cap, n, nodes, Vec::new());
    g.live_arcs = 0;
    g
}

#[allow(clippy::too_many_arguments)]
fn enumerate_sets(
    inst: &DarpInstance,
    flags: &CompatFlags,
    cfg: GraphConfig,
    cand: &[usize],
    from: usize,
    room: u32,
    slots: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    out.push(cur.clone());
    if cur.len() == slots {
        return;
    }
    for k in from..cand.len() {
        let v = cand[k];
        let q = inst.request(v).load;
        if q > room {
            continue;
        }
        if cfg.pairwise_onboard && cur.iter().any(|&u| !flags.can_share(u, v)) {
            continue;
        }
        cur.push(v);
        enumerate_sets(inst, flags, cfg, cand, k + 1, room - q, slots, cur, out);
        cur.pop();
    }
}

/// Adds the arcs of families A1–A6 between existing nodes.
pub fn build_arcs(g: &mut EventGraph, inst: &DarpInstance) {
    let n = g.n;
    let slots = (g.capacity - 1) as usize;
    let mut new_arcs = Vec::new();
    for v in 0..g.nodes.len() {
        let node = g.nodes[v].clone();
        let mut link = |target: EventNode, family: ArcFamily| {
            if let Some(&w) = g.index.get(&target) {
                new_arcs.push(Arc {
                    from: v,
                    to: w,
                    family,
                    time: inst.time(node.loc, target.loc),
                    cost: inst.arc_cost(node.loc, target.loc),
                });
            }
        };
        match node.loc {
            Loc::Depot => {
                for j in 1..=n {
                    link(EventNode::new(Loc::Pickup(j), Vec::new()), ArcFamily::A6);
                }
            }
            Loc::Pickup(_) => {
                let after = node.onboard_after();
                for &j in &after {
                    link(EventNode { loc: Loc::Delivery(j), onboard: without(&after, j) }, ArcFamily::A1);
                }
                if node.onboard.len() < slots {
                    for j in 1..=n {
                        if !after.contains(&j) {
                            link(EventNode { loc: Loc::Pickup(j), onboard: after.clone() }, ArcFamily::A2);
                        }
                    }
                }
            }
            Loc::Delivery(i) => {
                for j in 1..=n {
                    if j != i && !node.onboard.contains(&j) {
                        link(EventNode { loc: Loc::Pickup(j), onboard: node.onboard.clone() }, ArcFamily::A3);
                    }
                }
                for &j in &node.onboard {
                    link(
                        EventNode { loc: Loc::Delivery(j), onboard: without(&node.onboard, j) },
                        ArcFamily::A4,
                    );
                }
                if node.onboard.is_empty() {
                    link(EventNode::depot(), ArcFamily::A5);
                }
            }
        }
    }
    for a in new_arcs {
        g.push_arc(a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_instance, GenParams};

    fn full(inst: &DarpInstance) -> EventGraph {
        EventGraph::build(inst, &CompatFlags::all_true(inst.n()), GraphConfig::default())
    }

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
    }

    fn inst(n: usize, q: u32) -> DarpInstance {
        random_instance(&GenParams { n, vehicles: 1, capacity: q, ..GenParams::default() }, 7)
    }

    #[test]
    fn single_request_graph() {
        let i = inst(1, 2);
        let g = full(&i);
        let tuples: Vec<_> = g.node_ids().map(|v| g.node(v).tuple(2)).collect();
        assert_eq!(tuples, vec!["(0,0)", "(1+,0)", "(1-,0)"]);
        let arcs: Vec<_> = g
            .arc_ids()
            .map(|a| (g.arc(a).family, g.node(g.arc(a).from).tuple(2), g.node(g.arc(a).to).tuple(2)))
            .collect();
        assert_eq!(arcs.len(), 3);
        assert!(arcs.contains(&(ArcFamily::A6, "(0,0)".into(), "(1+,0)".into())));
        assert!(arcs.contains(&(ArcFamily::A1, "(1+,0)".into(), "(1-,0)".into())));
        assert!(arcs.contains(&(ArcFamily::A5, "(1-,0)".into(), "(0,0)".into())));
    }

    #[test]
    fn three_requests_capacity_two() {
        let g = full(&inst(3, 2));
        assert_eq!(g.num_nodes(), 19);
        for i in 1..=3 {
            assert_eq!(g.events_at(Loc::Pickup(i)).count(), 3);
            assert_eq!(g.events_at(Loc::Delivery(i)).count(), 3);
        }
    }

    #[test]
    fn pickup_event_counts_match_closed_form() {
        for n in 1..=8 {
            for q in 2..=4u32 {
                let g = full(&inst(n, q));
                let expect: usize = (0..q as usize).map(|k| binom(n - 1, k)).sum();
                for i in 1..=n {
                    assert_eq!(g.events_at(Loc::Pickup(i)).count(), expect, "n={n} Q={q}");
                }
            }
        }
    }

    #[test]
    fn paper_example_events_and_arcs() {
        let g = full(&inst(3, 3));
        let e = |loc, s: &[usize]| g.find(&EventNode::new(loc, s.to_vec())).unwrap();
        let p3 = e(Loc::Pickup(3), &[2, 1]);
        let d3 = e(Loc::Delivery(3), &[2, 1]);
        let d1 = e(Loc::Delivery(1), &[2]);
        assert_eq!(g.node(p3).tuple(3), "(3+,2,1)");
        assert_eq!(g.arc(g.find_arc(p3, d3).unwrap()).family, ArcFamily::A1);
        assert_eq!(g.arc(g.find_arc(d3, d1).unwrap()).family, ArcFamily::A4);
        assert!(g.find_arc(p3, d1).is_none());
    }

    #[test]
    fn every_event_has_in_and_out_arcs() {
        let g = full(&inst(5, 3));
        for v in g.node_ids() {
            assert!(g.in_degree(v) > 0 && g.out_degree(v) > 0, "{}", g.node(v).tuple(3));
        }
    }

    #[test]
    fn deletion_and_compaction_keep_adjacency_consistent() {
        let mut g = full(&inst(4, 3));
        let victim = g.events_at(Loc::Pickup(2)).nth(1).unwrap();
        let removed = g.delete_node(victim);
        assert!(!removed.is_empty());
        assert_eq!(g.in_degree(victim), 0);
        assert_eq!(g.out_degree(victim), 0);
        let before = g.dump();
        let map = g.compact();
        assert!(map[victim].is_none());
        assert_eq!(g.dump(), before);
        for a in g.arc_ids() {
            let arc = g.arc(a);
            assert!(g.out_arcs(arc.from).any(|b| b == a));
            assert!(g.in_arcs(arc.to).any(|b| b == a));
        }
    }

    #[test]
    fn codes_are_identifier_safe() {
        let node = EventNode::new(Loc::Pickup(3), vec![1, 2]);
        assert_eq!(node.code(3), "p3_2_1");
        assert_eq!(EventNode::depot().code(3), "o_0_0");
        assert_eq!(node.onboard_after(), vec![3, 2, 1]);
    }
}
