//! Valid inequalities over event-graph arc variables: bound cuts derived
//! from preprocessing, infeasible-path cuts, vehicle-sharing cuts and
//! customer-incompatibility cuts. All families are generated up front and
//! appended to a model as ordinary rows.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DarpError, Result};
use crate::event_graph::{ArcId, EventGraph, EventNode, NodeId};
use crate::instance::{CompatFlags, DarpInstance, Loc};
use crate::models::{FormulationKind, MilpModel, Sense, Site, VarRef};
use crate::preprocessing::BoundState;

/// Margin by which a time bound must be violated before a path counts as
/// infeasible.
const PATH_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CutFamily {
    #[serde(rename = "BOUNDS_EB_PICK")]
    BoundsEbPick,
    #[serde(rename = "BOUNDS_EB_DROP")]
    BoundsEbDrop,
    #[serde(rename = "BOUNDS_LOC")]
    BoundsLoc,
    #[serde(rename = "IP1")]
    Ip1,
    #[serde(rename = "IP2")]
    Ip2,
    #[serde(rename = "VS1")]
    Vs1,
    #[serde(rename = "VS2")]
    Vs2,
    #[serde(rename = "VS3")]
    Vs3,
    #[serde(rename = "VS4")]
    Vs4,
    #[serde(rename = "CI1")]
    Ci1,
}

impl CutFamily {
    pub const ALL: [CutFamily; 10] = [
        Self::BoundsEbPick,
        Self::BoundsEbDrop,
        Self::BoundsLoc,
        Self::Ip1,
        Self::Ip2,
        Self::Vs1,
        Self::Vs2,
        Self::Vs3,
        Self::Vs4,
        Self::Ci1,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::BoundsEbPick => "BOUNDS_EB_PICK",
            Self::BoundsEbDrop => "BOUNDS_EB_DROP",
            Self::BoundsLoc => "BOUNDS_LOC",
            Self::Ip1 => "IP1",
            Self::Ip2 => "IP2",
            Self::Vs1 => "VS1",
            Self::Vs2 => "VS2",
            Self::Vs3 => "VS3",
            Self::Vs4 => "VS4",
            Self::Ci1 => "CI1",
        }
    }

    /// Prefix of the model rows holding cuts of this family.
    pub fn row_prefix(self) -> String {
        self.tag().to_ascii_lowercase()
    }

    pub fn is_bound(self) -> bool {
        matches!(self, Self::BoundsEbPick | Self::BoundsEbDrop | Self::BoundsLoc)
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CutFamily {
    type Err = DarpError;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        CutFamily::ALL
            .into_iter()
            .find(|f| f.tag() == up)
            .ok_or_else(|| DarpError::Precondition(format!("unknown cut family {s:?}")))
    }
}

/// One inequality `Σ a·x (sense) rhs` over model variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub family: CutFamily,
    pub terms: Vec<(VarRef, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Cut {
    pub fn support(&self) -> usize {
        self.terms.len()
    }
}

/// Which families to generate and how many cuts each may contribute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutConfig {
    pub families: BTreeSet<CutFamily>,
    pub cap_per_family: usize,
}

impl Default for CutConfig {
    fn default() -> Self {
        CutConfig::all()
    }
}

impl CutConfig {
    pub const DEFAULT_CAP: usize = 500_000;

    pub fn all() -> Self {
        CutConfig {
            families: CutFamily::ALL.into_iter().collect(),
            cap_per_family: Self::DEFAULT_CAP,
        }
    }

    pub fn none() -> Self {
        CutConfig {
            families: BTreeSet::new(),
            cap_per_family: Self::DEFAULT_CAP,
        }
    }

    pub fn only(families: &[CutFamily]) -> Self {
        CutConfig {
            families: families.iter().copied().collect(),
            cap_per_family: Self::DEFAULT_CAP,
        }
    }

    /// Parses a comma-separated list such as `vs1,vs2,ip1`. `all` and
    /// `none` are accepted, and `bounds` selects the three bound families.
    pub fn parse_list(s: &str) -> Result<Self> {
        let mut cfg = CutConfig::none();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.to_ascii_lowercase().as_str() {
                "all" => cfg.families.extend(CutFamily::ALL),
                "none" => {}
                "bounds" => cfg.families.extend(CutFamily::ALL.into_iter().filter(|f| f.is_bound())),
                "vs" => cfg.families.extend([CutFamily::Vs1, CutFamily::Vs2, CutFamily::Vs3, CutFamily::Vs4]),
                "ip" => cfg.families.extend([CutFamily::Ip1, CutFamily::Ip2]),
                _ => {
                    cfg.families.insert(item.parse()?);
                }
            }
        }
        Ok(cfg)
    }

    pub fn has(&self, f: CutFamily) -> bool {
        self.families.contains(&f)
    }
}

/// Generated cuts in family order, plus how many each family lost to the
/// size cap.
#[derive(Clone, Debug, Default)]
pub struct CutPool {
    pub cuts: Vec<Cut>,
    pub truncated: BTreeMap<CutFamily, usize>,
}

impl CutPool {
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn counts(&self) -> BTreeMap<CutFamily, usize> {
        let mut out = BTreeMap::new();
        for c in &self.cuts {
            *out.entry(c.family).or_default() += 1;
        }
        out
    }

    pub fn of(&self, family: CutFamily) -> impl Iterator<Item = &Cut> + '_ {
        self.cuts.iter().filter(move |c| c.family == family)
    }

    /// Audit dump with one line per cut: family, support size, RHS.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["family", "support", "sense", "rhs"])?;
        for c in &self.cuts {
            let sense = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            w.write_record([c.family.tag(), &c.support().to_string(), sense, &c.rhs.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    fn extend(&mut self, family: CutFamily, cuts: Vec<Cut>, cap: usize) {
        if cuts.len() > cap {
            self.truncated.insert(family, cuts.len() - cap);
            log::warn!("{family}: {} cuts over the cap of {cap} dropped", cuts.len() - cap);
        }
        self.cuts.extend(cuts.into_iter().take(cap));
    }
}

impl MilpModel {
    /// Appends cuts as rows named `<family>__<k>`. Fails if a cut mentions
    /// a variable the model does not have.
    pub fn add_cuts(&mut self, cuts: &[Cut]) -> Result<usize> {
        let mut seen: HashMap<CutFamily, usize> = HashMap::new();
        for f in CutFamily::ALL {
            seen.insert(f, self.rows_in_family(&f.row_prefix()).count());
        }
        for c in cuts {
            let terms = c
                .terms
                .iter()
                .map(|&(r, a)| {
                    self.var(r)
                        .map(|j| (j, a))
                        .ok_or_else(|| DarpError::Precondition(format!("{} cut references {r:?}, which the model lacks", c.family)))
                })
                .collect::<Result<Vec<_>>>()?;
            let k = seen.get_mut(&c.family).expect("every family is seeded");
            self.add_row(format!("{}__{}", c.family.row_prefix(), *k), terms, c.sense, c.rhs);
            *k += 1;
        }
        Ok(cuts.len())
    }
}

/// Generates every selected family that applies to `kind`. Bound and
/// infeasible-path families need `bounds`; they are skipped without it.
pub fn generate_cuts(
    kind: FormulationKind,
    inst: &DarpInstance,
    g: &EventGraph,
    bounds: Option<&BoundState>,
    flags: &CompatFlags,
    cfg: &CutConfig,
) -> CutPool {
    let mut pool = CutPool::default();
    if !kind.uses_event_graph() {
        return pool;
    }
    let cap = cfg.cap_per_family;
    if let Some(b) = bounds {
        let bc = gen_bound_cuts(g, inst, b, kind);
        for f in [CutFamily::BoundsEbPick, CutFamily::BoundsEbDrop, CutFamily::BoundsLoc] {
            if cfg.has(f) {
                pool.extend(f, bc.iter().filter(|c| c.family == f).cloned().collect(), cap);
            }
        }
        if cfg.has(CutFamily::Ip1) {
            pool.extend(CutFamily::Ip1, gen_ip1(g, inst, b), cap);
        }
        if cfg.has(CutFamily::Ip2) {
            pool.extend(CutFamily::Ip2, gen_ip2(g, inst, b), cap);
        }
    }
    let vs = [CutFamily::Vs1, CutFamily::Vs2, CutFamily::Vs3, CutFamily::Vs4];
    if vs.iter().any(|&f| cfg.has(f)) {
        let all = gen_vehicle_sharing(g, flags);
        for f in vs {
            if cfg.has(f) {
                pool.extend(f, all.iter().filter(|c| c.family == f).cloned().collect(), cap);
            }
        }
    }
    if cfg.has(CutFamily::Ci1) {
        pool.extend(CutFamily::Ci1, gen_customer_incompat(g, inst, flags), cap);
    }
    pool
}

fn in_sum(g: &EventGraph, v: NodeId, coef: f64) -> impl Iterator<Item = (VarRef, f64)> + '_ {
    g.in_arcs(v).map(move |a| (VarRef::Arc(a), coef))
}

/// Time-window cuts tied to the bounds. For EB, per pickup event
/// `X + (B^LB − X)·Σx ≤ B_v ≤ ℓ + (B^UB − ℓ)·Σx` with
/// `X = min(ℓ_{i-} − L_i − s_i, ℓ_{i+})`, and per delivery event
/// `e_{i-} + (B^LB − e_{i-})·Σx ≤ B_v ≤ D + (B^UB − D)·Σx` with
/// `D = e_{i+} + s_i + L_i`, where `Σx` is the inflow of `v`. For the
/// location-augmented models, per location `Σ_v B^LB(v)·Σx ≤ B̄_j ≤
/// Σ_v B^UB(v)·Σx`. Events whose bounds are not finite cannot be reached
/// and are left out.
pub fn gen_bound_cuts(g: &EventGraph, inst: &DarpInstance, b: &BoundState, kind: FormulationKind) -> Vec<Cut> {
    let mut out = Vec::new();
    match kind {
        FormulationKind::Lb => {}
        FormulationKind::Eb => {
            let mut drops = Vec::new();
            for v in g.node_ids() {
                let node = g.node(v);
                let Some(i) = node.loc.request() else { continue };
                if !(b.lb(v).is_finite() && b.ub(v).is_finite()) {
                    continue;
                }
                let r = inst.request(i);
                let bv = (VarRef::EventTime(v), 1.0);
                let (lo, hi, family, sink) = if node.loc.is_pickup() {
                    let x = (r.delivery.latest - r.max_ride - r.service).min(r.pickup.latest);
                    (x, r.pickup.latest, CutFamily::BoundsEbPick, &mut out)
                } else {
                    let d = r.pickup.earliest + r.service + r.max_ride;
                    (r.delivery.earliest, d, CutFamily::BoundsEbDrop, &mut drops)
                };
                let mut terms = vec![bv];
                terms.extend(in_sum(g, v, -(b.lb(v) - lo)));
                sink.push(Cut { family, terms, sense: Sense::Ge, rhs: lo });
                let mut terms = vec![bv];
                terms.extend(in_sum(g, v, -(b.ub(v) - hi)));
                sink.push(Cut { family, terms, sense: Sense::Le, rhs: hi });
            }
            out.extend(drops);
        }
        FormulationKind::Laeb | FormulationKind::Alaeb => {
            for loc in inst.locations().filter(|&l| l != Loc::Depot) {
                let bar = (VarRef::Time(Site::At(loc)), 1.0);
                let mut lower = vec![bar];
                let mut upper = vec![bar];
                for v in g.events_at(loc).filter(|&v| b.lb(v).is_finite() && b.ub(v).is_finite()) {
                    lower.extend(in_sum(g, v, -b.lb(v)));
                    upper.extend(in_sum(g, v, -b.ub(v)));
                }
                out.push(Cut { family: CutFamily::BoundsLoc, terms: lower, sense: Sense::Ge, rhs: 0.0 });
                out.push(Cut { family: CutFamily::BoundsLoc, terms: upper, sense: Sense::Le, rhs: 0.0 });
            }
        }
    }
    out
}

/// `(arc, value)` pairs sorted by value; ties by the other endpoint's id.
fn sorted_by(g: &EventGraph, arcs: impl Iterator<Item = ArcId>, value: impl Fn(ArcId) -> f64, decreasing: bool) -> Vec<(ArcId, f64)> {
    let mut v: Vec<(ArcId, f64)> = arcs.map(|a| (a, value(a))).collect();
    v.sort_by(|&(a, x), &(b, y)| {
        let ord = if decreasing { y.total_cmp(&x) } else { x.total_cmp(&y) };
        let key = |a: ArcId| (g.arc(a).from, g.arc(a).to);
        ord.then_with(|| key(a).cmp(&key(b)))
    });
    v
}

/// Pairwise infeasible-path cuts at every non-depot event, lifted over all
/// predecessors arriving no earlier and all successors due no later.
pub fn gen_ip1(g: &EventGraph, inst: &DarpInstance, b: &BoundState) -> Vec<Cut> {
    let mut out = Vec::new();
    for v in g.node_ids() {
        if g.node(v).is_depot() {
            continue;
        }
        let preds = sorted_by(g, g.in_arcs(v), |a| b.arc_lb(g, inst, a), false);
        let succs = sorted_by(g, g.out_arcs(v), |a| b.arc_ub(g, inst, a), true);
        let mut prev: Option<Vec<ArcId>> = None;
        for &(_, ub) in &succs {
            let w: Vec<ArcId> = preds.iter().filter(|&&(_, lb)| lb > ub + PATH_EPS).map(|&(a, _)| a).collect();
            if w.is_empty() || prev.as_ref() == Some(&w) {
                continue;
            }
            let mut terms: Vec<(VarRef, f64)> = w.iter().map(|&a| (VarRef::Arc(a), 1.0)).collect();
            terms.extend(succs.iter().filter(|&&(_, u)| u <= ub).map(|&(a, _)| (VarRef::Arc(a), 1.0)));
            out.push(Cut { family: CutFamily::Ip1, terms, sense: Sense::Le, rhs: 1.0 });
            prev = Some(w);
        }
    }
    out
}

/// Whether the detour terms of the cut on base arc `(u2, u3)` are safe: the
/// vehicle must not be empty between the two events, and `u3` must not be
/// able to come before `u2` on the same tour.
fn detours_allowed(g: &EventGraph, inst: &DarpInstance, b: &BoundState, u2: NodeId, u3: NodeId) -> bool {
    let (n2, n3) = (g.node(u2), g.node(u3));
    let empties = |n: &EventNode| n.loc.is_delivery() && n.onboard.is_empty();
    if empties(n2) || empties(n3) {
        return false;
    }
    if n2.loc.is_pickup() {
        // u3 has the request picked up at u2 on board, so it comes later
        return true;
    }
    let back = b.lb(u3) + inst.service(n3.loc) + inst.time(n3.loc, n2.loc);
    back > b.ub(u2) + PATH_EPS
}

/// Half-weighted detour arcs `(u2, u2_{i+})` and `(u3_{i-}, u3)` for every
/// request `i` where both events and both arcs exist.
fn detour_terms(g: &EventGraph, u2: NodeId, u3: NodeId) -> Vec<(VarRef, f64)> {
    let after = g.node(u2).onboard_after();
    let before = g.node(u3).onboard_before();
    let mut out = Vec::new();
    for i in 1..=g.n() {
        if after.contains(&i) || before.contains(&i) {
            continue;
        }
        let pick = g.find(&EventNode::new(Loc::Pickup(i), after.clone()));
        let drop = g.find(&EventNode::new(Loc::Delivery(i), before.clone()));
        let (Some(p), Some(d)) = (pick, drop) else { continue };
        if let (Some(a), Some(c)) = (g.find_arc(u2, p), g.find_arc(d, u3)) {
            out.push((VarRef::Arc(a), 0.5));
            out.push((VarRef::Arc(c), 0.5));
        }
    }
    out
}

/// Infeasible-path cuts on paths of four events `u1 → u2 → u3 → u4` around
/// each base arc `(u2, u3)` away from the depot, with right-hand side 2.
pub fn gen_ip2(g: &EventGraph, inst: &DarpInstance, b: &BoundState) -> Vec<Cut> {
    let mut out = Vec::new();
    for base in g.arc_ids() {
        let (u2, u3) = (g.arc(base).from, g.arc(base).to);
        if g.node(u2).is_depot() || g.node(u3).is_depot() {
            continue;
        }
        let step = inst.service(g.node(u2).loc) + g.arc(base).time;
        let preds = sorted_by(g, g.in_arcs(u2).filter(|&a| g.arc(a).from != u3), |a| b.arc_lb(g, inst, a), false);
        let succs = sorted_by(g, g.out_arcs(u3).filter(|&a| g.arc(a).to != u2), |a| b.arc_ub(g, inst, a), true);
        let mut prev: Option<Vec<ArcId>> = None;
        let mut detours: Option<Vec<(VarRef, f64)>> = None;
        for &(_, ub) in &succs {
            let first = preds.iter().find(|&&(_, lb)| {
                let arr2 = b.lb(u2).max(lb);
                let arr3 = b.lb(u3).max(arr2 + step);
                arr3 > ub + PATH_EPS
            });
            let Some(&(_, lb1)) = first else { continue };
            let p: Vec<ArcId> = preds.iter().filter(|&&(_, lb)| lb >= lb1).map(|&(a, _)| a).collect();
            if prev.as_ref() == Some(&p) {
                continue;
            }
            let mut terms: Vec<(VarRef, f64)> = p.iter().map(|&a| (VarRef::Arc(a), 1.0)).collect();
            terms.push((VarRef::Arc(base), 1.0));
            terms.extend(succs.iter().filter(|&&(_, u)| u <= ub).map(|&(a, _)| (VarRef::Arc(a), 1.0)));
            let half = detours.get_or_insert_with(|| {
                if detours_allowed(g, inst, b, u2, u3) {
                    detour_terms(g, u2, u3)
                } else {
                    Vec::new()
                }
            });
            terms.extend(half.iter().copied());
            out.push(Cut { family: CutFamily::Ip2, terms, sense: Sense::Le, rhs: 2.0 });
            prev = Some(p);
        }
    }
    out
}

/// Arc lists keyed by the shapes the sharing families sum over.
struct ArcIndex {
    /// Arcs into an event at `loc` with request `i` seated.
    arcs_into: HashMap<(Loc, usize), Vec<ArcId>>,
    /// Arcs into an event at `loc` with requests `i < j` both seated.
    arcs_into_pair: HashMap<(Loc, usize, usize), Vec<ArcId>>,
    /// Arcs between two locations.
    between: HashMap<(Loc, Loc), Vec<ArcId>>,
}

impl ArcIndex {
    fn new(g: &EventGraph) -> Self {
        let mut idx = ArcIndex {
            arcs_into: HashMap::new(),
            arcs_into_pair: HashMap::new(),
            between: HashMap::new(),
        };
        for a in g.arc_ids() {
            let arc = g.arc(a);
            let w = g.node(arc.to);
            idx.between.entry((g.node(arc.from).loc, w.loc)).or_default().push(a);
            for (k, &i) in w.onboard.iter().enumerate() {
                idx.arcs_into.entry((w.loc, i)).or_default().push(a);
                for &j in &w.onboard[k + 1..] {
                    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                    idx.arcs_into_pair.entry((w.loc, lo, hi)).or_default().push(a);
                }
            }
        }
        idx
    }

    fn arcs_into(&self, loc: Loc, i: usize) -> &[ArcId] {
        self.arcs_into.get(&(loc, i)).map_or(&[], Vec::as_slice)
    }

    fn arcs_into_pair(&self, loc: Loc, i: usize, j: usize) -> &[ArcId] {
        let key = if i < j { (loc, i, j) } else { (loc, j, i) };
        self.arcs_into_pair.get(&key).map_or(&[], Vec::as_slice)
    }

    fn between(&self, a: Loc, b: Loc) -> &[ArcId] {
        self.between.get(&(a, b)).map_or(&[], Vec::as_slice)
    }
}

/// `Σ x ≤ 1` over the concatenated arc lists, or nothing if all are empty.
fn packing(family: CutFamily, parts: &[&[ArcId]]) -> Option<Cut> {
    let terms: Vec<(VarRef, f64)> = parts.iter().flat_map(|p| p.iter()).map(|&a| (VarRef::Arc(a), 1.0)).collect();
    (!terms.is_empty()).then_some(Cut { family, terms, sense: Sense::Le, rhs: 1.0 })
}

/// The four vehicle-sharing families. VS1–VS3 are built for every pair
/// `i < j`; VS4 for every pair that can share a vehicle and every stop `k`.
/// Cuts with no terms are dropped.
pub fn gen_vehicle_sharing(g: &EventGraph, flags: &CompatFlags) -> Vec<Cut> {
    let idx = ArcIndex::new(g);
    let n = g.n();
    let (mut vs1, mut vs2, mut vs3, mut vs4) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for i in 1..=n {
        for j in i + 1..=n {
            let (ip, im, jp, jm) = (Loc::Pickup(i), Loc::Delivery(i), Loc::Pickup(j), Loc::Delivery(j));
            let hand_ij = idx.between(im, jp);
            let hand_ji = idx.between(jm, ip);
            vs1.extend(packing(CutFamily::Vs1, &[idx.arcs_into(jp, i), idx.arcs_into(ip, j), hand_ij, hand_ji]));
            vs2.extend(packing(CutFamily::Vs2, &[idx.arcs_into(im, j), idx.arcs_into(jm, i), hand_ij, hand_ji]));
            vs3.extend(packing(CutFamily::Vs3, &[idx.between(im, jm), idx.between(jm, im), hand_ij, hand_ji]));
            if flags.can_share(i, j) {
                for k in 1..=n {
                    for kl in [Loc::Pickup(k), Loc::Delivery(k)] {
                        vs4.extend(packing(CutFamily::Vs4, &[hand_ji, hand_ij, idx.arcs_into_pair(kl, i, j)]));
                    }
                }
            }
        }
    }
    vs1.into_iter().chain(vs2).chain(vs3).chain(vs4).collect()
}

/// Requests `i < j` that can never ride the same vehicle: they cannot be
/// seated together and neither full trip fits before the other.
pub fn incompatible_pairs(inst: &DarpInstance, flags: &CompatFlags) -> Vec<(usize, usize)> {
    let n = inst.n();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if flags.can_share(i, j) {
                continue;
            }
            let (ip, im, jp, jm) = (Loc::Pickup(i), Loc::Delivery(i), Loc::Pickup(j), Loc::Delivery(j));
            let ij = inst.path_feasible(&[ip, im, jp, jm]).unwrap_or(true);
            let ji = inst.path_feasible(&[jp, jm, ip, im]).unwrap_or(true);
            if !ij && !ji {
                out.push((i, j));
            }
        }
    }
    out
}

/// Customer-incompatibility cuts: for an incompatible pair `(i, j)` and a
/// third request `k` that can share with both, at most one of `i`, `j`
/// shares the vehicle with `k`.
pub fn gen_customer_incompat(g: &EventGraph, inst: &DarpInstance, flags: &CompatFlags) -> Vec<Cut> {
    let idx = ArcIndex::new(g);
    let mut out = Vec::new();
    for (i, j) in incompatible_pairs(inst, flags) {
        for k in 1..=inst.n() {
            if k == i || k == j || !flags.can_share(k, i) || !flags.can_share(k, j) {
                continue;
            }
            let (ip, jp, kp) = (Loc::Pickup(i), Loc::Pickup(j), Loc::Pickup(k));
            out.extend(packing(
                CutFamily::Ci1,
                &[idx.arcs_into(kp, i), idx.arcs_into(ip, k), idx.arcs_into(kp, j), idx.arcs_into(jp, k)],
            ));
        }
    }
    out
}
