//! Solver-neutral MILP representation and the four formulations.

mod assign;
mod event;
mod lb;
mod theorem2;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DarpError, Result};
use crate::event_graph::{ArcId, EventGraph, NodeId};
use crate::instance::{DarpInstance, Loc};

pub use assign::assignment_from_tours;
pub use event::{build_alaeb, build_eb, build_laeb, eb_activation};
pub use lb::build_lb;
pub use theorem2::{apply_theorem2_arc_deletion, check_theorem2_conditions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulationKind {
    Lb,
    Eb,
    Laeb,
    Alaeb,
}

impl FormulationKind {
    pub const ALL: [FormulationKind; 4] = [Self::Lb, Self::Eb, Self::Laeb, Self::Alaeb];

    pub fn uses_event_graph(self) -> bool {
        self != Self::Lb
    }
}

impl fmt::Display for FormulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lb => "lb",
            Self::Eb => "eb",
            Self::Laeb => "laeb",
            Self::Alaeb => "alaeb",
        })
    }
}

impl FromStr for FormulationKind {
    type Err = DarpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lb" => Ok(Self::Lb),
            "eb" => Ok(Self::Eb),
            "laeb" => Ok(Self::Laeb),
            "alaeb" => Ok(Self::Alaeb),
            _ => Err(DarpError::Precondition(format!("unknown formulation {s:?}"))),
        }
    }
}

/// A location of the location-based models. The depot is split into a
/// start copy `0+` and an end copy `0-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Start,
    End,
    At(Loc),
}

impl Site {
    pub fn loc(self) -> Loc {
        match self {
            Site::Start | Site::End => Loc::Depot,
            Site::At(l) => l,
        }
    }

    pub fn code(self) -> String {
        match self {
            Site::Start => "o_out".into(),
            Site::End => "o_in".into(),
            Site::At(l) => l.code(),
        }
    }
}

/// What a model variable stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRef {
    /// `x_a` for an event-graph arc.
    Arc(ArcId),
    /// `x̄_ij` between two sites.
    Leg(Site, Site),
    /// `B_v` of an event.
    EventTime(NodeId),
    /// `B̄_j` of a site.
    Time(Site),
    /// `Q_j` of a site.
    Load(Site),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    Binary,
    Continuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub domain: Domain,
    pub objective: f64,
    pub meta: VarRef,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Sorted by variable index, no duplicates, no zero coefficients.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Clone, Debug)]
pub struct MilpModel {
    pub name: String,
    pub kind: FormulationKind,
    vars: Vec<Variable>,
    rows: Vec<Constraint>,
    index: HashMap<VarRef, usize>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>, kind: FormulationKind) -> Self {
        MilpModel {
            name: name.into(),
            kind,
            vars: Vec::new(),
            rows: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn add_var(
        &mut self,
        meta: VarRef,
        name: String,
        lower: f64,
        upper: f64,
        domain: Domain,
        objective: f64,
    ) -> usize {
        debug_assert!(!self.index.contains_key(&meta), "duplicate variable {name}");
        let j = self.vars.len();
        self.vars.push(Variable {
            name,
            lower,
            upper,
            domain,
            objective,
            meta,
        });
        self.index.insert(meta, j);
        j
    }

    /// Adds a row; repeated variables are merged and zero coefficients
    /// dropped.
    pub fn add_row(&mut self, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        let mut terms = terms;
        terms.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            match merged.last_mut() {
                Some((k, b)) if *k == j => *b += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Constraint {
            name,
            terms: merged,
            sense,
            rhs,
        });
    }

    pub fn var(&self, meta: VarRef) -> Option<usize> {
        self.index.get(&meta).copied()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.domain == Domain::Binary).count()
    }

    /// Rows whose name starts with `prefix` followed by `__`.
    pub fn rows_in_family<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Constraint> + 'a {
        self.rows.iter().filter(move |r| {
            r.name.strip_prefix(prefix).is_some_and(|rest| rest.starts_with("__"))
        })
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, x)| v.objective * x).sum()
    }

    /// First violated bound or row, if any.
    pub fn violation(&self, x: &[f64], tol: f64) -> Option<String> {
        for (v, &val) in self.vars.iter().zip(x) {
            if val < v.lower - tol || val > v.upper + tol {
                return Some(format!("bound of {} ({val})", v.name));
            }
            if v.domain == Domain::Binary && (val - val.round()).abs() > tol {
                return Some(format!("integrality of {} ({val})", v.name));
            }
        }
        self.rows
            .iter()
            .find(|r| !r.sense.holds(r.activity(x), r.rhs, tol))
            .map(|r| format!("{} (activity {}, rhs {})", r.name, r.activity(x), r.rhs))
    }

    /// Drops all integrality marks; bounds are kept.
    pub fn relax(&self) -> MilpModel {
        let mut m = self.clone();
        for v in &mut m.vars {
            v.domain = Domain::Continuous;
        }
        m
    }

    pub fn is_relaxed(&self) -> bool {
        self.vars.iter().all(|v| v.domain == Domain::Continuous)
    }
}

/// Relaxed copy of `model`.
pub fn relax(model: &MilpModel) -> MilpModel {
    model.relax()
}

/// `M̄_ij = ℓ_i + s_i + t̄_ij − e_j`, clamped below at zero. A clamped value
/// only occurs when the precedence holds for every feasible time anyway.
pub fn big_m(inst: &DarpInstance, i: Loc, j: Loc) -> f64 {
    (inst.latest(i) + inst.service(i) + inst.time(i, j) - inst.earliest(j)).max(0.0)
}

/// `M_vw = ℓ_{v1} + s_{v1} + t_(v,w) − e_{w1}`, clamped below at zero.
pub fn big_m_event(inst: &DarpInstance, g: &EventGraph, a: ArcId) -> f64 {
    let arc = g.arc(a);
    big_m(inst, g.node(arc.from).loc, g.node(arc.to).loc)
}

/// Builds any formulation. The location-based model ignores `graph`.
pub fn build(kind: FormulationKind, inst: &DarpInstance, graph: Option<&EventGraph>) -> Result<MilpModel> {
    let need = || {
        graph.ok_or_else(|| DarpError::Precondition(format!("{kind} needs an event graph")))
    };
    Ok(match kind {
        FormulationKind::Lb => build_lb(inst),
        FormulationKind::Eb => build_eb(inst, need()?),
        FormulationKind::Laeb => build_laeb(inst, need()?),
        FormulationKind::Alaeb => build_alaeb(inst, need()?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Matrix, RequestKind, RequestSpec, Window};

    #[test]
    fn big_m_substitution_and_clamp() {
        let pos = [0.0, 0.0, 10.0];
        let m = Matrix::from_fn(3, |i, j| f64::abs(pos[i] - pos[j]));
        let inst = DarpInstance::from_matrices(
            "m",
            1,
            3,
            480.0,
            vec![RequestSpec {
                load: 1,
                service: 3.0,
                max_ride: 30.0,
                pickup: Window::new(100.0, 115.0),
                delivery: Window::new(113.0, 148.0),
                kind: RequestKind::Explicit,
            }],
            m.clone(),
            m,
        )
        .unwrap();
        // 115 + 3 + 10 - 113
        assert_eq!(big_m(&inst, Loc::Pickup(1), Loc::Delivery(1)), 15.0);
        // from the depot: ℓ_0 + 0 + 0 − e_{1+}
        assert_eq!(big_m(&inst, Loc::Depot, Loc::Pickup(1)), 480.0 + 0.0 + 0.0 - 100.0);
        let mut early = inst.clone();
        early.requests[0].delivery = Window::new(200.0, 210.0);
        assert_eq!(big_m(&early, Loc::Pickup(1), Loc::Delivery(1)), 0.0);
    }

    #[test]
    fn rows_merge_and_drop_zeros() {
        let mut m = MilpModel::new("t", FormulationKind::Lb);
        let a = m.add_var(VarRef::Time(Site::Start), "a".into(), 0.0, 1.0, Domain::Continuous, 0.0);
        let b = m.add_var(VarRef::Time(Site::End), "b".into(), 0.0, 1.0, Domain::Binary, 1.0);
        m.add_row("r".into(), vec![(b, 1.0), (a, 2.0), (b, -1.0)], Sense::Le, 1.0);
        assert_eq!(m.rows()[0].terms, vec![(a, 2.0)]);
        let r = m.relax();
        assert!(r.is_relaxed());
        assert_eq!(r.relax().vars(), r.vars());
        assert_eq!(m.num_binaries(), 1);
    }

    #[test]
    fn kind_parses() {
        for k in FormulationKind::ALL {
            assert_eq!(k.to_string().parse::<FormulationKind>().unwrap(), k);
        }
        assert!("xyz".parse::<FormulationKind>().is_err());
    }
}
