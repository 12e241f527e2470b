//! Executable checks of the three relaxation theorems: equal LP values of
//! LAEB and ALAEB, integral LAEB relaxations under point windows, and LAEB
//! dominating LB.

use std::fmt;

use serde::Serialize;

use crate::error::{DarpError, Result};
use crate::event_graph::{EventGraph, GraphConfig};
use crate::instance::{compat_flags, DarpInstance};
use crate::models::{apply_theorem2_arc_deletion, build, Domain, FormulationKind, MilpModel};
use crate::solver::{brute_force, solve_external, BackendConfig, SolveResult, SolveStatus};

/// Absolute tolerance of every LP comparison.
pub const LP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum TheoremSuite {
    /// `LP(LAEB) = LP(ALAEB)`.
    T1,
    /// Integral LAEB relaxation after the point-window arc deletion.
    T2,
    /// `LP(LAEB) ≥ LP(LB)`.
    T3,
}

impl fmt::Display for TheoremSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub suite: TheoremSuite,
    pub instance: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TheoremReport {
    pub checks: Vec<TheoremCheck>,
}

impl TheoremReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn of(&self, suite: TheoremSuite) -> impl Iterator<Item = &TheoremCheck> {
        self.checks.iter().filter(move |c| c.suite == suite)
    }
}

fn full_graph(inst: &DarpInstance) -> EventGraph {
    EventGraph::build(inst, &compat_flags(inst), GraphConfig::default())
}

/// Solves the relaxation of `kind`, requiring an optimal LP.
pub fn lp_relaxation(
    kind: FormulationKind,
    inst: &DarpInstance,
    graph: Option<&EventGraph>,
    backend: &BackendConfig,
) -> Result<(MilpModel, SolveResult)> {
    let model = build(kind, inst, graph)?.relax();
    let res = solve_external(&model, backend)?;
    if res.status != SolveStatus::Optimal {
        return Err(DarpError::Precondition(format!("LP of {kind} on {} ended {}", inst.name, res.status)));
    }
    Ok((model, res))
}

fn lp_value(res: &SolveResult) -> f64 {
    res.objective.expect("optimal LPs carry an objective")
}

/// Largest distance to the nearest integer over the variables that are
/// binary in the unrelaxed model.
pub fn max_fractionality(model: &MilpModel, integer_model: &MilpModel, values: &[f64]) -> f64 {
    model
        .vars()
        .iter()
        .zip(integer_model.vars())
        .zip(values)
        .filter(|((_, v), _)| v.domain == Domain::Binary)
        .map(|(_, &x)| (x - x.round()).abs())
        .fold(0.0, f64::max)
}

pub fn check_t1(inst: &DarpInstance, backend: &BackendConfig) -> Result<TheoremCheck> {
    let g = full_graph(inst);
    let laeb = lp_value(&lp_relaxation(FormulationKind::Laeb, inst, Some(&g), backend)?.1);
    let alaeb = lp_value(&lp_relaxation(FormulationKind::Alaeb, inst, Some(&g), backend)?.1);
    let diff = (laeb - alaeb).abs();
    Ok(TheoremCheck {
        suite: TheoremSuite::T1,
        instance: inst.name.clone(),
        passed: diff <= LP_TOL,
        detail: format!("LP(LAEB) = {laeb:.9}, LP(ALAEB) = {alaeb:.9}, |diff| = {diff:.3e}"),
    })
}

/// Applies the arc deletion, solves the LAEB relaxation and compares it with
/// the oracle.
pub fn check_t2(inst: &DarpInstance, backend: &BackendConfig) -> Result<TheoremCheck> {
    let mut g = full_graph(inst);
    let deleted = apply_theorem2_arc_deletion(&mut g, inst)?;
    let integer = build(FormulationKind::Laeb, inst, Some(&g))?;
    let (model, res) = lp_relaxation(FormulationKind::Laeb, inst, Some(&g), backend)?;
    let frac = max_fractionality(&model, &integer, &res.values);
    let z = lp_value(&res);
    let oracle = brute_force(inst)?
        .ok_or_else(|| DarpError::Precondition(format!("{} is infeasible", inst.name)))?
        .objective;
    Ok(TheoremCheck {
        suite: TheoremSuite::T2,
        instance: inst.name.clone(),
        passed: frac <= LP_TOL && (z - oracle).abs() <= LP_TOL,
        detail: format!(
            "{} arcs deleted, LP(LAEB) = {z:.9}, oracle = {oracle:.9}, max fractionality = {frac:.3e}",
            deleted.len()
        ),
    })
}

/// `LP(LAEB) ≥ LP(LB) − 1e-6`, and with `strict` also `LP(LAEB) > LP(LB) + 1e-6`.
/// The location-based relaxation carries no subtour rows, as these are
/// only separated on integer points.
pub fn check_t3(inst: &DarpInstance, backend: &BackendConfig, strict: bool) -> Result<TheoremCheck> {
    let g = full_graph(inst);
    let laeb = lp_value(&lp_relaxation(FormulationKind::Laeb, inst, Some(&g), backend)?.1);
    let lb = lp_value(&lp_relaxation(FormulationKind::Lb, inst, None, backend)?.1);
    let passed = if strict { laeb > lb + LP_TOL } else { laeb >= lb - LP_TOL };
    Ok(TheoremCheck {
        suite: TheoremSuite::T3,
        instance: inst.name.clone(),
        passed,
        detail: format!("LP(LAEB) = {laeb:.9}, LP(LB) = {lb:.9}{}", if strict { " (strict)" } else { "" }),
    })
}

fn record(suite: TheoremSuite, inst: &DarpInstance, r: Result<TheoremCheck>) -> TheoremCheck {
    r.unwrap_or_else(|e| TheoremCheck { suite, instance: inst.name.clone(), passed: false, detail: e.to_string() })
}

/// T1 and T3 on `instances`, T2 on `point_instances`, and strict T3 on
/// each of `strict_instances`. Failing solves become failed checks.
pub fn verify_theorems(
    instances: &[DarpInstance],
    point_instances: &[DarpInstance],
    strict_instances: &[DarpInstance],
    backend: &BackendConfig,
) -> TheoremReport {
    let mut checks = Vec::new();
    for inst in instances {
        checks.push(record(TheoremSuite::T1, inst, check_t1(inst, backend)));
    }
    for inst in point_instances {
        checks.push(record(TheoremSuite::T2, inst, check_t2(inst, backend)));
    }
    for inst in instances {
        checks.push(record(TheoremSuite::T3, inst, check_t3(inst, backend, false)));
    }
    for inst in strict_instances {
        checks.push(record(TheoremSuite::T3, inst, check_t3(inst, backend, true)));
    }
    TheoremReport { checks }
}
