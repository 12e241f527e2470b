//! Experiment pipeline: build, preprocess, cut, solve, extract, validate and
//! record, per instance and configuration.

pub mod golden;
pub mod theorems;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cuts::{generate_cuts, CutConfig, CutFamily, CutPool};
use crate::error::{DarpError, Result};
use crate::event_graph::{EventGraph, GraphConfig};
use crate::instance::{compat_flags, DarpInstance, ManifestEntry};
use crate::models::{build, FormulationKind, MilpModel};
use crate::preprocessing::{reduce, BoundState, ReductionReport};
use crate::solver::{
    extract_routes, solve_external, solve_with_sec_loop, validate_solution, BackendConfig, Route,
    SolveResult, SolveStatus, ValidationReport,
};

pub use golden::{golden, golden_ok, GOLDEN_TOLERANCE};
pub use theorems::{verify_theorems, TheoremCheck, TheoremReport, TheoremSuite};

/// On/off switches of the preprocessing components. `gp` covers the graph
/// reduction together with the bound inequalities derived from it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Flags {
    pub gp: bool,
    pub vs1: bool,
    pub vs2: bool,
    pub vs3: bool,
    pub vs4: bool,
    pub ci1: bool,
    pub ip1: bool,
    pub ip2: bool,
}

impl Flags {
    pub const NAMES: [&'static str; 8] = ["GP", "VS1", "VS2", "VS3", "VS4", "CI1", "IP1", "IP2"];

    pub fn none() -> Self {
        Flags::default()
    }

    pub fn all() -> Self {
        Flags::from_bits([true; 8])
    }

    pub fn gp_only() -> Self {
        Flags { gp: true, ..Flags::default() }
    }

    pub fn bits(&self) -> [bool; 8] {
        [self.gp, self.vs1, self.vs2, self.vs3, self.vs4, self.ci1, self.ip1, self.ip2]
    }

    pub fn from_bits(b: [bool; 8]) -> Self {
        Flags { gp: b[0], vs1: b[1], vs2: b[2], vs3: b[3], vs4: b[4], ci1: b[5], ip1: b[6], ip2: b[7] }
    }

    /// Cut families these flags switch on.
    pub fn cut_config(&self) -> CutConfig {
        let mut fams = Vec::new();
        if self.gp {
            fams.extend([CutFamily::BoundsEbPick, CutFamily::BoundsEbDrop, CutFamily::BoundsLoc]);
        }
        let pairs = [
            (self.vs1, CutFamily::Vs1),
            (self.vs2, CutFamily::Vs2),
            (self.vs3, CutFamily::Vs3),
            (self.vs4, CutFamily::Vs4),
            (self.ci1, CutFamily::Ci1),
            (self.ip1, CutFamily::Ip1),
            (self.ip2, CutFamily::Ip2),
        ];
        fams.extend(pairs.into_iter().filter(|p| p.0).map(|p| p.1));
        CutConfig::only(&fams)
    }
}

impl fmt::Display for Flags {
    /// `none`, or the switched-on components joined by `+`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on: Vec<&str> = Self::NAMES.iter().zip(self.bits()).filter(|p| p.1).map(|p| *p.0).collect();
        if on.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&on.join("+"))
        }
    }
}

impl FromStr for Flags {
    type Err = DarpError;

    /// Accepts `none`, `all`, a row of eight 0/1 digits in the order of
    /// [`Flags::NAMES`], or names joined by `+` or `,`. The infeasible-path
    /// families rely on the bounds of the reduction and need `GP`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let flags = if s.eq_ignore_ascii_case("none") || s.is_empty() {
            Flags::none()
        } else if s.eq_ignore_ascii_case("all") {
            Flags::all()
        } else if s.len() == 8 && s.bytes().all(|b| b == b'0' || b == b'1') {
            let mut b = [false; 8];
            for (k, c) in s.bytes().enumerate() {
                b[k] = c == b'1';
            }
            Flags::from_bits(b)
        } else {
            let mut b = [false; 8];
            for tok in s.split(['+', ',']).map(str::trim).filter(|t| !t.is_empty()) {
                let k = Self::NAMES
                    .iter()
                    .position(|n| n.eq_ignore_ascii_case(tok))
                    .ok_or_else(|| DarpError::Precondition(format!("unknown preprocessing component {tok:?}")))?;
                b[k] = true;
            }
            Flags::from_bits(b)
        };
        if (flags.ip1 || flags.ip2) && !flags.gp {
            return Err(DarpError::Precondition("IP1 and IP2 need GP".into()));
        }
        Ok(flags)
    }
}

/// Parses a grid of flag sets separated by `;`.
pub fn parse_grid(s: &str) -> Result<Vec<Flags>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

/// The rows of the ablation grid: nothing, everything, everything but one
/// inequality family, GP with a single family, and the combination
/// GP+VS4+CI1+IP1+IP2.
pub fn ablation_grid() -> Vec<Flags> {
    let mut grid = vec![Flags::none(), Flags::all()];
    for k in 1..7 {
        let mut b = [true; 8];
        b[k] = false;
        grid.push(Flags::from_bits(b));
    }
    for k in 1..8 {
        let mut b = [false; 8];
        b[0] = true;
        b[k] = true;
        grid.push(Flags::from_bits(b));
    }
    grid.push(Flags::from_bits([true, false, false, false, true, true, true, true]));
    grid
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub formulation: FormulationKind,
    pub flags: Flags,
    /// Solve the LP relaxation instead of the MILP.
    pub relax: bool,
    /// Also solve the relaxation of the same model to report the pure LP gap.
    pub lp_gap: bool,
    pub backend: BackendConfig,
    /// Round limit of the cut loop of the location-based model.
    pub sec_rounds: usize,
    pub cut_cap: usize,
}

impl RunConfig {
    pub const DEFAULT_SEC_ROUNDS: usize = 200;

    pub fn new(formulation: FormulationKind, flags: Flags, backend: BackendConfig) -> Self {
        RunConfig {
            formulation,
            flags,
            relax: false,
            lp_gap: false,
            backend,
            sec_rounds: Self::DEFAULT_SEC_ROUNDS,
            cut_cap: CutConfig::DEFAULT_CAP,
        }
    }
}

/// Graph, bounds, model and cuts of one configuration before solving.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub graph: Option<EventGraph>,
    pub bounds: Option<BoundState>,
    pub reduction: Option<ReductionReport>,
    /// Event count and arc count of the graph as first built.
    pub graph_before: Option<(usize, usize)>,
    pub model: MilpModel,
    pub cuts: CutPool,
}

/// Builds the graph (event-based models only), reduces it when `gp` is
/// set, builds the model and appends the switched-on cut families.
pub fn prepare(inst: &DarpInstance, kind: FormulationKind, flags: Flags, cut_cap: usize) -> Result<Prepared> {
    let compat = compat_flags(inst);
    let (graph, bounds, reduction, graph_before) = if kind.uses_event_graph() {
        let mut g = EventGraph::build(inst, &compat, GraphConfig::default());
        let before = (g.num_nodes(), g.num_arcs());
        if flags.gp {
            let (b, report) = reduce(&mut g, inst)?;
            (Some(g), Some(b), Some(report), Some(before))
        } else {
            (Some(g), None, None, Some(before))
        }
    } else {
        (None, None, None, None)
    };
    let mut model = build(kind, inst, graph.as_ref())?;
    let cuts = match &graph {
        Some(g) => {
            let mut cfg = flags.cut_config();
            cfg.cap_per_family = cut_cap;
            generate_cuts(kind, inst, g, bounds.as_ref(), &compat, &cfg)
        }
        None => CutPool::default(),
    };
    model.add_cuts(&cuts.cuts)?;
    Ok(Prepared { graph, bounds, reduction, graph_before, model, cuts })
}

/// One row of the results table.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub formulation: String,
    pub flags: String,
    pub gp: bool,
    pub vs1: bool,
    pub vs2: bool,
    pub vs3: bool,
    pub vs4: bool,
    pub ci1: bool,
    pub ip1: bool,
    pub ip2: bool,
    pub relax: bool,
    pub status: String,
    pub objective: Option<f64>,
    pub expected: Option<f64>,
    /// Outcome of the golden comparison; absent without an expected value.
    pub golden_ok: Option<bool>,
    pub bound: Option<f64>,
    /// Backend gap between objective and bound.
    pub gap: Option<f64>,
    pub lp_objective: Option<f64>,
    /// `(objective − LP) / objective` of the same model.
    pub lp_gap: Option<f64>,
    /// Seconds for the whole run, model building included.
    pub wall_time: f64,
    /// Seconds spent in backend processes.
    pub solve_time: f64,
    pub bb_nodes: Option<u64>,
    pub nodes_before: Option<usize>,
    pub arcs_before: Option<usize>,
    pub nodes_after: Option<usize>,
    pub arcs_after: Option<usize>,
    /// Relative reduction of nodes plus arcs.
    pub variable_reduction: Option<f64>,
    pub variables: usize,
    pub rows: usize,
    pub sec_rounds: usize,
    pub sec_rows: usize,
    pub cuts: BTreeMap<String, usize>,
    pub routes: usize,
    pub violations: usize,
    /// Route cost recomputed from the extracted routes.
    pub route_cost: Option<f64>,
    pub error: Option<String>,
}

impl RunRecord {
    fn skeleton(name: &str, cfg: &RunConfig) -> Self {
        let f = cfg.flags;
        RunRecord {
            instance: name.to_string(),
            formulation: cfg.formulation.to_string(),
            flags: f.to_string(),
            gp: f.gp,
            vs1: f.vs1,
            vs2: f.vs2,
            vs3: f.vs3,
            vs4: f.vs4,
            ci1: f.ci1,
            ip1: f.ip1,
            ip2: f.ip2,
            relax: cfg.relax,
            cuts: CutFamily::ALL.iter().map(|c| (c.tag().to_string(), 0)).collect(),
            ..RunRecord::default()
        }
    }

    /// A run failing before any solve.
    pub fn failed(name: &str, cfg: &RunConfig, expected: Option<f64>, err: &DarpError) -> Self {
        let mut r = Self::skeleton(name, cfg);
        r.status = "error".into();
        r.expected = expected;
        r.golden_ok = expected.map(|_| false);
        r.error = Some(err.to_string());
        r
    }

    /// Whether the run produced a sound solution: no error, no validator
    /// finding, and a passing golden comparison where one applies.
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.violations == 0 && self.golden_ok != Some(false)
    }

    pub fn csv_header() -> Vec<String> {
        let mut h: Vec<String> = [
            "instance", "formulation", "flags", "GP", "VS1", "VS2", "VS3", "VS4", "CI1", "IP1", "IP2", "relax",
            "status", "objective", "expected", "golden_ok", "bound", "gap", "lp_objective", "lp_gap",
            "wall_time", "solve_time", "bb_nodes", "nodes_before", "arcs_before", "nodes_after", "arcs_after",
            "variable_reduction", "variables", "rows", "sec_rounds", "sec_rows",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend(CutFamily::ALL.iter().map(|f| format!("cuts_{}", f.row_prefix())));
        h.extend(["routes", "violations", "route_cost", "error"].iter().map(|s| s.to_string()));
        h
    }

    pub fn csv_row(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        let b = |v: bool| if v { "1" } else { "0" }.to_string();
        let mut row = vec![
            self.instance.clone(),
            self.formulation.clone(),
            self.flags.clone(),
            b(self.gp),
            b(self.vs1),
            b(self.vs2),
            b(self.vs3),
            b(self.vs4),
            b(self.ci1),
            b(self.ip1),
            b(self.ip2),
            b(self.relax),
            self.status.clone(),
            opt(&self.objective),
            opt(&self.expected),
            opt(&self.golden_ok),
            opt(&self.bound),
            opt(&self.gap),
            opt(&self.lp_objective),
            opt(&self.lp_gap),
            format!("{:.3}", self.wall_time),
            format!("{:.3}", self.solve_time),
            opt(&self.bb_nodes),
            opt(&self.nodes_before),
            opt(&self.arcs_before),
            opt(&self.nodes_after),
            opt(&self.arcs_after),
            opt(&self.variable_reduction),
            self.variables.to_string(),
            self.rows.to_string(),
            self.sec_rounds.to_string(),
            self.sec_rows.to_string(),
        ];
        row.extend(CutFamily::ALL.iter().map(|f| self.cuts.get(f.tag()).copied().unwrap_or(0).to_string()));
        row.extend([self.routes.to_string(), self.violations.to_string(), opt(&self.route_cost), opt(&self.error)]);
        row
    }
}

/// Everything a single run produced.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub result: Option<SolveResult>,
    pub routes: Vec<Route>,
    pub validation: Option<ValidationReport>,
    pub prepared: Prepared,
}

/// Relative slack for comparing the backend objective with the route cost.
pub const OBJECTIVE_TOL: f64 = 1e-6;

/// Runs the whole pipeline on one instance.
///
/// For an optimal or feasible MILP solve the routes are extracted and
/// validated; a route cost differing from the backend objective by more
/// than `1e-6` relative is reported as an error of the record.
pub fn solve_instance(inst: &DarpInstance, cfg: &RunConfig, expected: Option<f64>) -> Result<RunOutcome> {
    let started = Instant::now();
    let mut rec = RunRecord::skeleton(&inst.name, cfg);
    rec.expected = expected;
    let mut prepared = prepare(inst, cfg.formulation, cfg.flags, cfg.cut_cap)?;
    if let Some((n, a)) = prepared.graph_before {
        rec.nodes_before = Some(n);
        rec.arcs_before = Some(a);
        let g = prepared.graph.as_ref().expect("graph stats come with a graph");
        rec.nodes_after = Some(g.num_nodes());
        rec.arcs_after = Some(g.num_arcs());
        rec.variable_reduction = Some(1.0 - (g.num_nodes() + g.num_arcs()) as f64 / (n + a).max(1) as f64);
    }
    for (f, c) in prepared.cuts.counts() {
        rec.cuts.insert(f.tag().to_string(), c);
    }

    let result = if cfg.relax {
        let lp = prepared.model.relax();
        rec.variables = lp.num_vars();
        rec.rows = lp.num_rows();
        solve_external(&lp, &cfg.backend)?
    } else if cfg.formulation == FormulationKind::Lb {
        let out = solve_with_sec_loop(&mut prepared.model, inst, &cfg.backend, cfg.sec_rounds)?;
        rec.sec_rounds = out.iterations;
        rec.sec_rows = out.rows_added;
        rec.solve_time += out.total_time - out.result.wall_time;
        out.result
    } else {
        solve_external(&prepared.model, &cfg.backend)?
    };
    rec.variables = prepared.model.num_vars();
    rec.rows = prepared.model.num_rows();
    rec.status = result.status.to_string();
    rec.objective = result.objective;
    rec.bound = result.bound;
    rec.gap = result.gap();
    rec.bb_nodes = result.nodes;
    rec.solve_time += result.wall_time;
    if cfg.relax {
        rec.lp_objective = result.objective;
    }

    let mut routes = Vec::new();
    let mut validation = None;
    if !cfg.relax && result.status.has_solution() {
        routes = extract_routes(&prepared.model, inst, prepared.graph.as_ref(), &result.values)?;
        let report = validate_solution(inst, &routes);
        rec.routes = routes.len();
        rec.violations = report.violations.len();
        rec.route_cost = Some(report.objective);
        if let Some(z) = result.objective {
            if (report.objective - z).abs() > OBJECTIVE_TOL * z.abs().max(1.0) {
                rec.error = Some(format!("route cost {} differs from objective {z}", report.objective));
            }
        }
        validation = Some(report);
    }

    if cfg.lp_gap && !cfg.relax {
        let lp = solve_external(&prepared.model.relax(), &cfg.backend)?;
        rec.solve_time += lp.wall_time;
        rec.lp_objective = lp.objective;
        if let (Some(z), Some(l)) = (rec.objective, lp.objective) {
            rec.lp_gap = Some((z - l) / z.abs().max(1e-9));
        }
    }

    if let Some(e) = expected {
        rec.golden_ok = Some(match (result.status, rec.objective) {
            (SolveStatus::Optimal, Some(z)) if !cfg.relax => golden_ok(z, e),
            _ => false,
        });
    }
    rec.wall_time = started.elapsed().as_secs_f64();
    Ok(RunOutcome { record: rec, result: Some(result), routes, validation, prepared })
}

/// Loads the entry and runs one configuration, turning every failure into a
/// record.
pub fn run_entry(entry: &ManifestEntry, cfg: &RunConfig) -> RunRecord {
    let name = entry.name();
    let started = Instant::now();
    let out = entry.load().and_then(|inst| solve_instance(&inst, cfg, entry.expected_objective));
    match out {
        Ok(o) => o.record,
        Err(e) => {
            log::warn!("{name} ({} {}): {e}", cfg.formulation, cfg.flags);
            let mut r = RunRecord::failed(&name, cfg, entry.expected_objective, &e);
            r.wall_time = started.elapsed().as_secs_f64();
            r
        }
    }
}

/// Runs every configuration on every entry with at most `workers` runs at a
/// time. Records come back ordered by entry, then configuration.
pub fn run_suite(entries: &[ManifestEntry], configs: &[RunConfig], workers: usize) -> Result<Vec<RunRecord>> {
    let jobs: Vec<(usize, usize)> =
        (0..entries.len()).flat_map(|e| (0..configs.len()).map(move |c| (e, c))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| DarpError::Precondition(format!("worker pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(|&(e, c)| run_entry(&entries[e], &configs[c])).collect()))
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RunRecord::csv_header())?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(records: &[RunRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

/// Whether every record with an expected objective matched it.
pub fn all_golden_ok(records: &[RunRecord]) -> bool {
    records.iter().all(|r| r.golden_ok != Some(false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_in_all_forms() {
        assert_eq!("none".parse::<Flags>().unwrap(), Flags::none());
        assert_eq!("all".parse::<Flags>().unwrap(), Flags::all());
        let f: Flags = "10001111".parse().unwrap();
        assert_eq!(f.to_string(), "GP+VS4+CI1+IP1+IP2");
        assert_eq!("gp+vs4,ci1+IP1+ip2".parse::<Flags>().unwrap(), f);
        assert!("VS1+IP1".parse::<Flags>().is_err());
        assert!("GP+XX".parse::<Flags>().is_err());
    }

    #[test]
    fn grid_rows() {
        let g = ablation_grid();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], Flags::none());
        assert_eq!(g[2].to_string(), "GP+VS2+VS3+VS4+CI1+IP1+IP2");
        assert_eq!(g[8].to_string(), "GP+VS1");
        assert_eq!(g[15].to_string(), "GP+VS4+CI1+IP1+IP2");
        for f in &g {
            assert_eq!(f.to_string().parse::<Flags>().unwrap(), *f);
        }
        assert_eq!(parse_grid("none; all ;").unwrap(), vec![Flags::none(), Flags::all()]);
    }

    #[test]
    fn gp_brings_the_bound_families() {
        let c = Flags::gp_only().cut_config();
        assert!(c.has(CutFamily::BoundsLoc) && !c.has(CutFamily::Vs1));
        assert!(Flags::none().cut_config().families.is_empty());
    }

    #[test]
    fn csv_row_matches_header() {
        let cfg = RunConfig::new(FormulationKind::Laeb, Flags::all(), BackendConfig::new(crate::solver::Backend::highs()));
        let r = RunRecord::failed("x", &cfg, Some(1.0), &DarpError::Precondition("p".into()));
        assert_eq!(r.csv_row().len(), RunRecord::csv_header().len());
        assert!(!r.passed());
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }

    #[test]
    fn empty_manifest_gives_empty_table() {
        let cfg = RunConfig::new(FormulationKind::Laeb, Flags::all(), BackendConfig::new(crate::solver::Backend::highs()));
        assert!(run_suite(&[], &[cfg], 2).unwrap().is_empty());
    }
}
