//! External MILP/LP backends driven through exported model files.
//!
//! Three adapters exist: HiGHS through a small Python runner, the CBC
//! executable, and an arbitrary command template with the placeholders
//! `{model_path}`, `{solution_path}`, `{time_limit}` and `{threads}`. A
//! command backend must write the solution grammar read by
//! [`parse_solution`]: an optional `status <word>` line, an `objective
//! <value>` line, and one `<variable name> <value>` line per variable.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::export::{export_model, ExportFormat};
use crate::error::{DarpError, Result};
use crate::models::{MilpModel, VarRef};

const HIGHS_RUNNER: &str = include_str!("highs_runner.py");

/// Environment variable holding a command template that overrides every
/// other backend choice.
pub const BACKEND_CMD_ENV: &str = "DARP_BACKEND_CMD";
/// Environment variable selecting `highs` or `cbc`.
pub const BACKEND_ENV: &str = "DARP_BACKEND";
/// Environment variable pointing at a CBC executable.
pub const CBC_ENV: &str = "DARP_CBC";
/// Environment variable naming the Python interpreter used for HiGHS.
pub const PYTHON_ENV: &str = "DARP_PYTHON";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Highs { python: String },
    Cbc { program: PathBuf },
    Command { template: String },
}

impl Backend {
    pub fn label(&self) -> String {
        match self {
            Backend::Highs { .. } => "highs".into(),
            Backend::Cbc { .. } => "cbc".into(),
            Backend::Command { .. } => "command".into(),
        }
    }

    pub fn highs() -> Backend {
        Backend::Highs {
            python: std::env::var(PYTHON_ENV).unwrap_or_else(|_| "python3".into()),
        }
    }

    /// CBC from `DARP_CBC`, the `PATH`, or the copy bundled with PuLP.
    pub fn cbc() -> Option<Backend> {
        find_cbc().map(|program| Backend::Cbc { program })
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn find_cbc() -> Option<PathBuf> {
    if let Ok(p) = std::env::var(CBC_ENV) {
        return Some(PathBuf::from(p));
    }
    if let Some(paths) = std::env::var_os("PATH") {
        for dir in std::env::split_paths(&paths) {
            let cand = dir.join("cbc");
            if cand.is_file() {
                return Some(cand);
            }
        }
    }
    let python = std::env::var(PYTHON_ENV).unwrap_or_else(|_| "python3".into());
    let out = Command::new(python)
        .args(["-c", "import pulp; print(pulp.PULP_CBC_CMD().path)"])
        .output()
        .ok()?;
    let path = PathBuf::from(String::from_utf8_lossy(&out.stdout).trim());
    (out.status.success() && path.is_file()).then_some(path)
}

fn highs_available(python: &str) -> bool {
    Command::new(python)
        .args(["-c", "import highspy"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackendConfig {
    pub backend: Backend,
    /// Seconds.
    pub time_limit: f64,
    pub threads: usize,
    /// Relative optimality gap at which the backend may stop.
    pub mip_gap: f64,
    /// Directory receiving the exported model and solution file of every
    /// solve, for inspection.
    pub keep_files: Option<PathBuf>,
}

impl BackendConfig {
    pub const DEFAULT_TIME_LIMIT: f64 = 7200.0;
    pub const DEFAULT_MIP_GAP: f64 = 1e-6;

    pub fn new(backend: Backend) -> Self {
        BackendConfig {
            backend,
            time_limit: Self::DEFAULT_TIME_LIMIT,
            threads: 1,
            mip_gap: Self::DEFAULT_MIP_GAP,
            keep_files: None,
        }
    }

    /// `DARP_BACKEND_CMD` if set, else `DARP_BACKEND` (`highs` or `cbc`),
    /// else HiGHS when `highspy` imports, else CBC when found.
    pub fn from_env() -> Result<Self> {
        if let Ok(template) = std::env::var(BACKEND_CMD_ENV) {
            return Ok(Self::new(Backend::Command { template }));
        }
        let missing = |program: &str, what: &str| DarpError::BackendMissing {
            program: program.into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, what.to_string()),
        };
        match std::env::var(BACKEND_ENV).ok().as_deref() {
            Some("cbc") => Backend::cbc().map(Self::new).ok_or_else(|| missing("cbc", "no CBC executable found")),
            Some("highs") => Ok(Self::new(Backend::highs())),
            Some(other) => Err(DarpError::Precondition(format!("{BACKEND_ENV}={other} is not `highs` or `cbc`"))),
            None => {
                let highs = Backend::highs();
                if let Backend::Highs { python } = &highs {
                    if highs_available(python) {
                        return Ok(Self::new(highs));
                    }
                }
                Backend::cbc()
                    .map(Self::new)
                    .ok_or_else(|| missing("highs/cbc", "neither highspy nor a CBC executable is available"))
            }
        }
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = seconds;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    /// A limit was hit with an incumbent.
    Feasible,
    Infeasible,
    /// A limit was hit without an incumbent.
    Limit,
    Unbounded,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Limit => "limit",
            SolveStatus::Unbounded => "unbounded",
        })
    }
}

impl FromStr for SolveStatus {
    type Err = DarpError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "optimal" => SolveStatus::Optimal,
            "feasible" => SolveStatus::Feasible,
            "infeasible" => SolveStatus::Infeasible,
            "limit" => SolveStatus::Limit,
            "unbounded" => SolveStatus::Unbounded,
            _ => return Err(DarpError::Precondition(format!("unknown status {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// Best bound reported by a MILP backend.
    pub bound: Option<f64>,
    /// Values indexed like the model's variables; empty without a solution.
    pub values: Vec<f64>,
    /// Seconds spent in the backend process.
    pub wall_time: f64,
    pub nodes: Option<u64>,
    pub backend: String,
    /// Last lines of the backend's output.
    pub log_digest: String,
}

impl SolveResult {
    /// Relative gap between objective and bound, when both are known.
    pub fn gap(&self) -> Option<f64> {
        let (z, b) = (self.objective?, self.bound?);
        Some(((z - b).abs() / z.abs().max(1e-9)).max(0.0))
    }

    pub fn value(&self, model: &MilpModel, meta: VarRef) -> Option<f64> {
        model.var(meta).and_then(|j| self.values.get(j).copied())
    }
}

/// Parsed solution file before it is tied to a model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionFile {
    pub status: Option<SolveStatus>,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub nodes: Option<u64>,
    pub values: Vec<(String, f64)>,
}

/// Reads the native solution grammar.
pub fn parse_solution(text: &str, path: &Path) -> Result<SolutionFile> {
    let bad = |line: usize, msg: String| DarpError::SolutionParse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    };
    let mut sol = SolutionFile::default();
    for (k, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let [key, val] = toks[..] else {
            return Err(bad(k + 1, format!("expected two fields, found {:?}", line.trim())));
        };
        let num = || val.parse::<f64>().map_err(|_| bad(k + 1, format!("{val:?} is not a number")));
        match key {
            "status" => sol.status = Some(val.parse().map_err(|e: DarpError| bad(k + 1, e.to_string()))?),
            "objective" => sol.objective = Some(num()?),
            "bound" => sol.bound = Some(num()?),
            "nodes" => sol.nodes = Some(num()? as u64),
            name => sol.values.push((name.to_string(), num()?)),
        }
    }
    if sol.status.is_none() {
        sol.status = Some(if sol.objective.is_some() {
            SolveStatus::Optimal
        } else {
            SolveStatus::Infeasible
        });
    }
    Ok(sol)
}

/// Reads CBC's `solu` output: a status line followed by
/// `index name value reduced-cost` lines.
pub fn parse_cbc_solution(text: &str, path: &Path) -> Result<SolutionFile> {
    let bad = |msg: String| DarpError::SolutionParse {
        path: path.to_path_buf(),
        message: msg,
    };
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let (word, objective) = match head.split_once("objective value") {
        Some((w, v)) => (w.trim().trim_end_matches('-').trim(), v.trim().parse::<f64>().ok()),
        None => (head.trim(), None),
    };
    let lower = word.to_ascii_lowercase();
    let status = if lower.starts_with("optimal") {
        SolveStatus::Optimal
    } else if lower.contains("infeasible") {
        SolveStatus::Infeasible
    } else if lower.contains("unbounded") {
        SolveStatus::Unbounded
    } else if lower.starts_with("stopped") {
        if lower.contains("no integer solution") || objective.is_none_or(|z| z >= 1e49) {
            SolveStatus::Limit
        } else {
            SolveStatus::Feasible
        }
    } else {
        return Err(bad(format!("unknown status line {head:?}")));
    };
    let mut sol = SolutionFile {
        status: Some(status),
        objective: objective.filter(|_| status.has_solution()),
        ..SolutionFile::default()
    };
    if status.has_solution() {
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().filter(|t| *t != "**").collect();
            if toks.is_empty() {
                continue;
            }
            let [_, name, value, ..] = toks[..] else {
                return Err(bad(format!("short line {line:?}")));
            };
            let v = value.parse().map_err(|_| bad(format!("{value:?} is not a number")))?;
            sol.values.push((name.to_string(), v));
        }
    }
    Ok(sol)
}

fn tail(text: &str, lines: usize) -> String {
    let all: Vec<&str> = text.lines().collect();
    all[all.len().saturating_sub(lines)..].join("\n")
}

/// Exports `model` as an LP file, runs the backend on it and maps the
/// solution back onto the model's variables.
pub fn solve_external(model: &MilpModel, cfg: &BackendConfig) -> Result<SolveResult> {
    let text = export_model(model, ExportFormat::Lp)?;
    let dir = tempfile::Builder::new().prefix("darp-solve").tempdir()?;
    let model_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("solution.txt");
    std::fs::write(&model_path, &text)?;

    let mp = model_path.display().to_string();
    let sp = sol_path.display().to_string();
    let tl = format!("{}", cfg.time_limit);
    let th = cfg.threads.max(1).to_string();
    let (program, mut cmd) = match &cfg.backend {
        Backend::Highs { python } => {
            let script = dir.path().join("highs_runner.py");
            std::fs::write(&script, HIGHS_RUNNER)?;
            let mut c = Command::new(python);
            c.arg(&script).args([&mp, &sp, &tl, &th, &cfg.mip_gap.to_string()]);
            (python.clone(), c)
        }
        Backend::Cbc { program } => {
            let mut c = Command::new(program);
            c.args([
                mp.as_str(),
                "sec",
                &tl,
                "threads",
                &th,
                "ratio",
                &cfg.mip_gap.to_string(),
                "solve",
                "solu",
                &sp,
            ]);
            (program.display().to_string(), c)
        }
        Backend::Command { template } => {
            let line = template
                .replace("{model_path}", &mp)
                .replace("{solution_path}", &sp)
                .replace("{time_limit}", &tl)
                .replace("{threads}", &th);
            let mut c = Command::new("sh");
            c.args(["-c", &line]);
            (line, c)
        }
    };

    let started = Instant::now();
    let out = cmd.output().map_err(|source| DarpError::BackendMissing { program: program.clone(), source })?;
    let wall_time = started.elapsed().as_secs_f64();
    let log = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    if let Some(keep) = &cfg.keep_files {
        std::fs::create_dir_all(keep)?;
        std::fs::copy(&model_path, keep.join(format!("{}.lp", model.name)))?;
        if sol_path.exists() {
            std::fs::copy(&sol_path, keep.join(format!("{}.sol", model.name)))?;
        }
    }
    if matches!(cfg.backend, Backend::Command { .. }) && out.status.code() == Some(127) {
        return Err(DarpError::BackendMissing {
            program,
            source: std::io::Error::new(std::io::ErrorKind::NotFound, tail(&log, 5)),
        });
    }
    if !out.status.success() {
        return Err(DarpError::BackendFailed {
            code: out.status.code(),
            stderr: tail(&log, 20),
        });
    }
    let sol_text = std::fs::read_to_string(&sol_path).map_err(|e| DarpError::SolutionParse {
        path: sol_path.clone(),
        message: format!("backend wrote no solution file ({e})"),
    })?;
    let sol = match cfg.backend {
        Backend::Cbc { .. } => parse_cbc_solution(&sol_text, &sol_path)?,
        _ => parse_solution(&sol_text, &sol_path)?,
    };
    bind_solution(model, sol, &sol_path, wall_time, cfg.backend.label(), tail(&log, 40))
}

/// Maps a parsed solution onto the model and checks that the reported
/// objective matches the values.
pub fn bind_solution(
    model: &MilpModel,
    sol: SolutionFile,
    path: &Path,
    wall_time: f64,
    backend: String,
    log_digest: String,
) -> Result<SolveResult> {
    let status = sol.status.unwrap_or(SolveStatus::Infeasible);
    let bad = |message: String| DarpError::SolutionParse {
        path: path.to_path_buf(),
        message,
    };
    let mut values = Vec::new();
    let mut objective = None;
    if status.has_solution() {
        let index: HashMap<&str, usize> = model.vars().iter().enumerate().map(|(j, v)| (v.name.as_str(), j)).collect();
        values = vec![0.0; model.num_vars()];
        for (name, v) in &sol.values {
            let j = *index.get(name.as_str()).ok_or_else(|| bad(format!("unknown variable {name}")))?;
            values[j] = *v;
        }
        let recomputed = model.objective_value(&values);
        let z = sol.objective.unwrap_or(recomputed);
        if (z - recomputed).abs() > 1e-6 * z.abs().max(1.0) {
            return Err(bad(format!("objective {z} disagrees with the values ({recomputed})")));
        }
        objective = Some(z);
    }
    Ok(SolveResult {
        status,
        objective,
        bound: sol.bound,
        values,
        wall_time,
        nodes: sol.nodes,
        backend,
        log_digest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_grammar() {
        let p = Path::new("s.txt");
        let s = parse_solution("status feasible\nobjective 3.5\nbound 3\nx 1\ny 0.5\n", p).unwrap();
        assert_eq!(s.status, Some(SolveStatus::Feasible));
        assert_eq!(s.values.len(), 2);
        let s = parse_solution("objective 1\nx 1\n", p).unwrap();
        assert_eq!(s.status, Some(SolveStatus::Optimal));
        assert!(parse_solution("x 1 2\n", p).is_err());
        assert!(parse_solution("x one\n", p).is_err());
    }

    #[test]
    fn cbc_grammar() {
        let p = Path::new("s.txt");
        let s = parse_cbc_solution("Optimal - objective value 3.00000000\n      0 x   1   1\n      1 y   1   2\n", p).unwrap();
        assert_eq!(s.status, Some(SolveStatus::Optimal));
        assert_eq!(s.objective, Some(3.0));
        assert_eq!(s.values, vec![("x".into(), 1.0), ("y".into(), 1.0)]);
        let s = parse_cbc_solution("Infeasible - objective value 2.00000000\n**       0 x   2   0\n", p).unwrap();
        assert_eq!(s.status, Some(SolveStatus::Infeasible));
        assert!(s.values.is_empty());
        let s = parse_cbc_solution("Stopped on time - objective value 10.5\n 0 x 1 0\n", p).unwrap();
        assert_eq!(s.status, Some(SolveStatus::Feasible));
        assert!(parse_cbc_solution("Banana\n", p).is_err());
    }
}
