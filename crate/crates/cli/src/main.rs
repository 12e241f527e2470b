use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use darp_core::event_graph::{EventGraph, GraphConfig};
use darp_core::gen::{point_window_suite, random_instance, two_request_fixture, GenParams};
use darp_core::harness::golden::{self, desk_manifest};
use darp_core::harness::{
    all_golden_ok, ablation_grid, parse_grid, run_suite, solve_instance, to_json, verify_theorems, write_csv,
    Flags, RunConfig,
};
use darp_core::instance::{compat_flags, load_instance, load_manifest, write_cordeau, ManifestEntry};
use darp_core::models::FormulationKind;
use darp_core::preprocessing::reduce;
use darp_core::solver::{Backend, BackendConfig};
use darp_core::DarpInstance;

#[derive(Parser)]
#[command(name = "darp", version, about = "Event-based MILP toolkit for the dial-a-ride problem")]
struct Cli {
    /// Log level filter, e.g. `info` or `darp_core=debug`.
    #[arg(long, global = true, default_value = "warn")]
    log: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Solve the LP relaxation of one instance.
    Relax(SolveArgs),
    /// Reduce the event graph and report what was removed.
    Preprocess {
        instance: PathBuf,
        /// Print the full report as JSON.
        #[arg(long)]
        report: bool,
    },
    /// Run the theorem checks on the instances of a manifest.
    VerifyTheorems {
        manifest: PathBuf,
        /// Number of generated point-window instances.
        #[arg(long, default_value_t = 20)]
        point_instances: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Run configurations over a manifest and write one record per run.
    Bench {
        manifest: PathBuf,
        /// Flag sets separated by `;`, e.g. `none;GP;GP+VS4+CI1+IP1+IP2`,
        /// or `ablation` for the full grid.
        #[arg(long, default_value = "GP+VS1+VS2+VS3+VS4+CI1+IP1+IP2")]
        grid: String,
        #[arg(long, value_delimiter = ',', default_value = "laeb")]
        formulations: Vec<FormulationKind>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the records as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also solve each relaxation to report the pure LP gap.
        #[arg(long)]
        lp_gap: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Write a manifest of the golden benchmark instances.
    Manifest {
        /// Directory holding `<name>.txt` benchmark files.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 36)]
        max_n: usize,
        /// Include every size (the long-running full grid).
        #[arg(long)]
        full: bool,
        #[arg(long)]
        no_x: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a generated instance in the benchmark file format.
    Generate {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        vehicles: usize,
        #[arg(long, default_value_t = 3)]
        capacity: u32,
        /// Width of the stated windows.
        #[arg(long, default_value_t = 15.0)]
        tw: f64,
        #[arg(long, default_value_t = 1)]
        max_load: u32,
        #[arg(long, default_value_t = 240.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `random`, `point` or `fixture`.
        #[arg(long, default_value = "random")]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the event graph of an instance.
    Dump {
        instance: PathBuf,
        /// Reduce before printing.
        #[arg(long)]
        preprocess: bool,
    },
}

#[derive(Args, Clone)]
struct BackendArgs {
    /// `highs` or `cbc`; defaults to the environment, then whatever is found.
    #[arg(long)]
    backend: Option<String>,
    /// Seconds per backend call.
    #[arg(long, default_value_t = BackendConfig::DEFAULT_TIME_LIMIT)]
    time_limit: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Keep exported models and solution files in this directory.
    #[arg(long)]
    keep_files: Option<PathBuf>,
}

impl BackendArgs {
    fn config(&self) -> anyhow::Result<BackendConfig> {
        let mut cfg = match self.backend.as_deref() {
            None => BackendConfig::from_env()?,
            Some("highs") => BackendConfig::new(Backend::highs()),
            Some("cbc") => BackendConfig::new(Backend::cbc().context("CBC executable not found")?),
            Some(other) => bail!("unknown backend {other:?}"),
        };
        cfg = cfg.with_time_limit(self.time_limit).with_threads(self.threads);
        cfg.keep_files = self.keep_files.clone();
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "laeb")]
    formulation: FormulationKind,
    /// Graph preprocessing, with the bound inequalities it yields.
    #[arg(long)]
    preprocess: bool,
    /// Inequality families: any of VS1..VS4, CI1, IP1, IP2, or `all`.
    #[arg(long, default_value = "")]
    cuts: String,
    /// Window extension in minutes, as for the `-X` variants.
    #[arg(long)]
    extend: Option<f64>,
    /// Objective to compare against; defaults to the golden value of the
    /// instance name.
    #[arg(long)]
    expect: Option<f64>,
    /// Print the record as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    backend: BackendArgs,
}

impl SolveArgs {
    fn flags(&self) -> anyhow::Result<Flags> {
        let mut parts: Vec<String> = Vec::new();
        if self.preprocess {
            parts.push("GP".into());
        }
        for tok in self.cuts.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if tok.eq_ignore_ascii_case("all") {
                parts.extend(Flags::NAMES[1..].iter().map(|s| s.to_string()));
            } else if !tok.eq_ignore_ascii_case("none") {
                parts.push(tok.to_string());
            }
        }
        Ok(parts.join("+").parse()?)
    }
}

fn load(path: &Path, extend: Option<f64>) -> anyhow::Result<(DarpInstance, Option<f64>)> {
    let entry = ManifestEntry { path: path.to_path_buf(), expected_objective: None, extend };
    let inst = entry.load().with_context(|| format!("loading {}", path.display()))?;
    Ok((inst, golden::golden(&entry.name())))
}

fn solve(args: &SolveArgs, relax: bool) -> anyhow::Result<bool> {
    let (inst, golden) = load(&args.instance, args.extend)?;
    let expected = if relax { None } else { args.expect.or(golden) };
    let mut cfg = RunConfig::new(args.formulation, args.flags()?, args.backend.config()?);
    cfg.relax = relax;
    let out = solve_instance(&inst, &cfg, expected)?;
    let rec = &out.record;
    let mut stdout = io::stdout().lock();
    if args.json {
        writeln!(stdout, "{}", serde_json::to_string_pretty(rec)?)?;
    } else {
        writeln!(stdout, "instance    {}", rec.instance)?;
        writeln!(stdout, "model       {} [{}]{}", rec.formulation, rec.flags, if relax { " relaxed" } else { "" })?;
        writeln!(stdout, "size        {} variables, {} rows", rec.variables, rec.rows)?;
        if let (Some(n0), Some(a0), Some(n1), Some(a1)) = (rec.nodes_before, rec.arcs_before, rec.nodes_after, rec.arcs_after) {
            writeln!(stdout, "graph       {n0} -> {n1} events, {a0} -> {a1} arcs")?;
        }
        writeln!(stdout, "status      {}", rec.status)?;
        if let Some(z) = rec.objective {
            writeln!(stdout, "objective   {z:.4}")?;
        }
        if let Some(e) = rec.expected {
            writeln!(stdout, "expected    {e} ({})", if rec.golden_ok == Some(true) { "ok" } else { "MISMATCH" })?;
        }
        writeln!(stdout, "time        {:.2}s ({:.2}s in backend)", rec.wall_time, rec.solve_time)?;
        for (k, r) in out.routes.iter().enumerate() {
            let stops: Vec<String> = r.stops.iter().zip(&r.times).map(|(l, t)| format!("{}@{t:.1}", l.code())).collect();
            writeln!(stdout, "route {}     {}", k + 1, stops.join(" "))?;
        }
        if let Some(v) = &out.validation {
            for x in &v.violations {
                writeln!(stdout, "violation   {:?} at {} by {:.4}", x.kind, x.location, x.magnitude)?;
            }
        }
        if let Some(e) = &rec.error {
            writeln!(stdout, "error       {e}")?;
        }
    }
    Ok(rec.passed())
}

fn preprocess(path: &Path, report: bool) -> anyhow::Result<bool> {
    let inst = load_instance(path)?;
    let mut g = EventGraph::build(&inst, &compat_flags(&inst), GraphConfig::default());
    let (_, rep) = reduce(&mut g, &inst)?;
    if report {
        println!("{}", rep.to_json());
    } else {
        println!(
            "{}: {} -> {} events, {} -> {} arcs, {:.1}% fewer variables",
            inst.name,
            rep.nodes_before,
            rep.nodes_after,
            rep.arcs_before,
            rep.arcs_after,
            100.0 * rep.variable_reduction()
        );
    }
    Ok(true)
}

fn load_all(manifest: &Path) -> anyhow::Result<Vec<DarpInstance>> {
    load_manifest(manifest)?
        .iter()
        .map(|e| e.load().with_context(|| format!("loading {}", e.path.display())))
        .collect()
}

fn generate(
    p: GenParams,
    seed: u64,
    kind: &str,
    out: Option<&Path>,
) -> anyhow::Result<bool> {
    let inst = match kind {
        "random" => random_instance(&p, seed),
        "point" => point_window_suite(1, seed).remove(0),
        "fixture" => two_request_fixture(p.capacity),
        other => bail!("unknown instance kind {other:?}"),
    };
    let text = write_cordeau(&inst)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.cmd {
        Cmd::Solve(a) => solve(&a, false),
        Cmd::Relax(a) => solve(&a, true),
        Cmd::Preprocess { instance, report } => preprocess(&instance, report),
        Cmd::VerifyTheorems { manifest, point_instances, seed, backend } => {
            let insts = load_all(&manifest)?;
            let points = point_window_suite(point_instances, seed);
            let report = verify_theorems(&insts, &points, &[two_request_fixture(5)], &backend.config()?);
            for c in &report.checks {
                println!("{} {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.suite, c.instance, c.detail);
            }
            Ok(report.all_passed())
        }
        Cmd::Bench { manifest, grid, formulations, out, json, lp_gap, workers, backend } => {
            let entries = load_manifest(&manifest)?;
            let grid = if grid == "ablation" { ablation_grid() } else { parse_grid(&grid)? };
            let backend = backend.config()?;
            let mut configs = Vec::new();
            for &kind in &formulations {
                for &flags in &grid {
                    let mut c = RunConfig::new(kind, flags, backend.clone());
                    c.lp_gap = lp_gap;
                    configs.push(c);
                }
            }
            let records = run_suite(&entries, &configs, workers)?;
            write_csv(&records, File::create(&out).with_context(|| format!("creating {}", out.display()))?)?;
            if let Some(j) = json {
                std::fs::write(j, to_json(&records)?)?;
            }
            let failed: Vec<_> = records.iter().filter(|r| !r.passed()).collect();
            for r in &failed {
                eprintln!("{} {} [{}]: {:?} {}", r.instance, r.formulation, r.flags, r.objective, r.error.as_deref().unwrap_or(""));
            }
            println!("{} runs, {} failed, written to {}", records.len(), failed.len(), out.display());
            Ok(all_golden_ok(&records))
        }
        Cmd::Manifest { data_dir, max_n, full, no_x, out } => {
            let dir = data_dir.unwrap_or_else(golden::data_dir);
            let entries = desk_manifest(&dir, if full { usize::MAX } else { max_n }, !no_x);
            std::fs::write(&out, serde_json::to_string_pretty(&entries)?)?;
            println!("{} entries written to {}", entries.len(), out.display());
            Ok(true)
        }
        Cmd::Generate { n, vehicles, capacity, tw, max_load, horizon, seed, kind, out } => {
            let p = GenParams { n, vehicles, capacity, tw, max_load, horizon, ..GenParams::default() };
            generate(p, seed, &kind, out.as_deref())
        }
        Cmd::Dump { instance, preprocess } => {
            let inst = load_instance(&instance)?;
            let mut g = EventGraph::build(&inst, &compat_flags(&inst), GraphConfig::default());
            if preprocess {
                reduce(&mut g, &inst)?;
            }
            print!("{}", g.dump());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
