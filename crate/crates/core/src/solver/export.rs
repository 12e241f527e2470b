//! LP-file and free-MPS writers and readers.
//!
//! Variables are written in name order, rows in insertion order, and every
//! number is rounded to 12 significant digits, so writing the same model
//! twice yields the same bytes and `export(import(export(m))) == export(m)`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{DarpError, Result};
use crate::models::{Domain, MilpModel, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Lp,
    Mps,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Lp => "lp",
            ExportFormat::Mps => "mps",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = DarpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(ExportFormat::Lp),
            "mps" => Ok(ExportFormat::Mps),
            _ => Err(DarpError::Precondition(format!("unknown model format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawVar {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawRow {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization model with variables sorted by name and row terms
/// sorted by variable index.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RawModel {
    pub name: String,
    pub vars: Vec<RawVar>,
    pub rows: Vec<RawRow>,
}

impl RawModel {
    /// Rounds every number to 12 significant digits.
    pub fn rounded(&self) -> RawModel {
        let mut m = self.clone();
        for v in &mut m.vars {
            v.lower = round12(v.lower);
            v.upper = round12(v.upper);
            v.objective = round12(v.objective);
        }
        for r in &mut m.rows {
            r.rhs = round12(r.rhs);
            for t in &mut r.terms {
                t.1 = round12(t.1);
            }
            r.terms.retain(|&(_, a)| a != 0.0);
        }
        m
    }
}

impl MilpModel {
    /// Name-sorted copy of the model. Fails on duplicate or unusable names.
    pub fn to_raw(&self) -> Result<RawModel> {
        let mut order: Vec<usize> = (0..self.num_vars()).collect();
        order.sort_by(|&a, &b| self.vars()[a].name.cmp(&self.vars()[b].name));
        let mut pos = vec![0; self.num_vars()];
        for (k, &j) in order.iter().enumerate() {
            pos[j] = k;
        }
        let vars: Vec<RawVar> = order
            .iter()
            .map(|&j| {
                let v = &self.vars()[j];
                RawVar {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                    integer: v.domain == Domain::Binary,
                    objective: v.objective,
                }
            })
            .collect();
        let rows = self
            .rows()
            .iter()
            .map(|r| {
                let mut terms: Vec<(usize, f64)> = r.terms.iter().map(|&(j, a)| (pos[j], a)).collect();
                terms.sort_by_key(|t| t.0);
                RawRow {
                    name: r.name.clone(),
                    terms,
                    sense: r.sense,
                    rhs: r.rhs,
                }
            })
            .collect();
        let raw = RawModel {
            name: self.name.clone(),
            vars,
            rows,
        };
        check_names(&raw)?;
        Ok(raw)
    }
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_names(m: &RawModel) -> Result<()> {
    let mut seen = HashSet::new();
    for name in m.vars.iter().map(|v| &v.name) {
        if !valid_name(name) {
            return Err(DarpError::Export(format!("variable name {name:?} is not a plain identifier")));
        }
        if !seen.insert(name.as_str()) {
            return Err(DarpError::Export(format!("duplicate variable name {name}")));
        }
    }
    let mut rows = HashSet::new();
    for name in m.rows.iter().map(|r| &r.name) {
        if !valid_name(name) || name == "obj" {
            return Err(DarpError::Export(format!("row name {name:?} is not usable")));
        }
        if !rows.insert(name.as_str()) || seen.contains(name.as_str()) {
            return Err(DarpError::Export(format!("name collision on row {name}")));
        }
    }
    Ok(())
}

fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest text of `x` rounded to 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{}", round12(x))
    }
}

pub fn export_model(model: &MilpModel, format: ExportFormat) -> Result<String> {
    export_raw(&model.to_raw()?, format)
}

pub fn export_raw(m: &RawModel, format: ExportFormat) -> Result<String> {
    check_names(m)?;
    if m.vars.is_empty() {
        return Err(DarpError::Export("model has no variables".into()));
    }
    Ok(match format {
        ExportFormat::Lp => write_lp(m),
        ExportFormat::Mps => write_mps(m),
    })
}

pub fn import_model(text: &str, format: ExportFormat) -> Result<RawModel> {
    match format {
        ExportFormat::Lp => read_lp(text),
        ExportFormat::Mps => read_mps(text),
    }
}

const TERMS_PER_LINE: usize = 6;

fn write_expr(out: &mut String, m: &RawModel, terms: &[(usize, f64)]) {
    let terms: Vec<(usize, f64)> = terms.iter().copied().filter(|&(_, a)| round12(a) != 0.0).collect();
    if terms.is_empty() {
        let _ = write!(out, " 0 {}", m.vars[0].name);
        return;
    }
    for (k, &(j, a)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if a < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", fmt_num(a.abs()), m.vars[j].name);
    }
}

fn sense_op(s: Sense) -> &'static str {
    match s {
        Sense::Le => "<=",
        Sense::Ge => ">=",
        Sense::Eq => "=",
    }
}

fn write_lp(m: &RawModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", m.name);
    out.push_str("Minimize\n obj:");
    let obj: Vec<(usize, f64)> = m.vars.iter().enumerate().map(|(j, v)| (j, v.objective)).collect();
    write_expr(&mut out, m, &obj);
    out.push_str("\nSubject To\n");
    for r in &m.rows {
        let _ = write!(out, " {}:", r.name);
        write_expr(&mut out, m, &r.terms);
        let _ = writeln!(out, " {} {}", sense_op(r.sense), fmt_num(r.rhs));
    }
    out.push_str("Bounds\n");
    for v in &m.vars {
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if round12(v.lower) == round12(v.upper) {
            let _ = writeln!(out, " {} = {}", v.name, fmt_num(v.lower));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(v.upper));
        }
    }
    if m.vars.iter().any(|v| v.integer) {
        out.push_str("Generals\n");
        for v in m.vars.iter().filter(|v| v.integer) {
            let _ = writeln!(out, " {}", v.name);
        }
    }
    out.push_str("End\n");
    out
}

fn write_mps(m: &RawModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", m.name.replace(char::is_whitespace, "_"));
    out.push_str("ROWS\n N obj\n");
    for r in &m.rows {
        let t = match r.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {t} {}", r.name);
    }
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m.vars.len()];
    for (i, r) in m.rows.iter().enumerate() {
        for &(j, a) in &r.terms {
            if round12(a) != 0.0 {
                cols[j].push((i, a));
            }
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (j, v) in m.vars.iter().enumerate() {
        if v.integer != in_int {
            let kind = if v.integer { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " M{marker} 'MARKER' '{kind}'");
            marker += 1;
            in_int = v.integer;
        }
        let mut wrote = false;
        if round12(v.objective) != 0.0 {
            let _ = writeln!(out, " {} obj {}", v.name, fmt_num(v.objective));
            wrote = true;
        }
        for &(i, a) in &cols[j] {
            let _ = writeln!(out, " {} {} {}", v.name, m.rows[i].name, fmt_num(a));
            wrote = true;
        }
        if !wrote {
            let _ = writeln!(out, " {} obj 0", v.name);
        }
    }
    if in_int {
        let _ = writeln!(out, " M{marker} 'MARKER' 'INTEND'");
    }
    out.push_str("RHS\n");
    for r in m.rows.iter().filter(|r| round12(r.rhs) != 0.0) {
        let _ = writeln!(out, " rhs {} {}", r.name, fmt_num(r.rhs));
    }
    out.push_str("BOUNDS\n");
    for v in &m.vars {
        let (lo, up) = (round12(v.lower), round12(v.upper));
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(out, " FR bnd {}", v.name);
        } else if lo == up {
            let _ = writeln!(out, " FX bnd {} {}", v.name, fmt_num(lo));
        } else {
            if lo == f64::NEG_INFINITY {
                let _ = writeln!(out, " MI bnd {}", v.name);
            } else {
                let _ = writeln!(out, " LO bnd {} {}", v.name, fmt_num(lo));
            }
            if up == f64::INFINITY {
                let _ = writeln!(out, " PL bnd {}", v.name);
            } else {
                let _ = writeln!(out, " UP bnd {} {}", v.name, fmt_num(up));
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

fn import_err(line: usize, message: impl Into<String>) -> DarpError {
    DarpError::Import {
        line,
        message: message.into(),
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| import_err(line, format!("expected a number, found {tok:?}"))),
    }
}

/// Collects variables in order of first appearance while reading.
#[derive(Default)]
struct VarTable {
    vars: Vec<RawVar>,
    index: std::collections::HashMap<String, usize>,
}

impl VarTable {
    fn get(&mut self, name: &str) -> usize {
        if let Some(&j) = self.index.get(name) {
            return j;
        }
        let j = self.vars.len();
        self.vars.push(RawVar {
            name: name.to_string(),
            lower: 0.0,
            upper: f64::INFINITY,
            integer: false,
            objective: 0.0,
        });
        self.index.insert(name.to_string(), j);
        j
    }

    fn lookup(&self, name: &str, line: usize) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| import_err(line, format!("unknown variable {name}")))
    }

    /// Sorts variables by name and remaps the rows.
    fn finish(self, name: String, mut rows: Vec<RawRow>) -> RawModel {
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by(|&a, &b| self.vars[a].name.cmp(&self.vars[b].name));
        let mut pos = vec![0; order.len()];
        for (k, &j) in order.iter().enumerate() {
            pos[j] = k;
        }
        for r in &mut rows {
            let mut merged: Vec<(usize, f64)> = Vec::new();
            let mut terms: Vec<(usize, f64)> = r.terms.iter().map(|&(j, a)| (pos[j], a)).collect();
            terms.sort_by_key(|t| t.0);
            for (j, a) in terms {
                match merged.last_mut() {
                    Some((k, b)) if *k == j => *b += a,
                    _ => merged.push((j, a)),
                }
            }
            merged.retain(|&(_, a)| a != 0.0);
            r.terms = merged;
        }
        let vars = order.into_iter().map(|j| self.vars[j].clone()).collect();
        RawModel { name, vars, rows }
    }
}

/// Parses `[+|-] [coef] name ...` into terms.
fn parse_expr(tokens: &[&str], vars: &mut VarTable, line: usize) -> Result<Vec<(usize, f64)>> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for &tok in tokens {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -sign,
            _ => {
                if let Ok(x) = tok.parse::<f64>() {
                    coef = Some(coef.unwrap_or(1.0) * x);
                } else {
                    let j = vars.get(tok);
                    terms.push((j, sign * coef.unwrap_or(1.0)));
                    sign = 1.0;
                    coef = None;
                }
            }
        }
    }
    if coef.is_some() {
        return Err(import_err(line, "dangling number in expression"));
    }
    Ok(terms)
}

#[derive(PartialEq)]
enum LpSection {
    Head,
    Objective,
    Rows,
    Bounds,
    Generals,
    End,
}

fn lp_section(line: &str) -> Option<LpSection> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(LpSection::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(LpSection::Rows),
        "bounds" => Some(LpSection::Bounds),
        "generals" | "general" | "gen" | "binaries" | "binary" | "bin" => Some(LpSection::Generals),
        "end" => Some(LpSection::End),
        _ => None,
    }
}

fn read_lp(text: &str) -> Result<RawModel> {
    let mut name = String::new();
    let mut vars = VarTable::default();
    let mut rows: Vec<RawRow> = Vec::new();
    let mut section = LpSection::Head;
    let mut pending: Vec<String> = Vec::new();
    let mut pending_line = 0;
    let mut objective: Vec<(usize, f64)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        if let Some(rest) = raw.trim_start().strip_prefix('\\') {
            if section == LpSection::Head && name.is_empty() {
                name = rest.trim().to_string();
            }
            continue;
        }
        if raw.trim().is_empty() {
            continue;
        }
        if let Some(next) = lp_section(raw) {
            if section == LpSection::Objective {
                let toks: Vec<&str> = pending.iter().map(String::as_str).collect();
                let body = match toks.first() {
                    Some(t) if t.ends_with(':') => &toks[1..],
                    _ => &toks[..],
                };
                objective = parse_expr(body, &mut vars, pending_line)?;
                pending.clear();
            }
            if section == LpSection::Rows && !pending.is_empty() {
                return Err(import_err(line_no, "row without a sense"));
            }
            section = next;
            continue;
        }
        match section {
            LpSection::Head => return Err(import_err(line_no, "text before the objective section")),
            LpSection::End => return Err(import_err(line_no, "text after End")),
            LpSection::Objective => {
                if pending.is_empty() {
                    pending_line = line_no;
                }
                pending.extend(raw.split_whitespace().map(str::to_string));
            }
            LpSection::Rows => {
                if pending.is_empty() {
                    pending_line = line_no;
                }
                pending.extend(raw.split_whitespace().map(str::to_string));
                let Some(op) = pending.iter().position(|t| matches!(t.as_str(), "<=" | ">=" | "=" | "=<" | "=>")) else {
                    continue;
                };
                let toks: Vec<&str> = pending.iter().map(String::as_str).collect();
                let (rname, body) = match toks.first() {
                    Some(t) if t.ends_with(':') => (t.trim_end_matches(':').to_string(), &toks[1..op]),
                    _ => (format!("r{}", rows.len()), &toks[..op]),
                };
                let sense = match toks[op] {
                    "<=" | "=<" => Sense::Le,
                    ">=" | "=>" => Sense::Ge,
                    _ => Sense::Eq,
                };
                let rhs_toks = &toks[op + 1..];
                let rhs = match rhs_toks {
                    [x] => parse_num(x, line_no)?,
                    ["-", x] => -parse_num(x, line_no)?,
                    ["+", x] => parse_num(x, line_no)?,
                    _ => return Err(import_err(line_no, "right-hand side must be a single number")),
                };
                let terms = parse_expr(body, &mut vars, pending_line)?;
                rows.push(RawRow {
                    name: rname,
                    terms,
                    sense,
                    rhs,
                });
                pending.clear();
            }
            LpSection::Bounds => {
                let toks: Vec<&str> = raw.split_whitespace().collect();
                match toks.as_slice() {
                    [v, free] if free.eq_ignore_ascii_case("free") => {
                        let j = vars.get(v);
                        vars.vars[j].lower = f64::NEG_INFINITY;
                        vars.vars[j].upper = f64::INFINITY;
                    }
                    [v, "=", x] => {
                        let j = vars.get(v);
                        let x = parse_num(x, line_no)?;
                        vars.vars[j].lower = x;
                        vars.vars[j].upper = x;
                    }
                    [lo, "<=", v, "<=", up] => {
                        let j = vars.get(v);
                        vars.vars[j].lower = parse_num(lo, line_no)?;
                        vars.vars[j].upper = parse_num(up, line_no)?;
                    }
                    [v, "<=", up] => {
                        let j = vars.get(v);
                        vars.vars[j].upper = parse_num(up, line_no)?;
                    }
                    [v, ">=", lo] => {
                        let j = vars.get(v);
                        vars.vars[j].lower = parse_num(lo, line_no)?;
                    }
                    _ => return Err(import_err(line_no, format!("unsupported bound {:?}", raw.trim()))),
                }
            }
            LpSection::Generals => {
                for v in raw.split_whitespace() {
                    let j = vars.get(v);
                    vars.vars[j].integer = true;
                }
            }
        }
    }
    if section != LpSection::End {
        return Err(import_err(text.lines().count(), "missing End"));
    }
    for (j, a) in objective {
        vars.vars[j].objective += a;
    }
    Ok(vars.finish(name, rows))
}

fn read_mps(text: &str) -> Result<RawModel> {
    let mut name = String::new();
    let mut vars = VarTable::default();
    let mut rows: Vec<RawRow> = Vec::new();
    let mut row_index: std::collections::HashMap<String, Option<usize>> = std::collections::HashMap::new();
    let mut section = String::new();
    let mut integer = false;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            section = toks[0].to_ascii_uppercase();
            if section == "NAME" {
                name = toks.get(1..).map(|t| t.join(" ")).unwrap_or_default();
            }
            if section == "ENDATA" {
                break;
            }
            continue;
        }
        match section.as_str() {
            "ROWS" => {
                let [kind, rname] = toks[..] else {
                    return Err(import_err(line_no, "expected `<type> <row>`"));
                };
                let sense = match kind {
                    "N" => {
                        row_index.insert(rname.to_string(), None);
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(import_err(line_no, format!("unknown row type {kind}"))),
                };
                row_index.insert(rname.to_string(), Some(rows.len()));
                rows.push(RawRow {
                    name: rname.to_string(),
                    terms: Vec::new(),
                    sense,
                    rhs: 0.0,
                });
            }
            "COLUMNS" => {
                if toks.get(1) == Some(&"'MARKER'") {
                    integer = toks.get(2) == Some(&"'INTORG'");
                    continue;
                }
                if toks.len() % 2 != 1 {
                    return Err(import_err(line_no, "expected `<column> (<row> <value>)+`"));
                }
                let j = vars.get(toks[0]);
                vars.vars[j].integer = integer;
                if integer {
                    vars.vars[j].upper = vars.vars[j].upper.min(1.0);
                }
                for pair in toks[1..].chunks(2) {
                    let a = parse_num(pair[1], line_no)?;
                    match row_index.get(pair[0]) {
                        Some(None) => vars.vars[j].objective += a,
                        Some(Some(i)) => rows[*i].terms.push((j, a)),
                        None => return Err(import_err(line_no, format!("unknown row {}", pair[0]))),
                    }
                }
            }
            "RHS" => {
                for pair in toks[1..].chunks(2) {
                    let [rname, x] = pair else {
                        return Err(import_err(line_no, "expected `<set> (<row> <value>)+`"));
                    };
                    match row_index.get(*rname) {
                        Some(Some(i)) => rows[*i].rhs = parse_num(x, line_no)?,
                        Some(None) => {}
                        None => return Err(import_err(line_no, format!("unknown row {rname}"))),
                    }
                }
            }
            "BOUNDS" => {
                let (kind, v) = match toks[..] {
                    [kind, _, v, ..] => (kind, v),
                    _ => return Err(import_err(line_no, "expected `<type> <set> <column> [value]`")),
                };
                let j = vars.lookup(v, line_no)?;
                let val = || -> Result<f64> {
                    toks.get(3)
                        .ok_or_else(|| import_err(line_no, "missing bound value"))
                        .and_then(|x| parse_num(x, line_no))
                };
                let var = &mut vars.vars[j];
                match kind {
                    "LO" => var.lower = val()?,
                    "UP" => var.upper = val()?,
                    "FX" => {
                        var.lower = val()?;
                        var.upper = var.lower;
                    }
                    "FR" => {
                        var.lower = f64::NEG_INFINITY;
                        var.upper = f64::INFINITY;
                    }
                    "MI" => var.lower = f64::NEG_INFINITY,
                    "PL" => var.upper = f64::INFINITY,
                    "BV" => {
                        var.lower = 0.0;
                        var.upper = 1.0;
                        var.integer = true;
                    }
                    _ => return Err(import_err(line_no, format!("unknown bound type {kind}"))),
                }
            }
            _ => return Err(import_err(line_no, format!("data outside a known section ({section:?})"))),
        }
    }
    if section != "ENDATA" {
        return Err(import_err(text.lines().count(), "missing ENDATA"));
    }
    Ok(vars.finish(name, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_graph::{EventGraph, GraphConfig};
    use crate::gen::{random_instance, GenParams};
    use crate::instance::compat_flags;
    use crate::models::{build, FormulationKind, Site, VarRef};

    #[test]
    fn numbers_keep_twelve_digits() {
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(0.5), "0.5");
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let inst = random_instance(&GenParams { n: 3, ..GenParams::default() }, 5);
        let g = EventGraph::build(&inst, &compat_flags(&inst), GraphConfig::default());
        for kind in FormulationKind::ALL {
            let m = build(kind, &inst, Some(&g)).unwrap();
            for fmt in [ExportFormat::Lp, ExportFormat::Mps] {
                let a = export_model(&m, fmt).unwrap();
                let back = import_model(&a, fmt).unwrap();
                assert_eq!(back, m.to_raw().unwrap().rounded(), "{kind} {fmt:?}");
                assert_eq!(export_raw(&back, fmt).unwrap(), a, "{kind} {fmt:?}");
            }
        }
    }

    #[test]
    fn collisions_are_rejected() {
        let mut m = MilpModel::new("c", FormulationKind::Lb);
        m.add_var(VarRef::Time(Site::Start), "a".into(), 0.0, 1.0, Domain::Continuous, 1.0);
        m.add_var(VarRef::Time(Site::End), "a".into(), 0.0, 1.0, Domain::Continuous, 1.0);
        assert!(matches!(export_model(&m, ExportFormat::Lp), Err(DarpError::Export(_))));
        let mut m = MilpModel::new("c", FormulationKind::Lb);
        let a = m.add_var(VarRef::Time(Site::Start), "a".into(), 0.0, 1.0, Domain::Continuous, 1.0);
        m.add_row("r".into(), vec![(a, 1.0)], Sense::Le, 1.0);
        m.add_row("r".into(), vec![(a, 1.0)], Sense::Le, 1.0);
        assert!(matches!(export_model(&m, ExportFormat::Mps), Err(DarpError::Export(_))));
    }

    #[test]
    fn lp_layout() {
        let mut m = MilpModel::new("toy", FormulationKind::Lb);
        let x = m.add_var(VarRef::Time(Site::Start), "x".into(), 0.0, 1.0, Domain::Continuous, 1.0);
        let y = m.add_var(VarRef::Time(Site::End), "y".into(), 0.0, 1.0, Domain::Binary, -0.5);
        m.add_row("c".into(), vec![(y, 2.0), (x, 1.0)], Sense::Ge, 2.0);
        let text = export_model(&m, ExportFormat::Lp).unwrap();
        assert_eq!(
            text,
            "\\ toy\nMinimize\n obj: + 1 x - 0.5 y\nSubject To\n c: + 1 x + 2 y >= 2\nBounds\n 0 <= x <= 1\n 0 <= y <= 1\nGenerals\n y\nEnd\n"
        );
        assert!(import_model("Minimize\n obj: x\nSubject To\n c: x >= \nEnd\n", ExportFormat::Lp).is_err());
    }
}
