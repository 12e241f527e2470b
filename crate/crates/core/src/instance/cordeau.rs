//! Reader and writer for the benchmark file layout of the a/b instance sets.
//!
//! ```text
//! K n T Q L
//! id x y d q e l        (2n + 2 lines: depot, pickups, deliveries, depot copy)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{DarpInstance, Matrix, Request, RequestKind, Window};
use crate::error::{DarpError, Result};

/// How the parser decides which of a request's two windows was stated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WindowRule {
    /// Requests `1..=n/2` are outbound, the rest inbound.
    Halves,
    /// The narrower window is the stated one; ties fall back to `Halves`.
    #[default]
    Narrower,
}

struct NodeLine {
    x: f64,
    y: f64,
    service: f64,
    load: i64,
    window: Window,
}

fn parse_err(line: usize, message: impl Into<String>) -> DarpError {
    DarpError::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing field `{what}`")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse `{what}` from {tok:?}")))
}

/// Parses benchmark text into a raw (not yet derived) instance.
pub fn parse_cordeau(text: &str, name: &str, rule: WindowRule) -> Result<DarpInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut tok = header.split_whitespace();
    let vehicles: usize = field(tok.next(), hline, "K")?;
    let n: usize = field(tok.next(), hline, "n")?;
    let horizon: f64 = field(tok.next(), hline, "T")?;
    let capacity: u32 = field(tok.next(), hline, "Q")?;
    let max_ride: f64 = field(tok.next(), hline, "L")?;
    if n == 0 {
        return Err(parse_err(hline, "instance has no requests"));
    }

    let mut nodes = Vec::with_capacity(2 * n + 2);
    let mut last_line = hline;
    for (lineno, l) in lines {
        last_line = lineno;
        if nodes.len() == 2 * n + 2 {
            return Err(parse_err(
                lineno,
                format!("node-count mismatch: expected {} node lines", 2 * n + 2),
            ));
        }
        let mut tok = l.split_whitespace();
        let id: usize = field(tok.next(), lineno, "id")?;
        if id != nodes.len() {
            return Err(parse_err(
                lineno,
                format!("expected node id {}, found {id}", nodes.len()),
            ));
        }
        let x = field(tok.next(), lineno, "x")?;
        let y = field(tok.next(), lineno, "y")?;
        let service = field(tok.next(), lineno, "d")?;
        let load: i64 = field(tok.next(), lineno, "q")?;
        let e = field(tok.next(), lineno, "e")?;
        let l = field(tok.next(), lineno, "l")?;
        nodes.push((
            lineno,
            NodeLine {
                x,
                y,
                service,
                load,
                window: Window::new(e, l),
            },
        ));
    }
    if nodes.len() != 2 * n + 2 {
        return Err(parse_err(
            last_line,
            format!(
                "node-count mismatch: header announces {n} requests ({} node lines), found {}",
                2 * n + 2,
                nodes.len()
            ),
        ));
    }

    let coords: Vec<(f64, f64)> = nodes[..=2 * n].iter().map(|(_, nl)| (nl.x, nl.y)).collect();
    let dist = Matrix::from_fn(2 * n + 1, |a, b| {
        let (xa, ya) = coords[a];
        let (xb, yb) = coords[b];
        (xa - xb).hypot(ya - yb)
    });

    let mut requests = Vec::with_capacity(n);
    for i in 1..=n {
        let (pline, p) = &nodes[i];
        let (dline, d) = &nodes[n + i];
        if p.load <= 0 || d.load != -p.load {
            return Err(parse_err(
                *dline,
                format!(
                    "request {i}: pickup load {} and delivery load {} do not pair up",
                    p.load, d.load
                ),
            ));
        }
        if p.load as u64 > capacity as u64 {
            return Err(parse_err(
                *pline,
                format!("request {i}: load {} exceeds capacity {capacity}", p.load),
            ));
        }
        if p.service != d.service {
            log::warn!(
                "request {i}: pickup service {} differs from delivery service {}; using pickup value",
                p.service,
                d.service
            );
        }
        let kind = match rule {
            WindowRule::Narrower if p.window.width() < d.window.width() => RequestKind::Inbound,
            WindowRule::Narrower if p.window.width() > d.window.width() => RequestKind::Outbound,
            _ if i <= n / 2 => RequestKind::Outbound,
            _ => RequestKind::Inbound,
        };
        requests.push(Request {
            id: i,
            load: p.load as u32,
            service: p.service,
            max_ride,
            pickup: p.window,
            delivery: d.window,
            raw_pickup: p.window,
            raw_delivery: d.window,
            direct_time: dist.get(i, n + i),
            kind,
        });
    }

    let inst = DarpInstance {
        name: name.to_string(),
        vehicles,
        capacity,
        horizon,
        requests,
        travel: dist.clone(),
        cost: dist,
        coords: Some(coords),
        derived: false,
    };
    inst.validate()?;
    Ok(inst)
}

/// Serializes the raw data back into the benchmark layout.
pub fn write_cordeau(inst: &DarpInstance) -> Result<String> {
    let coords = inst.coords.as_ref().ok_or_else(|| {
        DarpError::Export("instance has no coordinates; cannot write benchmark format".into())
    })?;
    let n = inst.n();
    let max_ride = inst.requests.first().map_or(0.0, |r| r.max_ride);
    if inst.requests.iter().any(|r| r.max_ride != max_ride) {
        return Err(DarpError::Export(
            "benchmark format needs a uniform maximum ride time".into(),
        ));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {} {}",
        inst.vehicles, n, inst.horizon, inst.capacity, max_ride
    );
    let node = |out: &mut String, id: usize, loc: usize, s: f64, q: i64, w: Window| {
        let (x, y) = coords[loc];
        let _ = writeln!(out, "{id} {x} {y} {s} {q} {} {}", w.earliest, w.latest);
    };
    let depot = Window::new(0.0, inst.horizon);
    node(&mut out, 0, 0, 0.0, 0, depot);
    for r in &inst.requests {
        node(&mut out, r.id, r.id, r.service, r.load as i64, r.raw_pickup);
    }
    for r in &inst.requests {
        node(&mut out, n + r.id, n + r.id, r.service, -(r.load as i64), r.raw_delivery);
    }
    node(&mut out, 2 * n + 1, 0, 0.0, 0, depot);
    Ok(out)
}

/// Reads a benchmark file, names the instance after the file stem and
/// derives windows. A stem ending in `-X` (without such a file existing)
/// is not handled here; see the manifest loader.
pub fn load_instance(path: &Path) -> Result<DarpInstance> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_cordeau(&text, &name, WindowRule::default())?.derive_windows()
}
