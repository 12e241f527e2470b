//! Published optimal objectives of the a/b benchmark sets and the manifests
//! built from them.

use std::path::Path;

use crate::instance::ManifestEntry;

/// Proven optima of the plain instances, by name.
pub const GOLDEN_PLAIN: &[(&str, f64)] = &[
    ("a2-16", 294.3),
    ("a2-20", 344.9),
    ("a2-24", 431.1),
    ("a3-18", 300.5),
    ("a3-24", 344.8),
    ("a3-30", 494.8),
    ("a3-36", 583.2),
    ("a4-16", 282.7),
    ("a4-24", 375.0),
    ("a4-32", 485.5),
    ("a4-40", 557.7),
    ("a4-48", 668.8),
    ("a5-40", 498.4),
    ("a5-50", 686.6),
    ("a5-60", 808.3),
    ("a6-48", 604.1),
    ("a6-60", 819.3),
    ("a6-72", 916.1),
    ("a7-56", 724.0),
    ("a7-70", 875.7),
    ("a7-84", 1033.3),
    ("a8-64", 747.5),
    ("a8-80", 945.8),
    ("b2-16", 309.4),
    ("b2-20", 332.7),
    ("b2-24", 444.7),
    ("b3-18", 301.6),
    ("b3-24", 394.5),
    ("b3-30", 531.4),
    ("b3-36", 603.8),
    ("b4-16", 296.9),
    ("b4-24", 371.4),
    ("b4-32", 494.9),
    ("b4-40", 656.6),
    ("b4-48", 673.8),
    ("b5-40", 613.7),
    ("b5-50", 761.4),
    ("b5-60", 902.0),
    ("b6-48", 714.8),
    ("b6-60", 860.0),
    ("b6-72", 978.5),
    ("b7-56", 824.0),
    ("b7-70", 912.6),
    ("b7-84", 1203.3),
    ("b8-64", 839.9),
    ("b8-80", 1036.4),
    ("b8-96", 1185.6),
];

/// Proven optima of the variants whose pickup windows close 15 minutes
/// later. Entries only known with a remaining gap are left out.
pub const GOLDEN_X: &[(&str, f64)] = &[
    ("a2-16-X", 278.2),
    ("a2-20-X", 330.7),
    ("a2-24-X", 389.1),
    ("a3-18-X", 272.7),
    ("a3-24-X", 289.6),
    ("a3-30-X", 452.8),
    ("a3-36-X", 501.0),
    ("a4-16-X", 235.2),
    ("a4-24-X", 359.4),
    ("a4-32-X", 447.3),
    ("a4-40-X", 509.0),
    ("a4-48-X", 620.3),
    ("a5-40-X", 464.0),
    ("a5-50-X", 621.9),
    ("a5-60-X", 745.4),
    ("a6-48-X", 572.5),
    ("a6-60-X", 757.9),
    ("a7-56-X", 663.5),
    ("a7-70-X", 815.3),
    ("b2-16-X", 282.5),
    ("b2-20-X", 323.6),
    ("b2-24-X", 412.3),
    ("b3-18-X", 290.4),
    ("b3-24-X", 363.7),
    ("b3-30-X", 504.3),
    ("b3-36-X", 565.9),
    ("b4-16-X", 289.9),
    ("b4-24-X", 347.0),
    ("b4-32-X", 491.0),
    ("b4-40-X", 628.3),
    ("b4-48-X", 627.4),
    ("b5-40-X", 585.1),
    ("b5-50-X", 708.8),
    ("b5-60-X", 851.9),
    ("b6-48-X", 691.6),
    ("b6-60-X", 841.6),
    ("b6-72-X", 930.3),
    ("b7-56-X", 787.9),
    ("b7-70-X", 865.3),
    ("b7-84-X", 1141.2),
    ("b8-64-X", 818.3),
    ("b8-80-X", 998.3),
    ("b8-96-X", 1137.7),
];

/// Absolute tolerance of the golden comparison, applied after rounding the
/// objective to one decimal.
pub const GOLDEN_TOLERANCE: f64 = 0.05;

/// Environment variable naming the directory of the benchmark files.
pub const DATA_DIR_ENV: &str = "DARP_DATA_DIR";

pub fn golden(name: &str) -> Option<f64> {
    GOLDEN_PLAIN.iter().chain(GOLDEN_X).find(|(n, _)| *n == name).map(|&(_, z)| z)
}

pub fn round1(z: f64) -> f64 {
    (z * 10.0).round() / 10.0
}

pub fn golden_ok(objective: f64, expected: f64) -> bool {
    // the epsilon absorbs the binary representation of the decimals
    (round1(objective) - expected).abs() <= GOLDEN_TOLERANCE + 1e-9
}

/// Number of requests encoded in a benchmark name like `a3-24` or `b2-16-X`.
pub fn requests_of(name: &str) -> Option<usize> {
    name.split('-').nth(1)?.parse().ok()
}

/// Benchmark directory from `DARP_DATA_DIR`, else `data/cordeau`.
pub fn data_dir() -> std::path::PathBuf {
    std::env::var_os(DATA_DIR_ENV).map(Into::into).unwrap_or_else(|| "data/cordeau".into())
}

/// Manifest entries for the named instances, looked up as `<dir>/<name>.txt`
/// with their golden objective. X variants fall back to the plain file.
pub fn manifest_for(dir: &Path, names: &[&str]) -> Vec<ManifestEntry> {
    names
        .iter()
        .map(|&name| ManifestEntry {
            path: dir.join(format!("{name}.txt")),
            expected_objective: golden(name),
            extend: None,
        })
        .collect()
}

/// All golden instances with at most `max_n` requests, plain ones first.
pub fn desk_manifest(dir: &Path, max_n: usize, with_x: bool) -> Vec<ManifestEntry> {
    let mut names: Vec<&str> = GOLDEN_PLAIN
        .iter()
        .map(|&(n, _)| n)
        .filter(|n| requests_of(n).is_some_and(|r| r <= max_n))
        .collect();
    if with_x {
        names.extend(GOLDEN_X.iter().map(|&(n, _)| n).filter(|n| requests_of(n).is_some_and(|r| r <= max_n)));
    }
    manifest_for(dir, &names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_tolerance() {
        assert!(golden_ok(294.349, 294.3));
        assert!(golden_ok(294.36, 294.4));
        assert!(!golden_ok(294.36, 294.3));
        assert!(golden_ok(344.9, 344.9));
        assert!(!golden_ok(345.0, 344.9 - 0.06));
    }

    #[test]
    fn names_parse() {
        assert_eq!(requests_of("a2-16"), Some(16));
        assert_eq!(requests_of("b3-24-X"), Some(24));
        assert_eq!(golden("b3-24-X"), Some(363.7));
        assert_eq!(golden("a6-72-X"), None);
    }

    #[test]
    fn desk_manifest_filters_by_size() {
        let m = desk_manifest(Path::new("d"), 16, true);
        let names: Vec<String> = m.iter().map(|e| e.name()).collect();
        assert_eq!(names, ["a2-16", "a4-16", "b2-16", "b4-16", "a2-16-X", "a4-16-X", "b2-16-X", "b4-16-X"]);
        assert_eq!(m[0].expected_objective, Some(294.3));
    }
}
