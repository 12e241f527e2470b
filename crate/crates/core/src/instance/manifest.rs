use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{load_instance, DarpInstance};
use crate::error::Result;

/// Minutes added to the stated windows of an `-X` variant.
pub const X_VARIANT_DELTA: f64 = 15.0;

/// One entry of an instance-set manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    #[serde(default)]
    pub expected_objective: Option<f64>,
    /// Window extension in minutes. When absent, a path whose stem ends in
    /// `-X` and does not exist on disk is loaded from the base file and
    /// extended by 15 minutes.
    #[serde(default)]
    pub extend: Option<f64>,
}

impl ManifestEntry {
    pub fn name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }

    /// Loads and derives the instance this entry describes.
    pub fn load(&self) -> Result<DarpInstance> {
        if self.path.exists() {
            let inst = load_instance(&self.path)?;
            return match self.extend {
                Some(delta) => inst.extend_windows_x(delta),
                None => Ok(inst),
            };
        }
        let name = self.name();
        if let Some(base) = name.strip_suffix("-X") {
            let ext = self.path.extension().map(|e| e.to_string_lossy().into_owned());
            let mut base_path = self.path.with_file_name(base);
            if let Some(ext) = ext {
                base_path.set_extension(ext);
            }
            if base_path.exists() {
                let inst = load_instance(&base_path)?;
                return inst.extend_windows_x(self.extend.unwrap_or(X_VARIANT_DELTA));
            }
        }
        Err(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("instance file {} not found", self.path.display()),
        )
        .into())
    }
}

/// Reads a JSON manifest. Relative paths are resolved against the
/// manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path)?;
    let mut entries: Vec<ManifestEntry> = serde_json::from_str(&text)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    for e in &mut entries {
        if e.path.is_relative() {
            e.path = dir.join(&e.path);
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_entries() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(
            &p,
            r#"[{"path": "a2-16.txt", "expected_objective": 294.3}, {"path": "/abs/b2-16-X.txt"}]"#,
        )
        .unwrap();
        let m = load_manifest(&p).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].path, dir.path().join("a2-16.txt"));
        assert_eq!(m[0].expected_objective, Some(294.3));
        assert_eq!(m[1].name(), "b2-16-X");
        assert_eq!(m[1].expected_objective, None);
    }

    #[test]
    fn empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(&p, "[]").unwrap();
        assert!(load_manifest(&p).unwrap().is_empty());
    }
}
