//! Run manifests: a sidecar JSON written next to every output so a
//! result can be traced back to its inputs and settings.
//!
//! The manifest records what was run, on which files, with which
//! configuration, and how long each stage took. Re-running the
//! recorded command on the recorded inputs reproduces the outputs
//! byte-identically (timings vary, outputs do not).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::selection::SelectionCriterion;

/// Everything worth knowing about one CLI invocation.
#[derive(Serialize, Clone, Debug)]
pub struct RunManifest {
    /// Always "fcatax"; distinguishes manifests from other JSON.
    pub tool: String,
    pub version: String,
    /// Subcommand that produced the outputs.
    pub command: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Snapshot of the effective configuration, shaped per command.
    pub config: serde_json::Value,
    /// Wall time per stage, milliseconds.
    pub timings_ms: BTreeMap<String, u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concept_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<SelectionCriterion>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            tool: "fcatax".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: serde_json::Value::Null,
            timings_ms: BTreeMap::new(),
            concept_count: None,
            criterion: None,
        }
    }

    /// Times `f` and records the wall time under `stage`.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings_ms
            .insert(stage.to_string(), start.elapsed().as_millis());
        out
    }

    /// Writes the manifest next to `output` (as
    /// `<output>.manifest.json`) and records the output path.
    pub fn write_for(&mut self, output: &Path) -> Result<()> {
        let output_name = output.display().to_string();
        if !self.outputs.contains(&output_name) {
            self.outputs.push(output_name);
        }
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        fs::write(manifest_path(output), json)?;
        Ok(())
    }
}

/// The sidecar path for an output file: the full file name plus a
/// `.manifest.json` suffix, so `toy.cxt` gets `toy.cxt.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_path_appends_to_the_full_name() {
        assert_eq!(
            manifest_path(Path::new("/tmp/out/toy.cxt")),
            Path::new("/tmp/out/toy.cxt.manifest.json")
        );
        assert_eq!(
            manifest_path(Path::new("lattice.json")),
            Path::new("lattice.json.manifest.json")
        );
    }

    #[test]
    fn manifests_round_trip_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.json");
        let mut m = RunManifest::new("lattice");
        m.inputs.push("toy.cxt".into());
        m.concept_count = Some(4);
        let answer = m.time("enumerate", || 6 * 7);
        assert_eq!(answer, 42);
        m.write_for(&out).unwrap();
        let text = fs::read_to_string(manifest_path(&out)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["tool"], "fcatax");
        assert_eq!(v["command"], "lattice");
        assert_eq!(v["concept_count"], 4);
        assert_eq!(v["outputs"][0], out.display().to_string());
        assert!(v["timings_ms"]["enumerate"].is_number());
        assert!(v.get("criterion").is_none());
    }
}
