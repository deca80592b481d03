//! Dataset manifests: a tab-separated table with header
//! `path source measure shift`, one PBM window per row. Paths are relative
//! to the manifest's directory.

use std::path::{Path, PathBuf};

use pianorbm::pianoroll::{read_pbm, WindowSource};
use pianorbm::{PianoRoll, RollDataset};

use crate::error::{CliError, CliResult};

pub const HEADER: &str = "path\tsource\tmeasure\tshift";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub source: WindowSource,
}

pub fn format_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            e.path.display(),
            e.source.source,
            e.source.measure,
            e.source.shift
        ));
    }
    out
}

pub fn parse_manifest(text: &str) -> CliResult<Vec<ManifestEntry>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim_end) != Some(HEADER) {
        return Err(CliError::Data(format!("manifest header must be {HEADER:?}")));
    }
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = || CliError::Data(format!("manifest line {}: {line:?}", i + 2));
        let [path, source, measure, shift] = fields[..] else {
            return Err(bad());
        };
        entries.push(ManifestEntry {
            path: PathBuf::from(path),
            source: WindowSource {
                source: source.to_string(),
                measure: measure.parse().map_err(|_| bad())?,
                shift: shift.parse().map_err(|_| bad())?,
            },
        });
    }
    Ok(entries)
}

pub fn read_window(path: &Path) -> CliResult<PianoRoll> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let roll = read_pbm(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    roll.check_window()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(roll)
}

/// Reads the manifest and every window it lists.
pub fn load_dataset(manifest: &Path) -> CliResult<RollDataset> {
    let text = std::fs::read_to_string(manifest).map_err(|e| CliError::io(manifest, e))?;
    let entries = parse_manifest(&text).map_err(|e| e.context(manifest.display()))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut dataset = RollDataset::new();
    for entry in entries {
        let window = read_window(&base.join(&entry.path))?;
        dataset.push(window, entry.source)?;
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let entries = vec![
            ManifestEntry {
                path: PathBuf::from("windows/000000.pbm"),
                source: WindowSource {
                    source: "bach.mid".into(),
                    measure: 0,
                    shift: 0,
                },
            },
            ManifestEntry {
                path: PathBuf::from("windows/000001.pbm"),
                source: WindowSource {
                    source: "bach.mid".into(),
                    measure: 2,
                    shift: -5,
                },
            },
        ];
        let text = format_manifest(&entries);
        assert!(text.starts_with("path\tsource\tmeasure\tshift\n"));
        assert_eq!(parse_manifest(&text).unwrap(), entries);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_manifest("").is_err());
        assert!(parse_manifest("a\tb\n").is_err());
        assert!(parse_manifest(&format!("{HEADER}\nx\ty\tz\t1\n")).is_err());
        assert!(parse_manifest(&format!("{HEADER}\nx\ty\t1\n")).is_err());
        assert_eq!(parse_manifest(&format!("{HEADER}\n\n")).unwrap(), vec![]);
    }
}
