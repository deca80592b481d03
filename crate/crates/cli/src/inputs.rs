//! Loads windows for the model from PBM piano rolls, PGM images or IDX
//! image files, chosen by the file's magic bytes.

use std::path::Path;

use pianorbm::pianoroll::{read_pbm, resize_binary};
use pianorbm::score_io::{parse_idx, read_pgm, GrayImage};
use pianorbm::PianoRoll;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Pbm,
    Pgm,
    Idx,
}

pub fn detect(bytes: &[u8]) -> Option<InputKind> {
    match bytes {
        [b'P', b'4', ..] => Some(InputKind::Pbm),
        [b'P', b'5', ..] => Some(InputKind::Pgm),
        [0, 0, 0x08, 0x03, ..] => Some(InputKind::Idx),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct LabeledWindow {
    pub label: String,
    pub window: PianoRoll,
}

fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Every window in `path`. IDX files contribute their first `idx_limit`
/// images, labelled `name#index`.
pub fn load_windows(path: &Path, idx_limit: usize, threshold: u8) -> CliResult<Vec<LabeledWindow>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let label = file_label(path);
    let data_err = |e: pianorbm::Error| CliError::Data(format!("{}: {e}", path.display()));
    let resized = |img: &GrayImage| resize_binary(img, threshold).map_err(data_err);
    match detect(&bytes) {
        Some(InputKind::Pbm) => {
            let window = read_pbm(&bytes).map_err(data_err)?;
            window.check_window().map_err(data_err)?;
            Ok(vec![LabeledWindow { label, window }])
        }
        Some(InputKind::Pgm) => {
            let image = read_pgm(&bytes).map_err(data_err)?;
            Ok(vec![LabeledWindow {
                label,
                window: resized(&image)?,
            }])
        }
        Some(InputKind::Idx) => parse_idx(&bytes)
            .map_err(data_err)?
            .iter()
            .take(idx_limit)
            .enumerate()
            .map(|(i, img)| {
                Ok(LabeledWindow {
                    label: format!("{label}#{i}"),
                    window: resized(img)?,
                })
            })
            .collect(),
        None => Err(CliError::Data(format!(
            "{}: not a PBM (P4), PGM (P5) or IDX image file",
            path.display()
        ))),
    }
}
