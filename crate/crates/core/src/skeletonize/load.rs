use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{skeletonize, BinarizeConfig, Frame};
use crate::coords;
use crate::error::{Error, Result};
use crate::pixel::PixelSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    #[default]
    Png,
    Pgm,
    /// Pre-skeletonized coordinate files; binarization and thinning are skipped.
    Coords,
}

impl InputFormat {
    fn extension(self) -> &'static str {
        match self {
            InputFormat::Png => "png",
            InputFormat::Pgm => "pgm",
            InputFormat::Coords => "txt",
        }
    }
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "png" => Ok(InputFormat::Png),
            "pgm" => Ok(InputFormat::Pgm),
            "coords" => Ok(InputFormat::Coords),
            other => Err(Error::Parameter(format!(
                "format must be png, pgm or coords, got {other:?}"
            ))),
        }
    }
}

#[derive(Deserialize)]
struct FrameManifest {
    frames: Vec<PathBuf>,
}

/// Decodes an 8-bit grayscale PNG or binary PGM. Colour images are
/// converted to luma.
pub fn load_frame(path: &Path, index: usize) -> Result<Frame> {
    let decode_err = |message: String| Error::Decode {
        path: path.to_path_buf(),
        message,
    };
    let img = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| decode_err(e.to_string()))?
        .into_luma8();
    let (w, h) = img.dimensions();
    Frame::new(w, h, img.into_raw(), index)
}

/// Resolves `source` to an ordered frame list: either a JSON manifest
/// `{"frames": [...]}` (paths relative to the manifest) or a directory whose
/// files with the format's extension are taken in lexicographic order.
fn frame_paths(source: &Path, format: InputFormat) -> Result<Vec<PathBuf>> {
    if source.is_file() {
        let text = std::fs::read_to_string(source).map_err(|e| Error::io(source, e))?;
        let manifest: FrameManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: source.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let base = source.parent().unwrap_or(Path::new("."));
        return Ok(manifest.frames.iter().map(|p| base.join(p)).collect());
    }
    let entries = std::fs::read_dir(source).map_err(|e| Error::io(source, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(source, e))?.path();
        let matches = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case(format.extension()));
        if matches && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Loads a whole sequence, one [`PixelSet`] per frame in time order.
///
/// All frames must share the first frame's dimensions.
pub fn load_sequence(
    source: &Path,
    format: InputFormat,
    config: &BinarizeConfig,
) -> Result<Vec<PixelSet>> {
    let paths = frame_paths(source, format)?;
    if paths.is_empty() {
        return Err(Error::Input(format!(
            "no .{} frames found in {}",
            format.extension(),
            source.display()
        )));
    }
    let sets: Vec<(PathBuf, PixelSet)> = paths
        .into_par_iter()
        .enumerate()
        .map(|(i, path)| {
            let set = match format {
                InputFormat::Coords => coords::read(&path, i)?,
                InputFormat::Png | InputFormat::Pgm => skeletonize(&load_frame(&path, i)?, config),
            };
            Ok((path, set))
        })
        .collect::<Result<_>>()?;
    let (width, height) = (sets[0].1.width(), sets[0].1.height());
    for (path, set) in &sets {
        if set.width() != width || set.height() != height {
            return Err(Error::DimensionMismatch {
                path: path.clone(),
                width,
                height,
                found_width: set.width(),
                found_height: set.height(),
            });
        }
    }
    Ok(sets.into_iter().map(|(_, s)| s).collect())
}
