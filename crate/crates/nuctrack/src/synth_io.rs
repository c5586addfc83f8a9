//! On-disk layout of a synthetic sequence:
//!
//! ```text
//! <out>/red/frame_0000.png
//! <out>/green/frame_0000.png
//! <out>/ground_truth.json
//! ```

use std::fs;
use std::path::Path;

use nuctrack_core::synth::{GroundTruth, SynthSequence};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, PipelineError, Result};
use crate::ingest::write_gray_png;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobRecord {
    pub id: u32,
    pub radius: f64,
    pub nucleus_intensity: u8,
    pub green_nucleus_level: u8,
    pub green_cytoplasm_level: u8,
    pub signal_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobPosition {
    pub blob_id: u32,
    /// Disc center.
    pub center: [f64; 2],
    /// Mean of the rasterized disc pixels.
    pub centroid: [f64; 2],
    pub area: usize,
    /// `[min_x, min_y, max_x, max_y]`, inclusive.
    pub bbox: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame: usize,
    pub blobs: Vec<BlobPosition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub blobs: Vec<BlobRecord>,
    pub frames: Vec<FrameRecord>,
}

impl From<&GroundTruth> for TruthFile {
    fn from(t: &GroundTruth) -> Self {
        Self {
            width: t.width,
            height: t.height,
            frame_count: t.frames.len(),
            blobs: t
                .blobs
                .iter()
                .map(|b| BlobRecord {
                    id: b.id,
                    radius: b.radius,
                    nucleus_intensity: b.nucleus_intensity,
                    green_nucleus_level: b.green_nucleus_level,
                    green_cytoplasm_level: b.green_cytoplasm_level,
                    signal_ratio: b.signal_ratio,
                })
                .collect(),
            frames: t
                .frames
                .iter()
                .enumerate()
                .map(|(frame, obs)| FrameRecord {
                    frame,
                    blobs: obs
                        .iter()
                        .map(|o| BlobPosition {
                            blob_id: o.blob_id,
                            center: [o.center.x, o.center.y],
                            centroid: [o.centroid.x, o.centroid.y],
                            area: o.area,
                            bbox: [o.bbox.min_x, o.bbox.min_y, o.bbox.max_x, o.bbox.max_y],
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn frame_name(index: usize) -> String {
    format!("frame_{index:04}.png")
}

/// Writes both channels and the ground truth under `out`.
pub fn write_sequence(out: &Path, seq: &SynthSequence) -> Result<()> {
    for (sub, frames) in [("red", &seq.red), ("green", &seq.green)] {
        let dir = out.join(sub);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        frames
            .par_iter()
            .enumerate()
            .try_for_each(|(i, f)| write_gray_png(f, &dir.join(frame_name(i))))?;
    }
    let path = out.join("ground_truth.json");
    let mut json = serde_json::to_string_pretty(&TruthFile::from(&seq.truth))
        .map_err(|e| PipelineError::Invalid(format!("ground truth: {e}")))?;
    json.push('\n');
    fs::write(&path, json).map_err(io_err(&path))
}

pub fn read_truth(path: &Path) -> Result<TruthFile> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| PipelineError::Config {
        path: path.to_path_buf(),
        source,
    })
}
