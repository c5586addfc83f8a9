//! Nucleus and cytoplasm masks per tracked cell and the nucleus-minus-cytoplasm
//! signal on the green channel.
//!
//! The quantity is historically called the "signal ratio" even though it is a
//! difference of means. The name is kept in the output schema.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::imgproc::{dilate_n, BinaryMask, GrayImage, StructuringElement};
use crate::regions::{BoundingBox, LabelMap, Region};

/// Masks for one cell, cropped to `crop`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMasks {
    /// Frame coordinates of the crop (inclusive).
    pub crop: BoundingBox,
    pub frame_width: usize,
    pub frame_height: usize,
    pub nucleus: BinaryMask,
    pub cytoplasm: BinaryMask,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalMeasurement {
    pub nucleus_mean: f64,
    pub cytoplasm_mean: f64,
    /// `nucleus_mean - cytoplasm_mean`
    pub signal_ratio: f64,
}

/// One tracked cell measured in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalRecord {
    pub track_id: u32,
    pub frame_index: usize,
    pub nucleus_mean: f64,
    pub cytoplasm_mean: f64,
    pub signal_ratio: f64,
}

impl SignalRecord {
    pub fn new(track_id: u32, frame_index: usize, m: SignalMeasurement) -> Self {
        Self {
            track_id,
            frame_index,
            nucleus_mean: m.nucleus_mean,
            cytoplasm_mean: m.cytoplasm_mean,
            signal_ratio: m.signal_ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureParams {
    pub dilation_iters: usize,
    /// Crop margin around the nucleus bounding box; must be ≥ `dilation_iters`.
    pub pad: usize,
    pub se: StructuringElement,
}

impl MeasureParams {
    pub fn with_dilation(dilation_iters: usize) -> Self {
        Self {
            dilation_iters,
            pad: dilation_iters + 2,
            se: StructuringElement::Square3x3,
        }
    }
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self::with_dilation(5)
    }
}

/// Builds the nucleus mask of `region` and the surrounding cytoplasm ring.
///
/// The ring is the dilated nucleus minus the nucleus itself, minus every pixel
/// of `global_foreground` so that neighboring nuclei never leak into the
/// cytoplasm estimate.
pub fn build_masks(
    label_map: &LabelMap,
    region: &Region,
    params: &MeasureParams,
    global_foreground: &BinaryMask,
) -> Result<CellMasks> {
    if params.dilation_iters < 1 {
        return Err(Error::InvalidParameter("dilation_iters must be at least 1"));
    }
    if params.pad < params.dilation_iters {
        return Err(Error::InvalidParameter(
            "pad must be at least dilation_iters",
        ));
    }
    let (fw, fh) = (label_map.width(), label_map.height());
    if global_foreground.dimensions() != (fw, fh) {
        return Err(Error::DimensionMismatch {
            expected: (fw, fh),
            found: global_foreground.dimensions(),
        });
    }
    let b = &region.bbox;
    if b.max_x >= fw || b.max_y >= fh {
        return Err(Error::MissingLabel(region.label));
    }

    let crop = region.bbox.expanded(params.pad, fw, fh);
    let (cw, ch) = (crop.width(), crop.height());
    let nucleus = BinaryMask::from_fn(cw, ch, |x, y| {
        label_map.get(crop.min_x + x, crop.min_y + y) == region.label
    })?;
    if nucleus.is_empty() {
        return Err(Error::MissingLabel(region.label));
    }
    let grown = dilate_n(&nucleus, params.se, params.dilation_iters);
    let cytoplasm = BinaryMask::from_fn(cw, ch, |x, y| {
        grown.get(x, y)
            && !nucleus.get(x, y)
            && !global_foreground.get(crop.min_x + x, crop.min_y + y)
    })?;
    Ok(CellMasks {
        crop,
        frame_width: fw,
        frame_height: fh,
        nucleus,
        cytoplasm,
    })
}

fn masked_mean(green: &GrayImage, crop: &BoundingBox, mask: &BinaryMask) -> Option<f64> {
    let mut sum = 0u64;
    let mut n = 0u64;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                sum += green.get(crop.min_x + x, crop.min_y + y) as u64;
                n += 1;
            }
        }
    }
    (n > 0).then(|| sum as f64 / n as f64)
}

/// Mean green intensity under each mask and their difference.
pub fn measure(green: &GrayImage, masks: &CellMasks) -> Result<SignalMeasurement> {
    if green.dimensions() != (masks.frame_width, masks.frame_height) {
        return Err(Error::DimensionMismatch {
            expected: (masks.frame_width, masks.frame_height),
            found: green.dimensions(),
        });
    }
    let nucleus_mean =
        masked_mean(green, &masks.crop, &masks.nucleus).ok_or(Error::EmptyMask("nucleus"))?;
    let cytoplasm_mean =
        masked_mean(green, &masks.crop, &masks.cytoplasm).ok_or(Error::EmptyMask("cytoplasm"))?;
    Ok(SignalMeasurement {
        nucleus_mean,
        cytoplasm_mean,
        signal_ratio: nucleus_mean - cytoplasm_mean,
    })
}

/// Pixels of `mask` translated back to frame coordinates.
pub fn frame_pixels(masks: &CellMasks, mask: &BinaryMask) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                out.push((masks.crop.min_x + x, masks.crop.min_y + y));
            }
        }
    }
    out
}
