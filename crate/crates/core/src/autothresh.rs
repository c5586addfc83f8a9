//! Per-frame threshold selection.
//!
//! Every threshold from 255 down to 0 is applied to the frame. For each one we
//! count connected components before and after noise-removal morphology; the
//! difference is the number of components the morphology removed ("noise").
//! Two candidate thresholds come out of the scan:
//!
//! * the knee: the last threshold before the removed-noise count first jumps
//!   sharply while walking downwards, and
//! * the threshold with the most surviving nuclei.
//!
//! The selected threshold is the floor of their mean.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::imgproc::{binarize, GrayImage, MorphParams};
use crate::regions::{count_components, Connectivity};

/// Component counts at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdScanRow {
    pub threshold: u8,
    /// Components before morphology, no area filter.
    pub raw_components: usize,
    /// Components after morphology with area ≥ `min_area`.
    pub clean_components: usize,
    /// `max(raw - clean, 0)`
    pub noise_count: usize,
}

/// Outcome of [`select_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdDecision {
    pub knee_threshold: u8,
    pub max_nuclei_threshold: u8,
    pub selected: u8,
}

impl ThresholdDecision {
    pub fn from_candidates(knee_threshold: u8, max_nuclei_threshold: u8) -> Self {
        let selected = ((knee_threshold as u16 + max_nuclei_threshold as u16) / 2) as u8;
        Self {
            knee_threshold,
            max_nuclei_threshold,
            selected,
        }
    }
}

/// What counts as a sharp increase of removed noise between adjacent thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KneeParams {
    /// The increase must be at least this multiple of the previous count (floored at 1).
    pub jump_factor: f64,
    /// The increase must be at least this many components.
    pub min_jump: usize,
}

impl Default for KneeParams {
    fn default() -> Self {
        Self {
            jump_factor: 2.0,
            min_jump: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoThresholdParams {
    pub morph: MorphParams,
    pub connectivity: Connectivity,
    pub min_area: usize,
    pub knee: KneeParams,
}

impl Default for AutoThresholdParams {
    fn default() -> Self {
        Self {
            morph: MorphParams::default(),
            connectivity: Connectivity::Eight,
            min_area: 20,
            knee: KneeParams::default(),
        }
    }
}

/// One row per threshold, 255 first.
///
/// Thresholds that fall between two adjacent intensities present in the image
/// produce the same mask, so each distinct mask is evaluated once and its
/// counts are reused for the whole interval.
pub fn scan_thresholds(
    img: &GrayImage,
    morph: &MorphParams,
    connectivity: Connectivity,
    min_area: usize,
) -> Vec<ThresholdScanRow> {
    let mut present = [false; 256];
    for &v in img.data() {
        present[v as usize] = true;
    }

    let mut rows = Vec::with_capacity(256);
    // Counts for the mask of the smallest present intensity ≥ current threshold.
    let mut cached: Option<(usize, usize)> = None;
    for t in (0..=255u8).rev() {
        if present[t as usize] {
            let mask = binarize(img, t);
            let raw = count_components(&mask, connectivity, 0);
            let clean = count_components(&morph.apply(&mask), connectivity, min_area);
            cached = Some((raw, clean));
        }
        let (raw, clean) = cached.unwrap_or((0, 0));
        rows.push(ThresholdScanRow {
            threshold: t,
            raw_components: raw,
            clean_components: clean,
            noise_count: raw.saturating_sub(clean),
        });
    }
    rows
}

/// Threshold with the most clean components; ties go to the higher threshold.
pub fn find_max_nuclei_threshold(rows: &[ThresholdScanRow]) -> Result<u8> {
    rows.iter()
        .max_by(|a, b| {
            a.clean_components
                .cmp(&b.clean_components)
                .then(a.threshold.cmp(&b.threshold))
        })
        .map(|r| r.threshold)
        .ok_or(Error::EmptyInput("threshold scan"))
}

/// Threshold just before the first sharp rise of `noise_count`, walking the
/// rows in the given (descending-threshold) order.
///
/// Falls back to [`find_max_nuclei_threshold`] when no rise qualifies.
pub fn find_noise_knee(rows: &[ThresholdScanRow], params: &KneeParams) -> Result<u8> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("threshold scan"));
    }
    if params.jump_factor.is_nan() || params.jump_factor <= 1.0 {
        return Err(Error::InvalidParameter("jump_factor must exceed 1"));
    }
    if params.min_jump < 1 {
        return Err(Error::InvalidParameter("min_jump must be at least 1"));
    }
    for pair in rows.windows(2) {
        let (prev, row) = (&pair[0], &pair[1]);
        let Some(rise) = row.noise_count.checked_sub(prev.noise_count) else {
            continue;
        };
        let relative = params.jump_factor * prev.noise_count.max(1) as f64;
        if rise >= params.min_jump && rise as f64 >= relative {
            return Ok(prev.threshold);
        }
    }
    find_max_nuclei_threshold(rows)
}

/// Decision derived from an existing scan.
pub fn decide(rows: &[ThresholdScanRow], knee: &KneeParams) -> Result<ThresholdDecision> {
    let knee_threshold = find_noise_knee(rows, knee)?;
    let max_nuclei_threshold = find_max_nuclei_threshold(rows)?;
    Ok(ThresholdDecision::from_candidates(
        knee_threshold,
        max_nuclei_threshold,
    ))
}

/// Scans the frame and picks its binarization threshold.
///
/// Thresholds at or below the frame minimum are scanned but never selected,
/// unless the frame is saturated at 255.
pub fn select_threshold(
    img: &GrayImage,
    params: &AutoThresholdParams,
) -> Result<ThresholdDecision> {
    scan_and_select(img, params).map(|(_, d)| d)
}

/// Like [`select_threshold`] but also hands back the scan for diagnostics.
pub fn scan_and_select(
    img: &GrayImage,
    params: &AutoThresholdParams,
) -> Result<(Vec<ThresholdScanRow>, ThresholdDecision)> {
    let rows = scan_thresholds(img, &params.morph, params.connectivity, params.min_area);
    // At or below the darkest pixel every pixel is foreground, whatever the
    // content, so those rows take no part in the choice.
    let floor = img.data().iter().copied().min().unwrap_or(0);
    let informative = rows.iter().take_while(|r| r.threshold > floor).count();
    let candidates = if informative == 0 {
        &rows[..]
    } else {
        &rows[..informative]
    };
    let decision = decide(candidates, &params.knee)?;
    Ok((rows, decision))
}
