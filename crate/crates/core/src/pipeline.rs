//! Frame-level orchestration: detect nuclei on red frames, link them over
//! time, measure the tracked cells on green frames.
//!
//! The three stages are exposed separately so a caller can run detection and
//! measurement for different frames concurrently; only [`track_frames`] is
//! inherently sequential. [`run_frames`] chains them on one thread.

use alloc::vec::Vec;

use crate::autothresh::{select_threshold, AutoThresholdParams, ThresholdDecision};
use crate::error::{Error, Result};
use crate::imgproc::{binarize, BinaryMask, GrayImage};
use crate::regions::{filter_regions, find_regions, label_components, LabelMap, Region};
use crate::signal::{build_masks, measure, MeasureParams, SignalRecord};
use crate::tracker::{Track, Tracker};

/// How each frame's binarization threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    /// Full scan on every frame.
    #[default]
    Auto,
    /// Scan frame 0 only and reuse its threshold.
    FirstFrame,
    /// Bypass the scan.
    Fixed(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PipelineParams {
    /// Morphology, connectivity, area filter and knee settings.
    pub detection: AutoThresholdParams,
    pub threshold: ThresholdMode,
    pub measure: MeasureParams,
}

/// Detection output for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDetection {
    pub threshold: u8,
    /// Present when the threshold came from a scan of this frame.
    pub decision: Option<ThresholdDecision>,
    /// Regions surviving the area filter, in label order.
    pub regions: Vec<Region>,
}

/// Full segmentation state of one frame at a fixed threshold.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub threshold: u8,
    /// Binarized frame before morphology.
    pub raw: BinaryMask,
    /// After opening and closing.
    pub clean: BinaryMask,
    pub label_map: LabelMap,
    /// Regions of `clean` with area ≥ `min_area`.
    pub regions: Vec<Region>,
}

impl Segmentation {
    /// Every pixel that is nucleus in either the raw or the cleaned mask.
    pub fn foreground(&self) -> BinaryMask {
        self.raw
            .union(&self.clean)
            .expect("raw and clean masks share dimensions")
    }
}

pub fn segment(red: &GrayImage, threshold: u8, params: &AutoThresholdParams) -> Segmentation {
    let raw = binarize(red, threshold);
    let clean = params.morph.apply(&raw);
    let (label_map, regions) = label_components(&clean, params.connectivity);
    let regions = filter_regions(&regions, params.min_area);
    Segmentation {
        threshold,
        raw,
        clean,
        label_map,
        regions,
    }
}

/// Detects nuclei in one red frame. `fixed` overrides the threshold scan.
pub fn detect_frame(
    red: &GrayImage,
    params: &AutoThresholdParams,
    fixed: Option<u8>,
) -> Result<FrameDetection> {
    let (threshold, decision) = match fixed {
        Some(t) => (t, None),
        None => {
            let d = select_threshold(red, params)?;
            (d.selected, Some(d))
        }
    };
    let clean = params.morph.apply(&binarize(red, threshold));
    let regions = filter_regions(&find_regions(&clean, params.connectivity), params.min_area);
    Ok(FrameDetection {
        threshold,
        decision,
        regions,
    })
}

/// Threshold override for frame `index` given the detection of frame 0.
pub fn fixed_threshold_for(
    mode: ThresholdMode,
    index: usize,
    first: Option<&FrameDetection>,
) -> Option<u8> {
    match mode {
        ThresholdMode::Auto => None,
        ThresholdMode::Fixed(t) => Some(t),
        ThresholdMode::FirstFrame if index == 0 => None,
        ThresholdMode::FirstFrame => first.map(|d| d.threshold),
    }
}

/// Links detections frame by frame. Also returns the live-track count after
/// each frame.
pub fn track_frames(detections: &[FrameDetection]) -> Result<(Vec<Track>, Vec<usize>)> {
    let mut tracker = Tracker::new();
    let mut live = Vec::with_capacity(detections.len());
    for d in detections {
        tracker.push_frame(&d.regions)?;
        live.push(tracker.live_count());
    }
    Ok((tracker.into_tracks(), live))
}

/// A tracked cell that could not be measured in some frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedMeasurement {
    pub track_id: u32,
    pub frame_index: usize,
    pub reason: Error,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameMeasurements {
    pub records: Vec<SignalRecord>,
    pub skipped: Vec<SkippedMeasurement>,
}

/// Measures every track alive in `frame_index`.
///
/// The segmentation is rebuilt from the stored threshold, which reproduces the
/// labels the tracks refer to.
pub fn measure_frame(
    red: &GrayImage,
    green: &GrayImage,
    detection: &FrameDetection,
    tracks: &[Track],
    frame_index: usize,
    params: &PipelineParams,
) -> Result<FrameMeasurements> {
    if red.dimensions() != green.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: red.dimensions(),
            found: green.dimensions(),
        });
    }
    let seg = segment(red, detection.threshold, &params.detection);
    let foreground = seg.foreground();
    let mut out = FrameMeasurements::default();
    for track in tracks {
        let Some(obs) = track.at(frame_index) else {
            continue;
        };
        let result = build_masks(&seg.label_map, &obs.region, &params.measure, &foreground)
            .and_then(|masks| measure(green, &masks));
        match result {
            Ok(m) => out
                .records
                .push(SignalRecord::new(track.id, frame_index, m)),
            Err(reason @ Error::EmptyMask(_)) => out.skipped.push(SkippedMeasurement {
                track_id: track.id,
                frame_index,
                reason,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub detections: Vec<FrameDetection>,
    pub tracks: Vec<Track>,
    /// Live tracks after each frame.
    pub live_per_frame: Vec<usize>,
    /// Sorted by `(frame_index, track_id)`.
    pub records: Vec<SignalRecord>,
    pub skipped: Vec<SkippedMeasurement>,
}

impl RunOutput {
    /// Tracks still live at the last frame.
    pub fn tracked_to_final(&self) -> usize {
        self.live_per_frame.last().copied().unwrap_or(0)
    }
}

/// Checks that both channels have the same, non-zero, frame count and one
/// common frame size.
pub fn validate_sequences(red: &[GrayImage], green: &[GrayImage]) -> Result<()> {
    let first = red.first().ok_or(Error::EmptyInput("red sequence"))?;
    if green.len() != red.len() {
        return Err(Error::InvalidParameter(
            "red and green sequences differ in length",
        ));
    }
    for img in red.iter().chain(green) {
        if img.dimensions() != first.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: first.dimensions(),
                found: img.dimensions(),
            });
        }
    }
    Ok(())
}

/// Detection of the whole sequence on the calling thread.
pub fn detect_sequence(red: &[GrayImage], params: &PipelineParams) -> Result<Vec<FrameDetection>> {
    let mut detections: Vec<FrameDetection> = Vec::with_capacity(red.len());
    for (i, frame) in red.iter().enumerate() {
        let fixed = fixed_threshold_for(params.threshold, i, detections.first());
        detections.push(detect_frame(frame, &params.detection, fixed)?);
    }
    Ok(detections)
}

/// Detect, track and measure on the calling thread.
pub fn run_frames(
    red: &[GrayImage],
    green: &[GrayImage],
    params: &PipelineParams,
) -> Result<RunOutput> {
    validate_sequences(red, green)?;
    let detections = detect_sequence(red, params)?;
    let (tracks, live_per_frame) = track_frames(&detections)?;
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (i, d) in detections.iter().enumerate() {
        let m = measure_frame(&red[i], &green[i], d, &tracks, i, params)?;
        records.extend(m.records);
        skipped.extend(m.skipped);
    }
    records.sort_by_key(|r| (r.frame_index, r.track_id));
    Ok(RunOutput {
        detections,
        tracks,
        live_per_frame,
        records,
        skipped,
    })
}
