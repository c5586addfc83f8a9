//! Multi-threaded execution of the pipeline and the opening/closing sweep.
//!
//! Detection and measurement fan out over frames; tracking runs on the
//! calling thread. Results are collected in frame order, so the output does
//! not depend on the number of workers.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nuctrack_core::autothresh::scan_thresholds;
use nuctrack_core::imgproc::{GrayImage, MorphParams};
use nuctrack_core::pipeline::{
    detect_frame, fixed_threshold_for, measure_frame, track_frames, validate_sequences,
    FrameDetection, PipelineParams, RunOutput,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{io_err, PipelineError, Result};
use crate::ingest::ingest_sequence;
use crate::overlay::write_overlay;
use crate::report::{write_scan_csv, write_tracks_csv};

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| PipelineError::Invalid(format!("thread pool: {e}")))
}

fn check_pair(red: &[GrayImage], green: &[GrayImage]) -> Result<()> {
    if red.len() != green.len() {
        return Err(PipelineError::LengthMismatch {
            red: red.len(),
            green: green.len(),
        });
    }
    if let (Some(r), Some(g)) = (red.first(), green.first()) {
        if r.dimensions() != g.dimensions() {
            return Err(PipelineError::ChannelSize {
                red: r.dimensions(),
                green: g.dimensions(),
            });
        }
    }
    validate_sequences(red, green)?;
    Ok(())
}

/// Detection for every frame, in frame order.
pub fn detect_all(red: &[GrayImage], params: &PipelineParams) -> Result<Vec<FrameDetection>> {
    let Some(first_frame) = red.first() else {
        return Ok(Vec::new());
    };
    let first = detect_frame(
        first_frame,
        &params.detection,
        fixed_threshold_for(params.threshold, 0, None),
    )?;
    let rest: Vec<FrameDetection> = red[1..]
        .par_iter()
        .enumerate()
        .map(|(i, frame)| {
            let fixed = fixed_threshold_for(params.threshold, i + 1, Some(&first));
            detect_frame(frame, &params.detection, fixed)
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut all = Vec::with_capacity(red.len());
    all.push(first);
    all.extend(rest);
    Ok(all)
}

/// Detect, track and measure with `jobs` worker threads.
pub fn run_sequences(
    red: &[GrayImage],
    green: &[GrayImage],
    params: &PipelineParams,
    jobs: Option<usize>,
) -> Result<RunOutput> {
    check_pair(red, green)?;
    pool(jobs)?.install(|| {
        let detections = detect_all(red, params)?;
        let (tracks, live_per_frame) = track_frames(&detections)?;
        let per_frame: Vec<_> = detections
            .par_iter()
            .enumerate()
            .map(|(i, d)| measure_frame(&red[i], &green[i], d, &tracks, i, params))
            .collect::<std::result::Result<_, _>>()?;
        let mut records = Vec::new();
        let mut skipped = Vec::new();
        for m in per_frame {
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
    })
}

/// Number of tracks that reach the last frame; measurement is skipped.
pub fn count_tracked_to_final(red: &[GrayImage], params: &PipelineParams) -> Result<usize> {
    let detections = detect_all(red, params)?;
    let (_, live) = track_frames(&detections)?;
    Ok(live.last().copied().unwrap_or(0))
}

/// Tracked-to-final counts over an opening × closing grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepResult {
    pub max_opening: usize,
    pub max_closing: usize,
    /// `(opening, closing) -> tracks live at the final frame`
    pub grid: BTreeMap<(usize, usize), usize>,
}

impl SweepResult {
    pub fn get(&self, opening: usize, closing: usize) -> Option<usize> {
        self.grid.get(&(opening, closing)).copied()
    }
}

/// Runs detection and tracking once per `(opening, closing)` pair.
pub fn sweep(
    red: &[GrayImage],
    params: &PipelineParams,
    max_opening: usize,
    max_closing: usize,
    jobs: Option<usize>,
) -> Result<SweepResult> {
    if red.is_empty() {
        return Err(nuctrack_core::Error::EmptyInput("red sequence").into());
    }
    let cells: Vec<(usize, usize)> = (0..=max_closing)
        .flat_map(|c| (0..=max_opening).map(move |o| (o, c)))
        .collect();
    let counts: Vec<usize> = pool(jobs)?.install(|| {
        cells
            .par_iter()
            .map(|&(o, c)| {
                let mut p = *params;
                p.detection.morph = MorphParams {
                    opening: o,
                    closing: c,
                    ..params.detection.morph
                };
                let n = count_tracked_to_final(red, &p)?;
                log::info!("sweep opening={o} closing={c}: {n} tracked to final frame");
                Ok(n)
            })
            .collect::<Result<_>>()
    })?;
    Ok(SweepResult {
        max_opening,
        max_closing,
        grid: cells.into_iter().zip(counts).collect(),
    })
}

/// What `analyze` reports back after writing its files.
#[derive(Debug)]
pub struct AnalyzeSummary {
    pub output: RunOutput,
    pub frames: usize,
}

/// The whole `analyze` command: read, process, write.
pub fn analyze(config: &RunConfig) -> Result<AnalyzeSummary> {
    let (red_dir, green_dir) = config.require_inputs()?;
    let out_path = config
        .out
        .as_deref()
        .ok_or_else(|| PipelineError::Invalid("--out is required".into()))?;
    let params = config.pipeline_params()?;
    let red = ingest_sequence(red_dir, config.red_channel.into())?;
    let green = ingest_sequence(green_dir, config.green_channel.into())?;
    let output = run_sequences(&red, &green, &params, config.jobs)?;

    for (i, d) in output.detections.iter().enumerate() {
        log::info!(
            "frame {i}: threshold {} ({} regions, {} live tracks)",
            d.threshold,
            d.regions.len(),
            output.live_per_frame[i]
        );
    }
    for s in &output.skipped {
        log::warn!(
            "track {} frame {}: measurement skipped ({})",
            s.track_id,
            s.frame_index,
            s.reason
        );
    }
    if !output.skipped.is_empty() {
        log::warn!("{} measurements skipped", output.skipped.len());
    }

    write_tracks_csv(out_path, &output.tracks, &output.records)?;

    if let Some(dir) = &config.scan_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let m = &params.detection;
        for (i, frame) in red.iter().enumerate() {
            let rows = scan_thresholds(frame, &m.morph, m.connectivity, m.min_area);
            write_scan_csv(&dir.join(format!("scan_{i:04}.csv")), &rows)?;
        }
    }
    if let Some(dir) = &config.overlay_dir {
        write_overlays(dir, &red, &output)?;
    }
    Ok(AnalyzeSummary {
        frames: red.len(),
        output,
    })
}

pub fn write_overlays(dir: &Path, red: &[GrayImage], output: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    red.par_iter().enumerate().try_for_each(|(i, frame)| {
        let path = dir.join(format!("overlay_{i:04}.png"));
        write_overlay(
            &path,
            frame,
            &output.detections[i].regions,
            &output.tracks,
            i,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nuctrack_core::pipeline::run_frames;
    use nuctrack_core::synth::{generate, random_layout, BlobLayout, SpeckleNoise, SynthParams};

    fn sequence() -> (Vec<GrayImage>, Vec<GrayImage>) {
        let layout = BlobLayout {
            count: 6,
            frames: 5,
            close_pairs: 2,
            ..BlobLayout::default()
        };
        let specs = random_layout(&layout, 5).unwrap();
        let seq = generate(
            &specs,
            &SynthParams {
                width: 256,
                height: 256,
                frames: 5,
                red_background: 30,
                green_background: 0,
                noise: SpeckleNoise {
                    density: 0.002,
                    amplitude: 100,
                },
                seed: 5,
            },
        )
        .unwrap();
        (seq.red, seq.green)
    }

    #[test]
    fn parallel_run_equals_sequential_core_run() {
        let (red, green) = sequence();
        let params = PipelineParams::default();
        let reference = run_frames(&red, &green, &params).unwrap();
        for jobs in [1, 3] {
            assert_eq!(
                run_sequences(&red, &green, &params, Some(jobs)).unwrap(),
                reference
            );
        }
    }

    #[test]
    fn sweep_cells_equal_independent_runs() {
        let (red, green) = sequence();
        let params = PipelineParams::default();
        let s = sweep(&red, &params, 2, 2, Some(2)).unwrap();
        assert_eq!(s.grid.len(), 9);
        for ((o, c), n) in &s.grid {
            let mut p = params;
            p.detection.morph = MorphParams::new(*o, *c);
            let run = run_frames(&red, &green, &p).unwrap();
            assert_eq!(run.tracked_to_final(), *n, "opening={o} closing={c}");
        }
    }

    #[test]
    fn blank_single_frame_sweep_is_all_zero() {
        let red = vec![GrayImage::filled(32, 32, 0).unwrap()];
        let s = sweep(&red, &PipelineParams::default(), 5, 5, Some(1)).unwrap();
        assert_eq!(s.grid.len(), 36);
        assert!(s.grid.values().all(|&n| n == 0));
    }

    #[test]
    fn mismatched_channels_are_rejected() {
        let (red, green) = sequence();
        assert!(matches!(
            run_sequences(&red, &green[..2], &PipelineParams::default(), None),
            Err(PipelineError::LengthMismatch { .. })
        ));
    }
}
