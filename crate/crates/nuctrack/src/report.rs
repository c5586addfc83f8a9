//! CSV emitters. All output is UTF-8 with LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nuctrack_core::autothresh::ThresholdScanRow;
use nuctrack_core::signal::SignalRecord;
use nuctrack_core::tracker::Track;

use crate::error::{io_err, PipelineError, Result};
use crate::runner::SweepResult;

pub const TRACKS_HEADER: &str = "frame,track_id,centroid_x,centroid_y,bbox_min_x,bbox_min_y,bbox_max_x,bbox_max_y,area,nucleus_mean,cytoplasm_mean,signal_ratio";
pub const SCAN_HEADER: &str = "threshold,raw_components,clean_components,noise_count";

/// One row per signal record, joined with the track's geometry in that frame.
pub fn tracks_csv(tracks: &[Track], records: &[SignalRecord]) -> Result<String> {
    let mut sorted: Vec<&SignalRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.frame_index, r.track_id));

    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACKS_HEADER);
    out.push('\n');
    for r in sorted {
        let region = tracks
            .iter()
            .find(|t| t.id == r.track_id)
            .and_then(|t| t.at(r.frame_index))
            .map(|o| &o.region)
            .ok_or_else(|| {
                PipelineError::Invalid(format!(
                    "record for track {} in frame {} has no matching observation",
                    r.track_id, r.frame_index
                ))
            })?;
        let b = &region.bbox;
        writeln!(
            out,
            "{},{},{:.4},{:.4},{},{},{},{},{},{:.4},{:.4},{:.4}",
            r.frame_index,
            r.track_id,
            region.centroid.x,
            region.centroid.y,
            b.min_x,
            b.min_y,
            b.max_x,
            b.max_y,
            region.area,
            r.nucleus_mean,
            r.cytoplasm_mean,
            r.signal_ratio
        )
        .unwrap();
    }
    Ok(out)
}

pub fn write_tracks_csv(path: &Path, tracks: &[Track], records: &[SignalRecord]) -> Result<()> {
    fs::write(path, tracks_csv(tracks, records)?).map_err(io_err(path))
}

/// Closing counts down the rows, opening counts across the columns.
pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("closing\\opening");
    for o in 0..=sweep.max_opening {
        write!(out, ",{o}").unwrap();
    }
    out.push('\n');
    for c in 0..=sweep.max_closing {
        write!(out, "{c}").unwrap();
        for o in 0..=sweep.max_opening {
            write!(out, ",{}", sweep.get(o, c).unwrap_or(0)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_sweep_csv(path: &Path, sweep: &SweepResult) -> Result<()> {
    fs::write(path, sweep_csv(sweep)).map_err(io_err(path))
}

pub fn scan_csv(rows: &[ThresholdScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.threshold, r.raw_components, r.clean_components, r.noise_count
        )
        .unwrap();
    }
    out
}

pub fn write_scan_csv(path: &Path, rows: &[ThresholdScanRow]) -> Result<()> {
    fs::write(path, scan_csv(rows)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nuctrack_core::regions::{BoundingBox, Point, Region};
    use nuctrack_core::tracker::{Observation, TrackStatus};

    fn track() -> Track {
        Track {
            id: 3,
            status: TrackStatus::Live,
            history: vec![Observation {
                frame: 0,
                region: Region {
                    label: 1,
                    area: 81,
                    centroid: Point::new(10.5, 20.25),
                    bbox: BoundingBox::new(5, 15, 15, 25),
                },
            }],
        }
    }

    #[test]
    fn empty_records_give_header_only() {
        assert_eq!(tracks_csv(&[], &[]).unwrap(), format!("{TRACKS_HEADER}\n"));
    }

    #[test]
    fn one_record_line() {
        let rec = SignalRecord {
            track_id: 3,
            frame_index: 0,
            nucleus_mean: 200.0,
            cytoplasm_mean: 50.0,
            signal_ratio: 150.0,
        };
        let csv = tracks_csv(&[track()], &[rec]).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "0,3,10.5000,20.2500,5,15,15,25,81,200.0000,50.0000,150.0000"
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn orphan_record_is_an_error() {
        let rec = SignalRecord {
            track_id: 9,
            frame_index: 0,
            nucleus_mean: 0.0,
            cytoplasm_mean: 0.0,
            signal_ratio: 0.0,
        };
        assert!(tracks_csv(&[track()], &[rec]).is_err());
    }

    #[test]
    fn scan_rows() {
        let rows = [ThresholdScanRow {
            threshold: 255,
            raw_components: 4,
            clean_components: 1,
            noise_count: 3,
        }];
        assert_eq!(scan_csv(&rows), format!("{SCAN_HEADER}\n255,4,1,3\n"));
    }
}
