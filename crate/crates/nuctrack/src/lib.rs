//! File formats, parallel scheduling and the command line around
//! [`nuctrack_core`].
//!
//! * [`ingest`] reads PNG/TIFF frame directories.
//! * [`runner`] runs detection and measurement across frames with rayon and
//!   drives the opening/closing sweep.
//! * [`report`] writes the track, sweep and threshold-scan CSV files.
//! * [`overlay`] renders debug PNGs with boxes, centroids and track ids.
//! * [`synth_io`] writes synthetic sequences and their ground-truth JSON.

pub mod config;
pub mod error;
pub mod ingest;
pub mod overlay;
pub mod report;
pub mod runner;
pub mod synth_io;

pub use error::{PipelineError, Result};
