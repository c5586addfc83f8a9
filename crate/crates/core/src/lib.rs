//! Detection, tracking and signal quantification of fluorescent cell nuclei in
//! two-channel time-lapse sequences.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of in-memory rasters; file formats, parallel scheduling and the
//! command line live in the `nuctrack` crate.
//!
//! The processing chain for one red (nucleus) frame is:
//!
//! 1. [`autothresh::select_threshold`] scans every threshold from 255 down to 0
//!    and picks the midpoint between the noise knee and the threshold that
//!    yields the most nuclei.
//! 2. [`imgproc::binarize`], then opening and closing via [`imgproc::MorphParams`].
//! 3. [`regions::label_components`] and [`regions::filter_regions`].
//!
//! Consecutive frames are linked by [`tracker::associate_frame`], which accepts
//! a match only when the previous and current nucleus find each other through
//! the centroid-in-bounding-rectangle test in both directions. Tracked cells
//! are measured on the green frame by [`signal::build_masks`] and
//! [`signal::measure`].
//!
//! [`synth`] renders synthetic sequences with exact ground truth.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod autothresh;
pub mod error;
pub mod imgproc;
pub mod pipeline;
pub mod regions;
pub mod signal;
pub mod synth;
pub mod tracker;

pub use error::{Error, Result};
