use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid image dimensions {width}x{height}")]
    Dimension { width: usize, height: usize },
    #[error("buffer of length {len} does not fit a {width}x{height} raster")]
    BufferLength {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("duplicate region label {0}")]
    DuplicateLabel(u32),
    #[error("region label {0} is not present in the label map")]
    MissingLabel(u32),
    #[error("match references previous label {0}, which no live track owns")]
    UnknownTrack(u32),
    #[error("frame {found} does not follow frame {expected_after}")]
    FrameOrder { expected_after: usize, found: usize },
    #[error("measurement undefined: {0} mask is empty")]
    EmptyMask(&'static str),
    #[error("blob {id} leaves the frame at frame {frame}")]
    BlobOutOfBounds { id: u32, frame: usize },
    #[error("could not place {0} blobs without violating the separation constraint")]
    LayoutFailed(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
