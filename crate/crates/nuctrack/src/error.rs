use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("no PNG or TIFF frames in {}", .0.display())]
    NoFrames(PathBuf),
    #[error("{} is {}x{} but {} is {}x{}", second.display(), found.0, found.1, first.display(), expected.0, expected.1)]
    FrameSize {
        first: PathBuf,
        expected: (usize, usize),
        second: PathBuf,
        found: (usize, usize),
    },
    #[error("red sequence has {red} frames but green has {green}")]
    LengthMismatch { red: usize, green: usize },
    #[error("red frames are {}x{} but green frames are {}x{}", red.0, red.1, green.0, green.1)]
    ChannelSize {
        red: (usize, usize),
        green: (usize, usize),
    },
    #[error("config {}: {source}", path.display())]
    Config {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] nuctrack_core::Error),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> PipelineError {
    let path = path.into();
    move |source| PipelineError::Io { path, source }
}
