//! Frame-directory ingestion.

use std::fs;
use std::path::{Path, PathBuf};

use image::DynamicImage;
use nuctrack_core::imgproc::{extract_channel, Channel, GrayImage, RgbImage};

use crate::error::{io_err, PipelineError, Result};

fn is_frame_file(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "tif" | "tiff"))
}

/// PNG/TIFF files in `dir`, sorted by file name.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if is_frame_file(&path) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if files.is_empty() {
        return Err(PipelineError::NoFrames(dir.to_path_buf()));
    }
    Ok(files)
}

/// 16-bit samples map onto 0..=255 with 65535 -> 255.
fn rescale16(v: u16) -> u8 {
    ((v as u32 * 255 + 32767) / 65535) as u8
}

fn to_rgb8(img: DynamicImage) -> (usize, usize, Vec<u8>) {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let bytes = match img {
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => img
            .to_rgb16()
            .into_raw()
            .into_iter()
            .map(rescale16)
            .collect(),
        other => other.to_rgb8().into_raw(),
    };
    (w, h, bytes)
}

/// Decodes one frame and reduces it to `channel`.
pub fn read_frame(path: &Path, channel: Channel) -> Result<GrayImage> {
    let decoded = image::open(path).map_err(|source| PipelineError::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let (w, h, bytes) = to_rgb8(decoded);
    let rgb = RgbImage::from_interleaved(w, h, &bytes)?;
    Ok(extract_channel(&rgb, channel))
}

/// Reads every frame of `dir` in file-name order.
pub fn ingest_sequence(dir: &Path, channel: Channel) -> Result<Vec<GrayImage>> {
    let files = list_frames(dir)?;
    let mut frames: Vec<GrayImage> = Vec::with_capacity(files.len());
    for path in &files {
        let img = read_frame(path, channel)?;
        if let Some(first) = frames.first() {
            if first.dimensions() != img.dimensions() {
                return Err(PipelineError::FrameSize {
                    first: files[0].clone(),
                    expected: first.dimensions(),
                    second: path.clone(),
                    found: img.dimensions(),
                });
            }
        }
        frames.push(img);
    }
    log::debug!("read {} frames from {}", frames.len(), dir.display());
    Ok(frames)
}

/// Writes a gray frame as an 8-bit PNG.
pub fn write_gray_png(img: &GrayImage, path: &Path) -> Result<()> {
    let buf =
        image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec())
            .expect("buffer matches dimensions");
    buf.save(path).map_err(|source| PipelineError::Image {
        path: path.to_path_buf(),
        source,
    })
}
