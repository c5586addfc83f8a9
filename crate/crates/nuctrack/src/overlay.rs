//! Debug overlays: the red frame in gray with each region's box, centroid
//! and track id drawn on top.
//!
//! Box colors: green for tracks still live at the end of the run, magenta for
//! excluded tracks, blue for regions no track owns in that frame.

use std::path::Path;

use image::{Rgb, RgbImage};
use nuctrack_core::imgproc::GrayImage;
use nuctrack_core::regions::Region;
use nuctrack_core::tracker::Track;

use crate::error::{PipelineError, Result};

pub const LIVE_COLOR: Rgb<u8> = Rgb([0, 255, 0]);
pub const EXCLUDED_COLOR: Rgb<u8> = Rgb([255, 0, 255]);
pub const UNTRACKED_COLOR: Rgb<u8> = Rgb([0, 128, 255]);
pub const TEXT_COLOR: Rgb<u8> = Rgb([255, 255, 0]);

/// 3×5 digit glyphs, one row per entry, high bit on the left.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b001, 0b001, 0b001],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

fn put(img: &mut RgbImage, x: i64, y: i64, color: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, color);
    }
}

fn draw_rect(img: &mut RgbImage, region: &Region, color: Rgb<u8>) {
    let b = &region.bbox;
    let (x0, y0, x1, y1) = (
        b.min_x as i64,
        b.min_y as i64,
        b.max_x as i64,
        b.max_y as i64,
    );
    for x in x0..=x1 {
        put(img, x, y0, color);
        put(img, x, y1, color);
    }
    for y in y0..=y1 {
        put(img, x0, y, color);
        put(img, x1, y, color);
    }
}

fn draw_cross(img: &mut RgbImage, region: &Region, color: Rgb<u8>) {
    let cx = region.centroid.x.round() as i64;
    let cy = region.centroid.y.round() as i64;
    for d in -2..=2 {
        put(img, cx + d, cy, color);
        put(img, cx, cy + d, color);
    }
}

/// Draws `n` in decimal with its top-left corner at `(x, y)`.
pub fn draw_number(img: &mut RgbImage, x: i64, y: i64, n: usize, color: Rgb<u8>) {
    for (i, ch) in n.to_string().bytes().enumerate() {
        let glyph = DIGITS[(ch - b'0') as usize];
        let gx = x + 4 * i as i64;
        for (row, bits) in glyph.iter().enumerate() {
            for col in 0..3 {
                if bits & (0b100 >> col) != 0 {
                    put(img, gx + col, y + row as i64, color);
                }
            }
        }
    }
}

/// Renders frame `frame_index` with its detected regions.
pub fn render_overlay(
    red: &GrayImage,
    regions: &[Region],
    tracks: &[Track],
    frame_index: usize,
) -> RgbImage {
    let mut img = RgbImage::from_fn(red.width() as u32, red.height() as u32, |x, y| {
        let v = red.get(x as usize, y as usize);
        Rgb([v, v, v])
    });
    for region in regions {
        let owner = tracks.iter().find(|t| {
            t.at(frame_index)
                .is_some_and(|o| o.region.label == region.label)
        });
        let color = match owner {
            Some(t) if t.is_live() => LIVE_COLOR,
            Some(_) => EXCLUDED_COLOR,
            None => UNTRACKED_COLOR,
        };
        draw_rect(&mut img, region, color);
        draw_cross(&mut img, region, color);
        if let Some(t) = owner {
            let b = &region.bbox;
            draw_number(
                &mut img,
                b.min_x as i64,
                b.min_y as i64 - 7,
                t.id as usize,
                TEXT_COLOR,
            );
        }
    }
    draw_number(&mut img, 2, 2, frame_index, TEXT_COLOR);
    img
}

pub fn write_overlay(
    path: &Path,
    red: &GrayImage,
    regions: &[Region],
    tracks: &[Track],
    frame_index: usize,
) -> Result<()> {
    render_overlay(red, regions, tracks, frame_index)
        .save(path)
        .map_err(|source| PipelineError::Image {
            path: path.to_path_buf(),
            source,
        })
}
