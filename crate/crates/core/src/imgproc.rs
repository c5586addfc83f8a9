//! Raster types and binary image primitives: channel extraction, fixed
//! threshold binarization and iterated erosion/dilation/opening/closing.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimension { width, height });
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::BufferLength { width, height, len });
    }
    Ok(())
}

/// Single-channel 8-bit raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }
}

/// Interleaved 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<[u8; 3]>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds from a packed `RGBRGB...` byte buffer.
    pub fn from_interleaved(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(3) {
            return Err(Error::BufferLength {
                width,
                height,
                len: bytes.len(),
            });
        }
        let data = bytes.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
        Self::new(width, height, data)
    }

    /// Replicates a gray raster into all three channels.
    pub fn from_gray(gray: &GrayImage) -> Self {
        Self {
            width: gray.width,
            height: gray.height,
            data: gray.data.iter().map(|&v| [v, v, v]).collect(),
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[[u8; 3]] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.data[y * self.width + x]
    }
}

/// Which plane of an RGB frame becomes the working gray image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Channel {
    #[default]
    Red,
    Green,
    Blue,
    /// `round(0.299 R + 0.587 G + 0.114 B)`
    Luminance,
}

#[inline]
fn luminance(px: [u8; 3]) -> u8 {
    // Integer form of the weighted sum; the weights add up to 1000 so the
    // result never exceeds 255.
    let sum = 299 * px[0] as u32 + 587 * px[1] as u32 + 114 * px[2] as u32;
    ((sum + 500) / 1000) as u8
}

/// Reduces an RGB frame to one gray plane.
///
/// `RgbImage` cannot be constructed with a zero dimension, so the dimension
/// error of the operation surfaces from [`RgbImage::new`].
pub fn extract_channel(image: &RgbImage, channel: Channel) -> GrayImage {
    let data = image
        .data
        .iter()
        .map(|&px| match channel {
            Channel::Red => px[0],
            Channel::Green => px[1],
            Channel::Blue => px[2],
            Channel::Luminance => luminance(px),
        })
        .collect();
    GrayImage {
        width: image.width,
        height: image.height,
        data,
    }
}

/// Per-pixel foreground flags, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// All-background mask.
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// Pixelwise `self ⊆ other`. Masks of different size are never subsets.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dimensions() == other.dimensions()
            && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    /// True when no pixel is foreground in both masks.
    pub fn is_disjoint(&self, other: &BinaryMask) -> bool {
        self.data.iter().zip(&other.data).all(|(&a, &b)| !(a && b))
    }

    pub fn complement(&self) -> BinaryMask {
        self.map(|b| !b)
    }

    pub fn union(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a && b)
    }

    /// Pixels in `self` but not in `other`.
    pub fn difference(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a && !b)
    }

    fn map(&self, f: impl Fn(bool) -> bool) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| f(b)).collect(),
        }
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> Result<BinaryMask> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: self.dimensions(),
                found: other.dimensions(),
            });
        }
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Copy embedded in a larger background canvas with `pad` pixels on every side.
    fn padded(&self, pad: usize) -> BinaryMask {
        let width = self.width + 2 * pad;
        let height = self.height + 2 * pad;
        let mut data = vec![false; width * height];
        for y in 0..self.height {
            let src = &self.data[y * self.width..(y + 1) * self.width];
            let start = (y + pad) * width + pad;
            data[start..start + self.width].copy_from_slice(src);
        }
        BinaryMask {
            width,
            height,
            data,
        }
    }

    /// Inverse of [`BinaryMask::padded`].
    fn unpadded(&self, pad: usize) -> BinaryMask {
        let width = self.width - 2 * pad;
        let height = self.height - 2 * pad;
        let mut data = Vec::with_capacity(width * height);
        for y in pad..pad + height {
            let start = y * self.width + pad;
            data.extend_from_slice(&self.data[start..start + width]);
        }
        BinaryMask {
            width,
            height,
            data,
        }
    }
}

/// Foreground iff intensity ≥ `threshold`.
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryMask {
    BinaryMask {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&v| v >= threshold).collect(),
    }
}

/// 3×3 neighborhood anchored at its center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StructuringElement {
    /// Full 3×3 block (8-neighborhood).
    #[default]
    Square3x3,
    /// Center plus the four edge neighbors.
    Cross3x3,
}

const SQUARE_OFFSETS: [(isize, isize); 9] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (0, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];
const CROSS_OFFSETS: [(isize, isize); 5] = [(0, -1), (-1, 0), (0, 0), (1, 0), (0, 1)];

impl StructuringElement {
    /// `(dx, dy)` offsets of the element relative to its anchor.
    pub fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            StructuringElement::Square3x3 => &SQUARE_OFFSETS,
            StructuringElement::Cross3x3 => &CROSS_OFFSETS,
        }
    }
}

/// Single erosion; out-of-bounds neighbors count as background.
pub fn erode(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    erode_n(mask, se, 1)
}

/// Single dilation; out-of-bounds neighbors count as background.
pub fn dilate(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    dilate_n(mask, se, 1)
}

/// `iterations` successive erosions.
///
/// For the square element the k-fold erosion equals a single erosion by a
/// (2k+1)-square, which is computed separably with running window counts.
pub fn erode_n(mask: &BinaryMask, se: StructuringElement, iterations: usize) -> BinaryMask {
    if iterations == 0 {
        return mask.clone();
    }
    match se {
        StructuringElement::Square3x3 => square_filter(mask, iterations, WindowOp::All),
        StructuringElement::Cross3x3 => {
            let mut out = neighborhood_filter(mask, se, WindowOp::All);
            for _ in 1..iterations {
                out = neighborhood_filter(&out, se, WindowOp::All);
            }
            out
        }
    }
}

/// `iterations` successive dilations.
pub fn dilate_n(mask: &BinaryMask, se: StructuringElement, iterations: usize) -> BinaryMask {
    if iterations == 0 {
        return mask.clone();
    }
    match se {
        StructuringElement::Square3x3 => square_filter(mask, iterations, WindowOp::Any),
        StructuringElement::Cross3x3 => {
            let mut out = neighborhood_filter(mask, se, WindowOp::Any);
            for _ in 1..iterations {
                out = neighborhood_filter(&out, se, WindowOp::Any);
            }
            out
        }
    }
}

/// `iterations` erosions followed by `iterations` dilations.
pub fn opening(mask: &BinaryMask, se: StructuringElement, iterations: usize) -> BinaryMask {
    if iterations == 0 {
        return mask.clone();
    }
    dilate_n(&erode_n(mask, se, iterations), se, iterations)
}

/// `iterations` dilations followed by `iterations` erosions.
///
/// Evaluated on a canvas padded by `iterations` background pixels so the
/// intermediate dilation is not clipped at the frame edge; this keeps the
/// result a superset of the input everywhere, including along the border.
pub fn closing(mask: &BinaryMask, se: StructuringElement, iterations: usize) -> BinaryMask {
    if iterations == 0 {
        return mask.clone();
    }
    let padded = mask.padded(iterations);
    let closed = erode_n(&dilate_n(&padded, se, iterations), se, iterations);
    closed.unpadded(iterations)
}

/// Noise-removal recipe applied after binarization: opening, then closing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphParams {
    pub opening: usize,
    pub closing: usize,
    pub se: StructuringElement,
}

impl Default for MorphParams {
    fn default() -> Self {
        Self {
            opening: 2,
            closing: 0,
            se: StructuringElement::Square3x3,
        }
    }
}

impl MorphParams {
    pub fn new(opening: usize, closing: usize) -> Self {
        Self {
            opening,
            closing,
            ..Self::default()
        }
    }

    pub fn apply(&self, mask: &BinaryMask) -> BinaryMask {
        let opened = opening(mask, self.se, self.opening);
        closing(&opened, self.se, self.closing)
    }
}

#[derive(Clone, Copy)]
enum WindowOp {
    /// Erosion: every neighbor must be foreground.
    All,
    /// Dilation: some neighbor must be foreground.
    Any,
}

fn neighborhood_filter(mask: &BinaryMask, se: StructuringElement, op: WindowOp) -> BinaryMask {
    let (w, h) = (mask.width as isize, mask.height as isize);
    let offsets = se.offsets();
    let mut data = Vec::with_capacity(mask.data.len());
    for y in 0..h {
        for x in 0..w {
            let mut hits = offsets.iter().map(|&(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                nx >= 0 && ny >= 0 && nx < w && ny < h && mask.data[(ny * w + nx) as usize]
            });
            data.push(match op {
                WindowOp::All => hits.all(|b| b),
                WindowOp::Any => hits.any(|b| b),
            });
        }
    }
    BinaryMask {
        width: mask.width,
        height: mask.height,
        data,
    }
}

/// Separable (2r+1)-square filter: a horizontal then a vertical 1-D pass.
fn square_filter(mask: &BinaryMask, radius: usize, op: WindowOp) -> BinaryMask {
    let (w, h) = (mask.width, mask.height);
    let full = 2 * radius + 1;
    let decide = |count: usize, lo_clipped: bool, hi_clipped: bool| match op {
        WindowOp::All => !lo_clipped && !hi_clipped && count == full,
        WindowOp::Any => count > 0,
    };

    // Horizontal pass with a per-row prefix count.
    let mut horizontal = vec![false; w * h];
    let mut prefix = vec![0usize; w + 1];
    for y in 0..h {
        let row = &mask.data[y * w..(y + 1) * w];
        for (x, &b) in row.iter().enumerate() {
            prefix[x + 1] = prefix[x] + b as usize;
        }
        let out = &mut horizontal[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            let lo = x.saturating_sub(radius);
            let hi = (x + radius).min(w - 1);
            let count = prefix[hi + 1] - prefix[lo];
            *o = decide(count, x < radius, x + radius >= w);
        }
    }

    // Vertical pass keeping a running count per column over rows [y-r, y+r].
    let mut data = vec![false; w * h];
    let mut counts = vec![0usize; w];
    for y in 0..radius.min(h - 1) + 1 {
        for (c, &b) in counts.iter_mut().zip(&horizontal[y * w..(y + 1) * w]) {
            *c += b as usize;
        }
    }
    for y in 0..h {
        if y > 0 {
            let enter = y + radius;
            if enter < h {
                for (c, &b) in counts
                    .iter_mut()
                    .zip(&horizontal[enter * w..(enter + 1) * w])
                {
                    *c += b as usize;
                }
            }
            if y > radius {
                let leave = y - radius - 1;
                for (c, &b) in counts
                    .iter_mut()
                    .zip(&horizontal[leave * w..(leave + 1) * w])
                {
                    *c -= b as usize;
                }
            }
        }
        let lo_clipped = y < radius;
        let hi_clipped = y + radius >= h;
        for (o, &c) in data[y * w..(y + 1) * w].iter_mut().zip(&counts) {
            *o = decide(c, lo_clipped, hi_clipped);
        }
    }

    BinaryMask {
        width: w,
        height: h,
        data,
    }
}
