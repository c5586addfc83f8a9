//! Synthetic two-channel sequences with exact ground truth.
//!
//! Red frames carry filled discs (nuclei) on a flat background plus seeded
//! speckle noise; green frames carry each nucleus disc at its nuclear level
//! inside an annulus at its cytoplasmic level. A pixel belongs to a disc of
//! radius `r` iff its center lies within distance `r` of the blob center.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imgproc::{BinaryMask, GrayImage};
use crate::regions::{BoundingBox, Point};
use crate::tracker::Track;

/// One synthetic cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub id: u32,
    /// Disc center per frame.
    pub trajectory: Vec<Point>,
    pub radius: f64,
    /// Red-channel level of the nucleus.
    pub nucleus_intensity: u8,
    pub green_nucleus_level: u8,
    pub green_cytoplasm_level: u8,
    /// Width of the green cytoplasm annulus beyond `radius`.
    pub cytoplasm_width: f64,
}

/// Independent per-pixel speckle on the red channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeckleNoise {
    /// Probability that a pixel is hit.
    pub density: f64,
    /// Added (saturating) to a hit pixel.
    pub amplitude: u8,
}

impl SpeckleNoise {
    pub const NONE: SpeckleNoise = SpeckleNoise {
        density: 0.0,
        amplitude: 0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub red_background: u8,
    pub green_background: u8,
    pub noise: SpeckleNoise,
    pub seed: u64,
}

/// Where a blob is in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthObservation {
    pub blob_id: u32,
    pub center: Point,
    /// Mean of the rasterized disc pixels.
    pub centroid: Point,
    pub area: usize,
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlobTruth {
    pub id: u32,
    pub radius: f64,
    pub nucleus_intensity: u8,
    pub green_nucleus_level: u8,
    pub green_cytoplasm_level: u8,
    /// `green_nucleus_level - green_cytoplasm_level`
    pub signal_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub width: usize,
    pub height: usize,
    /// Observations per frame, in blob order.
    pub frames: Vec<Vec<TruthObservation>>,
    pub blobs: Vec<BlobTruth>,
}

impl GroundTruth {
    pub fn observation(&self, frame: usize, blob_id: u32) -> Option<&TruthObservation> {
        self.frames
            .get(frame)?
            .iter()
            .find(|o| o.blob_id == blob_id)
    }

    /// Rasterized nucleus mask of one blob in one frame.
    pub fn mask(&self, frame: usize, blob_id: u32) -> Option<BinaryMask> {
        let obs = self.observation(frame, blob_id)?;
        let blob = self.blobs.iter().find(|b| b.id == blob_id)?;
        let mut mask = BinaryMask::empty(self.width, self.height).ok()?;
        for_each_disc_pixel(obs.center, blob.radius, self.width, self.height, |x, y| {
            mask.set(x, y, true)
        });
        Some(mask)
    }
}

pub struct SynthSequence {
    pub red: Vec<GrayImage>,
    pub green: Vec<GrayImage>,
    pub truth: GroundTruth,
}

/// Calls `f` for every in-frame pixel whose center lies within `radius` of `center`.
pub fn for_each_disc_pixel(
    center: Point,
    radius: f64,
    width: usize,
    height: usize,
    mut f: impl FnMut(usize, usize),
) {
    let r2 = radius * radius;
    let lo = |c: f64| ((c - radius) as isize - 1).max(0) as usize;
    let hi = |c: f64, n: usize| (((c + radius) as isize + 1).max(0) as usize).min(n - 1);
    for y in lo(center.y)..=hi(center.y, height) {
        for x in lo(center.x)..=hi(center.x, width) {
            let (dx, dy) = (x as f64 - center.x, y as f64 - center.y);
            if dx * dx + dy * dy <= r2 {
                f(x, y);
            }
        }
    }
}

fn validate(specs: &[BlobSpec], params: &SynthParams) -> Result<()> {
    if params.width == 0 || params.height == 0 {
        return Err(Error::Dimension {
            width: params.width,
            height: params.height,
        });
    }
    if !(0.0..=1.0).contains(&params.noise.density) {
        return Err(Error::InvalidParameter(
            "speckle density must lie in [0, 1]",
        ));
    }
    let mut ids = BTreeSet::new();
    for spec in specs {
        if !ids.insert(spec.id) {
            return Err(Error::InvalidParameter("blob ids must be unique"));
        }
        if spec.radius < 2.0 {
            return Err(Error::InvalidParameter("blob radius must be at least 2"));
        }
        if spec.trajectory.len() != params.frames {
            return Err(Error::InvalidParameter(
                "trajectory length must equal the frame count",
            ));
        }
        for (frame, c) in spec.trajectory.iter().enumerate() {
            let inside = c.x - spec.radius >= 0.0
                && c.y - spec.radius >= 0.0
                && c.x + spec.radius <= (params.width - 1) as f64
                && c.y + spec.radius <= (params.height - 1) as f64;
            if !inside {
                return Err(Error::BlobOutOfBounds { id: spec.id, frame });
            }
        }
    }
    Ok(())
}

/// Renders the red/green sequences and their ground truth.
///
/// The output depends only on the arguments; noise for frame `k` is drawn
/// from stream `k` of a ChaCha generator seeded with `params.seed`.
pub fn generate(specs: &[BlobSpec], params: &SynthParams) -> Result<SynthSequence> {
    validate(specs, params)?;
    let (w, h) = (params.width, params.height);
    let mut red = Vec::with_capacity(params.frames);
    let mut green = Vec::with_capacity(params.frames);
    let mut frames = Vec::with_capacity(params.frames);

    for frame in 0..params.frames {
        let mut r = GrayImage::filled(w, h, params.red_background)?;
        let mut g = GrayImage::filled(w, h, params.green_background)?;
        let mut observations = Vec::with_capacity(specs.len());

        // Annuli first so no cytoplasm ever paints over a nucleus.
        for spec in specs {
            let c = spec.trajectory[frame];
            for_each_disc_pixel(c, spec.radius + spec.cytoplasm_width, w, h, |x, y| {
                g.set(x, y, spec.green_cytoplasm_level)
            });
        }
        for spec in specs {
            let c = spec.trajectory[frame];
            let (mut area, mut sx, mut sy) = (0usize, 0u64, 0u64);
            let mut bbox = BoundingBox::new(usize::MAX, usize::MAX, 0, 0);
            for_each_disc_pixel(c, spec.radius, w, h, |x, y| {
                r.set(x, y, spec.nucleus_intensity);
                g.set(x, y, spec.green_nucleus_level);
                area += 1;
                sx += x as u64;
                sy += y as u64;
                bbox.min_x = bbox.min_x.min(x);
                bbox.min_y = bbox.min_y.min(y);
                bbox.max_x = bbox.max_x.max(x);
                bbox.max_y = bbox.max_y.max(y);
            });
            observations.push(TruthObservation {
                blob_id: spec.id,
                center: c,
                centroid: Point::new(sx as f64 / area as f64, sy as f64 / area as f64),
                area,
                bbox,
            });
        }

        if params.noise.density > 0.0 && params.noise.amplitude > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(frame as u64);
            for v in r.data_mut() {
                if rng.random::<f64>() < params.noise.density {
                    *v = v.saturating_add(params.noise.amplitude);
                }
            }
        }

        red.push(r);
        green.push(g);
        frames.push(observations);
    }

    let blobs = specs
        .iter()
        .map(|s| BlobTruth {
            id: s.id,
            radius: s.radius,
            nucleus_intensity: s.nucleus_intensity,
            green_nucleus_level: s.green_nucleus_level,
            green_cytoplasm_level: s.green_cytoplasm_level,
            signal_ratio: s.green_nucleus_level as f64 - s.green_cytoplasm_level as f64,
        })
        .collect();
    Ok(SynthSequence {
        red,
        green,
        truth: GroundTruth {
            width: w,
            height: h,
            frames,
            blobs,
        },
    })
}

/// Recipe for a random population of drifting blobs with constant velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobLayout {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub count: usize,
    pub radius_min: f64,
    pub radius_max: f64,
    /// Upper bound on per-frame displacement.
    pub max_step: f64,
    /// Minimum edge-to-edge distance between unrelated blobs, in every frame.
    pub min_gap: f64,
    /// Number of blob pairs placed side by side and moving together.
    pub close_pairs: usize,
    /// Range of the horizontal edge-to-edge gap inside a pair.
    pub pair_gap_min: f64,
    pub pair_gap_max: f64,
    pub nucleus_intensity: u8,
    pub green_nucleus_level: u8,
    pub green_cytoplasm_level: u8,
    pub cytoplasm_width: f64,
}

impl Default for BlobLayout {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            frames: 10,
            count: 5,
            radius_min: 6.0,
            radius_max: 10.0,
            max_step: 3.0,
            min_gap: 20.0,
            close_pairs: 0,
            pair_gap_min: 3.0,
            pair_gap_max: 10.0,
            nucleus_intensity: 180,
            green_nucleus_level: 200,
            green_cytoplasm_level: 50,
            cytoplasm_width: 10.0,
        }
    }
}

const MAX_ATTEMPTS: usize = 10_000;

/// Draws a random layout; identical seeds give identical layouts.
pub fn random_layout(layout: &BlobLayout, seed: u64) -> Result<Vec<BlobSpec>> {
    if layout.radius_min < 2.0 || layout.radius_max < layout.radius_min {
        return Err(Error::InvalidParameter("invalid radius range"));
    }
    if layout.pair_gap_max < layout.pair_gap_min || 2 * layout.close_pairs > layout.count {
        return Err(Error::InvalidParameter("invalid pair configuration"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs: Vec<BlobSpec> = Vec::with_capacity(layout.count);
    let frames = layout.frames.max(1);
    let margin = 1.0;

    let fits = |traj: &[Point], radius: f64| {
        traj.iter().all(|c| {
            c.x - radius >= margin
                && c.y - radius >= margin
                && c.x + radius <= (layout.width - 1) as f64 - margin
                && c.y + radius <= (layout.height - 1) as f64 - margin
        })
    };
    let clear_of = |specs: &[BlobSpec], traj: &[Point], radius: f64| {
        specs.iter().all(|s| {
            s.trajectory.iter().zip(traj).all(|(a, b)| {
                let reach = s.radius + radius + layout.min_gap;
                a.distance_squared(*b) >= reach * reach
            })
        })
    };

    let mut next_id = 1u32;
    let mut make = |center: Point, v: Point, radius: f64| {
        let trajectory: Vec<Point> = (0..frames)
            .map(|k| Point::new(center.x + v.x * k as f64, center.y + v.y * k as f64))
            .collect();
        let spec = BlobSpec {
            id: next_id,
            trajectory,
            radius,
            nucleus_intensity: layout.nucleus_intensity,
            green_nucleus_level: layout.green_nucleus_level,
            green_cytoplasm_level: layout.green_cytoplasm_level,
            cytoplasm_width: layout.cytoplasm_width,
        };
        next_id += 1;
        spec
    };

    let mut placed_pairs = 0;
    let mut attempts = 0;
    while specs.len() < layout.count {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::LayoutFailed(layout.count));
        }
        let v = loop {
            let (ux, uy) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            if ux * ux + uy * uy <= 1.0 {
                break Point::new(ux * layout.max_step, uy * layout.max_step);
            }
        };
        let draw_radius = |rng: &mut ChaCha8Rng| {
            if layout.radius_max > layout.radius_min {
                rng.random_range(layout.radius_min..=layout.radius_max)
            } else {
                layout.radius_min
            }
        };
        let radius = draw_radius(&mut rng);
        let center = Point::new(
            rng.random_range(0.0..layout.width as f64),
            rng.random_range(0.0..layout.height as f64),
        );

        if placed_pairs < layout.close_pairs {
            let partner_radius = draw_radius(&mut rng);
            let gap = if layout.pair_gap_max > layout.pair_gap_min {
                rng.random_range(layout.pair_gap_min..=layout.pair_gap_max)
            } else {
                layout.pair_gap_min
            };
            let a = make(center, v, radius);
            let b = make(
                Point::new(center.x + radius + gap + partner_radius, center.y),
                v,
                partner_radius,
            );
            if fits(&a.trajectory, radius)
                && fits(&b.trajectory, partner_radius)
                && clear_of(&specs, &a.trajectory, radius)
                && clear_of(&specs, &b.trajectory, partner_radius)
            {
                specs.push(a);
                specs.push(b);
                placed_pairs += 1;
            }
        } else {
            let s = make(center, v, radius);
            if fits(&s.trajectory, radius) && clear_of(&specs, &s.trajectory, radius) {
                specs.push(s);
            }
        }
    }
    // Ids are drawn per attempt; renumber so accepted blobs are 1..=count.
    for (i, s) in specs.iter_mut().enumerate() {
        s.id = i as u32 + 1;
    }
    Ok(specs)
}

/// How well tracks follow ground-truth blobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingScore {
    /// Fraction of blobs followed by a pure track up to the final frame.
    pub survival: f64,
    /// Fraction of tracks that stay on one blob; 0 when there are no tracks.
    pub purity: f64,
    pub pure_tracks: usize,
    pub total_tracks: usize,
    pub surviving_blobs: usize,
    pub blob_count: usize,
}

/// Blob a track follows within `tol` pixels in every observed frame.
fn followed_blob(track: &Track, truth: &GroundTruth, tol: f64) -> Option<u32> {
    let first = track.history.first()?;
    let tol2 = tol * tol;
    let candidate = truth
        .frames
        .get(first.frame)?
        .iter()
        .filter(|o| o.centroid.distance_squared(first.region.centroid) <= tol2)
        .min_by(|a, b| {
            let da = a.centroid.distance_squared(first.region.centroid);
            let db = b.centroid.distance_squared(first.region.centroid);
            da.total_cmp(&db)
        })?
        .blob_id;
    track
        .history
        .iter()
        .all(|o| {
            truth
                .observation(o.frame, candidate)
                .is_some_and(|t| t.centroid.distance_squared(o.region.centroid) <= tol2)
        })
        .then_some(candidate)
}

pub fn score_tracking(tracks: &[Track], truth: &GroundTruth, tol: f64) -> TrackingScore {
    let final_frame = truth.frames.len().checked_sub(1);
    let mut pure_tracks = 0;
    let mut survivors = BTreeSet::new();
    for t in tracks {
        if let Some(blob) = followed_blob(t, truth, tol) {
            pure_tracks += 1;
            let reaches_end = t.is_live() && t.last().map(|o| o.frame) == final_frame;
            if reaches_end {
                survivors.insert(blob);
            }
        }
    }
    let blob_count = truth.blobs.len();
    let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    TrackingScore {
        survival: ratio(survivors.len(), blob_count),
        purity: ratio(pure_tracks, tracks.len()),
        pure_tracks,
        total_tracks: tracks.len(),
        surviving_blobs: survivors.len(),
        blob_count,
    }
}

/// Convenience: one static blob at `center` for every frame.
pub fn static_blob(id: u32, center: Point, radius: f64, frames: usize) -> BlobSpec {
    BlobSpec {
        id,
        trajectory: vec![center; frames],
        radius,
        nucleus_intensity: 180,
        green_nucleus_level: 200,
        green_cytoplasm_level: 50,
        cytoplasm_width: 10.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::Region;
    use crate::tracker::{Observation, TrackStatus};

    fn params(frames: usize) -> SynthParams {
        SynthParams {
            width: 64,
            height: 64,
            frames,
            red_background: 30,
            green_background: 0,
            noise: SpeckleNoise::NONE,
            seed: 7,
        }
    }

    #[test]
    fn radius_five_disc_has_81_pixels() {
        let mut n = 0;
        for_each_disc_pixel(Point::new(20.0, 20.0), 5.0, 64, 64, |_, _| n += 1);
        assert_eq!(n, 81);
    }

    #[test]
    fn static_blob_frames_are_identical() {
        let spec = static_blob(1, Point::new(30.0, 30.0), 5.0, 3);
        let seq = generate(&[spec], &params(3)).unwrap();
        assert_eq!(seq.red.len(), 3);
        assert_eq!(seq.red[0], seq.red[1]);
        assert_eq!(seq.green[1], seq.green[2]);
        for f in &seq.truth.frames {
            assert_eq!(f[0].centroid, Point::new(30.0, 30.0));
            assert_eq!(f[0].area, 81);
        }
        assert_eq!(seq.truth.mask(0, 1).unwrap().count(), 81);
        assert_eq!(seq.truth.blobs[0].signal_ratio, 150.0);
    }

    #[test]
    fn noise_is_seeded() {
        let spec = static_blob(1, Point::new(30.0, 30.0), 5.0, 2);
        let mut p = params(2);
        p.noise = SpeckleNoise {
            density: 0.05,
            amplitude: 100,
        };
        let a = generate(core::slice::from_ref(&spec), &p).unwrap();
        let b = generate(core::slice::from_ref(&spec), &p).unwrap();
        assert_eq!(a.red, b.red);
        assert_ne!(a.red[0], a.red[1], "frames draw from different streams");
        assert_eq!(a.green[0], a.green[1], "green carries no noise");
        p.seed = 8;
        assert_ne!(generate(&[spec], &p).unwrap().red, a.red);
    }

    #[test]
    fn out_of_bounds_blob_is_rejected() {
        let mut spec = static_blob(3, Point::new(30.0, 30.0), 5.0, 2);
        spec.trajectory[1] = Point::new(61.0, 30.0);
        assert_eq!(
            generate(&[spec], &params(2)).err(),
            Some(Error::BlobOutOfBounds { id: 3, frame: 1 })
        );
    }

    #[test]
    fn layout_respects_constraints() {
        let layout = BlobLayout {
            count: 8,
            close_pairs: 2,
            ..BlobLayout::default()
        };
        let specs = random_layout(&layout, 11).unwrap();
        assert_eq!(specs.len(), 8);
        assert_eq!(specs, random_layout(&layout, 11).unwrap());
        for s in &specs {
            for w in s.trajectory.windows(2) {
                assert!(w[0].distance_squared(w[1]) <= layout.max_step * layout.max_step + 1e-9);
            }
        }
        generate(
            &specs,
            &SynthParams {
                width: 256,
                height: 256,
                ..params(10)
            },
        )
        .unwrap();
    }

    fn track_on(truth: &GroundTruth, blob: u32, frames: usize, status: TrackStatus) -> Track {
        Track {
            id: blob,
            status,
            history: (0..frames)
                .map(|f| {
                    let o = truth.observation(f, blob).unwrap();
                    Observation {
                        frame: f,
                        region: Region {
                            label: 1,
                            area: o.area,
                            centroid: o.centroid,
                            bbox: o.bbox,
                        },
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn scoring() {
        let specs = [
            static_blob(1, Point::new(15.0, 15.0), 4.0, 3),
            static_blob(2, Point::new(45.0, 45.0), 4.0, 3),
        ];
        let seq = generate(&specs, &params(3)).unwrap();
        let truth = &seq.truth;

        let perfect = [
            track_on(truth, 1, 3, TrackStatus::Live),
            track_on(truth, 2, 3, TrackStatus::Live),
        ];
        let s = score_tracking(&perfect, truth, 2.0);
        assert_eq!((s.survival, s.purity), (1.0, 1.0));

        assert_eq!(score_tracking(&[], truth, 2.0).survival, 0.0);

        let partial = [
            track_on(truth, 1, 3, TrackStatus::Live),
            track_on(truth, 2, 2, TrackStatus::Excluded),
        ];
        let s = score_tracking(&partial, truth, 2.0);
        assert_eq!((s.survival, s.purity), (0.5, 1.0));

        let mut jumper = track_on(truth, 1, 3, TrackStatus::Live);
        jumper.history[2].region.centroid = truth.observation(2, 2).unwrap().centroid;
        let s = score_tracking(&[jumper], truth, 2.0);
        assert_eq!((s.pure_tracks, s.survival), (0, 0.0));
    }
}
